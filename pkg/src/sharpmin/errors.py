"""Exception types shared across the package."""


class SharpminError(Exception):
    """Base class for all package errors."""


class InputError(SharpminError, ValueError):
    """Malformed input data (files, matrices, construction arguments)."""


class DegenerateCloudError(SharpminError, ValueError):
    """Point cloud has no finite value besides the base point."""


class InfeasibleLipschitzError(SharpminError, ValueError):
    """Requested Lipschitz constant cannot interpolate the anchors."""


class DualRangeError(SharpminError, ValueError):
    """Dual grid does not cover the slopes of the primal function."""

    def __init__(self, axis, given, required):
        self.axis = axis
        self.given = given
        self.required = required
        super().__init__(
            f"dual range {given} on axis {axis} below required slope bound "
            f"{required}; enlarge the dual grid"
        )


class CharacterizationMismatchError(SharpminError, RuntimeError):
    """The three sharpness characterizations disagree beyond tolerance."""

    def __init__(self, modulus, slope_infimum, tilt_radius, tol):
        self.modulus = modulus
        self.slope_infimum = slope_infimum
        self.tilt_radius = tilt_radius
        self.tol = tol
        super().__init__(
            f"characterizations disagree beyond {tol}: modulus={modulus}, "
            f"slope_infimum={slope_infimum}, tilt_radius={tilt_radius}"
        )


class PreconditionError(SharpminError, ValueError):
    """A documented operation precondition was violated by the caller."""
