"""Global sharp-minimizer analysis on Euclidean point clouds.

The three characterizations (growth modulus, infimum of global slopes, tilt
radius) coincide exactly on finite clouds; they are computed through
independent code paths so their agreement is a genuine cross-check.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import (
    CharacterizationMismatchError,
    DegenerateCloudError,
    InfeasibleLipschitzError,
    PreconditionError,
)

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class TiltVector:
    """A linear perturbation direction, identified with a Euclidean vector."""

    xi: np.ndarray

    def __post_init__(self):
        xi = np.asarray(self.xi, dtype=np.float64).ravel()
        xi.setflags(write=False)
        object.__setattr__(self, "xi", xi)

    @property
    def norm(self):
        return float(np.sqrt(np.sum(self.xi * self.xi)))


@dataclass(frozen=True)
class LipschitzFunctionSpec:
    """Lower McShane extension zeta(x) = min_i (g_i + L * ||x - a_i||)."""

    anchors: np.ndarray
    anchor_values: np.ndarray
    constant: float

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64).ravel()
        diffs = self.anchors - x
        dists = np.sqrt(np.sum(diffs * diffs, axis=1))
        return float(np.min(self.anchor_values + self.constant * dists))

    def evaluate_many(self, points):
        diffs = points[:, None, :] - self.anchors[None, :, :]
        dists = np.sqrt(np.sum(diffs * diffs, axis=2))
        return np.min(self.anchor_values[None, :] + self.constant * dists, axis=1)


def mcshane_extend(anchors, values, constant):
    """Build the minimal Lipschitz extension of anchor data with constant L.

    Fails if L is below the largest pairwise difference quotient, since no
    L-Lipschitz function can then interpolate the anchors.
    """
    anchors = np.asarray(anchors, dtype=np.float64)
    if anchors.ndim == 1:
        anchors = anchors[:, None]
    values = np.asarray(values, dtype=np.float64).ravel()
    if len(anchors) != len(values):
        raise InfeasibleLipschitzError("anchors and values must have equal length")
    if constant <= 0:
        raise InfeasibleLipschitzError("Lipschitz constant must be positive")
    for i in range(len(anchors)):
        for j in range(i + 1, len(anchors)):
            gap = float(np.linalg.norm(anchors[i] - anchors[j]))
            if gap == 0.0:
                if values[i] != values[j]:
                    raise InfeasibleLipschitzError(
                        f"duplicate anchors {i}, {j} with conflicting values"
                    )
                continue
            ratio = abs(values[i] - values[j]) / gap
            if ratio > constant * (1.0 + 1e-12):
                raise InfeasibleLipschitzError(
                    f"anchor pair ({i}, {j}) needs constant {ratio}, got {constant}"
                )
    return LipschitzFunctionSpec(anchors, values, float(constant))


@dataclass(frozen=True)
class SharpnessReport:
    modulus: float
    slope_infimum: float
    tilt_radius: float
    agreement: bool
    witness: int
    slopes: tuple
    tolerance: float

    def to_dict(self):
        return {
            "modulus": self.modulus,
            "slope_infimum": self.slope_infimum,
            "tilt_radius": self.tilt_radius,
            "agreement": self.agreement,
            "witness": self.witness,
            "slopes": list(self.slopes),
            "tolerance": self.tolerance,
        }


def _finite_non_base(cloud):
    mask = np.isfinite(cloud.values)
    mask[cloud.base_index] = False
    if not mask.any():
        raise DegenerateCloudError("no finite value besides the base point")
    return mask


def sharpness_modulus(cloud):
    """Largest gamma with f(x) >= f(base) + gamma*||x - base|| on the cloud.

    Returns (modulus, witness index); the sign carries the dichotomy (the base
    is a sharp minimizer of the cloud iff the modulus is positive).
    """
    _finite_non_base(cloud)
    ratio, witness = kernels.min_growth_ratio(
        cloud.points, cloud.values, cloud.base_index
    )
    return ratio, witness


def global_slope(cloud, i):
    """sup over y of the positive part of (f(x_i) - f(y)) / ||x_i - y||."""
    if not np.isfinite(cloud.values[i]):
        raise PreconditionError(f"global slope undefined at infinite value {i}")
    slopes = kernels.slope_table(cloud.points, cloud.values)
    return float(slopes[i])


def slope_infimum(cloud):
    """Infimum of global slopes over finite-valued non-base points."""
    mask = _finite_non_base(cloud)
    slopes = kernels.slope_table(cloud.points, cloud.values)
    return float(np.min(slopes[mask]))


def tilt_radius(cloud):
    """Largest r such that every tilt of norm below r keeps the base the
    unique minimizer.

    On a finite Euclidean cloud the sup of <xi, x - base> over ||xi|| < r is
    r*||x - base||, so the radius is the least growth ratio, clamped at 0 when
    the base is not even the unique minimizer. Deliberately a plain-Python
    path, independent from the modulus kernel.
    """
    base = cloud.base_index
    base_point = cloud.points[base]
    base_value = cloud.values[base]
    best = math.inf
    seen = False
    for i in range(len(cloud)):
        if i == base or not math.isfinite(cloud.values[i]):
            continue
        seen = True
        sq = 0.0
        for k in range(cloud.dimension):
            diff = cloud.points[i][k] - base_point[k]
            sq += diff * diff
        ratio = (cloud.values[i] - base_value) / math.sqrt(sq)
        if ratio < best:
            best = ratio
    if not seen:
        raise DegenerateCloudError("no finite value besides the base point")
    return float(max(best, 0.0))


def tilt_probe(cloud, tilt):
    """Exact argmin index set of f - <xi, .> over the cloud (ties reported)."""
    if isinstance(tilt, TiltVector):
        xi = tilt.xi
    else:
        xi = np.asarray(tilt, dtype=np.float64).ravel()
    tilted = cloud.values - cloud.points @ xi
    finite = np.isfinite(tilted)
    if not finite.any():
        raise PreconditionError("all tilted values are infinite")
    best = np.min(tilted[finite])
    return [int(i) for i in np.flatnonzero(finite & (tilted == best))]


def lipschitz_probe(cloud, zeta):
    """Exact argmin index set of f + zeta over the cloud."""
    perturbed = cloud.values + zeta.evaluate_many(cloud.points)
    finite = np.isfinite(perturbed)
    if not finite.any():
        raise PreconditionError("all perturbed values are infinite")
    best = np.min(perturbed[finite])
    return [int(i) for i in np.flatnonzero(finite & (perturbed == best))]


def cone_gap(cloud, gamma):
    """Worst slack of f above the cone f(base) + gamma*||x - base||.

    Nonnegative gap means the cone fits below the function on the cloud.
    """
    if gamma <= 0:
        raise PreconditionError("gamma must be positive")
    mask = _finite_non_base(cloud)
    dist = cloud.distances_to_base()
    gaps = cloud.values - (cloud.values[cloud.base_index] + gamma * dist)
    worst = int(np.flatnonzero(mask)[np.argmin(gaps[mask])])
    return float(gaps[worst]), worst


def verify_characterizations(cloud, tol=DEFAULT_TOL):
    """Run all three characterizations and assert their pairwise agreement.

    Disagreement beyond tol with a positive modulus signals an implementation
    bug (the equivalence is exact on finite clouds) and raises.
    """
    m, witness = sharpness_modulus(cloud)
    s = slope_infimum(cloud)
    r = tilt_radius(cloud)
    slopes = kernels.slope_table(cloud.points, cloud.values)
    agreement = bool(abs(m - s) <= tol and abs(m - r) <= tol)
    if m > 0 and not agreement:
        raise CharacterizationMismatchError(m, s, r, tol)
    return SharpnessReport(
        modulus=m,
        slope_infimum=s,
        tilt_radius=r,
        agreement=agreement,
        witness=witness,
        slopes=tuple(float(x) if math.isfinite(x) else None for x in slopes),
        tolerance=tol,
    )
