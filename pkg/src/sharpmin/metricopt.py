"""Sharp local minimality on finite metric spaces and metric trees.

The limsup in the local metric slope is 0 at isolated points, so every
finite-space slope would vanish; the h-slope (sup restricted to a punctured
ball of radius h) is the desk-scale surrogate, with conclusions stated as
h -> 0 refinement studies on continuum trees.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError, PreconditionError
from .metricspaces import (
    DistanceCombination,
    FiniteMetricSpace,
    MetricTree,
    TreeLocation,
    node_loc,
)


@dataclass(frozen=True)
class LocalSharpnessParams:
    delta: float
    gamma: float

    def __post_init__(self):
        if not self.delta > 0:
            raise InputError("delta must be positive (possibly inf)")
        if not self.gamma > 0:
            raise InputError("gamma must be positive")


class FiniteSpaceFunctional:
    """A value vector over a finite metric space with a reference minimizer."""

    def __init__(self, space, values, base_index):
        if not isinstance(space, FiniteMetricSpace):
            raise InputError("expected a FiniteMetricSpace")
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (len(space),):
            raise InputError("value vector length must match the space")
        if np.isnan(values).any() or np.isneginf(values).any():
            raise InputError("values must be real or +inf")
        if not np.isfinite(values[base_index]):
            raise InputError("value at the reference point must be finite")
        values.setflags(write=False)
        self.space = space
        self.values = values
        self.base_index = int(base_index)

    def __call__(self, i):
        return float(self.values[i])

    def distance(self, i, j):
        return self.space.distance(i, j)


class TreeFunctional:
    """A functional on the continuum tree, evaluable at any location.

    Closed-form distance combinations are the canonical case (exact values
    anywhere, geodesically convex by construction); a general callable on
    locations is accepted for fixtures such as squared distances.
    """

    def __init__(self, tree, fn, base_location):
        if not isinstance(tree, MetricTree):
            raise InputError("expected a MetricTree")
        self.tree = tree
        self.combination = fn if isinstance(fn, DistanceCombination) else None
        self._fn = fn
        self.base_location = tree.canonicalize(base_location)

    @classmethod
    def from_combination(cls, tree, terms, base_location):
        return cls(tree, DistanceCombination(tuple(terms)), base_location)

    def __call__(self, loc):
        if self.combination is not None:
            return self.combination(self.tree, loc)
        return float(self._fn(self.tree, loc))

    def distance(self, u, v):
        return self.tree.distance(u, v)

    def sample_locations(self, per_edge=4):
        """Nodes plus evenly spaced interior points of every edge."""
        locs = [node_loc(i) for i in range(len(self.tree.nodes))]
        for e, (_a, _b, length) in enumerate(self.tree.edges):
            for k in range(1, per_edge + 1):
                locs.append(
                    self.tree.canonicalize(
                        TreeLocation(edge=e, offset=length * k / (per_edge + 1))
                    )
                )
        return locs


# ---------------------------------------------------------------------------
# Ekeland construction


@dataclass(frozen=True)
class EkelandResult:
    x_hat: int
    x_start: int
    eps: float
    lam: float
    eta: float
    trace: tuple


def ekeland(functional, x_start, eps, lam):
    """Constructive Ekeland iteration on a finite metric space.

    From an eps-approximate minimizer, descends to a point x_hat with
    J(x_hat) <= J(x_start), d(x_start, x_hat) <= lam, and x_hat the unique
    minimizer of v -> J(v) + (eps/lam) d(v, x_hat). Termination is guaranteed
    by strict descent on a finite space.
    """
    if eps <= 0 or lam <= 0:
        raise PreconditionError("eps and lam must be positive")
    J = functional.values
    finite = np.isfinite(J)
    inf_J = float(np.min(J[finite]))
    if not np.isfinite(J[x_start]) or J[x_start] > inf_J + eps:
        raise PreconditionError(
            f"start value {J[x_start]} exceeds inf J + eps = {inf_J + eps}"
        )
    eta = eps / lam
    D = functional.space.matrix
    current = int(x_start)
    trace = [current]
    while True:
        # S(current): points reachable with descent at least eta per distance.
        admissible = finite & (J <= J[current] - eta * D[current])
        admissible[current] = True
        candidates = np.flatnonzero(admissible)
        nxt = int(candidates[np.argmin(J[candidates])])
        if nxt == current:
            break
        current = nxt
        trace.append(current)
    return EkelandResult(
        x_hat=current,
        x_start=int(x_start),
        eps=float(eps),
        lam=float(lam),
        eta=float(eta),
        trace=tuple(trace),
    )


def check_ekeland_result(functional, result):
    """Brute-force verification of the three Ekeland postconditions."""
    J = functional.values
    D = functional.space.matrix
    x, x0, eta = result.x_hat, result.x_start, result.eta
    descent_ok = J[x] <= J[x0]
    distance_ok = D[x0, x] <= result.lam
    perturbed = J + eta * D[:, x]
    unique_ok = all(
        perturbed[v] > perturbed[x] for v in range(len(J)) if v != x
    )
    return bool(descent_ok), bool(distance_ok), bool(unique_ok)


# ---------------------------------------------------------------------------
# Slopes and local sharpness


def local_slope_h(functional, u, h, t_samples=16):
    """Radius-h restricted slope sup of max{J(u) - J(v), 0} / d(u, v).

    Finite spaces take the sup over points within distance h; tree functionals
    sample along the geodesics from u toward every node and every anchor,
    including the exact radius-h point of each direction. Returns 0 when the
    punctured ball is empty (the isolated-point convention).
    """
    if h <= 0:
        raise PreconditionError("h must be positive")
    if isinstance(functional, FiniteSpaceFunctional):
        Ju = functional(u)
        if not math.isfinite(Ju):
            raise PreconditionError("slope undefined at an infinite value")
        best = 0.0
        for v in range(len(functional.space)):
            d = functional.distance(u, v)
            if v == u or d > h:
                continue
            gain = Ju - functional(v)
            if gain > 0:
                best = max(best, gain / d)
        return best
    tree = functional.tree
    u = tree.canonicalize(u)
    Ju = functional(u)
    if not math.isfinite(Ju):
        raise PreconditionError("slope undefined at an infinite value")
    targets = [node_loc(i) for i in range(len(tree.nodes))]
    targets.append(functional.base_location)
    if functional.combination is not None:
        targets.extend(a for _c, a in functional.combination.terms)
    best = 0.0
    for w in targets:
        reach = tree.distance(u, w)
        if reach == 0.0:
            continue
        cap = min(h, reach)
        for k in range(1, t_samples + 1):
            t = cap * k / t_samples
            v = tree.geodesic(u, w, t / reach)
            d = tree.distance(u, v)
            if d == 0.0 or d > h * (1 + 1e-12):
                continue
            gain = Ju - functional(v)
            if gain > 0:
                best = max(best, gain / d)
    return best


def local_sharpness(functional, delta, samples=None):
    """Largest gamma with J >= J(base) + gamma*d(., base) on the sampled ball.

    The ball B(base, delta) is closed (stable under ties at radius delta).
    """
    if isinstance(functional, FiniteSpaceFunctional):
        base = functional.base_index
        Jbase = functional(base)
        ratios = []
        for v in range(len(functional.space)):
            if v == base:
                continue
            d = functional.distance(base, v)
            if d <= delta and math.isfinite(functional(v)):
                ratios.append((functional(v) - Jbase) / d)
        if not ratios:
            raise PreconditionError("no sample points in the punctured ball")
        return min(ratios)
    tree = functional.tree
    base = functional.base_location
    Jbase = functional(base)
    if samples is None:
        samples = functional.sample_locations()
    ratios = []
    for loc in samples:
        loc = tree.canonicalize(loc)
        d = tree.distance(base, loc)
        if d == 0.0 or d > delta:
            continue
        ratios.append((functional(loc) - Jbase) / d)
    if not ratios:
        raise PreconditionError("no sample points in the punctured ball")
    return min(ratios)


def lipschitz_constant(space, values):
    """Exact pairwise Lipschitz constant of a value vector over the space."""
    values = np.asarray(values, dtype=np.float64)
    best = 0.0
    for i in range(len(space)):
        for j in range(i + 1, len(space)):
            best = max(best, abs(values[i] - values[j]) / space.distance(i, j))
    return best


def lipschitz_invariance_probe(functional, zeta_values, constant, delta):
    """Argmin of J + zeta over the space, intersected with the closed ball.

    The claimed Lipschitz constant of zeta is verified pairwise first. When J
    is sharp-local with parameters (delta, gamma) and the constant is below
    gamma, the result is contained in {base}.
    """
    if not isinstance(functional, FiniteSpaceFunctional):
        raise InputError("lipschitz_invariance_probe operates on finite-space functionals")
    zeta = np.asarray(zeta_values, dtype=np.float64)
    actual = lipschitz_constant(functional.space, zeta)
    if actual > constant * (1 + 1e-12):
        raise PreconditionError(
            f"zeta has Lipschitz constant {actual}, above claimed {constant}"
        )
    perturbed = functional.values + zeta
    finite = np.isfinite(perturbed)
    best = np.min(perturbed[finite])
    argmin = np.flatnonzero(finite & (perturbed == best))
    D = functional.space.matrix
    return [int(v) for v in argmin if D[functional.base_index, v] <= delta]


def convex_perturbation_probe(functional, phi, delta, gamma, samples=None):
    """Geodesically convex perturbation probe on a tree functional.

    Establishes |grad phi|(base) < gamma via shrinking h-slopes, then reports
    the argmin of J + phi over the sampled locations inside the closed ball.
    """
    if not isinstance(functional, TreeFunctional):
        raise InputError("convex_perturbation_probe operates on tree functionals")
    tree = functional.tree
    base = functional.base_location
    phi_functional = TreeFunctional(tree, phi, base)
    slope = min(
        local_slope_h(phi_functional, base, h) for h in (1.0, 0.5, 0.25, 0.125)
    )
    if not slope < gamma:
        raise PreconditionError(
            f"slope of the perturbation at the base is {slope}, not below {gamma}"
        )
    if samples is None:
        samples = functional.sample_locations()
    samples = [tree.canonicalize(s) for s in samples]
    totals = [functional(s) + phi_functional(s) for s in samples]
    best = min(totals)
    return [
        s
        for s, t in zip(samples, totals)
        if t == best and tree.distance(base, s) <= delta
    ]


# ---------------------------------------------------------------------------
# Geodesic convexity and curvature checks


def geodesic_convexity_check(tree, phi, pairs, s_grid, tol=1e-9):
    """Check J(sigma(s)) <= (1-s) J(u) + s J(v) along tree geodesics.

    phi is a DistanceCombination or any callable (tree, location) -> value.
    Returns (ok, worst violation, witness or None).
    """
    if isinstance(phi, DistanceCombination):
        evaluate = lambda loc: phi(tree, loc)
    else:
        evaluate = lambda loc: float(phi(tree, loc))
    worst = -math.inf
    witness = None
    for u, v in pairs:
        u = tree.canonicalize(u)
        v = tree.canonicalize(v)
        fu = evaluate(u)
        fv = evaluate(v)
        for s in s_grid:
            mid = tree.geodesic(u, v, s)
            violation = evaluate(mid) - ((1 - s) * fu + s * fv)
            if violation > worst:
                worst = violation
                witness = (u, v, float(s))
    return worst <= tol, worst, witness


def midpoint_geodesic_oracle(space):
    """Approximate geodesic points on a finite metric space.

    Returns the existing point minimizing the deviation from the two endpoint
    distance identities, ties broken by smallest index. Only exact on spaces
    that contain their geodesic points; callers should treat results as
    approximate.
    """

    def oracle(v, w, t):
        d = space.distance(v, w)
        best = None
        for x in range(len(space)):
            dev = abs(space.distance(x, v) - t * d) + abs(
                space.distance(x, w) - (1 - t) * d
            )
            if best is None or dev < best[0] - 1e-15:
                best = (dev, x)
        return best[1]

    return oracle


def cat0_check(space, quadruples, s_grid, geodesic_oracle=None, tol=1e-9):
    """Test the nonpositive-curvature comparison inequality on samples.

    For each (u, v, w) and s the squared distance from u to the v-w geodesic
    point must not exceed the Euclidean comparison value. Trees use exact
    geodesics; finite spaces need a geodesic oracle (approximate, flagged by
    the `exact_geodesics` field of the result).
    """
    if isinstance(space, MetricTree):
        dist = space.distance
        point_on = lambda v, w, s: space.geodesic(v, w, s)
        exact = True
    else:
        if geodesic_oracle is None:
            geodesic_oracle = midpoint_geodesic_oracle(space)
        dist = space.distance
        point_on = geodesic_oracle
        exact = False
    worst = -math.inf
    witness = None
    for u, v, w in quadruples:
        dvu = dist(v, u)
        dwu = dist(w, u)
        dvw = dist(v, w)
        for s in s_grid:
            sigma = point_on(v, w, s)
            lhs = dist(sigma, u) ** 2
            rhs = (1 - s) * dvu**2 + s * dwu**2 - s * (1 - s) * dvw**2
            violation = lhs - rhs
            if violation > worst:
                worst = violation
                witness = (u, v, w, float(s))
    return {
        "ok": worst <= tol,
        "worst_violation": worst,
        "witness": witness,
        "exact_geodesics": exact,
    }


def slope_sharpness_check(functional, delta, gamma, h_sequence, samples=None, pairs=None,
                s_grid=None, convexity_tol=1e-9):
    """Desk-scale equivalence of slope lower bounds and sharp local minimality.

    Requires the functional to pass the geodesic-convexity check on samples
    first, then records, for each h, the smallest h-slope over the sampled
    punctured ball next to the local sharpness modulus.
    """
    if not isinstance(functional, TreeFunctional):
        raise InputError("slope_sharpness_check operates on tree functionals")
    tree = functional.tree
    base = functional.base_location
    if samples is None:
        samples = functional.sample_locations()
    samples = [tree.canonicalize(s) for s in samples]
    if pairs is None:
        pairs = [(a, b) for i, a in enumerate(samples[:8]) for b in samples[i + 1 : 8]]
    if s_grid is None:
        s_grid = np.linspace(0.0, 1.0, 9)
    phi = functional.combination if functional.combination is not None else functional._fn
    convex_ok, worst, _ = geodesic_convexity_check(
        tree, phi, pairs, s_grid, tol=convexity_tol
    )
    if not convex_ok:
        raise PreconditionError(
            f"functional fails the geodesic-convexity check (violation {worst})"
        )
    ball = [
        s for s in samples if 0.0 < tree.distance(base, s) <= delta
    ]
    if not ball:
        raise PreconditionError("no sample points in the punctured ball")
    gamma_star = local_sharpness(functional, delta, samples=samples)
    per_h = []
    for h in h_sequence:
        min_slope = min(local_slope_h(functional, u, h) for u in ball)
        per_h.append({"h": float(h), "min_slope": float(min_slope)})
    return {
        "delta": float(delta),
        "gamma": float(gamma),
        "ball_convention": "closed",
        "local_sharpness": float(gamma_star),
        "sharp_with_gamma": bool(gamma_star >= gamma),
        "per_h": per_h,
        "slopes_meet_gamma": [
            bool(entry["min_slope"] >= gamma - 1e-9) for entry in per_h
        ],
    }
