"""Min-max gamut fitting over all twelve corner parameters.

Each corner of the candidate gamut gets a quality score (distance to an
ideal location, or signed distance along an ideal direction); the
solver minimizes the worst score subject to the gamut lying inside
every projector gamut.  All scores are quasiconvex in the parameter
vector (K, R, G, B), so their sublevel sets are nested convex families
and the optimum is found by bisecting the level t: at a fixed level the
feasible set is an intersection of halfspaces (containment, linear
scores) and ball preimages (Euclidean scores), every one of which has a
closed-form Euclidean projection, so feasibility is decided by cyclic
projection sweeps.

The level test errs on the cautious side: a level whose feasible set
has (numerically) empty interior may be reported infeasible, which can
bias the returned level upward by about the sweep tolerance.  That bias
is far below the bisection tolerances used anywhere in this package.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .colors import Gamut, derive_corners, gamut_halfspaces
from .errors import IterationBudgetExceeded, NoFiniteLevel, ValidationError

# corner = sum of coefficient * (K, R, G, B) blocks
PARAM_COEFFS = {
    "K": (1.0, 0.0, 0.0, 0.0),
    "R": (0.0, 1.0, 0.0, 0.0),
    "G": (0.0, 0.0, 1.0, 0.0),
    "B": (0.0, 0.0, 0.0, 1.0),
    "W": (-2.0, 1.0, 1.0, 1.0),
    "C": (-1.0, 0.0, 1.0, 1.0),
    "M": (-1.0, 1.0, 0.0, 1.0),
    "Y": (-1.0, 1.0, 1.0, 0.0),
}
CORNER_NAMES = ("K", "R", "G", "B", "C", "M", "Y", "W")

SWEEP_BUDGET = 10_000
STALL_TOL = 1e-12          # net per-sweep displacement, relative
CONTAIN_TOL = 1e-10        # containment success slack, relative
LEVEL_CAP = 1e12


@dataclass(frozen=True)
class CornerQualitySpec:
    """Quality score for one corner.

    kind 'euclidean': weight * ||x - target||; kind 'linear':
    weight * direction . (x - target).  Lower is better.
    """

    corner: str
    kind: str
    target: np.ndarray
    weight: float = 1.0
    direction: np.ndarray | None = None

    def __post_init__(self):
        if self.corner not in PARAM_COEFFS:
            raise ValidationError(f"unknown corner {self.corner!r}")
        if self.kind not in ("euclidean", "linear"):
            raise ValidationError(f"unknown quality kind {self.kind!r}")
        if not self.weight > 0:
            raise ValidationError("quality weight must be positive")
        object.__setattr__(self, "target",
                           np.asarray(self.target, dtype=float))
        if self.kind == "linear":
            if self.direction is None:
                raise ValidationError("linear quality needs a direction")
            d = np.asarray(self.direction, dtype=float)
            if np.linalg.norm(d) <= 1e-12:
                raise ValidationError("linear quality direction is zero")
            object.__setattr__(self, "direction", d)


@dataclass(frozen=True)
class QcpSolution:
    gamut: Gamut
    t_star: float
    iterations: int
    bracket: tuple

    @property
    def corners(self):
        return derive_corners(self.gamut)


def corner_quality(spec: CornerQualitySpec, x) -> float:
    """Evaluate one quality score at a color."""
    x = np.asarray(x, dtype=float)
    if spec.kind == "euclidean":
        return float(spec.weight * np.linalg.norm(x - spec.target))
    return float(spec.weight * (spec.direction @ (x - spec.target)))


def _corner_matrix_row(corner: str) -> np.ndarray:
    """Coefficients of the 4 parameter blocks for one corner."""
    return np.asarray(PARAM_COEFFS[corner], dtype=float)


def _corner_of(params: np.ndarray, corner: str) -> np.ndarray:
    blocks = params.reshape(4, 3)
    return _corner_matrix_row(corner) @ blocks


def _containment_rows(gamuts):
    """Halfspaces alpha . params <= beta covering every (facet, corner)
    pair; alpha is coeff-scaled copies of the facet normal."""
    rows = []
    rhs = []
    for g in gamuts:
        for h in gamut_halfspaces(g):
            a = h.normal
            for corner in CORNER_NAMES:
                co = _corner_matrix_row(corner)
                rows.append(np.concatenate([c * a for c in co]))
                rhs.append(h.offset)
    A = np.array(rows)
    b = np.array(rhs)
    norm2 = np.einsum("ij,ij->i", A, A)
    return A, b, norm2


def max_quality(specs, params: np.ndarray) -> float:
    return max(corner_quality(s, _corner_of(params, s.corner))
               for s in specs)


def _start_params(gamuts) -> np.ndarray:
    """Near-collapsed gamut at the average of all corner data; the tiny
    right-handed offsets keep the result constructible as a Gamut even
    when the scores leave some primaries unconstrained."""
    stack = np.stack([derive_corners(g).as_array() for g in gamuts])
    center = stack.reshape(-1, 3).mean(axis=0)
    spread = float(stack.reshape(-1, 3).std(axis=0).max())
    delta = max(1e-3 * spread, 1e-9)
    K = center - 0.5 * delta
    return np.concatenate([
        K,
        K + np.array([delta, 0.0, 0.0]),
        K + np.array([0.0, delta, 0.0]),
        K + np.array([0.0, 0.0, delta]),
    ])


def feasible_at_level(gamuts, specs, t: float, tol: float = 1e-9,
                      start: np.ndarray | None = None,
                      budget: int = SWEEP_BUDGET):
    """Search for parameters with every corner inside every gamut and
    every quality score at most t + tol.

    Cyclic projections in fixed order: containment halfspaces, then
    score constraints at level t.  Returns the parameter vector, or
    None once the sweep displacement stalls while some constraint is
    still separated (certified infeasible at this level).  A budget
    exhausted while the iterate is still moving raises
    ``IterationBudgetExceeded``.
    """
    if not specs:
        raise ValidationError("need at least one quality score")
    A, b, norm2 = _containment_rows(gamuts)
    p = _start_params(gamuts).copy() if start is None else start.copy()
    scale = max(1.0, float(np.abs(p).max()),
                float(max(np.abs(s.target).max() for s in specs)))

    spec_rows = []
    for s in specs:
        co = _corner_matrix_row(s.corner)
        if s.kind == "linear":
            alpha = np.concatenate([c * s.direction for c in co])
            beta = t / s.weight + s.direction @ s.target
            spec_rows.append(("h", alpha, float(alpha @ alpha), beta))
        else:
            gamma = float(co @ co)   # M M^T = gamma I for block maps
            spec_rows.append(("b", co, gamma, s))

    def violation(pp):
        v = float((A @ pp - b).max()) if A.size else 0.0
        q = max_quality(specs, pp) - t
        return v, q

    for sweep in range(1, budget + 1):
        p_prev = p.copy()
        # containment halfspaces
        resid = A @ p - b
        for i in np.flatnonzero(resid > 0):
            r = float(A[i] @ p - b[i])
            if r > 0:
                p -= (r / norm2[i]) * A[i]
        # score constraints at level t
        for kind, payload, aux, extra in spec_rows:
            if kind == "h":
                r = float(payload @ p - extra)
                if r > 0:
                    p -= (r / aux) * payload
            else:
                s = extra
                x = _corner_of(p, s.corner)
                v = x - s.target
                d = float(np.linalg.norm(v))
                r = t / s.weight
                if d > r:
                    pull = v * ((d - r) / max(d, 1e-300))
                    p -= np.concatenate([c * pull for c in payload]) / aux
        cviol, qviol = violation(p)
        if cviol <= CONTAIN_TOL * scale and qviol <= tol:
            return p
        if np.abs(p - p_prev).max() <= STALL_TOL * scale:
            return None
    raise IterationBudgetExceeded(
        f"still moving after {budget} sweeps at level {t:.6g}")


def default_specs(gamuts) -> list:
    """Euclidean targets at the per-corner averages of the projector
    corners, with double weight on black and white."""
    stack = np.stack([derive_corners(g).as_array() for g in gamuts])
    mean = stack.mean(axis=0)
    specs = []
    for i, name in enumerate(("K", "R", "G", "B", "C", "M", "Y", "W")):
        w = 2.0 if name in ("K", "W") else 1.0
        specs.append(CornerQualitySpec(corner=name, kind="euclidean",
                                       target=mean[i], weight=w))
    return specs


def solve_qcp(gamuts, specs, tol: float = 1e-7) -> QcpSolution:
    """Minimize the worst corner quality subject to containment.

    Doubles the level until feasible, bisects the bracket to width
    `tol`, and returns the witness of the last feasible level.  When
    the lower bound 0 was never refuted, a final pass at level 0 tries
    to tighten the witness (zero-residual instances then come back
    exact).
    """
    if not specs:
        raise ValidationError("need at least one quality score")
    specs = list(specs)
    start = _start_params(gamuts)
    probes = 0

    def probe(level):
        nonlocal probes
        probes += 1
        try:
            return feasible_at_level(gamuts, specs, level,
                                     tol=min(tol, 1e-9), start=start)
        except IterationBudgetExceeded:
            # still-moving levels behave like infeasible ones for the
            # bracket; the bias is upward and below tol
            return None

    scale = max(1.0, float(max(
        np.abs(derive_corners(g).as_array()).max() for g in gamuts)))
    t_seed = max(max_quality(specs, start), tol)
    t_high = t_seed
    witness = probe(t_high)
    while witness is None:
        t_high *= 2.0
        if t_high > LEVEL_CAP * scale:
            raise NoFiniteLevel(
                f"no feasible quality level below {LEVEL_CAP * scale:.3e}")
        witness = probe(t_high)

    t_low = 0.0
    low_refuted = False
    while t_high - t_low > tol:
        mid = 0.5 * (t_low + t_high)
        pt = probe(mid)
        if pt is None:
            t_low = mid
            low_refuted = True
        else:
            t_high = mid
            witness = pt

    if not low_refuted:
        pt = probe(0.0)
        if pt is not None:
            witness = pt

    blocks = witness.reshape(4, 3)
    gamut = Gamut(blocks[0], blocks[1], blocks[2], blocks[3])
    return QcpSolution(gamut=gamut, t_star=float(t_high),
                       iterations=probes, bracket=(float(t_low),
                                                   float(t_high)))
