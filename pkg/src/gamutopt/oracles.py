"""Brute-force baselines the optimizers must dominate.

The sampling generator is fixed and portable so every recorded oracle
value is reproducible bit for bit: output k of a stream with seed s is

    mix64(s + (k + 1) * 0x9E3779B97F4A7C15)

where mix64 is the xor-shift/multiply finalizer
(z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27;
z *= 0x94D049BB133111EB; z ^= z >> 31), and uniform doubles take the
top 53 bits.  "Uniform in a box" means coordinate j of sample i uses
output i * d + j, scaled independently per coordinate.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .colors import Gamut, derive_corners, gamut_halfspaces
from .errors import TooManySubsets
from .polytope import Polytope, _as_constraint_arrays, ray_extents

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


@dataclass(frozen=True)
class OracleReport:
    """Best value found by a brute-force search, with its witness."""

    best_value: float
    best_witness: np.ndarray
    samples_or_cells: int
    seed: int | None = None


def uniform_stream(seed: int, count: int) -> np.ndarray:
    """`count` doubles in [0, 1) from the documented counter generator."""
    if count == 0:
        return np.zeros(0)
    k = np.arange(1, count + 1, dtype=np.uint64)
    z = np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + k * _GOLDEN
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)).astype(np.float64) * (2.0 ** -53)


def chroma_grid(resolution: int) -> np.ndarray:
    """resolution^2 chromaticities strictly inside the unit-sum simplex.

    The simplex splits into resolution^2 small triangles; the grid is
    their centroids, so no point touches a cell or simplex boundary.
    """
    res = int(resolution)
    if res < 1:
        raise ValueError("resolution must be positive")
    pts = []
    for i in range(res):
        for j in range(res - i):
            pts.append(((3 * i + 1) / (3 * res), (3 * j + 1) / (3 * res)))
            if i + j <= res - 2:
                pts.append(((3 * i + 2) / (3 * res),
                            (3 * j + 2) / (3 * res)))
    return np.array(pts)


def grid_bw_oracle(p: Polytope, resolution: int) -> OracleReport:
    """Best luminosity ratio over a chromaticity grid.

    Evaluates the ray entry/exit parameters on every grid cell and
    keeps the best exit/entry ratio; rays that miss `p` are skipped.
    With zero feasible cells the report carries best_value -inf.
    """
    grid = chroma_grid(resolution)
    dirs = np.column_stack([grid[:, 0], grid[:, 1],
                            1.0 - grid[:, 0] - grid[:, 1]])
    lo, hi, hits = ray_extents(p, dirs)
    n_hit = int(hits.sum())
    if n_hit == 0:
        return OracleReport(best_value=-math.inf,
                            best_witness=np.array([math.nan, math.nan]),
                            samples_or_cells=0)
    ratio = np.where(hits, hi / lo, -math.inf)
    k = int(np.argmax(ratio))
    return OracleReport(best_value=float(ratio[k]),
                        best_witness=grid[k].copy(),
                        samples_or_cells=n_hit)


def _corner_coeff_table() -> np.ndarray:
    """Coefficients of (K, W, R, B) for the six movable corners, in the
    fixed order R, G, B, C, M, Y."""
    return np.array([
        [0.0, 0.0, 1.0, 0.0],   # R
        [2.0, 1.0, -1.0, -1.0],  # G = 2K + W - R - B
        [0.0, 0.0, 0.0, 1.0],   # B
        [1.0, 1.0, -1.0, 0.0],   # C = K + W - R
        [-1.0, 0.0, 1.0, 1.0],   # M = R + B - K
        [1.0, 1.0, 0.0, -1.0],   # Y = K + W - B
    ])


def sample_volume_oracle(gamuts, K, W, samples: int,
                         seed: int) -> OracleReport:
    """Best signed gamut volume among random feasible (R, B) pairs.

    Pairs are drawn uniformly from the axis-aligned box of the gamut
    corner ranges (a superset of the gamut intersection), squared; a
    pair is kept iff every derived corner lies in every gamut.  The
    always-feasible collapsed pair (K, K), value 0, is included, so the
    report never comes back empty.
    """
    K = np.asarray(K, dtype=float)
    W = np.asarray(W, dtype=float)
    corner_stack = np.stack([derive_corners(g).as_array() for g in gamuts])
    lo = corner_stack.reshape(-1, 3).min(axis=0)
    hi = corner_stack.reshape(-1, 3).max(axis=0)

    n = int(samples)
    u = uniform_stream(seed, n * 6).reshape(n, 6)
    R = lo + u[:, :3] * (hi - lo)
    B = lo + u[:, 3:] * (hi - lo)
    R = np.vstack([K[None, :], R])   # collapsed pair first
    B = np.vstack([K[None, :], B])

    coeff = _corner_coeff_table()
    base = coeff[:, 0][:, None] * K + coeff[:, 1][:, None] * W   # (6, 3)
    # corners[s, c, :] for sample s, movable corner c
    corners = (base[None, :, :]
               + coeff[:, 2][None, :, None] * R[:, None, :]
               + coeff[:, 3][None, :, None] * B[:, None, :])
    feasible = np.ones(R.shape[0], dtype=bool)
    for g in gamuts:
        A, b = _as_constraint_arrays(gamut_halfspaces(g), 3)
        resid = corners @ A.T - b                   # (S, 6, 6)
        eps = 1e-9 * np.maximum(1.0, np.abs(corners).max(axis=2))
        feasible &= np.all(resid <= eps[:, :, None], axis=(1, 2))

    # det with rows R-K, W-K, B-K equals (R-K) . ((W-K) x (B-K))
    m = np.broadcast_to(W - K, B.shape)
    vol = np.einsum("si,si->s", R - K, np.cross(m, B - K, axis=-1))
    vol = np.where(feasible, vol, -math.inf)
    k = int(np.argmax(vol))
    witness = np.concatenate([R[k], B[k]])
    return OracleReport(best_value=float(vol[k]), best_witness=witness,
                        samples_or_cells=int(feasible.sum()),
                        seed=int(seed))


def subset_vertex_oracle(halfspaces, dim: int) -> np.ndarray:
    """Vertices of a halfspace intersection by exhaustive subset solve.

    Solves every dim-subset of constraint planes, keeps feasible
    solutions, and deduplicates.  Guards against more than 10^6
    subsets.  Independent of the incremental construction it checks.
    """
    A, b = _as_constraint_arrays(halfspaces, dim)
    m = A.shape[0]
    n_subsets = math.comb(m, dim)
    if n_subsets > 10 ** 6:
        raise TooManySubsets(f"C({m},{dim}) = {n_subsets} exceeds guard")
    subsets = np.array(list(itertools.combinations(range(m), dim)))
    mats = A[subsets]                       # (N, dim, dim)
    rhs = b[subsets]
    dets = np.linalg.det(mats)
    ok = np.abs(dets) > 1e-10
    sols = np.full((subsets.shape[0], dim), np.nan)
    if ok.any():
        sols[ok] = np.linalg.solve(mats[ok], rhs[ok][:, :, None])[:, :, 0]
    pts = sols[ok]
    if pts.size == 0:
        return np.zeros((0, dim))
    eps = 1e-9 * np.maximum(1.0, np.abs(pts).max(axis=1))
    feas = np.all(pts @ A.T - b <= eps[:, None], axis=1)
    pts = pts[feas]
    if pts.shape[0] == 0:
        return np.zeros((0, dim))
    span = max(1.0, float(np.abs(pts).max()))
    keep = []
    for i in range(pts.shape[0]):
        if all(np.abs(pts[i] - pts[j]).max() > 1e-8 * span for j in keep):
            keep.append(i)
    out = pts[keep]
    return out[np.lexsort(out.T[::-1])]
