"""Gamut volume maximization with black and white fixed.

With K and W pinned, a gamut is determined by the red and blue corners
alone, so the search space is the 6-D space of pairs (R, B).  Gamut
containment is linear there: each of the six movable corners is an
affine function of (R, B), and requiring every corner on the inner side
of every projector facet plane gives exactly 36 inequalities per
projector.  The signed volume

    det(R-K, W-K, B-K)  =  det(R-K, G-K, B-K)

is an indefinite quadratic in (R, B) (bilinear in the two corner
offsets), so its maximum over the feasible polytope lies on the
boundary: triangulate the boundary, and on each simplex either take a
negative-definite restriction's interior critical point or fall back to
the simplex's own vertices, which the triangulation already contains as
0-simplices.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .colors import CornerSet, Gamut, derive_corners, gamut_halfspaces
from .errors import DegenerateOptimum, InfeasibleAnchor
from .polytope import (
    Halfspace,
    Polytope,
    contains_point,
    intersect_halfspaces,
    padded_box,
    pulling_triangulation,
)

# one inequality per (projector facet, movable corner); corner order and
# (K, W, R, B) coefficients of each corner
CORNER_ORDER = ("R", "G", "B", "C", "M", "Y")
CORNER_COEFFS = {
    "R": (0.0, 0.0, 1.0, 0.0),
    "G": (2.0, 1.0, -1.0, -1.0),
    "B": (0.0, 0.0, 0.0, 1.0),
    "C": (1.0, 1.0, -1.0, 0.0),
    "M": (-1.0, 0.0, 1.0, 1.0),
    "Y": (1.0, 1.0, 0.0, -1.0),
}

EIG_TOL = 1e-10      # negative-definiteness cutoff, relative to spectrum
BARY_TOL = 1e-9      # closed-simplex membership slack


@dataclass(frozen=True)
class QuadraticObjective:
    """Signed-volume quadratic about the origin of (R, B) coordinates:
    value(x) = constant + gradient.x + x.hessian.x / 2."""

    hessian: np.ndarray
    gradient: np.ndarray
    constant: float

    def value(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(self.constant + self.gradient @ x
                     + 0.5 * x @ self.hessian @ x)

    def values(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        return (self.constant + X @ self.gradient
                + 0.5 * np.einsum("si,ij,sj->s", X, self.hessian, X))

    def grad(self, x) -> np.ndarray:
        return self.gradient + self.hessian @ np.asarray(x, dtype=float)


@dataclass(frozen=True)
class SimplexCandidate:
    """Interior critical point (or vertex) of the objective restricted
    to one triangulation simplex."""

    vertex_ids: tuple
    point: np.ndarray        # concatenated (R, B)
    value: float


@dataclass(frozen=True)
class VolumeResult:
    gamut: Gamut
    corners: CornerSet
    point: np.ndarray
    volume: float
    diagnostics: dict


def gamma_halfspaces(gamuts, K, W) -> list:
    """The 36n containment inequalities in (R, B) space.

    For projector facet a.x <= h and corner c = cK*K + cW*W + cR*R
    + cB*B, the inequality is (cR*a, cB*a).(R, B) <= h - a.(cK*K
    + cW*W).  A pair satisfies all of them iff every corner of the
    induced gamut lies in every projector gamut (K and W are anchored
    inside by precondition).
    """
    K = np.asarray(K, dtype=float)
    W = np.asarray(W, dtype=float)
    for i, g in enumerate(gamuts):
        for name, x in (("K", K), ("W", W)):
            ok = all(h.normal @ x <= h.offset
                     + 1e-9 * max(1.0, float(np.linalg.norm(x)))
                     for h in gamut_halfspaces(g))
            if not ok:
                raise InfeasibleAnchor(
                    f"{name} is outside projector gamut {i}")
    out = []
    for g in gamuts:
        for h in gamut_halfspaces(g):
            a, off = h.normal, h.offset
            for name in CORNER_ORDER:
                cK, cW, cR, cB = CORNER_COEFFS[name]
                normal6 = np.concatenate([cR * a, cB * a])
                rhs = off - cK * (a @ K) - cW * (a @ W)
                out.append(Halfspace(normal6, rhs))
    return out


def vol_objective(K, W) -> QuadraticObjective:
    """Signed volume det(R-K, W-K, B-K) as a quadratic in (R, B).

    Writing r = R-K, b = B-K and m = W-K, the determinant is the
    bilinear form r.(m x b) = r^T S b with S the cross-product matrix
    of m, hence hessian [[0, S], [S^T, 0]].
    """
    K = np.asarray(K, dtype=float)
    W = np.asarray(W, dtype=float)
    m = W - K
    S = np.array([
        [0.0, -m[2], m[1]],
        [m[2], 0.0, -m[0]],
        [-m[1], m[0], 0.0],
    ])
    H = np.zeros((6, 6))
    H[:3, 3:] = S
    H[3:, :3] = S.T
    grad = np.concatenate([-S @ K, -S.T @ K])
    const = float(K @ S @ K)   # zero for skew S, kept for clarity
    return QuadraticObjective(hessian=H, gradient=grad, constant=const)


def restricted_max(simplex_pts, q: QuadraticObjective):
    """Interior critical point of `q` on one simplex, if it is a
    negative-definite restriction's maximum inside the closed simplex.

    simplex_pts : (k+1, 6) vertex coordinates.  Returns the point
    (6-vector) or None; 0-simplices always return their vertex.
    """
    pts = np.asarray(simplex_pts, dtype=float)
    k = pts.shape[0] - 1
    if k == 0:
        return pts[0].copy()
    x0 = pts[0]
    E = (pts[1:] - x0).T                      # (6, k)
    U, _ = np.linalg.qr(E)
    Hr = U.T @ q.hessian @ U
    w = np.linalg.eigvalsh(Hr)
    scale = float(np.abs(w).max())
    if scale <= 0 or w.max() >= -EIG_TOL * scale:
        return None
    gr = U.T @ q.grad(x0)
    y = np.linalg.solve(Hr, -gr)
    x = x0 + U @ y
    lam = np.linalg.solve(E.T @ E, E.T @ (x - x0))
    if lam.min() < -BARY_TOL or 1.0 - lam.sum() < -BARY_TOL:
        return None
    return x


def _batched_candidates(P6: np.ndarray, simplices, q: QuadraticObjective):
    """restricted_max over all simplices, batched by dimension."""
    cands = []
    by_k = {}
    for s in simplices:
        by_k.setdefault(s.dim, []).append(s.vertex_ids)

    for ids in by_k.get(0, []):
        x = P6[ids[0]]
        cands.append(SimplexCandidate(vertex_ids=ids, point=x.copy(),
                                      value=q.value(x)))
    for k, id_list in sorted(by_k.items()):
        if k == 0:
            continue
        ids = np.array(id_list)               # (N, k+1)
        pts = P6[ids]                         # (N, k+1, 6)
        x0 = pts[:, 0, :]
        E = np.transpose(pts[:, 1:, :] - x0[:, None, :], (0, 2, 1))  # (N,6,k)
        U, _ = np.linalg.qr(E)
        Hr = np.einsum("nik,ij,njl->nkl", U, q.hessian, U)
        w = np.linalg.eigvalsh(Hr)
        scale = np.abs(w).max(axis=1)
        neg_def = (scale > 0) & (w.max(axis=1) < -EIG_TOL * scale)
        if not neg_def.any():
            continue
        sel = np.flatnonzero(neg_def)
        g0 = q.gradient + x0[sel] @ q.hessian.T
        gr = np.einsum("nik,ni->nk", U[sel], g0)
        y = np.linalg.solve(Hr[sel], -gr[:, :, None])[:, :, 0]
        x = x0[sel] + np.einsum("nik,nk->ni", U[sel], y)
        Esel = E[sel]
        gram = np.einsum("nik,nil->nkl", Esel, Esel)
        rhs = np.einsum("nik,ni->nk", Esel, x - x0[sel])
        lam = np.linalg.solve(gram, rhs[:, :, None])[:, :, 0]
        ok = (lam.min(axis=1) >= -BARY_TOL) & \
             (1.0 - lam.sum(axis=1) >= -BARY_TOL)
        vals = q.values(x)
        for j in np.flatnonzero(ok):
            n = sel[j]
            cands.append(SimplexCandidate(
                vertex_ids=tuple(int(i) for i in ids[n]),
                point=x[j].copy(), value=float(vals[j])))
    return cands


def maximize_volume(gamuts, K, W, tol=1e-9) -> VolumeResult:
    """Largest-volume gamut with corners K and W inside all `gamuts`.

    Builds the feasible (R, B) polytope from the 36n inequalities,
    triangulates its boundary, scans every simplex for candidates, and
    returns the best; exact volume ties break lexicographically on the
    (R, B) coordinates.
    """
    K = np.asarray(K, dtype=float)
    W = np.asarray(W, dtype=float)
    hs = gamma_halfspaces(gamuts, K, W)

    corner_stack = np.stack([derive_corners(g).as_array() for g in gamuts])
    lo3 = corner_stack.reshape(-1, 3).min(axis=0)
    hi3 = corner_stack.reshape(-1, 3).max(axis=0)
    lo, hi = padded_box(np.concatenate([lo3, lo3]),
                        np.concatenate([hi3, hi3]))

    poly = intersect_halfspaces(hs, 6, tol=tol, bounding_box=(lo, hi))
    simplices = pulling_triangulation(poly)
    q = vol_objective(K, W)
    cands = _batched_candidates(poly.vertices, simplices, q)

    best = None
    for c in cands:
        if best is None:
            best = c
            continue
        if c.value > best.value + 1e-12 * max(1.0, abs(best.value)):
            best = c
        elif c.value >= best.value - 1e-12 * max(1.0, abs(best.value)):
            if tuple(c.point) < tuple(best.point):
                best = c
    if best is None or best.value <= 1e-12:
        raise DegenerateOptimum(
            "no gamut of positive volume fits the fixed black and white "
            f"points (best signed volume {0.0 if best is None else best.value:.3e})")

    R = best.point[:3]
    B = best.point[3:]
    G = 2.0 * K + W - R - B
    gamut = Gamut(K, R, G, B)
    corners = derive_corners(gamut)
    for i, g in enumerate(gamuts):
        for lbl, x in zip(corners.labels(), corners.as_array()):
            if not _in_gamut(g, x):
                raise DegenerateOptimum(
                    f"optimal corner {lbl} escaped projector gamut {i}; "
                    "numerical trouble")
    diagnostics = {
        "gamma_halfspaces": len(hs),
        "gamma_vertices": poly.n_vertices,
        "gamma_facets": poly.n_facets,
        "simplices": len(simplices),
        "candidates": len(cands),
    }
    return VolumeResult(gamut=gamut, corners=corners, point=best.point,
                        volume=float(best.value), diagnostics=diagnostics)


def _in_gamut(g: Gamut, x, tol=1e-9) -> bool:
    x = np.asarray(x, dtype=float)
    scale = max(1.0, float(np.linalg.norm(x)))
    return all(h.normal @ x <= h.offset + tol * scale
               for h in gamut_halfspaces(g))
