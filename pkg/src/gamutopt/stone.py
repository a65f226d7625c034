"""Automated five-step baseline for picking a standard gamut.

The classic hand procedure: intersect the projector chromaticity
triangles and inscribe a large triangle; average the projector black
chromaticities; take the darkest and brightest intersection points on
that ray as black and white; lift the triangle to primaries matching
the white offset; and shrink uniformly until everything fits.

Two choices the procedure leaves open are fixed here: the inscribed
triangle is the exact maximum-area triangle over polygon vertex triples
(the maximum inscribed triangle in a convex polygon uses only polygon
vertices), and triangle vertices are labeled R/G/B by the
counterclockwise rotation closest to the averaged projector primary
chromaticities, which keeps the result right-handed.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .colors import Chroma, Gamut, chromaticity, derive_corners, \
    gamut_halfspaces
from .errors import (
    EmptyChromaIntersection,
    NegativeScale,
    NoPositiveScale,
    SingularChromaBasis,
    TooFewVertices,
)
from .polytope import Polytope, intersect_halfspaces, ray_extent


@dataclass(frozen=True)
class ChromaPolygon:
    """Convex polygon on the chromaticity plane, counterclockwise."""

    vertices: np.ndarray     # (m, 2)

    def __len__(self):
        return self.vertices.shape[0]


@dataclass(frozen=True)
class StoneTrace:
    chroma_triangle: tuple          # 3 Chroma, labeled (R, G, B)
    black_chroma: Chroma
    K: np.ndarray
    W: np.ndarray
    primary_scales: np.ndarray      # (3,)
    alpha: float
    gamut: Gamut


def _signed_area(poly: np.ndarray) -> float:
    x = poly[:, 0]
    y = poly[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def _clip_halfplane(poly, a, b, tol=1e-12):
    """Sutherland-Hodgman step: keep {x : a.x <= b}."""
    out = []
    m = len(poly)
    vals = poly @ a - b
    for i in range(m):
        j = (i + 1) % m
        vi, vj = vals[i], vals[j]
        if vi <= tol:
            out.append(poly[i])
            if vj > tol and vi < -tol:
                t = vi / (vi - vj)
                out.append(poly[i] + t * (poly[j] - poly[i]))
        elif vj < -tol:
            t = vi / (vi - vj)
            out.append(poly[i] + t * (poly[j] - poly[i]))
    return np.array(out) if out else np.zeros((0, 2))


def _dedup_ring(poly, tol):
    keep = []
    m = len(poly)
    for i in range(m):
        if not keep or np.abs(poly[i] - poly[keep[-1]]).max() > tol:
            keep.append(i)
    if len(keep) > 1 and np.abs(poly[keep[0]] - poly[keep[-1]]).max() <= tol:
        keep.pop()
    return poly[keep]


def gamut_chroma_triangle(g: Gamut) -> np.ndarray:
    """Chromaticities of the primary offsets R-K, G-K, B-K, CCW."""
    tri = np.array([tuple(chromaticity(v - g.K))
                    for v in (g.R, g.G, g.B)])
    if _signed_area(tri) < 0:
        tri = tri[::-1]
    return tri


def chroma_intersection(gamuts) -> ChromaPolygon:
    """Common chromaticity polygon of all projector triangles."""
    poly = gamut_chroma_triangle(gamuts[0])
    for g in gamuts[1:]:
        tri = gamut_chroma_triangle(g)
        m = len(tri)
        for i in range(m):
            p, q = tri[i], tri[(i + 1) % m]
            e = q - p
            a = np.array([e[1], -e[0]])     # outward for CCW rings
            poly = _clip_halfplane(poly, a, float(a @ p))
            if len(poly) == 0:
                raise EmptyChromaIntersection(
                    "projector chromaticity triangles have no common area")
    poly = _dedup_ring(poly, 1e-10)
    if len(poly) < 3 or abs(_signed_area(poly)) < 1e-16:
        raise EmptyChromaIntersection(
            "chromaticity intersection is (numerically) empty")
    if _signed_area(poly) < 0:
        poly = poly[::-1]
    return ChromaPolygon(vertices=poly)


def largest_triangle(poly: ChromaPolygon):
    """Maximum-area triangle over all vertex triples; first triple in
    index order wins area ties."""
    V = poly.vertices
    if len(V) < 3:
        raise TooFewVertices("polygon has fewer than three vertices")
    best = None
    best_area = -1.0
    for (i, j, k) in itertools.combinations(range(len(V)), 3):
        area = abs(_signed_area(V[[i, j, k]]))
        if area > best_area:
            best_area = area
            best = (i, j, k)
    tri = V[list(best)]
    if _signed_area(tri) < 0:
        tri = tri[[0, 2, 1]]
    return tuple(Chroma(float(u), float(v)) for u, v in tri)


def _label_primaries(triangle, gamuts):
    """Assign R/G/B labels: the CCW cyclic rotation nearest (in summed
    squared chroma distance) to the averaged projector primaries."""
    ref = np.stack([gamut_chroma_triangle_raw(g) for g in gamuts]).mean(axis=0)
    tri = np.array([[c.u, c.v] for c in triangle])
    best = None
    best_cost = None
    for shift in range(3):
        rot = np.roll(tri, -shift, axis=0)
        cost = float(((rot - ref) ** 2).sum())
        if best_cost is None or cost < best_cost:
            best_cost = cost
            best = rot
    return tuple(Chroma(float(u), float(v)) for u, v in best)


def gamut_chroma_triangle_raw(g: Gamut) -> np.ndarray:
    """Primary chromaticities in R, G, B order (no reorientation)."""
    return np.array([tuple(chromaticity(v - g.K))
                     for v in (g.R, g.G, g.B)])


def solve_primaries(c_r: Chroma, c_g: Chroma, c_b: Chroma, K, W):
    """Scales (sR, sG, sB) with sum(s_i * d(c_i)) = W - K, where d(c)
    is the unit-sum direction of chromaticity c.  The primaries are
    then K + s_i * d(c_i) and reproduce W exactly by additivity."""
    K = np.asarray(K, dtype=float)
    W = np.asarray(W, dtype=float)
    D = np.column_stack([Chroma(*c).direction() for c in (c_r, c_g, c_b)])
    det = float(np.linalg.det(D))
    if abs(det) <= 1e-12:
        raise SingularChromaBasis(
            "primary chromaticity directions are linearly dependent")
    s = np.linalg.solve(D, W - K)
    if np.any(s <= 0):
        raise NegativeScale(
            f"white offset outside the primary cone (scales {s.tolist()})")
    return s


def max_feasible_scale(K, directions, scales, p: Polytope, tol=1e-9):
    """Largest alpha in (0, 1] keeping every corner of the gamut built
    from primaries K + alpha * s_i * d_i inside `p`.

    Each (corner, facet) pair bounds alpha linearly, so the result is
    the minimum of the positive bounds, capped at one.
    """
    K = np.asarray(K, dtype=float)
    D = np.asarray(directions, dtype=float)      # (3, 3) rows d_i
    s = np.asarray(scales, dtype=float)
    vecs = D * s[:, None]                        # rows s_i * d_i
    subsets = [(0,), (1,), (2,), (0, 1), (0, 2), (1, 2), (0, 1, 2)]
    alpha = 1.0
    scale_ref = max(1.0, float(np.abs(K).max()))
    for sub in subsets:
        v = vecs[list(sub)].sum(axis=0)
        num = p.offsets - p.normals @ K          # >= -tol since K in p
        den = p.normals @ v
        for j in range(len(num)):
            if den[j] > tol:
                alpha = min(alpha, max(num[j], 0.0) / den[j])
    if alpha <= tol * scale_ref:
        raise NoPositiveScale("no positive shrink factor is feasible")
    return float(alpha)


def stone_gamut(gamuts, weights=None):
    """Run the five steps and return (gamut, trace).

    Step 1 intersects chromaticity triangles and inscribes the largest
    triangle; step 2 averages the projector black chromaticities and
    takes the darkest intersection point on that ray as K; step 3 takes
    the brightest as W (same ray, so identical chromaticity); step 4
    lifts the triangle through K to match W; step 5 shrinks all three
    primaries by one common factor until every corner fits.
    """
    hs = [h for g in gamuts for h in gamut_halfspaces(g)]
    corner_stack = np.stack([derive_corners(g).as_array() for g in gamuts])
    lo = corner_stack.reshape(-1, 3).min(axis=0)
    hi = corner_stack.reshape(-1, 3).max(axis=0)
    from .polytope import padded_box
    p = intersect_halfspaces(hs, 3, bounding_box=padded_box(lo, hi))

    poly = chroma_intersection(gamuts)
    triangle = largest_triangle(poly)
    triangle = _label_primaries(triangle, gamuts)

    blacks = np.array([tuple(chromaticity(g.K)) for g in gamuts])
    black_chroma = Chroma(*blacks.mean(axis=0))
    K, W = ray_extent(p, black_chroma)

    scales = solve_primaries(*triangle, K, W)
    D = np.stack([Chroma(*c).direction() for c in triangle])
    alpha = max_feasible_scale(K, D, scales, p)

    prim = K + alpha * scales[:, None] * D
    gamut = Gamut(K, prim[0], prim[1], prim[2])
    trace = StoneTrace(chroma_triangle=triangle, black_chroma=black_chroma,
                       K=K, W=W, primary_scales=scales, alpha=alpha,
                       gamut=gamut)
    return gamut, trace
