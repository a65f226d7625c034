"""Black/white selection by luminosity-ratio maximization.

Both points must share a chromaticity, i.e. lie on one ray through the
origin, so the search is over rays meeting the gamut intersection P.
Along a ray the ratio of any positive linear luminosity equals the
ratio of ray parameters, which makes the per-ray objective
weight-independent; weights only matter for tie-breaking.

The optimum is attained at a ray through a vertex of the near or far
boundary of P, or through a crossing of one near and one far edge in
chromaticity projection.  Enumerating exactly those rays replaces
building the overlay of the two projected subdivisions: same candidate
set, far less machinery.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .colors import Chroma, chromaticity, luminosity
from .errors import NoCandidates, RayMisses
from .polytope import FacetClass, Polytope, classify_facets, contains_point, \
    face_lattice, ray_extent

RATIO_TIE_TOL = 1e-9


@dataclass(frozen=True)
class CandidateChroma:
    """A candidate ray: its chromaticity, provenance, and the boundary
    pair it selects."""

    chroma: Chroma
    source: str                # lowerVertex | upperVertex | edgeCrossing
    lambda_minus: np.ndarray
    lambda_plus: np.ndarray

    @property
    def ratio(self) -> float:
        return float(self.lambda_plus.sum() / self.lambda_minus.sum())


@dataclass(frozen=True)
class BWSelection:
    K: np.ndarray
    W: np.ndarray
    chroma: Chroma
    ratio: float
    candidate_count: int


def _facet_side_sets(p: Polytope, fc: FacetClass):
    lower = np.zeros(p.n_facets, dtype=bool)
    lower[list(fc.lower)] = True
    upper = ~lower
    return lower, upper


def _boundary_edges(p: Polytope, side_mask) -> list:
    """Edges (1-faces) lying on at least one facet of the given side."""
    lat = p.face_lattice()
    out = []
    for fid in lat.by_dim.get(1, []):
        face = lat.faces[fid]
        if any(side_mask[j] for j in face.facet_ids):
            out.append(face.vertex_ids)
    return out


def _point_at_chroma(a, b, chroma, tol=1e-9):
    """Point of segment [a, b] whose chromaticity is `chroma`.

    The condition is linear: x1 - u*(x1+x2+x3) = 0 (and the v
    analogue).  Uses the better-conditioned of the two equations and
    checks the other.
    """
    u, v = chroma
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d = b - a
    alpha_a = a[0] - u * a.sum()
    alpha_d = d[0] - u * d.sum()
    beta_a = a[1] - v * a.sum()
    beta_d = d[1] - v * d.sum()
    if abs(alpha_d) >= abs(beta_d):
        num, den, chk_n, chk_d = alpha_a, alpha_d, beta_a, beta_d
    else:
        num, den, chk_n, chk_d = beta_a, beta_d, alpha_a, alpha_d
    if abs(den) <= tol * max(1.0, float(np.abs(d).max())):
        return None
    t = -num / den
    if t < -tol or t > 1 + tol:
        return None
    if abs(chk_n + t * chk_d) > 1e-6 * max(1.0, float(np.abs(a).max())):
        return None
    return a + t * d


def _segments_cross(p1, p2, q1, q2, tol=1e-12):
    """Proper single-point crossing of two 2-D segments; returns the
    crossing point or None (parallel, collinear overlap, no contact)."""
    p1, p2, q1, q2 = (np.asarray(x, dtype=float) for x in (p1, p2, q1, q2))
    r = p2 - p1
    s = q2 - q1
    denom = r[0] * s[1] - r[1] * s[0]
    scale = max(np.abs(r).max(), np.abs(s).max(), 1e-30)
    if abs(denom) <= tol * scale * scale:
        return None
    qp = q1 - p1
    t = (qp[0] * s[1] - qp[1] * s[0]) / denom
    w = (qp[0] * r[1] - qp[1] * r[0]) / -denom
    if -tol <= t <= 1 + tol and -tol <= w <= 1 + tol:
        return p1 + t * r
    return None


def candidate_chromaticities(p: Polytope) -> list:
    """Enumerate the rays on which the optimal pair can lie.

    (a) rays through near-boundary vertices, (b) rays through
    far-boundary vertices, (c) rays through chromaticity crossings of a
    near edge with a far edge.  Candidates whose entry or exit point
    drifts outside `p` are dropped.
    """
    fc = classify_facets(p)
    lower_mask, upper_mask = _facet_side_sets(p, fc)
    inc = p.incidence
    out = []

    def try_ray(chroma, source, want_entry=None, want_exit=None):
        try:
            lam_m, lam_p = ray_extent(p, chroma)
        except RayMisses:
            return
        if want_entry is not None and \
                np.abs(lam_m - want_entry).max() > 1e-6 * max(
                    1.0, float(np.abs(want_entry).max())):
            return
        if not (contains_point(p, lam_m) and contains_point(p, lam_p)):
            return
        out.append(CandidateChroma(chroma=chroma, source=source,
                                   lambda_minus=lam_m, lambda_plus=lam_p))

    on_lower = inc[:, lower_mask].any(axis=1)
    on_upper = inc[:, upper_mask].any(axis=1)
    for vid in np.flatnonzero(on_lower):
        v = p.vertices[vid]
        try_ray(chromaticity(v), "lowerVertex", want_entry=v)
    for vid in np.flatnonzero(on_upper):
        v = p.vertices[vid]
        try_ray(chromaticity(v), "upperVertex")

    lower_edges = _boundary_edges(p, lower_mask)
    upper_edges = _boundary_edges(p, upper_mask)
    chroma_of = [chromaticity(v) for v in p.vertices]
    for (s0, s1) in lower_edges:
        ps0 = np.array(chroma_of[s0])
        ps1 = np.array(chroma_of[s1])
        for (t0, t1) in upper_edges:
            if {s0, s1} == {t0, t1}:
                continue
            cross = _segments_cross(ps0, ps1,
                                    np.array(chroma_of[t0]),
                                    np.array(chroma_of[t1]))
            if cross is None:
                continue
            chroma = Chroma(float(cross[0]), float(cross[1]))
            lam_m = _point_at_chroma(p.vertices[s0], p.vertices[s1], chroma)
            lam_p = _point_at_chroma(p.vertices[t0], p.vertices[t1], chroma)
            if lam_m is None or lam_p is None:
                continue
            if not (contains_point(p, lam_m) and contains_point(p, lam_p)):
                continue
            out.append(CandidateChroma(chroma=chroma, source="edgeCrossing",
                                       lambda_minus=lam_m,
                                       lambda_plus=lam_p))
    return out


def select_black_white(p: Polytope, weights) -> BWSelection:
    """Pick the candidate maximizing the luminosity ratio.

    Near-ties (within ``RATIO_TIE_TOL`` relative) are broken by larger
    white luminosity under `weights`, then by lexicographically smaller
    chromaticity, so duplicated-projector instances reproduce bitwise.
    """
    weights = np.asarray(weights, dtype=float)
    cands = candidate_chromaticities(p)
    if not cands:
        raise NoCandidates("no feasible same-chromaticity pair found")

    best = None
    best_key = None
    for c in cands:
        ratio = c.ratio
        key = (ratio, luminosity(c.lambda_plus, weights),
               -c.chroma.u, -c.chroma.v)
        if best is None:
            best, best_key = c, key
            continue
        if ratio > best_key[0] * (1 + RATIO_TIE_TOL):
            best, best_key = c, key
        elif ratio >= best_key[0] * (1 - RATIO_TIE_TOL):
            # tie on ratio: brighter white, then smaller chroma
            if key[1:] > best_key[1:]:
                best, best_key = c, (best_key[0], *key[1:])
    return BWSelection(K=best.lambda_minus, W=best.lambda_plus,
                       chroma=best.chroma, ratio=best.ratio,
                       candidate_count=len(cands))
