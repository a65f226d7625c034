"""Bounded convex polytopes in dimension 2, 3, or 6.

The vertex description is built by incremental halfspace insertion: the
running polytope starts as a large seeding box and every constraint cuts
it, replacing the vertices it excludes with the crossing points of cut
edges.  Edges are recognized combinatorially (two vertices are adjacent
iff no third vertex is tight on all constraints common to both), which
stays correct on degenerate inputs.  Completed polytopes are immutable;
all queries are read-only.

Tolerances follow one convention: feasibility and incidence use
``FEAS_TOL`` relative to ``max(1, |x|)``, vertex deduplication uses
``DEDUP_TOL`` relative to the instance diameter.  Inputs are physical
measurements, so nothing here chases exactness below that.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateIntersection,
    EmptyIntersection,
    NumericalError,
    OriginInside,
    OriginOnFacetPlane,
    RayMisses,
    UnboundedRegion,
)

FEAS_TOL = 1e-9
DEDUP_TOL = 1e-8
# affine-rank cutoff: singular values below RANK_TOL * largest are noise
RANK_TOL = 1e-7

SUPPORTED_DIMS = (2, 3, 6)


@dataclass(frozen=True)
class Halfspace:
    """The constraint ``normal . x <= offset``."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        n = np.asarray(self.normal, dtype=float)
        if n.ndim != 1 or not np.all(np.isfinite(n)):
            raise ValueError("halfspace normal must be a finite vector")
        if np.linalg.norm(n) <= FEAS_TOL:
            raise ValueError("halfspace normal is (numerically) zero")
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def dim(self) -> int:
        return self.normal.shape[0]

    def normalized(self) -> "Halfspace":
        s = np.linalg.norm(self.normal)
        return Halfspace(self.normal / s, self.offset / s)


@dataclass(frozen=True)
class Face:
    """A proper face: its vertex ids and the facets supporting it."""

    dim: int
    vertex_ids: tuple
    facet_ids: frozenset


@dataclass(frozen=True)
class Simplex:
    """A simplex of the boundary triangulation (vertex ids into the
    owning polytope), tagged with the face it helps triangulate."""

    vertex_ids: tuple
    dim: int
    face_id: int


class FaceLattice:
    """All proper faces of a polytope, grouped by dimension.

    ``faces`` is ordered deterministically (by dimension, then vertex
    ids); ``children[i]`` lists the ids of the (dim-1)-faces of face i.
    """

    def __init__(self, faces: list, children: dict):
        self.faces = faces
        self.children = children
        self.by_dim: dict = {}
        for i, f in enumerate(faces):
            self.by_dim.setdefault(f.dim, []).append(i)

    def counts(self) -> dict:
        return {k: len(v) for k, v in sorted(self.by_dim.items())}


class Polytope:
    """Immutable bounded convex polytope with vertex, facet and
    incidence data.

    Vertices are sorted lexicographically by coordinates, so equal
    polytopes built from reordered constraints compare equal row by
    row.  Facet normals are unit length.
    """

    def __init__(self, dim, vertices, normals, offsets, incidence):
        self.dim = int(dim)
        self.vertices = np.asarray(vertices, dtype=float)
        self.normals = np.asarray(normals, dtype=float)
        self.offsets = np.asarray(offsets, dtype=float)
        self.incidence = np.asarray(incidence, dtype=bool)
        self._lattice = None
        self.vertices.setflags(write=False)
        self.normals.setflags(write=False)
        self.offsets.setflags(write=False)
        self.incidence.setflags(write=False)

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def n_facets(self) -> int:
        return self.normals.shape[0]

    def halfspaces(self) -> list:
        return [Halfspace(a, b) for a, b in zip(self.normals, self.offsets)]

    def bounding_box(self):
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def diameter(self) -> float:
        lo, hi = self.bounding_box()
        return float(np.linalg.norm(hi - lo))

    def face_lattice(self) -> FaceLattice:
        if self._lattice is None:
            self._lattice = face_lattice(self)
        return self._lattice

    def __repr__(self):
        return (f"Polytope(dim={self.dim}, vertices={self.n_vertices}, "
                f"facets={self.n_facets})")


@dataclass(frozen=True)
class FacetClass:
    """Facet indices split by visibility from the origin."""

    lower: tuple  # origin on the outer side (offset < 0)
    upper: tuple  # origin on the inner side (offset > 0)


# ---------------------------------------------------------------------------
# construction


def _as_constraint_arrays(halfspaces, dim):
    """Stack halfspaces into (A, b) with unit row normals."""
    if len(halfspaces) == 0:
        raise ValueError("need at least one halfspace")
    A = np.empty((len(halfspaces), dim))
    b = np.empty(len(halfspaces))
    for i, h in enumerate(halfspaces):
        if isinstance(h, Halfspace):
            n, o = h.normal, h.offset
        else:
            n, o = h
            n = np.asarray(n, dtype=float)
        if n.shape != (dim,):
            raise ValueError(f"halfspace {i} has dimension {n.shape}, "
                             f"expected ({dim},)")
        s = np.linalg.norm(n)
        if s <= FEAS_TOL:
            raise ValueError(f"halfspace {i} has zero normal")
        A[i] = n / s
        b[i] = float(o) / s
    return A, b


def _dedup_constraints(A, b, tol):
    """Drop rows equal to an earlier row (unit normals, so comparison
    is direct)."""
    keep = []
    for i in range(A.shape[0]):
        dup = False
        for j in keep:
            if (np.abs(A[i] - A[j]).max() <= tol
                    and abs(b[i] - b[j]) <= tol * max(1.0, abs(b[j]))):
                dup = True
                break
        if not dup:
            keep.append(i)
    return A[keep], b[keep]


def _affine_rank(pts, scale=None):
    if pts.shape[0] <= 1:
        return 0
    M = pts - pts[0]
    s = np.linalg.svd(M, compute_uv=False)
    if scale is None:
        scale = max(1.0, float(s[0]))
    cutoff = RANK_TOL * max(1.0, scale)
    return int(np.sum(s > cutoff))


def _incidence_matrix(V, A, b, tol):
    """Boolean (n_vertices, n_constraints) tightness matrix."""
    if V.shape[0] == 0:
        return np.zeros((0, A.shape[0]), dtype=bool)
    resid = V @ A.T - b
    eps = tol * np.maximum(1.0, np.abs(V).max(axis=1))
    return np.abs(resid) <= eps[:, None]


def _dedup_points(P, tol_abs):
    """Indices of a duplicate-free subset of P (first occurrence kept)."""
    keep = []
    for i in range(P.shape[0]):
        dup = False
        for j in keep:
            if np.abs(P[i] - P[j]).max() <= tol_abs:
                dup = True
                break
        if not dup:
            keep.append(i)
    return keep


def padded_box(lo, hi, factor=2.0, absolute=1.0):
    """Grow [lo, hi] about its center; seeding boxes must strictly
    contain the feasible set."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    c = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo) * factor + absolute
    return c - half, c + half


def intersect_halfspaces(halfspaces, dim, tol=FEAS_TOL, bounding_box=None):
    """Vertex/facet description of the intersection of `halfspaces`.

    Parameters
    ----------
    halfspaces : sequence of Halfspace (or (normal, offset) pairs)
    dim : 2, 3 or 6
    tol : relative feasibility tolerance
    bounding_box : optional (lo, hi); must strictly contain the feasible
        set.  Defaults to a cube scaled from the constraint offsets.  A
        feasible set reaching the box is reported as ``UnboundedRegion``.

    Raises
    ------
    EmptyIntersection, UnboundedRegion, DegenerateIntersection
    """
    if dim not in SUPPORTED_DIMS:
        raise ValueError(f"dim {dim} not supported (use one of "
                         f"{SUPPORTED_DIMS})")
    A, b = _as_constraint_arrays(halfspaces, dim)
    A, b = _dedup_constraints(A, b, tol)

    if bounding_box is None:
        extent = 100.0 * max(1.0, float(np.abs(b).max()))
        lo = np.full(dim, -extent)
        hi = np.full(dim, extent)
    else:
        lo = np.asarray(bounding_box[0], dtype=float).copy()
        hi = np.asarray(bounding_box[1], dtype=float).copy()
        if np.any(hi - lo <= 0):
            raise ValueError("bounding box is empty")

    box_A = np.vstack([np.eye(dim), -np.eye(dim)])
    box_b = np.concatenate([hi, -lo])
    n_box = 2 * dim
    # 2^dim seed corners
    V = np.array(list(itertools.product(*zip(lo, hi))), dtype=float)

    ins_A = box_A
    ins_b = box_b
    for k in range(A.shape[0]):
        a, beta = A[k], b[k]
        vals = V @ a - beta
        eps = tol * np.maximum(1.0, np.abs(V).max(axis=1))
        outside = vals > eps
        if not outside.any():
            ins_A = np.vstack([ins_A, a[None, :]])
            ins_b = np.append(ins_b, beta)
            continue
        inside = vals < -eps
        on = ~outside & ~inside
        if not inside.any() and not on.any():
            raise EmptyIntersection(
                f"constraint {k} excludes the whole running polytope")

        new_pts = []
        if inside.any():
            inc = _incidence_matrix(V, ins_A, ins_b, tol)
            in_idx = np.flatnonzero(inside)
            out_idx = np.flatnonzero(outside)
            # candidate edges need >= dim-1 common tight constraints
            counts = (inc[in_idx].astype(np.float32)
                      @ inc[out_idx].astype(np.float32).T)
            pairs = np.argwhere(counts >= dim - 1 - 0.5)
            inc_f = inc.astype(np.float32)
            for ii, oo in pairs:
                u = in_idx[ii]
                v = out_idx[oo]
                common = inc[u] & inc[v]
                # adjacency: only u and v are tight on all of `common`
                holders = np.count_nonzero(
                    inc_f[:, common].sum(axis=1) >= common.sum() - 0.5)
                if holders != 2:
                    continue
                t = vals[u] / (vals[u] - vals[v])
                new_pts.append(V[u] + t * (V[v] - V[u]))

        V_kept = V[~outside]
        if new_pts:
            span = max(1.0, float(np.abs(V).max()))
            tol_abs = DEDUP_TOL * span
            merged = np.vstack([V_kept, np.array(new_pts)])
            keep_ids = _dedup_points(merged, tol_abs)
            V = merged[keep_ids]
        else:
            V = V_kept
        if V.shape[0] == 0:
            raise EmptyIntersection(
                f"constraint {k} excludes the whole running polytope")
        ins_A = np.vstack([ins_A, a[None, :]])
        ins_b = np.append(ins_b, beta)

    # boundedness: nothing may rest on the seeding box
    inc_box = _incidence_matrix(V, box_A, box_b, tol)
    if inc_box.any():
        raise UnboundedRegion(
            "feasible set touches the seeding box; it is unbounded or "
            "the supplied bounding box is too tight")

    span = max(1.0, float(np.abs(V).max()))
    keep_ids = _dedup_points(V, DEDUP_TOL * span)
    V = V[keep_ids]

    achieved = _affine_rank(V, scale=span)
    if achieved < dim:
        raise DegenerateIntersection(achieved, dim)

    # irredundant facets: tight vertex set must span a (dim-1)-flat
    inc_real = _incidence_matrix(V, A, b, tol)
    facet_ids = [j for j in range(A.shape[0])
                 if _affine_rank(V[inc_real[:, j]], scale=span) == dim - 1]
    if not facet_ids:
        raise NumericalError("no supporting facets survived; inconsistent "
                             "tolerance state")
    A_f = A[facet_ids]
    b_f = b[facet_ids]

    order = np.lexsort(V.T[::-1])  # sort by x1, then x2, ...
    V = V[order]
    incidence = _incidence_matrix(V, A_f, b_f, tol)
    if np.any(incidence.sum(axis=1) < dim):
        raise NumericalError(
            "a vertex is tight on fewer than dim facets; input is on the "
            "edge of degeneracy at the working tolerance")
    return Polytope(dim, V, A_f, b_f, incidence)


# ---------------------------------------------------------------------------
# queries


def contains_point(p: Polytope, x, tol=FEAS_TOL) -> bool:
    """Membership with the documented relative slack."""
    x = np.asarray(x, dtype=float)
    if x.shape != (p.dim,):
        raise ValueError(f"point has shape {x.shape}, expected ({p.dim},)")
    scale = max(1.0, float(np.linalg.norm(x)))
    return bool(np.all(p.normals @ x - p.offsets <= tol * scale))


def classify_facets(p: Polytope) -> FacetClass:
    """Split facets into those visible from the origin (lower, supporting
    the near boundary) and the rest (upper).

    Normals are unit length, so each offset is the signed plane/origin
    distance.  Requires the origin strictly outside `p` and off every
    facet plane.
    """
    if p.dim != 3:
        raise ValueError("facet classification is defined for dim 3")
    scale = max(1.0, float(np.abs(p.vertices).max()))
    near_zero = np.abs(p.offsets) <= FEAS_TOL * scale
    if near_zero.any():
        raise OriginOnFacetPlane(
            f"facet planes {np.flatnonzero(near_zero).tolist()} pass "
            "through the origin")
    lower = tuple(np.flatnonzero(p.offsets < 0).tolist())
    upper = tuple(np.flatnonzero(p.offsets > 0).tolist())
    if not lower:
        raise OriginInside("origin satisfies every facet constraint")
    return FacetClass(lower=lower, upper=upper)


def _chroma_direction(c):
    u, v = float(c[0]), float(c[1])
    return np.array([u, v, 1.0 - u - v])


def ray_extents(p: Polytope, dirs, tol=FEAS_TOL):
    """Entry/exit parameters of rays {t*d : t > 0} for many directions.

    Returns (t_enter, t_exit, hits); rows with ``hits`` False miss the
    polytope and carry NaN parameters.
    """
    D = np.atleast_2d(np.asarray(dirs, dtype=float))
    T = D @ p.normals.T                      # (M, F)
    B = np.broadcast_to(p.offsets, T.shape)
    eps = tol * max(1.0, float(np.abs(p.offsets).max()))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = B / T
    lo = np.where(T < -eps, ratio, -np.inf).max(axis=1)
    hi = np.where(T > eps, ratio, np.inf).min(axis=1)
    # facet parallel to the ray and violated: no t can fix it
    dead = np.logical_and(np.abs(T) <= eps, B < -eps).any(axis=1)
    hits = (~dead) & (lo <= hi * (1 + tol) + eps) & (hi > eps)
    lo = np.where(hits, np.maximum(lo, 0.0), np.nan)
    hi = np.where(hits, hi, np.nan)
    # snap tangential grazes to a single point
    tangent = hits & (hi - lo <= tol * np.maximum(1.0, np.abs(hi)))
    hi = np.where(tangent, lo, hi)
    return lo, hi, hits


def ray_extent(p: Polytope, chroma, tol=FEAS_TOL):
    """Nearest and farthest point of `p` on the constant-chromaticity ray.

    `chroma` is any (u, v) pair; the ray direction is (u, v, 1-u-v).
    Tangency returns two equal points; a miss raises ``RayMisses``.
    """
    if p.dim != 3:
        raise ValueError("ray extents are defined for dim 3")
    d = _chroma_direction(chroma)
    lo, hi, hits = ray_extents(p, d[None, :], tol=tol)
    if not hits[0]:
        raise RayMisses(f"ray of chromaticity {tuple(chroma)} misses the "
                        "polytope")
    return lo[0] * d, hi[0] * d


# ---------------------------------------------------------------------------
# face lattice and boundary triangulation


def face_lattice(p: Polytope) -> FaceLattice:
    """Enumerate all proper faces (dimensions 0 .. d-1).

    Every proper face is an intersection of facet vertex sets, so
    closing the facet sets under pairwise intersection with facets
    reaches all of them.
    """
    V = p.vertices
    nv = V.shape[0]
    facet_masks = p.incidence.T.copy()        # (F, nv)
    span = max(1.0, float(np.abs(V).max()))

    seen = {}
    order = []

    def visit(mask):
        key = np.packbits(mask).tobytes()
        if key in seen:
            return False
        seen[key] = mask
        order.append(mask)
        return True

    for j in range(facet_masks.shape[0]):
        visit(facet_masks[j])
    head = 0
    while head < len(order):
        m = order[head]
        head += 1
        for j in range(facet_masks.shape[0]):
            nm = m & facet_masks[j]
            if nm.any() and not np.array_equal(nm, m):
                visit(nm)

    records = []
    for m in order:
        ids = np.flatnonzero(m)
        dim = _affine_rank(V[ids], scale=span)
        facets = frozenset(
            int(j) for j in range(facet_masks.shape[0])
            if not np.any(m & ~facet_masks[j]))
        records.append((dim, tuple(int(i) for i in ids), facets))
    records.sort(key=lambda r: (r[0], r[1]))
    faces = [Face(dim=d, vertex_ids=vs, facet_ids=fs)
             for d, vs, fs in records]

    by_dim = {}
    for i, f in enumerate(faces):
        by_dim.setdefault(f.dim, []).append(i)
    children = {i: [] for i in range(len(faces))}
    vsets = [frozenset(f.vertex_ids) for f in faces]
    for d in sorted(by_dim):
        if d - 1 not in by_dim:
            continue
        for fi in by_dim[d]:
            for gi in by_dim[d - 1]:
                if vsets[gi] < vsets[fi]:
                    children[fi].append(gi)
    return FaceLattice(faces, children)


def pulling_triangulation(p: Polytope) -> list:
    """Triangulate every proper face by coning from its bottommost
    vertex (vertices are stored in lexicographic order, so that is the
    least vertex id).

    Returns all simplices, one batch per face: the k-simplices listed
    for a k-face partition that face, and lower-dimensional faces
    contribute their own (shared) triangulations.
    """
    lat = p.face_lattice()
    tops: dict = {}

    for fid, face in enumerate(lat.faces):   # faces are sorted by dim
        if face.dim == 0:
            tops[fid] = [face.vertex_ids]
            continue
        bottom = min(face.vertex_ids)
        batch = []
        for cid in lat.children[fid]:
            child = lat.faces[cid]
            if bottom in child.vertex_ids:
                continue
            for s in tops[cid]:
                batch.append((bottom,) + s)
        tops[fid] = batch

    out = []
    for fid, face in enumerate(lat.faces):
        for s in tops[fid]:
            out.append(Simplex(vertex_ids=s, dim=face.dim, face_id=fid))
    return out


def simplex_measure(pts) -> float:
    """k-dimensional volume of a simplex given its k+1 vertices."""
    pts = np.asarray(pts, dtype=float)
    k = pts.shape[0] - 1
    if k == 0:
        return 0.0
    E = pts[1:] - pts[0]
    gram = E @ E.T
    det = float(np.linalg.det(gram))
    if det < 0:
        det = 0.0
    import math
    return math.sqrt(det) / math.factorial(k)
