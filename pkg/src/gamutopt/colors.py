"""Color algebra of additive three-channel devices.

Colors are points of a 3-D linear device-independent space (think
nonnegative tristimulus values) and are passed around as plain float
arrays of shape (3,).  A device gamut is the parallelepiped spanned by
its black corner and the three primary offsets; the remaining corners
follow by additivity.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DegenerateGamut, OrientationError, ValidationError, ZeroSum
from .polytope import Halfspace

DEGEN_TOL = 1e-12


def as_color(x) -> np.ndarray:
    c = np.asarray(x, dtype=float)
    if c.shape != (3,) or not np.all(np.isfinite(c)):
        raise ValidationError(f"not a finite 3-channel color: {x!r}")
    return c


class Chroma(NamedTuple):
    """Coordinates of a ray through the origin on the unit-sum plane."""

    u: float
    v: float

    def direction(self) -> np.ndarray:
        return np.array([self.u, self.v, 1.0 - self.u - self.v])


class Gamut:
    """Parallelepiped gamut given by black, red, green, blue corners.

    The corner labeling must be right-handed:
    det(R-K, G-K, B-K) > 0.  A determinant at or below
    ``DEGEN_TOL`` times the edge-norm product is degenerate.
    """

    __slots__ = ("K", "R", "G", "B")

    def __init__(self, K, R, G, B):
        self.K = as_color(K)
        self.R = as_color(R)
        self.G = as_color(G)
        self.B = as_color(B)
        E = self.edges()
        norms = np.linalg.norm(E, axis=1)
        det = float(np.linalg.det(E))
        if abs(det) <= DEGEN_TOL * max(float(np.prod(norms)), 1e-300):
            raise DegenerateGamut(
                "corner offsets are affinely dependent "
                f"(det={det:.3e})")
        if det < 0:
            raise OrientationError(
                "left-handed corner labeling: det(R-K, G-K, B-K) = "
                f"{det:.6g} < 0")

    def edges(self) -> np.ndarray:
        """Rows R-K, G-K, B-K."""
        return np.stack([self.R - self.K, self.G - self.K, self.B - self.K])

    def volume(self) -> float:
        return float(abs(np.linalg.det(self.edges())))

    def corners(self) -> "CornerSet":
        return derive_corners(self)

    def translate(self, v) -> "Gamut":
        v = as_color(v)
        return Gamut(self.K + v, self.R + v, self.G + v, self.B + v)

    def scale(self, s: float) -> "Gamut":
        return Gamut(self.K * s, self.R * s, self.G * s, self.B * s)

    def __repr__(self):
        return (f"Gamut(K={self.K.tolist()}, R={self.R.tolist()}, "
                f"G={self.G.tolist()}, B={self.B.tolist()})")


@dataclass(frozen=True)
class CornerSet:
    """All eight gamut corners.  Complementary pairs sum to W + K."""

    K: np.ndarray
    R: np.ndarray
    G: np.ndarray
    B: np.ndarray
    C: np.ndarray
    M: np.ndarray
    Y: np.ndarray
    W: np.ndarray

    def as_array(self) -> np.ndarray:
        return np.stack([self.K, self.R, self.G, self.B,
                         self.C, self.M, self.Y, self.W])

    def labels(self) -> tuple:
        return ("K", "R", "G", "B", "C", "M", "Y", "W")


def derive_corners(g: Gamut) -> CornerSet:
    """Complete the four given corners to all eight by additivity:
    W = K + (R-K) + (G-K) + (B-K), and each secondary corner is the sum
    of two primary offsets."""
    K = g.K
    r, gr, b = g.R - K, g.G - K, g.B - K
    return CornerSet(
        K=K, R=g.R, G=g.G, B=g.B,
        C=K + gr + b,
        M=K + r + b,
        Y=K + r + gr,
        W=K + r + gr + b,
    )


def luminosity(c, w) -> float:
    """Positive linear brightness functional w1*x1 + w2*x2 + w3*x3."""
    return float(np.dot(as_color(c), np.asarray(w, dtype=float)))


def chromaticity(c, tol=DEGEN_TOL) -> Chroma:
    """Project a color onto the unit-sum plane.

    Every positive multiple of `c` has the same chromaticity; the map is
    undefined toward zero channel sum.
    """
    c = as_color(c)
    s = float(c.sum())
    if s <= tol * max(1.0, float(np.abs(c).max())):
        raise ZeroSum(f"channel sum {s:.3e} too small for chromaticity")
    return Chroma(c[0] / s, c[1] / s)


def gamut_halfspaces(g: Gamut) -> list:
    """Six facet constraints of the parallelepiped.

    For each axis, the facet planes through K and through the opposite
    corner; outward normals are cross products of the other two edges,
    so a point satisfies all six iff it lies in the gamut.
    """
    E = g.edges()
    out = []
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        n = np.cross(E[j], E[k])        # n . E[i] = det > 0, points inward
        out.append(Halfspace(-n, float(-n @ g.K)))
        out.append(Halfspace(n, float(n @ (g.K + E[i]))))
    return out


def device_transform(standard: Gamut, projector: Gamut) -> np.ndarray:
    """Homogeneous 4x4 matrix taking standard-gamut device coordinates
    (r, g, b) in [0,1]^3 to projector device coordinates.

    Solves M_p (r', g', b') = (K_s + r(R_s-K_s) + g(G_s-K_s)
    + b(B_s-K_s)) - K_p, with M_p the projector edge matrix; rows are
    emitted row-major with the homogeneous row last.
    """
    Ms = standard.edges().T
    Mp = projector.edges().T
    lin = np.linalg.solve(Mp, Ms)
    off = np.linalg.solve(Mp, standard.K - projector.K)
    out = np.eye(4)
    out[:3, :3] = lin
    out[:3, 3] = off
    return out


def luminosity_ratio(K, W) -> float:
    """Brightness ratio of two same-chromaticity colors.

    On a common ray through the origin the ratio of any positive linear
    functional equals the ratio of ray parameters, so no weight vector
    is needed.
    """
    K = as_color(K)
    W = as_color(W)
    sK, sW = float(K.sum()), float(W.sum())
    if sK <= 0:
        raise ZeroSum("black point has nonpositive channel sum")
    return sW / sK
