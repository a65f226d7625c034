"""Exception hierarchy for gamut computations.

Errors fall into three broad groups that the CLI maps to exit codes:
input validation (bad gamut data), infeasible instances (empty or
degenerate intersections), and numerical failures inside a solver.
"""


class GamutError(Exception):
    """Base class for all errors raised by this package."""


# --- input validation ------------------------------------------------------

class ValidationError(GamutError):
    """Instance data violates a structural invariant."""


class DegenerateGamut(ValidationError):
    """Gamut corners are (numerically) affinely dependent."""


class OrientationError(ValidationError):
    """Corner labeling is left-handed: det(R-K, G-K, B-K) < 0."""


class ZeroSum(ValidationError):
    """Chromaticity requested for a color with nonpositive channel sum."""


class ParseError(ValidationError):
    """Instance file is not valid JSON or misses required fields."""


# --- infeasible geometry ---------------------------------------------------

class InfeasibleError(GamutError):
    """The requested object does not exist for this instance."""


class EmptyIntersection(InfeasibleError):
    """Halfspace intersection contains no point."""


class UnboundedRegion(InfeasibleError):
    """Halfspace intersection has a recession ray (or exceeds the
    seeding box, which at the scales used here means the same thing)."""


class DegenerateIntersection(InfeasibleError):
    """Feasible set is nonempty but not full-dimensional."""

    def __init__(self, achieved_dim: int, expected_dim: int):
        self.achieved_dim = achieved_dim
        self.expected_dim = expected_dim
        super().__init__(
            f"feasible set has affine dimension {achieved_dim}, "
            f"expected {expected_dim}")


class OriginOnFacetPlane(InfeasibleError):
    """A facet plane passes through the origin; near/far facet
    classification is undefined."""


class OriginInside(InfeasibleError):
    """The origin lies inside the polytope; ray queries along
    chromaticity directions are undefined."""


class RayMisses(InfeasibleError):
    """A constant-chromaticity ray does not meet the polytope."""


class NoCandidates(InfeasibleError):
    """Black/white candidate enumeration produced no feasible pair."""


class InfeasibleAnchor(InfeasibleError):
    """A fixed black or white point violates a projector gamut."""


class DegenerateOptimum(InfeasibleError):
    """Only (numerically) flat gamuts are feasible for the fixed anchors."""


class EmptyChromaIntersection(InfeasibleError):
    """Projector chromaticity triangles have empty common area."""


class TooFewVertices(InfeasibleError):
    """Polygon has fewer than three vertices."""


class SingularChromaBasis(InfeasibleError):
    """Primary chromaticity directions are linearly dependent."""


class NegativeScale(InfeasibleError):
    """White offset is outside the cone of the chosen primaries."""


class NoPositiveScale(InfeasibleError):
    """No positive shrink factor keeps the gamut inside the intersection."""


class NoFiniteLevel(InfeasibleError):
    """Level doubling found no feasible quality level below the cap."""


# --- numerical failures ----------------------------------------------------

class NumericalError(GamutError):
    """A solver failed for numerical (not geometric) reasons."""


class IterationBudgetExceeded(NumericalError):
    """Projection scheme was still moving when the sweep budget ran out."""


class TooManySubsets(NumericalError):
    """Brute-force vertex enumeration guard tripped."""


class VerificationFailure(GamutError):
    """An oracle found a better witness than the optimizer (verify mode)."""
