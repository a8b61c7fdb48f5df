"""Exception hierarchy shared by every gnslab module."""


class GnslabError(Exception):
    """Base class for all gnslab errors."""


class NumericError(GnslabError, ArithmeticError):
    """A numeric kernel could not produce a result within policy."""


class InputError(GnslabError, ValueError):
    """Inputs violate an operation's precondition."""


# numerics
class NonFinite(InputError):
    pass


class NotHermitian(InputError):
    pass


class LinearlyDependent(InputError):
    def __init__(self, index, residual):
        super().__init__(f"vector {index} is dependent on its predecessors "
                         f"(residual norm {residual:.3e})")
        self.index = index
        self.residual = residual


class RankDeficient(NumericError):
    pass


class SpectrumAtMinusOne(NumericError):
    pass


# algebra
class ShapeMismatch(InputError):
    pass


class AlgebraMismatch(InputError):
    pass


class NotNormalized(InputError):
    pass


class ZeroVector(InputError):
    pass


class InvalidState(InputError):
    pass


# projgeom
class OrthogonalRay(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class DifferentSectors(InputError):
    pass


# gns
class NotMultiplicative(InputError):
    pass


class NotBlockPreserving(InputError):
    pass


class Antipodal(InputError):
    pass


class SectorMismatch(InputError):
    pass


# kadison
class NotOrthonormal(InputError):
    pass


class NoSelfAdjointSolution(InputError):
    def __init__(self, residual):
        super().__init__(f"no Hermitian interpolant (residual {residual:.3e})")
        self.residual = residual


class NoUnitarySolution(InputError):
    def __init__(self, gram_defect):
        super().__init__(f"Gram matrices differ by {gram_defect:.3e}")
        self.gram_defect = gram_defect


class BranchCut(InputError):
    pass


class TooFar(InputError):
    """Inputs lie outside the radius guaranteed by the recursive bound.

    The unitary is still built; ``achieved`` holds ``||I - U||``.
    """

    def __init__(self, distance, delta, achieved, unitary):
        super().__init__(f"max ||x_i - y_i|| = {distance:.3e} >= delta = {delta:.3e} "
                         f"(achieved ||I - U|| = {achieved:.3e})")
        self.distance = distance
        self.delta = delta
        self.achieved = achieved
        self.unitary = unitary


# bundles
class VanishingLink(NumericError):
    pass


class CurvatureSaturated(NumericError):
    pass


class UncoveredPoint(InputError):
    pass


# chain
class SiteMismatch(InputError):
    pass


class SupportOutsideLattice(InputError):
    pass


class TooLarge(InputError):
    pass


# ktheory
class BrokenDivisibilityChain(InputError):
    pass


class NotDivisible(InputError):
    pass
