"""Exception types raised across the package."""


class QPentagonError(Exception):
    """Base class for all package errors."""


class StripViolation(QPentagonError, ValueError):
    """Argument lies outside the convergence strip of the defining integral."""


class QuadratureNonConvergence(QPentagonError, ArithmeticError):
    """Adaptive quadrature ran out of panels before meeting its tolerance."""


class DivergentProduct(QPentagonError, ValueError):
    """Infinite product requested with |q| >= 1."""


class PoleHit(QPentagonError, ZeroDivisionError):
    """A factor of a product vanishes at the requested argument."""


class BranchCut(QPentagonError, ValueError):
    """Integration path crosses the branch cut of log(1 + t)."""


class BoundaryLeak(QPentagonError, ValueError):
    """Grid function has not decayed at the grid edges."""


class DegenerateSample(QPentagonError, ValueError):
    """Sample vector is (numerically) zero."""


class DegeneratePoint(QPentagonError, ZeroDivisionError):
    """Point map or chart evaluated where a coordinate vanishes or collides."""


class DegenerateQuadruple(QPentagonError, ZeroDivisionError):
    """Cross-ratio requested for a quadruple with a vanishing denominator."""


class SignatureViolation(QPentagonError, ValueError):
    """Exponents of a moduli-space basis function have the wrong signs."""


class NonMember(QPentagonError, ValueError):
    """Element does not lie in the subspace on which the automorphism is Laurent.

    ``y_degree`` records the offending (negative) Y-degree when known.
    """

    def __init__(self, message, y_degree=None):
        super().__init__(message)
        self.y_degree = y_degree


class BasisExpansionFailure(QPentagonError, ArithmeticError):
    """Leading-monomial elimination left a remainder with no basis match."""


class NotHInvariant(QPentagonError, ValueError):
    """Chord monomial weights do not sum to zero at every vertex."""


class NotRegular(QPentagonError, ValueError):
    """Chord monomial has crossing diagonals."""


class EvenN(QPentagonError, ValueError):
    """Clock-shift model requested for an even matrix size."""
