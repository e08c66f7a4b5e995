"""
Exceptions raised by arcwave. Everything derives from :class:`ArcwaveError`, so callers that
do not care about the details can catch a single type::

    try:
        solution = arcwave.solve_scattering(arcs, params, incident, "dirichlet", N=64)
    except arcwave.DegenerateGeometry as e:
        print("Bad geometry:", e.pair)
"""


class ArcwaveError(Exception):
    """
    Base class of all errors raised by the library.
    """

    pass


class InvalidArgument(ArcwaveError, ValueError):
    """
    Raised for inputs outside an operation's domain: empty sample sets, evaluation points outside
    [-1,1], parameters with ``|y_n| > 1``, unknown basis tags, negative bi-periodic orders, or
    Sobolev orders that the arc smoothness does not support.
    """

    pass


class InvalidKernel(ArcwaveError, ValueError):
    """
    A kernel evaluator returned NaN or Inf on the sampling grid.
    """

    pass


class SingularityError(ArcwaveError, ValueError):
    """
    A fundamental solution was evaluated at coinciding points, where it is singular.
    """

    pass


class DegenerateGeometry(ArcwaveError):
    """
    The arcs violate an admissibility requirement: a vanishing tangent, or two arcs that touch.
    When the problem is tied to a pair of arcs, :attr:`pair` holds their indices.
    """

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class BranchCutError(DegenerateGeometry):
    """
    A complexified arc left the tube where ``Re Q > 0`` (or ``Re d^2 > 0`` for two arcs), so the
    principal logarithm of the kernel split is no longer valid. Raised by the kernel paths and
    reported by the holomorphy harness as a tube violation.
    """

    pass


class NearSingularEvaluation(ArcwaveError):
    """
    A potential was requested at a point closer than the refusal distance to an arc.
    The library refuses rather than silently losing digits.
    """

    pass


class SolverError(ArcwaveError):
    """
    The dense Galerkin system could not be solved. :attr:`pair` is set when assembly of a
    particular block failed, :attr:`node` when a sweep node failed.
    """

    def __init__(self, message, pair=None, node=None):
        super().__init__(message)
        self.pair = pair
        self.node = node


class NonUniqueness(SolverError):
    """
    The Galerkin matrix is exactly singular, which for these integral equations signals that the
    underlying boundary value problem is not uniquely solvable.
    """

    pass


class ConfigError(ArcwaveError):
    """
    An experiment configuration (or a file it references) could not be read or failed validation.
    """

    pass


class CertificateError(ArcwaveError):
    """
    A parameter sweep failed to show geometric Chebyshev coefficient decay. :attr:`report` holds
    the partial certificate with the per-index diagnostics.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NearSingularWarning(UserWarning):
    """
    Issued (not raised) when the condition estimate of a Galerkin system exceeds 1e12.
    """

    pass
