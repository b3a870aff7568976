"""Exception types shared across the package."""


class VarlagError(Exception):
    """Base class for all package errors."""


class DomainError(VarlagError):
    """Arithmetic left the domain of an elementary operation.

    Raised for division by a Taylor value with zero constant term, sqrt of a
    non-positive constant term, log of a non-positive constant term, and
    atan2 evaluated exactly on its branch cut with a nonzero perturbation.
    The evaluator attaches the offending sub-expression as ``expr``.
    """

    def __init__(self, message, expr=None):
        super().__init__(message)
        self.expr = expr

    def __str__(self):
        base = super().__str__()
        if self.expr is not None:
            return f"{base} (in sub-expression: {self.expr})"
        return base


class UnboundVariable(VarlagError):
    """An expression referenced a variable missing from the bindings."""


class ParseError(VarlagError):
    """Source text could not be parsed; carries a ParseDiagnostic."""

    def __init__(self, diagnostic):
        super().__init__(diagnostic.message)
        self.diagnostic = diagnostic


class UnknownIdentifier(ParseError):
    """An identifier is neither a variable, constant, nor declared parameter."""


class IndexOutOfRange(ParseError):
    """A variable index lies outside 1..n."""


class RegularityError(VarlagError):
    """A curve jet violates the minimum-speed floor."""


class BoundaryViolation(VarlagError):
    """A variation does not vanish at the endpoints as required."""


class QuadratureNonConvergence(VarlagError):
    """Adaptive quadrature hit the bisection depth limit."""

    def __init__(self, message, worst_interval=None):
        super().__init__(message)
        self.worst_interval = worst_interval


class SamplerExhausted(VarlagError):
    """Rejection sampling failed to produce an admissible draw."""


class DegenerateDirection(VarlagError):
    """A direction vector sits on a pole of the angle chart."""


class SingularJacobian(VarlagError):
    """The angle-chart Jacobian solve is too ill-conditioned."""


class AngleChartError(VarlagError):
    """A built Lagrangian was evaluated at a degenerate chart point."""


class InconsistentVerdicts(VarlagError):
    """A classification report violates the verdict lattice."""


class GaugeError(VarlagError):
    """Graph gauge requested with unusable boundary data."""


class RegularityLoss(VarlagError):
    """A solver iterate violated the speed floor."""


class NonConvergence(VarlagError):
    """Newton failed to converge; carries the best iterate found."""

    def __init__(self, message, best=None, history=None):
        super().__init__(message)
        self.best = best
        self.history = history or []
