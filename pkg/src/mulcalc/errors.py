"""Exception hierarchy shared by every mulcalc module."""


class MulcalcError(Exception):
    """Base class for all library errors."""


class ExpressionSyntaxError(MulcalcError):
    """Raised by the parser; carries the UTF-8 byte offset and expected tokens."""

    def __init__(self, message, offset, expected=()):
        self.offset = offset
        self.expected = tuple(sorted(set(expected)))
        detail = f"{message} at byte {offset}"
        if self.expected:
            detail += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(detail)


class EvaluationError(MulcalcError):
    """Division by zero, Log(0), unbound names, or non-finite results."""


class UnboundNameError(EvaluationError):
    """A parameter or variable has no value in the binding."""


class NotHolomorphicError(MulcalcError):
    """The expression contains a node that is not complex-differentiable."""

    def __init__(self, node_name):
        self.node_name = node_name
        super().__init__(f"not complex-differentiable: '{node_name}' node present")


class NumericalError(MulcalcError):
    """Base class for failures of the numerical machinery (CLI exit code 3)."""


class ZeroOfFunctionError(NumericalError):
    """The function vanishes (|f| <= eps_zero) where a logarithm is required."""


class BranchCrossingError(NumericalError):
    """A difference quotient ratio crossed the negative real axis."""


class PartitionError(NumericalError):
    """Half-plane pieces could not be certified within the depth budget."""


class ConvergenceError(NumericalError):
    """Quadrature refinement budget exhausted before reaching tolerance."""


class NonPositiveFieldError(NumericalError):
    """A field required to be positive produced a nonpositive or complex value."""


class CurveError(MulcalcError):
    """Malformed curve: gap at a junction, empty, or degenerate segment."""
