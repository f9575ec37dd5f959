"""Exception hierarchy shared by the library and the command line."""


class CausalIndError(Exception):
    """Base class for every error raised by causalind."""


class ParseError(CausalIndError):
    """A model, spec or config document could not be parsed."""


class SpecError(CausalIndError, ValueError):
    """A family spec violates its invariants."""


class InvalidNetworkError(CausalIndError, ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid network: " + "; ".join(self.violations))


class UnknownVariableError(CausalIndError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown variable"


class UnknownStateError(CausalIndError, ValueError):
    pass


class ImpossibleEvidenceError(CausalIndError):
    def __init__(self, message="impossible evidence: p(evidence)=0"):
        super().__init__(message)


class JointTooLargeError(CausalIndError):
    pass


class OrderingError(CausalIndError, ValueError):
    pass


class CapExceededError(CausalIndError):
    pass
