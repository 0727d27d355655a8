"""Exception hierarchy shared by all layers."""


class FinslerError(Exception):
    """Base class for every error raised by this package."""


class DomainError(FinslerError):
    """Evaluation point lies outside the metric's declared domain."""


class NonSmoothPoint(FinslerError):
    """A non-finite intermediate appeared (sqrt(0), division by zero, ...)."""


class DepthError(FinslerError):
    """A derivative was requested beyond the order carried by a jet."""


class SingularMetric(FinslerError):
    """The fundamental tensor is (numerically) not invertible."""


class VarianceError(FinslerError):
    """Tensor slot variance metadata is missing or inconsistent."""


class BadParameter(FinslerError):
    """Invalid parameters for a builtin metric family."""


class DslError(FinslerError):
    """Base for metric expression language errors."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = f" at line {line}, column {column}" if line is not None else ""
        super().__init__(f"{message}{where}")


class DslSyntaxError(DslError):
    pass


class UnknownIdentifier(DslError):
    pass


class ArityError(DslError):
    pass


class SamplingExhausted(FinslerError):
    """Rejection sampling failed to find enough in-domain points."""


class ConfigError(FinslerError):
    pass


class MetricValidationError(FinslerError):
    pass
