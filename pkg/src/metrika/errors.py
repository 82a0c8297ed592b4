"""Exception hierarchy shared by every metrika module."""


class MetrikaError(ValueError):
    """Base class for all library errors."""


class DomainError(MetrikaError):
    """Argument outside [0, inf) or otherwise outside a function's domain."""


class RationalityRequired(MetrikaError):
    """A rationality-sensitive function was given a value of unknown rationality."""


class NonAmenable(MetrikaError):
    """f vanishes at a positive probe point, so f(y)/y is meaningless there."""


class NumericalOverflow(MetrikaError):
    pass


class InvalidBounds(MetrikaError):
    pass


class InvalidSpec(MetrikaError):
    """Malformed function spec, piece table or catalog parameter."""


class ShapeError(MetrikaError):
    pass


class EmptySubset(MetrikaError):
    pass


class HypothesisViolated(MetrikaError):
    pass


class AnyStartDiverged(MetrikaError):
    def __init__(self, message, traces=None):
        super().__init__(message)
        self.traces = traces or []
