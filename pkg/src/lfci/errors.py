"""Exception types shared across the package."""


class LfciError(Exception):
    """Base class for package-specific failures."""


class SelfLoop(LfciError):
    pass


class DuplicateEdge(LfciError):
    pass


class CircleMarkPresent(LfciError):
    pass


class ParseError(LfciError):
    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class InvalidConditioningSet(LfciError):
    pass


class GraphTooLarge(LfciError):
    pass


class AdjacentPair(LfciError):
    pass


class CapExceeded(LfciError):
    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class NotADag(LfciError):
    pass


class InvalidMag(LfciError):
    pass


class UnsupportedEdge(LfciError):
    pass


class NotPositiveDefinite(LfciError):
    pass


class SingularSystem(LfciError):
    pass


class ZeroVariance(LfciError):
    pass


class SingularConditioningBlock(LfciError):
    pass


class DegenerateResidualVariance(LfciError):
    pass


class EmptyData(LfciError):
    pass


class InsufficientSamples(LfciError):
    pass


class InconsistentSeparators(LfciError):
    pass


class SingularAfterRidge(LfciError):
    pass


class SizeMismatch(LfciError):
    pass


class NoConvergence(LfciError):
    pass


class ConfigError(LfciError):
    pass


class TesterFailure(LfciError):
    """Wraps a CI-tester exception together with the offending query."""

    def __init__(self, message, query=None):
        super().__init__(message)
        self.query = query
