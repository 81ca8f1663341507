"""Exception hierarchy shared by all modules."""


class BidGameError(Exception):
    """Base class for every error raised by this package."""


class GameSyntaxError(BidGameError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")


class GameReferenceError(BidGameError):
    """A document names a vertex or transducer state that does not exist."""


class GameSemanticError(BidGameError):
    """A document is well formed but violates a type invariant."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class IllegalBidError(BidGameError):
    pass


class UnsupportedMechanismError(BidGameError):
    pass


class NodeCapExceeded(BidGameError):
    def __init__(self, cap):
        self.cap = cap
        super().__init__(f"configuration graph exceeds node cap of {cap}")


class SizeLimitExceeded(BidGameError):
    pass


class InternalConsistencyError(BidGameError):
    """A result contradicts a proven property; indicates a bug."""


class StrategyError(BidGameError):
    pass
