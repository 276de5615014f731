"""Semantic exception hierarchy shared by all permchain modules."""


class PermChainError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(PermChainError):
    pass


class NegativeEntry(PermChainError):
    pass


class RowSumViolation(PermChainError):
    """A row of an alleged stochastic matrix does not sum to one.

    Carries the worst row index and its deviation from 1.
    """

    def __init__(self, row: int, deviation: float):
        self.row = row
        self.deviation = deviation
        super().__init__(f"row {row} sums to 1{deviation:+.3e}")


class Reducible(PermChainError):
    pass


class Periodic(PermChainError):
    pass


class NoConvergence(PermChainError):
    pass


class NotInvolution(PermChainError):
    pass


class NotEquiProbability(PermChainError):
    """An alleged equi-probability permutation moves mass between states.

    Carries the offending pair and the probability gap.
    """

    def __init__(self, x: int, y: int, gap: float):
        self.pair = (x, y)
        self.gap = gap
        super().__init__(f"pi({x}) != pi({y}) under the mapping (gap {gap:.3e})")


class ZeroDenominator(PermChainError):
    pass


class NotReversible(PermChainError):
    pass


class TraceOutOfRange(PermChainError):
    pass


class TooLarge(PermChainError):
    pass


class Disconnected(PermChainError):
    pass


class Singular(PermChainError):
    pass


class NotCentered(PermChainError):
    pass


class CapExceeded(PermChainError):
    """An enumeration would exceed its cap; carries the computed count."""

    def __init__(self, count: int, cap: int):
        self.count = count
        self.cap = cap
        super().__init__(f"enumeration size {count} exceeds cap {cap}")


class StepBudgetExceeded(PermChainError):
    """An iterative computation ran past its configured step cap."""

    def __init__(self, steps: int, message: str = ""):
        self.steps = steps
        super().__init__(message or f"step budget of {steps} exhausted")


class ConfigInvalid(PermChainError):
    pass


class ParseError(PermChainError):
    """A text input could not be parsed; carries a line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
