"""Exception types shared across the package."""


class AhPairsError(Exception):
    """Base class for package errors."""


class DomainTooSmall(AhPairsError, ValueError):
    """Raised when t lies below the asymptotic-series regime (t < 10)."""


class UnresolvedBlock(AhPairsError, RuntimeError):
    """A Gram block whose sign-change count could not be reconciled."""

    def __init__(self, t_lo: float, t_hi: float, expected: int, found: int):
        self.t_lo = t_lo
        self.t_hi = t_hi
        self.expected = expected
        self.found = found
        super().__init__(
            f"Gram block ({t_lo:.9f}, {t_hi:.9f}] expected {expected} zeros, "
            f"found {found} sign changes at maximum subdivision depth"
        )


class ParseError(AhPairsError, ValueError):
    def __init__(self, line: int, text: str):
        self.line = line
        super().__init__(f"line {line}: cannot parse ordinate {text!r}")


class MonotonicityError(AhPairsError, ValueError):
    def __init__(self, line: int, value: float, previous: float):
        self.line = line
        super().__init__(
            f"line {line}: ordinate {value!r} is smaller than previous {previous!r}"
        )


class RangeBeyondCertified(AhPairsError, ValueError):
    """Requested height exceeds the certified completeness height of a ZeroSet."""

    def __init__(self, requested: float, t_max: float):
        self.requested = requested
        self.t_max = t_max
        super().__init__(
            f"requested height {requested!r} exceeds certified height t_max={t_max!r}"
        )


class InsufficientBins(AhPairsError, ValueError):
    pass


class ZeroKNotAllowed(AhPairsError, ValueError):
    pass


class InvalidSpec(AhPairsError, ValueError):
    pass


class Infeasible(AhPairsError, ValueError):
    pass
