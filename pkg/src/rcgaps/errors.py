"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class CeilingError(LookupError):
    """A successor search ran past its ceiling without finding a member."""

    def __init__(self, bound, ceiling, index=None):
        self.bound = bound
        self.ceiling = ceiling
        self.index = index
        where = f" at index {index}" if index is not None else ""
        super().__init__(
            f"gap exceeds ceiling{where}: no member >= {bound} "
            f"within {ceiling} bits"
        )


class EnumerationCapError(RuntimeError):
    """Exhaustive enumeration would exceed the configured cap."""


class TableRangeError(IndexError):
    """A constant table is too short for the requested index or budget."""


class BitCapError(OverflowError):
    """An exact integer result would exceed the configured bit cap."""


class SpecError(ValueError):
    """Malformed input file or parameter string."""
