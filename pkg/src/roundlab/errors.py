"""Exception types shared across the package."""


class BudgetExceeded(RuntimeError):
    """A strategy asked for more rounds or queries than its budget allows."""


class QueryShapeViolation(RuntimeError):
    """A tail-adaptive strategy made more than one query in a tail round."""


class CapExceeded(ValueError):
    """An enumeration or materialization would exceed its configured cap."""


class EnumerationCapExceeded(CapExceeded):
    pass


class SizeCapExceeded(CapExceeded):
    pass


class DimensionMismatch(ValueError):
    pass


class IndexOutOfRange(IndexError):
    pass


class NonPrimeModulus(ValueError):
    pass


class PoolExhausted(RuntimeError):
    """The answer simulator ran out of unused vertex labels."""


class PromiseViolation(ValueError):
    pass
