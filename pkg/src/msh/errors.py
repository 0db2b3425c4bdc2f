"""Exceptions shared across the package."""


class ChainConditionError(ValueError):
    """Two consecutive maps do not compose to zero."""


class InapplicableError(ValueError):
    """The hypotheses of a lemma do not hold, so its identity is not checked."""
