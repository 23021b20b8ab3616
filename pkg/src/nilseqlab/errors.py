"""Shared exception types."""


class ConfigError(ValueError):
    """Invalid experiment configuration (bad schema, unknown field, bad value)."""


class BudgetError(RuntimeError):
    """A computation would exceed its configured cost budget."""


class AliasingError(BudgetError):
    """Quadrature grid too coarse for the frequencies arising in a query."""
