"""Exception types shared across the package."""


class DnlrlError(Exception):
    """Base class for package errors."""


class DimensionMismatchError(DnlrlError, ValueError):
    """Operand shapes or lengths do not line up."""


class ConfigurationError(DnlrlError, ValueError):
    """Invalid configuration; carries every violation found."""

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class SchemaMismatchError(DnlrlError, ValueError):
    """A checkpoint was produced under a different feature schema."""


class NumericError(DnlrlError, FloatingPointError):
    """A numeric invariant (finiteness) was violated."""
