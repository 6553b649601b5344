"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Raised for invalid run configurations (bad keys, out-of-range parameters,
    nonlinearity exponents for which the conformal method is inapplicable)."""
