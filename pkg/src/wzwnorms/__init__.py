"""Modular data and conformal-block norms for the sl_n WZW models."""

__version__ = "0.1.0"

from .rootdata import DomainError, LevelContext, RootSystemA, Weight  # noqa: E402
