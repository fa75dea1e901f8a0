"""Achievable rates and bounds for Gaussian broadcast relay channels."""

from .core import (
    BrcError,
    CodingParams,
    DomainError,
    GaussianBrcParams,
    InfeasibleParameterError,
    NumericError,
    RatePoint2D,
    RateRegion,
    RateTriple,
    StrategyKind,
    cap,
    path_loss,
)

__version__ = "0.1.0"

__all__ = [
    "BrcError",
    "CodingParams",
    "DomainError",
    "GaussianBrcParams",
    "InfeasibleParameterError",
    "NumericError",
    "RatePoint2D",
    "RateRegion",
    "RateTriple",
    "StrategyKind",
    "cap",
    "path_loss",
]
