"""Lassoed principal components scoring for high-dimensional data."""

from ._core import (
    DataError,
    NumericalError,
    UsageError,
    camp_demo,
    camp_transform,
    fdr,
    lpc,
    main,
    scores,
    simulate,
    tune,
)

__all__ = [
    "DataError",
    "NumericalError",
    "UsageError",
    "camp_demo",
    "camp_transform",
    "fdr",
    "lpc",
    "main",
    "scores",
    "simulate",
    "tune",
]
__version__ = "0.1.0"
