"""Adaptive futures hedging horizons from empirical mode decomposition, with
combinatorial time-series cross-validation of hedging performance."""

__version__ = "0.1.0"

from . import analysis, cpcv, emd, estimators, methods, performance, series, synth  # noqa: F401
from .errors import (  # noqa: F401
    DataError,
    DegenerateInputError,
    EmdHedgeError,
    InsufficientDataError,
    NumericError,
    SingularDesignError,
)
