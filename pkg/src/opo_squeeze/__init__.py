"""Models for cavity-enhanced frequency doubling and sub-threshold OPO squeezing."""

from .model import (
    CONSTANTS,
    DEFAULT_ANALYSIS_FREQUENCY,
    DEFAULT_DETECTION,
    DEFAULT_OPO,
    DEFAULT_SHG,
    AboveThresholdError,
    DetectionChain,
    DomainError,
    Fraction,
    ModelError,
    NumericalFailure,
    OpoParams,
    Power,
    ShgParams,
    db_from_linear,
    linear_from_db,
    validate,
)

__version__ = "0.1.0"
