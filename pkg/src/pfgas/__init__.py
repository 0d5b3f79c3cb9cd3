"""Numerics for a symplectic planar point process living on a thin annulus."""

from .errors import (DataError, DomainError, NumericError, ParameterError, PfgasError,
                     PrecisionError, RegionError, ShapeError, ValidationError)
from .model import ModelParams, make_params

__all__ = [
    "DataError", "DomainError", "ModelParams", "NumericError", "ParameterError", "PfgasError",
    "PrecisionError", "RegionError", "ShapeError", "ValidationError", "make_params",
]
