"""Translating solitons (Grim Reapers) in GRW spacetimes with type II/III warping."""
from ._accel import NUMBA_ENABLED
from .warping import (
    DomainError,
    WarpingFunction,
    check_warping_identity,
    eval_b,
    make_warping,
    soliton_constant,
)

__version__ = "0.1.0"

__all__ = [
    "NUMBA_ENABLED",
    "DomainError",
    "WarpingFunction",
    "check_warping_identity",
    "eval_b",
    "make_warping",
    "soliton_constant",
]
