"""Floating-point precision selection.

Everything defaults to complex128. The "extended" mode switches the core
evaluations to numpy's clongdouble, which is a cheap escape hatch when an
integer-snapping tolerance looks marginal. Values are cast back to complex128
at serialization boundaries.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

PRECISION_ENV = "VV_PRECISION"

_MODES = ("double", "extended")


@dataclass(frozen=True)
class Precision:
    mode: str = "double"

    def __post_init__(self):
        if self.mode not in _MODES:
            from .errors import ConfigError

            raise ConfigError(f"unknown precision mode {self.mode!r}; expected one of {_MODES}")

    @property
    def complex_dtype(self):
        return np.complex128 if self.mode == "double" else np.clongdouble

    @property
    def real_dtype(self):
        return np.float64 if self.mode == "double" else np.longdouble

    @property
    def pi(self):
        # np.pi is a double constant; recompute for the wide type.
        return np.arccos(self.real_dtype(-1.0))


def resolve_precision(mode: str | None = None) -> Precision:
    """Build a Precision, letting the VV_PRECISION environment variable win."""
    env = os.environ.get(PRECISION_ENV)
    if env:
        mode = env
    return Precision(mode or "double")


DOUBLE = Precision("double")
