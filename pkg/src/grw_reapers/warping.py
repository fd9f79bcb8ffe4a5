"""Warping functions b(t) for which the soliton equation is time independent."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K

FAMILIES = ("I", "II", "III")
FAMILY_CODE = {"I": K.FAM_I, "II": K.FAM_II, "III": K.FAM_III}

# Relative guard against landing on the finite singular endpoint pi/(2c).
ENDPOINT_GUARD = 1e-12


class DomainError(ValueError):
    """A point lies outside the open interval of a warping function.

    ``bound`` is the violated endpoint (``math.inf``/``-math.inf`` allowed).
    """

    def __init__(self, message, value=None, bound=None):
        super().__init__(message)
        self.value = value
        self.bound = bound


@dataclass(frozen=True)
class WarpingFunction:
    """One of the three warping families with scale ``c`` and fibre dimension ``n``.

    Family I is constant ``c`` on the real line, family II is
    ``n c tan(c t)`` on ``(0, pi/(2c))`` and family III is ``-n c tanh(c t)``
    on ``(-inf, 0)``.
    """

    family: str
    c: float
    n: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown warping family {self.family!r}; expected one of {FAMILIES}")
        if not (isinstance(self.c, (int, float)) and math.isfinite(self.c) and self.c > 0):
            raise ValueError(f"c must be a positive finite real, got {self.c!r}")
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "c", float(self.c))
        object.__setattr__(self, "n", int(self.n))

    @property
    def code(self) -> int:
        return FAMILY_CODE[self.family]

    @property
    def interval(self) -> tuple[float, float]:
        if self.family == "II":
            return (0.0, math.pi / (2.0 * self.c))
        if self.family == "III":
            return (-math.inf, 0.0)
        return (-math.inf, math.inf)

    @property
    def d(self) -> float:
        return soliton_constant(self)

    @property
    def scale(self) -> float:
        """Characteristic length of the interval: pi/(2c) for II, 1/c otherwise."""
        if self.family == "II":
            return math.pi / (2.0 * self.c)
        return 1.0 / self.c

    def contains(self, t: float) -> bool:
        try:
            check_inside(self, t)
        except DomainError:
            return False
        return True

    def b(self, t, order: int = 0):
        return eval_b(self, t, order)


def make_warping(family: str, c: float, n: int) -> WarpingFunction:
    return WarpingFunction(family, c, n)


def check_inside(w: WarpingFunction, t: float) -> None:
    lo, hi = w.interval
    if not math.isfinite(t):
        bound = hi if t > 0 else lo
        raise DomainError(f"t={t!r} is not a finite point of {w.family} interval", t, bound)
    if t <= lo:
        raise DomainError(f"t={t!r} lies at or below the lower endpoint {lo!r}", t, lo)
    if t >= hi:
        raise DomainError(f"t={t!r} lies at or above the upper endpoint {hi!r}", t, hi)
    if w.family == "II" and t >= hi * (1.0 - ENDPOINT_GUARD):
        raise DomainError(f"t={t!r} is within the guard margin of the upper endpoint {hi!r}", t, hi)


def eval_b(w: WarpingFunction, t, order: int = 0):
    """b, b' or b'' at ``t`` from the analytic formulas.

    ``t`` may be a scalar or an array; every entry must lie inside the
    interval.
    """
    if order not in (0, 1, 2):
        raise ValueError(f"order must be 0, 1 or 2, got {order!r}")
    func = (K.warp_b, K.warp_db, K.warp_ddb)[order]
    if np.ndim(t) == 0:
        t = float(t)
        check_inside(w, t)
        return func(w.code, w.c, w.n, t)
    arr = np.asarray(t, dtype=float)
    for x in arr.ravel():
        check_inside(w, float(x))
    return _vectorised(w, arr, order)


def _vectorised(w: WarpingFunction, t: np.ndarray, order: int) -> np.ndarray:
    c, n = w.c, w.n
    if w.family == "I":
        return np.full_like(t, c if order == 0 else 0.0)
    if w.family == "II":
        if order == 0:
            return n * c * np.tan(c * t)
        sec2 = 1.0 / np.cos(c * t) ** 2
        if order == 1:
            return n * c**2 * sec2
        return 2.0 * n * c**3 * sec2 * np.tan(c * t)
    if order == 0:
        return -n * c * np.tanh(c * t)
    sech2 = 1.0 / np.cosh(c * t) ** 2
    if order == 1:
        return -n * c**2 * sech2
    return 2.0 * n * c**3 * sech2 * np.tanh(c * t)


def soliton_constant(w: WarpingFunction) -> float:
    """The constant value of b^2 - n b' for the family."""
    return K.warp_d(w.code, w.c, w.n)


def sample_interior(w: WarpingFunction, count: int, rel_margin: float = 1e-2) -> np.ndarray:
    """``count`` points on a compact sub-interval avoiding the endpoints."""
    if w.family == "II":
        top = math.pi / (2.0 * w.c)
        return np.linspace(rel_margin * top, (1.0 - rel_margin) * top, count)
    if w.family == "III":
        return np.linspace(-5.0 / w.c, -rel_margin / w.c, count)
    return np.linspace(-1.0 / w.c, 1.0 / w.c, count)


def check_warping_identity(w: WarpingFunction, sample_count: int) -> float:
    """Maximum of |2 b b' - n b''| over ``sample_count`` interior points."""
    if sample_count < 2:
        raise ValueError("sample_count must be at least 2")
    t = sample_interior(w, sample_count)
    b0 = _vectorised(w, t, 0)
    b1 = _vectorised(w, t, 1)
    b2 = _vectorised(w, t, 2)
    return float(np.max(np.abs(2.0 * b0 * b1 - w.n * b2)))
