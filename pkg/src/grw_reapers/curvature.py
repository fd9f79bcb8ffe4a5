"""Curvature of the warped spacetime b(t)^2 g_N - dt^2 and the null convergence check."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .warping import WarpingFunction, check_inside, eval_b, sample_interior

BIG_BANG_LEVEL = 1e6
ROOT_XTOL = 1e-15


def _derivs(w: WarpingFunction, t: float) -> tuple[float, float, float]:
    check_inside(w, t)
    return eval_b(w, t, 0), eval_b(w, t, 1), eval_b(w, t, 2)


def pair_coefficient(n: int, mode: str = "binomial") -> float:
    """Weight of the b'^2/b^2 term: C(n, 2) by default, n(n-1) in ``ordered`` mode."""
    if mode == "binomial":
        return n * (n - 1) / 2.0
    if mode == "ordered":
        return float(n * (n - 1))
    raise ValueError(f"unknown coefficient mode {mode!r}; expected 'binomial' or 'ordered'")


def scalar_curvature(w: WarpingFunction, t: float, sc_fibre: float = 0.0, mode: str = "binomial") -> float:
    b, db, ddb = _derivs(w, t)
    return sc_fibre / b**2 + pair_coefficient(w.n, mode) * (db / b) ** 2 + w.n * ddb / b


def sectional_pair(w: WarpingFunction, t: float, k_fibre: float = 0.0) -> float:
    """Sectional curvature of a plane spanned by two fibre directions."""
    b, db, _ = _derivs(w, t)
    return k_fibre / b**2 + (db / b) ** 2


def sectional_mixed(w: WarpingFunction, t: float) -> float:
    """Sectional curvature of a plane containing d/dt: b''/b."""
    b, _, ddb = _derivs(w, t)
    return ddb / b


def null_ricci_offset(w: WarpingFunction, t: float) -> float:
    """(n-1) b^-2 (b'^2 - b b''), from the derivatives of b."""
    b, db, ddb = _derivs(w, t)
    return (w.n - 1) * (db * db - b * ddb) / (b * b)


def null_ricci_offset_closed(w: WarpingFunction, t: float) -> float:
    """Same quantity in trigonometric / hyperbolic form."""
    check_inside(w, t)
    c, n = w.c, w.n
    if w.family == "I":
        return 0.0
    if w.family == "II":
        return 4.0 * c * c * (n - 1) * math.cos(2 * c * t) / math.sin(2 * c * t) ** 2
    return 4.0 * c * c * (n - 1) * math.cosh(2 * c * t) / math.sinh(2 * c * t) ** 2


def null_ricci(w: WarpingFunction, t: float, ric_fibre: float = 0.0, check: bool = True) -> float:
    """Ric(U, U) for a unit-normalised null U, up to the fibre term ``ric_fibre``.

    With ``check`` the derivative form is compared against the closed form; the
    tolerance is relative to the size of b'^2 b^-2 since the derivative form
    loses digits to cancellation near the sign change of family II.
    """
    raw = null_ricci_offset(w, t)
    if check:
        closed = null_ricci_offset_closed(w, t)
        b, db, _ = _derivs(w, t)
        scale = max(abs(closed), (w.n - 1) * (db / b) ** 2, 1e-300)
        if abs(raw - closed) > 1e-12 * scale:
            raise ArithmeticError(f"null Ricci forms disagree at t={t!r}: {raw!r} vs {closed!r}")
    return ric_fibre + raw


@dataclass(frozen=True)
class CurvatureSample:
    t: float
    scalar: float
    mixed_sectional: float
    fiber_pair_sectional_offset: float
    null_ricci_offset: float


def curvature_sample(w: WarpingFunction, t: float, sc_fibre: float = 0.0, mode: str = "binomial") -> CurvatureSample:
    b, db, ddb = _derivs(w, t)
    return CurvatureSample(
        t=float(t),
        scalar=scalar_curvature(w, t, sc_fibre, mode),
        mixed_sectional=ddb / b,
        fiber_pair_sectional_offset=(db / b) ** 2,
        null_ricci_offset=null_ricci_offset(w, t),
    )


def ncc_grid(w: WarpingFunction, sample_count: int) -> np.ndarray:
    if sample_count < 2:
        raise ValueError(f"sample_count must be at least 2, got {sample_count}")
    return sample_interior(w, sample_count)


@dataclass(frozen=True)
class NCCVerdict:
    holds: bool
    first_t: float | None
    min_value: float
    sample_count: int

    @property
    def verdict(self) -> str:
        return "holds" if self.holds else "violated"

    def to_dict(self) -> dict:
        out = {"verdict": self.verdict, "min_value": self.min_value, "samples": self.sample_count}
        if self.first_t is not None:
            out["first_t"] = self.first_t
        return out


def ncc_verdict(w: WarpingFunction, ric_fibre_lower_bound: float = 0.0, sample_count: int = 100) -> NCCVerdict:
    """Sample Ric(U, U) over the interior, in increasing t."""
    ts = ncc_grid(w, sample_count)
    values = np.array([null_ricci(w, float(t), ric_fibre_lower_bound) for t in ts])
    bad = np.flatnonzero(values < 0.0)
    first = float(ts[bad[0]]) if bad.size else None
    return NCCVerdict(bad.size == 0, first, float(values.min()), int(sample_count))


def null_ricci_root(w: WarpingFunction) -> float:
    """Sign change of the family II offset, located by bisection."""
    if w.family != "II" or w.n < 2:
        raise ValueError("the offset changes sign only for family II with n >= 2")
    hi = math.pi / (2.0 * w.c)
    return bisect(lambda t: null_ricci_offset(w, t), 0.1 * hi, 0.9 * hi, xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps)


def big_bang_threshold(w: WarpingFunction, level: float = BIG_BANG_LEVEL, sc_fibre: float = 0.0) -> float:
    """t such that the scalar curvature exceeds ``level`` on (0, t)."""
    if w.family != "II" or w.n < 2:
        raise ValueError("the big-bang divergence needs family II with n >= 2")
    hi = math.pi / (4.0 * w.c)
    lo = hi
    while scalar_curvature(w, lo, sc_fibre) <= level:
        lo *= 0.5
        if lo < 1e-300:
            raise ArithmeticError("no threshold found above the smallest normal float")
    return bisect(lambda t: scalar_curvature(w, t, sc_fibre) - level, lo, hi, xtol=ROOT_XTOL)
