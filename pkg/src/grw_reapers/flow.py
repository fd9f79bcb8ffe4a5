"""Flow of the conformal Killing field X = b(t) d/dt and transport of curves."""
from __future__ import annotations

import math
from dataclasses import replace

import numpy as np

from . import _kernels as K
from .closed_forms import c1_constant
from .integrator import SolutionCurve
from .warping import DomainError, WarpingFunction, check_inside, eval_b

FLOW_RTOL = 1e-12
FLOW_ATOL = 1e-12
FLOW_MARGIN = 1e-12


class FlowEscapeError(DomainError):
    """The flow reached the endpoint margin of the interval before time t."""


def flow_A(w: WarpingFunction, s: float, t: float) -> float:
    """A(s, t) with dA/dt = b(A), A(s, 0) = s."""
    check_inside(w, s)
    if t == 0.0:
        return float(s)
    if w.family == "I":
        return float(s + w.c * t)
    a, escaped = K.flow_scalar(w.code, w.c, float(w.n), float(s), float(t), FLOW_RTOL, FLOW_ATOL, FLOW_MARGIN)
    if escaped:
        lo, hi = w.interval
        bound = hi if t > 0 else lo
        raise FlowEscapeError(f"flow from s={s!r} leaves the interval before t={t!r}", a, bound)
    return float(a)


def flow_many(w: WarpingFunction, s_values, t: float) -> np.ndarray:
    """Vectorised :func:`flow_A` over an array of starting points."""
    s_values = np.ascontiguousarray(s_values, dtype=float)
    if t == 0.0:
        return s_values.copy()
    if w.family == "I":
        return s_values + w.c * t
    for s in s_values:
        check_inside(w, float(s))
    out = np.empty_like(s_values)
    bad = K.flow_many(w.code, w.c, float(w.n), s_values, float(t), FLOW_RTOL, FLOW_ATOL, FLOW_MARGIN, out)
    if bad >= 0:
        lo, hi = w.interval
        raise FlowEscapeError(
            f"flow from s={s_values[bad]!r} leaves the interval before t={t!r}",
            out[bad],
            hi if t > 0 else lo,
        )
    return out


def flow_ds(w: WarpingFunction, s: float, t: float) -> float:
    """dA/ds (s, t) = b(A(s, t)) / b(s)."""
    if t == 0.0 or w.family == "I":
        check_inside(w, s)
        return 1.0
    a = flow_A(w, s, t)
    return eval_b(w, a, 0) / eval_b(w, s, 0)


def transport_solution(w: WarpingFunction, curve: SolutionCurve, t: float) -> SolutionCurve:
    """The curve f_t(s) = A(f(s), t) on the same s-grid, with f_t' = b(f_t)/b(f) f'."""
    if t == 0.0:
        return replace(curve, transported=True)
    y_t = flow_many(w, curve.y, t)
    if w.family == "I":
        v_t = np.array(curve.v, dtype=float)
    else:
        v_t = eval_b(w, y_t, 0) / eval_b(w, np.asarray(curve.y), 0) * curve.v
    y0_t = flow_A(w, curve.y0, t)
    v0_t = float(eval_b(w, y0_t, 0) / eval_b(w, curve.y0, 0) * curve.v0)
    return SolutionCurve(
        warping=curve.warping,
        s=curve.s,
        y=y_t,
        v=v_t,
        left_termination=curve.left_termination,
        right_termination=curve.right_termination,
        c1=c1_constant(w, y0_t, v0_t) if w.family != "I" else math.nan,
        s0=curve.s0,
        y0=y0_t,
        v0=v0_t,
        critical_points=(),
        transported=True,
    )
