"""Closed-form solutions: light-like curves, the beta branches of the inverse
ODE, the conserved constant c1, and the quadrature xi(y) = s0 + int beta.

These serve as an oracle for :mod:`grw_reapers.integrator`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import integrate as _quad
from scipy import optimize

from .warping import DomainError, WarpingFunction, check_inside, eval_b

LN2 = math.log(2.0)

# Improper-integral decision rule.
MAX_PANELS = 60
DIVERGENCE_CAP = 1e12
PANEL_RTOL = 1e-15
QUAD_RTOL = 1e-13
ROOT_ZONE = 0.25


def _require_reaper_family(w: WarpingFunction) -> None:
    if w.family not in ("II", "III"):
        raise ValueError(f"closed forms exist only for families II and III, not {w.family}")


def _sign(branch) -> int:
    if branch in (1, "+", "+1"):
        return 1
    if branch in (-1, "-", "-1"):
        return -1
    raise ValueError(f"branch must be +1 or -1, got {branch!r}")


def _log_abs_sinh(x: float) -> float:
    ax = abs(x)
    if ax < 20.0:
        return math.log(math.sinh(ax))
    return ax + math.log1p(-math.exp(-2.0 * ax)) - LN2


# --------------------------------------------------------------------------
# light-like curves


@dataclass(frozen=True)
class LightlikeCurve:
    """Null solution through (s0, y0); ``domain`` is its maximal s-interval."""

    warping: WarpingFunction
    s0: float
    y0: float
    branch: int

    @property
    def domain(self) -> tuple[float, float]:
        w = self.warping
        if w.family == "III":
            return (-math.inf, math.inf)
        reach = -math.log(math.sin(w.c * self.y0)) / (w.n * w.c**2)
        if self.branch > 0:
            return (-math.inf, self.s0 + reach)
        return (self.s0 - reach, math.inf)

    def __call__(self, s):
        w = self.warping
        c, n = w.c, w.n
        s = np.asarray(s, dtype=float)
        lo, hi = self.domain
        if np.any(s <= lo) or np.any(s >= hi):
            raise DomainError(f"s outside light-like domain ({lo}, {hi})", None, hi if np.any(s >= hi) else lo)
        if w.family == "II":
            z = math.sin(c * self.y0) * np.exp(self.branch * n * c**2 * (s - self.s0))
            out = np.arcsin(z) / c
        else:
            # |sinh(c l)| = exp(u); large u goes through the logarithm directly
            u = _log_abs_sinh(c * self.y0) - self.branch * n * c**2 * (s - self.s0)
            with np.errstate(over="ignore"):
                small = -np.arcsinh(np.exp(np.minimum(u, 20.0))) / c
            large = -(u + LN2 + 0.25 * np.exp(-2.0 * np.maximum(u, 20.0))) / c
            out = np.where(u > 20.0, large, small)
        return out if out.ndim else float(out)

    def derivative(self, s):
        y = self(s)
        return self.branch * eval_b(self.warping, y, 0)


def lightlike(w: WarpingFunction, s0: float, y0: float, branch) -> LightlikeCurve:
    _require_reaper_family(w)
    check_inside(w, y0)
    return LightlikeCurve(w, float(s0), float(y0), _sign(branch))


# --------------------------------------------------------------------------
# c1 and beta


def _sin_pow(w: WarpingFunction, y: float) -> float:
    """sin^(2n)(c y) for II, sinh^(2n)(c y) for III (may overflow to inf)."""
    if w.family == "II":
        return math.sin(w.c * y) ** (2 * w.n)
    try:
        return math.sinh(w.c * y) ** (2 * w.n)
    except OverflowError:
        return math.inf


def c1_constant(w: WarpingFunction, y0: float, v0: float) -> float:
    """Conserved constant: positive time-like, negative space-like, zero null."""
    _require_reaper_family(w)
    b = eval_b(w, y0, 0)
    indicator = 1.0 - (v0 / b) ** 2
    sp = _sin_pow(w, y0)
    if math.isinf(sp):
        return -0.0 * indicator
    return -indicator * (w.c * w.n) ** 2 / sp


@dataclass(frozen=True)
class BetaDomain:
    lo: float
    hi: float
    root: float | None  # radicand zero, i.e. the y-value of the critical point

    @property
    def blows_up(self) -> bool:
        return self.root is not None

    def contains(self, y: float) -> bool:
        return self.lo < y < self.hi


@dataclass(frozen=True)
class ClosedFormBeta:
    """beta_+- for a given c1; ``branch`` is the sign in front of the formula.

    For family III the tanh factor is negative, so ``branch=+1`` gives a
    negative beta.  Use :func:`beta_for_initial` to pick the branch matching
    a velocity.
    """

    warping: WarpingFunction
    c1: float
    branch: int

    def __post_init__(self):
        _require_reaper_family(self.warping)
        object.__setattr__(self, "branch", _sign(self.branch))
        object.__setattr__(self, "c1", float(self.c1))

    @cached_property
    def domain(self) -> BetaDomain:
        return beta_domain(self)

    def radicand(self, y: float) -> float:
        w = self.warping
        cn2 = (w.c * w.n) ** 2
        if w.family == "II":
            x = w.c * y
            sn, cs = math.sin(x), math.cos(x)
            if sn * sn <= 0.5:
                return cn2 + self.c1 * sn ** (2 * w.n)
            # near pi/(2c): 1 - sin^(2n) from the cosine keeps the digits
            one_minus = -math.expm1(w.n * math.log1p(-cs * cs))
            return cn2 * one_minus + (self.c1 + cn2) * (1.0 - one_minus)
        if self.c1 == 0.0:
            return cn2
        return cn2 + self.c1 * _sin_pow(w, y)

    def _root_relative_radicand(self, y: float, dy: float) -> float:
        # radicand at y = root + dy, written as cn2 * (1 - (g(y)/g(root))^(2n))
        w = self.warping
        c = w.c
        root = self.domain.root
        cn2 = (c * w.n) ** 2
        if w.family == "II":
            ratio_m1 = 2.0 * math.cos(c * (y + root) / 2.0) * math.sin(c * dy / 2.0) / math.sin(c * root)
        else:
            ratio_m1 = 2.0 * math.cosh(c * (y + root) / 2.0) * math.sinh(c * dy / 2.0) / math.sinh(c * root)
        return -cn2 * math.expm1(2 * w.n * math.log1p(ratio_m1))

    def _value(self, y: float, rad: float) -> float:
        w = self.warping
        trig = math.tan(w.c * y) if w.family == "II" else math.tanh(w.c * y)
        return self.branch / (trig * math.sqrt(rad))

    def __call__(self, y: float) -> float:
        return beta_closed(self, y)


def beta_closed(cf: ClosedFormBeta, y: float) -> float:
    dom = cf.domain
    if not dom.contains(y):
        bound = dom.hi if y >= dom.hi else dom.lo
        raise DomainError(f"y={y!r} outside beta domain ({dom.lo}, {dom.hi})", y, bound)
    rad = cf.radicand(y)
    if not rad > 0:
        raise DomainError(f"radicand vanishes at y={y!r}", y, dom.root)
    return cf._value(y, rad)


def beta_for_initial(w: WarpingFunction, y0: float, v0: float) -> ClosedFormBeta:
    """The beta branch with beta(y0) = 1/v0."""
    if v0 == 0.0:
        raise ValueError("v0 = 0 is a critical point; beta is singular there")
    sign = 1 if v0 > 0 else -1
    if w.family == "III":
        sign = -sign
    return ClosedFormBeta(w, c1_constant(w, y0, v0), sign)


def rhs_beta(w: WarpingFunction, y: float, beta: float) -> float:
    """Right side of beta' = beta [(1/b^2 - beta^2) d b - b'/b]."""
    b = eval_b(w, y, 0)
    bp = eval_b(w, y, 1)
    return beta * ((1.0 / b**2 - beta**2) * w.d * b - bp / b)


def beta_domain(cf: ClosedFormBeta) -> BetaDomain:
    w = cf.warping
    lo, hi = w.interval
    cn2 = (w.c * w.n) ** 2
    if w.family == "II" and cf.c1 < -cn2:
        root = optimize.brentq(cf.radicand, 0.0 + 1e-300, hi, xtol=1e-16, rtol=4 * np.finfo(float).eps, maxiter=500)
        return BetaDomain(lo, root, root)
    if w.family == "III" and cf.c1 < 0.0:
        a = -1.0 / w.c
        while cf.radicand(a) > 0:
            a *= 2.0
        root = optimize.brentq(cf.radicand, a, -1e-300, xtol=1e-16, rtol=4 * np.finfo(float).eps, maxiter=500)
        return BetaDomain(root, hi, root)
    return BetaDomain(lo, hi, None)


# --------------------------------------------------------------------------
# xi = s0 + int beta


def _integrand_u(cf: ClosedFormBeta):
    # z = root - sigma u^2 maps u >= 0 onto the domain; dz = -2 sigma u du
    dom = cf.domain
    root = dom.root
    sigma = 1.0 if dom.hi == root else -1.0

    def g(u: float) -> float:
        if u == 0.0:
            return _u_limit(cf, sigma)
        dy = -sigma * u * u
        y = root + dy
        rad = cf._root_relative_radicand(y, dy)
        return -2.0 * sigma * u * cf._value(y, rad)

    def to_u(y: float) -> float:
        return math.sqrt(max(sigma * (root - y), 0.0))

    return g, to_u


def _u_limit(cf: ClosedFormBeta, sigma: float) -> float:
    # limit of -2 sigma u beta(root - sigma u^2) as u -> 0
    w = cf.warping
    c, n = w.c, w.n
    root = cf.domain.root
    cn2 = (c * n) ** 2
    if w.family == "II":
        dlog = c / math.tan(c * root)
        trig = math.tan(c * root)
    else:
        dlog = c / math.tanh(c * root)
        trig = math.tanh(c * root)
    # radicand ~ -cn2 * 2n * dlog * dy, dy = -sigma u^2
    slope = cn2 * 2 * n * dlog * sigma
    return -2.0 * sigma * cf.branch / (trig * math.sqrt(slope))


def _segment(cf: ClosedFormBeta, a: float, b: float) -> tuple[float, float]:
    """int_a^b beta and an error estimate, for a, b inside the closed domain."""
    if a == b:
        return 0.0, 0.0
    root = cf.domain.root
    if root is None:
        return _direct(cf, a, b)
    # the u-substitution only near the root: far from it y = root -+ u^2 loses digits
    reach = ROOT_ZONE * abs(root)
    split = root - reach if cf.domain.hi == root else root + reach
    if (a - split) * (b - split) < 0:
        v1, e1 = _segment(cf, a, split)
        v2, e2 = _segment(cf, split, b)
        return v1 + v2, e1 + e2
    if abs(0.5 * (a + b) - root) <= reach:
        g, to_u = _integrand_u(cf)
        return _quad.quad(g, to_u(a), to_u(b), epsabs=0.0, epsrel=QUAD_RTOL, limit=200)
    return _direct(cf, a, b)


def _direct(cf: ClosedFormBeta, a: float, b: float) -> tuple[float, float]:
    return _quad.quad(lambda z: cf._value(z, cf.radicand(z)), a, b, epsabs=0.0, epsrel=QUAD_RTOL, limit=200)


@dataclass(frozen=True)
class XiResult:
    value: float  # may be +-inf
    error: float
    converged: bool


def _improper(cf: ClosedFormBeta, y0: float, endpoint: float) -> XiResult:
    """int_{y0}^{endpoint} beta over geometric panels; divergence is reported as +-inf."""
    w = cf.warping
    total = 0.0
    err_total = 0.0
    small = 0
    a = y0
    length = 1.0 / (w.n * w.c)
    for k in range(MAX_PANELS):
        if math.isinf(endpoint):
            b = y0 - length * (2.0 ** (k + 1) - 1.0)
        else:
            b = endpoint - (endpoint - y0) * 2.0 ** (-(k + 1))
        piece, err = _segment(cf, a, b)
        total += piece
        err_total += err
        if abs(total) > DIVERGENCE_CAP:
            break
        if abs(piece) <= PANEL_RTOL * max(abs(total), 1e-300):
            small += 1
            if small >= 3:
                return XiResult(total, err_total + abs(piece), True)
        else:
            small = 0
        a = b
    return XiResult(math.copysign(math.inf, total), math.inf, False)


def xi_integral(cf: ClosedFormBeta, y0: float, y: float) -> XiResult:
    """int_{y0}^{y} beta, where y may be an endpoint of the domain."""
    dom = cf.domain
    if not (dom.lo < y0 < dom.hi or y0 == dom.root):
        raise DomainError(f"anchor y0={y0!r} outside beta domain", y0, dom.hi if y0 >= dom.hi else dom.lo)
    if y == y0:
        return XiResult(0.0, 0.0, True)
    if dom.lo < y < dom.hi or y == dom.root:
        val, err = _segment(cf, y0, y)
        return XiResult(val, err, True)
    if y == dom.lo or y == dom.hi:
        return _improper(cf, y0, y)
    raise DomainError(f"y={y!r} outside beta domain ({dom.lo}, {dom.hi})", y, dom.hi if y > dom.hi else dom.lo)


def xi_quadrature(cf: ClosedFormBeta, s0: float, y0: float, y: float) -> float:
    """xi(y) = s0 + int_{y0}^{y} beta; divergent endpoint integrals give +-inf."""
    return s0 + xi_integral(cf, y0, y).value


class RangeError(ValueError):
    """s lies outside the image of xi; ``image`` holds that open interval."""

    def __init__(self, message, image):
        super().__init__(message)
        self.image = image


def xi_image(cf: ClosedFormBeta, s0: float, y0: float) -> tuple[float, float]:
    dom = cf.domain
    ends = (s0 + xi_integral(cf, y0, dom.lo).value, s0 + xi_integral(cf, y0, dom.hi).value)
    return (min(ends), max(ends))


def invert_xi(cf: ClosedFormBeta, s0: float, y0: float, s: float, image=None) -> float:
    """The unique y with xi(y) = s, by safeguarded Newton on the monotone xi."""
    if s == s0:
        return float(y0)
    dom = cf.domain
    image = image or xi_image(cf, s0, y0)
    if not image[0] < s < image[1]:
        raise RangeError(f"s={s!r} outside the image {image} of xi", image)
    increasing = (cf.branch > 0) == (cf.warping.family == "II")

    def resid(y):
        return s0 + _segment(cf, y0, y)[0] - s

    # bracket [a, b] in y with resid(a) < 0 < resid(b) when xi is increasing
    lo, hi = dom.lo, dom.hi
    if math.isinf(lo):
        step = 1.0 / (cf.warping.n * cf.warping.c)
        lo = min(y0, hi) - step
        while (resid(lo) > 0) == increasing:
            step *= 2.0
            lo = y0 - step
    target_low_side = (s < s0) == increasing
    if target_low_side:
        a, b = lo, y0
    else:
        a, b = y0, hi
    y = 0.5 * (a + b) if not (dom.lo < y0 < dom.hi) else y0
    for _ in range(200):
        r = resid(y)
        if r == 0.0:
            return y
        if (r < 0) == increasing:
            a = y
        else:
            b = y
        try:
            slope = beta_closed(cf, y)
            y_new = y - r / slope
        except (DomainError, ZeroDivisionError):
            y_new = math.nan
        if not (min(a, b) < y_new < max(a, b)):
            y_new = 0.5 * (a + b)
        if abs(y_new - y) <= 4e-16 * max(1.0, abs(y)):
            return y_new
        y = y_new
    return y
