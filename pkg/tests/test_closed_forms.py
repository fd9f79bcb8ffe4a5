import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from grw_reapers.closed_forms import (
    ClosedFormBeta,
    RangeError,
    beta_closed,
    beta_domain,
    beta_for_initial,
    c1_constant,
    invert_xi,
    lightlike,
    rhs_beta,
    xi_image,
    xi_integral,
    xi_quadrature,
)
from grw_reapers.integrator import IntegratorOptions, integrate
from grw_reapers.warping import DomainError, eval_b, make_warping

Q = math.pi / 4


# ---------------------------------------------------------------- light-like curves


@pytest.mark.parametrize("family,y0", [("II", Q), ("II", 0.2), ("III", -1.0), ("III", -30.0)])
@pytest.mark.parametrize("branch", [1, -1])
def test_lightlike_anchor(family, y0, branch):
    l = lightlike(make_warping(family, 1, 2), 0.7, y0, branch)
    assert l(0.7) == pytest.approx(y0, rel=1e-15)


def test_lightlike_domain_type_two(w2_12):
    l = lightlike(w2_12, 0.0, Q, "+")
    assert l.domain[1] == pytest.approx(math.log(2) / 4, rel=1e-15)
    assert l(0.1) == pytest.approx(math.asin(math.sqrt(0.5) * math.exp(0.2)), rel=1e-15)
    with pytest.raises(DomainError):
        l(0.2)
    assert lightlike(w2_12, 0.0, Q, -1).domain[0] == pytest.approx(-math.log(2) / 4)


def test_lightlike_type_three_limits(w3_12):
    l = lightlike(w3_12, 0.0, -1.0, 1)
    assert l.domain == (-math.inf, math.inf)
    assert l(1.0) == pytest.approx(math.asinh(math.sinh(-1.0) * math.exp(-2.0)), rel=1e-14)
    tail = np.asarray(l(np.array([5.0, 20.0, 200.0])))
    assert np.all(tail < 0) and np.all(np.diff(tail) > 0) and abs(tail[-1]) < 1e-100
    # stable far out on the other side, where sinh overflows
    far = l(-400.0)
    assert math.isfinite(far) and far == pytest.approx(-(800.0 + math.log(2 * math.sinh(1.0))), rel=1e-12)


@pytest.mark.parametrize("family,c,n,y0", [("II", 1, 2, Q), ("II", 2, 3, 0.1), ("III", 1, 2, -1.0), ("III", 0.5, 1, -4.0)])
@pytest.mark.parametrize("branch", [1, -1])
def test_lightlike_is_null(family, c, n, y0, branch):
    w = make_warping(family, c, n)
    l = lightlike(w, 0.0, y0, branch)
    lo, hi = l.domain
    s = np.linspace(max(lo, -3.0) + 1e-3, min(hi, 3.0) - 1e-3, 301)
    y = np.asarray(l(s))
    b = eval_b(w, y)
    # derivative by an independent centred difference
    h = 1e-6
    fd = (np.asarray(l(s + h)) - np.asarray(l(s - h))) / (2 * h)
    assert np.all(np.abs(fd**2 - b**2) <= 1e-6 * b**2)
    lp = np.asarray(l.derivative(s))
    assert np.all(np.abs(lp**2 - b**2) <= 1e-10 * b**2)


# ---------------------------------------------------------------- c1


@pytest.mark.parametrize(
    "y0,v0,expected",
    [(Q, 0.0, -2.0), (Q, 0.9, -0.38), (Q, 2.0, 6.0), (Q, 1.0, 0.0), (Q, -1.0, 0.0)],
)
def test_c1_examples(w2_11, y0, v0, expected):
    assert c1_constant(w2_11, y0, v0) == pytest.approx(expected, rel=1e-13, abs=1e-15)


@given(u=st.floats(0.05, 0.95), a=st.floats(0, 5), b=st.floats(0, 5), family=st.sampled_from(["II", "III"]))
def test_c1_increasing_in_speed(u, a, b, family):
    w = make_warping(family, 1.3, 2)
    y0 = u * w.interval[1] if family == "II" else -5 * u
    lo, hi = sorted((a, b))
    if hi - lo > 1e-6:
        assert c1_constant(w, y0, lo) < c1_constant(w, y0, hi)


# ---------------------------------------------------------------- beta


mp.mp.dps = 40


def _beta_mp(family, c, n, c1, branch, y):
    c, y, c1 = mp.mpf(c), mp.mpf(y), mp.mpf(c1)
    if family == "II":
        return branch / (mp.tan(c * y) * mp.sqrt((c * n) ** 2 + c1 * mp.sin(c * y) ** (2 * n)))
    return branch / (mp.tanh(c * y) * mp.sqrt((c * n) ** 2 + c1 * mp.sinh(c * y) ** (2 * n)))


BETA_CASES = [
    ("II", 1, 1, 0.0, 1),
    ("II", 1, 1, -0.38, 1),
    ("II", 1, 1, -2.0, -1),
    ("II", 1, 2, 3.0, 1),
    ("II", 2, 3, -30.0, -1),
    ("III", 1, 2, 1.0, 1),
    ("III", 1, 2, -0.5, -1),
    ("III", 0.5, 1, 2.0, -1),
]


@pytest.mark.parametrize("family,c,n,c1,branch", BETA_CASES)
def test_beta_against_mpmath_and_ode(family, c, n, c1, branch):
    w = make_warping(family, c, n)
    cf = ClosedFormBeta(w, c1, branch)
    dom = cf.domain
    lo = dom.lo if math.isfinite(dom.lo) else dom.hi - 6.0 / c
    hi = dom.hi if math.isfinite(dom.hi) else dom.lo + 6.0 / c
    for y in np.linspace(lo, hi, 41)[2:-2]:
        exact = _beta_mp(family, c, n, c1, branch, y)
        got = beta_closed(cf, float(y))
        assert got == pytest.approx(float(exact), rel=1e-12)
        # beta ODE: derivative of the closed form against the right-hand side
        slope = mp.diff(lambda z: _beta_mp(family, c, n, c1, branch, z), mp.mpf(y))
        assert rhs_beta(w, float(y), got) == pytest.approx(float(slope), rel=1e-9)
        assert got != 0.0


def test_beta_lightlike_is_inverse_derivative(w2_11):
    # c1 = 0: ds/dy of the inverse of l_+ is 1/(n c tan(c y))
    cf = ClosedFormBeta(w2_11, 0.0, 1)
    for y in (0.2, 0.7, 1.3):
        assert beta_closed(cf, y) == pytest.approx(1.0 / math.tan(y), rel=1e-14)


@pytest.mark.parametrize("c,n,branch,limit", [(1, 1, 1, 1.0), (1, 2, 1, 0.35355339059327376220), (2, 3, -1, -0.096225044864937627418)])
def test_beta_terminal_value(c, n, branch, limit):
    w = make_warping("II", c, n)
    cf = ClosedFormBeta(w, -((c * n) ** 2), branch)
    y = w.interval[1] * (1 - 1e-9)
    assert beta_closed(cf, y) == pytest.approx(limit, rel=1e-8)


def test_rhs_beta_examples(w2_11):
    assert rhs_beta(w2_11, Q, 1.0) == pytest.approx(-2.0, rel=1e-14)
    assert rhs_beta(w2_11, Q, 0.0) == 0.0


def test_beta_domain_examples(w2_11, w3_12):
    dom = beta_domain(ClosedFormBeta(w2_11, -2.0, 1))
    assert dom.root == pytest.approx(Q, abs=1e-15) and dom.hi == dom.root and dom.blows_up
    full = beta_domain(ClosedFormBeta(w2_11, -1.0, 1))
    assert (full.lo, full.hi, full.root) == (0.0, math.pi / 2, None)
    assert beta_domain(ClosedFormBeta(w3_12, 1.0, 1)).hi == 0.0
    assert beta_domain(ClosedFormBeta(w3_12, 1.0, 1)).lo == -math.inf
    low = beta_domain(ClosedFormBeta(w3_12, -0.5, 1))
    assert low.lo == low.root and math.sinh(low.root) ** 4 == pytest.approx(8.0, rel=1e-13)


def test_beta_outside_domain(w2_11):
    cf = ClosedFormBeta(w2_11, -2.0, 1)
    with pytest.raises(DomainError):
        beta_closed(cf, 1.0)


def test_branch_rejected(w2_11):
    with pytest.raises(ValueError):
        ClosedFormBeta(w2_11, 1.0, 0)


@given(family=st.sampled_from(["II", "III"]), u=st.floats(0.05, 0.95), r=st.floats(0.01, 4.0), sign=st.sampled_from([1, -1]))
def test_beta_for_initial_matches_velocity(family, u, r, sign):
    w = make_warping(family, 1.0, 2)
    y0 = u * math.pi / 2 if family == "II" else -4 * u
    v0 = sign * r * eval_b(w, y0)
    if abs(r - 1) < 1e-6:
        return
    cf = beta_for_initial(w, y0, v0)
    assert beta_closed(cf, y0) == pytest.approx(1.0 / v0, rel=1e-9)


# ---------------------------------------------------------------- xi


def test_xi_trivial(w2_11):
    cf = ClosedFormBeta(w2_11, -0.38, 1)
    assert xi_quadrature(cf, 1.5, 0.7, 0.7) == 1.5


@pytest.mark.parametrize(
    "family,c,n,y0,v0,endpoint,expected",
    [
        # mpmath quadratures of the beta formula
        ("II", 1, 1, Q, 2.0, math.pi / 2, 0.15162341372210203043),
        ("II", 1, 2, Q, 1.9, math.pi / 2, 0.19594688251644375340),
        ("III", 1, 2, -1.0, 3.0, -math.inf, -0.13991645308979991930),
    ],
)
def test_xi_convergent_endpoints(family, c, n, y0, v0, endpoint, expected):
    cf = beta_for_initial(make_warping(family, c, n), y0, v0)
    res = xi_integral(cf, y0, endpoint)
    assert res.converged
    assert res.value == pytest.approx(expected, abs=1e-11)


def test_xi_critical_point(w2_12):
    cf = beta_for_initial(w2_12, Q, 0.5)
    root = cf.domain.root
    assert root == pytest.approx(0.80179888375040015155, abs=1e-14)
    assert xi_quadrature(cf, 0.0, Q, root) == pytest.approx(0.063853202970748835400, abs=1e-11)


def test_xi_boundary_case(w2_12):
    cf = ClosedFormBeta(w2_12, -4.0, 1)
    # integrand reduces to 1/(2 sin z sqrt(1 + sin^2 z)); mpmath
    top = xi_integral(cf, Q, math.pi / 2)
    assert top.converged and top.value == pytest.approx(0.32923947423120417716, abs=1e-12)
    bottom = xi_integral(cf, Q, 0.0)
    assert not bottom.converged and bottom.value == -math.inf


@pytest.mark.parametrize("family,c1", [("II", 1.0), ("II", -0.5), ("III", 2.0), ("III", -1.0)])
def test_xi_diverges_toward_zero(family, c1):
    w = make_warping(family, 1, 2)
    cf = ClosedFormBeta(w, c1, 1)
    y0 = 0.5 if family == "II" else (cf.domain.root * 0.5 if cf.domain.root else -1.0)
    res = xi_integral(cf, y0, 0.0)
    assert not res.converged and math.isinf(res.value)


# ---------------------------------------------------------------- inversion


def test_invert_at_anchor(w2_11):
    cf = ClosedFormBeta(w2_11, -0.38, 1)
    assert invert_xi(cf, 0.0, Q, 0.0) == Q


def test_invert_range_error(w2_11):
    cf = beta_for_initial(w2_11, Q, 0.9)
    image = xi_image(cf, 0.0, Q)
    assert image[0] == -math.inf and math.isfinite(image[1])
    with pytest.raises(RangeError) as info:
        invert_xi(cf, 0.0, Q, image[1] + 0.1)
    assert info.value.image == image


@pytest.mark.parametrize(
    "family,c,n,y0,c1",
    [("II", 1, 1, Q, -0.38), ("III", 1, 2, -1.0, 1.0), ("II", 1, 2, 0.6, 2.0), ("III", 2, 1, -0.3, 0.5)],
)
def test_invert_matches_integrator(family, c, n, y0, c1):
    w = make_warping(family, c, n)
    # v0 > 0 with the prescribed c1
    b0 = eval_b(w, y0)
    g = math.sin(c * y0) if family == "II" else math.sinh(c * y0)
    v0 = b0 * math.sqrt(1 + c1 * g ** (2 * n) / (c * n) ** 2)
    cf = beta_for_initial(w, y0, v0)
    assert cf.c1 == pytest.approx(c1, rel=1e-12)
    curve = integrate(w, 0.0, y0, v0, IntegratorOptions(max_span=3.0))
    image = xi_image(cf, 0.0, y0)
    lo, hi = max(curve.span[0], image[0]), min(curve.span[1], image[1])
    grid = np.linspace(lo, hi, 40)[1:-1]
    grid = grid[np.abs(grid) < 2.0]
    numeric = curve.evaluate(grid)[0]
    closed = np.array([invert_xi(cf, 0.0, y0, float(s), image) for s in grid])
    assert np.max(np.abs(numeric - closed)) < 1e-6


def test_inverse_ode_residual(w2_11):
    # xi'' = xi' [(1/b^2 - xi'^2) d b - b'/b] on an inverted monotone stretch
    curve = integrate(w2_11, 0.0, 0.5, 0.9, IntegratorOptions(max_span=0.3), samples=3001)
    y, v = curve.y, curve.v
    xi1 = 1.0 / v
    xi2 = np.gradient(xi1, y, edge_order=2)
    rhs = np.array([rhs_beta(w2_11, a, b) for a, b in zip(y, xi1)])
    inner = slice(5, -5)
    assert np.max(np.abs(xi2[inner] - rhs[inner]) / np.maximum(1.0, np.abs(rhs[inner]))) < 1e-5


@given(family=st.sampled_from(["II", "III"]), c1=st.floats(-30, 30), branch=st.sampled_from([1, -1]))
def test_no_wing_like(family, c1, branch):
    w = make_warping(family, 1.0, 2)
    cf = ClosedFormBeta(w, c1, branch)
    dom = cf.domain
    lo = dom.lo if math.isfinite(dom.lo) else dom.hi - 5.0
    hi = dom.hi if math.isfinite(dom.hi) else dom.lo + 5.0
    ys = np.linspace(lo, hi, 50)[1:-1]
    vals = np.array([beta_closed(cf, float(y)) for y in ys])
    assert np.all(np.sign(vals) == np.sign(vals[0]))
    assert np.min(np.abs(vals)) > 0
