import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from grw_reapers.classifier import (
    BlowUp,
    SolitonClass,
    _label,
    beta_terminal_limit,
    classify,
    confirm_numerically,
    lightlike_tolerance,
    vertical,
)
from grw_reapers.closed_forms import c1_constant
from grw_reapers.flow import flow_A
from grw_reapers.warping import eval_b, make_warping

Q = math.pi / 4
RATIOS = [-1.5, -0.5, 0.0, 0.9, 3.0]
GRIDS = {
    ("II", 1, 2): [0.2, 0.5, Q, 1.1, 1.4],
    ("III", 1, 2): [-0.3, -0.8, -1.5, -2.5, -4.0],
}


def test_type_two_time_like_example(w2_11):
    rep = classify(w2_11, 0.0, Q, 2.0)
    assert rep.c1 == pytest.approx(6.0, rel=1e-14)
    assert rep.cls is SolitonClass.II_A
    assert rep.causal == "time-like"
    assert rep.blowup.endpoint == pytest.approx(math.pi / 2, rel=1e-15)
    assert math.isfinite(rep.blowup.k_estimate)
    assert 0.0 in rep.asymptote.values()


def test_type_two_maximum_example(w2_11):
    rep = classify(w2_11, 0.0, Q, 0.0)
    assert rep.c1 == pytest.approx(-2.0, rel=1e-14)
    assert rep.cls is SolitonClass.II_B
    assert rep.critical_point.kind == "max"
    assert (rep.critical_point.s, rep.critical_point.y) == (0.0, Q)
    assert rep.blowup is None


def test_type_three_minimum_example(w3_12):
    rep = classify(w3_12, 0.0, -1.0, 0.0)
    assert rep.c1 < 0 and rep.cls is SolitonClass.III_B
    assert rep.critical_point.kind == "min"
    assert rep.asymptote == {"left": 0.0, "right": 0.0}


def test_critical_point_off_the_initial_point(w2_12):
    rep = classify(w2_12, 0.0, Q, 0.5)
    assert rep.cls is SolitonClass.II_B
    assert rep.critical_point.y > Q and rep.critical_point.s > 0


@pytest.mark.parametrize("family,c,n", list(GRIDS))
@pytest.mark.parametrize("ratio", RATIOS)
def test_grid_agrees_with_integration(family, c, n, ratio):
    w = make_warping(family, c, n)
    for y0 in GRIDS[(family, c, n)]:
        rep = classify(w, 0.0, y0, ratio * eval_b(w, y0))
        verdict = confirm_numerically(rep)
        assert verdict.agree, (y0, ratio, str(verdict))
        assert str(verdict) == "agree"


def test_grid_covers_every_class():
    seen = set()
    for (family, c, n), ys in GRIDS.items():
        w = make_warping(family, c, n)
        seen |= {classify(w, 0.0, y, r * eval_b(w, y)).cls for y in ys for r in RATIOS}
    assert seen == {SolitonClass.II_A, SolitonClass.II_B, SolitonClass.II_C, SolitonClass.III_A, SolitonClass.III_B}


@pytest.mark.parametrize("family,y0,sign", [("II", Q, 1), ("II", 0.3, -1), ("III", -1.0, 1)])
def test_lightlike_is_skipped(family, y0, sign):
    w = make_warping(family, 1, 2)
    rep = classify(w, 0.0, y0, sign * eval_b(w, y0))
    assert rep.cls is SolitonClass.LIGHTLIKE and rep.causal == "light-like"
    verdict = confirm_numerically(rep)
    assert str(verdict) == "skipped: null separatrix"


@pytest.mark.parametrize(
    "family,y0,ratio,wrong",
    [("II", Q, 0.0, SolitonClass.II_C), ("II", Q, 3.0, SolitonClass.II_B), ("III", -1.0, 0.0, SolitonClass.III_A)],
)
def test_corrupted_report_is_caught(family, y0, ratio, wrong):
    w = make_warping(family, 1, 2)
    rep = classify(w, 0.0, y0, ratio * eval_b(w, y0))
    verdict = confirm_numerically(replace(rep, cls=wrong))
    assert not verdict.agree and verdict.discrepancies
    assert str(verdict).startswith("disagree")


def test_corrupted_blowup_location(w2_12):
    rep = classify(w2_12, 0.0, Q, 3.0)
    b = rep.blowup
    moved = replace(rep, blowup=BlowUp(b.side, b.endpoint, b.k_estimate + 0.01, b.k_error))
    assert not confirm_numerically(moved).agree


@pytest.mark.parametrize(
    "c,n,branch,expected",
    [
        (1, 1, 1, 1.0),
        (1, 2, 1, 0.35355339059327376220),
        (2, 3, -1, -0.096225044864937627418),
    ],
)
def test_terminal_limit(c, n, branch, expected):
    w = make_warping("II", c, n)
    assert beta_terminal_limit(w, branch) == pytest.approx(expected, rel=1e-12)
    assert beta_terminal_limit(w, branch, c1=-((c * n) ** 2)) == pytest.approx(expected, rel=1e-12)


def test_terminal_limit_rejections(w2_12, w3_12):
    with pytest.raises(ValueError):
        beta_terminal_limit(w3_12, 1)
    with pytest.raises(ValueError):
        beta_terminal_limit(w2_12, 1, c1=-3.0)


def test_boundary_is_type_two_c(w2_12):
    assert _label(w2_12, -4.0) is SolitonClass.II_C
    assert _label(w2_12, -4.0 * (1 + 1e-6)) is SolitonClass.II_B


def test_family_one_rejected():
    with pytest.raises(ValueError):
        classify(make_warping("I", 1, 1), 0.0, 0.0, 1.0)


def test_vertical_is_explicit(w2_12):
    rep = vertical(w2_12, 0.4)
    assert rep.cls is SolitonClass.VERTICAL
    assert "skipped" in str(confirm_numerically(rep))


def test_report_dict(w2_12):
    d = classify(w2_12, 0.0, Q, 3.0).to_dict()
    assert set(d) >= {"class", "c1", "causal", "critical_point", "blowup", "asymptote"}
    assert d["class"] == "II.A" and d["critical_point"] is None


@pytest.mark.parametrize("c,n", [(1e-2, 1), (50.0, 3)])
def test_lightlike_tolerance_scales(c, n):
    w = make_warping("II", c, n)
    assert lightlike_tolerance(w) == pytest.approx(1e-9 * (c * n) ** 2)
    y0 = Q / c
    rep = classify(w, 0.0, y0, eval_b(w, y0) * (1 + 1e-12))
    assert rep.cls is SolitonClass.LIGHTLIKE


# ---------------------------------------------------------------- properties

family_params = st.sampled_from([("II", 1.0, 2), ("II", 2.0, 1), ("III", 1.0, 2), ("III", 0.5, 3)])


def _y0(w, u):
    lo, hi = w.interval
    return hi * (0.02 + 0.96 * u) if w.family == "II" else -(0.05 + 5 * u) / w.c


@given(p=family_params, u=st.floats(0, 1), r=st.floats(-4, 4))
def test_exactly_one_class(p, u, r):
    w = make_warping(*p)
    y0 = _y0(w, u)
    rep = classify(w, 0.0, y0, r * eval_b(w, y0))
    assert rep.cls.compatible_with(w)
    c1, tau = rep.c1, lightlike_tolerance(w)
    if abs(c1) <= tau:
        assert rep.cls is SolitonClass.LIGHTLIKE
    elif c1 > 0:
        assert rep.cls in (SolitonClass.II_A, SolitonClass.III_A)
    elif w.family == "III":
        assert rep.cls is SolitonClass.III_B
    else:
        assert rep.cls is (SolitonClass.II_B if c1 < -((w.c * w.n) ** 2) else SolitonClass.II_C)


@pytest.mark.parametrize("family,c,n,y0", [("II", 1, 2, 0.4), ("II", 2, 3, 0.6), ("III", 1, 1, -2.0)])
def test_c1_increases_with_speed(family, c, n, y0):
    w = make_warping(family, c, n)
    speeds = np.linspace(0, 4, 41) * eval_b(w, y0)
    c1 = [c1_constant(w, y0, v) for v in speeds]
    assert np.all(np.diff(c1) > 0)
    assert c1_constant(w, y0, -speeds[7]) == c1[7]


@given(p=family_params, u=st.floats(0.1, 0.9), r=st.floats(-3, 3), t=st.floats(-0.02, 0.02))
def test_class_survives_flow(p, u, r, t):
    w = make_warping(*p)
    y0 = _y0(w, u)
    v0 = r * eval_b(w, y0)
    rep = classify(w, 0.0, y0, v0)
    assume(rep.cls is not SolitonClass.LIGHTLIKE and abs(rep.c1 + (w.c * w.n) ** 2) > 1e-6)
    y_t = flow_A(w, y0, t)
    v_t = eval_b(w, y_t) / eval_b(w, y0) * v0
    assert classify(w, 0.0, y_t, v_t).cls is rep.cls


@given(p=family_params, u=st.floats(0.05, 0.95), r=st.floats(-3, 3), s0=st.floats(-2, 2))
def test_mirror_symmetry(p, u, r, s0):
    w = make_warping(*p)
    y0 = _y0(w, u)
    v0 = r * eval_b(w, y0)
    a, b = classify(w, s0, y0, v0), classify(w, -s0, y0, -v0)
    assert a.cls is b.cls
    if a.blowup is not None:
        flip = {"left": "right", "right": "left"}
        assert b.blowup.side == flip[a.blowup.side]
        assert b.blowup.k_estimate == pytest.approx(-a.blowup.k_estimate, abs=1e-9)
    if a.critical_point is not None:
        assert b.critical_point.s == pytest.approx(-a.critical_point.s, abs=1e-9)
        assert b.critical_point.y == a.critical_point.y
