"""Classification of initial conditions into the Grim Reaper classes.

Every initial condition (s0, y0, v0) is assigned a class from its conserved
constant c1 alone; the qualitative portrait (critical point, blow-up point,
asymptotes) is then predicted from the closed-form beta branches and can be
cross-checked against the integrator with :func:`confirm_numerically`.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .closed_forms import (
    ClosedFormBeta,
    beta_for_initial,
    c1_constant,
    xi_integral,
)
from .integrator import (
    BLOWUP,
    SPAN,
    CriticalPoint,
    IntegratorOptions,
    NullDataError,
    SolutionCurve,
    integrate,
)
from .warping import WarpingFunction, check_inside

LIGHTLIKE_RTOL = 1e-9
ASYMPTOTE_TOL = 1e-3
K_ABS_TOL = 1e-4
LOCATION_TOL = 1e-6


class SolitonClass(str, enum.Enum):
    II_A = "II.A"
    II_B = "II.B"
    II_C = "II.C"
    III_A = "III.A"
    III_B = "III.B"
    LIGHTLIKE = "LightLike"
    VERTICAL = "Vertical"

    def __str__(self) -> str:
        return self.value

    def compatible_with(self, w: WarpingFunction) -> bool:
        if self in (SolitonClass.LIGHTLIKE, SolitonClass.VERTICAL):
            return True
        return self.value.split(".")[0] == w.family


@dataclass(frozen=True)
class BlowUp:
    side: str  # "left" or "right"
    endpoint: float
    k_estimate: float
    k_error: float


@dataclass(frozen=True)
class ClassificationReport:
    warping: WarpingFunction
    s0: float
    y0: float
    v0: float
    cls: SolitonClass
    c1: float
    causal: str
    critical_point: CriticalPoint | None = None
    blowup: BlowUp | None = None
    asymptote: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        crit = None
        if self.critical_point is not None:
            cp = self.critical_point
            crit = {"s": cp.s, "y": cp.y, "kind": cp.kind}
        blow = None
        if self.blowup is not None:
            b = self.blowup
            blow = {"side": b.side, "endpoint": b.endpoint, "k_estimate": b.k_estimate, "k_error": b.k_error}
        return {
            "class": self.cls.value,
            "c1": self.c1,
            "causal": self.causal,
            "critical_point": crit,
            "blowup": blow,
            "asymptote": dict(self.asymptote),
        }


def lightlike_tolerance(w: WarpingFunction) -> float:
    return LIGHTLIKE_RTOL * (w.c * w.n) ** 2


def _causal_label(c1: float, tau: float) -> str:
    if abs(c1) <= tau:
        return "light-like"
    return "time-like" if c1 > 0 else "space-like"


def _label(w: WarpingFunction, c1: float) -> SolitonClass:
    tau = lightlike_tolerance(w)
    if abs(c1) <= tau:
        return SolitonClass.LIGHTLIKE
    if w.family == "II":
        if c1 > 0:
            return SolitonClass.II_A
        if c1 < -((w.c * w.n) ** 2):
            return SolitonClass.II_B
        return SolitonClass.II_C
    return SolitonClass.III_A if c1 > 0 else SolitonClass.III_B


def _blowup_endpoint(w: WarpingFunction) -> float:
    return math.pi / (2.0 * w.c) if w.family == "II" else -math.inf


def classify(w: WarpingFunction, s0: float, y0: float, v0: float) -> ClassificationReport:
    if w.family not in ("II", "III"):
        raise ValueError(f"classification is defined for families II and III, not {w.family}")
    check_inside(w, y0)
    c1 = c1_constant(w, y0, v0)
    label = _label(w, c1)
    causal = _causal_label(c1, lightlike_tolerance(w))
    top = _blowup_endpoint(w)
    base = dict(warping=w, s0=float(s0), y0=float(y0), v0=float(v0), cls=label, c1=c1, causal=causal)

    if label is SolitonClass.LIGHTLIKE:
        # null curve l' = sign(v0) b(l)
        rising = v0 > 0
        if w.family == "II":
            ends = {"left": 0.0, "right": top} if rising else {"left": top, "right": 0.0}
        else:
            ends = {"left": -math.inf, "right": 0.0} if rising else {"left": 0.0, "right": -math.inf}
        return ClassificationReport(**base, asymptote=ends)

    if label in (SolitonClass.II_B, SolitonClass.III_B):
        kind = "max" if w.family == "II" else "min"
        if v0 == 0.0:
            crit = CriticalPoint(float(s0), float(y0), kind)
        else:
            cf = beta_for_initial(w, y0, v0)
            dom = cf.domain
            root = dom.root
            if dom.lo < y0 < dom.hi:
                crit = CriticalPoint(s0 + xi_integral(cf, y0, root).value, root, kind)
            else:
                # |v0| so small that y0 is the root to rounding
                crit = CriticalPoint(float(s0), root, kind)
        return ClassificationReport(**base, critical_point=crit, asymptote={"left": 0.0, "right": 0.0})

    cf = beta_for_initial(w, y0, v0)
    res = xi_integral(cf, y0, top)
    k = s0 + res.value
    side = "right" if k > s0 else "left"
    blow = BlowUp(side, top, k, max(res.error, 1e-12 * max(1.0, abs(k))))
    asym = {"left": top, "right": 0.0} if side == "left" else {"left": 0.0, "right": top}
    return ClassificationReport(**base, blowup=blow, asymptote=asym)


def vertical(w: WarpingFunction, s0: float) -> ClassificationReport:
    """Report for the vertical soliton P x {s0} x I; it is not a graph over s."""
    return ClassificationReport(
        warping=w,
        s0=float(s0),
        y0=math.nan,
        v0=math.nan,
        cls=SolitonClass.VERTICAL,
        c1=math.nan,
        causal="time-like",
        asymptote={},
    )


def beta_terminal_limit(w: WarpingFunction, branch, c1: float | None = None) -> float:
    """Finite limit +-1/(c n sqrt(n)) of beta at pi/(2c) for c1 = -c^2 n^2."""
    if w.family != "II":
        raise ValueError("the terminal beta limit exists only for family II")
    boundary = -((w.c * w.n) ** 2)
    if c1 is not None and not math.isclose(c1, boundary, rel_tol=1e-12):
        raise ValueError(f"c1={c1!r} is not the boundary value {boundary!r}")
    sign = ClosedFormBeta(w, boundary, branch).branch
    return sign / (w.c * w.n * math.sqrt(w.n))


@dataclass
class Verdict:
    agree: bool
    discrepancies: list[str]
    skipped: str | None = None
    curve: SolutionCurve | None = field(default=None, repr=False)

    def __str__(self) -> str:
        if self.skipped:
            return f"skipped: {self.skipped}"
        return "agree" if self.agree else "disagree: " + "; ".join(self.discrepancies)


def _observed_class(w: WarpingFunction, curve: SolutionCurve) -> str:
    blown = [t for t in (curve.left_termination, curve.right_termination) if t is not None and t.kind == BLOWUP]
    # the indicator rounds to 0 along the light-like asymptote; use the dominant sample
    causal = np.asarray(curve.causal)
    timelike = causal[np.argmax(np.abs(causal))] < 0
    if w.family == "II":
        if curve.critical_points:
            return "II.B"
        if blown:
            return "II.A" if timelike else "II.C"
        return "?"
    if curve.critical_points:
        return "III.B"
    if blown:
        return "III.A"
    return "?"


def confirm_numerically(report: ClassificationReport, opts: IntegratorOptions | None = None) -> Verdict:
    """Integrate the report's initial condition both ways and compare."""
    opts = opts or IntegratorOptions()
    if report.cls is SolitonClass.LIGHTLIKE:
        return Verdict(True, [], skipped="null separatrix")
    if report.cls is SolitonClass.VERTICAL:
        return Verdict(True, [], skipped="vertical soliton is not a graph")
    w = report.warping
    try:
        curve = integrate(w, report.s0, report.y0, report.v0, opts, direction="both")
    except NullDataError:
        return Verdict(True, [], skipped="null separatrix")

    problems = []
    observed = _observed_class(w, curve)
    if observed != report.cls.value:
        problems.append(f"class: report {report.cls.value}, numerics {observed}")

    # causal character is constant along the curve
    signs = {1 if x > 0 else -1 for x in curve.causal if abs(x) > 1e-10}
    expected_sign = {"space-like": 1, "time-like": -1}.get(report.causal)
    if signs != {expected_sign}:
        problems.append(f"causal: report {report.causal}, numerics signs {sorted(signs)}")

    crit = curve.critical_points
    if report.critical_point is None:
        if crit:
            problems.append(f"critical point: none predicted, numerics found {len(crit)}")
    elif len(crit) != 1:
        problems.append(f"critical point: one predicted, numerics found {len(crit)}")
    else:
        pred, got = report.critical_point, crit[0]
        if pred.kind != got.kind:
            problems.append(f"critical point kind: report {pred.kind}, numerics {got.kind}")
        if abs(pred.s - got.s) > LOCATION_TOL * max(1.0, abs(pred.s)) or abs(pred.y - got.y) > LOCATION_TOL:
            problems.append(f"critical point location: report ({pred.s}, {pred.y}), numerics ({got.s}, {got.y})")

    for side_name, term in (("left", curve.left_termination), ("right", curve.right_termination)):
        blow_here = report.blowup is not None and report.blowup.side == side_name
        if blow_here:
            if term.kind != BLOWUP:
                problems.append(f"{side_name}: blow-up predicted, numerics {term.kind}")
                continue
            if term.endpoint != report.blowup.endpoint:
                problems.append(f"{side_name}: blow-up endpoint {report.blowup.endpoint} vs {term.endpoint}")
            tol = max(K_ABS_TOL, report.blowup.k_error, term.k_error)
            if not abs(term.k - report.blowup.k_estimate) < tol:
                problems.append(f"{side_name}: k numerics {term.k} vs closed form {report.blowup.k_estimate}")
        else:
            if term.kind != SPAN:
                problems.append(f"{side_name}: asymptote predicted, numerics {term.kind}")
                continue
            final_y = curve.y[0] if side_name == "left" else curve.y[-1]
            target = report.asymptote.get(side_name, 0.0)
            if not abs(final_y - target) < ASYMPTOTE_TOL:
                problems.append(f"{side_name}: final y {final_y} not within {ASYMPTOTE_TOL} of {target}")

    return Verdict(not problems, problems, curve=curve)
