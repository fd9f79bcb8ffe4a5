"""Deterministic SVG phase portraits of generating curves."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .classifier import classify
from .closed_forms import lightlike
from .integrator import IntegratorOptions, integrate
from .warping import WarpingFunction, check_inside, make_warping

WIDTH, HEIGHT, PAD = 600, 400, 40
COLOURS = {"light-like": "#000000", "time-like": "#0000ff", "space-like": "#008000"}


@dataclass(frozen=True)
class PortraitSpec:
    warping: WarpingFunction
    ics: tuple[tuple[float, float, float], ...] = ()
    lightlike_anchors: tuple[tuple[float, float], ...] = ()
    s_range: tuple[float, float] = (-3.0, 3.0)
    y_range: tuple[float, float] | None = None
    resolution: int = 400

    def __post_init__(self):
        if self.resolution < 16:
            raise ValueError(f"resolution must be at least 16, got {self.resolution}")
        lo, hi = self.s_range
        if not lo < hi:
            raise ValueError("s_range must be increasing")
        y_lo, y_hi = self.window
        i_lo, i_hi = self.warping.interval
        if not (i_lo <= y_lo < y_hi <= i_hi):
            raise ValueError(f"y_range {self.window} is not inside the closure of ({i_lo}, {i_hi})")

    @property
    def window(self) -> tuple[float, float]:
        if self.y_range is not None:
            return self.y_range
        lo, hi = self.warping.interval
        if self.warping.family == "III":
            return (-3.0 / self.warping.c, 0.0)
        return (lo, hi)


def default_spec(family: str, c: float = 1.0, n: int = 2) -> PortraitSpec:
    w = make_warping(family, c, n)
    if family == "II":
        y0 = math.pi / (4 * c)
        b0 = n * c  # b(pi/(4c))
        ics = ((0.0, y0, 1.5 * b0), (0.0, y0, 0.0), (0.0, y0, 0.95 * b0))
        return PortraitSpec(w, ics, ((0.0, y0),))
    if family == "III":
        y0 = -1.0 / c
        ics = ((0.0, y0, 3.0 * c), (0.0, y0, 0.0))
        return PortraitSpec(w, ics, ((0.0, y0),))
    raise ValueError("portraits are drawn for families II and III")


@dataclass
class Trace:
    style: str
    label: str
    points: list[np.ndarray] = field(default_factory=list)


def _runs(s: np.ndarray, y: np.ndarray, window) -> list[np.ndarray]:
    # split into pieces that stay inside the window
    ok = np.isfinite(y) & (y >= window[0]) & (y <= window[1])
    pieces, start = [], None
    for i, flag in enumerate(ok):
        if flag and start is None:
            start = i
        if not flag and start is not None:
            pieces.append(np.column_stack([s[start:i], y[start:i]]))
            start = None
    if start is not None:
        pieces.append(np.column_stack([s[start:], y[start:]]))
    return [p for p in pieces if len(p) > 1]


def build_traces(spec: PortraitSpec, opts: IntegratorOptions | None = None) -> list[Trace]:
    w = spec.warping
    s_lo, s_hi = spec.s_range
    traces = []
    for s0, y0, v0 in spec.ics:
        check_inside(w, y0)
    for s0, y0 in spec.lightlike_anchors:
        check_inside(w, y0)
    base = opts or IntegratorOptions()
    for s0, y0, v0 in spec.ics:
        report = classify(w, s0, y0, v0)
        trace = Trace(report.causal, report.cls.value)
        if report.causal == "light-like":
            curve = lightlike(w, s0, y0, 1 if v0 > 0 else -1)
            s, y = _sample_lightlike(curve, s_lo, s_hi, spec.resolution)
        else:
            reach = max(abs(s_lo - s0), abs(s_hi - s0)) + 1.0
            o = IntegratorOptions(base.rel_tol, base.abs_tol, base.max_step, base.endpoint_margin, reach,
                                  base.velocity_cap, base.max_steps)
            sol = integrate(w, s0, y0, v0, o)
            a, b = max(s_lo, sol.span[0]), min(s_hi, sol.span[1])
            s = np.linspace(a, b, spec.resolution)
            y = sol.evaluate(s)[0]
        trace.points = _runs(s, y, spec.window)
        traces.append(trace)
    for s0, y0 in spec.lightlike_anchors:
        for branch in (1, -1):
            curve = lightlike(w, s0, y0, branch)
            s, y = _sample_lightlike(curve, s_lo, s_hi, spec.resolution)
            trace = Trace("light-like", "LightLike")
            trace.points = _runs(s, y, spec.window)
            traces.append(trace)
    return traces


def _sample_lightlike(curve, s_lo, s_hi, count):
    lo, hi = curve.domain
    span = s_hi - s_lo
    a = max(s_lo, lo + 1e-9 * span) if math.isfinite(lo) else s_lo
    b = min(s_hi, hi - 1e-9 * span) if math.isfinite(hi) else s_hi
    s = np.linspace(a, b, count)
    return s, np.asarray(curve(s))


def _px(spec: PortraitSpec, s, y):
    s_lo, s_hi = spec.s_range
    y_lo, y_hi = spec.window
    x = PAD + (s - s_lo) / (s_hi - s_lo) * (WIDTH - 2 * PAD)
    yy = HEIGHT - PAD - (y - y_lo) / (y_hi - y_lo) * (HEIGHT - 2 * PAD)
    return x, yy


def render_svg(spec: PortraitSpec, traces: list[Trace]) -> str:
    s_lo, s_hi = spec.s_range
    y_lo, y_hi = spec.window
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
        f'<g class="axes" stroke="#555555" stroke-width="1">',
        f'<line x1="{PAD}" y1="{HEIGHT - PAD}" x2="{WIDTH - PAD}" y2="{HEIGHT - PAD}"/>',
        f'<line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{HEIGHT - PAD}"/>',
        "</g>",
        f'<text x="{WIDTH - PAD + 8}" y="{HEIGHT - PAD + 4}" font-size="14">s</text>',
        f'<text x="{PAD - 4}" y="{PAD - 10}" font-size="14">t</text>',
        f'<text x="{PAD}" y="{HEIGHT - PAD + 18}" font-size="10">{s_lo:.3g}</text>',
        f'<text x="{WIDTH - PAD}" y="{HEIGHT - PAD + 18}" font-size="10" text-anchor="end">{s_hi:.3g}</text>',
        f'<text x="{PAD - 6}" y="{HEIGHT - PAD}" font-size="10" text-anchor="end">{y_lo:.3g}</text>',
        f'<text x="{PAD - 6}" y="{PAD + 4}" font-size="10" text-anchor="end">{y_hi:.3g}</text>',
    ]
    for i, trace in enumerate(traces):
        parts = []
        for piece in trace.points:
            x, y = _px(spec, piece[:, 0], piece[:, 1])
            coords = " L".join(f"{a:.2f},{b:.2f}" for a, b in zip(x, y))
            parts.append("M" + coords)
        d = " ".join(parts)
        out.append(
            f'<path id="curve-{i}" class="{trace.style}" data-class="{trace.label}" '
            f'fill="none" stroke="{COLOURS[trace.style]}" stroke-width="1.5" d="{d}"/>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def portrait_svg(spec: PortraitSpec, opts: IntegratorOptions | None = None) -> str:
    return render_svg(spec, build_traces(spec, opts))
