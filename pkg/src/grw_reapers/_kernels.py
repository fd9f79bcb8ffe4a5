"""Scalar hot loops: warping evaluation, Dormand-Prince 5(4) stepping, flow.

Everything here works on plain floats and preallocated numpy arrays so the
same source runs under ``numba.njit`` or as ordinary Python (see ``_accel``).
Families are passed as integer codes: 1 = I, 2 = II, 3 = III.
"""
import math

import numpy as np

from ._accel import jit

FAM_I = 1
FAM_II = 2
FAM_III = 3

# Termination status codes returned by integrate_side.
ST_SPAN = 0
ST_BLOWUP = 1
ST_COLLAPSE = 2
ST_ZERO_FLOOR = 3
ST_STEPS_EXHAUSTED = 4

EPS = 2.220446049250313e-16
ZERO_FLOOR = 1e-250

# Dormand-Prince 5(4) tableau.
A21 = 1.0 / 5.0
A31, A32 = 3.0 / 40.0, 9.0 / 40.0
A41, A42, A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
A51, A52, A53, A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
A61, A62, A63, A64, A65 = (
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
)
B1, B3, B4, B5, B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
E1, E3, E4, E5, E6, E7 = (
    -71.0 / 57600.0,
    71.0 / 16695.0,
    -71.0 / 1920.0,
    17253.0 / 339200.0,
    -22.0 / 525.0,
    1.0 / 40.0,
)

# Shampine's quartic continuous extension, rows = stages, cols = theta**1..4.
DENSE_P = np.array(
    [
        [1.0, -8048581381.0 / 2820520608.0, 8663915743.0 / 2820520608.0, -12715105075.0 / 11282082432.0],
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 131558114200.0 / 32700410799.0, -68118460800.0 / 10900136933.0, 87487479700.0 / 32700410799.0],
        [0.0, -1754552775.0 / 470086768.0, 14199869525.0 / 1410260304.0, -10690763975.0 / 1880347072.0],
        [0.0, 127303824393.0 / 49829197408.0, -318862633887.0 / 49829197408.0, 701980252875.0 / 199316789632.0],
        [0.0, -282668133.0 / 205662961.0, 2019193451.0 / 616988883.0, -1453857185.0 / 822651844.0],
        [0.0, 40617522.0 / 29380423.0, -110615467.0 / 29380423.0, 69997945.0 / 29380423.0],
    ]
)

SAFETY = 0.9
FAC_MIN = 0.2
FAC_MAX = 5.0
PI_ALPHA = 0.7 / 5.0
PI_BETA = 0.4 / 5.0


@jit
def warp_b(fam, c, n, t):
    if fam == FAM_II:
        return n * c * math.tan(c * t)
    if fam == FAM_III:
        return -n * c * math.tanh(c * t)
    return c


@jit
def warp_db(fam, c, n, t):
    if fam == FAM_II:
        sec = 1.0 / math.cos(c * t)
        return n * c * c * sec * sec
    if fam == FAM_III:
        sech = 1.0 / math.cosh(c * t)
        return -n * c * c * sech * sech
    return 0.0


@jit
def warp_ddb(fam, c, n, t):
    if fam == FAM_II:
        sec = 1.0 / math.cos(c * t)
        return 2.0 * n * c * c * c * sec * sec * math.tan(c * t)
    if fam == FAM_III:
        sech = 1.0 / math.cosh(c * t)
        return 2.0 * n * c * c * c * sech * sech * math.tanh(c * t)
    return 0.0


@jit
def warp_d(fam, c, n):
    if fam == FAM_II:
        return -c * c * n * n
    if fam == FAM_III:
        return c * c * n * n
    return c * c


@jit
def upper_end(fam, c):
    """Finite upper endpoint of I*: pi/(2c) for II, 0 for III, inf for I."""
    if fam == FAM_II:
        return 0.5 * math.pi / c
    if fam == FAM_III:
        return 0.0
    return math.inf


@jit
def inside(fam, c, y):
    if not math.isfinite(y):
        return False
    if fam == FAM_II:
        return 0.0 < y < 0.5 * math.pi / c
    if fam == FAM_III:
        return y < 0.0
    return True


@jit
def reaper_rhs(fam, c, n, d, y, v):
    b = warp_b(fam, c, n, y)
    bp = warp_db(fam, c, n, y)
    r = v / b
    return (1.0 - r * r) * b * d + bp * v * r


@jit
def zero_gap(fam, c, y, yn):
    """min(1, c * distance of the step to the 0 endpoint); 1 for family I."""
    if fam == FAM_I:
        return 1.0
    return min(1.0, c * min(abs(y), abs(yn)))


@jit
def integrate_side(fam, c, n, s0, y0, v0, direction, rtol, atol, max_step, margin, vcap, max_span, max_steps):
    """Advance the Grim Reaper ODE from (s0, y0, v0) in one direction.

    Returns ``(ss, ys, vs, hs, stages, count, status, k_est, k_err)``; the
    first ``count + 1`` entries of ``ss/ys/vs`` and the first ``count`` of
    ``hs/stages`` are valid.  ``stages[i]`` holds the seven DOPRI stages of
    step ``i`` for dense output.
    """
    d = warp_d(fam, c, n)
    top = upper_end(fam, c)
    ss = np.empty(max_steps + 1)
    ys = np.empty(max_steps + 1)
    vs = np.empty(max_steps + 1)
    hs = np.empty(max_steps)
    stages = np.empty((max_steps, 7, 2))
    ss[0] = s0
    ys[0] = y0
    vs[0] = v0

    s = s0
    y = y0
    v = v0
    ky1 = v
    kv1 = reaper_rhs(fam, c, n, d, y, v)

    sc_y = atol + rtol * abs(y)
    sc_v = atol + rtol * abs(v)
    d0 = math.sqrt(0.5 * ((y / sc_y) ** 2 + (v / sc_v) ** 2))
    d1 = math.sqrt(0.5 * ((ky1 / sc_y) ** 2 + (kv1 / sc_v) ** 2))
    if d0 < 1e-5 or d1 < 1e-5:
        h = 1e-6
    else:
        h = 0.01 * d0 / d1
    h = min(h, max_step)

    err_prev = 1e-4
    rejected = False
    status = ST_SPAN
    k_est = math.nan
    k_err = math.nan
    i = 0
    while True:
        if i >= max_steps:
            status = ST_STEPS_EXHAUSTED
            break
        remaining = max_span - abs(s - s0)
        if remaining <= 0.0:
            status = ST_SPAN
            break
        hh = min(h, max_step)
        if hh >= remaining:
            hh = remaining
        if hh < 1e3 * EPS * max(abs(s), 1.0):
            status = ST_COLLAPSE
            break
        hd = direction * hh

        ok = True
        y2 = y + hd * (A21 * ky1)
        v2 = v + hd * (A21 * kv1)
        ok = ok and inside(fam, c, y2)
        ky2 = v2
        kv2 = reaper_rhs(fam, c, n, d, y2, v2) if ok else 0.0
        y3 = y + hd * (A31 * ky1 + A32 * ky2)
        v3 = v + hd * (A31 * kv1 + A32 * kv2)
        ok = ok and inside(fam, c, y3)
        ky3 = v3
        kv3 = reaper_rhs(fam, c, n, d, y3, v3) if ok else 0.0
        y4 = y + hd * (A41 * ky1 + A42 * ky2 + A43 * ky3)
        v4 = v + hd * (A41 * kv1 + A42 * kv2 + A43 * kv3)
        ok = ok and inside(fam, c, y4)
        ky4 = v4
        kv4 = reaper_rhs(fam, c, n, d, y4, v4) if ok else 0.0
        y5 = y + hd * (A51 * ky1 + A52 * ky2 + A53 * ky3 + A54 * ky4)
        v5 = v + hd * (A51 * kv1 + A52 * kv2 + A53 * kv3 + A54 * kv4)
        ok = ok and inside(fam, c, y5)
        ky5 = v5
        kv5 = reaper_rhs(fam, c, n, d, y5, v5) if ok else 0.0
        y6 = y + hd * (A61 * ky1 + A62 * ky2 + A63 * ky3 + A64 * ky4 + A65 * ky5)
        v6 = v + hd * (A61 * kv1 + A62 * kv2 + A63 * kv3 + A64 * kv4 + A65 * kv5)
        ok = ok and inside(fam, c, y6)
        ky6 = v6
        kv6 = reaper_rhs(fam, c, n, d, y6, v6) if ok else 0.0
        yn = y + hd * (B1 * ky1 + B3 * ky3 + B4 * ky4 + B5 * ky5 + B6 * ky6)
        vn = v + hd * (B1 * kv1 + B3 * kv3 + B4 * kv4 + B5 * kv5 + B6 * kv6)
        ok = ok and inside(fam, c, yn) and math.isfinite(vn)
        ky7 = vn
        kv7 = reaper_rhs(fam, c, n, d, yn, vn) if ok else 0.0
        ok = ok and math.isfinite(kv7)

        if not ok:
            h = 0.25 * hh
            rejected = True
            continue

        ey = hd * (E1 * ky1 + E3 * ky3 + E4 * ky4 + E5 * ky5 + E6 * ky6 + E7 * ky7)
        ev = hd * (E1 * kv1 + E3 * kv3 + E4 * kv4 + E5 * kv5 + E6 * kv6 + E7 * kv7)
        # solutions only approach 0 exponentially, so the absolute part shrinks
        # with the distance to 0 and control there is relative
        g = zero_gap(fam, c, y, yn)
        sc_y = atol * g + rtol * max(abs(y), abs(yn))
        sc_v = atol * g + rtol * max(abs(v), abs(vn))
        err = math.sqrt(0.5 * ((ey / sc_y) ** 2 + (ev / sc_v) ** 2))
        if not math.isfinite(err):
            h = 0.25 * hh
            rejected = True
            continue

        if err > 1.0:
            h = hh * max(FAC_MIN, SAFETY * err ** (-0.2))
            rejected = True
            continue

        hs[i] = hd
        stages[i, 0, 0] = ky1
        stages[i, 0, 1] = kv1
        stages[i, 1, 0] = ky2
        stages[i, 1, 1] = kv2
        stages[i, 2, 0] = ky3
        stages[i, 2, 1] = kv3
        stages[i, 3, 0] = ky4
        stages[i, 3, 1] = kv4
        stages[i, 4, 0] = ky5
        stages[i, 4, 1] = kv5
        stages[i, 5, 0] = ky6
        stages[i, 5, 1] = kv6
        stages[i, 6, 0] = ky7
        stages[i, 6, 1] = kv7
        s = s + hd if hh < remaining else s0 + direction * max_span
        y = yn
        v = vn
        ky1 = ky7
        kv1 = kv7
        i += 1
        ss[i] = s
        ys[i] = y
        vs[i] = v

        if fam == FAM_II and (y >= top * (1.0 - margin) or abs(v) >= vcap):
            # (top - y)^2 is linear in s near the blow-up point.
            status = ST_BLOWUP
            k_est = s + (top - y) / (2.0 * v)
            k_err = abs(hd)
            break
        if fam == FAM_III and (abs(v) >= vcap or y <= -1.0 / margin):
            # 1/v is linear in s near the blow-up point.
            status = ST_BLOWUP
            k_est = s + v / kv1
            k_err = abs(hd)
            break
        if fam == FAM_II and y < ZERO_FLOOR * top:
            status = ST_ZERO_FLOOR
            break
        if fam == FAM_III and y > -ZERO_FLOOR / c:
            status = ST_ZERO_FLOOR
            break

        if err == 0.0:
            fac = FAC_MAX
        else:
            fac = SAFETY * err ** (-PI_ALPHA) * err_prev ** PI_BETA
            fac = min(FAC_MAX, max(FAC_MIN, fac))
        if rejected:
            fac = min(fac, 1.0)
        rejected = False
        err_prev = max(err, 1e-4)
        h = hh * fac

    return ss, ys, vs, hs, stages, i, status, k_est, k_err


@jit
def dense_eval(s_start, h, y_start, v_start, stage, s):
    """Evaluate the quartic continuous extension of one accepted step."""
    theta = (s - s_start) / h
    dy = 0.0
    dv = 0.0
    for j in range(7):
        w = 0.0
        p = theta
        for m in range(4):
            w += DENSE_P[j, m] * p
            p *= theta
        dy += stage[j, 0] * w
        dv += stage[j, 1] * w
    return y_start + h * dy, v_start + h * dv


@jit
def dense_eval_many(ss, ys, vs, hs, stages, count, direction, query, out_y, out_v):
    """Dense output at sorted-or-not query points along one integrated side."""
    for q in range(query.shape[0]):
        s = query[q]
        # steps are monotone in direction; find the step containing s
        lo = 0
        hi = count - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if direction * (ss[mid + 1] - s) < 0.0:
                lo = mid + 1
            else:
                hi = mid
        yq, vq = dense_eval(ss[lo], hs[lo], ys[lo], vs[lo], stages[lo], s)
        out_y[q] = yq
        out_v[q] = vq


@jit
def flow_scalar(fam, c, n, s, t, rtol, atol, margin):
    """Integrate dA/dt = b(A) from A(0) = s up to t. Returns (A, escaped)."""
    if t == 0.0:
        return s, False
    direction = 1.0 if t > 0.0 else -1.0
    span = abs(t)
    top = upper_end(fam, c)
    tau = 0.0
    a = s
    k1 = warp_b(fam, c, n, a)
    h = min(span, 0.01 / max(abs(warp_db(fam, c, n, a)), 1e-3))
    err_prev = 1e-4
    rejected = False
    while tau < span:
        hh = min(h, span - tau)
        if hh < 1e3 * EPS * span:
            return a, True
        hd = direction * hh
        a2 = a + hd * (A21 * k1)
        ok = inside(fam, c, a2)
        k2 = warp_b(fam, c, n, a2) if ok else 0.0
        a3 = a + hd * (A31 * k1 + A32 * k2)
        ok = ok and inside(fam, c, a3)
        k3 = warp_b(fam, c, n, a3) if ok else 0.0
        a4 = a + hd * (A41 * k1 + A42 * k2 + A43 * k3)
        ok = ok and inside(fam, c, a4)
        k4 = warp_b(fam, c, n, a4) if ok else 0.0
        a5 = a + hd * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4)
        ok = ok and inside(fam, c, a5)
        k5 = warp_b(fam, c, n, a5) if ok else 0.0
        a6 = a + hd * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5)
        ok = ok and inside(fam, c, a6)
        k6 = warp_b(fam, c, n, a6) if ok else 0.0
        an = a + hd * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6)
        ok = ok and inside(fam, c, an)
        k7 = warp_b(fam, c, n, an) if ok else 0.0
        if not ok:
            h = 0.25 * hh
            rejected = True
            continue
        e = hd * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7)
        err = abs(e) / (atol * zero_gap(fam, c, a, an) + rtol * max(abs(a), abs(an)))
        if not math.isfinite(err):
            h = 0.25 * hh
            rejected = True
            continue
        if err > 1.0:
            h = hh * max(FAC_MIN, SAFETY * err ** (-0.2))
            rejected = True
            continue
        tau = tau + hh if hh < span - tau else span
        a = an
        k1 = k7
        # the 0 endpoint is only approached exponentially; guard underflow only
        if fam == FAM_II and (a >= top * (1.0 - margin) or a <= ZERO_FLOOR * top):
            return a, True
        if fam == FAM_III and (a >= -ZERO_FLOOR / c or a <= -1.0 / margin):
            return a, True
        if err == 0.0:
            fac = FAC_MAX
        else:
            fac = min(FAC_MAX, max(FAC_MIN, SAFETY * err ** (-PI_ALPHA) * err_prev ** PI_BETA))
        if rejected:
            fac = min(fac, 1.0)
        rejected = False
        err_prev = max(err, 1e-4)
        h = hh * fac
    return a, False


@jit
def flow_many(fam, c, n, s_values, t, rtol, atol, margin, out):
    """Flow every entry of ``s_values`` by ``t``; returns index of first escape or -1."""
    for i in range(s_values.shape[0]):
        a, escaped = flow_scalar(fam, c, n, s_values[i], t, rtol, atol, margin)
        out[i] = a
        if escaped:
            return i
    return -1
