"""Time the hot kernels with numba and with the pure-Python fallback.

Each backend runs in its own interpreter because the switch is read at import.
Usage: python3 benchmarks/bench_kernels.py [--repeat 3] [--curves 40]
"""
import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from grw_reapers import NUMBA_ENABLED
from grw_reapers.flow import flow_many
from grw_reapers.integrator import integrate
from grw_reapers.warping import eval_b, make_warping

repeat, curves = int(sys.argv[1]), int(sys.argv[2])
rng = np.random.default_rng(0)
w2, w3 = make_warping("II", 1, 2), make_warping("III", 1, 2)
ics = []
for i in range(curves):
    w = w2 if i % 2 else w3
    y0 = rng.uniform(0.2, 1.3) if w is w2 else rng.uniform(-3.0, -0.2)
    ics.append((w, y0, rng.uniform(-2, 2) * eval_b(w, y0)))
grid = np.linspace(0.2, 1.0, 2000)

t = time.perf_counter()
integrate(w2, 0.0, 0.5, 0.1)
flow_many(w2, grid[:4], 0.01)
warm = time.perf_counter() - t

def best(fn):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)

res = {
    "numba": NUMBA_ENABLED,
    "first_call_s": warm,
    "integrate_s": best(lambda: [integrate(w, 0.0, y0, v0) for w, y0, v0 in ics]),
    "flow_many_s": best(lambda: flow_many(w2, grid, 0.05)),
}
print(json.dumps(res))
"""


def run(disable: bool, repeat: int, curves: int) -> dict:
    env = dict(os.environ)
    env.pop("GRW_REAPERS_DISABLE_NUMBA", None)
    if disable:
        env["GRW_REAPERS_DISABLE_NUMBA"] = "1"
    out = subprocess.run(
        [sys.executable, "-c", WORKER, str(repeat), str(curves)],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(out.stdout)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--curves", type=int, default=40, help="integrate() calls per timing")
    args = ap.parse_args()
    fast = run(False, args.repeat, args.curves)
    slow = run(True, args.repeat, args.curves)
    print(f"{'kernel':<24}{'numba [s]':>12}{'python [s]':>12}{'speed-up':>10}")
    for key, name in (("integrate_s", f"integrate x{args.curves}"), ("flow_many_s", "flow_many x2000"), ("first_call_s", "first call")):
        print(f"{name:<24}{fast[key]:>12.4f}{slow[key]:>12.4f}{slow[key] / fast[key]:>10.1f}")
    if not fast["numba"]:
        print("note: numba is not importable here, both columns ran the fallback")


if __name__ == "__main__":
    main()
