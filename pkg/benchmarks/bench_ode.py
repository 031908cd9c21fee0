#!/usr/bin/env python3
"""Benchmark the two profile-integrator lanes and verify they agree bitwise.

The compiled (Cython) kernel and the pure-Python kernel are written as
operation-for-operation twins, so beyond timing them this script asserts
that every recorded sample, end state, and step count is identical between
the lanes.  A disagreement exits nonzero.

Usage:
    python3 benchmarks/bench_ode.py [--repeats 5] [--s-max 14] [--rtol 1e-10]
"""
from __future__ import annotations

import argparse
import math
import sys
import time

from expanders import _ode

WORKLOAD = [
    # (label, n, x0, z0, th0): representative disk starts (axis series
    # handoff) and neck starts (equator, vertical tangent)
    ("disk n=2 z0=1", 2, 1e-2, 1.0, 1e-3),
    ("disk n=3 z0=0.5", 3, 1e-2, 0.5, 1e-3),
    ("neck n=2 x0=0.05", 2, 0.05, 0.0, math.pi / 2.0),
    ("neck n=3 x0=0.427", 3, 0.427, 0.0, math.pi / 2.0),
    ("neck n=3 x0=2.886", 3, 2.886, 0.0, math.pi / 2.0),
    ("neck n=4 x0=2.0", 4, 2.0, 0.0, math.pi / 2.0),
]


def run_lane(lane: str, args) -> tuple[float, list]:
    """Best-of-repeats wall time and the raw outputs for one lane."""
    outputs = []
    best = math.inf
    for _ in range(args.repeats):
        outputs.clear()
        t0 = time.perf_counter()
        for _, n, x0, z0, th0 in WORKLOAD:
            outputs.append(
                _ode.integrate_raw(
                    n, 1.0, x0, z0, th0, args.s_max,
                    rtol=args.rtol, atol=args.atol,
                    ds_out=args.ds_out, lane=lane,
                )
            )
        best = min(best, time.perf_counter() - t0)
    return best, outputs


def identical(a, b) -> bool:
    """Strict equality of two raw kernel outputs, including every sample."""
    if a[0] != b[0] or a[5:] != b[5:]:
        return False
    return all(list(a[i]) == list(b[i]) for i in (1, 2, 3, 4))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5,
                        help="timing repeats, best is reported (default 5)")
    parser.add_argument("--s-max", dest="s_max", type=float, default=14.0)
    parser.add_argument("--rtol", type=float, default=1e-10)
    parser.add_argument("--atol", type=float, default=1e-12)
    parser.add_argument("--ds-out", dest="ds_out", type=float, default=1.0 / 256.0)
    args = parser.parse_args(argv)

    lanes = _ode.available_backends()
    print(f"active backend : {_ode.backend()}")
    print(f"available lanes: {', '.join(lanes)}")
    print(f"workload       : {len(WORKLOAD)} trajectories to s = {args.s_max:g}, "
          f"rtol = {args.rtol:g}, output every {args.ds_out:g}")

    times = {}
    outputs = {}
    for lane in lanes:
        times[lane], outputs[lane] = run_lane(lane, args)
        steps = sum(r[9] + r[10] for r in outputs[lane])
        print(f"{lane:>7}: {times[lane] * 1e3:8.1f} ms  ({steps} RK steps)")

    if "cython" in lanes:
        speedup = times["python"] / times["cython"]
        print(f"speedup: {speedup:.1f}x (python / cython)")
        agree = all(
            identical(a, b)
            for a, b in zip(outputs["python"], outputs["cython"])
        )
        word = "identical" if agree else "DIFFERENT"
        print(f"lane agreement: every sample, end state, and step count {word}")
        if not agree:
            for (label, *_), a, b in zip(
                WORKLOAD, outputs["python"], outputs["cython"]
            ):
                if not identical(a, b):
                    print(f"  mismatch in case: {label}", file=sys.stderr)
            return 1
    else:
        print("compiled lane not built; timed the pure-Python lane only")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
