"""Steps per second of the compiled and pure-Python kernels.

    python benchmarks/bench_kernels.py [--steps N]

Both backends run the same lanes from the same seeds; the script checks
that they end in the same system state before reporting the timings.
"""
import argparse
import time

from mazerobot import _core
from mazerobot.automaton import BallIndex, Lane
from mazerobot.harness.experiments import walk_first_returns
from mazerobot.programs import get_program
from mazerobot.walks import WalkSpec


def time_lane(name, steps, backend, ball=False):
    p = get_program(name)
    idx = BallIndex(p.dimension, 2) if ball else None
    lane = Lane(p.automaton, p.flag_set, 1, ball=idx, backend=backend)
    t = time.perf_counter()
    lane.advance(steps)
    return time.perf_counter() - t, lane.system_state()


def time_walk(steps, backend):
    t = time.perf_counter()
    out = walk_first_returns(WalkSpec.simple(3), steps, [1, 2, 3, 4], backend=backend)
    return time.perf_counter() - t, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--steps", type=int, default=200_000)
    args = ap.parse_args()
    if _core.compiled is None:
        raise SystemExit("compiled kernels are not built; run: python setup.py build_ext --inplace")
    n = args.steps
    print(f"{'case':<22}{'cython ns/step':>16}{'python ns/step':>16}{'speedup':>10}")
    cases = [(f"{name} advance", lambda b, name=name: time_lane(name, n, b)) for name in ("z2", "z4", "z8")]
    cases.append(("z4 advance + ball", lambda b: time_lane("z4", n, b, ball=True)))
    cases.append(("Z^3 walk returns", lambda b: time_walk(n // 4, b)))
    for label, fn in cases:
        tc, rc = fn("cython")
        tp, rp = fn("python")
        assert rc == rp, f"{label}: backends disagree"
        print(f"{label:<22}{tc / n * 1e9:>16.1f}{tp / n * 1e9:>16.1f}{tp / tc:>10.0f}x")


if __name__ == "__main__":
    main()
