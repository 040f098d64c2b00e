"""Acceptance criteria 1-10, each at its stated tolerance and runtime limit.

A PASS/FAIL line per criterion is printed and repeated in the terminal
summary.
"""
import io
import itertools
import random
import subprocess
import sys
from contextlib import redirect_stdout
from fractions import Fraction
from math import factorial

import pytest

from _criteria import criterion
from mazerobot.automaton import RationalAutomaton, compile_rational, path_displacements, verify_compilation
from mazerobot.harness import (ExperimentConfig, distribution_experiment, flag_choice_experiment,
                               increment_experiment, return_experiment)
from mazerobot.harness.cli import main
from mazerobot.automaton import gadget_absorption
from mazerobot.lattice import origin
from mazerobot.programs import build_z8
from mazerobot.walks import (MixtureSpec, WalkSpec, classify_recurrence, dp_step_distribution,
                             max_multinomial, max_multinomial_parts, mixed_walk,
                             mixture_distribution, shifted_bound_check, stirling_asymptotic,
                             z3_origin_return_exact, z3_upper_bound)

Z3 = WalkSpec.simple(3)


def enumerate_origin_paths(n: int) -> Fraction:
    """Brute force: fraction of the 6^n step sequences that end at the origin."""
    moves = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]
    hits = sum(1 for seq in itertools.product(moves, repeat=n)
               if all(sum(c) == 0 for c in zip(*seq)))
    return Fraction(hits, 6 ** n)


@criterion(1, "Z^3 origin return: closed form == DP for n <= 30; 1/6 and 5/72", 30)
def test_ac1_origin_return_oracle():
    assert enumerate_origin_paths(2) == Fraction(1, 6)
    assert enumerate_origin_paths(4) == Fraction(5, 72)
    assert z3_origin_return_exact(2) == Fraction(1, 6)
    assert z3_origin_return_exact(4) == Fraction(5, 72)
    for n in range(31):
        dp = dp_step_distribution(Z3, n, 0).mass((0, 0, 0))
        assert z3_origin_return_exact(n) == dp, n


@criterion(2, "bound chain P(Y_2n=0) <= C(2n,n) C_n / 12^n for 1 <= n <= 200, equality at n=1", 60)
def test_ac2_bound_chain():
    assert z3_origin_return_exact(2) == z3_upper_bound(1)
    for n in range(1, 201):
        assert z3_origin_return_exact(2 * n) <= z3_upper_bound(n), n


@criterion(3, "upper bound / Stirling form in [0.95, 1.05] at n=200", 5)
def test_ac3_stirling_ratio():
    ratio = float(z3_upper_bound(200)) / stirling_asymptotic(200)
    print(f"ratio at n=200: {ratio:.6f}")
    assert 0.95 <= ratio <= 1.05


@criterion(4, "C_n equals the brute-force maximum, maximisers balanced, n <= 12", 5)
def test_ac4_balanced_multinomial():
    for n in range(13):
        comps = [(i, j, n - i - j) for i in range(n + 1) for j in range(n - i + 1)]
        value = {c: factorial(n) // (factorial(c[0]) * factorial(c[1]) * factorial(c[2])) for c in comps}
        best = max(value.values())
        assert max_multinomial(n) == best
        for c, v in value.items():
            if v == best:
                assert max(c) - min(c) <= 1, (n, c)
        parts = max_multinomial_parts(n)
        assert sum(parts) == n and max(parts) - min(parts) <= 1


@criterion(5, "shifted-point bound for all |x|_1 <= 4, n <= 12, exact", 60)
def test_ac5_shifted_bound():
    pts = [x for x in itertools.product(range(-4, 5), repeat=3) if sum(map(abs, x)) <= 4]
    assert len(pts) == 129
    for n in range(1, 13):
        for x in pts:
            assert shifted_bound_check(n, x), (n, x)


MIXTURES = [
    MixtureSpec(WalkSpec.simple(3), WalkSpec.stay(3), Fraction(1, 2)),
    MixtureSpec(WalkSpec.simple(2), WalkSpec.lazy(2, Fraction(1, 3)), Fraction(2, 5)),
    MixtureSpec(WalkSpec.simple(1),
                WalkSpec.from_weights(1, [((1,), Fraction(3, 4)), ((2,), Fraction(1, 4))]),
                Fraction(1, 3)),
]


@criterion(6, "mixture double sum == one-step-mixed DP (n <= 12); Z^3/lazy decay n^1.5", 60)
def test_ac6_mixture_identity():
    for m in MIXTURES:
        mixed = mixed_walk(m)
        for n in range(13):
            r = n * max(m.component_a.reach, m.component_b.reach)
            assert mixture_distribution(m, n, r) == dp_step_distribution(mixed, n, r), (m, n)
    m = MIXTURES[0]
    scaled_sq = [mixture_distribution(m, n, 0).mass((0, 0, 0)) ** 2 * n ** 3 for n in range(10, 21)]
    # (mass * n^1.5)^2 compared exactly
    assert all(a >= b for a, b in zip(scaled_sq, scaled_sq[1:]))


def random_distribution(rng: random.Random) -> list[Fraction]:
    b = rng.randint(1, 5)
    q = rng.randint(b, 8)
    cuts = sorted(rng.sample(range(1, q), b - 1))
    parts = [y - x for x, y in zip([0] + cuts, cuts + [q])]
    return [Fraction(c, q) for c in parts]


@criterion(7, "compiled coin-flip gadgets absorb exactly, zero net displacement (20 cases)", 30)
def test_ac7_compiler_round_trip():
    rng = random.Random(7)
    for case in range(20):
        probs = random_distribution(rng)
        k = 3
        moves = [rng.choice([1, -1, 2, -2, 3, -3]) for _ in probs]
        table = {"s": [(p, "t", d, 0) for p, d in zip(probs, moves)], "t": []}
        ra = RationalAutomaton.from_mapping(k, 0, "s", table)
        robot = compile_rational(ra, axis=2)
        report = verify_compilation(ra, robot)["s"]
        assert report["match"], (case, probs, report)
        assert [Fraction(x) for x in report["absorbed"]] == probs
        disp = path_displacements(robot, "s")
        assert all(d == {origin(k)} for d in disp.values()), (case, probs)


@criterion(8, "program fidelity: z2 law at step 8, z4 pebble increments, z8 5-way choice", 300)
def test_ac8_program_fidelity():
    z2 = distribution_experiment(ExperimentConfig("z2", trials=10**5, budget=10**4, seed=8,
                                                  extra={"checkpoint": 8})).results
    print("z2 chi-square", z2["chi_square"])
    assert z2["completed_trials"] == 10**5
    assert z2["chi_square"]["p_value"] > 0.001

    z4 = increment_experiment(ExperimentConfig("z4", trials=6000, budget=3000, seed=4)).results
    b = z4["phases"]["B"]
    print("z4 increments", b["counts"], b["chi_square"]["p_value"])
    assert b["events"] >= 10**4
    assert all(p == Fraction(1, 4) for p in b["exact_probabilities"].values())
    assert b["chi_square"]["p_value"] > 0.001

    p = build_z8()
    assert gadget_absorption(p.automaton, "F") == [Fraction(1, 5)] * 5
    z8 = flag_choice_experiment(ExperimentConfig("z8", trials=10**5, seed=88)).results
    print("z8 outcomes", z8["outcomes"], z8["chi_square"]["p_value"])
    assert z8["exact_uniform"]
    assert sum(z8["outcomes"].values()) == 10**5
    assert z8["chi_square"]["p_value"] > 0.001


@criterion(9, "recurrence evidence Z^1, Z^2, transience Z^3; Z^3 return plateau, consistent with the partial-sum bound at 3 sigma", 600)
def test_ac9_recurrence_transience():
    expect = {1: ("recurrent_evidence", 0.5), 2: ("recurrent_evidence", 1.0), 3: ("transient_evidence", 1.5)}
    for k, (verdict, alpha) in expect.items():
        rep = classify_recurrence(WalkSpec.simple(k), 200)
        print(f"Z^{k}: {rep.verdict} alpha={rep.alpha:.4f}")
        assert rep.verdict == verdict
        assert abs(rep.alpha - alpha) <= 0.1

    res = return_experiment(ExperimentConfig("walk:z3", trials=10**4, budget=10**6, seed=9)).results
    by_budget = {c["budget"]: c for c in res["checkpoints"]}
    lo, hi = by_budget[10**4], by_budget[10**6]
    for c in (lo, hi):
        b = c["lower_bound"]
        print(f"Z^3 budget {c['budget']}: frequency {c['frequency']} (sigma {c['sigma']:.4f}), "
              f"bound {b['value']:.5f}, strictly above {b['above']}, within 3 sigma {b['consistent']}")
    print("exact CDF at 1e4:", lo["exact_cdf"], lo["oracle_check"])
    assert hi["frequency"] - lo["frequency"] < 0.05
    assert res["non_decreasing"]
    # the bound is tight to ~1e-5 at 1e4, far inside one sigma, so "exceeds"
    # is judged at the pre-registered 3 sigma level
    for c in (lo, hi):
        assert c["lower_bound"]["consistent"], c
    assert lo["exact_cdf"] >= lo["lower_bound"]["value"]
    assert lo["oracle_check"]["passed"]


DETERMINISM_COMMANDS = [
    ["simulate", "z6", "--budget", "20000", "--seed", "11"],
    ["coverage", "z4", "--budget", "5000", "--trials", "20", "--seed", "12"],
    ["returns", "walk:z2", "--budget", "1000", "--trials", "300", "--seed", "13"],
    ["compare", "z2", "--checkpoint", "4", "--trials", "2000", "--seed", "14"],
    ["compare", "z8", "--what", "flag-choice", "--trials", "500", "--seed", "15"],
    ["analyze", "classify", "--walk", "walk:z2", "--horizon", "60"],
    ["analyze", "mixture", "--walk", "walk:z3", "--n", "5", "--radius", "2"],
]


def _run_inprocess(argv) -> bytes:
    buf = io.StringIO()
    with redirect_stdout(buf):
        assert main(argv) == 0
    return buf.getvalue().encode()


@criterion(10, "repeated CLI invocations give byte-identical JSON", 60)
def test_ac10_determinism():
    for argv in DETERMINISM_COMMANDS:
        assert _run_inprocess(argv) == _run_inprocess(argv), argv
    # across fresh interpreters too (hash seeds differ per process)
    argv = DETERMINISM_COMMANDS[1]
    outs = [subprocess.run([sys.executable, "-m", "mazerobot", *argv], capture_output=True, check=True).stdout
            for _ in range(2)]
    assert outs[0] == outs[1]
    assert outs[0] == _run_inprocess(argv)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
