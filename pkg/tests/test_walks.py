import itertools
from collections import Counter
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from mazerobot.lattice import add, origin
from mazerobot.walks import (DEGENERATE, RECURRENT, TRANSIENT, GridFormatError, GridTooLarge,
                             MixtureSpec, WalkSpec, classify_recurrence, dp_step_distribution,
                             dump_grid, first_return_cdf, first_return_probabilities, load_grid,
                             max_multinomial, mixed_walk, mixture_distribution,
                             origin_return_series, stirling_asymptotic, z3_origin_return_exact,
                             z3_first_return_cdf, z3_point_probability_exact,
                             z3_return_partial_sum)


def brute_force_law(w: WalkSpec, n: int) -> Counter:
    """Sum over all n-step sequences of step vectors."""
    law = Counter({origin(w.dimension): Fraction(1)}) if n == 0 else Counter()
    if n:
        for seq in itertools.product(list(zip(w.vectors, w.weights)), repeat=n):
            x, p = origin(w.dimension), Fraction(1)
            for v, q in seq:
                x, p = add(x, v), p * q
            law[x] += p
    return law


@st.composite
def walks(draw, max_dim=2):
    k = draw(st.integers(1, max_dim))
    vecs = draw(st.lists(st.tuples(*[st.integers(-2, 2)] * k), min_size=1, max_size=4, unique=True))
    raw = draw(st.lists(st.integers(1, 5), min_size=len(vecs), max_size=len(vecs)))
    total = sum(raw)
    return WalkSpec.from_weights(k, [(v, Fraction(c, total)) for v, c in zip(vecs, raw)])


@settings(max_examples=40, deadline=None)
@given(walks(), st.integers(0, 4))
def test_dp_matches_path_enumeration(w, n):
    law = brute_force_law(w, n)
    grid = dp_step_distribution(w, n, n * w.reach)
    got = {x: p for x, p in grid.items() if p}
    assert got == {x: p for x, p in law.items() if p}
    assert grid.stored_mass == 1 and grid.truncation_mass == 0


@settings(max_examples=20, deadline=None)
@given(walks(), st.integers(0, 6), st.integers(0, 3))
def test_truncated_grid_is_the_restriction(w, n, radius):
    full = dp_step_distribution(w, n, n * w.reach)
    small = dp_step_distribution(w, n, radius)
    for x, p in small.items():
        assert full.mass(x) == p
    assert small.stored_mass + small.truncation_mass == 1


@pytest.mark.parametrize("k", [1, 2, 3])
def test_simple_walk_parity_and_symmetry(k):
    n = 7
    g = dp_step_distribution(WalkSpec.simple(k), n, n)
    for x, p in g.items():
        if sum(x) % 2 != n % 2:
            assert p == 0
        assert g.mass(tuple(-c for c in x)) == p
        assert g.mass(tuple(reversed(x))) == p


def test_float_mode_tracks_rational():
    w = WalkSpec.lazy(2)
    a = dp_step_distribution(w, 12, 4)
    b = dp_step_distribution(w, 12, 4, mode="float")
    for (x, p), (y, q) in zip(a.items(), b.items()):
        assert x == y and abs(float(p) - q) < 1e-12


def test_mass_outside_the_ball_is_an_error():
    g = dp_step_distribution(WalkSpec.simple(2), 3, 1)
    with pytest.raises(KeyError):
        g.mass((1, 1))


def test_grid_cap():
    with pytest.raises(GridTooLarge):
        dp_step_distribution(WalkSpec.simple(8), 40, 40)


def test_walkspec_validation():
    with pytest.raises(ValueError):
        WalkSpec.from_weights(1, [((1,), Fraction(1, 2))])
    with pytest.raises(ValueError):
        WalkSpec.from_weights(1, [((1,), Fraction(3, 2)), ((-1,), Fraction(-1, 2))])
    w = WalkSpec.from_weights(1, [((1,), Fraction(1, 4)), ((1,), Fraction(1, 4)), ((-1,), Fraction(1, 2))])
    assert w.vectors == [(-1,), (1,)] and w.weights == [Fraction(1, 2)] * 2


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 9), st.tuples(*[st.integers(-3, 3)] * 3))
def test_z3_point_probability_matches_dp(n, x):
    assert z3_point_probability_exact(n, x) == dp_step_distribution(WalkSpec.simple(3), n, 9).mass(x)


def test_origin_series_uses_the_closed_form():
    series = origin_return_series(WalkSpec.simple(3), 16)
    assert series == [z3_origin_return_exact(n) for n in range(17)]
    assert z3_return_partial_sum(16) == sum(series)


def test_first_return_in_one_dimension():
    f = first_return_probabilities(WalkSpec.simple(1), 20)
    for m in range(1, 11):
        assert f[2 * m] == Fraction(comb(2 * m, m), (2 * m - 1) * 4 ** m)
        assert f[2 * m - 1] == 0


def test_renewal_identity():
    w = WalkSpec.simple(2)
    u = origin_return_series(w, 14)
    f = first_return_probabilities(w, 14)
    for n in range(1, 15):
        assert u[n] == sum(f[j] * u[n - j] for j in range(1, n + 1))
    cdf = first_return_cdf(w, 14)
    assert cdf[-1] == sum(f) and cdf == sorted(cdf)


def test_z3_renewal_cdf_matches_first_return_dp():
    fast = z3_first_return_cdf(60)
    exact = first_return_cdf(WalkSpec.simple(3), 60)
    assert max(abs(a - float(b)) for a, b in zip(fast, exact)) < 1e-14


def test_z3_renewal_cdf_sits_above_the_partial_sum_bound():
    cdf = z3_first_return_cdf(2000)
    for n in (10, 100, 1000, 2000):
        assert cdf[n] >= 1 - 1 / float(z3_return_partial_sum(n))
    # Polya's return probability for Z^3 is 0.3405...
    assert 0.33 < cdf[-1] < 0.3405


@pytest.mark.parametrize("n,value", [(1, 1), (3, 6), (4, 12), (6, 90)])
def test_max_multinomial_small(n, value):
    assert max_multinomial(n) == value


def test_stirling_at_one():
    assert stirling_asymptotic(1) == pytest.approx(0.46659, abs=1e-5)


def test_mixture_with_certain_first_component():
    a, b = WalkSpec.simple(2), WalkSpec.stay(2)
    mix = mixture_distribution(MixtureSpec(a, b, Fraction(1)), 5, 5)
    assert mix == dp_step_distribution(a, 5, 5)


def test_mixture_matches_mixed_step_law():
    m = MixtureSpec(WalkSpec.simple(2), WalkSpec.lazy(2), Fraction(1, 3))
    for n in range(6):
        assert mixture_distribution(m, n, n) == dp_step_distribution(mixed_walk(m), n, n)


def test_mixture_needs_matching_dimensions():
    with pytest.raises(Exception):
        MixtureSpec(WalkSpec.simple(2), WalkSpec.simple(3), Fraction(1, 2))


def test_grid_text_round_trip(tmp_path):
    for mode in ("rational", "float"):
        g = dp_step_distribution(WalkSpec.lazy(2), 6, 3, mode=mode)
        assert load_grid(dump_grid(g)) == g


def test_grid_parse_error_has_a_line():
    text = dump_grid(dp_step_distribution(WalkSpec.simple(1), 2, 2))
    lines = text.splitlines()
    lines[7] = "0 banana"
    with pytest.raises(GridFormatError) as info:
        load_grid("\n".join(lines))
    assert info.value.line == 8


@pytest.mark.parametrize("k,verdict,alpha", [(1, RECURRENT, 0.5), (2, RECURRENT, 1.0)])
def test_classify_low_dimensions(k, verdict, alpha):
    rep = classify_recurrence(WalkSpec.simple(k), 200)
    assert rep.verdict == verdict
    assert rep.alpha == pytest.approx(alpha, abs=0.1)


def test_classify_degenerate_and_short():
    line = WalkSpec.from_weights(2, [((1, 0), Fraction(1, 2)), ((-1, 0), Fraction(1, 2))])
    assert classify_recurrence(line, 50).verdict == DEGENERATE
    with pytest.raises(ValueError):
        classify_recurrence(WalkSpec.simple(1), 5)


@pytest.mark.slow
def test_classify_z3():
    rep = classify_recurrence(WalkSpec.simple(3), 200)
    assert rep.verdict == TRANSIENT
    assert rep.alpha == pytest.approx(1.5, abs=0.1)
