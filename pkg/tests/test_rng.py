import numpy as np
from hypothesis import given, strategies as st

from mazerobot.rng import MASK64, RngStream, derive_seed, mix64, word, words

seeds = st.integers(0, MASK64)


def test_splitmix64_reference_value():
    # first output of the reference SplitMix64 generator seeded with 0
    assert word(0, 0) == 0xE220A8397B1DCDAF


@given(seeds, st.integers(0, 1000))
def test_vectorised_words_match_scalar(seed, start):
    w = words(seed, start, 5)
    assert [int(x) for x in w] == [word(seed, start + i) for i in range(5)]


@given(seeds, st.integers(0, 500))
def test_bits_are_lsb_first(seed, t):
    s = RngStream(seed)
    assert s.bit(t) == (word(seed, t // 64) >> (t % 64)) & 1


@given(seeds)
def test_sequential_reads_match_block_read(seed):
    a = RngStream(seed)
    seq = [a.next_bit() for _ in range(150)]
    assert seq == RngStream(seed).bits(150).tolist()


@given(seeds, st.integers(0, 200), st.integers(0, 200))
def test_derived_seeds_distinct(master, i, j):
    if i != j:
        assert derive_seed(master, i) != derive_seed(master, j)


def test_bits_roughly_balanced():
    b = RngStream(123).bits(100_000)
    assert abs(b.mean() - 0.5) < 0.01
    assert b.dtype == np.uint8


def test_mix64_is_64_bit():
    assert 0 <= mix64(MASK64) <= MASK64
