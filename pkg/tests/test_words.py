import math

import numpy as np
import pytest

from twinlab import scan, words
from twinlab.words import (Word, brute_force_max_rpower, match_indicator,
                           max_power_of_length, max_rpower_length,
                           max_rpower_witness, mc_experiment_M, mc_experiment_R,
                           random_word, read_words, theory_center_M,
                           theory_center_R, theory_tail_M, theory_tail_R,
                           write_words)


def word(seq, k):
    return Word(np.array(seq, dtype=np.int64), k)


# -- word type and sampling ------------------------------------------------------

def test_word_invariants():
    with pytest.raises(ValueError):
        word([1, 2], 1)
    with pytest.raises(ValueError):
        word([0, 1], 2)
    with pytest.raises(ValueError):
        word([1, 3], 2)
    assert len(word([], 2)) == 0


def test_random_word_deterministic():
    a = random_word(50, 3, seed=11)
    b = random_word(50, 3, seed=11)
    assert np.array_equal(a.symbols, b.symbols)
    assert len(random_word(0, 2, seed=1)) == 0
    with pytest.raises(ValueError):
        random_word(5, 1, seed=0)


def test_random_word_frequency():
    n = 10**6
    w = random_word(n, 2, seed=3)
    ones = int(np.sum(w.symbols == 1))
    assert abs(ones - n / 2) <= 3 * math.sqrt(n / 4)


# -- match indicator ----------------------------------------------------------------

def test_match_indicator_examples():
    b = match_indicator(word([1, 2, 1, 2, 1], 2), 2)
    assert b.bits.tolist() == [True, True, True]
    b = match_indicator(word([1, 2, 3, 4], 4), 1)
    assert b.bits.tolist() == [False, False, False]
    b = match_indicator(word([2] * 7, 2), 3)
    assert b.bits.tolist() == [True] * 4
    assert len(match_indicator(word([1, 2], 2), 2).bits) == 0
    with pytest.raises(ValueError):
        match_indicator(word([1, 2], 2), 3)


# -- scanners -----------------------------------------------------------------------

def test_scanner_examples():
    assert max_rpower_length(word([1, 2, 1, 2, 1], 2), 2) == 2
    assert max_rpower_length(word([1] * 7, 2), 3) == 2
    assert max_rpower_length(word([1, 2, 3, 4, 5], 5), 2) == 0
    assert max_power_of_length(word([1] * 5, 2), 1) == 5
    assert max_power_of_length(word([1, 2, 1, 2, 1, 2], 2), 2) == 3
    assert max_power_of_length(word([1, 2, 3], 3), 2) == 1
    with pytest.raises(ValueError):
        max_rpower_length(word([1, 2], 2), 1)
    with pytest.raises(ValueError):
        max_power_of_length(word([1, 2], 2), 3)


def test_witness_points_at_power():
    w = word([3, 1, 2, 1, 2, 3], 3)
    m, start = max_rpower_witness(w, 2)
    assert m == 2 and start == 1
    assert max_rpower_witness(word([1, 2, 3], 3), 2) == (0, None)


def test_brute_force_examples():
    assert brute_force_max_rpower(word([1, 2, 1, 2, 1], 2), 2) == 2
    assert brute_force_max_rpower(word([], 2), 3) == 0


@pytest.mark.parametrize("backend", sorted(scan.backends()))
def test_oracle_equivalence_random(backend):
    impl = scan.backends()[backend]
    rng = np.random.default_rng(17)
    for _ in range(400):
        n = int(rng.integers(0, 13))
        k = int(rng.integers(2, 4))
        sym = np.ascontiguousarray(rng.integers(1, k + 1, size=n))
        w = Word(sym, k)
        for r in (2, 3):
            got, start = impl.max_rpower_scan(sym, r)
            assert got == brute_force_max_rpower(w, r)
            if got:
                block = sym[start:start + got]
                rep = np.concatenate([block] * r)
                assert np.array_equal(sym[start:start + r * got], rep)


def test_backends_agree_large():
    impls = scan.backends()
    if len(impls) < 2:
        pytest.skip("compiled backend unavailable")
    for seed in range(5):
        sym = np.ascontiguousarray(random_word(20_000, 2, seed).symbols)
        outs = {impl.max_rpower_scan(sym, 2) for impl in impls.values()}
        assert len(outs) == 1
        runs = {impl.longest_match_run(sym, 3) for impl in impls.values()}
        assert len(runs) == 1


def test_run_definition_link():
    # a repetition of block length m and multiplicity r exists iff the
    # match indicator at shift m has a run of ones of length >= (r-1)m
    rng = np.random.default_rng(23)
    for _ in range(100):
        n = int(rng.integers(4, 40))
        w = Word(rng.integers(1, 3, size=n), 2)
        for r in (2, 3):
            for m in range(1, n // r + 1):
                has_power = any(
                    all(np.array_equal(w.symbols[s:s + m],
                                       w.symbols[s + j * m:s + (j + 1) * m])
                        for j in range(1, r))
                    for s in range(0, n - r * m + 1))
                run = scan.longest_match_run(w.symbols, m)
                assert has_power == (run >= (r - 1) * m)


def test_monotonic_in_r_and_duality():
    # R(m) >= r says an exact-block-length-m repetition exists, which witnesses
    # M(r) >= m.  The converse is false: 121212 has a square of block length 2
    # but none of block length 1, so M(2) = 2 >= 1 while R(1) = 1 < 2.
    w = word([1, 2, 1, 2, 1, 2], 2)
    assert max_rpower_length(w, 2) >= 1 and max_power_of_length(w, 1) < 2
    rng = np.random.default_rng(29)
    for _ in range(60):
        n = int(rng.integers(2, 30))
        w = Word(rng.integers(1, 3, size=n), 2)
        assert max_rpower_length(w, 3) <= max_rpower_length(w, 2)
        for m in range(1, n + 1):
            assert max_power_of_length(w, m) >= 1
            for r in (2, 3):
                if max_power_of_length(w, m) >= r:
                    assert max_rpower_length(w, r) >= m


# -- analytic bounds ------------------------------------------------------------------

def test_centers():
    assert theory_center_M(1024, 2, 2) == pytest.approx(10.0)
    assert theory_center_M(1, 5, 3) == 0.0
    assert theory_center_M(3**8, 3, 3) == pytest.approx(4.0)
    assert theory_center_R(2**12, 2, 3) == pytest.approx(5.0)


def test_tail_bounds():
    assert theory_tail_M(100, 2, 2, 3, "upper") == pytest.approx(0.125)
    assert theory_tail_M(100, 7, 4, 0, "upper") == 1.0
    assert theory_tail_M(100, 2, 2, 1, "lower", c_lower=1.0) == pytest.approx(math.exp(-1))
    assert theory_tail_R(100, 2, 3, 1, "upper") == pytest.approx(0.125)
    assert theory_tail_R(100, 2, 3, 0, "upper") == 1.0
    with pytest.raises(ValueError):
        theory_tail_M(100, 2, 2, -1, "upper")
    with pytest.raises(ValueError):
        theory_tail_R(100, 2, 3, 1, "sideways")


def test_tail_bounds_monotone_and_bounded():
    for t0, t1 in zip(np.linspace(0, 5, 20), np.linspace(0, 5, 20)[1:]):
        for side in ("upper", "lower"):
            a = theory_tail_M(1000, 2, 2, t0, side)
            b = theory_tail_M(1000, 2, 2, t1, side)
            assert 0 <= b <= a <= 1


# -- experiments ---------------------------------------------------------------------

def test_mc_deterministic_and_thread_invariant():
    a = mc_experiment_M(2000, 2, 2, 20, seed=5, thresholds=[10])
    b = mc_experiment_M(2000, 2, 2, 20, seed=5, thresholds=[10])
    c = mc_experiment_M(2000, 2, 2, 20, seed=5, thresholds=[10], threads=8)
    assert a == b == c


def test_mc_single_trial():
    s = mc_experiment_R(100, 2, 2, 1, seed=9)
    assert s.min == s.max == s.mean


# -- files -------------------------------------------------------------------------

def test_word_file_roundtrip(tmp_path):
    ws = [random_word(10, 3, seed=i) for i in range(4)]
    path = tmp_path / "words.txt"
    write_words(str(path), ws)
    back = read_words(str(path))
    assert len(back) == 4
    for a, b in zip(ws, back):
        assert a.alphabet_size == b.alphabet_size
        assert np.array_equal(a.symbols, b.symbols)
