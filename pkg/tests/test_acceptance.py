"""Acceptance suite: one test per criterion, each printing a verdict line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines as the
criteria complete.  Tolerances are pinned here, not configurable.
"""
import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from twinlab import alternating as alt
from twinlab import cli, perms, words

SEED = 20240817


def _line(num: int, ok: bool, detail: str) -> None:
    print(f"criterion {num:02d}: {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, detail


# -- 1: the alternating constant at truncation 13 -----------------------------------

def test_criterion_01_alternating_constant(capsys):
    convention = alt.arbitrate_convention(13)
    gain = alt.second_round_gain(13, convention)
    lo, hi = Fraction(989, 10000), Fraction(1100, 10000)
    with capsys.disabled():
        _line(1, lo <= gain < hi,
              f"convention={convention} gain={gain} ~ {float(gain):.6f} "
              f"in [0.0989, 0.1100)")


# -- 2: pattern-count oracle up to length 9, both conventions ------------------------

def test_criterion_02_pattern_count_oracle(capsys):
    ok = True
    for convention in alt.CONVENTIONS:
        brute = alt.count_good_bruteforce(9, convention)
        dp = alt.count_good_dp(9, convention)
        ok = ok and brute.counts == dp.counts
    with capsys.disabled():
        _line(2, ok, "dp == brute force on every key for k <= 9, both conventions")


# -- 3: hand-checkable truncation ----------------------------------------------------

def test_criterion_03_hand_value(capsys):
    # independent expansion: brute-force counts, explicit loops, no dp table
    brute = alt.count_good_bruteforce(4, "text")
    total = Fraction(0)
    for k1, k2 in itertools.product((3, 4), repeat=2):
        for p1 in range(1, k1 + 1):
            for p2 in range(1, k2 + 1):
                c1 = brute.count(p1, k1, True)
                c2 = brute.count(p2, k2, False)
                if c1 and c2:
                    total += Fraction(
                        2 * math.comb(k1 - p1 + p2 - 1, k1 - p1)
                        * math.comb(k2 - p2 + p1 - 1, k2 - p2) * c1 * c2,
                        math.factorial(k1 + k2 - 1))
    rederived = 2 * total
    value = alt.second_round_probability(4, "text")
    ok = rederived == Fraction(16, 315) == value
    with capsys.disabled():
        _line(3, ok, f"pair sum at truncation 4 = {value} (re-derived {rederived})")


# -- 4: repetition scanner vs brute force ---------------------------------------------

def test_criterion_04_words_oracle(capsys):
    ok = True
    for bits in itertools.product((1, 2), repeat=10):
        w = words.Word(np.array(bits), 2)
        for r in (2, 3):
            if words.max_rpower_length(w, r) != words.brute_force_max_rpower(w, r):
                ok = False
    for i in range(10_000):
        w = words.random_word(30, 3, SEED, stream_id=i)
        if words.max_rpower_length(w, 2) != words.brute_force_max_rpower(w, 2):
            ok = False
    with capsys.disabled():
        _line(4, ok, "scanner equals brute force on 2^10 binary words (r=2,3) "
                     "and 10^4 random ternary words")


# -- 5: upper tail and mean window -----------------------------------------------------

def test_criterion_05_upper_tail(capsys):
    n, k, r, trials = 100_000, 2, 2, 2000
    center = words.theory_center_M(n, k, r)
    summary = words.mc_experiment_M(n, k, r, trials, SEED,
                                    thresholds=[center + t for t in (1, 2, 3)])
    ok = abs(summary.mean - center) <= 3.0
    details = [f"mean={summary.mean:.3f} center={center:.3f}"]
    for t in (1, 2, 3):
        frac = summary.tail[center + t]
        bound = 2.0 ** -t
        slack = 3 * math.sqrt(frac * (1 - frac) / trials)
        ok = ok and frac <= bound + slack
        details.append(f"P[M>=c+{t}]={frac:.4f}<= {bound:.4f}+{slack:.4f}")
    with capsys.disabled():
        _line(5, ok, " ".join(details))


# -- 6: stability of the multiplicity statistic ----------------------------------------

def test_criterion_06_r_stability(capsys):
    k, m, trials = 2, 3, 500
    diffs = []
    for n in (10**3, 10**4, 10**5, 10**6):
        summary = words.mc_experiment_R(n, k, m, trials, SEED)
        diffs.append(summary.mean - words.theory_center_R(n, k, m))
    spread = max(diffs) - min(diffs)
    with capsys.disabled():
        _line(6, spread < 0.5,
              f"mean R - center over n=1e3..1e6: {[f'{d:+.3f}' for d in diffs]} "
              f"spread={spread:.3f} < 0.5")


# -- 7: partition soundness and success -------------------------------------------------

def test_criterion_07_partition(capsys):
    k2 = perms.PartitionParams(c_t=1.0, c_w=4.0)
    k3 = perms.PartitionParams(c_t=1.6, c_w=5.0)
    # mc_partition_success re-verifies every success and raises on violation
    t2 = perms.mc_partition_success(2, [50, 100, 500], trials=200, seed=SEED,
                                    params=k2)
    t3 = perms.mc_partition_success(3, [100, 300, 1000], trials=134, seed=SEED + 1,
                                    params=k3)
    runs = 3 * 200 + 3 * 134
    rates = [t2[r]["rate"] for r in (50, 100, 500)]

    def two_sigma(p1, n1, p2, n2):
        return 2 * math.sqrt(p1 * (1 - p1) / n1 + p2 * (1 - p2) / n2)

    ok = t2[500]["rate"] >= 0.9
    ok = ok and rates[0] <= rates[1] + two_sigma(rates[0], 200, rates[1], 200)
    ok = ok and rates[1] <= rates[2] + two_sigma(rates[1], 200, rates[2], 200)
    with capsys.disabled():
        _line(7, ok,
              f"zero soundness violations over {runs} runs; k=2 rates "
              f"r=50:{rates[0]:.2f} r=100:{rates[1]:.2f} r=500:{rates[2]:.2f} "
              f"(k=3 rates {[round(t3[r]['rate'], 2) for r in (100, 300, 1000)]})")


# -- 8: pairs-partition fraction grows --------------------------------------------------

def test_criterion_08_tight_pairs(capsys):
    fracs = []
    for r in (2, 3):
        perms_all = itertools.permutations(range(1, 2 * r + 1))
        hits = total = 0
        for p in perms_all:
            hits += perms.exists_partition_bruteforce(list(p), 2, False)
            total += 1
        fracs.append(hits / total)
    hits = 0
    samples = 100_000
    for i in range(samples):
        p = perms.random_permutation(8, SEED, stream_id=i).tolist()
        hits += perms.exists_partition_bruteforce(p, 2, False)
    fracs.append(hits / samples)
    ok = fracs[0] < fracs[1] < fracs[2]
    with capsys.disabled():
        _line(8, ok, f"fraction of pair-splittable permutations over r=2,3,4: "
                     f"{[f'{f:.4f}' for f in fracs]} (increasing)")


# -- 9: extremal-position density --------------------------------------------------------

def test_criterion_09_extrema_density(capsys):
    n = 10**4
    means = []
    for i in range(100):
        p = perms.random_permutation(n, SEED, stream_id=i)
        means.append(alt.count_extrema(p) / n)
    mean = sum(means) / len(means)
    with capsys.disabled():
        _line(9, 0.660 <= mean <= 0.673, f"mean extrema fraction {mean:.5f} in [0.660, 0.673]")


# -- 10: two-round procedure and the sloped-neighbour event -------------------------------

def test_criterion_10_two_round(capsys):
    n = 10**5
    summary = alt.mc_two_round(n, 50, SEED)
    norm = summary.mean / n
    lo, hi = 1 / 3 + 0.095, 1 / 3 + 0.105
    ok = lo <= norm <= hi
    res = alt.mc_sloped_same_side(10**6, 2, SEED)
    truncation = float(alt.second_round_probability(13, alt.arbitrate_convention(13)))
    ok = ok and res.estimate > truncation - 3 * res.standard_error
    with capsys.disabled():
        _line(10, ok,
              f"min twin length / n = {norm:.5f} in [{lo:.5f}, {hi:.5f}]; "
              f"same-side estimate {res.estimate:.5f} > truncation "
              f"{truncation:.5f} - 3se")


# -- 11: concentration of the two-round output ---------------------------------------------

def test_criterion_11_concentration(capsys):
    n = 10**4
    summary = alt.mc_two_round(n, 200, SEED)
    bound = 10 * math.sqrt(n)
    with capsys.disabled():
        _line(11, summary.sd <= bound,
              f"sd of min twin length {summary.sd:.2f} <= 10*sqrt(n) = {bound:.0f}")


# -- 12: byte-identical reports -------------------------------------------------------------

def test_criterion_12_determinism(tmp_path, capsys):
    cases = [
        ["words", "tails", "--n", "20000", "--k", "2", "--r", "2",
         "--trials", "60", "--seed", "5"],
        ["words", "rstat", "--n", "50000", "--k", "2", "--m", "3",
         "--trials", "60", "--seed", "5"],
        ["alt", "simulate", "--n", "20000", "--trials", "30", "--seed", "5"],
        ["alt", "slope", "--n", "50000", "--trials", "10", "--seed", "5"],
        ["perms", "prob", "--k", "2", "--r-values", "50,100", "--trials", "40",
         "--seed", "5", "--c-w", "4.0"],
    ]
    ok = True
    for idx, argv in enumerate(cases):
        blobs = []
        for tag in ("a", "b", "threaded"):
            out = tmp_path / f"{idx}-{tag}.json"
            extra = ["--threads", "8"] if tag == "threaded" else []
            code = cli.main(argv + ["--out", str(out)] + extra)
            ok = ok and code == 0
            blobs.append(out.read_bytes())
        ok = ok and blobs[0] == blobs[1] == blobs[2]
    with capsys.disabled():
        _line(12, ok, f"{len(cases)} experiment reports byte-identical across "
                      "reruns and --threads 8")
