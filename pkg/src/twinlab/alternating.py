"""Alternating-subsequence statistics and the computer-aided twin constant.

The certified part works in exact rational arithmetic: enumerate (or count
by dynamic programming) the "good" patterns, up-down alternations whose
final step continues monotonically, keyed by first value, length and the
order of the second-to-last value against the first, then evaluate the
truncated double sum over pattern pairs.  The Monte Carlo part simulates
the two-round extrema procedure and the nearest-sloped-neighbour event on
random permutations.

Two goodness conventions exist because the source pseudocode checks a
different final triple than the accompanying text; ``appendix`` is the
literal pseudocode (degenerate for lengths >= 4: its loop forces an
extremum on the very triple its last line wants monotone) and ``text`` is
the consistent reading.  Length 3 uses the text rule in both modes, where
the pseudocode's final line would index before the pattern start.
"""
from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from twinlab.harness import McSummary, derive_stream, run_trials, summarize

__all__ = [
    "count_extrema",
    "extrema_mask",
    "sloped_positions",
    "is_alternating",
    "check_good",
    "PatternCountTable",
    "count_good_bruteforce",
    "count_good_dp",
    "second_round_probability",
    "second_round_gain",
    "lower_bound_constant",
    "arbitrate_convention",
    "SlopedSameSide",
    "mc_sloped_same_side",
    "TwoRoundSplit",
    "simulate_two_round_procedure",
    "mc_two_round",
]

CONVENTIONS = ("text", "appendix")


# -- elementary position statistics -------------------------------------------

def extrema_mask(values: np.ndarray) -> np.ndarray:
    """Mask of extremal positions: interior local max/min plus both endpoints."""
    n = len(values)
    if n == 0:
        return np.zeros(0, dtype=bool)
    mask = np.empty(n, dtype=bool)
    mask[0] = mask[-1] = True
    if n > 2:
        up_in = values[1:-1] > values[:-2]
        up_out = values[1:-1] > values[2:]
        mask[1:-1] = up_in == up_out
    return mask


def count_extrema(perm) -> int:
    """Number of extremal positions (endpoints always count; 1 for n == 1)."""
    values = np.asarray(perm)
    if len(values) < 1:
        raise ValueError("permutation must be nonempty")
    return int(extrema_mask(values).sum())


def sloped_positions(perm) -> np.ndarray:
    """0-based interior indices whose three-term window is strictly monotone."""
    values = np.asarray(perm)
    if len(values) < 3:
        return np.empty(0, dtype=np.int64)
    return np.flatnonzero(~extrema_mask(values)[1:-1]) + 1


def is_alternating(values) -> bool:
    """Strictly up-down (or down-up) along the whole sequence."""
    v = np.asarray(values, dtype=np.int64)
    if len(v) < 3:
        return len(v) < 2 or v[0] != v[1]
    d = np.diff(v)
    if (d == 0).any():
        return False
    return bool((d[1:] * d[:-1] < 0).all())


# -- good patterns --------------------------------------------------------------

def check_good(pattern, convention: str = "text") -> bool:
    """Whether a pattern alternates into a final monotone (sloped) step.

    text: p1 < p2 > p3 < ... through the second-to-last entry, and the last
    three entries are monotone.  appendix: the literal pseudocode (peak/valley
    window checks at positions 2..k-2, then the monotone test one entry
    earlier); length 3 falls back to the text rule in both modes.
    """
    p = list(pattern)
    k = len(p)
    if k < 3:
        raise ValueError("patterns have length >= 3")
    if sorted(p) != list(range(1, k + 1)):
        raise ValueError("pattern must be a permutation of 1..k")
    if convention not in CONVENTIONS:
        raise ValueError(f"convention must be one of {CONVENTIONS}")
    if convention == "text" or k == 3:
        for i in range(k - 2):
            if i % 2 == 0:
                if not p[i] < p[i + 1]:
                    return False
            else:
                if not p[i] > p[i + 1]:
                    return False
        a, b, c = p[k - 3], p[k - 2], p[k - 1]
        return (a < b < c) or (a > b > c)
    for i in range(2, k - 1):  # 1-based positions 2..k-2
        v = p[i - 1]
        if i % 2 == 0:
            if not (v > p[i - 2] and v > p[i]):
                return False
        else:
            if not (v < p[i - 2] and v < p[i]):
                return False
    a, b, c = p[k - 4], p[k - 3], p[k - 2]
    return (a < b < c) or (a > b > c)


@dataclass(frozen=True)
class PatternCountTable:
    """Counts of good patterns keyed by (first value, length, second-to-last > first)."""

    counts: dict
    max_k: int
    convention: str

    def count(self, p1: int, k: int, x: bool) -> int:
        return self.counts.get((p1, k, bool(x)), 0)

    def total(self, k: int) -> int:
        return sum(v for (p1, kk, x), v in self.counts.items() if kk == k)

    def write_csv(self, path: str) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["p1", "k", "x", "count"])
            for (p1, k, x) in sorted(self.counts):
                writer.writerow([p1, k, int(x), self.counts[(p1, k, x)]])


def count_good_bruteforce(max_k: int, convention: str = "text") -> PatternCountTable:
    """Exhaustive enumeration; refuses beyond length 10 (factorial cost)."""
    if not 3 <= max_k <= 10:
        raise ValueError("brute-force enumeration is limited to 3 <= max_k <= 10")
    counts: dict = {}
    for k in range(3, max_k + 1):
        for p in itertools.permutations(range(1, k + 1)):
            if p[0] < p[1] and check_good(p, convention):
                key = (p[0], k, p[k - 2] > p[0])
                counts[key] = counts.get(key, 0) + 1
    return PatternCountTable(counts, max_k, convention)


def count_good_dp(max_k: int, convention: str = "text") -> PatternCountTable:
    """Same table as the brute force, by an insertion construction.

    State after placing j values: (rank of the first entry, rank of the last
    entry) among the j placed; relative ranks determine every comparison the
    goodness test reads.  Appendix mode is zero for lengths >= 4 (see module
    docstring), so only length 3 contributes there.
    """
    if not 3 <= max_k <= 20:
        raise ValueError("count_good_dp supports 3 <= max_k <= 20")
    if convention not in CONVENTIONS:
        raise ValueError(f"convention must be one of {CONVENTIONS}")
    counts: dict = {}
    for k in range(3, max_k + 1):
        if convention == "appendix" and k >= 4:
            continue
        states = {(1, 1): 1}
        for j in range(1, k - 1):
            ascend = j % 2 == 1
            nxt: dict = {}
            for (r1, rl), cnt in states.items():
                for v in range(1, j + 2):
                    if ascend != (v > rl):
                        continue
                    key = (r1 + 1 if v <= r1 else r1, v)
                    nxt[key] = nxt.get(key, 0) + cnt
            states = nxt
        ascend = (k - 2) % 2 == 1
        for (r1, rl), cnt in states.items():
            x = rl > r1
            lo, hi = (rl + 1, k) if ascend else (1, rl)
            if lo > hi:
                continue
            below = max(0, min(hi, r1) - lo + 1)  # final value <= r1 shifts p1 up
            above = (hi - lo + 1) - below
            if below:
                key = (r1 + 1, k, x)
                counts[key] = counts.get(key, 0) + cnt * below
            if above:
                key = (r1, k, x)
                counts[key] = counts.get(key, 0) + cnt * above
    return PatternCountTable(counts, max_k, convention)


# -- the exact constant -----------------------------------------------------------

def second_round_probability(max_k: int, convention: str = "text",
                             table: PatternCountTable | None = None) -> Fraction:
    """Truncated double sum over good-pattern pairs, as an exact rational.

    Non-decreasing in max_k.  This is the raw pair sum; the per-set share
    entering the twin-length bound is half of it (see second_round_gain).
    """
    if max_k < 3:
        raise ValueError("max_k must be >= 3")
    if table is None:
        table = count_good_dp(max_k, convention)
    elif table.max_k < max_k or table.convention != convention:
        raise ValueError("table does not cover the requested sum")
    total = Fraction(0)
    for k1 in range(3, max_k + 1):
        for k2 in range(3, max_k + 1):
            fact = math.factorial(k1 + k2 - 1)
            for p1 in range(1, k1 + 1):
                c1 = table.count(p1, k1, True)
                if not c1:
                    continue
                for p2 in range(1, k2 + 1):
                    c2 = table.count(p2, k2, False)
                    if not c2:
                        continue
                    ways = (math.comb(k1 - p1 + p2 - 1, k1 - p1)
                            * math.comb(k2 - p2 + p1 - 1, k2 - p2))
                    total += Fraction(4 * ways * c1 * c2, fact)
    return total


def second_round_gain(max_k: int, convention: str = "text",
                      table: PatternCountTable | None = None) -> Fraction:
    """Per-set second-round pickup: half the pair sum.

    Each half of the permutation feeds its second-round extrema to one of
    the two output sets, so the per-position pair sum contributes to a
    single set's length at half weight per position of the whole input.
    """
    return second_round_probability(max_k, convention, table) / 2


def lower_bound_constant(max_k: int, convention: str = "text",
                         table: PatternCountTable | None = None) -> Fraction:
    """1/3 plus the second-round gain (the twin-length constant)."""
    return Fraction(1, 3) + second_round_gain(max_k, convention, table)


def arbitrate_convention(max_k: int = 13, floor: Fraction = Fraction(989, 10000)) -> str:
    """The convention whose gain at max_k reaches the published floor."""
    for convention in CONVENTIONS:
        if second_round_gain(max_k, convention) >= floor:
            return convention
    raise ValueError(f"no convention reaches {floor} at max_k={max_k}")


# -- Monte Carlo ---------------------------------------------------------------

@dataclass(frozen=True)
class SlopedSameSide:
    """Pooled frequency of same-side nearest sloped neighbours."""

    per_trial: McSummary
    same: int
    eligible: int

    @property
    def estimate(self) -> float:
        return self.same / self.eligible if self.eligible else math.nan

    @property
    def standard_error(self) -> float:
        p = self.estimate
        return math.sqrt(p * (1 - p) / self.eligible) if self.eligible else math.nan


def _sloped_same_side_counts(values: np.ndarray) -> tuple[int, int]:
    sloped = sloped_positions(values)
    if len(sloped) < 3:
        return 0, 0
    mid = sloped[1:-1]
    left = sloped[:-2]
    right = sloped[2:]
    same = (values[left] > values[mid]) == (values[right] > values[mid])
    return int(same.sum()), len(mid)


def mc_sloped_same_side(n: int, trials: int, seed: int,
                        threads: int | None = None) -> SlopedSameSide:
    """For sloped positions with sloped neighbours on both sides, how often
    both neighbours lie on the same side of the middle value.

    Positions lacking a sloped neighbour on either side are excluded from
    numerator and denominator.
    """
    if n < 10:
        raise ValueError("n must be >= 10")

    def worker(i: int) -> tuple[int, int]:
        rng = derive_stream(seed, i).generator()
        return _sloped_same_side_counts(rng.permutation(n) + 1)

    pairs = run_trials(trials, worker, threads)
    ratios = [s / e if e else math.nan for s, e in pairs]
    return SlopedSameSide(
        per_trial=summarize(ratios),
        same=sum(s for s, _ in pairs),
        eligible=sum(e for _, e in pairs),
    )


@dataclass(frozen=True)
class TwoRoundSplit:
    """Two disjoint alternating subsequences built by the two-round procedure."""

    positions_a: np.ndarray
    positions_b: np.ndarray
    values_a: np.ndarray
    values_b: np.ndarray

    @property
    def len_a(self) -> int:
        return len(self.positions_a)

    @property
    def len_b(self) -> int:
        return len(self.positions_b)

    @property
    def min_len(self) -> int:
        return min(self.len_a, self.len_b)


def _splice(pos1, val1, pos2, val2):
    """Join two alternating runs, dropping at most two elements at the seam.

    A single drop cannot always restore alternation (both seam comparisons
    can fail in the same direction), so up to one element from each side may
    go; the longest valid join wins, ties to fewer left drops.
    """
    best = None
    for da in (0, 1, 2):
        if da > len(val1):
            continue
        for db in (0, 1, 2):
            if db > len(val2):
                continue
            v1 = val1[: len(val1) - da]
            v2 = val2[db:]
            seam = np.concatenate([v1[-2:], v2[:2]])
            if len(seam) >= 3:
                d = np.diff(seam.astype(np.int64))
                if (d == 0).any() or (d[1:] * d[:-1] >= 0).any():
                    continue
            keep = len(v1) + len(v2)
            if best is None or keep > best[0]:
                best = (keep, da, db)
    if best is None:
        raise AssertionError("no valid seam within two drops")
    _, da, db = best
    pos = np.concatenate([pos1[: len(pos1) - da], pos2[db:]])
    val = np.concatenate([val1[: len(val1) - da], val2[db:]])
    return pos, val


def simulate_two_round_procedure(n: int, seed: int, stream_id: int = 0) -> TwoRoundSplit:
    """Split in the middle; first-round extrema cross with the other half's
    second-round extrema (extrema of what remains after removing its own)."""
    if n < 4:
        raise ValueError("n must be >= 4")
    rng = derive_stream(seed, stream_id).generator()
    values = rng.permutation(n) + 1
    h = n // 2
    rounds = {}
    for name, lo, hi in (("L", 0, h), ("R", h, n)):
        pos = np.arange(lo, hi)
        vals = values[lo:hi]
        first = extrema_mask(vals)
        rem_pos, rem_vals = pos[~first], vals[~first]
        second = extrema_mask(rem_vals)
        rounds[name] = (pos[first], vals[first], rem_pos[second], rem_vals[second])
    lp1, lv1, lp2, lv2 = rounds["L"]
    rp1, rv1, rp2, rv2 = rounds["R"]
    pos_a, val_a = _splice(lp1, lv1, rp2, rv2)
    pos_b, val_b = _splice(lp2, lv2, rp1, rv1)
    return TwoRoundSplit(pos_a, pos_b, val_a, val_b)


def mc_two_round(n: int, trials: int, seed: int,
                 threads: int | None = None) -> McSummary:
    """Summary of min(|A|, |B|) over independent two-round runs."""

    def worker(i: int) -> int:
        return simulate_two_round_procedure(n, seed, stream_id=i).min_len

    return summarize(run_trials(trials, worker, threads))
