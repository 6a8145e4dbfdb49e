"""Repetition statistics of random words over a finite alphabet.

A block of length ``r*m`` that splits into ``r`` identical sub-blocks of
length ``m`` is detected through the self-match bit string
``b[i] = (w[i] == w[i+m])``: such a block starting at ``i`` exists iff
``b[i..i+(r-1)m-1]`` is all ones.  Scanning is delegated to
:mod:`twinlab.scan` (compiled kernel or numpy fallback); this module owns
the word type, the analytic tail/center evaluators and the seeded
Monte Carlo experiments.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from twinlab import scan
from twinlab.harness import McSummary, derive_stream, run_trials, summarize

__all__ = [
    "Word",
    "MatchIndicator",
    "random_word",
    "match_indicator",
    "max_rpower_length",
    "max_rpower_witness",
    "max_power_of_length",
    "brute_force_max_rpower",
    "theory_center_M",
    "theory_tail_M",
    "theory_center_R",
    "theory_tail_R",
    "mc_experiment_M",
    "mc_experiment_R",
    "read_words",
    "write_words",
]

DEFAULT_C_LOWER = 0.5
MEAN_WINDOW = 3.0


@dataclass(frozen=True)
class Word:
    """A finite sequence over the alphabet {1..alphabet_size}."""

    symbols: np.ndarray
    alphabet_size: int

    def __post_init__(self):
        sym = np.ascontiguousarray(self.symbols, dtype=np.int64)
        object.__setattr__(self, "symbols", sym)
        if self.alphabet_size < 2:
            raise ValueError("alphabet_size must be >= 2")
        if len(sym) and (sym.min() < 1 or sym.max() > self.alphabet_size):
            raise ValueError("symbols must lie in 1..alphabet_size")

    def __len__(self) -> int:
        return len(self.symbols)


@dataclass(frozen=True)
class MatchIndicator:
    """Bit i set iff the word matches itself at the given shift."""

    distance: int
    bits: np.ndarray


def random_word(n: int, k: int, seed: int, stream_id: int = 0) -> Word:
    """Uniform word of length n over {1..k}; determined by (n, k, seed, stream_id)."""
    if k < 2:
        raise ValueError("alphabet_size must be >= 2")
    if n < 0:
        raise ValueError("length must be >= 0")
    rng = derive_stream(seed, stream_id).generator()
    return Word(rng.integers(1, k + 1, size=n, dtype=np.int64), k)


def match_indicator(word: Word, m: int) -> MatchIndicator:
    n = len(word)
    if m < 1 or m > n:
        raise ValueError(f"distance must lie in 1..{n}")
    w = word.symbols
    return MatchIndicator(m, w[: n - m] == w[m:])


def max_rpower_length(word: Word, r: int) -> int:
    """Largest m such that some contiguous block is r copies of an m-block; 0 if none."""
    if r < 2:
        raise ValueError("power order must be >= 2")
    m, _ = scan.max_rpower_scan(word.symbols, r)
    return m


def max_rpower_witness(word: Word, r: int) -> tuple[int, int | None]:
    """(m, start): block length and leftmost 0-based start index, start None if m == 0."""
    if r < 2:
        raise ValueError("power order must be >= 2")
    m, start = scan.max_rpower_scan(word.symbols, r)
    return m, (start if m > 0 else None)


def max_power_of_length(word: Word, m: int) -> int:
    """Largest r such that some contiguous block is r copies of an m-block (>= 1)."""
    n = len(word)
    if m < 1 or m > n:
        raise ValueError(f"block length must lie in 1..{n}")
    longest = scan.longest_match_run(word.symbols, m)
    return 1 + longest // m


def brute_force_max_rpower(word: Word, r: int) -> int:
    """Same contract as max_rpower_length by direct block comparison (test oracle)."""
    if r < 2:
        raise ValueError("power order must be >= 2")
    w = word.symbols.tolist()
    n = len(w)
    best = 0
    for m in range(1, n // r + 1):
        for start in range(0, n - r * m + 1):
            block = w[start:start + m]
            if all(w[start + j * m:start + (j + 1) * m] == block for j in range(1, r)):
                best = m
                break
    return best


# -- analytic evaluators -----------------------------------------------------

def theory_center_M(n: int, k: int, r: int) -> float:
    if n < 1 or k < 2 or r < 2:
        raise ValueError("need n >= 1, k >= 2, r >= 2")
    return math.log(n) / ((r - 1) * math.log(k))


def theory_tail_M(n: int, k: int, r: int, t: float, side: str,
                  c_lower: float = DEFAULT_C_LOWER) -> float:
    """Upper bound on the deviation probability at offset t from the center."""
    if t < 0:
        raise ValueError("offset must be >= 0")
    if side == "upper":
        return min(1.0, k ** (-(r - 1) * t))
    if side == "lower":
        if c_lower <= 0:
            raise ValueError("c_lower must be positive")
        return min(1.0, math.exp(-c_lower * k ** ((r - 1) * (t - 1))))
    raise ValueError("side must be 'upper' or 'lower'")


def theory_center_R(n: int, k: int, m: int) -> float:
    if n < 1 or k < 2 or m < 1:
        raise ValueError("need n >= 1, k >= 2, m >= 1")
    return math.log(n) / (m * math.log(k)) + 1.0


def theory_tail_R(n: int, k: int, m: int, u: float, side: str,
                  c_lower: float = DEFAULT_C_LOWER) -> float:
    if u < 0:
        raise ValueError("offset must be >= 0")
    if side == "upper":
        return min(1.0, k ** (-m * u))
    if side == "lower":
        if c_lower <= 0:
            raise ValueError("c_lower must be positive")
        return min(1.0, math.exp(-c_lower * k ** ((m + 1) * u) * n ** (-1.0 / m)))
    raise ValueError("side must be 'upper' or 'lower'")


# -- seeded experiments -------------------------------------------------------

def mc_experiment_M(n: int, k: int, r: int, trials: int, seed: int,
                    thresholds=(), threads: int | None = None) -> McSummary:
    """Per-trial maximum repetition block length; trial i uses substream (seed, i)."""

    def worker(i: int) -> int:
        return max_rpower_length(random_word(n, k, seed, stream_id=i), r)

    return summarize(run_trials(trials, worker, threads), thresholds)


def mc_experiment_R(n: int, k: int, m: int, trials: int, seed: int,
                    thresholds=(), threads: int | None = None) -> McSummary:
    """Per-trial maximum multiplicity at fixed block length m."""

    def worker(i: int) -> int:
        return max_power_of_length(random_word(n, k, seed, stream_id=i), m)

    return summarize(run_trials(trials, worker, threads), thresholds)


# -- word files ----------------------------------------------------------------

def write_words(path: str, words: list[Word]) -> None:
    """Header line `k=<int>`, then one word per line as space-separated symbols."""
    if not words:
        raise ValueError("need at least one word")
    k = words[0].alphabet_size
    if any(w.alphabet_size != k for w in words):
        raise ValueError("all words in a file share one alphabet")
    with open(path, "w") as fh:
        fh.write(f"k={k}\n")
        for w in words:
            fh.write(" ".join(map(str, w.symbols.tolist())) + "\n")


def read_words(path: str) -> list[Word]:
    with open(path) as fh:
        header = fh.readline().strip()
        if not header.startswith("k="):
            raise ValueError("word file must start with a `k=<int>` header line")
        k = int(header[2:])
        out = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            out.append(Word(np.array(line.split(), dtype=np.int64), k))
    return out
