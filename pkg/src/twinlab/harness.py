"""Deterministic randomness, sample statistics and report emission.

All experiments in this package draw their randomness through
:func:`derive_stream`, which maps a ``(seed, stream_id)`` pair to an
independent counter-based generator.  The mapping is fixed bit-exactly so
that every experiment is reproducible across platforms, processes and
thread schedules:

* ``mix64`` is the SplitMix64 finalizer: with 64-bit wrapping arithmetic,

  .. code-block:: text

      z  = (x + 0x9E3779B97F4A7C15) mod 2^64
      z ^= z >> 30;  z  = z * 0xBF58476D1CE4E5B9 mod 2^64
      z ^= z >> 27;  z  = z * 0x94D049BB133111EB mod 2^64
      z ^= z >> 31

* a stream's 128-bit Philox key is ``(hi << 64) | lo`` with

  .. code-block:: text

      lo = mix64(seed XOR mix64(stream_id))
      hi = mix64(lo XOR 0xA5A5A5A5A5A5A5A5)

* the generator is numpy's Philox (4x64, 10 rounds) with that key and a
  zero counter.  Philox's output sequence is frozen by numpy's bit-generator
  compatibility guarantee, so reports are byte-identical across runs.

Monte Carlo drivers give trial ``i`` the stream ``stream_id = i`` and store
results by trial index, which makes aggregation independent of execution
order (and therefore of ``--threads``).
"""
from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

__all__ = [
    "mix64",
    "RngStream",
    "derive_stream",
    "McSummary",
    "summarize",
    "empirical_tail",
    "ExperimentReport",
    "run_trials",
]

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_SALT = 0xA5A5A5A5A5A5A5A5


def mix64(x: int) -> int:
    """SplitMix64 finalizer on 64-bit unsigned integers."""
    z = (x + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


@dataclass(frozen=True)
class RngStream:
    """A value-type handle on one deterministic substream."""

    seed: int
    stream_id: int

    @property
    def key(self) -> int:
        lo = mix64((self.seed & _MASK64) ^ mix64(self.stream_id & _MASK64))
        hi = mix64(lo ^ _SALT)
        return (hi << 64) | lo

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(key=self.key))


def derive_stream(seed: int, stream_id: int) -> RngStream:
    """Deterministic independent-quality substream for (seed, stream_id)."""
    return RngStream(int(seed), int(stream_id))


@dataclass(frozen=True)
class McSummary:
    """Order-independent summary of one integer- or real-valued statistic."""

    trials: int
    values: tuple
    mean: float
    sd: float
    min: float
    max: float
    tail: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "trials": self.trials,
            "mean": self.mean,
            "sd": self.sd,
            "min": self.min,
            "max": self.max,
            "tail": {str(t): f for t, f in sorted(self.tail.items())},
        }


def summarize(samples: Sequence[float], thresholds: Iterable[float] = ()) -> McSummary:
    """Mean (exact accumulation), unbiased sd, extremes and tail fractions.

    Raises ValueError on empty input.  The result depends only on the
    multiset of samples, not their order.
    """
    vals = list(samples)
    if not vals:
        raise ValueError("summarize needs at least one sample")
    n = len(vals)
    mean = math.fsum(vals) / n
    if n > 1:
        sd = math.sqrt(math.fsum((v - mean) ** 2 for v in vals) / (n - 1))
    else:
        sd = 0.0
    tail = empirical_tail(vals, thresholds)
    return McSummary(
        trials=n,
        values=tuple(vals),
        mean=mean,
        sd=sd,
        min=min(vals),
        max=max(vals),
        tail=tail,
    )


def empirical_tail(samples: Sequence[float], thresholds: Iterable[float]) -> dict:
    """Fraction of samples >= each threshold; non-increasing in the threshold."""
    vals = list(samples)
    if not vals:
        raise ValueError("empirical_tail needs at least one sample")
    n = len(vals)
    return {float(t): sum(1 for v in vals if v >= t) / n for t in thresholds}


def run_trials(trials: int, worker: Callable[[int], object], threads: int | None = None) -> list:
    """Run `worker(trial_index)` for all indices, results in index order.

    Each worker must derive its own randomness from the trial index, so the
    output is identical for any thread count.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not threads or threads <= 1:
        return [worker(i) for i in range(trials)]
    out = [None] * trials
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for i, res in zip(range(trials), pool.map(worker, range(trials))):
            out[i] = res
    return out


@dataclass
class ExperimentReport:
    """Parameters, summaries, theory values and pass/fail verdicts of one run."""

    params: dict
    summaries: dict = field(default_factory=dict)
    theory: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)
    seed: int | None = None

    def add_verdict(self, name: str, passed: bool, margin: float) -> None:
        self.verdicts[name] = {"pass": bool(passed), "margin": margin}

    def as_dict(self) -> dict:
        from twinlab import __version__

        return {
            "params": self.params,
            "summaries": {k: v.as_dict() if isinstance(v, McSummary) else v
                          for k, v in self.summaries.items()},
            "theory": self.theory,
            "verdicts": self.verdicts,
            "tool_version": __version__,
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, indent=2) + "\n"

    def write(self, path: str, fmt: str = "json") -> None:
        if fmt == "json":
            with open(path, "w") as fh:
                fh.write(self.to_json())
        elif fmt == "csv":
            with open(path, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["trial", "statistic"])
                for name, summ in self.summaries.items():
                    if isinstance(summ, McSummary):
                        for i, v in enumerate(summ.values):
                            writer.writerow([i, v])
                        break
        else:
            raise ValueError(f"unknown format {fmt!r}")


def write_samples_csv(path: str, values: Sequence[float]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["trial", "statistic"])
        for i, v in enumerate(values):
            writer.writerow([i, v])
