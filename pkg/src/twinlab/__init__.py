"""twinlab: repetition scanners for random words, ascending partitions of
random permutations, and the alternating-twin constants, with seeded
Monte Carlo experiments throughout."""

__version__ = "0.1.0"

from twinlab import alternating, harness, perms, scan, words  # noqa: F401
