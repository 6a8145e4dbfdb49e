# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled scanning kernels over the self-match bit string.

For a word w and shift m the bit string is b[i] = (w[i] == w[i+m]).
A contiguous repetition with block length m and multiplicity r exists iff
b has a run of ones of length >= (r-1)*m, so both kernels only ever walk b.

The repetition scan probes every L-th bit (L the required run length); a
run of length >= L must cover one probe, so expanding around set probes is
exhaustive.  Expected work on uniform random words is O(n log n / r);
degenerate inputs (constant words) cost O(n^2 / r).
"""


cpdef long long longest_match_run(long long[::1] w, long long m):
    """Length of the longest run of i with w[i] == w[i+m]."""
    cdef long long n = w.shape[0]
    cdef long long nb = n - m
    cdef long long best = 0, run = 0, i
    if m < 1 or m > n:
        raise ValueError("shift out of range")
    with nogil:
        for i in range(nb):
            if w[i] == w[i + m]:
                run += 1
                if run > best:
                    best = run
            else:
                run = 0
    return best


cpdef tuple max_rpower_scan(long long[::1] w, long long r):
    """Largest m admitting an r-fold repetition of block length m.

    Returns (m, start) with start the leftmost word index (0-based) where a
    repetition of the winning block length begins, or (0, -1) if none.
    """
    cdef long long n = w.shape[0]
    cdef long long best_m = 0, best_start = -1
    cdef long long m, L, nb, j, lo, hi, nxt
    cdef bint found
    if r < 2:
        raise ValueError("multiplicity must be >= 2")
    with nogil:
        for m in range(1, n // r + 1):
            L = (r - 1) * m
            nb = n - m
            j = L - 1
            found = False
            while j < nb:
                if w[j] == w[j + m]:
                    lo = j
                    while lo > 0 and w[lo - 1] == w[lo - 1 + m]:
                        lo -= 1
                    hi = j
                    while hi + 1 < nb and w[hi + 1] == w[hi + 1 + m]:
                        hi += 1
                    if hi - lo + 1 >= L:
                        best_m = m
                        best_start = lo
                        found = True
                        break
                    nxt = ((hi + 1) / L + 1) * L - 1
                    j = nxt
                else:
                    j += L
            if found:
                continue
    return best_m, best_start
