"""Compiled inner loops shared by the engine and the census.

All engine state lives in flat int64 arrays so that a single njit function can
mutate it in place:

* ``sym[k]``, ``rem[k]`` -- symbol and remaining multiplicity of cell ``k``
* ``p[k]``, ``a[k]``, ``b[k]`` -- per-level work counters
* ``meta`` -- scalars, indexed by the ``M_*`` constants

The census is a second int64 array indexed by the ``C_*`` constants.  Decade
rows are written into a caller-provided ``(capacity, 5)`` buffer with columns
``n, count, depth, dev_num, dev_den`` (``dev_num == -1`` means no deviation).
"""

import numpy as np
from numba import njit

# Room for the deepest stack reachable below the 10**15 position guard:
# ceil(log(1e15) / log(6/5)) + 1 = 191 for the classical sequence.
STACK_CAPACITY = 256

M_DEPTH = 0
M_POSITION = 1
M_ROW_START = 2
M_R = 3
M_S = 4
M_WORK = 5
META_SIZE = 6

C_POSITION = 0
C_COUNT_R = 1
C_COUNT_S = 2
C_COUNTED = 3
C_NEXT_DECADE = 4
C_DEV_NUM = 5
C_DEV_DEN = 6
C_STOP = 7
C_R = 8
CENSUS_SIZE = 9

ROW_CAPACITY = 64

_LOW26 = (1 << 26) - 1
_LOW52 = (1 << 52) - 1


@njit(cache=True)
def advance_level(sym, rem, p, a, b, meta, k):
    """Advance cell ``k`` to its next symbol; returns that symbol, or -1 when
    the stack capacity would be exceeded."""
    depth = meta[M_DEPTH]
    j = k
    while j < depth and rem[j] == 1:
        j += 1
    if j == depth:
        if j >= sym.shape[0]:
            return -1
        # the first symbol of a fresh top cell already generated everything below
        sigma = meta[M_ROW_START]
        sym[j] = sigma
        rem[j] = sigma - 1
        meta[M_DEPTH] = depth + 1
    else:
        rem[j] -= 1
    p[j] += 1
    b[j] += 1
    r = meta[M_R]
    s = meta[M_S]
    g = sym[j]
    i = j - 1
    while i >= k:
        sym[i] = s if sym[i] == r else r
        rem[i] = g
        p[i] += 1
        a[i] += 1
        g = sym[i]
        i -= 1
    meta[M_WORK] += j - k + 1
    return g


@njit(cache=True)
def next_run(sym, rem, p, a, b, meta):
    """Emit the next run into cell 0; returns its length (-1 on overflow)."""
    g = advance_level(sym, rem, p, a, b, meta, 1)
    if g < 0:
        return -1
    sym[0] = meta[M_S] if sym[0] == meta[M_R] else meta[M_R]
    rem[0] = g
    p[0] += 1
    meta[M_WORK] += 1
    meta[M_POSITION] += g
    return g


@njit(cache=True)
def _split_mul(x, y):
    # x, y < 2**52; returns the product as (high, low) in base 2**52
    xh = x >> 26
    xl = x & _LOW26
    yh = y >> 26
    yl = y & _LOW26
    mid = xh * yl + xl * yh
    low = xl * yl + ((mid & _LOW26) << 26)
    high = xh * yh + (mid >> 26) + (low >> 52)
    return high, low & _LOW52


@njit(cache=True)
def fraction_greater(n1, d1, n2, d2):
    """Exact ``n1/d1 > n2/d2`` for nonnegative operands below 2**52."""
    f1 = n1 / d1
    f2 = n2 / d2
    if f1 > f2 * (1.0 + 1e-9):
        return True
    if f1 < f2 * (1.0 - 1e-9):
        return False
    h1, l1 = _split_mul(n1, d2)
    h2, l2 = _split_mul(n2, d1)
    if h1 != h2:
        return h1 > h2
    return l1 > l2


@njit(cache=True)
def observe_run(census, symbol, length, depth, rows, nrows):
    """Account one run position by position; returns the new row count.

    Positions equal to a power of ten close the current decade and emit a row;
    the optional stop position emits a row without closing the decade.
    """
    position = census[C_POSITION]
    count_r = census[C_COUNT_R]
    count_s = census[C_COUNT_S]
    counted_is_r = census[C_COUNTED] == census[C_R]
    symbol_is_r = symbol == census[C_R]
    dev_num = census[C_DEV_NUM]
    dev_den = census[C_DEV_DEN]
    boundary = census[C_NEXT_DECADE]
    stop = census[C_STOP]
    for _ in range(length):
        position += 1
        if symbol_is_r:
            count_r += 1
        else:
            count_s += 1
        c = count_r if counted_is_r else count_s
        # positions 1 and 2 never enter a decade maximum: 2 would dominate the
        # first K(2, 3) decade with the trivial 1/2 of the opening run
        if position > 2:
            z = 2 * c - position
            if z < 0:
                z = -z
            den = 2 * position
            if dev_num < 0 or fraction_greater(z, den, dev_num, dev_den):
                dev_num = z
                dev_den = den
        if position == boundary or position == stop:
            rows[nrows, 0] = position
            rows[nrows, 1] = c
            rows[nrows, 2] = depth
            rows[nrows, 3] = dev_num
            rows[nrows, 4] = dev_den
            nrows += 1
            if position == boundary:
                dev_num = -1
                dev_den = 1
                boundary *= 10
    census[C_POSITION] = position
    census[C_COUNT_R] = count_r
    census[C_COUNT_S] = count_s
    census[C_DEV_NUM] = dev_num
    census[C_DEV_DEN] = dev_den
    census[C_NEXT_DECADE] = boundary
    return nrows


@njit(cache=True)
def stream_census(sym, rem, p, a, b, meta, census, rows, until):
    """Run the engine until its position reaches ``until``, feeding the census.

    Returns the number of rows written, or -1 if the stack overflowed.  Stops
    early (at a run boundary) once the row buffer is nearly full.
    """
    nrows = 0
    limit = rows.shape[0] - 8
    while meta[M_POSITION] < until and nrows < limit:
        g = next_run(sym, rem, p, a, b, meta)
        if g < 0:
            return -1
        nrows = observe_run(census, sym[0], g, meta[M_DEPTH], rows, nrows)
    return nrows


@njit(cache=True)
def fill_symbols(sym, rem, p, a, b, meta, out, start):
    """Write successive runs into ``out[start:]``.

    Returns how many symbols of the last run did not fit (0 if it ended
    exactly at the end of ``out``), or -1 if the stack overflowed.
    """
    i = start
    n = out.shape[0]
    while i < n:
        g = next_run(sym, rem, p, a, b, meta)
        if g < 0:
            return -1
        x = sym[0]
        for t in range(g):
            if i >= n:
                return g - t
            out[i] = x
            i += 1
    return 0


@njit(cache=True)
def depth_log(sym, rem, p, a, b, meta, until, out):
    """Stream to ``until``; ``out[d]`` receives the start position of the run
    during which the stack first reached depth ``d``."""
    while meta[M_POSITION] < until:
        before = meta[M_DEPTH]
        start = meta[M_POSITION] + 1
        g = next_run(sym, rem, p, a, b, meta)
        if g < 0:
            return -1
        d = meta[M_DEPTH]
        if d > before and d < out.shape[0]:
            out[d] = start
    return 0


@njit(cache=True)
def work_scan(sym, rem, p, a, b, meta, n_runs, check_from):
    """Perform ``n_runs`` increments and return the largest total-work/runs
    ratio observed once at least ``check_from`` runs were made."""
    worst = 0.0
    for _ in range(n_runs):
        if next_run(sym, rem, p, a, b, meta) < 0:
            return -1.0
        runs = p[0]
        if runs >= check_from:
            ratio = meta[M_WORK] / runs
            if ratio > worst:
                worst = ratio
    return worst
