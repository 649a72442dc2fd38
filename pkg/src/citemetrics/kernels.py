"""Batch metric kernels over the CSR arrays of a ``CitationGraph``.

Each kernel exists twice: a numba ``@njit`` loop (parallel over focal
papers) and a numpy fallback.  ``backend=None`` picks numba unless
``CITEMETRICS_DISABLE_JIT`` is set.  Both paths return identical values;
per-paper results never depend on the thread count.
"""
import numpy as np

from ._accel import JIT_OPTS, PARALLEL_OPTS, njit, prange, resolve_backend


# ---------------------------------------------------------------------------
# numba path

@njit(**JIT_OPTS)
def _lower_bound(arr, start, end, value):
    lo, hi = start, end
    while lo < hi:
        mid = (lo + hi) >> 1
        if arr[mid] < value:
            lo = mid + 1
        else:
            hi = mid
    return lo


@njit(**JIT_OPTS)
def _year_start(year_ptr, year_min, n, year):
    k = year - year_min
    if k <= 0:
        return 0
    if k >= year_ptr.shape[0] - 1:
        return n
    return year_ptr[k]


@njit(**JIT_OPTS)
def _intersect_count(idx, a0, a1, b0, b1):
    """|idx[a0:a1] & idx[b0:b1]| for two ascending, duplicate-free runs."""
    na = a1 - a0
    nb = b1 - b0
    if na == 0 or nb == 0:
        return 0
    if na > nb:
        a0, a1, b0, b1 = b0, b1, a0, a1
        na, nb = nb, na
    count = 0
    # galloping when one run is much longer; plain merge otherwise
    if na * 8 < nb:
        pos = b0
        for p in range(a0, a1):
            pos = _lower_bound(idx, pos, b1, idx[p])
            if pos == b1:
                break
            if idx[pos] == idx[p]:
                count += 1
                pos += 1
        return count
    p, q = a0, b0
    while p < a1 and q < b1:
        x, y = idx[p], idx[q]
        if x == y:
            count += 1
            p += 1
            q += 1
        elif x < y:
            p += 1
        else:
            q += 1
    return count


@njit(**PARALLEL_OPTS)
def _windowed_counts_nb(in_ptr, in_idx, years, year_min, year_ptr, offset, length):
    n = years.shape[0]
    out = np.zeros(n, dtype=np.int64)
    for i in prange(n):
        y = years[i]
        lo = _year_start(year_ptr, year_min, n, y + offset)
        hi = _year_start(year_ptr, year_min, n, y + offset + length)
        c0, c1 = in_ptr[i], in_ptr[i + 1]
        a = _lower_bound(in_idx, c0, c1, lo)
        b = _lower_bound(in_idx, a, c1, hi)
        out[i] = b - a
    return out


@njit(**PARALLEL_OPTS)
def _disruption_counts_nb(out_ptr, out_idx, in_ptr, in_idx, years, year_min, year_ptr,
                          offset, length):
    n = years.shape[0]
    only = np.zeros(n, dtype=np.int64)
    both = np.zeros(n, dtype=np.int64)
    subs = np.zeros(n, dtype=np.int64)
    for i in prange(n):
        y = years[i]
        lo = _year_start(year_ptr, year_min, n, y + offset)
        hi = _year_start(year_ptr, year_min, n, y + offset + length)
        c0, c1 = in_ptr[i], in_ptr[i + 1]
        a = _lower_bound(in_idx, c0, c1, lo)
        b = _lower_bound(in_idx, a, c1, hi)
        r0, r1 = out_ptr[i], out_ptr[i + 1]
        total = 0
        for e in range(r0, r1):
            r = out_idx[e]
            s0 = _lower_bound(in_idx, in_ptr[r], in_ptr[r + 1], lo)
            s1 = _lower_bound(in_idx, s0, in_ptr[r + 1], hi)
            total += s1 - s0
        if total == 0:
            only[i] = b - a
            continue
        buf = np.empty(total, dtype=in_idx.dtype)
        k = 0
        for e in range(r0, r1):
            r = out_idx[e]
            s0 = _lower_bound(in_idx, in_ptr[r], in_ptr[r + 1], lo)
            s1 = _lower_bound(in_idx, s0, in_ptr[r + 1], hi)
            for t in range(s0, s1):
                buf[k] = in_idx[t]
                k += 1
        buf.sort()
        n_union = 0
        n_both = 0
        p = a
        prev = -1
        for t in range(total):
            v = buf[t]
            if v == prev:
                continue
            prev = v
            if v == i:
                continue
            n_union += 1
            while p < b and in_idx[p] < v:
                p += 1
            if p < b and in_idx[p] == v:
                n_both += 1
        only[i] = (b - a) - n_both
        both[i] = n_both
        subs[i] = n_union - n_both
    return only, both, subs


@njit(**PARALLEL_OPTS)
def _reference_diversity_nb(focals, out_ptr, out_idx, in_ptr, in_idx, years, year_min, year_ptr):
    n = years.shape[0]
    out = np.full(focals.shape[0], np.nan)
    for f in prange(focals.shape[0]):
        i = focals[f]
        r0, r1 = out_ptr[i], out_ptr[i + 1]
        k = r1 - r0
        if k < 2:
            continue
        cutoff = _year_start(year_ptr, year_min, n, years[i])
        starts = np.empty(k, dtype=np.int64)
        ends = np.empty(k, dtype=np.int64)
        for t in range(k):
            r = out_idx[r0 + t]
            starts[t] = in_ptr[r]
            ends[t] = _lower_bound(in_idx, in_ptr[r], in_ptr[r + 1], cutoff)
        acc = 0.0
        for s in range(k):
            for t in range(s + 1, k):
                m = _intersect_count(in_idx, starts[s], ends[s], starts[t], ends[t])
                acc += 1.0 / (1.0 + m)
        out[f] = acc / (k * (k - 1) // 2)
    return out


# ---------------------------------------------------------------------------
# numpy path

def _year_starts(years, year_min, year_ptr, target_years):
    k = np.clip(np.asarray(target_years) - year_min, 0, year_ptr.shape[0] - 1)
    return year_ptr[k]


def _windowed_counts_np(in_ptr, in_idx, years, year_min, year_ptr, offset, length):
    n = years.shape[0]
    cited = np.repeat(np.arange(n), np.diff(in_ptr))
    lag = years[in_idx] - years[cited]
    keep = (lag >= offset) & (lag <= offset + length - 1)
    return np.bincount(cited[keep], minlength=n).astype(np.int64)


def _disruption_counts_np(out_ptr, out_idx, in_ptr, in_idx, years, year_min, year_ptr,
                          offset, length):
    n = years.shape[0]
    lo_all = _year_starts(years, year_min, year_ptr, years + offset)
    hi_all = _year_starts(years, year_min, year_ptr, years + offset + length)
    only = np.zeros(n, dtype=np.int64)
    both = np.zeros(n, dtype=np.int64)
    subs = np.zeros(n, dtype=np.int64)
    for i in range(n):
        lo, hi = lo_all[i], hi_all[i]
        cit = in_idx[in_ptr[i]:in_ptr[i + 1]]
        window = cit[(cit >= lo) & (cit < hi)]
        refs = out_idx[out_ptr[i]:out_ptr[i + 1]]
        if refs.size == 0:
            only[i] = window.size
            continue
        chunks = [in_idx[in_ptr[r]:in_ptr[r + 1]] for r in refs]
        pool = np.concatenate(chunks)
        pool = np.unique(pool[(pool >= lo) & (pool < hi)])
        pool = pool[pool != i]
        nb = np.intersect1d(pool, window, assume_unique=True).size
        only[i] = window.size - nb
        both[i] = nb
        subs[i] = pool.size - nb
    return only, both, subs


def _reference_diversity_np(focals, out_ptr, out_idx, in_ptr, in_idx, years, year_min, year_ptr):
    cutoffs = _year_starts(years, year_min, year_ptr, years[focals])
    out = np.full(focals.shape[0], np.nan)
    for f, i in enumerate(focals):
        refs = out_idx[out_ptr[i]:out_ptr[i + 1]]
        k = refs.size
        if k < 2:
            continue
        early = []
        for r in refs:
            cit = in_idx[in_ptr[r]:in_ptr[r + 1]]
            early.append(cit[cit < cutoffs[f]])
        acc = 0.0
        for s in range(k):
            for t in range(s + 1, k):
                m = np.intersect1d(early[s], early[t], assume_unique=True).size
                acc += 1.0 / (1.0 + m)
        out[f] = acc / (k * (k - 1) // 2)
    return out


# ---------------------------------------------------------------------------
# dispatch

def _arrays(graph):
    return (graph.out_ptr, graph.out_idx, graph.in_ptr, graph.in_idx,
            graph.years, np.int64(graph.year_min), graph.year_ptr)


def windowed_counts(graph, window, backend=None):
    """Windowed citation count of every paper."""
    args = (graph.in_ptr, graph.in_idx, graph.years, np.int64(graph.year_min), graph.year_ptr,
            np.int64(window.offset), np.int64(window.length))
    if graph.n_papers == 0:
        return np.zeros(0, dtype=np.int64)
    if resolve_backend(backend) == "numba":
        return _windowed_counts_nb(*args)
    return _windowed_counts_np(*args)


def disruption_counts(graph, window, backend=None):
    """``(n_only_focal, n_both, n_subsequent)`` arrays for every paper."""
    if graph.n_papers == 0:
        z = np.zeros(0, dtype=np.int64)
        return z, z.copy(), z.copy()
    args = _arrays(graph) + (np.int64(window.offset), np.int64(window.length))
    if resolve_backend(backend) == "numba":
        return _disruption_counts_nb(*args)
    return _disruption_counts_np(*args)


def reference_diversity(graph, backend=None):
    """Mean of ``1/(1+n_ij)`` over in-corpus reference pairs; NaN below two references."""
    return reference_diversity_arrays(np.arange(graph.n_papers), *_arrays(graph), backend=backend)


def reference_diversity_arrays(focals, out_ptr, out_idx, in_ptr, in_idx, years, year_min,
                               year_ptr, backend=None):
    """Array-level entry point; ``in_idx`` runs must be ascending and papers year-ordered."""
    focals = np.asarray(focals, dtype=np.int64)
    if focals.size == 0:
        return np.zeros(0)
    args = (focals, out_ptr, out_idx, in_ptr, in_idx, years, np.int64(year_min), year_ptr)
    if resolve_backend(backend) == "numba":
        return _reference_diversity_nb(*args)
    return _reference_diversity_np(*args)
