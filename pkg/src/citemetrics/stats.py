"""Correlation, bootstrap, two-sample KS, year-reshuffle surrogate and shift test."""
import math
import zlib
from dataclasses import dataclass

import numpy as np
from scipy import stats as _sps

from .series import CohortSeries, group_rows

METHODS = ("pearson", "spearman", "kendall")


def derive_seed(seed, name, index=0):
    """64-bit seed for stream ``name``/``index`` under a master ``seed``."""
    ss = np.random.SeedSequence([int(seed), zlib.crc32(name.encode("utf-8")), int(index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class CorrelationResult:
    method: str
    value: float
    n: int


def _pairwise_defined(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError(f"correlation needs equal-length vectors, got {x.shape} and {y.shape}")
    keep = ~(np.isnan(x) | np.isnan(y))
    return x[keep], y[keep]


def _pearson(x, y):
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = np.dot(dx, dx)
    syy = np.dot(dy, dy)
    if sxx == 0 or syy == 0:
        return math.nan
    r = float(np.dot(dx, dy) / math.sqrt(sxx * syy))
    return min(1.0, max(-1.0, r))


def correlation(x, y, method="pearson"):
    """Correlation of ``x`` and ``y`` after dropping rows undefined in either.

    Spearman is Pearson on average ranks; Kendall is tau-b.  Undefined
    (NaN) below two rows or when either vector is constant.
    """
    if method not in METHODS:
        raise ValueError(f"unknown correlation method {method!r}")
    x, y = _pairwise_defined(x, y)
    n = int(x.size)
    if n < 2 or x.min() == x.max() or y.min() == y.max():
        return CorrelationResult(method, math.nan, n)
    if method == "pearson":
        value = _pearson(x, y)
    elif method == "spearman":
        value = _pearson(_sps.rankdata(x), _sps.rankdata(y))
    else:
        value = float(_sps.kendalltau(x, y, variant="b").statistic)
    return CorrelationResult(method, value, n)


def grouped_correlation(keys, x, y, method="pearson", min_cohort=30, label=""):
    """Correlation within each key group; NaN where fewer than ``min_cohort`` defined rows."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    uniq, groups = group_rows(keys)
    values = np.full(uniq.size, np.nan)
    n = np.zeros(uniq.size, dtype=np.int64)
    for k, rows in enumerate(groups):
        res = correlation(x[rows], y[rows], method)
        n[k] = res.n
        if res.n >= min_cohort:
            values[k] = res.value
    return CohortSeries(uniq, values, n, label or method)


# -- bootstrap ------------------------------------------------------------------

@dataclass(frozen=True)
class BootstrapDistribution:
    means: np.ndarray
    seed: int
    sample_mean: float
    sample_size: int

    @property
    def quantiles(self):
        return tuple(float(q) for q in np.quantile(self.means, (0.025, 0.5, 0.975)))


_BOOTSTRAP_BLOCK = 1 << 22   # index draws per batch


def bootstrap_means(sample, realizations=10_000, seed=0):
    """Means of ``realizations`` with-replacement resamples of ``sample``.

    Resamples are drawn in batches whose size depends only on the sample
    size, so the output is a function of ``(sample, realizations, seed)``.
    """
    sample = np.asarray(sample, dtype=float)
    if sample.ndim != 1 or sample.size == 0:
        raise ValueError("bootstrap needs a nonempty 1-d sample")
    if realizations < 1:
        raise ValueError("realizations must be >= 1")
    rng = np.random.default_rng(seed)
    n = sample.size
    chunk = max(1, _BOOTSTRAP_BLOCK // n)
    means = np.empty(realizations)
    for start in range(0, realizations, chunk):
        stop = min(start + chunk, realizations)
        idx = rng.integers(0, n, size=(stop - start, n))
        means[start:stop] = sample[idx].mean(axis=1)
    np.clip(means, sample.min(), sample.max(), out=means)
    return BootstrapDistribution(means, seed, float(sample.mean()), n)


# -- Kolmogorov-Smirnov ---------------------------------------------------------

def kolmogorov_sf(lam, terms=100, tol=1e-10):
    """Survival function of the limiting Kolmogorov distribution at ``lam``."""
    if lam <= 0:
        return 1.0
    if lam < 1.0:
        # Jacobi-theta form converges fast for small arguments
        s = 0.0
        c = math.pi ** 2 / (8.0 * lam * lam)
        for k in range(1, terms + 1):
            t = math.exp(-(2 * k - 1) ** 2 * c)
            s += t
            if t < tol:
                break
        return min(1.0, max(0.0, 1.0 - math.sqrt(2.0 * math.pi) / lam * s))
    s = 0.0
    for k in range(1, terms + 1):
        t = math.exp(-2.0 * k * k * lam * lam)
        s += t if k % 2 else -t
        if t < tol:
            break
    return min(1.0, max(0.0, 2.0 * s))


def ks_two_sample(a, b):
    """``(statistic, p_value)`` for the two-sided two-sample KS test (asymptotic p)."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise ValueError("KS test needs two nonempty samples")
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    d = float(np.max(np.abs(fa - fb)))
    en = a.size * b.size / (a.size + b.size)
    return d, kolmogorov_sf(math.sqrt(en) * d)


# -- null models ---------------------------------------------------------------

def reshuffle_years_surrogate(table, seed, trials, method="pearson", x="c_w", y="d_w",
                              min_cohort=30, cohort_key=None):
    """Yearly correlations after permuting year labels over papers, one series per trial.

    Metric values stay attached to their papers; only the cohort labels
    move, so the multiset of years is preserved exactly.  Trial ``t`` is
    seeded from ``(seed, t)``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if len(table) == 0:
        raise ValueError("surrogate needs a nonempty table")
    keys = np.asarray(table.year if cohort_key is None else cohort_key)
    xs, ys = table.column(x), table.column(y)
    out = []
    for t in range(trials):
        rng = np.random.default_rng([int(seed), t])
        shuffled = keys[rng.permutation(keys.size)]
        out.append(grouped_correlation(shuffled, xs, ys, method, min_cohort,
                                       label=f"surrogate-{t}"))
    return out


def pearson_shift_test(x, y, max_shift):
    """Pearson of ``x`` against ``y`` circularly rotated by each shift in ``[-max_shift, max_shift]``."""
    x, y = _pairwise_defined(x, y)
    if max_shift < 0:
        raise ValueError("max_shift must be >= 0")
    if 2 * max_shift >= x.size:
        raise ValueError(f"max_shift {max_shift} too large for {x.size} rows")
    return [(s, correlation(x, np.roll(y, s), "pearson").value)
            for s in range(-max_shift, max_shift + 1)]
