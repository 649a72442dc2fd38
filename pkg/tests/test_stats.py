import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from scipy import special

from citemetrics.metrics import MetricTable
from citemetrics.stats import (
    bootstrap_means, correlation, derive_seed, grouped_correlation, kolmogorov_sf,
    ks_two_sample, pearson_shift_test, reshuffle_years_surrogate,
)


# -- O(n^2) oracles -------------------------------------------------------------

def pearson_oracle(x, y):
    n = len(x)
    mx, my = math.fsum(x) / n, math.fsum(y) / n
    sxy = math.fsum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = math.fsum((a - mx) ** 2 for a in x)
    syy = math.fsum((b - my) ** 2 for b in y)
    return sxy / math.sqrt(sxx * syy)


def average_ranks_oracle(x):
    return [1 + sum(1 for b in x if b < a) + 0.5 * (sum(1 for b in x if b == a) - 1) for a in x]


def spearman_oracle(x, y):
    return pearson_oracle(average_ranks_oracle(x), average_ranks_oracle(y))


def kendall_b_oracle(x, y):
    n = len(x)
    conc = disc = tie_x = tie_y = 0
    for i in range(n):
        for j in range(i + 1, n):
            dx, dy = x[i] - x[j], y[i] - y[j]
            if dx == 0:
                tie_x += 1
            if dy == 0:
                tie_y += 1
            if dx * dy > 0:
                conc += 1
            elif dx * dy < 0:
                disc += 1
    n0 = n * (n - 1) // 2
    return (conc - disc) / math.sqrt((n0 - tie_x) * (n0 - tie_y))


ORACLES = {"pearson": pearson_oracle, "spearman": spearman_oracle, "kendall": kendall_b_oracle}


def random_vectors(rng, k):
    n = int(rng.integers(2, 120))
    if k % 3 == 0:      # tie-heavy integers, like citation counts
        x = rng.integers(0, 4, size=n).astype(float)
        y = rng.choice([-1.0, 0.0, 0.5, 1.0], size=n)
    elif k % 3 == 1:
        x = rng.normal(size=n)
        y = 0.5 * x + rng.normal(size=n)
    else:
        x = rng.poisson(2.0, size=n).astype(float)
        y = np.round(rng.uniform(-1, 1, size=n), 1)
    return x, y


@pytest.mark.parametrize("method", ["pearson", "spearman", "kendall"])
def test_correlation_matches_oracle(method):
    rng = np.random.default_rng(7)
    checked = 0
    for k in range(40):
        x, y = random_vectors(rng, k)
        if np.ptp(x) == 0 or np.ptp(y) == 0:
            continue
        got = correlation(x, y, method).value
        assert got == pytest.approx(ORACLES[method](list(x), list(y)), abs=1e-12)
        checked += 1
    assert checked > 30


def test_correlation_examples():
    assert correlation([1, 2, 3], [2, 4, 6]).value == pytest.approx(1.0)
    assert correlation([1, 2, 3], [6, 4, 2]).value == pytest.approx(-1.0)
    x, y = [1, 2, 3, 4], [1, 3, 2, 4]
    assert correlation(x, y, "pearson").value == pytest.approx(0.8, abs=1e-12)
    assert correlation(x, y, "spearman").value == pytest.approx(0.8, abs=1e-12)
    assert correlation(x, y, "kendall").value == pytest.approx(4 / 6, abs=1e-12)


def test_correlation_undefined_and_errors():
    assert math.isnan(correlation([1], [2]).value)
    assert math.isnan(correlation([1, 1, 1], [1, 2, 3], "kendall").value)
    res = correlation([1, 2, np.nan, 4], [2, 4, 5, np.nan])
    assert res.n == 2 and res.value == pytest.approx(1.0)
    with pytest.raises(ValueError):
        correlation([1, 2], [1, 2, 3])
    with pytest.raises(ValueError):
        correlation([1, 2], [1, 2], "tau")


def test_grouped_correlation_min_cohort():
    keys = np.array([1, 1, 1, 2, 2, 2, 2])
    x = np.array([1, 2, 3, 1, 2, 3, 4], dtype=float)
    s = grouped_correlation(keys, x, x, min_cohort=4)
    assert math.isnan(s.get(1)) and s.get(2) == pytest.approx(1.0)
    assert s.n.tolist() == [3, 4]


vec = st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=3, max_size=40)


@settings(max_examples=80, deadline=None)
@given(vec, st.data(), st.sampled_from(["pearson", "spearman", "kendall"]))
def test_correlation_symmetry_and_affine(x, data, method):
    y = data.draw(st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=len(x), max_size=len(x)))
    x, y = np.array(x), np.array(y)
    assume(np.ptp(x) > 1e-3 and np.ptp(y) > 1e-3)
    r = correlation(x, y, method).value
    assert correlation(y, x, method).value == pytest.approx(r, abs=1e-9)
    assert -1 <= r <= 1
    if method == "pearson":
        assert correlation(3 * x + 2, y, method).value == pytest.approx(r, abs=1e-9)
    else:
        # piecewise-linear with exact float arithmetic, strictly increasing
        bent = np.where(x > 0, 2 * x, x)
        assert correlation(bent, y, method).value == pytest.approx(r, abs=1e-12)


# -- bootstrap ------------------------------------------------------------------

def test_bootstrap_single_value():
    d = bootstrap_means([5.0], realizations=100, seed=3)
    assert np.all(d.means == 5.0)


def test_bootstrap_two_points_within_three_se():
    d = bootstrap_means([0.0, 10.0], realizations=10_000, seed=11)
    se = 5 / math.sqrt(2) / math.sqrt(10_000)
    assert abs(d.means.mean() - 5.0) < 3 * se


def test_bootstrap_deterministic_and_bounded():
    sample = np.random.default_rng(1).exponential(3.0, size=257)
    a = bootstrap_means(sample, 2000, seed=42)
    b = bootstrap_means(sample, 2000, seed=42)
    assert np.array_equal(a.means, b.means)
    assert a.means.min() >= sample.min() and a.means.max() <= sample.max()
    lo, mid, hi = a.quantiles
    assert lo <= mid <= hi
    assert not np.array_equal(a.means, bootstrap_means(sample, 2000, seed=43).means)


def test_bootstrap_errors():
    with pytest.raises(ValueError):
        bootstrap_means([], 10)
    with pytest.raises(ValueError):
        bootstrap_means([1.0], 0)


# -- KS ---------------------------------------------------------------------------

def test_ks_examples():
    assert ks_two_sample([1, 2, 3], [1, 2, 3])[0] == 0.0
    assert ks_two_sample([0, 0, 0], [1, 1, 1])[0] == 1.0
    assert ks_two_sample([1, 2, 3, 4], [3, 4, 5, 6])[0] == 0.5
    with pytest.raises(ValueError):
        ks_two_sample([], [1])


@pytest.mark.parametrize("lam", [0.05, 0.3, 0.7, 0.99, 1.0, 1.2, 2.0, 3.5, 6.0])
def test_kolmogorov_sf_against_scipy(lam):
    assert kolmogorov_sf(lam) == pytest.approx(float(special.kolmogorov(lam)), abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-5, 5), min_size=1, max_size=30),
       st.lists(st.integers(-5, 5), min_size=1, max_size=30))
def test_ks_statistic_against_scipy(a, b):
    from scipy.stats import ks_2samp
    d, p = ks_two_sample(a, b)
    assert d == pytest.approx(ks_2samp(a, b, method="asymp").statistic, abs=1e-12)
    assert 0.0 <= d <= 1.0 and 0.0 <= p <= 1.0
    assert ks_two_sample(a, a)[0] == 0.0


# -- surrogate & shift test -----------------------------------------------------------

def make_table(years, c, d):
    n = len(years)
    nan = np.full(n, np.nan)
    return MetricTable(ids=np.array([f"p{k:05d}" for k in range(n)]), year=np.asarray(years),
                       c_w=np.asarray(c), d_w=np.asarray(d, dtype=float),
                       ref_count=np.ones(n, dtype=np.int64), ref_age=nan, ref_popularity=nan,
                       ref_diversity=nan)


def test_surrogate_preserves_year_multiset():
    rng = np.random.default_rng(0)
    years = rng.integers(1990, 2000, size=500)
    t = make_table(years, rng.poisson(3, 500), rng.uniform(-1, 1, 500))
    for s in reshuffle_years_surrogate(t, seed=5, trials=3, min_cohort=1):
        counts = dict(zip(*np.unique(years, return_counts=True)))
        assert {int(k): int(n) for k, n in zip(s.keys, s.n)} == {int(k): int(v) for k, v in counts.items()}


def test_surrogate_single_year_equals_empirical():
    rng = np.random.default_rng(1)
    t = make_table(np.full(100, 2000), rng.poisson(3, 100), rng.uniform(-1, 1, 100))
    emp = grouped_correlation(t.year, t.c_w, t.d_w, min_cohort=1)
    for s in reshuffle_years_surrogate(t, seed=2, trials=4, min_cohort=1):
        assert s.values[0] == pytest.approx(emp.values[0], abs=1e-15)


def test_surrogate_narrower_on_trending_cohorts():
    rng = np.random.default_rng(2)
    years, c, d = [], [], []
    for k, y in enumerate(range(1960, 2000)):
        rho = 0.2 - 0.4 * k / 39
        x = rng.normal(size=400)
        years += [y] * 400
        c.append(x)
        d.append(rho * x + math.sqrt(1 - rho ** 2) * rng.normal(size=400))
    t = make_table(np.array(years), np.concatenate(c), np.concatenate(d))
    emp = grouped_correlation(t.year, t.c_w, t.d_w)
    sd_emp = np.std(emp.values)
    trials = reshuffle_years_surrogate(t, seed=9, trials=100)
    assert sum(np.std(s.values) < sd_emp for s in trials) == 100


def test_surrogate_errors():
    t = make_table([2000], [1], [0.5])
    with pytest.raises(ValueError):
        reshuffle_years_surrogate(t, 0, 0)


def test_shift_test_examples():
    x = np.arange(1, 6, dtype=float)
    res = dict(pearson_shift_test(x, x, 2))
    assert res[0] == pytest.approx(1.0)
    assert sorted(res) == [-2, -1, 0, 1, 2]
    rng = np.random.default_rng(3)
    a, b = rng.normal(size=50), rng.normal(size=50)
    assert dict(pearson_shift_test(a, b, 5))[0] == correlation(a, b).value
    with pytest.raises(ValueError):
        pearson_shift_test(x, x, 3)


def test_shift_test_noise_floor_on_independent_pairs():
    rng = np.random.default_rng(4)
    means = []
    for _ in range(100):
        a, b = rng.normal(size=1000), rng.normal(size=1000)
        means.append(np.mean([abs(v) for s, v in pearson_shift_test(a, b, 20) if s != 0]))
    assert np.mean(means) < 0.1


def test_derive_seed_streams_differ():
    seeds = {derive_seed(7, name, k) for name in ("surrogate", "bootstrap") for k in range(5)}
    assert len(seeds) == 10
    assert derive_seed(7, "surrogate") == derive_seed(7, "surrogate")
