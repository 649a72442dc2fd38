"""Cohort-level analyses assembled from a ``MetricTable`` (and the graph where needed).

Percentile strata and top-k selections order rows by ``(value, id)``, so
results are deterministic under heavy ties.  Rows with undefined
disruption are left out of disruption statistics only.
"""
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .graph import TimeWindow
from .series import CohortSeries, group_rows
from .stats import correlation, grouped_correlation

DEFAULT_MIN_COHORT = 30
DEFAULT_STRATA = {"top10": (90, 100), "bottom10": (0, 10), "all": (0, 100)}
REFERENCE_METRICS = ("ref_age", "ref_popularity", "ref_diversity")


def _exact(x):
    return Fraction(str(x)) if isinstance(x, float) else Fraction(x)


def pct_slice(n, lo, hi):
    """Row positions ``[start, stop)`` of the ``lo``..``hi`` percentile band among ``n`` sorted rows."""
    half = Fraction(1, 2)
    start = math.floor(_exact(lo) * n / 100 + half)
    stop = math.floor(_exact(hi) * n / 100 + half)
    return start, stop


def top_count(n, fraction):
    return math.ceil(_exact(fraction) * n)


def rank_order(values, ids):
    """Row positions sorted ascending by ``(value, id)``."""
    return np.lexsort((ids, values))


# -- correlation series -------------------------------------------------------

def yearly_correlation_series(table, method="pearson", min_cohort=DEFAULT_MIN_COHORT,
                              x="c_w", y="d_w"):
    """Per publication year, correlation of ``x`` and ``y`` over rows defined in both."""
    return grouped_correlation(table.year, table.column(x), table.column(y), method, min_cohort,
                               label=f"{method}:{x}~{y}")


def metric_correlation_series(table, metric, method="pearson", min_cohort=DEFAULT_MIN_COHORT):
    if metric not in REFERENCE_METRICS:
        raise ValueError(f"metric must be one of {REFERENCE_METRICS}, got {metric!r}")
    return yearly_correlation_series(table, method, min_cohort, x=metric, y="c_w")


# -- relative citations ---------------------------------------------------------

def sign_split(metric="d_w"):
    """Branches ``positive`` (metric > 0) and ``negative`` (metric < 0) over defined rows."""
    def split(table):
        v = table.column(metric).astype(float)
        defined = ~np.isnan(v)
        return defined, {"positive": defined & (v > 0), "negative": defined & (v < 0)}
    return split


def half_split(metric):
    """Within each year, ``top`` and ``bottom`` halves of defined rows ranked by ``(metric, id)``.

    With an odd count the extra row goes to ``top``.
    """
    def split(table):
        v = table.column(metric).astype(float)
        defined = ~np.isnan(v)
        top = np.zeros(len(table), dtype=bool)
        bottom = np.zeros(len(table), dtype=bool)
        _, groups = group_rows(table.year)
        for rows in groups:
            rows = rows[defined[rows]]
            ordered = rows[rank_order(v[rows], table.ids[rows])]
            cut = ordered.size // 2
            bottom[ordered[:cut]] = True
            top[ordered[cut:]] = True
        return defined, {"top": top, "bottom": bottom}
    return split


def relative_citation_series(table, split, min_cohort=DEFAULT_MIN_COHORT):
    """Per year, branch mean ``c_w`` over the mean ``c_w`` of all defined rows that year.

    ``split(table)`` returns ``(defined_mask, {branch_name: mask})``.
    """
    defined, branches = split(table)
    c = table.c_w.astype(float)
    uniq, groups = group_rows(table.year)
    out = {}
    for name, mask in branches.items():
        values = np.full(uniq.size, np.nan)
        n = np.zeros(uniq.size, dtype=np.int64)
        for k, rows in enumerate(groups):
            base = rows[defined[rows]]
            sel = rows[mask[rows]]
            n[k] = sel.size
            if base.size < min_cohort or sel.size == 0:
                continue
            year_mean = c[base].mean()
            if year_mean == 0:
                continue
            values[k] = c[sel].mean() / year_mean
        out[name] = CohortSeries(uniq, values, n, label=f"relative:{name}")
    return out


# -- disruption by impact strata -----------------------------------------------

def _year_strata_positions(table, defined):
    """For each year: defined rows ordered by ``(c_w, id)``."""
    uniq, groups = group_rows(table.year)
    ordered = []
    for rows in groups:
        rows = rows[defined[rows]]
        ordered.append(rows[rank_order(table.c_w[rows], table.ids[rows])])
    return uniq, ordered


def disruption_by_impact_strata(table, strata=None, min_cohort=1):
    """Mean ``d_w`` and fraction ``d_w > 0`` per year for each ``c_w`` percentile stratum.

    ``strata`` maps a name to ``(lo_pct, hi_pct)``; percentiles are taken
    within each year over rows with defined ``d_w``.  Returns
    ``{name: {"mean": CohortSeries, "frac_positive": CohortSeries}}``.
    """
    strata = DEFAULT_STRATA if strata is None else strata
    d = table.d_w.astype(float)
    defined = ~np.isnan(d)
    uniq, ordered = _year_strata_positions(table, defined)
    out = {}
    for name, (lo, hi) in strata.items():
        mean = np.full(uniq.size, np.nan)
        frac = np.full(uniq.size, np.nan)
        n = np.zeros(uniq.size, dtype=np.int64)
        for k, rows in enumerate(ordered):
            a, b = pct_slice(rows.size, lo, hi)
            sel = rows[a:b]
            n[k] = sel.size
            if sel.size == 0 or sel.size < min_cohort:
                continue
            mean[k] = d[sel].mean()
            frac[k] = np.count_nonzero(d[sel] > 0) / sel.size
        out[name] = {
            "mean": CohortSeries(uniq, mean, n.copy(), label=f"{name}:mean_d"),
            "frac_positive": CohortSeries(uniq, frac, n.copy(), label=f"{name}:frac_d_pos"),
        }
    return out


@dataclass(frozen=True)
class EraDelta:
    bin_lo: float
    bin_hi: float
    delta: float
    early_cut: int
    late_cut: int
    n_early: int
    n_late: int


def percentile_bins(bins):
    """``bins`` as an int (equal-width partition of 0..100) or explicit edges."""
    if isinstance(bins, int):
        if bins < 1:
            raise ValueError("need at least one percentile bin")
        edges = [Fraction(100 * k, bins) for k in range(bins + 1)]
    else:
        edges = [_exact(e) for e in bins]
    if edges[0] != 0 or edges[-1] != 100 or any(b <= a for a, b in zip(edges, edges[1:])):
        raise ValueError("percentile bin edges must increase from 0 to 100")
    return list(zip(edges[:-1], edges[1:]))


def era_deltas(table, early_cut=1960, late_cut=2000, bins=10, statistic="mean"):
    """Late-era minus early-era statistic of ``d_w`` per ``c_w`` percentile bin.

    Early era: year <= ``early_cut``; late era: year >= ``late_cut``.
    ``statistic`` is ``"mean"`` (mean d_w) or ``"frac_positive"`` (share with d_w > 0).
    """
    if early_cut >= late_cut:
        raise ValueError("early_cut must precede late_cut")
    if statistic not in ("mean", "frac_positive"):
        raise ValueError(f"unknown statistic {statistic!r}")
    spans = percentile_bins(bins)
    d = table.d_w.astype(float)
    defined = ~np.isnan(d)
    uniq, ordered = _year_strata_positions(table, defined)
    pools = {"early": [[] for _ in spans], "late": [[] for _ in spans]}
    for year, rows in zip(uniq, ordered):
        era = "early" if year <= early_cut else "late" if year >= late_cut else None
        if era is None:
            continue
        for b, (lo, hi) in enumerate(spans):
            a, z = pct_slice(rows.size, lo, hi)
            pools[era][b].append(rows[a:z])

    def stat(parts):
        rows = np.concatenate(parts) if parts else np.empty(0, dtype=np.int64)
        if rows.size == 0:
            return math.nan, 0
        vals = d[rows]
        if statistic == "mean":
            return float(vals.mean()), rows.size
        return np.count_nonzero(vals > 0) / rows.size, rows.size

    out = []
    for b, (lo, hi) in enumerate(spans):
        early, ne = stat(pools["early"][b])
        late, nl = stat(pools["late"][b])
        delta = late - early if ne and nl else math.nan
        out.append(EraDelta(float(lo), float(hi), delta, early_cut, late_cut, ne, nl))
    return out


# -- graph-level series ------------------------------------------------------

def papers_per_year(graph):
    counts = np.diff(graph.year_ptr) if graph.n_papers else np.zeros(0, dtype=np.int64)
    keys = np.arange(graph.year_min, graph.year_min + counts.size)
    return CohortSeries(keys, counts.astype(float), counts.astype(np.int64), label="papers")


def growth_rate(series):
    """Exponential growth rate: least-squares slope of ``log(count)`` against year."""
    keep = series.values > 0
    if np.count_nonzero(keep) < 2:
        return math.nan
    slope, _ = np.polyfit(series.keys[keep].astype(float), np.log(series.values[keep]), 1)
    return float(slope)


@dataclass
class AttachmentScatter:
    ids: np.ndarray
    years: np.ndarray
    dk_first: np.ndarray
    dk_second: np.ndarray


def preferential_attachment_series(graph, first=TimeWindow(1, 5), second=TimeWindow(6, 5),
                                   min_cohort=DEFAULT_MIN_COHORT, backend=None):
    """Per year, Pearson of citations gained in ``first`` versus ``second`` window.

    Years whose second window runs past the last corpus year are undefined.
    Returns ``(CohortSeries, AttachmentScatter)``; the scatter covers papers
    of fully covered years.
    """
    if first.overlaps(second):
        raise ValueError(f"windows {first} and {second} overlap")
    dk1 = kernels.windowed_counts(graph, first, backend)
    dk2 = kernels.windowed_counts(graph, second, backend)
    last_needed = max(first.last, second.last)
    keys = np.arange(graph.year_min, graph.year_max + 1) if graph.n_papers else np.zeros(0, int)
    values = np.full(keys.size, np.nan)
    n = np.zeros(keys.size, dtype=np.int64)
    covered_rows = []
    for k, year in enumerate(keys):
        rows = graph.papers_in_year(year)
        n[k] = rows.size
        if rows.size == 0 or year + last_needed > graph.year_max:
            continue
        covered_rows.append(rows)
        if rows.size >= min_cohort:
            values[k] = correlation(dk1[rows], dk2[rows], "pearson").value
    rows = np.concatenate(covered_rows) if covered_rows else np.empty(0, dtype=np.int64)
    scatter = AttachmentScatter(graph.ids[rows], graph.years[rows], dk1[rows], dk2[rows])
    return CohortSeries(keys, values, n, label="pref-attach"), scatter


# -- citation share -----------------------------------------------------------

def _share(c, key, ids, fraction):
    total = c.sum()
    if c.size == 0 or total == 0:
        return math.nan
    k = top_count(c.size, fraction)
    top = rank_order(key, ids)[c.size - k:]
    return float(c[top].sum() / total)


def citation_share(table, top_fraction, by="c_w", cohort_keys=None, min_cohort=1):
    """Per cohort, share of total ``c_w`` held by the top ``ceil(fraction * n)`` rows ranked by ``by``."""
    if not 0 < top_fraction < 1:
        raise ValueError("top_fraction must lie strictly between 0 and 1")
    keys = table.year if cohort_keys is None else np.asarray(cohort_keys)
    key = table.column(by).astype(float)
    c = table.c_w.astype(float)
    uniq, groups = group_rows(keys)
    values = np.full(uniq.size, np.nan)
    n = np.zeros(uniq.size, dtype=np.int64)
    for k, rows in enumerate(groups):
        rows = rows[~np.isnan(key[rows])]
        n[k] = rows.size
        if rows.size >= min_cohort:
            values[k] = _share(c[rows], key[rows], table.ids[rows], top_fraction)
    return CohortSeries(uniq, values, n, label=f"share:{by}:{top_fraction}")


# -- field stratification -------------------------------------------------------

@dataclass(frozen=True)
class FieldIndex:
    code: str
    paper_ids: tuple
    size: int


def build_field_index(graph):
    """One entry per field code (sorted), members in graph index order."""
    if graph.field_idx.size == 0:
        return []
    owners = np.repeat(np.arange(graph.n_papers), np.diff(graph.field_ptr))
    codes, groups = group_rows(graph.field_idx)
    out = []
    for code, pos in zip(codes, groups):
        members = np.sort(owners[pos])
        out.append(FieldIndex(str(graph.field_codes[code]), tuple(graph.ids[members].tolist()),
                              int(members.size)))
    return out


def log_size_bins(sizes, per_decade=1):
    """Logarithmic edges ``10**(k/per_decade)`` covering ``sizes`` (bins are ``[lo, hi)``)."""
    sizes = np.asarray(sizes)
    if sizes.size == 0:
        return [1, 10]
    top = math.ceil(per_decade * math.log10(sizes.max() + 1))
    edges = sorted({int(round(10 ** (k / per_decade))) for k in range(0, max(top, 1) + 1)})
    if edges[-1] <= sizes.max():
        edges.append(int(sizes.max()) + 1)
    return edges


@dataclass(frozen=True)
class FieldBinResult:
    bin_lo: int
    bin_hi: int
    n_fields: int
    n_rows: int
    correlation: float
    rel_top: float
    rel_bottom: float
    share: float


def field_stratification(graph, table, size_bins=None, method="pearson", top_fraction=0.01,
                         min_cohort=1):
    """Pool table rows by field-size bin and compute the per-bin statistics.

    A paper contributes once per field membership.  Halves of the pool are
    formed from rows with defined ``d_w`` ordered by ``(d_w, id)``;
    the extra row of an odd pool joins the top half.
    """
    fields = build_field_index(graph)
    sizes = np.array([f.size for f in fields], dtype=np.int64)
    edges = log_size_bins(sizes) if size_bins is None else list(size_bins)
    out = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        members = [f for f in fields if lo <= f.size < hi]
        pool = []
        for f in members:
            if len(table) == 0:
                break
            ids = np.asarray(f.paper_ids)
            pos = np.minimum(np.searchsorted(table.ids, ids), len(table) - 1)
            pool.append(pos[table.ids[pos] == ids])
        rows = np.concatenate(pool) if pool else np.empty(0, dtype=np.int64)
        res = _field_bin_stats(table, rows, method, top_fraction, min_cohort)
        out.append(FieldBinResult(int(lo), int(hi), len(members), int(rows.size), *res))
    return out


def _field_bin_stats(table, rows, method, top_fraction, min_cohort):
    nan = math.nan
    if rows.size < max(min_cohort, 1):
        return nan, nan, nan, nan
    c = table.c_w[rows].astype(float)
    d = table.d_w[rows].astype(float)
    ids = table.ids[rows]
    corr = correlation(c, d, method).value
    defined = ~np.isnan(d)
    rel_top = rel_bottom = nan
    if defined.any():
        cd, dd, idd = c[defined], d[defined], ids[defined]
        ordered = rank_order(dd, idd)
        cut = ordered.size // 2
        base = cd.mean()
        if base > 0:
            rel_top = cd[ordered[cut:]].mean() / base
            if cut:
                rel_bottom = cd[ordered[:cut]].mean() / base
    share = _share(c, c, ids, top_fraction)
    return corr, rel_top, rel_bottom, share
