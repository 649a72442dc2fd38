"""Per-paper impact and originality metrics.

Undefined values are NaN in float columns.  Dangling (out-of-corpus)
references count toward ``ref_count`` only; they have no year and no
citers, so age, popularity, diversity and disruption ignore them.
"""
import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .graph import DEFAULT_WINDOW, TimeWindow, citers_in_window, cocitation_count, subsequent_in_window

COLUMNS = ("id", "year", "c_w", "d_w", "ref_count", "ref_age", "ref_popularity", "ref_diversity")
METRIC_COLUMNS = ("c_w", "d_w", "ref_count", "ref_age", "ref_popularity", "ref_diversity")


@dataclass(frozen=True)
class DisruptionCounts:
    n_only_focal: int
    n_both: int
    n_subsequent: int

    @property
    def value(self):
        denom = self.n_only_focal + self.n_both + self.n_subsequent
        if denom == 0:
            return math.nan
        return (self.n_only_focal - self.n_both) / denom


@dataclass(frozen=True)
class PaperMetrics:
    c_w: int
    d_w: float
    ref_count: int
    ref_age: float
    ref_popularity: float
    ref_diversity: float


# -- single-paper kernels -------------------------------------------------

def windowed_citations(graph, focal, w=DEFAULT_WINDOW):
    return int(citers_in_window(graph, focal, w).size)


def disruption_counts(graph, focal, w=DEFAULT_WINDOW):
    citers = citers_in_window(graph, focal, w)
    refs = graph.refs(focal)
    n_both = 0
    for c in citers:
        if np.intersect1d(graph.refs(c), refs, assume_unique=True).size:
            n_both += 1
    n_sub = subsequent_in_window(graph, focal, w).size
    return DisruptionCounts(int(citers.size - n_both), n_both, int(n_sub))


def disruption(graph, focal, w=DEFAULT_WINDOW):
    """Disruption of ``focal`` within ``w``; NaN without in-corpus references or windowed citers."""
    focal = graph.check(focal)
    if graph.refs(focal).size == 0:
        return math.nan
    counts = disruption_counts(graph, focal, w)
    if counts.n_only_focal + counts.n_both == 0:
        return math.nan
    return counts.value


def reference_age(graph, focal):
    refs = graph.refs(focal)
    if refs.size == 0:
        return math.nan
    return float(np.mean(graph.years[focal] - graph.years[refs]))


def reference_popularity(graph, focal, w=DEFAULT_WINDOW):
    refs = graph.refs(focal)
    if refs.size == 0:
        return math.nan
    return float(np.mean([windowed_citations(graph, int(r), w) for r in refs]))


def reference_diversity(graph, focal):
    refs = graph.refs(focal)
    k = refs.size
    if k < 2:
        return math.nan
    year = int(graph.years[focal])
    acc = 0.0
    for s in range(k):
        for t in range(s + 1, k):
            acc += 1.0 / (1.0 + cocitation_count(graph, int(refs[s]), int(refs[t]), year))
    return acc / (k * (k - 1) // 2)


def paper_metrics(graph, focal, w=DEFAULT_WINDOW):
    focal = graph.check(focal)
    return PaperMetrics(
        c_w=windowed_citations(graph, focal, w),
        d_w=disruption(graph, focal, w),
        ref_count=int(graph.ref_counts()[focal]),
        ref_age=reference_age(graph, focal),
        ref_popularity=reference_popularity(graph, focal, w),
        ref_diversity=reference_diversity(graph, focal),
    )


# -- batch table ------------------------------------------------------------

@dataclass(frozen=True)
class MetricFilters:
    """Row filters; all bounds inclusive, ``None`` disables."""

    min_citations: int = None
    refs_bin: tuple = None
    years: tuple = None

    def to_dict(self):
        return {
            "min_citations": self.min_citations,
            "refs_bin": list(self.refs_bin) if self.refs_bin is not None else None,
            "years": list(self.years) if self.years is not None else None,
        }

    def mask(self, years, c_w, ref_count):
        keep = np.ones(years.shape[0], dtype=bool)
        if self.min_citations is not None:
            keep &= c_w >= self.min_citations
        if self.refs_bin is not None:
            lo, hi = self.refs_bin
            keep &= (ref_count >= lo) & (ref_count <= hi)
        if self.years is not None:
            lo, hi = self.years
            keep &= (years >= lo) & (years <= hi)
        return keep


NO_FILTERS = MetricFilters()


@dataclass
class MetricTable:
    ids: np.ndarray
    year: np.ndarray
    c_w: np.ndarray
    d_w: np.ndarray
    ref_count: np.ndarray
    ref_age: np.ndarray
    ref_popularity: np.ndarray
    ref_diversity: np.ndarray
    window: TimeWindow = DEFAULT_WINDOW
    filters: MetricFilters = field(default_factory=MetricFilters)

    def __len__(self):
        return int(self.ids.shape[0])

    def column(self, name):
        if name == "id":
            return self.ids
        if name not in METRIC_COLUMNS and name != "year":
            raise KeyError(f"unknown metric column {name!r}")
        return getattr(self, name)

    def take(self, rows):
        """Sub-table of the given row positions (or boolean mask)."""
        cols = {name: getattr(self, name)[rows] for name in ("ids", "year") + METRIC_COLUMNS}
        return MetricTable(window=self.window, filters=self.filters, **cols)

    def row(self, paper_id):
        k = int(np.searchsorted(self.ids, paper_id))
        if k >= len(self) or self.ids[k] != paper_id:
            raise KeyError(paper_id)
        return PaperMetrics(int(self.c_w[k]), float(self.d_w[k]), int(self.ref_count[k]),
                            float(self.ref_age[k]), float(self.ref_popularity[k]),
                            float(self.ref_diversity[k]))

    def to_csv(self, path=None):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(COLUMNS)
        for k in range(len(self)):
            writer.writerow([
                self.ids[k], int(self.year[k]), int(self.c_w[k]), _fmt(self.d_w[k]),
                int(self.ref_count[k]), _fmt(self.ref_age[k]), _fmt(self.ref_popularity[k]),
                _fmt(self.ref_diversity[k]),
            ])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text, encoding="utf-8")
        return text

    @classmethod
    def from_csv(cls, path, window=DEFAULT_WINDOW, filters=NO_FILTERS):
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or tuple(header) != COLUMNS:
                raise ValueError(f"{path}: expected header {','.join(COLUMNS)}")
            rows = list(reader)
        def col(k, conv):
            return [conv(r[k]) for r in rows]
        return cls(
            ids=np.array(col(0, str), dtype=str) if rows else np.array([], dtype="<U1"),
            year=np.array(col(1, int), dtype=np.int64),
            c_w=np.array(col(2, int), dtype=np.int64),
            d_w=np.array(col(3, _parse), dtype=float),
            ref_count=np.array(col(4, int), dtype=np.int64),
            ref_age=np.array(col(5, _parse), dtype=float),
            ref_popularity=np.array(col(6, _parse), dtype=float),
            ref_diversity=np.array(col(7, _parse), dtype=float),
            window=window, filters=filters,
        )


def _fmt(x):
    x = float(x)
    return "" if math.isnan(x) else repr(x)


def _parse(text):
    return math.nan if text == "" else float(text)


def compute_metric_table(graph, w=DEFAULT_WINDOW, filters=NO_FILTERS, backend=None):
    """Compute every metric for every paper, then keep rows passing ``filters``.

    Metrics always see the whole graph; filters only select output rows,
    which are ordered by paper id.
    """
    n = graph.n_papers
    c_w = kernels.windowed_counts(graph, w, backend)
    only, both, subs = kernels.disruption_counts(graph, w, backend)
    n_refs_in = graph.out_degree()
    cited = only + both
    denom = cited + subs
    d_w = np.full(n, np.nan)
    ok = (n_refs_in > 0) & (cited > 0) & (denom > 0)
    d_w[ok] = (only[ok] - both[ok]) / denom[ok]

    src = np.repeat(np.arange(n), n_refs_in)
    with np.errstate(invalid="ignore", divide="ignore"):
        age_sum = np.bincount(src, weights=graph.years[src] - graph.years[graph.out_idx], minlength=n)
        pop_sum = np.bincount(src, weights=c_w[graph.out_idx], minlength=n)
        ref_age = np.where(n_refs_in > 0, age_sum / np.maximum(n_refs_in, 1), np.nan)
        ref_pop = np.where(n_refs_in > 0, pop_sum / np.maximum(n_refs_in, 1), np.nan)
    ref_div = kernels.reference_diversity(graph, backend)
    ref_count = graph.ref_counts()

    keep = filters.mask(graph.years, c_w, ref_count)
    rows = np.nonzero(keep)[0]
    rows = rows[np.argsort(graph.ids[rows], kind="stable")]
    return MetricTable(
        ids=graph.ids[rows], year=graph.years[rows].astype(np.int64), c_w=c_w[rows],
        d_w=d_w[rows], ref_count=ref_count[rows].astype(np.int64), ref_age=ref_age[rows],
        ref_popularity=ref_pop[rows], ref_diversity=ref_div[rows], window=w, filters=filters,
    )
