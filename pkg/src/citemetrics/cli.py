"""citemetrics command line: ingest, metrics, analyze, synth, validate.

Every command that writes files also writes a JSON manifest listing the
inputs, parameters and a SHA-256 per output.  Exit status is 0 when all
requested outputs were written, 1 on corpus/input errors and 2 on usage
errors.
"""
import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__, cohorts, stats, synth
from ._accel import BACKENDS, set_threads
from .errors import CorpusError, IndexFormatError
from .graph import DEFAULT_WINDOW, CitationGraph, TimeWindow
from .ingest import load_corpus, validate_corpus, write_corpus
from .manifest import RunManifest, sha256_files
from .metrics import COLUMNS, MetricFilters, MetricTable, compute_metric_table

log = logging.getLogger("citemetrics")

CACHE_ENV = "CITEMETRICS_CACHE_DIR"
REF_METRICS = cohorts.REFERENCE_METRICS


class UsageError(Exception):
    """Bad flag values detected after parsing; reported with exit status 2."""


# -- argument types -------------------------------------------------------------

def _pair(text, conv=int):
    parts = str(text).replace(":", ",").split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected two values like A,B, got {text!r}")
    try:
        lo, hi = conv(parts[0]), conv(parts[1])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if hi < lo:
        raise argparse.ArgumentTypeError(f"range {text!r} is reversed")
    return lo, hi


def _window(text):
    try:
        return TimeWindow.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _csv_list(choices=None):
    def parse(text):
        items = [t.strip() for t in text.split(",") if t.strip()]
        bad = [t for t in items if choices is not None and t not in choices]
        if not items or bad:
            raise argparse.ArgumentTypeError(
                f"expected a comma list from {sorted(choices) if choices else 'values'}, got {text!r}")
        return items
    return parse


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


# -- graph / table sources -------------------------------------------------------

def cache_dir():
    env = os.environ.get(CACHE_ENV)
    return Path(env) if env else Path.home() / ".cache" / "citemetrics"


def _source_files(args):
    files = [Path(args.meta)]
    if getattr(args, "edges", None):
        files.append(Path(args.edges))
    for f in files:
        if not f.is_file():
            raise FileNotFoundError(f"input file not found: {f}")
    return files


def _cache_path(files):
    return cache_dir() / f"{sha256_files(files)[:24]}.cmidx"


def open_graph(args):
    """Graph from ``--index``, or from ``--meta`` through the index cache."""
    if getattr(args, "index", None):
        return CitationGraph.load(args.index)
    if not getattr(args, "meta", None):
        raise UsageError("need a corpus: pass --index or --meta")
    files = _source_files(args)
    cached = _cache_path(files)
    if cached.is_file():
        try:
            return CitationGraph.load(cached)
        except IndexFormatError as exc:
            log.warning("ignoring stale cache entry (%s)", exc)
    graph, _ = load_corpus(args.meta, getattr(args, "edges", None))
    try:
        cached.parent.mkdir(parents=True, exist_ok=True)
        graph.save(cached)
    except OSError as exc:
        log.warning("could not write index cache %s: %s", cached, exc)
    return graph


def _filters(args):
    return MetricFilters(min_citations=args.min_citations, refs_bin=args.refs_bin,
                         years=args.years)


def open_table(args, graph=None):
    """Metric table from ``--table``, else computed from the corpus with the window/filter flags."""
    filters = _filters(args)
    if getattr(args, "table", None):
        table = MetricTable.from_csv(args.table, window=args.window, filters=filters)
        keep = filters.mask(table.year, table.c_w, table.ref_count)
        return table if keep.all() else table.take(keep), None
    graph = open_graph(args) if graph is None else graph
    return compute_metric_table(graph, args.window, filters, backend=args.backend), graph


# -- output helpers -----------------------------------------------------------

class Outputs:
    """Collects written files for the manifest."""

    def __init__(self, out_dir, manifest):
        self.dir = Path(out_dir)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.manifest = manifest

    def _record(self, path):
        self.manifest.add_output(path, base=self.dir)
        return path

    def rows(self, name, header, rows):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(v) for v in row])
        path = self.dir / name
        path.write_text(buf.getvalue(), encoding="utf-8")
        return self._record(path)

    def series(self, name, series):
        if len(series) == 0 or not series.defined().any():
            log.warning("%s: series undefined for every cohort; writing an empty table", name)
            return self.rows(name, ["key", "value", "n"], [])
        path = self.dir / name
        series.to_csv(path)
        return self._record(path)

    def json(self, name, payload):
        path = self.dir / name
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return self._record(path)

    def finish(self, name):
        return self.manifest.write(self.dir / name)


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return "" if math.isnan(v) else repr(float(v))
    if isinstance(v, np.integer):
        return int(v)
    return v


def _num(v):
    v = float(v)
    return None if math.isnan(v) else v


def _manifest(command, args, graph=None, **extra):
    m = RunManifest(command=command, **extra)
    if graph is not None:
        m.corpus_hash = graph.digest()
    if hasattr(args, "window"):
        m.window = [args.window.offset, args.window.length]
    if hasattr(args, "min_citations"):
        m.filters = _filters(args).to_dict()
    return m


# -- commands ---------------------------------------------------------------

def cmd_ingest(args):
    files = _source_files(args)
    graph, report = load_corpus(args.meta, args.edges)
    out = Path(args.out) if args.out else _cache_path(files)
    out.parent.mkdir(parents=True, exist_ok=True)
    graph.save(out)
    payload = report.to_dict()
    payload["index"] = str(out)
    payload["corpus_hash"] = graph.digest()
    print(json.dumps(payload, indent=2, sort_keys=True))
    return report


def cmd_validate(args):
    graph = open_graph(args)
    warnings = validate_corpus(graph)
    for w in warnings:
        print(w)
    print(f"{len(warnings)} warning(s) for {graph.n_papers} papers", file=sys.stderr)
    return 1 if warnings and args.strict else 0


def cmd_metrics(args):
    graph = open_graph(args)
    table = compute_metric_table(graph, args.window, _filters(args), backend=args.backend)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    table.to_csv(out)
    if len(table) == 0:
        log.warning("no papers pass the filters; wrote header only")
    manifest = _manifest("metrics", args, graph)
    manifest.params = {"rows": len(table), "columns": list(COLUMNS)}
    manifest.add_output(out)
    manifest.write(Path(args.manifest) if args.manifest else out.with_suffix(".manifest.json"))
    return table


def _an_correlations(args, out, table, graph):
    overall = []
    for metric in args.metrics:
        for method in args.methods:
            if metric == "d_w":
                s = cohorts.yearly_correlation_series(table, method, args.min_cohort or 30)
            else:
                s = cohorts.metric_correlation_series(table, metric, method, args.min_cohort or 30)
            out.series(f"correlation_{method}_{metric}.csv", s)
            res = stats.correlation(table.c_w, table.column(metric), method)
            overall.append((method, metric, res.value, res.n))
    out.rows("correlation_overall.csv", ["method", "metric", "value", "n"], overall)


def _an_relative(args, out, table, graph):
    split = cohorts.sign_split(args.metric) if args.split == "sign" else cohorts.half_split(args.metric)
    for branch, s in cohorts.relative_citation_series(table, split, args.min_cohort or 30).items():
        out.series(f"relative_{args.metric}_{branch}.csv", s)


def _parse_strata(text):
    strata = {}
    for item in text.split(","):
        parts = item.split(":")
        if len(parts) != 3:
            raise UsageError(f"stratum must look like NAME:LO:HI, got {item!r}")
        strata[parts[0]] = (float(parts[1]), float(parts[2]))
    return strata


def _an_strata(args, out, table, graph):
    res = cohorts.disruption_by_impact_strata(table, _parse_strata(args.strata), args.min_cohort or 1)
    for name, pair in res.items():
        out.series(f"strata_{name}_mean.csv", pair["mean"])
        out.series(f"strata_{name}_frac_positive.csv", pair["frac_positive"])
    out.manifest.cuts = {"strata": _parse_strata(args.strata)}


def _an_era(args, out, table, graph):
    bins = args.bins if len(args.bins) > 1 else int(args.bins[0])
    for statistic in args.statistic:
        rows = cohorts.era_deltas(table, args.early, args.late, bins, statistic)
        if all(math.isnan(r.delta) for r in rows):
            log.warning("era deltas (%s) undefined in every bin", statistic)
        out.rows(f"era_deltas_{statistic}.csv",
                 ["bin_lo", "bin_hi", "delta", "n_early", "n_late"],
                 [(r.bin_lo, r.bin_hi, r.delta, r.n_early, r.n_late) for r in rows])
    out.manifest.cuts = {"early": args.early, "late": args.late, "bins": args.bins}


def _an_pref(args, out, table, graph):
    series, scatter = cohorts.preferential_attachment_series(
        graph, args.first, args.second, args.min_cohort or 30, backend=args.backend)
    out.series("pref_attach.csv", series)
    out.rows("pref_attach_scatter.csv", ["id", "dk_first", "dk_second"],
             zip(scatter.ids, scatter.dk_first, scatter.dk_second))
    out.manifest.params.update(first=str(args.first), second=str(args.second))


def _an_share(args, out, table, graph):
    s = cohorts.citation_share(table, args.top, args.by, min_cohort=args.min_cohort or 1)
    out.series(f"share_{args.by}.csv", s)


def _an_fields(args, out, table, graph):
    index = cohorts.build_field_index(graph)
    sizes = [f.size for f in index]
    edges = cohorts.log_size_bins(sizes, args.per_decade)
    res = cohorts.field_stratification(graph, table, edges, args.method, args.top,
                                       args.min_cohort or 1)
    out.rows("field_sizes.csv", ["code", "size"],
             sorted(((f.code, f.size) for f in index), key=lambda r: (-r[1], r[0])))
    out.rows("fields.csv", list(cohorts.FieldBinResult.__dataclass_fields__),
             [tuple(asdict(r).values()) for r in res])
    out.manifest.cuts = {"size_bins": edges}


def _an_growth(args, out, table, graph):
    series = cohorts.papers_per_year(graph)
    out.series("papers_per_year.csv", series)
    out.json("growth.json", {"growth_rate": _num(cohorts.growth_rate(series))})


def _an_surrogate(args, out, table, graph):
    seed = stats.derive_seed(args.seed, "surrogate")
    min_cohort = args.min_cohort or 30
    empirical = cohorts.yearly_correlation_series(table, args.method, min_cohort)
    trials = stats.reshuffle_years_surrogate(table, seed, args.trials, args.method,
                                             min_cohort=min_cohort)
    emp_vals = empirical.values[empirical.defined()]
    emp_sd = float(np.std(emp_vals)) if emp_vals.size else math.nan
    summary, long_rows, pooled = [], [], []
    for t, s in enumerate(trials):
        vals = s.values[s.defined()]
        pooled.append(vals)
        sd = float(np.std(vals)) if vals.size else math.nan
        summary.append((t, sd, emp_sd, int(sd < emp_sd)))
        long_rows.extend((t, k, v, n) for k, v, n in zip(s.keys, s.values, s.n))
    out.series("surrogate_empirical.csv", empirical)
    out.rows("surrogate_series.csv", ["trial", "key", "value", "n"], long_rows)
    out.rows("surrogate_summary.csv", ["trial", "std_surrogate", "std_empirical", "narrower"],
             summary)
    pooled = np.concatenate(pooled) if pooled else np.empty(0)
    ks = {"statistic": None, "p_value": None}
    if emp_vals.size and pooled.size:
        d, p = stats.ks_two_sample(emp_vals, pooled)
        ks = {"statistic": d, "p_value": p}
    out.json("surrogate_ks.json", {**ks, "narrower_trials": sum(r[3] for r in summary),
                                   "trials": args.trials})
    out.manifest.seeds = {"master": args.seed, "surrogate": seed}


def _an_shift(args, out, table, graph):
    x, y = table.column(args.x).astype(float), table.column(args.y).astype(float)
    keep = ~(np.isnan(x) | np.isnan(y))
    if 2 * args.max_shift >= np.count_nonzero(keep):
        raise UsageError(f"--max-shift {args.max_shift} too large for {np.count_nonzero(keep)} rows")
    res = stats.pearson_shift_test(x, y, args.max_shift)
    out.rows("shift_test.csv", ["shift", "pearson"], res)


def _subset_mask(table, spec):
    kind, _, metric = spec.partition(":")
    if kind not in ("positive", "negative", "top", "bottom") or metric not in COLUMNS[2:]:
        raise UsageError(f"--subset must be positive|negative|top|bottom:METRIC, got {spec!r}")
    v = table.column(metric).astype(float)
    defined = ~np.isnan(v)
    if kind == "positive":
        return defined, defined & (v > 0)
    if kind == "negative":
        return defined, defined & (v < 0)
    rows = np.nonzero(defined)[0]
    ordered = rows[cohorts.rank_order(v[rows], table.ids[rows])]
    cut = ordered.size // 2
    mask = np.zeros(len(table), dtype=bool)
    mask[ordered[cut:] if kind == "top" else ordered[:cut]] = True
    return defined, mask


def _an_bootstrap(args, out, table, graph):
    sample = table.column(args.metric).astype(float)
    base, sub = _subset_mask(table, args.subset) if args.subset else (~np.isnan(sample), None)
    base &= ~np.isnan(sample)
    if not base.any():
        raise UsageError("no rows to bootstrap")
    seeds = {"master": args.seed, "overall": stats.derive_seed(args.seed, "bootstrap", 0)}
    overall = stats.bootstrap_means(sample[base], args.realizations, seeds["overall"])
    cols = [overall.means]
    header = ["realization", "overall"]
    summary = {"overall": {"n": overall.sample_size, "mean": overall.sample_mean,
                           "quantiles": list(overall.quantiles)}}
    if sub is not None:
        sub &= base
        if not sub.any():
            raise UsageError(f"subset {args.subset!r} is empty")
        seeds["subset"] = stats.derive_seed(args.seed, "bootstrap", 1)
        subset = stats.bootstrap_means(sample[sub], args.realizations, seeds["subset"])
        cols.append(subset.means)
        header.append("subset")
        d, p = stats.ks_two_sample(overall.means, subset.means)
        summary["subset"] = {"n": subset.sample_size, "mean": subset.sample_mean,
                             "quantiles": list(subset.quantiles)}
        summary["ks"] = {"statistic": d, "p_value": p}
    out.rows("bootstrap.csv", header, zip(range(args.realizations), *cols))
    out.json("bootstrap_summary.json", summary)
    out.manifest.seeds = seeds


def _read_column(spec):
    path, _, col = spec.partition(":")
    col = col or "value"
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or col not in reader.fieldnames:
            raise UsageError(f"{path}: no column {col!r}")
        return np.array([float(r[col]) for r in reader if r[col] != ""], dtype=float)


def _an_ks(args, out, table, graph):
    a, b = _read_column(args.a), _read_column(args.b)
    d, p = stats.ks_two_sample(a, b)
    out.json("ks.json", {"statistic": d, "p_value": p, "n_a": int(a.size), "n_b": int(b.size),
                         "a": args.a, "b": args.b})


# name -> (handler, needs table, needs graph)
ANALYSES = {
    "correlations": (_an_correlations, True, False),
    "relative-citations": (_an_relative, True, False),
    "strata": (_an_strata, True, False),
    "era-deltas": (_an_era, True, False),
    "pref-attach": (_an_pref, False, True),
    "share": (_an_share, True, False),
    "fields": (_an_fields, True, True),
    "growth": (_an_growth, False, True),
    "surrogate": (_an_surrogate, True, False),
    "shift-test": (_an_shift, True, False),
    "bootstrap": (_an_bootstrap, True, False),
    "ks": (_an_ks, False, False),
}


def cmd_analyze(args):
    handler, needs_table, needs_graph = ANALYSES[args.analysis]
    graph = table = None
    if needs_graph:
        graph = open_graph(args)
    if needs_table:
        table, computed_from = open_table(args, graph)
        graph = graph if graph is not None else computed_from
    manifest = _manifest(f"analyze {args.analysis}", args, graph)
    if graph is None and getattr(args, "table", None):
        manifest.params["table"] = sha256_files([args.table])
    if getattr(args, "min_cohort", None) is not None:
        manifest.params["min_cohort"] = args.min_cohort
    out = Outputs(args.out_dir, manifest)
    handler(args, out, table, graph)
    out.finish(f"{args.analysis}.manifest.json")
    return manifest


_SYNTH_FLAGS = {
    "base_count": float, "growth": float, "refs_mean": float, "refs_spread": float,
    "refs_growth": float, "alpha": float, "beta": str, "n_fields": int, "field_skew": float,
    "extra_field_prob": float, "field_beta_slope": float, "copy_prob": float,
    "copy_novelty": float, "background": int,
}


def cmd_synth(args):
    params = {}
    if args.config:
        params.update(json.loads(Path(args.config).read_text(encoding="utf-8")))
    if args.preset:
        params = {**synth.PRESETS[args.preset], **params}
    for name in _SYNTH_FLAGS:
        value = getattr(args, name)
        if value is not None:
            params[name] = value
    if args.years is not None:
        params["first_year"], params["last_year"] = args.years
    params["seed"] = args.seed
    try:
        config = synth.GenConfig(**params)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid generator config: {exc}") from None
    graph = synth.generate(config, backend=args.backend)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_corpus(graph, out)
    truth = Path(args.truth) if args.truth else out.with_suffix(".truth.json")
    synth.write_truth(config, truth)
    manifest = RunManifest(command="synth", corpus_hash=graph.digest(),
                           seeds={"master": args.seed}, params=config.to_dict())
    manifest.add_output(out)
    manifest.add_output(truth)
    manifest.write(out.with_suffix(".manifest.json"))
    print(json.dumps({"papers": graph.n_papers, "edges": graph.n_edges, "corpus": str(out),
                      "truth": str(truth)}, indent=2, sort_keys=True))
    return graph


# -- parser -------------------------------------------------------------------

def _runtime_parent():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--threads", type=_positive_int, default=None,
                   help="worker threads for the parallel kernels (default: all)")
    p.add_argument("--backend", choices=BACKENDS, default=None,
                   help="kernel backend (default: numba unless CITEMETRICS_DISABLE_JIT is set)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _corpus_parent():
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("corpus")
    g.add_argument("--index", help="binary graph index written by `ingest`")
    g.add_argument("--meta", help="metadata TSV (id, year, refs, fields)")
    g.add_argument("--edges", help="optional citing<TAB>cited edge file")
    return p


def _table_parent():
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("metric table")
    g.add_argument("--window", type=_window, default=DEFAULT_WINDOW, metavar="OFFSET,LEN",
                   help="citation window (default 1,5)")
    g.add_argument("--min-citations", type=int, default=None, metavar="N")
    g.add_argument("--refs-bin", type=_pair, default=None, metavar="LO,HI")
    g.add_argument("--years", type=_pair, default=None, metavar="A,B")
    return p


def build_parser():
    runtime, corpus, table = _runtime_parent(), _corpus_parent(), _table_parent()
    parser = argparse.ArgumentParser(prog="citemetrics", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"citemetrics {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", parents=[runtime], help="parse a corpus and cache its index")
    p.add_argument("--meta", required=True)
    p.add_argument("--edges")
    p.add_argument("--out", help=f"index path (default: under ${CACHE_ENV})")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("validate", parents=[runtime, corpus], help="list corpus warnings")
    p.add_argument("--strict", action="store_true", help="exit 1 when there are warnings")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("metrics", parents=[runtime, corpus, table], help="per-paper metric table")
    p.add_argument("--out", required=True, help="metrics CSV path")
    p.add_argument("--manifest", help="manifest path (default: next to --out)")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("analyze", help="cohort analyses")
    asub = p.add_subparsers(dest="analysis", required=True)
    common = [runtime, corpus, table]

    def add(name, helptext):
        q = asub.add_parser(name, parents=common, help=helptext)
        q.add_argument("--table", help="metrics CSV from `metrics` (otherwise computed)")
        q.add_argument("--out-dir", required=True)
        q.add_argument("--min-cohort", type=int, default=None)
        q.add_argument("--seed", type=int, default=0)
        q.set_defaults(func=cmd_analyze)
        return q

    q = add("correlations", "yearly correlation of c_w with d_w or a reference metric")
    q.add_argument("--methods", type=_csv_list(stats.METHODS), default=["pearson"])
    q.add_argument("--metrics", type=_csv_list(("d_w",) + REF_METRICS), default=["d_w"])
    q = add("relative-citations", "branch mean c_w over the yearly mean")
    q.add_argument("--split", choices=("sign", "half"), default="sign")
    q.add_argument("--metric", choices=("d_w",) + REF_METRICS, default="d_w")
    q = add("strata", "d_w within c_w percentile strata")
    q.add_argument("--strata", default="top10:90:100,bottom10:0:10,all:0:100",
                   help="NAME:LO:HI percentile bands, comma separated")
    q = add("era-deltas", "late minus early d_w per c_w percentile bin")
    q.add_argument("--early", type=int, default=1960)
    q.add_argument("--late", type=int, default=2000)
    q.add_argument("--bins", type=_csv_list(), default=["10"],
                   help="bin count or explicit percentile edges")
    q.add_argument("--statistic", type=_csv_list(("mean", "frac_positive")),
                   default=["mean", "frac_positive"])
    q = add("pref-attach", "Pearson of citations in two disjoint windows")
    q.add_argument("--first", type=_window, default=TimeWindow(1, 5))
    q.add_argument("--second", type=_window, default=TimeWindow(6, 5))
    q = add("share", "citation share of the top papers per year")
    q.add_argument("--top", type=float, default=0.01)
    q.add_argument("--by", choices=("c_w", "d_w") + REF_METRICS, default="c_w")
    q = add("fields", "statistics by field-size bin")
    q.add_argument("--method", choices=stats.METHODS, default="pearson")
    q.add_argument("--top", type=float, default=0.01)
    q.add_argument("--per-decade", type=_positive_int, default=1)
    add("growth", "papers per year and exponential growth rate")
    q = add("surrogate", "year-reshuffled null for the yearly correlation")
    q.add_argument("--trials", type=_positive_int, default=100)
    q.add_argument("--method", choices=stats.METHODS, default="pearson")
    q = add("shift-test", "Pearson under circular shifts of one column")
    q.add_argument("--max-shift", type=int, default=20)
    q.add_argument("--x", choices=COLUMNS[2:], default="c_w")
    q.add_argument("--y", choices=COLUMNS[2:], default="d_w")
    q = add("bootstrap", "bootstrap means of a column, overall and for a subset")
    q.add_argument("--metric", choices=COLUMNS[2:], default="c_w")
    q.add_argument("--subset", default=None, help="positive|negative|top|bottom:METRIC")
    q.add_argument("--realizations", type=_positive_int, default=10_000)
    q = add("ks", "two-sample KS test between two CSV columns")
    q.add_argument("--a", required=True, metavar="CSV[:COLUMN]")
    q.add_argument("--b", required=True, metavar="CSV[:COLUMN]")

    p = sub.add_parser("synth", parents=[runtime], help="generate a synthetic corpus")
    p.add_argument("--out", required=True, help="corpus TSV path")
    p.add_argument("--truth", help="planted-truth JSON path (default: next to --out)")
    p.add_argument("--config", help="JSON file of generator settings")
    p.add_argument("--preset", choices=sorted(synth.PRESETS))
    p.add_argument("--years", type=_pair, default=None, metavar="A:B")
    p.add_argument("--seed", type=int, default=0)
    for name, conv in _SYNTH_FLAGS.items():
        flag = "--fields" if name == "n_fields" else "--" + name.replace("_", "-")
        p.add_argument(flag, dest=name, type=conv, default=None)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="citemetrics: %(levelname)s: %(message)s", stream=sys.stderr)
    set_threads(args.threads)
    try:
        result = args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (CorpusError, FileNotFoundError, IsADirectoryError, ValueError) as exc:
        print(f"citemetrics: error: {exc}", file=sys.stderr)
        return 1
    return result if isinstance(result, int) else 0


if __name__ == "__main__":
    sys.exit(main())
