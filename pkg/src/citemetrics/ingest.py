"""Corpus file parsing, normalisation and validation.

Metadata lines are ``id<TAB>year<TAB>ref1;ref2<TAB>code1;code2``; the two
trailing fields may be empty or missing.  An optional edge file holds
``citing_id<TAB>cited_id`` lines that are merged into the reference lists.
"""
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import CorpusParseError, CorpusValidationError
from .graph import CitationGraph

YEAR_BOUNDS = (1500, 2100)


@dataclass
class PaperRecord:
    id: str
    year: int
    refs: list = field(default_factory=list)
    fields: list = field(default_factory=list)


@dataclass
class IngestReport:
    papers_loaded: int = 0
    edges_loaded: int = 0
    dangling_refs: int = 0
    self_loops_dropped: int = 0
    duplicate_edges_dropped: int = 0
    backward_citations: int = 0
    year_range: tuple = (None, None)

    def to_dict(self):
        d = asdict(self)
        d["year_range"] = list(self.year_range)
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _split_list(text):
    return [t for t in (s.strip() for s in text.split(";")) if t]


def parse_metadata_line(line, path="<string>", line_no=0):
    parts = line.rstrip("\r\n").split("\t")
    if len(parts) < 2 or len(parts) > 4:
        raise CorpusParseError(path, line_no, f"expected 2-4 tab-separated fields, got {len(parts)}")
    pid = parts[0].strip()
    if not pid:
        raise CorpusParseError(path, line_no, "empty paper id")
    if any(c in pid for c in ";"):
        raise CorpusParseError(path, line_no, f"paper id {pid!r} contains ';'")
    try:
        year = int(parts[1].strip())
    except ValueError:
        raise CorpusParseError(path, line_no, f"year {parts[1]!r} is not an integer") from None
    refs = _split_list(parts[2]) if len(parts) > 2 else []
    codes = _split_list(parts[3]) if len(parts) > 3 else []
    return PaperRecord(pid, year, refs, codes)


def read_metadata(path):
    """Yield ``(line_no, PaperRecord)`` pairs; blank lines are skipped."""
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            if not line.strip():
                continue
            yield line_no, parse_metadata_line(line, path, line_no)


def read_edges(path):
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            if not line.strip():
                continue
            parts = line.rstrip("\r\n").split("\t")
            if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
                raise CorpusParseError(path, line_no, "expected citing_id<TAB>cited_id")
            yield line_no, parts[0].strip(), parts[1].strip()


def build_graph(records, extra_edges=()):
    """Normalise records into a graph.

    ``extra_edges`` is an iterable of ``(citing_id, cited_id)`` pairs, or of
    ``(line_no, citing_id, cited_id)`` triples when coming from a file.
    Returns ``(graph, report)``.
    """
    report = IngestReport()
    pos = {}
    ids, years, raw_refs, codes = [], [], [], []
    for rec in records:
        if rec.id in pos:
            raise CorpusValidationError(f"duplicate paper id {rec.id!r}")
        pos[rec.id] = len(ids)
        ids.append(rec.id)
        years.append(int(rec.year))
        raw_refs.append(list(rec.refs))
        seen_codes = dict.fromkeys(rec.fields)
        codes.append(list(seen_codes))

    for edge in extra_edges:
        if len(edge) == 3:
            line_no, citing, cited = edge
        else:
            line_no, (citing, cited) = None, edge
        if citing not in pos:
            where = f" (edge file line {line_no})" if line_no is not None else ""
            raise CorpusValidationError(f"citing paper {citing!r} not in corpus{where}")
        raw_refs[pos[citing]].append(cited)

    refs, dangling = [], []
    for k, rlist in enumerate(raw_refs):
        seen = set()
        inside, outside = [], []
        for r in rlist:
            if r == ids[k]:
                report.self_loops_dropped += 1
                continue
            if r in seen:
                report.duplicate_edges_dropped += 1
                continue
            seen.add(r)
            j = pos.get(r)
            if j is None:
                outside.append(r)
            else:
                inside.append(j)
                if years[k] < years[j]:
                    report.backward_citations += 1
        refs.append(inside)
        dangling.append(outside)
        report.dangling_refs += len(outside)
        report.edges_loaded += len(inside) + len(outside)

    report.papers_loaded = len(ids)
    if years:
        report.year_range = (min(years), max(years))
    graph = CitationGraph.build(ids, years, refs, dangling, codes)
    return graph, report


def graph_from_records(records, extra_edges=()):
    return build_graph(records, extra_edges)[0]


def load_corpus(metadata_path, edges_path=None):
    """Parse corpus files into ``(CitationGraph, IngestReport)``."""
    metadata_path = Path(metadata_path)
    if not metadata_path.is_file():
        raise FileNotFoundError(f"metadata file not found: {metadata_path}")
    records = [rec for _, rec in read_metadata(metadata_path)]
    edges = ()
    if edges_path is not None:
        edges_path = Path(edges_path)
        if not edges_path.is_file():
            raise FileNotFoundError(f"edge file not found: {edges_path}")
        edges = list(read_edges(edges_path))
    return build_graph(records, edges)


def validate_corpus(graph, year_bounds=YEAR_BOUNDS):
    """Return human-readable warnings; never raises."""
    warnings = []
    lo, hi = year_bounds
    ids, years = graph.ids, graph.years
    for i in ((years < lo) | (years > hi)).nonzero()[0]:
        warnings.append(f"paper {ids[i]}: year {years[i]} outside [{lo}, {hi}]")
    src = np.repeat(np.arange(graph.n_papers), graph.out_degree())
    dst = graph.out_idx
    for e in (years[src] < years[dst]).nonzero()[0]:
        i, j = src[e], dst[e]
        warnings.append(f"paper {ids[i]} ({years[i]}) cites later paper {ids[j]} ({years[j]})")
    isolated = (graph.ref_counts() == 0) & (graph.in_degree() == 0)
    for i in isolated.nonzero()[0]:
        warnings.append(f"paper {ids[i]}: no references and no citations")
    return warnings


def format_record(graph, i):
    refs = [str(graph.ids[j]) for j in graph.refs(i)] + [str(x) for x in graph.dangling(i)]
    return "\t".join([str(graph.ids[i]), str(int(graph.years[i])), ";".join(refs),
                      ";".join(str(c) for c in graph.fields(i))])


def write_corpus(graph, path):
    """Serialise ``graph`` back to the metadata format (papers in index order)."""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for i in range(graph.n_papers):
            fh.write(format_record(graph, i))
            fh.write("\n")
    return path
