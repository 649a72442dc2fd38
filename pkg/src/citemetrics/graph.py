"""Immutable citation graph index and year-windowed neighbour queries.

Papers are dense-indexed in ``(year, id)`` order, so every calendar year
occupies one contiguous index range.  A year window therefore maps to a
half-open index interval, and "published before year Y" is an index prefix.
Both adjacency directions are CSR arrays with ascending neighbour lists.
"""
import hashlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import IndexFormatError

INDEX_MAGIC = "citemetrics-graph"
INDEX_VERSION = 1


@dataclass(frozen=True)
class TimeWindow:
    """Counted years are ``focal_year + offset`` .. ``focal_year + offset + length - 1``."""

    offset: int = 1
    length: int = 5

    def __post_init__(self):
        if int(self.offset) != self.offset or int(self.length) != self.length:
            raise ValueError("window offset and length must be integers")
        if self.offset < 0:
            raise ValueError(f"window offset must be >= 0, got {self.offset}")
        if self.length < 1:
            raise ValueError(f"window length must be >= 1, got {self.length}")

    @classmethod
    def parse(cls, text):
        parts = str(text).replace(":", ",").split(",")
        if len(parts) != 2:
            raise ValueError(f"window must look like OFFSET,LENGTH, got {text!r}")
        return cls(int(parts[0]), int(parts[1]))

    @property
    def last(self):
        return self.offset + self.length - 1

    def overlaps(self, other):
        return self.offset <= other.last and other.offset <= self.last

    def __str__(self):
        return f"{self.offset},{self.length}"


DEFAULT_WINDOW = TimeWindow(1, 5)


def _csr(rows, cols, n):
    order = np.lexsort((cols, rows))
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n), out=ptr[1:])
    return ptr, cols[order].astype(np.int64)


def _ragged(lists, dtype):
    ptr = np.zeros(len(lists) + 1, dtype=np.int64)
    np.cumsum([len(x) for x in lists], out=ptr[1:])
    flat = [v for x in lists for v in x]
    return ptr, np.array(flat, dtype=dtype)


@dataclass(frozen=True, eq=False)
class CitationGraph:
    ids: np.ndarray
    years: np.ndarray
    out_ptr: np.ndarray
    out_idx: np.ndarray
    in_ptr: np.ndarray
    in_idx: np.ndarray
    year_min: int
    year_ptr: np.ndarray
    dangling_ptr: np.ndarray
    dangling_ids: np.ndarray
    field_ptr: np.ndarray
    field_idx: np.ndarray
    field_codes: np.ndarray
    _lookup: dict = field(default=None, repr=False, compare=False)

    # -- construction -------------------------------------------------
    @classmethod
    def build(cls, ids, years, refs, dangling=None, fields=None):
        """Build from clean per-paper lists.

        ``refs[k]`` holds positions into ``ids`` (no duplicates, no self
        loops), ``dangling[k]`` holds out-of-corpus reference ids and
        ``fields[k]`` field codes.  Input order is irrelevant.
        """
        src = np.fromiter((k for k, r in enumerate(refs) for _ in r), dtype=np.int64)
        dst = np.fromiter((j for r in refs for j in r), dtype=np.int64)
        return cls.from_edges(ids, years, src, dst, dangling, fields)

    @classmethod
    def from_edges(cls, ids, years, src, dst, dangling=None, fields=None):
        """Build from flat edge arrays; ``src[e]`` cites ``dst[e]`` (positions into ``ids``)."""
        n = len(ids)
        ids = np.asarray(ids, dtype=str) if n else np.array([], dtype="<U1")
        years = np.asarray(years, dtype=np.int64).reshape(n)
        dangling = dangling if dangling is not None else [()] * n
        fields = fields if fields is not None else [()] * n

        order = np.lexsort((ids, years)) if n else np.array([], dtype=np.int64)
        rank = np.empty(n, dtype=np.int64)
        rank[order] = np.arange(n)

        src = rank[np.asarray(src, dtype=np.int64)]
        dst = rank[np.asarray(dst, dtype=np.int64)]
        out_ptr, out_idx = _csr(src, dst, n)
        in_ptr, in_idx = _csr(dst, src, n)

        years_sorted = years[order]
        if n:
            year_min = int(years_sorted[0])
            span = int(years_sorted[-1]) - year_min + 1
            year_ptr = np.zeros(span + 1, dtype=np.int64)
            np.cumsum(np.bincount(years_sorted - year_min, minlength=span), out=year_ptr[1:])
        else:
            year_min, year_ptr = 0, np.zeros(1, dtype=np.int64)

        dangling_ptr, dangling_ids = _ragged([dangling[k] for k in order], str)
        codes = sorted({c for f in fields for c in f})
        code_pos = {c: i for i, c in enumerate(codes)}
        field_ptr, field_idx = _ragged([[code_pos[c] for c in fields[k]] for k in order], np.int64)
        return cls(
            ids=ids[order], years=years_sorted, out_ptr=out_ptr, out_idx=out_idx,
            in_ptr=in_ptr, in_idx=in_idx, year_min=year_min, year_ptr=year_ptr,
            dangling_ptr=dangling_ptr,
            dangling_ids=dangling_ids if dangling_ids.size else np.array([], dtype="<U1"),
            field_ptr=field_ptr, field_idx=field_idx,
            field_codes=np.array(codes, dtype=str) if codes else np.array([], dtype="<U1"),
        )

    # -- basic accessors ----------------------------------------------
    @property
    def n_papers(self):
        return int(self.years.shape[0])

    @property
    def n_edges(self):
        """In-corpus citation edges."""
        return int(self.out_idx.shape[0])

    @property
    def year_max(self):
        return self.year_min + self.year_ptr.shape[0] - 2

    def index_of(self, paper_id):
        lookup = self._lookup
        if lookup is None:
            lookup = {str(p): i for i, p in enumerate(self.ids)}
            object.__setattr__(self, "_lookup", lookup)
        return lookup[paper_id]

    def check(self, i):
        if isinstance(i, (bool, np.bool_)) or not isinstance(i, (int, np.integer)):
            raise TypeError(f"paper index must be an integer, got {i!r}")
        if not 0 <= i < self.n_papers:
            raise IndexError(f"paper index {i} not in graph of {self.n_papers} papers")
        return int(i)

    def refs(self, i):
        i = self.check(i)
        return self.out_idx[self.out_ptr[i]:self.out_ptr[i + 1]]

    def citers(self, i):
        i = self.check(i)
        return self.in_idx[self.in_ptr[i]:self.in_ptr[i + 1]]

    def dangling(self, i):
        i = self.check(i)
        return self.dangling_ids[self.dangling_ptr[i]:self.dangling_ptr[i + 1]]

    def fields(self, i):
        i = self.check(i)
        return self.field_codes[self.field_idx[self.field_ptr[i]:self.field_ptr[i + 1]]]

    def out_degree(self):
        return np.diff(self.out_ptr)

    def in_degree(self):
        return np.diff(self.in_ptr)

    def ref_counts(self):
        """References per paper, dangling ones included."""
        return np.diff(self.out_ptr) + np.diff(self.dangling_ptr)

    def first_index_of_year(self, year):
        """Index of the first paper published in ``year`` or later."""
        k = int(year) - self.year_min
        if k <= 0:
            return 0
        if k >= self.year_ptr.shape[0] - 1:
            return self.n_papers
        return int(self.year_ptr[k])

    def papers_in_year(self, year):
        return np.arange(self.first_index_of_year(year), self.first_index_of_year(int(year) + 1))

    def window_range(self, year, window):
        """Half-open index interval of papers inside ``window`` of a ``year`` paper."""
        lo = self.first_index_of_year(int(year) + window.offset)
        hi = self.first_index_of_year(int(year) + window.offset + window.length)
        return lo, hi

    # -- comparison & persistence ---------------------------------------
    def same_as(self, other):
        """Structural equality on ids, years, edges, dangling refs and field codes."""
        if self.n_papers != other.n_papers or not np.array_equal(self.ids, other.ids):
            return False
        if not np.array_equal(self.years, other.years):
            return False
        for name in ("out_ptr", "out_idx", "in_ptr", "in_idx", "dangling_ptr", "field_ptr"):
            if not np.array_equal(getattr(self, name), getattr(other, name)):
                return False
        for i in range(self.n_papers):
            if sorted(self.dangling(i).tolist()) != sorted(other.dangling(i).tolist()):
                return False
            if self.fields(i).tolist() != other.fields(i).tolist():
                return False
        return True

    _ARRAYS = ("ids", "years", "out_ptr", "out_idx", "in_ptr", "in_idx", "year_ptr",
               "dangling_ptr", "dangling_ids", "field_ptr", "field_idx", "field_codes")

    def digest(self):
        """SHA-256 over the canonical content: ids, years, edges, dangling refs, fields."""
        h = hashlib.sha256()
        h.update(str(self.year_min).encode())
        for name in self._ARRAYS:
            arr = getattr(self, name)
            if arr.dtype.kind == "U":
                h.update("\x1f".join(arr.tolist()).encode("utf-8"))
            else:
                h.update(np.ascontiguousarray(arr, dtype=np.int64).tobytes())
            h.update(b"\x1e")
        return h.hexdigest()

    def save(self, path):
        path = Path(path)
        header = np.array([INDEX_MAGIC, str(INDEX_VERSION), str(self.year_min)])
        with open(path, "wb") as fh:
            np.savez(fh, header=header, **{k: getattr(self, k) for k in self._ARRAYS})
        return path

    @classmethod
    def load(cls, path):
        path = Path(path)
        try:
            with np.load(path, allow_pickle=False) as data:
                header = data["header"]
                if header.shape != (3,) or header[0] != INDEX_MAGIC:
                    raise IndexFormatError(f"{path}: not a citemetrics graph index")
                if int(header[1]) != INDEX_VERSION:
                    raise IndexFormatError(
                        f"{path}: index format version {header[1]} != {INDEX_VERSION}; re-run ingest")
                arrays = {k: data[k] for k in cls._ARRAYS}
        except (KeyError, ValueError, OSError) as exc:
            if isinstance(exc, FileNotFoundError):
                raise
            raise IndexFormatError(f"{path}: unreadable graph index ({exc})") from exc
        return cls(year_min=int(header[2]), **arrays)


# -- windowed queries ---------------------------------------------------

def _window_slice(sorted_idx, lo, hi):
    return sorted_idx[np.searchsorted(sorted_idx, lo):np.searchsorted(sorted_idx, hi)]


def citers_in_window(graph, focal, w=DEFAULT_WINDOW):
    """Papers citing ``focal`` whose year falls inside ``w`` relative to it."""
    focal = graph.check(focal)
    lo, hi = graph.window_range(graph.years[focal], w)
    return _window_slice(graph.citers(focal), lo, hi)


def subsequent_in_window(graph, focal, w=DEFAULT_WINDOW):
    """Window papers citing at least one reference of ``focal`` but not ``focal``.

    The focal paper itself is never its own subsequent paper (relevant
    when ``w.offset == 0``).
    """
    focal = graph.check(focal)
    lo, hi = graph.window_range(graph.years[focal], w)
    refs = graph.refs(focal)
    if refs.size == 0:
        return np.empty(0, dtype=np.int64)
    pool = np.unique(np.concatenate([_window_slice(graph.citers(r), lo, hi) for r in refs]))
    pool = np.setdiff1d(pool, graph.citers(focal), assume_unique=True)
    return pool[pool != focal]


def cocitation_count(graph, a, b, before_year):
    """Number of papers published before ``before_year`` that cite both ``a`` and ``b``."""
    a, b = graph.check(a), graph.check(b)
    if a == b:
        raise ValueError("co-citation needs two distinct papers")
    cutoff = graph.first_index_of_year(before_year)
    ca = graph.citers(a)
    cb = graph.citers(b)
    ca = ca[:np.searchsorted(ca, cutoff)]
    cb = cb[:np.searchsorted(cb, cutoff)]
    return int(np.intersect1d(ca, cb, assume_unique=True).size)
