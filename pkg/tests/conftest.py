import math
from fractions import Fraction

import numpy as np
import pytest

from citemetrics.graph import CitationGraph
from citemetrics.ingest import PaperRecord, build_graph

# Documented toy corpus: F has counts (2, 1, 1) in the default window,
# reference age 5, reference diversity 7/12 and C5 = 3.
TOY_LINES = [
    "r1\t1992\t\t",
    "r2\t1994\t\t",
    "q1\t1996\tr1;r2\t",
    "r3\t1999\t\t",
    "q2\t1999\tr2;r3\t",
    "q3\t1999\tr2;r3\t",
    "q4\t1999\tr2;r3\t",
    "F\t2000\tr1;r2;r3\t",
    "c1\t2001\tF\t",
    "c2\t2002\tF;r1\t",
    "c3\t2003\tF\t",
    "s1\t2004\tr2\t",
]

THREE_LINES = ["A\t2000\t\t", "B\t2001\tA\t", "C\t2002\tA;B\t"]


def records_from_lines(lines):
    out = []
    for line in lines:
        parts = line.split("\t")
        refs = [r for r in parts[2].split(";") if r] if len(parts) > 2 else []
        fields = [c for c in parts[3].split(";") if c] if len(parts) > 3 else []
        out.append(PaperRecord(parts[0], int(parts[1]), refs, fields))
    return out


def graph_from_lines(lines):
    return build_graph(records_from_lines(lines))[0]


@pytest.fixture
def toy_graph():
    return graph_from_lines(TOY_LINES)


@pytest.fixture
def toy_file(tmp_path):
    p = tmp_path / "toy.tsv"
    p.write_text("\n".join(TOY_LINES) + "\n", encoding="utf-8")
    return p


@pytest.fixture
def three_file(tmp_path):
    p = tmp_path / "three.tsv"
    p.write_text("\n".join(THREE_LINES) + "\n", encoding="utf-8")
    return p


def random_corpus(rng, n=None, backward=0.05, dangling=0.05, span=12):
    """Small random corpus as plain python structures: ids, years, refs (id lists)."""
    n = int(rng.integers(2, 201)) if n is None else n
    ids = [f"p{k:03d}" for k in rng.permutation(n)]
    years = [int(y) for y in 1990 + rng.integers(0, span, size=n)]
    refs = []
    for k in range(n):
        k_refs = int(rng.integers(0, 8))
        pool = [j for j in range(n) if j != k and (years[j] <= years[k] or rng.random() < backward)]
        chosen = rng.choice(pool, size=min(k_refs, len(pool)), replace=False) if pool else []
        r = [ids[j] for j in chosen]
        if rng.random() < dangling:
            r.append(f"X{k}")
        refs.append(r)
    return ids, years, refs


def graph_from_corpus(ids, years, refs):
    recs = [PaperRecord(i, y, list(r), []) for i, y, r in zip(ids, years, refs)]
    return build_graph(recs)[0]


# -- brute-force oracles over plain python structures ----------------------------

def oracle_disruption(ids, years, refs, focal, offset, length):
    """Enumerate every corpus paper and classify it against ``focal``; exact Fraction or None."""
    known = set(ids)
    year = dict(zip(ids, years))
    ref_sets = {i: {r for r in rs if r in known} for i, rs in zip(ids, refs)}
    focal_refs = ref_sets[focal]
    if not focal_refs:
        return None
    lo, hi = year[focal] + offset, year[focal] + offset + length - 1
    n_only = n_both = n_sub = 0
    for p in ids:
        if p == focal or not lo <= year[p] <= hi:
            continue
        cites_focal = focal in ref_sets[p]
        cites_refs = bool(ref_sets[p] & focal_refs)
        if cites_focal and cites_refs:
            n_both += 1
        elif cites_focal:
            n_only += 1
        elif cites_refs:
            n_sub += 1
    if n_only + n_both == 0:
        return None
    return Fraction(n_only - n_both, n_only + n_both + n_sub)


def oracle_citations(ids, years, refs, focal, offset, length):
    year = dict(zip(ids, years))
    lo, hi = year[focal] + offset, year[focal] + offset + length - 1
    return sum(1 for p, rs in zip(ids, refs) if focal in rs and p != focal and lo <= year[p] <= hi)


def oracle_diversity(ids, years, refs, focal):
    known = set(ids)
    year = dict(zip(ids, years))
    ref_sets = {i: {r for r in rs if r in known} for i, rs in zip(ids, refs)}
    rs = sorted(ref_sets[focal])
    if len(rs) < 2:
        return None
    total = Fraction(0)
    pairs = 0
    for a in range(len(rs)):
        for b in range(a + 1, len(rs)):
            n_ab = sum(1 for q in ids if year[q] < year[focal]
                       and rs[a] in ref_sets[q] and rs[b] in ref_sets[q])
            total += Fraction(1, 1 + n_ab)
            pairs += 1
    return total / pairs


def frac_to_float(x):
    return math.nan if x is None else float(x)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


__all__ = ["CitationGraph"]


# -- acceptance reporting ------------------------------------------------------

ACCEPTANCE_LINES = []


def report_criterion(name, passed, detail="", status=None):
    status = status or ("PASS" if passed else "FAIL")
    line = f"{status}  {name}" + (f"  ({detail})" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
