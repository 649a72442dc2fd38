"""Seedable synthetic citation corpora with a planted citation/originality coupling.

Papers arrive year by year (exponential growth).  Each reference of a new
paper goes, with probability ``alpha``, to an earlier paper chosen in
proportion to ``in_degree + 1`` and otherwise to an earlier paper chosen
uniformly.  Either way the candidate's weight is multiplied by
``exp(beta(year) * z)``, where ``z`` is the candidate's standardised
reference-diversity rank within its publication year, fixed at creation.

Optionally a citation to ``t`` also copies one of ``t``'s references, with
probability ``copy_prob * (1 - copy_novelty * z_t / sqrt(3))``.  Copying
is what lets citers of a paper cite its references too; tying it to the
same novelty proxy makes low-novelty papers consolidating.

``background`` adds a pool of out-of-corpus papers that compete for
references like corpus papers (with ``z = 0``); citations to them become
dangling references.
"""
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.stats import rankdata

from . import kernels
from .graph import CitationGraph


@dataclass(frozen=True)
class BetaSchedule:
    """``const:B``, ``ramp:START:END`` (linear over the year range) or explicit per-year values."""

    kind: str = "const"
    start: float = 0.0
    end: float = 0.0
    values: tuple = ()

    @classmethod
    def parse(cls, text):
        if isinstance(text, BetaSchedule):
            return text
        if isinstance(text, (int, float)):
            return cls("const", float(text), float(text))
        parts = str(text).split(":")
        try:
            if parts[0] == "const" and len(parts) == 2:
                return cls("const", float(parts[1]), float(parts[1]))
            if parts[0] == "ramp" and len(parts) == 3:
                return cls("ramp", float(parts[1]), float(parts[2]))
            if parts[0] == "values" and len(parts) == 2:
                return cls("values", values=tuple(float(v) for v in parts[1].split(",")))
            if len(parts) == 1:
                b = float(parts[0])
                return cls("const", b, b)
        except ValueError:
            pass
        raise ValueError(f"cannot parse beta schedule {text!r}")

    def at(self, year, first, last):
        if self.kind == "const":
            return self.start
        if self.kind == "ramp":
            if last == first:
                return self.start
            return self.start + (self.end - self.start) * (year - first) / (last - first)
        k = year - first
        if not 0 <= k < len(self.values):
            raise ValueError(f"beta schedule has no value for year {year}")
        return self.values[k]

    def __str__(self):
        if self.kind == "const":
            return f"const:{self.start:g}"
        if self.kind == "ramp":
            return f"ramp:{self.start:g}:{self.end:g}"
        return "values:" + ",".join(f"{v:g}" for v in self.values)


@dataclass(frozen=True)
class GenConfig:
    first_year: int = 1950
    last_year: int = 2009
    base_count: float = 100.0
    growth: float = 0.03
    refs_mean: float = 10.0
    refs_spread: float = 3.0
    alpha: float = 0.5
    beta: BetaSchedule = field(default_factory=BetaSchedule)
    n_fields: int = 50
    field_skew: float = 1.0
    extra_field_prob: float = 0.2
    field_beta_slope: float = 0.0
    copy_prob: float = 0.0
    copy_novelty: float = 0.0
    background: int = 0
    refs_growth: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "beta", BetaSchedule.parse(self.beta))
        if self.last_year < self.first_year:
            raise ValueError("empty year range")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if self.growth < 0:
            raise ValueError("growth rate must be >= 0")
        if self.base_count <= 0:
            raise ValueError("base_count must be positive")
        if self.refs_mean < 0 or self.refs_spread < 0:
            raise ValueError("reference count mean and spread must be >= 0")
        if not 0.0 <= self.copy_prob <= 1.0 or not 0.0 <= self.copy_novelty <= 1.0:
            raise ValueError("copy_prob and copy_novelty must lie in [0, 1]")
        if self.background < 0:
            raise ValueError("background pool size must be >= 0")
        if self.n_fields < 1:
            raise ValueError("need at least one field code")
        for y in self.years:
            b = self.beta_at(y)
            if not -1.0 <= b <= 1.0:
                raise ValueError(f"beta({y}) = {b} outside [-1, 1]")

    @property
    def years(self):
        return range(self.first_year, self.last_year + 1)

    def beta_at(self, year):
        return self.beta.at(year, self.first_year, self.last_year)

    def counts(self):
        return [int(round(self.base_count * math.exp(self.growth * (y - self.first_year))))
                for y in self.years]

    def to_dict(self):
        d = asdict(self)
        d["beta"] = str(self.beta)
        return d


def _standardised_rank(values):
    """Average-rank of defined values rescaled to zero mean and unit variance; NaN -> 0."""
    z = np.zeros(values.size)
    ok = ~np.isnan(values)
    m = int(np.count_nonzero(ok))
    if m < 2:
        return z
    r = rankdata(values[ok])
    sd = r.std()
    if sd > 0:
        z[ok] = (r - r.mean()) / sd
    return z


def _draw(cdf, u):
    return np.minimum(np.searchsorted(cdf, u * cdf[-1], side="right"), cdf.size - 1)


def _dedupe(owner, targets, span):
    _, first = np.unique(owner * span + targets, return_index=True)
    return owner[first], targets[first]


def _copy_references(rng, config, owner, targets, z, out_counts, prev_dst, bg):
    """Let each citation of corpus paper ``t`` also cite one of ``t``'s references."""
    inside = targets >= bg
    t = np.where(inside, targets - bg, 0)
    q = config.copy_prob * (1.0 - config.copy_novelty * z[t] / math.sqrt(3.0))
    n_out = np.where(inside, out_counts[t], 0)
    hit = (rng.random(targets.size) < np.clip(q, 0.0, 1.0)) & (n_out > 0)
    src = t[hit]
    out_ptr = np.zeros(out_counts.size + 1, dtype=np.int64)
    np.cumsum(out_counts, out=out_ptr[1:])
    pick = out_ptr[src] + np.floor(rng.random(src.size) * n_out[hit]).astype(np.int64)
    owner = np.concatenate([owner, owner[hit]])
    targets = np.concatenate([targets, prev_dst[pick]])
    return owner, targets


def _field_codes(rng, config, total):
    fw = 1.0 / np.arange(1, config.n_fields + 1) ** config.field_skew
    fw /= fw.sum()
    primary = rng.choice(config.n_fields, size=total, p=fw)
    extra = rng.choice(config.n_fields, size=total, p=fw)
    has_extra = (rng.random(total) < config.extra_field_prob) & (extra != primary)
    w = len(str(config.n_fields))
    lists = [
        (f"F{a:0{w}d}", f"F{b:0{w}d}") if e else (f"F{a:0{w}d}",)
        for a, b, e in zip(primary.tolist(), extra.tolist(), has_extra.tolist())
    ]
    log_share = np.log(fw)
    shift = (log_share - log_share.mean()) / (log_share.std() or 1.0)
    return lists, config.field_beta_slope * shift[primary]


def generate(config, backend=None):
    """Generate a corpus; identical ``config`` gives an identical graph.

    Candidate positions ``[0, background)`` are out-of-corpus literature
    (their citations become dangling references); corpus paper ``i`` sits
    at position ``background + i``.
    """
    rng = np.random.default_rng(config.seed)
    counts = config.counts()
    total = sum(counts)
    bg = config.background
    span = bg + total
    years = np.repeat(np.arange(config.first_year, config.last_year + 1), counts).astype(np.int64)
    year_ptr = np.zeros(len(counts) + 1, dtype=np.int64)
    np.cumsum(counts, out=year_ptr[1:])
    field_lists, field_shift = _field_codes(rng, config, total)

    coupled = config.field_beta_slope != 0 or any(config.beta_at(y) != 0 for y in config.years)
    indeg = np.zeros(span, dtype=np.int64)
    if bg:
        # pre-corpus citations, sized as if the literature had grown at the same rates
        rate = config.growth + config.refs_growth
        mean_k = config.refs_mean * (config.growth / rate if rate > 0 else 1.0)
        indeg[:bg] = rng.geometric(1.0 / (1.0 + mean_k), size=bg) - 1
    z = np.zeros(total)
    out_counts = np.zeros(total, dtype=np.int64)
    src_parts, dst_parts = [], []          # in-corpus edges, corpus indexing
    bg_src, bg_dst = [], []                # dangling edges

    for k, year in enumerate(config.years):
        start, stop = int(year_ptr[k]), int(year_ptr[k + 1])
        m = stop - start
        pool = bg + start
        if m == 0 or pool == 0:
            continue
        bias = np.ones(pool)
        if coupled:
            bias[bg:] = np.exp((config.beta_at(year) + field_shift[:start]) * z[:start])
        cdf_unif = np.cumsum(bias)
        cdf_pref = np.cumsum((indeg[:pool] + 1) * bias)

        refs_mean = config.refs_mean * math.exp(config.refs_growth * (year - config.first_year))
        nrefs = np.rint(rng.normal(refs_mean, config.refs_spread, size=m)).astype(np.int64)
        nrefs = np.clip(nrefs, 0, pool)
        owner = np.repeat(np.arange(start, stop), nrefs)
        targets = np.empty(owner.size, dtype=np.int64)
        todo = np.arange(owner.size)
        for _ in range(8):
            if todo.size == 0:
                break
            pref = rng.random(todo.size) < config.alpha
            u = rng.random(todo.size)
            targets[todo] = np.where(pref, _draw(cdf_pref, u), _draw(cdf_unif, u))
            key = owner * span + targets
            order = np.argsort(key, kind="stable")
            dup = np.zeros(owner.size, dtype=bool)
            dup[order[1:]] = key[order[1:]] == key[order[:-1]]
            todo = np.nonzero(dup)[0]
        keep = np.ones(owner.size, dtype=bool)
        keep[todo] = False
        owner, targets = owner[keep], targets[keep]
        if config.copy_prob > 0 and src_parts:
            owner, targets = _copy_references(rng, config, owner, targets, z, out_counts,
                                              np.concatenate(dst_parts) + bg, bg)
        owner, targets = _dedupe(owner, targets, span)
        indeg += np.bincount(targets, minlength=span)

        inside = targets >= bg
        bg_src.append(owner[~inside])
        bg_dst.append(targets[~inside])
        owner, targets = owner[inside], targets[inside] - bg
        src_parts.append(owner)
        dst_parts.append(targets)
        out_counts[start:stop] = np.bincount(owner - start, minlength=m)

        if coupled:
            src = np.concatenate(src_parts)
            dst = np.concatenate(dst_parts)
            out_ptr = np.zeros(stop + 1, dtype=np.int64)
            np.cumsum(out_counts[:stop], out=out_ptr[1:])
            in_order = np.argsort(dst, kind="stable")
            in_ptr = np.zeros(stop + 1, dtype=np.int64)
            np.cumsum(np.bincount(dst, minlength=stop), out=in_ptr[1:])
            rd = kernels.reference_diversity_arrays(
                np.arange(start, stop), out_ptr, dst, in_ptr, src[in_order], years[:stop],
                config.first_year, year_ptr[:k + 2], backend=backend)
            z[start:stop] = _standardised_rank(rd)

    src = np.concatenate(src_parts) if src_parts else np.empty(0, dtype=np.int64)
    dst = np.concatenate(dst_parts) if dst_parts else np.empty(0, dtype=np.int64)
    width = max(1, len(str(max(total - 1, 0))))
    ids = np.array([f"P{i:0{width}d}" for i in range(total)], dtype=str)
    dangling = None
    if bg:
        dangling = [[] for _ in range(total)]
        bw = len(str(bg - 1))
        for o, t in zip(np.concatenate(bg_src).tolist(), np.concatenate(bg_dst).tolist()):
            dangling[o].append(f"X{t:0{bw}d}")
    return CitationGraph.from_edges(ids, years, src, dst, dangling=dangling, fields=field_lists)


def planted_truth(config, threshold=0.5, window_last=5):
    """Qualitative signature the analysis pipeline should recover from ``generate(config)``.

    Eras are the publication years with ``beta >= threshold`` (positive)
    and ``beta <= -threshold`` (negative) whose citation window of
    ``window_last`` years still fits in the corpus.
    """
    covered = [y for y in config.years if y + window_last <= config.last_year]
    betas = {y: config.beta_at(y) for y in config.years}
    pos = [y for y in covered if betas[y] >= threshold]
    neg = [y for y in covered if betas[y] <= -threshold]
    sign = {y: (1 if b > 0 else -1 if b < 0 else 0) for y, b in betas.items()}
    return {
        "config": config.to_dict(),
        "beta": {str(y): b for y, b in betas.items()},
        "expected_correlation_sign": {str(y): s for y, s in sign.items()},
        "relative_citation_positive_disruption": {
            str(y): (">1" if s > 0 else "<1" if s < 0 else "~1") for y, s in sign.items()},
        "eras": {"positive": pos, "negative": neg},
        "sign_flip": bool(pos) and bool(neg),
        "all_positive": all(b > 0 for b in betas.values()),
        "all_negative": all(b < 0 for b in betas.values()),
        "near_zero_correlation": all(b == 0 for b in betas.values()) and config.field_beta_slope == 0,
        "preferential_attachment": config.alpha >= 0.5,
    }


PRESETS = {
    # sign-flipping coupling on top of a copying process
    "planted": dict(base_count=200, alpha=0.5, beta="ramp:0.8:-0.8", copy_prob=0.5,
                    copy_novelty=1.0),
    # strongly preferential growth inside a large pre-existing literature
    "attachment": dict(base_count=300, growth=0.05, refs_mean=20, refs_growth=0.02,
                       alpha=0.9, background=18_000),
    # no coupling; the copy rate balances the positive baseline correlation
    "null": dict(base_count=200, alpha=0.9, copy_prob=0.35),
}


def preset(name, **overrides):
    """``GenConfig`` for a named preset, with field overrides."""
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return GenConfig(**{**PRESETS[name], **overrides})


def write_truth(config, path, **kwargs):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(planted_truth(config, **kwargs), fh, indent=2, sort_keys=True)
        fh.write("\n")
