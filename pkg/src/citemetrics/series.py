"""Cohort series container shared by the statistics and cohort modules."""
import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass
class CohortSeries:
    """One statistic per cohort key; ``value`` is NaN where undefined."""

    keys: np.ndarray
    values: np.ndarray
    n: np.ndarray
    label: str = ""

    def __len__(self):
        return int(self.keys.shape[0])

    def defined(self):
        return ~np.isnan(self.values)

    def as_dict(self):
        return {_key(k): float(v) for k, v in zip(self.keys, self.values)}

    def get(self, key):
        hit = np.nonzero(self.keys == key)[0]
        if hit.size == 0:
            raise KeyError(key)
        return float(self.values[hit[0]])

    def to_csv(self, path=None):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["key", "value", "n"])
        for k, v, m in zip(self.keys, self.values, self.n):
            w.writerow([_key(k), "" if math.isnan(v) else repr(float(v)), int(m)])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text, encoding="utf-8")
        return text

    @classmethod
    def from_csv(cls, path, label=""):
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))[1:]
        keys = np.array([int(r[0]) if r[0].lstrip("-").isdigit() else r[0] for r in rows])
        vals = np.array([math.nan if r[1] == "" else float(r[1]) for r in rows], dtype=float)
        n = np.array([int(r[2]) for r in rows], dtype=np.int64)
        return cls(keys, vals, n, label)


def _key(k):
    if isinstance(k, (np.integer, int)):
        return int(k)
    if isinstance(k, (np.floating, float)):
        return float(k)
    return str(k)


def group_rows(keys):
    """``(unique_keys, list_of_row_index_arrays)`` with keys ascending."""
    keys = np.asarray(keys)
    if keys.size == 0:
        return keys[:0], []
    order = np.argsort(keys, kind="stable")
    uniq, starts = np.unique(keys[order], return_index=True)
    bounds = np.append(starts, keys.size)
    return uniq, [order[bounds[k]:bounds[k + 1]] for k in range(uniq.size)]
