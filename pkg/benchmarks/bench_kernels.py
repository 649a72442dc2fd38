"""Time the metric kernels under the numba and numpy backends.

    python3 benchmarks/bench_kernels.py --papers 20000 --repeat 3

Prints one line per kernel with the best wall time per backend and checks
that both backends return identical arrays.
"""
import argparse
import math
import time

import numpy as np

from citemetrics import kernels
from citemetrics.graph import DEFAULT_WINDOW
from citemetrics.synth import GenConfig, generate


def corpus(papers, refs, seed):
    years = 40
    growth = 0.05
    base = papers * growth / (math.exp(growth * years) - 1)
    cfg = GenConfig(first_year=1970, last_year=1970 + years - 1, base_count=base, growth=growth,
                    refs_mean=refs, alpha=0.7, copy_prob=0.3, seed=seed)
    return generate(cfg)


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--papers", type=int, default=20_000)
    ap.add_argument("--refs", type=float, default=10)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    g = corpus(args.papers, args.refs, args.seed)
    print(f"corpus: {g.n_papers} papers, {g.n_edges} edges")
    benches = {
        "windowed_counts": lambda b: kernels.windowed_counts(g, DEFAULT_WINDOW, backend=b),
        "disruption_counts": lambda b: np.stack(kernels.disruption_counts(g, DEFAULT_WINDOW, backend=b)),
        "reference_diversity": lambda b: kernels.reference_diversity(g, backend=b),
    }
    for fn in benches.values():
        fn("numba")     # compile outside the timed runs
    print(f"{'kernel':<22}{'numba s':>10}{'numpy s':>10}{'speedup':>10}  same")
    for name, fn in benches.items():
        t_nb, a = best_of(lambda: fn("numba"), args.repeat)
        t_np, b = best_of(lambda: fn("numpy"), args.repeat)
        same = np.array_equal(a, b, equal_nan=a.dtype.kind == "f")
        print(f"{name:<22}{t_nb:>10.3f}{t_np:>10.3f}{t_np / t_nb:>10.1f}  {same}")


if __name__ == "__main__":
    main()
