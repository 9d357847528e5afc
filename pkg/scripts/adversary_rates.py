"""Success rates of the three explicit constructions next to their expectation bounds.

For each construction the script samples graphs, records the quantity the
construction has to keep small (clique copies, boundary size, pinned copies)
and how often the resulting colouring was certified as avoiding.

    python scripts/adversary_rates.py [--trials 500]
"""

import argparse
import statistics

from ramsey_arrow.adversary import strategy_boundary, strategy_hitting_set, strategy_pinned_cliques
from ramsey_arrow.graph import Seed, sample_gnp
from ramsey_arrow.theory import expected_boundary, expected_clique_count, expected_pinned_cliques


def _row(name, values, expected, successes, trials):
    mean = statistics.fmean(values)
    se = statistics.stdev(values) / len(values) ** 0.5 if len(values) > 1 else 0.0
    print(f"{name:<9} mean {mean:8.3f} (se {se:.3f})  expected {expected:8.3f}  certified {successes}/{trials}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    r, n, N, p = 2, 20, 60, 0.05
    copies, ok = [], 0
    for s in range(args.trials):
        res = strategy_hitting_set(sample_gnp(N, p, Seed(args.seed, s)), r, n)
        copies.append(res.metadata["copies"])
        ok += res.success
    _row("hitting", copies, expected_clique_count(N, p, r), ok, args.trials)

    r, n, t, p = 2, 30, 3, 0.01
    sizes, ok = [], 0
    for s in range(args.trials):
        res = strategy_boundary(sample_gnp(r * n + t, p, Seed(args.seed + 1, s)), r, n, t)
        sizes.append(res.metadata["boundary"])
        ok += res.success
    _row("boundary", sizes, expected_boundary(r, n, t, p), ok, args.trials)

    r, n, t, p = 2, 12, 2, 0.25
    pinned, ok = [], 0
    for s in range(args.trials):
        res = strategy_pinned_cliques(sample_gnp(r * n + t, p, Seed(args.seed + 2, s)), r, n, t)
        pinned.append(res.metadata["pinned"])
        ok += res.success
    _row("pinned", pinned, expected_pinned_cliques(r, n, t, p), ok, args.trials)


if __name__ == "__main__":
    main()
