"""Exact arrow decisions on K_{rn} and K_{rn+1} for small r and n.

    python scripts/chvatal_table.py [--max-n 4] [--budget 5000000]
"""

import argparse

from ramsey_arrow.arrow import arrow_exact
from ramsey_arrow.graph import complete_graph
from ramsey_arrow.theory import chvatal_ramsey


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=4)
    ap.add_argument("--budget", type=int, default=5_000_000)
    args = ap.parse_args()

    print(f"{'r':>2} {'n':>2} {'R':>3}  {'K_(R-1)':<12} {'K_R':<12} seconds")
    for r in (2, 3):
        for n in range(1, args.max_n + 1):
            R = chvatal_ramsey(r, n)
            below = arrow_exact(complete_graph(R - 1), r, n, budget=args.budget)
            at = arrow_exact(complete_graph(R), r, n, budget=args.budget)
            print(f"{r:>2} {n:>2} {R:>3}  {below.kind.value:<12} {at.kind.value:<12} {below.elapsed + at.elapsed:.2f}")


if __name__ == "__main__":
    main()
