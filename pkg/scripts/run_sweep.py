"""Run one of the sweep configs and print the curve.

    python scripts/run_sweep.py scripts/configs/p_sweep.cfg --out runs/p_sweep --workers 4

Equivalent to ``ramsey-arrow sweep``; re-running the same command reuses the
cache in the output directory, and an interrupted run resumes where it stopped.
"""

import argparse
from pathlib import Path

from ramsey_arrow.harness import load_config, run_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("config")
    ap.add_argument("--out")
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    config = load_config(args.config)
    out = Path(args.out or Path("runs") / Path(args.config).stem)
    res = run_sweep(config, out, workers=args.workers)
    print(f"{len(res.records)} records, {res.computed} tasks computed, {res.cache_hits} from cache -> {out}")
    print(f"{res.curve.axis:>10}  fraction  95% interval      trials")
    for pt in res.curve.points:
        print(f"{pt.value:>10.4g}  {pt.fraction:8.3f}  [{pt.ci_low:.3f}, {pt.ci_high:.3f}]  {pt.trials:>6}")


if __name__ == "__main__":
    main()
