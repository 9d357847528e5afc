"""Command line entry point: ``ramsey-arrow <command> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .adversary import STRATEGIES, WrongVertexCount
from .arrow import DEFAULT_ARROW_BUDGET, ArrowKind, arrow_exact
from .detectors import format_certificate
from .graph import GraphFormatError, Seed, read_colouring, read_graph, sample_gnp, write_colouring, write_graph
from .harness import aggregate, emit_svg, load_config, read_csv, run_sweep
from .separation import WrongVertexCount as SeparationVertexCount
from .separation import decompose_blue_partite
from .theory import theory_table


def _cmd_theory(args) -> int:
    rows = theory_table(args.r, args.n, args.p, args.t)
    width = max(len(k) for k, _ in rows)
    for k, v in rows:
        print(f"{k:<{width}}  {v}")
    return 0


def _cmd_sample(args) -> int:
    g = sample_gnp(args.N, args.p, Seed(args.seed, args.stream))
    write_graph(g, args.out)
    print(f"wrote G({args.N}, {args.p}) with {g.num_edges} edges to {args.out}")
    return 0


def _cmd_arrow_exact(args) -> int:
    graph = read_graph(args.graph)
    verdict = arrow_exact(graph, args.r, args.n, budget=args.budget)
    print(f"{verdict.kind.value} nodes={verdict.nodes} elapsed={verdict.elapsed:.3f}s")
    if verdict.kind is ArrowKind.HOLDS:
        return 0
    if verdict.kind is ArrowKind.FAILS:
        cert = Path(args.certificate or f"{args.graph}.avoiding")
        write_colouring(verdict.colouring, cert)
        print(f"avoiding colouring written to {cert}")
        return 1
    print(verdict.reason)
    return 2


def _cmd_adversary(args) -> int:
    graph = read_graph(args.graph)
    try:
        res = STRATEGIES[args.strategy](graph, args.r, args.n, args.t, args.verify, args.budget)
    except WrongVertexCount as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    lines = [json.dumps(check) for check in res.checks()]
    lines.append(
        json.dumps(
            {
                "name": "strategy",
                "pass": res.success,
                "strategy": res.strategy,
                "reason": res.reason,
                "heuristic": res.heuristic,
                "witness": None,
            }
        )
    )
    report = "\n".join(lines) + "\n"
    if args.report:
        Path(args.report).write_text(report)
    else:
        sys.stdout.write(report)
    if not res.success:
        print(f"strategy failed: {res.reason}", file=sys.stderr)
        return 1
    out = Path(args.colouring_out or f"{args.graph}.{args.strategy}.col")
    write_colouring(res.colouring, out)
    print(f"avoiding colouring written to {out}", file=sys.stderr)
    return 0


def _cmd_decompose(args) -> int:
    graph = read_graph(args.graph)
    colouring = read_colouring(args.colouring, graph)
    try:
        out = decompose_blue_partite(colouring, args.r, args.n, args.t)
    except SeparationVertexCount as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(format_certificate(out.witness))
    return 0


def _cmd_sweep(args) -> int:
    config = load_config(args.config)
    res = run_sweep(config, args.out, workers=args.workers)
    print(f"{len(res.records)} records ({res.cache_hits} cached tasks, {res.computed} computed) in {args.out}")
    for pt in res.curve.points:
        print(f"{res.curve.axis}={pt.value:.6g}  arrow={pt.fraction:.3f}  [{pt.ci_low:.3f}, {pt.ci_high:.3f}]  n={pt.trials}")
    return 0


def _cmd_plot(args) -> int:
    curve = aggregate(read_csv(args.inp), args.x)
    emit_svg(curve, args.out)
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ramsey-arrow", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("theory", help="print closed-form quantities")
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--t", type=int)
    sp.set_defaults(func=_cmd_theory)

    sp = sub.add_parser("sample", help="write a G(N, p) sample as an edge list")
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--stream", type=int, default=0)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=_cmd_sample)

    sp = sub.add_parser("arrow-exact", help="decide G -> (K_{r+1}, P_n) exactly")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--budget", type=int, default=DEFAULT_ARROW_BUDGET)
    sp.add_argument("--certificate", help="where to write an avoiding colouring")
    sp.set_defaults(func=_cmd_arrow_exact)

    sp = sub.add_parser("adversary", help="run one avoiding-colouring construction")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--strategy", choices=sorted(STRATEGIES), required=True)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--t", type=int, default=0)
    sp.add_argument("--verify", choices=["exact", "heuristic"], default="exact")
    sp.add_argument("--budget", type=int, default=2_000_000)
    sp.add_argument("--colouring-out")
    sp.add_argument("--report", help="JSON-lines report path (default: stdout)")
    sp.set_defaults(func=_cmd_adversary)

    sp = sub.add_parser("decompose", help="red path or weakly contained blue K_{r+1}(t)")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--colouring", required=True)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--t", type=int, required=True)
    sp.set_defaults(func=_cmd_decompose)

    sp = sub.add_parser("sweep", help="run a Monte Carlo sweep from a config file")
    sp.add_argument("--config", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=_cmd_sweep)

    sp = sub.add_parser("plot", help="chart a records CSV as SVG")
    sp.add_argument("--in", dest="inp", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--x", choices=["p", "t", "x"], default="p")
    sp.set_defaults(func=_cmd_plot)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (GraphFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
