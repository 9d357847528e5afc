"""Monte Carlo sweeps over (p, t) grids with cached, order-independent trials."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from statistics import NormalDist
from typing import Iterable, Sequence

from . import __version__
from .adversary import STRATEGIES, WrongVertexCount, verify_avoiding
from .arrow import ArrowKind, arrow_exact, arrow_portfolio
from .detectors import DEFAULT_PATH_BUDGET
from .graph import Graph, Seed, TwoColouring, sample_gnp, sample_gnp_coupled
from .theory import p_from_scaled, scaled_density

CSV_HEADER = ["point_index", "trial_index", "r", "n", "N", "p", "t", "seed", "strategy", "outcome", "witness", "elapsed_ms"]

ARROW_FAILS_CERTIFIED = "ArrowFailsCertified"
AVOIDING_FOUND = "AvoidingFoundByStrategy"
NO_AVOIDING_FOUND = "NoAvoidingFound"
ARROW_HOLDS_CERTIFIED = "ArrowHoldsCertified"
UNKNOWN = "Unknown"
OUTCOMES = (ARROW_FAILS_CERTIFIED, AVOIDING_FOUND, NO_AVOIDING_FOUND, ARROW_HOLDS_CERTIFIED, UNKNOWN)
# outcomes counted as "the arrow was observed" when aggregating
ARROW_OBSERVED = (ARROW_HOLDS_CERTIFIED, NO_AVOIDING_FOUND)

KNOWN_STRATEGIES = ("hitting", "boundary", "pinned", "portfolio", "exact")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    r: int
    n: int
    p_grid: tuple[float, ...] = ()
    x_grid: tuple[float, ...] = ()
    t_grid: tuple[int, ...] = (0,)
    trials_per_point: int = 10
    master_seed: int = 0
    strategies: tuple[str, ...] = ("boundary", "pinned", "hitting")
    verify: str = "exact"
    vertex_rule: str = "rn+t"
    eps: float = 0.0
    coupled: bool = False
    budget: int = DEFAULT_PATH_BUDGET
    alpha: float = 2**-4
    gamma: float = 2**-10
    c_const: float | None = None
    omega_multiplier: float = 1.0
    timing: bool = False

    def __post_init__(self):
        if self.r < 1 or self.n < 1:
            raise ConfigError("r and n must be positive")
        if bool(self.p_grid) == bool(self.x_grid):
            raise ConfigError("give exactly one of p_grid and x_grid")
        if not self.t_grid:
            raise ConfigError("t_grid must be nonempty")
        if self.trials_per_point < 1:
            raise ConfigError("trials_per_point must be at least 1")
        for p in self.probabilities:
            if not 0.0 <= p <= 1.0:
                raise ConfigError(f"probability {p} outside [0, 1]")
        for s in self.strategies:
            if s not in KNOWN_STRATEGIES:
                raise ConfigError(f"unknown strategy {s!r}")
        if self.verify not in ("exact", "heuristic"):
            raise ConfigError("verify must be exact or heuristic")
        if self.vertex_rule not in ("rn+t", "eps"):
            raise ConfigError("vertex_rule must be rn+t or eps")

    @property
    def axis(self) -> str:
        if self.x_grid:
            return "x"
        return "t" if len(self.p_grid) == 1 and len(self.t_grid) > 1 else "p"

    @property
    def probabilities(self) -> tuple[float, ...]:
        if self.p_grid:
            return tuple(self.p_grid)
        return tuple(min(1.0, p_from_scaled(self.r, self.n, x)) for x in self.x_grid)

    def vertex_count(self, t: int) -> int:
        if self.vertex_rule == "eps":
            return math.ceil((1 + self.eps) * self.r * self.n)
        return self.r * self.n + t

    def points(self) -> list["Point"]:
        pts = []
        for ip, p in enumerate(self.probabilities):
            for it, t in enumerate(self.t_grid):
                N = self.vertex_count(t)
                if self.vertex_rule == "eps":
                    t = N - self.r * self.n
                pts.append(Point(len(pts), ip, it, p, t, N))
        return pts


@dataclass(frozen=True)
class Point:
    index: int
    p_index: int
    t_index: int
    p: float
    t: int
    N: int


# --- config files ----------------------------------------------------------


def _grid(text: str, geometric: bool, integer: bool = False) -> tuple:
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"grid {text!r} must be start:stop:steps")
        start, stop, steps = float(parts[0]), float(parts[1]), int(parts[2])
        if steps < 1:
            raise ConfigError("grid needs at least one step")
        if steps == 1:
            vals = [start]
        elif geometric:
            if start <= 0 or stop <= 0:
                raise ConfigError("geometric grid needs positive endpoints")
            ratio = (stop / start) ** (1 / (steps - 1))
            vals = [start * ratio**i for i in range(steps)]
            vals[-1] = stop
        else:
            vals = [start + (stop - start) * i / (steps - 1) for i in range(steps)]
    else:
        vals = [float(v) for v in text.split(",") if v.strip()]
    if integer:
        return tuple(int(round(v)) for v in vals)
    return tuple(vals)


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


_PARSERS = {
    "r": int,
    "n": int,
    "p_grid": lambda s: _grid(s, geometric=True),
    "x_grid": lambda s: _grid(s, geometric=True),
    "t_grid": lambda s: _grid(s, geometric=False, integer=True),
    "trials_per_point": int,
    "master_seed": int,
    "strategies": lambda s: tuple(x.strip() for x in s.split(",") if x.strip()),
    "verify": str.strip,
    "vertex_rule": str.strip,
    "eps": float,
    "coupled": _bool,
    "budget": int,
    "alpha": float,
    "gamma": float,
    "c_const": float,
    "omega_multiplier": float,
    "timing": _bool,
}


def parse_config(text: str, env: dict | None = None) -> ExperimentConfig:
    """Flat ``key = value`` lines; ``#`` starts a comment. ``RAMSEY_SEED`` overrides master_seed."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in _PARSERS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            values[key] = _PARSERS[key](val)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: {exc}") from exc
    env = os.environ if env is None else env
    if env.get("RAMSEY_SEED"):
        values["master_seed"] = int(env["RAMSEY_SEED"])
    for required in ("r", "n"):
        if required not in values:
            raise ConfigError(f"missing required key {required!r}")
    return ExperimentConfig(**values)


def load_config(path, env: dict | None = None) -> ExperimentConfig:
    return parse_config(Path(path).read_text(), env)


# --- trials ----------------------------------------------------------------


@dataclass(frozen=True)
class TrialRecord:
    point_index: int
    trial_index: int
    r: int
    n: int
    N: int
    p: float
    t: int
    seed: int
    strategy: str
    outcome: str
    witness: str
    elapsed_ms: float

    def sort_key(self) -> tuple[int, int]:
        return (self.point_index, self.trial_index)


def trial_seed(config: ExperimentConfig, point: Point, trial_index: int) -> Seed:
    if config.coupled:
        # shared across the p-grid so the graphs are nested
        return Seed(config.master_seed, (1 << 62) | (point.t_index << 32) | trial_index)
    return Seed(config.master_seed, (point.index << 32) | trial_index)


def _summary(col: TwoColouring) -> str:
    return f"red={len(col.red_edges())}/{col.base.num_edges}"


def _evaluate(
    config: ExperimentConfig, point: Point, graph: Graph, seed: Seed, inherited: TwoColouring | None
) -> tuple[str, str, str, TwoColouring | None]:
    """Run the configured strategies in order; first decisive outcome wins.

    Returns (strategy, outcome, witness summary, avoiding colouring or None).
    """
    r, n, t = config.r, config.n, point.t
    if inherited is not None and verify_avoiding(inherited, r, n, "exact", config.budget)[0]:
        return "inherited", AVOIDING_FOUND, _summary(inherited), inherited
    exact_unknown = None
    for name in config.strategies:
        if name in STRATEGIES:
            try:
                res = STRATEGIES[name](graph, r, n, t, config.verify, config.budget)
            except WrongVertexCount:
                continue
            if res.success:
                return name, AVOIDING_FOUND, _summary(res.colouring), res.colouring
        elif name == "portfolio":
            seed_int = seed.key() & 0x7FFFFFFF
            res = arrow_portfolio(graph, r, n, t, seed=seed_int, budget=config.budget)
            if res.kind is ArrowKind.FAILS:
                return f"portfolio:{res.reason}", AVOIDING_FOUND, _summary(res.colouring), res.colouring
        elif name == "exact":
            res = arrow_exact(graph, r, n, budget=config.budget)
            if res.kind is ArrowKind.HOLDS:
                return "exact", ARROW_HOLDS_CERTIFIED, f"nodes={res.nodes}", None
            if res.kind is ArrowKind.FAILS:
                return "exact", ARROW_FAILS_CERTIFIED, _summary(res.colouring), res.colouring
            exact_unknown = res.reason
    if exact_unknown is not None:
        return "exact", UNKNOWN, exact_unknown.replace(",", ";"), None
    return "-", NO_AVOIDING_FOUND, "", None


def _record(config, point, trial_index, seed, strategy, outcome, witness, elapsed) -> TrialRecord:
    return TrialRecord(
        point.index, trial_index, config.r, config.n, point.N, point.p, point.t, seed.key(),
        strategy, outcome, witness, round(elapsed * 1000, 3) if config.timing else 0.0,
    )


def _single(config: ExperimentConfig, point: Point, trial_index: int) -> tuple[TrialRecord, float]:
    seed = trial_seed(config, point, trial_index)
    t0 = time.perf_counter()
    try:
        graph = sample_gnp(point.N, point.p, seed)
        strategy, outcome, witness, _ = _evaluate(config, point, graph, seed, None)
    except Exception as exc:  # a trial never takes the sweep down
        strategy, outcome, witness = "-", UNKNOWN, f"{type(exc).__name__}: {exc}".replace(",", ";")
    elapsed = time.perf_counter() - t0
    return _record(config, point, trial_index, seed, strategy, outcome, witness, elapsed), elapsed


def _coupled_group(config: ExperimentConfig, t_index: int, trial_index: int) -> list[tuple[TrialRecord, float]]:
    """All p-points of one (t, trial) pair, densest first, passing avoiding colourings down."""
    pts = sorted((pt for pt in config.points() if pt.t_index == t_index), key=lambda pt: (-pt.p, pt.index))
    seed = trial_seed(config, pts[0], trial_index)
    graphs = sample_gnp_coupled(pts[0].N, [pt.p for pt in pts], seed)
    out = []
    carried: TwoColouring | None = None
    for pt, graph in zip(pts, graphs):
        t0 = time.perf_counter()
        inherited = carried.restrict_to(graph) if carried is not None else None
        try:
            strategy, outcome, witness, col = _evaluate(config, pt, graph, seed, inherited)
        except Exception as exc:
            strategy, outcome, witness, col = "-", UNKNOWN, f"{type(exc).__name__}: {exc}".replace(",", ";"), None
        if col is not None:
            carried = col
        elapsed = time.perf_counter() - t0
        out.append((_record(config, pt, trial_index, seed, strategy, outcome, witness, elapsed), elapsed))
    return out


def run_trial(config: ExperimentConfig, point_index: int, trial_index: int) -> TrialRecord:
    """One trial at one grid point; deterministic given the config."""
    point = config.points()[point_index]
    if config.coupled:
        for rec, _ in _coupled_group(config, point.t_index, trial_index):
            if rec.point_index == point_index:
                return rec
    return _single(config, point, trial_index)[0]


# --- aggregation -----------------------------------------------------------


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        return (0.0, 1.0)
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    f = successes / trials
    denom = 1 + z * z / trials
    centre = (f + z * z / (2 * trials)) / denom
    half = z / denom * math.sqrt(f * (1 - f) / trials + z * z / (4 * trials * trials))
    lo, hi = max(0.0, centre - half), min(1.0, centre + half)
    # guard against rounding pushing f just outside
    return (min(lo, f), max(hi, f))


@dataclass(frozen=True)
class CurvePoint:
    value: float
    fraction: float
    ci_low: float
    ci_high: float
    trials: int


@dataclass(frozen=True)
class SweepCurve:
    axis: str
    points: tuple[CurvePoint, ...]


def axis_value(record: TrialRecord, axis: str) -> float:
    if axis == "p":
        return record.p
    if axis == "t":
        return float(record.t)
    if axis == "x":
        return scaled_density(record.r, record.n, record.p)
    raise ValueError(f"unknown axis {axis!r}")


def aggregate(records: Iterable[TrialRecord], axis: str, success=ARROW_OBSERVED) -> SweepCurve:
    """Fraction of trials per axis value whose outcome is in ``success``."""
    buckets: dict[float, list[int]] = {}
    for rec in records:
        b = buckets.setdefault(axis_value(rec, axis), [0, 0])
        b[0] += rec.outcome in success
        b[1] += 1
    pts = []
    for value in sorted(buckets):
        k, m = buckets[value]
        lo, hi = wilson_interval(k, m)
        pts.append(CurvePoint(value, k / m, lo, hi, m))
    return SweepCurve(axis, tuple(pts))


# --- CSV / SVG -------------------------------------------------------------


def records_to_csv(records: Sequence[TrialRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for rec in records:
        w.writerow([rec.point_index, rec.trial_index, rec.r, rec.n, rec.N, repr(rec.p), rec.t, rec.seed,
                    rec.strategy, rec.outcome, rec.witness, repr(rec.elapsed_ms)])
    return buf.getvalue()


def emit_csv(records: Sequence[TrialRecord], path) -> None:
    try:
        Path(path).write_text(records_to_csv(records))
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc


def parse_records(text: str) -> list[TrialRecord]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != CSV_HEADER:
        raise ValueError("CSV header does not match the record schema")
    types = {f.name: f.type for f in fields(TrialRecord)}
    out = []
    for row in rows[1:]:
        kw = {}
        for name, val in zip(CSV_HEADER, row):
            typ = types[name]
            kw[name] = int(val) if typ == "int" else float(val) if typ == "float" else val
        out.append(TrialRecord(**kw))
    return out


def read_csv(path) -> list[TrialRecord]:
    try:
        return parse_records(Path(path).read_text())
    except OSError as exc:
        raise OSError(f"cannot read CSV {path}: {exc}") from exc


def curve_to_csv(curve: SweepCurve) -> str:
    lines = [f"{curve.axis},fraction,ci_low,ci_high,trials"]
    lines += [f"{pt.value!r},{pt.fraction!r},{pt.ci_low!r},{pt.ci_high!r},{pt.trials}" for pt in curve.points]
    return "\n".join(lines) + "\n"


def curve_to_svg(curve: SweepCurve, width: int = 640, height: int = 400, log_x: bool | None = None) -> str:
    """A single polyline of the arrow fraction with Wilson whiskers."""
    left, right, top, bottom = 60, 20, 20, 50
    pw, ph = width - left - right, height - top - bottom
    values = [pt.value for pt in curve.points]
    if log_x is None:
        log_x = curve.axis in ("p", "x") and bool(values) and min(values) > 0
    tx = [math.log10(v) for v in values] if log_x else list(values)
    lo, hi = (min(tx), max(tx)) if tx else (0.0, 1.0)
    if hi == lo:
        lo, hi = lo - 0.5, hi + 0.5

    def sx(v: float) -> float:
        return left + (v - lo) / (hi - lo) * pw

    def sy(f: float) -> float:
        return top + (1 - f) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>',
    ]
    for f in (0.0, 0.5, 1.0):
        out.append(f'<text x="{left - 8}" y="{sy(f) + 4:.1f}" font-size="11" text-anchor="end">{f:g}</text>')
    for v, x in zip(values, tx):
        label = f"{v:.3g}"
        out.append(f'<text x="{sx(x):.1f}" y="{top + ph + 16}" font-size="10" text-anchor="middle">{label}</text>')
    xlabel = {"p": "p", "t": "t", "x": "x = p n^(2/(r+1))"}.get(curve.axis, curve.axis)
    if log_x:
        xlabel += " (log scale)"
    out.append(f'<text x="{left + pw / 2}" y="{height - 10}" font-size="12" text-anchor="middle">{xlabel}</text>')
    out.append(
        f'<text x="15" y="{top + ph / 2}" font-size="12" text-anchor="middle" '
        f'transform="rotate(-90 15 {top + ph / 2})">fraction arrow observed</text>'
    )
    for pt, x in zip(curve.points, tx):
        X = sx(x)
        out.append(f'<line x1="{X:.1f}" y1="{sy(pt.ci_low):.1f}" x2="{X:.1f}" y2="{sy(pt.ci_high):.1f}" stroke="gray"/>')
        for f in (pt.ci_low, pt.ci_high):
            out.append(f'<line x1="{X - 4:.1f}" y1="{sy(f):.1f}" x2="{X + 4:.1f}" y2="{sy(f):.1f}" stroke="gray"/>')
    coords = " ".join(f"{sx(x):.1f},{sy(pt.fraction):.1f}" for pt, x in zip(curve.points, tx))
    out.append(f'<polyline points="{coords}" fill="none" stroke="steelblue" stroke-width="2"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg(curve: SweepCurve, path) -> None:
    try:
        Path(path).write_text(curve_to_svg(curve))
    except OSError as exc:
        raise OSError(f"cannot write SVG to {path}: {exc}") from exc


# --- sweeps ----------------------------------------------------------------


def _task_key(config: ExperimentConfig, task: tuple) -> str:
    """Hash of what a task computes: its grid points, trial index and the trial settings."""
    cfg = asdict(config)
    for grid_key in ("p_grid", "x_grid", "t_grid", "trials_per_point"):
        cfg.pop(grid_key)
    kind, a, k = task
    if kind == "coupled":
        pts = [asdict(pt) for pt in config.points() if pt.t_index == a]
    else:
        pts = [asdict(config.points()[a])]
    blob = json.dumps({"config": cfg, "points": pts, "kind": kind, "trial": k, "version": __version__}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()


def _tasks(config: ExperimentConfig) -> list[tuple]:
    if config.coupled:
        return [("coupled", ti, k) for ti in range(len(config.t_grid)) for k in range(config.trials_per_point)]
    return [("single", pt.index, k) for pt in config.points() for k in range(config.trials_per_point)]


def _run_task(config: ExperimentConfig, task: tuple) -> list[tuple[TrialRecord, float]]:
    kind, a, k = task
    if kind == "coupled":
        return _coupled_group(config, a, k)
    return [_single(config, config.points()[a], k)]


class ResultCache:
    """Append-only JSON-lines cache of finished tasks, keyed by content hash."""

    def __init__(self, path):
        self.path = Path(path)
        self.entries: dict[str, list[dict]] = {}
        if self.path.exists():
            for line in self.path.read_text().splitlines():
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError:
                    continue  # torn final line after an interruption
                self.entries[obj["key"]] = obj["records"]

    def get(self, key: str) -> list[TrialRecord] | None:
        recs = self.entries.get(key)
        return None if recs is None else [TrialRecord(**r) for r in recs]

    def put(self, key: str, records: Sequence[TrialRecord]) -> None:
        recs = [asdict(r) for r in records]
        self.entries[key] = recs
        with self.path.open("a") as fh:
            fh.write(json.dumps({"key": key, "records": recs}) + "\n")
            fh.flush()


@dataclass
class SweepResult:
    records: list[TrialRecord]
    curve: SweepCurve
    cache_hits: int = 0
    computed: int = 0
    timings: list[tuple[int, int, float]] = field(default_factory=list)


def _write_manifest(out: Path, config: ExperimentConfig, total: int, done: int, status: str) -> None:
    manifest = {
        "config": asdict(config),
        "tasks_total": total,
        "tasks_done": done,
        "status": status,
        "version": __version__,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def run_sweep(
    config: ExperimentConfig,
    out_dir,
    workers: int = 1,
    svg: bool = True,
    cache_path=None,
    stop_after: int | None = None,
) -> SweepResult:
    """Run every (point, trial) task, reusing cached results, and write the outputs.

    Writes ``records.csv`` (sorted by point then trial), ``curve.csv``,
    ``curve.svg``, ``timings.csv`` and ``manifest.json`` into ``out_dir``.
    ``stop_after`` simulates an interruption after that many computed tasks.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cache = ResultCache(cache_path or out / "cache.jsonl")
    tasks = _tasks(config)
    keys = {task: _task_key(config, task) for task in tasks}
    records: list[TrialRecord] = []
    timings: list[tuple[int, int, float]] = []
    pending = []
    hits = 0
    for task in tasks:
        cached = cache.get(keys[task])
        if cached is None:
            pending.append(task)
        else:
            records.extend(cached)
            hits += 1
    done = hits
    _write_manifest(out, config, len(tasks), done, "running")

    def absorb(task, results):
        nonlocal done
        recs = [rec for rec, _ in results]
        cache.put(keys[task], recs)
        records.extend(recs)
        timings.extend((rec.point_index, rec.trial_index, el) for rec, el in results)
        done += 1

    computed = 0
    try:
        if workers <= 1:
            for task in pending:
                if stop_after is not None and computed >= stop_after:
                    raise KeyboardInterrupt
                absorb(task, _run_task(config, task))
                computed += 1
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                futs = {pool.submit(_run_task, config, task): task for task in pending}
                for fut in as_completed(futs):
                    if stop_after is not None and computed >= stop_after:
                        for f in futs:
                            f.cancel()
                        raise KeyboardInterrupt
                    absorb(futs[fut], fut.result())
                    computed += 1
    except KeyboardInterrupt:
        records.sort(key=TrialRecord.sort_key)
        emit_csv(records, out / "records.partial.csv")
        _write_manifest(out, config, len(tasks), done, "interrupted")
        raise
    records.sort(key=TrialRecord.sort_key)
    curve = aggregate(records, config.axis)
    emit_csv(records, out / "records.csv")
    (out / "curve.csv").write_text(curve_to_csv(curve))
    if svg:
        emit_svg(curve, out / "curve.svg")
    timings.sort()
    (out / "timings.csv").write_text(
        "point_index,trial_index,elapsed_ms\n" + "".join(f"{a},{b},{c * 1000:.3f}\n" for a, b, c in timings)
    )
    partial = out / "records.partial.csv"
    if partial.exists():
        partial.unlink()
    _write_manifest(out, config, len(tasks), done, "complete")
    return SweepResult(records, curve, hits, computed, timings)


def with_overrides(config: ExperimentConfig, **changes) -> ExperimentConfig:
    return replace(config, **changes)
