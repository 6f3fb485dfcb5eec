"""Command-line front end: PMF checks, threshold sweeps, tradeoff curves,
CMDP solves, raw simulation and SVG rendering.

Every command writes UTF-8 CSV (to ``--out`` or stdout) that starts with a
``#`` schema line and a ``#`` parameter line. Trailing ``# key=value`` lines
carry summaries. Numbers use 9 significant digits.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from . import analytics, cmdp, simulator
from .errors import CapacityError, ConvergenceError, DomainError, NondegeneracyError
from .model import NetworkParams
from .policies import PolicyKind, PolicySpec, format_policy, parse_policy
from .rng import derive_seed
from .svg import render_chart

log = logging.getLogger("aoilab")

SCHEMA_VERSION = "aoilab-csv/1"
EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3

DEFAULT_ETA_GRID = "0.15,0.2,0.25,0.3,0.4,0.5"
DEFAULT_POLICIES = {
    "tradeoff": "lb,single,random,double,cmdp",
    "simulate": "plgfs",
}
DOUBLE_D1_MAX, DOUBLE_D2_MAX = 8, 15
DOUBLE_D1_REPORTED = (0, 3)

# fallbacks for anything neither a flag nor the config file set
DEFAULTS = {
    "lam": 0.5,
    "epsilon": 0.2,
    "delta": 2,
    "delta_min": 0,
    "delta_max": 10,
    "eta_max": 0.25,
    "eta_grid": DEFAULT_ETA_GRID,
    "seed": 1,
    "jmax": None,
    "dt_cap": cmdp.DEFAULT_DT_CAP,
    "dr_cap": cmdp.DEFAULT_DR_CAP,
    "tol": 1e-6,
    "workers": 1,
    "d1_max": DOUBLE_D1_MAX,
    "d2_max": DOUBLE_D2_MAX,
}
SIM_SLOTS_DEFAULT = {"pmf": 0, "sweep": 1_000_000, "tradeoff": 100_000, "simulate": 100_000}


class UsageError(Exception):
    pass


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "" if not math.isfinite(v) else f"{float(v):.9g}"
    return str(v)


class CsvOut:
    """Collects a header, rows and summary lines, then writes them in one go."""

    def __init__(self, command: str, params: dict):
        self.command = command
        self.params = params
        self.columns: list[str] = []
        self.rows: list[list] = []
        self.summary: list[tuple[str, object]] = []

    def render(self) -> str:
        buf = io.StringIO()
        buf.write(f"# {SCHEMA_VERSION} command={self.command}\n")
        buf.write("# " + " ".join(f"{k}={fmt(v)}" for k, v in self.params.items()) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([fmt(v) for v in row])
        for k, v in self.summary:
            buf.write(f"# {k}={fmt(v)}\n")
        return buf.getvalue()

    def summary_text(self) -> str:
        return "".join(f"# {k}={fmt(v)}\n" for k, v in self.summary)


def emit(out: CsvOut, path: Optional[str]) -> None:
    text = out.render()
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    Path(path).write_text(text, encoding="utf-8", newline="\n")
    sys.stdout.write(out.summary_text())


def parallel_map(fn: Callable, items: Sequence, workers: int) -> list:
    """Map in grid order; threads help because the simulation kernels release the GIL."""
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def parse_floats(text: str, name: str) -> list[float]:
    try:
        vals = [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"--{name}: expected comma-separated numbers, got {text!r}") from None
    if not vals:
        raise UsageError(f"--{name} is empty")
    return vals


def read_config(path: str) -> dict[str, str]:
    """Plain ``key = value`` lines; ``#`` starts a comment."""
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    out = {}
    for n, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        out["lam" if key == "lambda" else key] = value
    return out


def resolve(args: argparse.Namespace) -> argparse.Namespace:
    """Fill unset flags from the config file, then from the hard defaults."""
    cfg = read_config(args.config) if getattr(args, "config", None) else {}
    for key, value in cfg.items():
        if not hasattr(args, key):
            raise UsageError(f"unknown config key {key!r} for {args.command}")
        if getattr(args, key) is None:
            setattr(args, key, value)
    for key, value in DEFAULTS.items():
        if hasattr(args, key) and getattr(args, key) is None:
            setattr(args, key, value)
    if hasattr(args, "sim_slots") and args.sim_slots is None:
        args.sim_slots = SIM_SLOTS_DEFAULT[args.command]
    if hasattr(args, "policies") and args.policies is None:
        args.policies = DEFAULT_POLICIES[args.command]
    casts = {
        "lam": float, "epsilon": float, "eta_max": float, "tol": float,
        "delta": int, "delta_min": int, "delta_max": int, "seed": int, "sim_slots": int,
        "dt_cap": int, "dr_cap": int, "workers": int, "d1_max": int, "d2_max": int,
    }
    for key, cast in casts.items():
        if hasattr(args, key) and getattr(args, key) is not None:
            try:
                setattr(args, key, cast(getattr(args, key)))
            except ValueError:
                raise UsageError(f"{key}: cannot parse {getattr(args, key)!r}") from None
    if getattr(args, "jmax", None) is not None:
        args.jmax = int(args.jmax)
    if getattr(args, "sim_slots", 0) < 0:
        raise UsageError("--sim-slots must be non-negative")
    if getattr(args, "workers", 1) < 1:
        raise UsageError("--workers must be at least 1")
    return args


def network(args) -> NetworkParams:
    return NetworkParams(args.lam, args.epsilon)


def base_params(args, *extra: str) -> dict:
    d = {"lambda": args.lam, "epsilon": args.epsilon}
    for key in extra:
        d[key] = getattr(args, key)
    return d


# ---------------------------------------------------------------- commands

def cmd_pmf(args) -> CsvOut:
    p = network(args)
    if args.jmax is not None and args.jmax < 1:
        raise UsageError("--jmax must be positive")
    pmf = analytics.aoi_pmf(p, args.delta, args.jmax)
    out = CsvOut("pmf", base_params(args, "delta", "sim_slots", "seed") | {"jmax": pmf.jmax})
    j = np.arange(1, pmf.jmax + 1)
    if args.sim_slots > 0:
        cfg = simulator.SimConfig(p, PolicySpec.single(args.delta), args.sim_slots, args.seed, pmf_cap=pmf.jmax)
        stats = simulator.run(cfg)
        emp = stats.empirical_pmf[: pmf.jmax] / stats.slots
        out.columns = ["j", "p_analytical", "p_empirical", "abs_error"]
        out.rows = [[a, b, c, abs(b - c)] for a, b, c in zip(j.tolist(), pmf.masses.tolist(), emp.tolist())]
        out.summary.append(("tv", simulator.empirical_vs_analytical(stats, pmf)))
        out.summary.append(("avg_aoi_sim", stats.avg_aoi))
    else:
        out.columns = ["j", "p_analytical"]
        out.rows = [[a, b] for a, b in zip(j.tolist(), pmf.masses.tolist())]
    out.summary.append(("mass_sum", float(pmf.masses.sum())))
    out.summary.append(("tail_mass", pmf.tail_mass))
    out.summary.append(("avg_aoi_closed", analytics.avg_aoi_closed(p, args.delta)))
    return out


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b) if b else float("nan")


def cmd_sweep(args) -> CsvOut:
    if args.delta_min < 0 or args.delta_min > args.delta_max:
        raise UsageError(f"empty threshold range {args.delta_min}..{args.delta_max}")
    p = network(args)
    deltas = list(range(args.delta_min, args.delta_max + 1))

    def cell(idx: int):
        d = deltas[idx]
        aoi, cost = analytics.avg_aoi_closed(p, d), analytics.avg_cost_closed(p, d)
        if args.sim_slots == 0:
            return [d, aoi, cost, None, None, None, None]
        cfg = simulator.SimConfig(p, PolicySpec.single(d), args.sim_slots, derive_seed(args.seed, idx))
        s = simulator.run(cfg)
        return [d, aoi, cost, s.avg_aoi, s.avg_cost, _rel(s.avg_aoi, aoi), _rel(s.avg_cost, cost)]

    out = CsvOut("sweep", base_params(args, "delta_min", "delta_max", "sim_slots", "seed"))
    out.columns = ["delta", "aoi_closed", "cost_closed", "aoi_sim", "cost_sim", "aoi_rel_err", "cost_rel_err"]
    out.rows = parallel_map(cell, range(len(deltas)), args.workers)
    if args.sim_slots:
        out.summary.append(("max_aoi_rel_err", max(r[5] for r in out.rows)))
        out.summary.append(("max_cost_rel_err", max(r[6] for r in out.rows)))
    return out


TRADEOFF_COLUMNS = [
    "eta_max", "lower_bound", "aoi_single_mixed", "aoi_random", "aoi_double_best", "aoi_cmdp",
    # extras after the fixed schema
    "aoi_single_mixed_exact", "aoi_single_mixed_se", "cost_single_mixed", "single_mixed_policy",
    "cost_random", "cost_double_best", "double_best_policy",
    *[f"aoi_double_d1_{d1}" for d1 in DOUBLE_D1_REPORTED],
    "cost_cmdp", "mu_cmdp",
]
TRADEOFF_POLICIES = {"lb", "single", "random", "double", "cmdp"}


def mixed_policy(params: NetworkParams, eta_max: float) -> tuple[PolicySpec, analytics.MixedThreshold]:
    """Policy that spends ``eta_max`` by randomizing only in the boundary state."""
    sel = analytics.select_threshold(params, eta_max)
    if not sel.randomized:
        return PolicySpec.single(sel.delta_high), sel
    return PolicySpec.mixed(sel.delta_low, sel.boundary_q), sel


def double_search(params, eta_max, slots, seed, d1_max, d2_max, workers):
    """Exhaustive search over (delta1, delta2) with common random numbers.

    Returns {(d1, d2): SimStats}; every cell uses the same seed.
    """
    cells = [(d1, d2) for d1 in range(d1_max + 1) for d2 in range(d2_max + 1)]

    def run_cell(c):
        cfg = simulator.SimConfig(params, PolicySpec.double(*c), slots, seed)
        return simulator.run(cfg)

    return dict(zip(cells, parallel_map(run_cell, cells, workers)))


def best_feasible(results: dict, eta_max: float, keep: Callable[[tuple], bool] = lambda c: True):
    best = None
    for cell, s in results.items():
        if keep(cell) and s.avg_cost <= eta_max and (best is None or s.avg_aoi < results[best].avg_aoi):
            best = cell
    return best


def cmd_tradeoff(args) -> CsvOut:
    p = network(args)
    grid = parse_floats(args.eta_grid, "eta-grid")
    if grid != sorted(grid):
        raise UsageError("--eta-grid must be sorted ascending")
    for eta in grid:
        if not 0.0 < eta <= 1.0:
            raise UsageError(f"eta_max values must lie in (0, 1], got {eta}")
    wanted = {x.strip() for x in args.policies.split(",") if x.strip()}
    if not wanted or wanted - TRADEOFF_POLICIES:
        raise UsageError(f"--policies: choose from {','.join(sorted(TRADEOFF_POLICIES))}")
    sim_needed = wanted & {"single", "double"}
    if sim_needed and args.sim_slots < 1:
        raise UsageError("--sim-slots must be positive for simulated policies")

    mdp = None
    if "cmdp" in wanted:
        mdp = cmdp.build_mdp(p, args.dt_cap, args.dr_cap)

    out = CsvOut("tradeoff", base_params(args, "sim_slots", "seed", "dt_cap", "dr_cap", "tol"))
    out.columns = TRADEOFF_COLUMNS
    for idx, eta in enumerate(grid):
        row = dict.fromkeys(TRADEOFF_COLUMNS)
        row["eta_max"] = eta
        seed = derive_seed(args.seed, idx)
        if "lb" in wanted:
            row["lower_bound"] = analytics.lower_bound(p, eta)
        if "random" in wanted:
            _, pt = analytics.random_benchmark(p, eta)
            row["aoi_random"], row["cost_random"] = pt.avg_aoi, pt.avg_cost
        if "single" in wanted:
            spec, sel = mixed_policy(p, eta)
            s = simulator.run(simulator.SimConfig(p, spec, args.sim_slots, seed))
            if spec.kind is PolicyKind.MIXED:
                exact = analytics.boundary_threshold_metrics(p, spec.delta, spec.q)[0]
            else:
                exact = analytics.avg_aoi_closed(p, spec.delta)
            row.update(
                aoi_single_mixed=s.avg_aoi, aoi_single_mixed_se=s.aoi_stderr,
                cost_single_mixed=s.avg_cost, aoi_single_mixed_exact=exact,
                single_mixed_policy=format_policy(spec),
            )
        if "double" in wanted:
            res = double_search(p, eta, args.sim_slots, seed, args.d1_max, args.d2_max, args.workers)
            best = best_feasible(res, eta)
            if best is None:
                log.warning("eta_max=%g: no feasible double-threshold cell", eta)
            else:
                row.update(
                    aoi_double_best=res[best].avg_aoi, cost_double_best=res[best].avg_cost,
                    double_best_policy=format_policy(PolicySpec.double(*best)),
                )
            for d1 in DOUBLE_D1_REPORTED:
                b = best_feasible(res, eta, lambda c, d1=d1: c[0] == d1)
                row[f"aoi_double_d1_{d1}"] = res[b].avg_aoi if b is not None else None
        if "cmdp" in wanted:
            try:
                sol = cmdp.solve_constrained(p, eta, tol=args.tol, mdp=mdp)
                row.update(aoi_cmdp=sol.avg_aoi, cost_cmdp=sol.avg_cost, mu_cmdp=sol.multiplier)
            except (ConvergenceError, NondegeneracyError) as exc:
                log.warning("eta_max=%g: CMDP solve failed: %s", eta, exc)
        out.rows.append([row[c] for c in TRADEOFF_COLUMNS])
    if args.svg:
        Path(args.svg).write_text(tradeoff_svg(out), encoding="utf-8", newline="\n")
    return out


def tradeoff_svg(out: CsvOut) -> str:
    cols = {c: [r[i] for r in out.rows] for i, c in enumerate(out.columns)}
    names = ["lower_bound", "aoi_single_mixed", "aoi_random", "aoi_double_best", "aoi_cmdp"]
    series = {
        n: [float("nan") if v is None else float(v) for v in cols[n]]
        for n in names
        if any(v is not None for v in cols[n])
    }
    return render_chart(cols["eta_max"], series, "transmission budget", "average AoI", "AoI vs cost")


def cmd_cmdp(args) -> CsvOut:
    p = network(args)
    sol = cmdp.solve_constrained(p, args.eta_max, args.dt_cap, args.dr_cap, tol=args.tol)
    mdp = sol.mdp
    out = CsvOut(
        "cmdp",
        base_params(args, "eta_max", "dt_cap", "dr_cap", "tol")
        | {"mu": sol.multiplier, "mix_weight_low": sol.mix_weight},
    )
    # action: the budget-feasible policy; action_low: the policy it is time-shared with
    out.columns = ["delta_t", "delta_r", "action", "action_low"]
    out.rows = [
        list(r)
        for r in zip(mdp.delta_t.tolist(), mdp.delta_r.tolist(),
                     sol.policy_high.astype(int).tolist(), sol.policy_low.astype(int).tolist())
    ]
    out.summary = [
        ("mu", sol.multiplier),
        ("avg_aoi", sol.avg_aoi),
        ("avg_cost", sol.avg_cost),
        ("iterations", sol.iterations),
        ("cap_mass", sol.cap_mass),
    ]
    return out


SIM_COLUMNS = [
    "policy", "slots", "seed", "avg_aoi", "aoi_stderr", "avg_cost", "cost_stderr",
    "throughput", "empty_buffer_freq",
]


def cmd_simulate(args) -> CsvOut:
    p = network(args)
    specs = [parse_policy(t) for t in args.policies.split(",") if t.strip()]
    if not specs:
        raise UsageError("--policies is empty")
    if args.sim_slots < 1:
        raise UsageError("--sim-slots must be positive")
    record = bool(args.trace)

    # every policy sees the same arrivals and channel (common random numbers)
    def cell(spec):
        return simulator.run(simulator.SimConfig(p, spec, args.sim_slots, args.seed, record_trace=record))

    runs = parallel_map(cell, specs, args.workers)
    out = CsvOut("simulate", base_params(args, "sim_slots", "seed"))
    out.columns = SIM_COLUMNS
    for spec, s in zip(specs, runs):
        out.rows.append([
            format_policy(spec), s.slots, s.seed, s.avg_aoi, s.aoi_stderr, s.avg_cost,
            s.cost_stderr, s.throughput, s.empty_buffer_freq,
        ])
    if record:
        base = Path(args.trace)
        for k, s in enumerate(runs):
            path = base if len(runs) == 1 else base.with_name(f"{base.stem}.{k}{base.suffix}")
            s.trace.write(path)
    return out


def read_csv(path: str) -> tuple[dict, list[str], list[list[str]]]:
    """Header comment key/values, column names and rows of an aoilab CSV."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    meta, body = {}, []
    for line in text.splitlines():
        if line.startswith("#"):
            for tok in line[1:].split():
                if "=" in tok:
                    k, v = tok.split("=", 1)
                    meta.setdefault(k, v)
        elif line.strip():
            body.append(line)
    rows = list(csv.reader(body))
    if not rows:
        raise UsageError(f"{path}: no columns")
    return meta, rows[0], rows[1:]


PLOT_PRESETS = {
    "pmf": ("j", ["p_analytical", "p_empirical"], "bar", "AoI", "probability"),
    "sweep": ("delta", ["aoi_closed", "aoi_sim"], "line", "threshold", "average AoI"),
    "tradeoff": (
        "eta_max",
        ["lower_bound", "aoi_single_mixed", "aoi_random", "aoi_double_best", "aoi_cmdp"],
        "line", "transmission budget", "average AoI",
    ),
    "simulate": ("avg_cost", ["avg_aoi"], "line", "average cost", "average AoI"),
}


def cmd_plot(args) -> None:
    meta, columns, rows = read_csv(args.input)
    preset = PLOT_PRESETS.get(meta.get("command", ""), (None, [], "line", "", ""))
    x_col = args.x or preset[0]
    if args.y:
        y_cols = [c.strip() for c in args.y.split(",") if c.strip()]
    else:
        y_cols = [c for c in preset[1] if c in columns]
    if not x_col or not y_cols:
        raise UsageError("cannot infer columns; pass --x and --y")
    for c in [x_col, *y_cols]:
        if c not in columns:
            raise UsageError(f"{args.input}: missing column {c!r}")

    def col(name):
        i = columns.index(name)
        vals = []
        for r in rows:
            try:
                vals.append(float(r[i]) if r[i] != "" else float("nan"))
            except ValueError:
                raise UsageError(f"column {name!r} is not numeric") from None
        return vals

    series = {c: col(c) for c in y_cols if any(math.isfinite(v) for v in col(c))}
    if not series:
        raise UsageError("all selected columns are empty")
    svg = render_chart(
        col(x_col), series,
        preset[3] if x_col == preset[0] else x_col,
        preset[4] if not args.y else ", ".join(y_cols),
        args.title or meta.get("command", ""),
        style=args.style or preset[2],
    )
    if args.out in (None, "-"):
        sys.stdout.write(svg)
    else:
        Path(args.out).write_text(svg, encoding="utf-8", newline="\n")


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aoilab", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, link=True, seed=True, sim=True):
        p.add_argument("--config", help="key = value file; flags override it")
        p.add_argument("--out", help="output path (default stdout)")
        if link:
            p.add_argument("--lambda", dest="lam", type=float, help="arrival probability per slot")
            p.add_argument("--epsilon", type=float, help="erasure probability")
        if seed:
            p.add_argument("--seed", type=int)
        if sim:
            p.add_argument("--sim-slots", type=int, help="simulated slots (0 disables simulation)")
            p.add_argument("--workers", type=int, help="threads for independent cells")

    p = sub.add_parser("pmf", help="receiver AoI PMF of a single-threshold policy")
    common(p)
    p.add_argument("--delta", type=int)
    p.add_argument("--jmax", type=int, help="largest AoI value tabulated")

    p = sub.add_parser("sweep", help="closed-form vs simulated metrics over a threshold range")
    common(p)
    p.add_argument("--delta-min", type=int)
    p.add_argument("--delta-max", type=int)

    p = sub.add_parser("tradeoff", help="AoI achieved by each policy under a cost budget grid")
    common(p)
    p.add_argument("--eta-grid", help="comma-separated budgets, ascending")
    p.add_argument("--policies", help="subset of lb,single,random,double,cmdp")
    p.add_argument("--dt-cap", type=int)
    p.add_argument("--dr-cap", type=int)
    p.add_argument("--tol", type=float, help="CMDP budget tolerance")
    p.add_argument("--d1-max", type=int, help="double-threshold search bound on delta1")
    p.add_argument("--d2-max", type=int, help="double-threshold search bound on delta2")
    p.add_argument("--svg", help="also render the curves to this SVG file")

    p = sub.add_parser("cmdp", help="constrained optimal policy on the truncated chain")
    common(p, seed=False, sim=False)
    p.add_argument("--eta-max", type=float)
    p.add_argument("--dt-cap", type=int)
    p.add_argument("--dr-cap", type=int)
    p.add_argument("--tol", type=float)

    p = sub.add_parser("simulate", help="simulate policies given in text form, e.g. single:5")
    common(p)
    p.add_argument("--policies", help="comma-separated policies, e.g. plgfs,single:5,mixed:4:0.1")
    p.add_argument("--trace", help="write the per-slot trace (TSV) to this path")

    p = sub.add_parser("plot", help="render an aoilab CSV as an SVG chart")
    p.add_argument("input", help="CSV written by another subcommand")
    p.add_argument("--out", help="SVG path (default stdout)")
    p.add_argument("--x", help="x column")
    p.add_argument("--y", help="comma-separated y columns")
    p.add_argument("--style", choices=["line", "bar"])
    p.add_argument("--title")
    p.add_argument("--config", help=argparse.SUPPRESS)
    return parser


COMMANDS = {
    "pmf": cmd_pmf,
    "sweep": cmd_sweep,
    "tradeoff": cmd_tradeoff,
    "cmdp": cmd_cmdp,
    "simulate": cmd_simulate,
}


def main(argv: Optional[Iterable[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(None if argv is None else list(argv))
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        args = resolve(args)
        if args.command == "plot":
            cmd_plot(args)
        else:
            emit(COMMANDS[args.command](args), args.out)
    except (UsageError, DomainError, CapacityError) as exc:
        print(f"aoilab {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, NondegeneracyError) as exc:
        print(f"aoilab {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"aoilab {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
