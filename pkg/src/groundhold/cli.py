"""Command-line front end: generate, solve, sweep, evaluate, export.

Exit codes are stable: 0 success, 1 model infeasible, 2 usage or I/O error,
3 solver node limit hit.  All randomness flows from ``--seed``; sweep output
is byte-identical for a fixed seed at any ``--jobs`` setting.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .domain import AmbiguitySpec, FlightSchedule, NetworkInstance, SupportGrid, default_support_grid
from .evaluate import (
    DEFAULT_OMEGA,
    deterministic_capacity,
    epsilon_sweep,
    evaluate_policy,
    sample_capacities,
)
from .ingest import (
    IngestError,
    Instance,
    SynthParams,
    empirical_distribution,
    load_instance,
    parse_capacity_history,
    synth_instance,
    write_instance,
)
from .milp import export_mps
from .models import GroundHoldingPolicy, build_d_saghp, build_dr_maghp, build_dr_saghp, build_s_saghp, extract_policy
from .solver import SolverOptions, solve_milp

__all__ = ["main", "entry"]

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_USAGE = 2
EXIT_LIMIT = 3

RESULT_SCHEMA = "ghp-solve/1"
EVAL_SCHEMA = "ghp-eval/1"


class UsageError(Exception):
    """Bad flag combination or unusable input; maps to exit code 2."""


def _common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="seed for every random draw")
    p.add_argument("--jobs", type=int, default=1, help="worker threads for sweep cells")
    p.add_argument("--out", type=str, default=None, help="output file or directory")


def _solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--node-limit", type=int, default=100_000)
    p.add_argument("--gap", type=float, default=1e-6, help="absolute optimality gap")
    p.add_argument("--feasibility-tol", type=float, default=1e-7)
    p.add_argument("--integrality-tol", type=float, default=1e-6)
    p.add_argument("--branching", choices=("most-fractional", "lowest-index"),
                   default="most-fractional")
    p.add_argument("--node-order", choices=("best-bound", "depth-first"), default="best-bound")


def _solver_options(args) -> SolverOptions:
    try:
        return SolverOptions(
            feasibility_tol=args.feasibility_tol,
            integrality_tol=args.integrality_tol,
            optimality_gap=args.gap,
            node_limit=args.node_limit,
            branching=args.branching,
            node_order=args.node_order,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _parse_int_list(text: str, what: str) -> list[int]:
    try:
        out = [int(c) for c in text.split(",") if c.strip()]
    except ValueError:
        raise UsageError(f"bad {what} list {text!r}") from None
    if not out:
        raise UsageError(f"empty {what} list")
    return out


def _parse_float_list(text: str, what: str) -> list[float]:
    try:
        out = [float(c) for c in text.split(",") if c.strip()]
    except ValueError:
        raise UsageError(f"bad {what} list {text!r}") from None
    if not out:
        raise UsageError(f"empty {what} list")
    return out


def _parse_support(text: str) -> SupportGrid:
    try:
        if ":" in text:
            lo, hi = text.split(":")
            return SupportGrid(tuple(range(int(lo), int(hi) + 1)))
        return SupportGrid(tuple(sorted(int(c) for c in text.split(",") if c.strip())))
    except ValueError as exc:
        raise UsageError(f"bad support spec {text!r}: {exc}") from None


def _load(path: str) -> Instance:
    try:
        return load_instance(path)
    except IngestError as exc:
        raise UsageError(str(exc)) from None


def _single_airport(inst: Instance, requested: str | None):
    """Schedule and empirical distribution for one airport of the bundle."""
    airports = inst.schedule.airports
    if requested is None:
        if len(airports) != 1:
            raise UsageError(f"bundle has airports {list(airports)}; pick one with --airport")
        requested = airports[0]
    if requested not in airports:
        raise UsageError(f"airport {requested!r} not in bundle (has {list(airports)})")
    schedule = inst.schedule
    if len(airports) > 1:
        keep = {f.id for f in schedule.flights if f.airport == requested}
        for c in schedule.connections:
            inside = (c.predecessor in keep) + (c.successor in keep)
            if inside == 1:
                raise UsageError(
                    f"connection {c.predecessor}->{c.successor} crosses airports; use dr-maghp")
        schedule = FlightSchedule(
            schedule.horizon,
            tuple(f for f in schedule.flights if f.airport == requested),
            tuple(c for c in schedule.connections if c.predecessor in keep),
            schedule.airborne_cost,
        )
    if requested not in inst.capacities:
        raise UsageError(f"bundle has no capacity records for airport {requested!r}")
    return requested, schedule, inst.capacities[requested]


def _network(inst: Instance, epsilon: float, grid_spec: str | None) -> NetworkInstance:
    airports = inst.schedule.airports
    ambiguities = {}
    for z in airports:
        if z not in inst.capacities:
            raise UsageError(f"bundle has no capacity records for airport {z!r}")
        empirical = inst.capacities[z]
        grid = _parse_support(grid_spec) if grid_spec else default_support_grid(empirical)
        try:
            ambiguities[z] = AmbiguitySpec(empirical, epsilon, grid)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    return NetworkInstance(airports, inst.schedule, ambiguities)


def _build_model(inst: Instance, args):
    """Model plus context needed to interpret its solution."""
    kind = args.model
    if kind in ("dr", "dr-maghp") and args.epsilon is None:
        raise UsageError(f"--epsilon is required for model {kind!r}")
    if kind == "dr-maghp":
        net = _network(inst, args.epsilon, args.support)
        return build_dr_maghp(net), inst.schedule, {"net": net}
    airport, schedule, empirical = _single_airport(inst, args.airport)
    if kind == "det":
        capacity = args.capacity if args.capacity is not None else deterministic_capacity(empirical)
        return build_d_saghp(schedule, capacity), schedule, {"airport": airport, "capacity": capacity}
    if kind == "sp":
        return build_s_saghp(schedule, empirical), schedule, {"airport": airport}
    if kind == "dr":
        grid = _parse_support(args.support) if args.support else default_support_grid(empirical)
        try:
            amb = AmbiguitySpec(empirical, args.epsilon, grid)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        return build_dr_saghp(schedule, amb), schedule, {"airport": airport, "amb": amb}
    raise UsageError(f"unknown model kind {kind!r}")


def _dual_values(model, sol):
    """alpha/beta blocks keyed the way the builders name them."""
    alpha: dict[str, float] = {}
    beta: dict[str, dict[str, float]] = {}
    for j, defn in enumerate(model.variables):
        name = defn.name
        if name == "alpha":
            alpha[""] = float(sol.values[j])
        elif name.startswith("alpha["):
            alpha[name[6:-1]] = float(sol.values[j])
        elif name.startswith("beta["):
            body = name[5:-1]
            airport, _, value = body.rpartition(",")
            beta.setdefault(airport, {})[value] = float(sol.values[j])
    if list(alpha) == [""]:
        return alpha.get(""), beta.get("", {})
    return alpha, beta


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_gen(args) -> int:
    try:
        params = SynthParams(
            num_flights=args.flights,
            horizon=args.horizon,
            ground_cost_range=(args.cost_min, args.cost_max),
            capacity_range=(args.cap_min, args.cap_max),
            support_size=args.support_size,
            connection_density=args.density,
            num_airports=args.airports,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.out is None:
        raise UsageError("gen requires --out DIRECTORY")
    inst = synth_instance(params, args.seed)
    write_instance(args.out, inst.schedule, inst.history)
    print(f"wrote instance bundle to {args.out}")
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = _load(args.instance)
    model, schedule, context = _build_model(inst, args)
    sol = solve_milp(model, _solver_options(args))

    doc: dict = {
        "schema": RESULT_SCHEMA,
        "model": args.model,
        "epsilon": args.epsilon,
        "status": sol.status,
        "objective": None if sol.values is None else sol.objective,
        "policy": None,
        "stats": {"nodes": sol.nodes, "pivots": sol.pivots, "wall_time_s": sol.wall_time},
    }
    if "airport" in context:
        doc["airport"] = context["airport"]
    if "capacity" in context:
        doc["capacity"] = context["capacity"]
    if sol.values is not None and sol.status in ("optimal", "node-limit"):
        policy = extract_policy(model, sol, schedule) if sol.status == "optimal" else None
        if policy is not None:
            doc["policy"] = {
                "assignments": policy.assignments,
                "ground_delays": policy.ground_delays,
                "ground_cost": policy.ground_cost,
            }
        if args.model in ("dr", "dr-maghp"):
            alpha, beta = _dual_values(model, sol)
            doc["alpha"] = alpha
            doc["beta"] = beta
    _write_text(args.out, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    if sol.status == "infeasible":
        return EXIT_INFEASIBLE
    if sol.status == "node-limit":
        return EXIT_LIMIT
    return EXIT_OK


def _eval_distribution(args, fallback):
    if args.eval is None:
        return fallback
    try:
        records = parse_capacity_history(Path(args.eval).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {args.eval}: {exc}") from None
    airports = sorted({r.airport for r in records})
    if len(airports) != 1:
        raise UsageError(f"evaluation capacity file must cover one airport, has {airports}")
    return empirical_distribution(records, airports[0])


def cmd_sweep(args) -> int:
    if args.out is None:
        raise UsageError("sweep requires --out DIRECTORY")
    inst = _load(args.instance)
    _, schedule, empirical = _single_airport(inst, args.airport)
    eval_dist = _eval_distribution(args, empirical)
    omegas = _parse_float_list(args.omega, "omega") if args.omega else list(DEFAULT_OMEGA)
    sizes = _parse_int_list(args.sizes, "sample size")
    grid = _parse_support(args.support) if args.support else None

    result = epsilon_sweep(
        schedule, empirical, omegas, eval_dist, sizes, args.seed,
        grid=grid, options=_solver_options(args), jobs=args.jobs,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "table.csv").write_text(result.to_table())
    for row in result.rows:
        if row.status != "optimal":
            continue
        body = "cost\n" + "".join(f"{c!r}\n" for c in row.per_sample_costs)
        (out / f"samples_{row.label()}_{row.sample_size}.csv").write_text(body)
    print(f"wrote sweep results to {out}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    inst = _load(args.instance)
    _, schedule, empirical = _single_airport(inst, args.airport)
    try:
        doc = json.loads(Path(args.result).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read result document {args.result}: {exc}") from None
    if not doc.get("policy"):
        raise UsageError("result document carries no policy to evaluate")
    assignments = {fid: int(t) for fid, t in doc["policy"]["assignments"].items()}
    delays = {}
    cost = 0.0
    for f in schedule.flights:
        if f.id not in assignments:
            raise UsageError(f"policy is missing flight {f.id!r}")
        delays[f.id] = assignments[f.id] - f.scheduled_arrival
        cost += f.ground_cost * delays[f.id]
    policy = GroundHoldingPolicy(assignments, delays, cost)

    eval_dist = _eval_distribution(args, empirical)
    sizes = _parse_int_list(args.sizes, "sample size")
    rows = ["# schema: " + EVAL_SCHEMA, "sample_size,mean_cost,std_dev"]
    for n in sizes:
        ev = evaluate_policy(policy, schedule, sample_capacities(eval_dist, n, args.seed))
        rows.append(f"{n},{ev.mean!r},{ev.std_dev!r}")
    _write_text(args.out, "\n".join(rows) + "\n")
    return EXIT_OK


def cmd_export_mps(args) -> int:
    inst = _load(args.instance)
    model, _, _ = _build_model(inst, args)
    text = export_mps(model)
    try:
        _write_text(args.out, text)
    except OSError as exc:
        raise UsageError(f"cannot write {args.out}: {exc}") from None
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="groundhold",
        description="Ground holding models: generate, solve, sweep, evaluate, export.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a synthetic instance bundle")
    p.add_argument("--flights", type=int, default=6)
    p.add_argument("--horizon", type=int, default=8)
    p.add_argument("--cost-min", type=float, default=1.0)
    p.add_argument("--cost-max", type=float, default=5.0)
    p.add_argument("--cap-min", type=int, default=1)
    p.add_argument("--cap-max", type=int, default=4)
    p.add_argument("--support-size", type=int, default=3)
    p.add_argument("--density", type=float, default=0.15)
    p.add_argument("--airports", type=int, default=1)
    _common_flags(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="solve one model and write a result document")
    p.add_argument("instance")
    p.add_argument("--model", choices=("det", "sp", "dr", "dr-maghp"), required=True)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--support", type=str, default=None, help="grid as lo:hi or v1,v2,...")
    p.add_argument("--airport", type=str, default=None)
    p.add_argument("--capacity", type=int, default=None, help="override det capacity")
    _solver_flags(p)
    _common_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="radius sweep with out-of-sample evaluation")
    p.add_argument("instance")
    p.add_argument("--omega", type=str, default=None, help="comma-separated radii")
    p.add_argument("--eval", type=str, default=None, help="capacity history file to sample from")
    p.add_argument("--sizes", type=str, default="50,100")
    p.add_argument("--support", type=str, default=None)
    p.add_argument("--airport", type=str, default=None)
    _solver_flags(p)
    _common_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("evaluate", help="re-evaluate a saved policy out of sample")
    p.add_argument("instance")
    p.add_argument("--result", type=str, required=True, help="solve result document")
    p.add_argument("--eval", type=str, default=None)
    p.add_argument("--sizes", type=str, default="50,100")
    p.add_argument("--airport", type=str, default=None)
    _common_flags(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("export-mps", help="write a model as fixed-format MPS")
    p.add_argument("instance")
    p.add_argument("--model", choices=("det", "sp", "dr", "dr-maghp"), required=True)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--support", type=str, default=None)
    p.add_argument("--airport", type=str, default=None)
    p.add_argument("--capacity", type=int, default=None)
    _common_flags(p)
    p.set_defaults(func=cmd_export_mps)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (IngestError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry() -> None:  # console-script hook
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
