"""Command-line interface.

Subcommands: ``solve`` (run the randomized sweep on an instance file),
``exact`` (desk-scale ground truth, or ``--compare`` two frontier CSVs),
``bench`` (seeded instance families, solver vs exact reference, metric
summary), ``convert`` (TSPLIB import, extended-DIMACS export).

Every artifact is byte-reproducible given identical flags and seed; wall
times therefore go to a separate ``timing.json`` sidecar and stderr, never
into the contracted outputs.

Exit codes: 0 success, 2 usage, 3 unreadable/invalid input, 4 size-limit
refusal, 5 every grid point indeterminate.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
import warnings
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import metrics
from .engine import get_backend
from .exact import (
    exact_objectives,
    exact_pareto,
    exact_pareto_with_costs,
    exact_threshold_frontier,
)
from .frontier import (
    RunReport,
    SolveConfig,
    approximate_frontier,
    approximate_frontier_weighted,
)
from .instances import InstanceError, load_problem, save_problem
from .model import Frontier, FrontierEntry
from .scenarios import (
    attach_costs,
    encode_road_network,
    encode_supply_chain,
    generate_random_instance,
    load_tsplib,
)

EXIT_OK = 0
EXIT_INPUT = 3
EXIT_LIMIT = 4
EXIT_INDETERMINATE = 5

SCHEMA_VERSION = 1


def _fail(code: int, message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _frontier_csv(frontier: Frontier, extra_cols: dict | None = None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    k = len(frontier[0].p) if frontier else 0
    header = ["x"] + [f"p{i + 1}" for i in range(k)]
    extras = extra_cols or {}
    header += list(extras)
    writer.writerow(["# schema"] + [f"paretocount-frontier-v{SCHEMA_VERSION}"])
    writer.writerow(header)
    for idx, e in enumerate(frontier):
        row = ["".join(str(b) for b in e.x)] + [repr(float(v)) for v in e.p]
        row += [repr(float(col[idx])) for col in extras.values()]
        writer.writerow(row)
    return buf.getvalue()


def _report_json(report: RunReport) -> str:
    return json.dumps(report.to_obj(), indent=1, sort_keys=True) + "\n"


def _points_csv(points) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for p in points:
        writer.writerow([repr(float(v)) for v in p])
    return buf.getvalue()


def cmd_solve(args) -> int:
    try:
        problem, meta = load_problem(args.instance)
    except FileNotFoundError:
        return _fail(EXIT_INPUT, f"instance file not found: {args.instance}")
    except InstanceError as e:
        return _fail(EXIT_INPUT, f"cannot parse instance: {e}")
    cfg = SolveConfig(
        delta=args.delta,
        epsilon=args.epsilon,
        gamma=args.gamma,
        T=args.T,
        b=args.b,
        seed=args.seed,
        backend=args.backend,
        strategy=args.strategy,
        step_limit=args.step_limit,
        time_limit=args.time_limit,
        jobs=args.jobs,
    )
    start = time.perf_counter()
    try:
        if problem.is_weighted:
            frontier, report = approximate_frontier_weighted(problem, cfg)
        else:
            frontier, report = approximate_frontier(problem, cfg)
    except ValueError as e:
        return _fail(EXIT_LIMIT, str(e))
    wall = time.perf_counter() - start

    extra = {}
    if report.weighted is not None and frontier:
        for i in range(problem.k):
            extra[f"est{i + 1}"] = [
                report.weighted["estimates"][j][i] for j in range(len(frontier))
            ]
    costs = meta.get("costs")
    if costs is not None and not problem.is_weighted:
        frontier = attach_costs(frontier, [Fraction(c) for c in costs])
        extra = {}
    out = Path(args.out)
    _write_text(out / "frontier.csv", _frontier_csv(frontier, extra))
    _write_text(out / "report.json", _report_json(report))
    _write_text(
        out / "timing.json",
        json.dumps({"wall_time_s": wall}, indent=1) + "\n",
    )
    print(
        f"{len(frontier)} frontier entries; tally {report.tally}",
        file=sys.stderr,
    )
    if report.all_indeterminate:
        return _fail(
            EXIT_INDETERMINATE,
            "every grid point timed out; raise --step-limit",
        )
    return EXIT_OK


def cmd_exact(args) -> int:
    if args.compare:
        try:
            cand = metrics.read_points_csv(args.compare[0])
            ref = metrics.read_points_csv(args.compare[1])
        except (FileNotFoundError, ValueError) as e:
            return _fail(EXIT_INPUT, str(e))
        (cand_n, ref_n), _ = metrics.normalize([cand, ref])
        print(f"gd {metrics.gd(cand_n, ref_n)!r}")
        print(f"igd {metrics.igd(cand_n, ref_n)!r}")
        origin = tuple(0.0 for _ in range(cand_n.shape[1]))
        print(f"hv {metrics.hv(cand_n, origin)!r}")
        spacing = metrics.sp(cand_n) if cand_n.shape[0] >= 2 else float("nan")
        print(f"sp {spacing!r}")
        return EXIT_OK
    try:
        problem, meta = load_problem(args.instance)
    except FileNotFoundError:
        return _fail(EXIT_INPUT, f"instance file not found: {args.instance}")
    except InstanceError as e:
        return _fail(EXIT_INPUT, f"cannot parse instance: {e}")
    costs = meta.get("costs")
    try:
        if costs is not None and not problem.is_weighted:
            fr = [Fraction(c) for c in costs]
            pareto = exact_pareto_with_costs(problem, fr)
            thresh = attach_costs(exact_threshold_frontier(problem), fr)
        else:
            pareto = exact_pareto(problem)
            thresh = exact_threshold_frontier(problem)
    except ValueError as e:
        return _fail(EXIT_LIMIT, str(e))
    out = Path(args.out)
    _write_text(out / "exact_pareto.csv", _frontier_csv(pareto))
    _write_text(out / "threshold_frontier.csv", _frontier_csv(thresh))
    print(
        f"exact frontier: {len(pareto)} entries; "
        f"threshold frontier: {len(thresh)} entries",
        file=sys.stderr,
    )
    return EXIT_OK


def _score_entries(problem, frontier, costs):
    """Exact objective vectors for witnesses (costs post-hoc when given)."""
    scored = []
    for e in frontier:
        p = exact_objectives(problem, e.x)
        if costs is not None:
            cost = sum(
                (Fraction(c) for c, bit in zip(costs, e.x) if bit), Fraction(0)
            )
            p = (p[0], -cost)
        scored.append([float(v) for v in p])
    return scored


def cmd_bench(args) -> int:
    rows = []
    out = Path(args.out)
    for inst in range(args.count):
        inst_seed = args.seed * 1000 + inst
        if args.family == "supply":
            spec, _ = generate_random_instance(
                "supply",
                seed=inst_seed,
                n_nodes=args.nodes,
                budget_fraction=Fraction(1, 2),
            )
            problem, costs = encode_supply_chain(spec)
            costs = list(costs)
        else:
            spec, events = generate_random_instance(
                "road",
                seed=inst_seed,
                rows=1,
                cols=2,
                k_events=2,
                r_regimes=1,
                hop_limit=1,
            )
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                problem = encode_road_network(spec, events, weight_scale=10)
            costs = None
        if costs is not None:
            ref_entries = exact_pareto_with_costs(problem, costs)
        else:
            ref_entries = exact_pareto(problem)
        ref_pts = [[float(v) for v in e.p] for e in ref_entries]
        for rep in range(args.seeds):
            run_seed = args.seed + 7919 * inst + rep
            cfg = SolveConfig(delta=args.delta, seed=run_seed, jobs=args.jobs)
            if problem.is_weighted:
                cfg.T, cfg.b = args.T, args.b
                frontier, report = approximate_frontier_weighted(problem, cfg)
            else:
                cfg.epsilon = args.epsilon
                frontier, report = approximate_frontier(problem, cfg)
            cand_pts = _score_entries(problem, frontier, costs)
            row = {
                "family": args.family,
                "instance": inst,
                "rep": rep,
                "frontier_size": len(frontier),
            }
            if cand_pts and ref_pts:
                (cand_n, ref_n), _ = metrics.normalize([cand_pts, ref_pts])
                origin = tuple(0.0 for _ in range(cand_n.shape[1]))
                row["gd"] = metrics.gd(cand_n, ref_n)
                row["igd"] = metrics.igd(cand_n, ref_n)
                row["hv"] = metrics.hv(cand_n, origin)
                row["sp"] = (
                    metrics.sp(cand_n) if len(cand_pts) >= 2 else float("nan")
                )
            rows.append(row)
    buf = io.StringIO()
    fields = ["family", "instance", "rep", "frontier_size", "gd", "igd", "hv", "sp"]
    writer = csv.DictWriter(buf, fields, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({f: repr(row[f]) if isinstance(row.get(f), float) else row.get(f, "") for f in fields})
    _write_text(out / "runs.csv", buf.getvalue())

    buf2 = io.StringIO()
    w2 = csv.writer(buf2, lineterminator="\n")
    w2.writerow(["metric", "mean", "std"])
    for metric in ("gd", "igd", "hv", "sp"):
        vals = [
            row[metric]
            for row in rows
            if metric in row and not np.isnan(row[metric])
        ]
        if vals:
            w2.writerow(
                [metric, repr(float(np.mean(vals))), repr(float(np.std(vals)))]
            )
        else:
            w2.writerow([metric, "", ""])
    _write_text(out / "summary.csv", buf2.getvalue())
    print(f"{len(rows)} runs written to {out}", file=sys.stderr)
    return EXIT_OK


def cmd_convert(args) -> int:
    if args.network:
        from .scenarios import load_network

        try:
            spec, events = load_network(args.network)
        except (FileNotFoundError, ValueError, KeyError) as e:
            return _fail(EXIT_INPUT, f"cannot parse network file: {e}")
        try:
            if events is not None and spec.hop_limit is not None:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore")
                    problem = encode_road_network(
                        spec, events, weight_scale=args.weight_scale
                    )
                save_problem(args.out, problem, meta={"family": "road"})
            else:
                problem, costs = encode_supply_chain(spec)
                save_problem(
                    args.out,
                    problem,
                    meta={
                        "family": "supply",
                        "costs": [str(c) for c in costs],
                    },
                )
        except ValueError as e:
            return _fail(EXIT_LIMIT, str(e))
        print(f"wrote {args.out}", file=sys.stderr)
        return EXIT_OK
    if args.tsplib:
        try:
            spec = load_tsplib(args.tsplib)
        except (FileNotFoundError, ValueError) as e:
            return _fail(EXIT_INPUT, str(e))
        if args.budget is not None:
            spec = type(spec)(
                spec.n_nodes,
                spec.edges,
                spec.distances,
                spec.source,
                spec.target,
                budget_fraction=Fraction(args.budget),
            )
        try:
            problem, costs = encode_supply_chain(spec)
        except ValueError as e:
            return _fail(EXIT_LIMIT, str(e))
        save_problem(
            args.out,
            problem,
            meta={"family": "supply", "costs": [str(c) for c in costs]},
        )
        print(f"wrote {args.out}", file=sys.stderr)
        return EXIT_OK
    try:
        problem, _ = load_problem(args.instance)
    except FileNotFoundError:
        return _fail(EXIT_INPUT, f"instance file not found: {args.instance}")
    except InstanceError as e:
        return _fail(EXIT_INPUT, f"cannot parse instance: {e}")
    from .dimacs import to_dimacs

    idx = args.objective
    if not 0 <= idx < problem.k:
        return _fail(EXIT_INPUT, f"objective index {idx} out of range")
    _write_text(Path(args.dimacs), to_dimacs(problem.objective_formula(idx)))
    print(f"wrote {args.dimacs}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paretocount",
        description="Approximate Pareto frontiers for counting objectives",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("solve", help="run the randomized sweep on an instance")
    ps.add_argument("--instance", required=True)
    ps.add_argument("--out", required=True)
    ps.add_argument("--delta", type=float, default=0.2)
    ps.add_argument("--epsilon", type=int, default=3)
    group = ps.add_mutually_exclusive_group()
    group.add_argument("--gamma", type=float)
    group.add_argument("--T", type=int, dest="T")
    ps.add_argument("--b", type=int, dest="b")
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument(
        "--backend",
        default=None,
        help="SAT backend name (default: reference, or PARETOCOUNT_BACKEND)",
    )
    ps.add_argument(
        "--strategy",
        default="auto",
        choices=["auto", "split", "monolithic"],
    )
    ps.add_argument("--step-limit", type=int, default=None,
                    help="deterministic per-query budget (propagation steps)")
    ps.add_argument("--time-limit", type=float, default=None,
                    help="wall seconds per oracle query; a triggered timeout "
                         "makes the run seed-dependent on machine speed")
    ps.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    ps.set_defaults(func=cmd_solve)

    pe = sub.add_parser("exact", help="desk-scale ground truth or CSV compare")
    pe.add_argument("--instance")
    pe.add_argument("--out")
    pe.add_argument(
        "--compare",
        nargs=2,
        metavar=("CANDIDATE", "REFERENCE"),
        help="score a candidate frontier CSV against a reference CSV",
    )
    pe.set_defaults(func=cmd_exact)

    pb = sub.add_parser("bench", help="seeded sweep over an instance family")
    pb.add_argument("--family", choices=["supply", "road"], default="supply")
    pb.add_argument("--count", type=int, default=2, help="instances")
    pb.add_argument("--seeds", type=int, default=5, help="repetitions each")
    pb.add_argument("--nodes", type=int, default=4)
    pb.add_argument("--delta", type=float, default=0.2)
    pb.add_argument("--epsilon", type=int, default=3)
    pb.add_argument("--T", type=int, default=1)
    pb.add_argument("--b", type=int, default=2)
    pb.add_argument("--seed", type=int, default=0)
    pb.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    pb.add_argument("--out", required=True)
    pb.set_defaults(func=cmd_bench)

    pc = sub.add_parser("convert", help="network/TSPLIB import, DIMACS export")
    pc.add_argument("--network", help="network+events JSON (see SCHEMA.md)")
    pc.add_argument("--weight-scale", type=int, default=1000)
    pc.add_argument("--tsplib")
    pc.add_argument("--budget", type=str, default=None)
    pc.add_argument("--out")
    pc.add_argument("--instance")
    pc.add_argument("--dimacs")
    pc.add_argument("--objective", type=int, default=0)
    pc.set_defaults(func=cmd_convert)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "solve" and args.gamma is not None and args.b is not None:
        parser.error("--gamma conflicts with --T/--b")
    if args.command == "solve" and (args.T is None) != (args.b is None):
        parser.error("--T and --b must be supplied together")
    if args.command == "exact" and not args.compare and not (
        args.instance and args.out
    ):
        parser.error("exact needs --instance and --out, or --compare")
    if args.command == "convert" and not (
        (args.tsplib and args.out)
        or (args.network and args.out)
        or (args.instance and args.dimacs)
    ):
        parser.error(
            "convert needs --tsplib/--out, --network/--out, or "
            "--instance/--dimacs"
        )
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
