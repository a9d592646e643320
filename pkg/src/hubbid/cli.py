"""Command-line front end for the daily bidding pipeline.

Subcommands: ``scenarios | bid | evaluate | validate-derating | report``.
Every subcommand takes a manifest file; flags override individual manifest
fields. Exit codes: 0 success, 2 schema or input violation, 3 infeasible
planning problem, 4 solver failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from .bidding import plan_day, save_bid, write_bid_csv, write_vcc_csv
from .domain.configio import load_hub
from .domain.types import DeratingProfile, HubSpec, ScenarioSet, TimeGrid
from .domain.validation import validate_derating
from .errors import (
    BackendError,
    BuildError,
    FitError,
    InputError,
    PlanningInfeasibleError,
    SerializationError,
    SolutionIntegrityError,
    SolverNotFoundError,
)
from .evaluation import (
    EvaluationReport,
    compare_schemes,
    evaluate_days,
    report_to_dict,
    write_outcomes_csv,
)
from .manifest import (
    RunManifest,
    load_caps,
    load_manifest,
    load_realized_day,
    load_scenario_inputs,
)
from .model.builder import build_hub_model
from .scenarios.pipeline import generate_scenario_set
from .scenarios.setio import load_scenario_set, save_scenario_set
from .solver.writers import write_lp

EXIT_OK = 0
EXIT_SCHEMA = 2
EXIT_INFEASIBLE = 3
EXIT_SOLVER = 4


def _apply_overrides(man: RunManifest, args) -> RunManifest:
    if getattr(args, "seed", None) is not None:
        man = dataclasses.replace(man, seed=args.seed)
    if getattr(args, "out", None) is not None:
        man = dataclasses.replace(man, output_dir=args.out)
    solver = man.solver
    if getattr(args, "gap", None) is not None:
        solver = dataclasses.replace(solver, mip_gap=args.gap)
    if getattr(args, "time_limit", None) is not None:
        solver = dataclasses.replace(solver, time_limit=args.time_limit)
    if solver is not man.solver:
        man = dataclasses.replace(man, solver=solver)
    if getattr(args, "k", None) is not None:
        if man.scenarios is None:
            raise InputError("--k needs a 'scenarios' section in the manifest")
        man = dataclasses.replace(
            man, scenarios=dataclasses.replace(man.scenarios, k=args.k)
        )
    if getattr(args, "scheme", None) is not None:
        man = dataclasses.replace(
            man, bid=dataclasses.replace(man.bid, scheme=args.scheme)
        )
    if getattr(args, "write_lp", False):
        man = dataclasses.replace(
            man, bid=dataclasses.replace(man.bid, write_lp=True)
        )
    if getattr(args, "schemes", None) is not None:
        schemes = tuple(s for s in args.schemes.split(",") if s)
        if not schemes:
            raise InputError("--schemes: expected a comma-separated list")
        man = dataclasses.replace(
            man, evaluate=dataclasses.replace(man.evaluate, schemes=schemes)
        )
    if getattr(args, "jobs", None) is not None:
        if args.jobs < 1:
            raise InputError("--jobs: must be >= 1")
        man = dataclasses.replace(
            man, evaluate=dataclasses.replace(man.evaluate, jobs=args.jobs)
        )
    return man


def _day_list(man: RunManifest, args) -> list[str | None]:
    """The days to run: the manifest batch, a --days subset, or one bare day."""
    requested = getattr(args, "days", None)
    if requested is not None:
        if man.days is None:
            raise InputError("--days needs a 'days' section in the manifest")
        days = [d for d in requested.split(",") if d]
        unknown = [d for d in days if d not in man.days.days]
        if unknown:
            raise InputError(f"--days: not in the manifest day list: {unknown}")
        return list(days)
    if man.days is not None:
        return list(man.days.days)
    return [None]


def _scenario_file(man: RunManifest, day: str | None) -> str:
    name = man.scenarios.file if man.scenarios is not None else "scenarios.json"
    return os.path.join(man.out_dir(day), name)


def _scenario_set_for(
    man: RunManifest, spec: HubSpec, grid: TimeGrid, day: str | None
) -> ScenarioSet:
    """Reuse a generated scenario file when present, else generate in memory."""
    path = _scenario_file(man, day)
    if os.path.exists(path):
        return load_scenario_set(path)
    cfg = man.scenarios
    if cfg is None:
        raise InputError(
            f"scenario file {path} not found and the manifest has no "
            f"'scenarios' section to generate one"
        )
    inputs = load_scenario_inputs(man, spec, grid, day)
    return generate_scenario_set(
        inputs, spec.datacenter, cfg.n_per_param, cfg.n_combos, cfg.k, man.day_seed(day)
    )


def _tag(day: str | None) -> str:
    return day if day is not None else "day"


def cmd_scenarios(man: RunManifest, args) -> int:
    if man.scenarios is None:
        raise InputError("manifest has no 'scenarios' section")
    spec, grid = load_hub(man.resolve(man.hub))
    cfg = man.scenarios
    for day in _day_list(man, args):
        inputs = load_scenario_inputs(man, spec, grid, day)
        sset = generate_scenario_set(
            inputs,
            spec.datacenter,
            cfg.n_per_param,
            cfg.n_combos,
            cfg.k,
            man.day_seed(day),
        )
        outdir = man.out_dir(day)
        os.makedirs(outdir, exist_ok=True)
        path = os.path.join(outdir, cfg.file)
        save_scenario_set(path, sset)
        checksum = float(sum(s.probability for s in sset.scenarios))
        print(
            f"[{_tag(day)}] {len(sset.scenarios)} scenarios, "
            f"probability sum {checksum!r} -> {path}"
        )
    return EXIT_OK


def _bid_one_day(man: RunManifest, spec: HubSpec, grid: TimeGrid, day: str | None) -> str:
    sset = _scenario_set_for(man, spec, grid, day)
    caps = load_caps(man, grid, day)
    bid = plan_day(
        spec,
        sset,
        caps,
        options=man.solver,
        scheme=man.bid.scheme,
        vcc_quantile=man.bid.vcc_quantile,
    )
    outdir = man.out_dir(day)
    os.makedirs(outdir, exist_ok=True)
    save_bid(bid, os.path.join(outdir, man.bid.file))
    if bid.day_ahead is not None:
        write_bid_csv(bid, os.path.join(outdir, "bid.csv"))
    for cluster in spec.datacenter.clusters:
        write_vcc_csv(bid, cluster.id, os.path.join(outdir, f"vcc_{cluster.id}.csv"))
    if man.bid.write_lp:
        builder = build_hub_model(
            spec, sset, caps, scheme=man.bid.scheme, native_sos2=man.solver.native_sos2
        )
        write_lp(builder.model, os.path.join(outdir, "model.lp"))
    gap = f"{bid.gap:.2e}" if bid.gap is not None else "n/a"
    return (
        f"[{_tag(day)}] scheme={bid.scheme} expected={bid.expected_cost:.2f} EUR "
        f"cvar={bid.cvar:.2f} EUR status={bid.status} gap={gap} -> {outdir}"
    )


def cmd_bid(man: RunManifest, args) -> int:
    spec, grid = load_hub(man.resolve(man.hub))
    days = _day_list(man, args)
    jobs = min(man.evaluate.jobs, len(days))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            lines = list(pool.map(lambda d: _bid_one_day(man, spec, grid, d), days))
    else:
        lines = [_bid_one_day(man, spec, grid, d) for d in days]
    for line in lines:
        print(line)
    return EXIT_OK


def cmd_validate_derating(man: RunManifest, args) -> int:
    spec, grid = load_hub(man.resolve(man.hub))
    caps = load_caps(man, grid)
    if caps is None:
        raise InputError("manifest has no 'derating' profile to validate")
    verdict = validate_derating(caps, spec.ppa, grid)
    print("PASS" if verdict.passed else "FAIL")
    for i, energy in enumerate(verdict.daily_energy_kwh):
        print(
            f"  day {i}: de-rating energy {energy:.1f} kWh "
            f"(budget {verdict.daily_budget_kwh:.1f})"
        )
    for i, energy in enumerate(verdict.weekly_energy_kwh):
        print(
            f"  week {i}: de-rating energy {energy:.1f} kWh "
            f"(budget {verdict.weekly_budget_kwh:.1f})"
        )
    if not verdict.min_capacity_ok:
        print(f"  below contractual minimum at steps {verdict.violating_steps}")
    if not verdict.within_rated_ok:
        print(f"  above rated capacity at steps {verdict.violating_steps}")
    if not verdict.daily_ok:
        print("  daily de-rating energy budget exceeded")
    if not verdict.weekly_ok:
        print("  weekly de-rating energy budget exceeded")
    return EXIT_OK if verdict.passed else EXIT_SCHEMA


def cmd_evaluate(man: RunManifest, args) -> int:
    spec, grid = load_hub(man.resolve(man.hub))
    days = _day_list(man, args)
    caps = load_caps(man, grid)

    ssets = [_scenario_set_for(man, spec, grid, day) for day in days]
    if days != [None]:
        realized = [
            load_realized_day(man.day_file("realized.json", day)) for day in days
        ]
    else:
        if not man.evaluate.realized:
            raise InputError("evaluate.realized names no realized-day files")
        realized = [load_realized_day(man.resolve(p)) for p in man.evaluate.realized]
        ssets = ssets * len(realized)

    schemes = man.evaluate.schemes
    if len(schemes) == 1:
        report = evaluate_days(
            spec, ssets, realized, schemes[0], caps, man.solver, jobs=man.evaluate.jobs
        )
        reports = {schemes[0]: report}
        deltas: dict[str, dict] = {}
    else:
        cmp = compare_schemes(
            spec, ssets, realized, schemes, caps, man.solver, jobs=man.evaluate.jobs
        )
        reports, deltas = cmp.reports, cmp.deltas

    outdir = man.out_dir()
    os.makedirs(outdir, exist_ok=True)
    if args.format == "csv":
        outcomes = [o for s in schemes for o in reports[s].outcomes]
        path = os.path.join(outdir, "outcomes.csv")
        write_outcomes_csv(outcomes, path)
        print(f"wrote {path}")
    else:
        for scheme in schemes:
            path = os.path.join(outdir, f"report_{scheme}.json")
            with open(path, "w", newline="\n") as fh:
                json.dump(report_to_dict(reports[scheme]), fh, indent=2)
                fh.write("\n")
            print(f"wrote {path}")

    for scheme in schemes:
        stats = reports[scheme].summary["ex_post_cost"]
        line = (
            f"[{scheme}] mean ex-post cost {stats['mean']:.2f} EUR "
            f"(q25 {stats['q25']:.2f}, q75 {stats['q75']:.2f})"
        )
        if scheme in deltas:
            pct = deltas[scheme]["mean_ex_post_cost_pct"]
            if pct is not None:
                line += f", {pct:+.1f}% vs {schemes[0]}"
        print(line)
    return EXIT_OK


def cmd_report(man: RunManifest, args) -> int:
    """Render evaluation reports already on disk; no solving."""
    outdir = man.out_dir()
    rows = []
    for scheme in man.evaluate.schemes:
        path = os.path.join(outdir, f"report_{scheme}.json")
        try:
            with open(path) as fh:
                doc = json.load(fh)
        except FileNotFoundError:
            raise InputError(
                f"report not found: {path} (run 'evaluate' first)"
            ) from None
        except json.JSONDecodeError as exc:
            raise InputError(f"report {path}: invalid JSON ({exc})") from None
        if "summary" not in doc or "scheme" not in doc:
            raise InputError(f"report {path}: missing summary or scheme field")
        rows.append(doc)

    if args.format == "csv":
        print("scheme,metric,q25,mean,q75,std")
        for doc in rows:
            for metric, stats in doc["summary"].items():
                print(
                    f"{doc['scheme']},{metric},{stats['q25']!r},"
                    f"{stats['mean']!r},{stats['q75']!r},{stats['std']!r}"
                )
        return EXIT_OK

    for doc in rows:
        print(f"scheme {doc['scheme']} ({len(doc['days'])} days)")
        for metric, stats in doc["summary"].items():
            print(
                f"  {metric:>20}: mean {stats['mean']:.2f} "
                f"[q25 {stats['q25']:.2f}, q75 {stats['q75']:.2f}] "
                f"std {stats['std']:.2f}"
            )
    return EXIT_OK


_COMMANDS = {
    "scenarios": cmd_scenarios,
    "bid": cmd_bid,
    "evaluate": cmd_evaluate,
    "validate-derating": cmd_validate_derating,
    "report": cmd_report,
}


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("manifest", help="path to the run manifest JSON")
    common.add_argument("--seed", type=int, help="override the manifest seed")
    common.add_argument("--out", help="override the output directory")
    common.add_argument("--days", help="comma-separated subset of the manifest days")
    common.add_argument(
        "--format", choices=("json", "csv"), default="json", help="artifact format"
    )
    common.add_argument("--gap", type=float, help="override the MIP gap")
    common.add_argument(
        "--time-limit", dest="time_limit", type=float, help="solver time limit [s]"
    )
    common.add_argument("--jobs", type=int, help="worker pool size for day batches")
    common.add_argument(
        "--k", type=int, help="override the number of scenario representatives"
    )

    parser = argparse.ArgumentParser(
        prog="hubbid",
        description="Day-ahead bidding pipeline for data-center energy hubs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser(
        "scenarios", parents=[common], help="generate the weighted scenario set"
    )
    p = sub.add_parser(
        "bid", parents=[common], help="solve the planning problem and emit bid files"
    )
    p.add_argument("--scheme", choices=("custom", "tou"), help="supply scheme")
    p.add_argument(
        "--write-lp", dest="write_lp", action="store_true", help="also write model.lp"
    )
    p = sub.add_parser(
        "evaluate", parents=[common], help="re-optimize realized days against the bid"
    )
    p.add_argument("--schemes", help="comma-separated schemes to compare")
    sub.add_parser(
        "validate-derating",
        parents=[common],
        help="check the de-rating profile against the contract",
    )
    sub.add_parser("report", parents=[common], help="print evaluation summaries")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        man = _apply_overrides(load_manifest(args.manifest), args)
        return _COMMANDS[args.command](man, args)
    except (InputError, BuildError, FitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except PlanningInfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        if exc.hint:
            print(f"hint: {exc.hint}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (SolverNotFoundError, BackendError, SolutionIntegrityError, SerializationError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
