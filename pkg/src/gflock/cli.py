"""
Command-line interface for gflock.

This module provides the ``gflock`` entry point: single simulations,
optimization runs, model comparison tables, and replay of exported runs.
"""

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Dict, List, Optional

from . import __version__
from .audit import EvolutionAuditLogger
from .config import FitnessConfig, FitnessVariant
from .exceptions import ConfigError, GflockException, ReplayMismatchError
from .export import (
    events_to_csv,
    file_digest,
    history_to_csv,
    log_from_csv,
    long_format_csv,
    read_report_json,
    read_run_json,
    report_to_json,
    run_path_for,
    run_to_json,
    series_to_csv,
    trajectory_to_csv,
    write_artifacts,
)
from .formatting import TABLE_STYLES, format_comparison
from .genetic import evaluate_ruleset, evolve, read_checkpoint
from .metrics import metrics_report, uniformity_series
from .presets import OptimizationBudget, SwarmScale, get_ga_config
from .reporting import ReplayReport, first_divergence
from .rules import baseline_rules, load_rules, rules_to_json
from .scenario import Scenario, describe, load_scenario
from .utils import compare_models
from .world import run_episode

logger = logging.getLogger(__name__)

OUT_DIR_ENV = "GFLOCK_OUT_DIR"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3
EXIT_REPLAY_MISMATCH = 4


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--scenario", default="gauntlet", help="Scenario JSON file or builtin name (default: gauntlet)"
    )
    parser.add_argument("--agents", type=int, help="Override the scenario's agent count")
    parser.add_argument("--max-steps", type=int, help="Override the scenario's step limit")
    parser.add_argument("--seed", type=int, default=0, help="First seed (default: 0)")
    parser.add_argument("--seeds", type=int, default=1, help="Number of seeds (default: 1)")
    parser.add_argument(
        "--out", help=f"Output directory (default: ${OUT_DIR_ENV} or the current directory)"
    )
    parser.add_argument(
        "--fitness",
        choices=[v.value for v in FitnessVariant],
        default=FitnessVariant.ROBUST.value,
        help="Fitness variant (default: robust)",
    )


def setup_parser() -> argparse.ArgumentParser:
    """Configure the argument parser."""
    parser = argparse.ArgumentParser(
        description="gflock: flocking rule simulation and genetic optimization",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Simulate the baseline rules on the gauntlet
  gflock simulate --rules baseline --seed 42 --out runs/

  # Optimize a rule set on a smoke budget
  gflock optimize --budget smoke --agents 5 --max-steps 60 --out opt/

  # Compare baseline and optimized rules at 20, 60 and 100 agents
  gflock compare --rules baseline --rules-b opt/rules_opt.json --seeds 5

  # Recompute metrics from an exported run
  gflock replay --trajectory runs/trajectory_seed42.csv --report runs/metrics_seed42.json
""",
    )
    parser.add_argument("--version", action="version", version=f"gflock v{__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="Log progress details")

    subparsers = parser.add_subparsers(dest="command", help="Command to execute")

    # --- Simulate Command ---
    simulate_parser = subparsers.add_parser("simulate", help="Run episodes with one rule set")
    _add_common(simulate_parser)
    simulate_parser.add_argument(
        "--rules", default="baseline", help="Rules JSON file or 'baseline' (default: baseline)"
    )

    # --- Optimize Command ---
    optimize_parser = subparsers.add_parser("optimize", help="Evolve an optimized rule set")
    _add_common(optimize_parser)
    optimize_parser.add_argument(
        "--budget",
        choices=[b.value for b in OptimizationBudget],
        default=OptimizationBudget.DESK.value,
        help="Preset sizes of the run (default: desk)",
    )
    optimize_parser.add_argument("--generations", type=int, help="Number of generations (M)")
    optimize_parser.add_argument("--population", type=int, help="Population size (N_p)")
    optimize_parser.add_argument("--elites", type=int, help="Elites kept per generation (N_s)")
    optimize_parser.add_argument("--mutation-rate", type=float, help="Per-gene mutation rate (r)")
    optimize_parser.add_argument("--sigma", type=float, help="Mutation step stddev")
    optimize_parser.add_argument("--episodes", type=int, help="Episodes per evaluation")
    optimize_parser.add_argument("--expert", help="Rules seeded into the initial population")
    optimize_parser.add_argument("--resume", help="Checkpoint to continue from")
    optimize_parser.add_argument("--workers", type=int, help="Evaluation processes (default: 1)")

    # --- Compare Command ---
    compare_parser = subparsers.add_parser("compare", help="Compare two rule sets")
    _add_common(compare_parser)
    compare_parser.add_argument(
        "--rules", default="baseline", help="First (baseline) rule set (default: baseline)"
    )
    compare_parser.add_argument("--rules-b", required=True, help="Second (optimized) rule set")
    compare_parser.add_argument(
        "--scales",
        default=",".join(str(s.value) for s in SwarmScale),
        help="Comma-separated agent counts (default: 20,60,100)",
    )
    compare_parser.add_argument(
        "--table-style", choices=TABLE_STYLES, default="text", help="Table format (default: text)"
    )

    # --- Replay Command ---
    replay_parser = subparsers.add_parser("replay", help="Recompute metrics from exported CSV")
    _add_common(replay_parser)
    replay_parser.add_argument("--trajectory", required=True, help="Trajectory CSV")
    replay_parser.add_argument("--events", help="Events CSV (default: derived from statuses)")
    replay_parser.add_argument("--report", help="Stored metrics JSON to verify against")
    replay_parser.add_argument(
        "--run", help="Run sidecar JSON (default: run_<tag>.json next to trajectory_<tag>.csv)"
    )
    replay_parser.set_defaults(scenario=None)

    return parser


def _out_dir(args: argparse.Namespace) -> Path:
    return Path(args.out or os.environ.get(OUT_DIR_ENV) or ".")


def _scenario(args: argparse.Namespace) -> Scenario:
    scenario = load_scenario(args.scenario or "gauntlet")
    if args.agents is not None or args.max_steps is not None:
        scenario = scenario.with_overrides(n_agents=args.agents, max_steps=args.max_steps)
    return scenario


def _fitness(args: argparse.Namespace) -> FitnessConfig:
    return FitnessConfig(variant=FitnessVariant(args.fitness))


def _seeds(args: argparse.Namespace) -> List[int]:
    if args.seed < 0:
        raise ConfigError("seed must be non-negative", "seed", repr(args.seed))
    if args.seeds < 1:
        raise ConfigError("seed count must be >= 1", "seeds", repr(args.seeds))
    return list(range(args.seed, args.seed + args.seeds))


def _read_text(path: str, field: str) -> str:
    source = Path(path)
    if not source.exists():
        raise ConfigError("file not found", field, path)
    return source.read_text(encoding="utf-8")


def handle_simulate(args: argparse.Namespace) -> None:
    """Handle the simulate command."""
    scenario = _scenario(args)
    ruleset = load_rules(args.rules)
    fitness_cfg = _fitness(args)
    seeds = _seeds(args)
    out = _out_dir(args)
    logger.info("simulating %s", describe(scenario))

    files: Dict[Path, str] = {}
    for seed in seeds:
        log = run_episode(scenario, ruleset, seed)
        report = metrics_report(log, fitness_cfg)
        trajectory = trajectory_to_csv(log)
        files[out / f"trajectory_seed{seed}.csv"] = trajectory
        files[out / f"run_seed{seed}.json"] = run_to_json(scenario, seed, trajectory)
        files[out / f"events_seed{seed}.csv"] = events_to_csv(log)
        files[out / f"metrics_seed{seed}.json"] = report_to_json(report)
        files[out / f"uniformity_seed{seed}.csv"] = series_to_csv(
            "uniformity", uniformity_series(log)
        )
        print(f"seed {seed}:\n{report.summary()}")
    write_artifacts(files)


def handle_optimize(args: argparse.Namespace) -> None:
    """Handle the optimize command."""
    scenario = _scenario(args)
    seeds = _seeds(args)
    cfg = get_ga_config(
        OptimizationBudget(args.budget),
        scenario,
        M=args.generations,
        N_p=args.population,
        N_s=args.elites,
        r=args.mutation_rate,
        sigma=args.sigma,
        episodes_per_eval=args.episodes,
        master_seed=seeds[0],
        expert_rules=load_rules(args.expert) if args.expert else None,
        fitness=_fitness(args),
        workers=args.workers,
    )
    resume = read_checkpoint(args.resume, expected_digest=cfg.digest()) if args.resume else None
    out = _out_dir(args)

    audit = EvolutionAuditLogger(echo=lambda line: print(line, file=sys.stderr))
    result = evolve(cfg, audit, resume=resume, checkpoint_path=out / "checkpoint.json")
    history = [(row.generation, row.best, row.mean) for row in result.history]
    write_artifacts(
        {
            out / "rules_opt.json": rules_to_json(result.best),
            out / "history.csv": history_to_csv(history),
        }
    )
    reference = evaluate_ruleset(baseline_rules(), cfg)
    print(f"best fitness {result.best_member.fitness!r} after generation {cfg.M}")
    print(f"baseline fitness {reference.fitness!r} on the same episodes")


def handle_compare(args: argparse.Namespace) -> None:
    """Handle the compare command."""
    scenario = _scenario(args)
    models = {"baseline": load_rules(args.rules), "optimized": load_rules(args.rules_b)}
    try:
        scales = [int(s) for s in args.scales.split(",") if s.strip()]
    except ValueError:
        raise ConfigError("expected comma-separated integers", "scales", args.scales) from None
    if not scales:
        raise ConfigError("at least one scale is required", "scales", args.scales)
    for n in scales:
        scenario.with_overrides(n_agents=n)
    seeds = _seeds(args)
    out = _out_dir(args)

    table = compare_models(models, scenario, scales, seeds, _fitness(args))
    rendered = format_comparison(table, args.table_style)
    write_artifacts(
        {
            out / "comparison.txt": rendered,
            out / "comparison.json": json.dumps(table.to_dict(), indent=2) + "\n",
        }
    )
    print(rendered, end="")


def _replay_scenario(args: argparse.Namespace) -> Scenario:
    """
    The scenario a trajectory was simulated in: its run sidecar unless
    ``--scenario`` names one, then ``--agents``/``--max-steps`` on top.
    """
    run_path = Path(args.run) if args.run else run_path_for(args.trajectory)
    if args.run and not Path(args.run).exists():
        raise ConfigError("file not found", "run", args.run)
    if args.scenario is None and run_path is not None and run_path.exists():
        record = read_run_json(run_path)
        if file_digest(args.trajectory) != record.trajectory_sha256:
            logger.warning("%s differs from the trajectory %s describes", args.trajectory, run_path)
        scenario = record.scenario
        if args.agents is not None or args.max_steps is not None:
            scenario = scenario.with_overrides(n_agents=args.agents, max_steps=args.max_steps)
        return scenario

    if args.scenario is None:
        logger.warning("no run sidecar for %s, assuming gauntlet", args.trajectory)
    return _scenario(args)


def handle_replay(args: argparse.Namespace) -> None:
    """Handle the replay command."""
    trajectory = _read_text(args.trajectory, "trajectory")
    scenario = _replay_scenario(args)
    events = _read_text(args.events, "events") if args.events else None
    if args.report and not Path(args.report).exists():
        raise ConfigError("file not found", "report", args.report)
    stored = read_report_json(args.report) if args.report else None

    log = log_from_csv(trajectory, events, scenario.dt, scenario.max_steps)
    recomputed = metrics_report(log, _fitness(args))
    result = ReplayReport(recomputed, stored)
    if stored is not None:
        result.divergent_metric = first_divergence(recomputed, stored)

    write_artifacts({_out_dir(args) / "replay_long.csv": long_format_csv(log)})
    print(result.summary())
    if not result.ok:
        name = result.divergent_metric or ""
        raise ReplayMismatchError(
            "recomputed metric differs from the stored report",
            name,
            f"recomputed {getattr(recomputed, name)!r}, stored {getattr(stored, name)!r}",
        )


HANDLERS = {
    "simulate": handle_simulate,
    "optimize": handle_optimize,
    "compare": handle_compare,
    "replay": handle_replay,
}


def main(argv: Optional[List[str]] = None) -> None:
    """Main entry point."""
    if argv is None:
        argv = sys.argv[1:]

    parser = setup_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        sys.exit(EXIT_CONFIG)

    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )

    try:
        HANDLERS[args.command](args)
    except ReplayMismatchError as e:
        print(f"Replay mismatch: {e}", file=sys.stderr)
        sys.exit(EXIT_REPLAY_MISMATCH)
    except ConfigError as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        sys.exit(EXIT_CONFIG)
    except (GflockException, OSError) as e:
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(EXIT_RUNTIME)


if __name__ == "__main__":
    main()
