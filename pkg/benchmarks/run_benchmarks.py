#!/usr/bin/env python
"""
Performance benchmarks for the gflock simulator and metrics.

Run with: python benchmarks/run_benchmarks.py
"""

import sys
import time
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from gflock import baseline_rules, metrics_report, run_episode
from gflock.genetic import encode, evaluate
from gflock.presets import OptimizationBudget, SwarmScale, get_ga_config
from gflock.scenario import gauntlet, open_field
from gflock.world import spawn, step


class BenchmarkRunner:
    """Simple benchmark runner without external dependencies."""

    def __init__(self):
        self.results = []

    def benchmark(self, name, func, *args, iterations=100, **kwargs):
        """Run a benchmark."""
        # Warmup
        for _ in range(2):
            func(*args, **kwargs)

        start = time.perf_counter()
        for _ in range(iterations):
            func(*args, **kwargs)
        end = time.perf_counter()

        elapsed = (end - start) / iterations
        self.results.append({"name": name, "time_ms": elapsed * 1000, "iterations": iterations})
        return elapsed

    def print_results(self):
        """Print formatted benchmark results."""
        print("\n" + "=" * 80)
        print("gflock Performance Benchmarks")
        print("=" * 80)
        print(f"{'Benchmark':<50} {'Time (ms)':<15} {'Iterations'}")
        print("-" * 80)

        for result in sorted(self.results, key=lambda x: x["time_ms"]):
            print(f"{result['name']:<50} {result['time_ms']:>10.4f}      {result['iterations']:>8}")

        print("=" * 80)


def main():
    """Run all benchmarks."""
    runner = BenchmarkRunner()
    rules = baseline_rules()

    print("\nRunning single-step benchmarks...")
    for scale in SwarmScale:
        state = spawn(gauntlet().with_overrides(n_agents=scale.value), seed=0)
        runner.benchmark(f"step() - gauntlet N={scale.value}", step, state, rules)

    print("Running episode benchmarks...")
    for scale in SwarmScale:
        scenario = gauntlet().with_overrides(n_agents=scale.value)
        runner.benchmark(
            f"run_episode() - gauntlet N={scale.value}", run_episode, scenario, rules, 0, iterations=3
        )
    runner.benchmark(
        "run_episode() - open_field N=20", run_episode, open_field(), rules, 0, iterations=5
    )

    print("Running metrics benchmarks...")
    for scale in SwarmScale:
        log = run_episode(gauntlet().with_overrides(n_agents=scale.value), rules, 0)
        runner.benchmark(f"metrics_report() - gauntlet N={scale.value}", metrics_report, log, iterations=5)

    print("Running fitness evaluation benchmark...")
    cfg = get_ga_config(OptimizationBudget.SMOKE, gauntlet())
    runner.benchmark("evaluate() - smoke budget", evaluate, encode(rules), cfg, iterations=3)

    runner.print_results()
    print()


if __name__ == "__main__":
    main()
