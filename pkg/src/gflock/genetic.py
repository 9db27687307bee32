"""
Genetic optimization of flocking rule sets.

A genome is the 20 weights of a RuleSet. Each generation keeps the best
``N_s`` members unchanged (truncation selection with elitism), refills the
population by single-point crossover of those elites, and applies Gaussian
mutation to the new children only. Fitness is minimized.

Every random draw comes from a named stream of the master seed, and the
streams' states are stored in checkpoints, so a resumed run continues
exactly where an uninterrupted one would be.
"""

import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .audit import EvolutionAuditLogger
from .config import GENE_CEIL, GENE_FLOOR, GAConfig
from .exceptions import (
    CheckpointCompatibilityError,
    CheckpointIntegrityError,
    ConfigError,
    ContractError,
    DegenerateInputError,
)
from .export import atomic_write_text, sha256_text
from .metrics import fitness
from .rules import CONTEXT_ORDER, RULE_LENGTH, RuleSet, RuleWeights
from .streams import CROSSOVER, MUTATION, named_stream
from .swarm import AgentStatus
from .world import run_episode

logger = logging.getLogger(__name__)

GENOME_LENGTH = len(CONTEXT_ORDER) * RULE_LENGTH
WORST_FITNESS = 1e12
CHECKPOINT_FORMAT = "gflock-checkpoint"
CHECKPOINT_VERSION = 1

Objective = Callable[["Genome"], float]


@dataclass(frozen=True)
class Genome:
    """Twenty genes in ``[GENE_FLOOR, GENE_CEIL]``, rule by rule in context order."""

    genes: Tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.genes) != GENOME_LENGTH:
            raise ConfigError(
                f"a genome has exactly {GENOME_LENGTH} genes", "genes", f"{len(self.genes)} given"
            )
        for i, g in enumerate(self.genes):
            if not GENE_FLOOR <= g <= GENE_CEIL:
                raise ConfigError(
                    f"gene must lie in [{GENE_FLOOR}, {GENE_CEIL}]", f"genes[{i}]", repr(g)
                )


def encode(ruleset: RuleSet) -> Genome:
    """RuleSet to Genome. Weights outside the gene bounds are rejected."""
    return Genome(tuple(float(w) for w in ruleset.flatten()))


def decode(genome: Genome) -> RuleSet:
    """Genome to RuleSet; ``decode(encode(r)) == r`` on the valid domain."""
    rules = tuple(
        RuleWeights(*genome.genes[k * RULE_LENGTH : (k + 1) * RULE_LENGTH])
        for k in range(len(CONTEXT_ORDER))
    )
    return RuleSet(rules)  # type: ignore[arg-type]


@dataclass(frozen=True)
class EvaluatedGenome:
    """
    A genome and its fitness. ``fitness`` is None while pending.

    ``degenerate`` marks an evaluation absorbed as ``WORST_FITNESS``.
    ``arrived``/``died`` total the agents over the evaluation's episodes.
    """

    genome: Genome
    fitness: Optional[float] = None
    episodes: int = 0
    seed_base: int = 0
    degenerate: bool = False
    arrived: int = field(default=0, compare=False)
    died: int = field(default=0, compare=False)

    @property
    def pending(self) -> bool:
        return self.fitness is None


@dataclass
class Population:
    members: List[EvaluatedGenome]
    generation: int = 0

    def fitnesses(self) -> List[float]:
        if any(m.pending for m in self.members):
            raise ContractError("population has pending fitness values")
        return [m.fitness for m in self.members]  # type: ignore[misc]

    def best(self) -> EvaluatedGenome:
        values = self.fitnesses()
        return self.members[min(range(len(values)), key=lambda i: (values[i], i))]


def _clip(values: np.ndarray) -> np.ndarray:
    return np.clip(values, GENE_FLOOR, GENE_CEIL)


def init_population(cfg: GAConfig, rng: Optional[np.random.Generator] = None) -> Population:
    """
    ``N_p`` genomes of uniform genes drawn from the mutation stream. With
    expert rules, member 0 is their encoding; the stream advances the same
    either way.
    """
    rng = rng if rng is not None else named_stream(cfg.master_seed, MUTATION)
    draws = _clip(rng.uniform(0.0, 1.0, size=(cfg.N_p, GENOME_LENGTH)))
    genomes = [Genome(tuple(float(g) for g in row)) for row in draws]
    if cfg.expert_rules is not None:
        genomes[0] = encode(cfg.expert_rules)
    return Population([EvaluatedGenome(g) for g in genomes], generation=0)


def evaluate(genome: Genome, cfg: GAConfig) -> EvaluatedGenome:
    """
    Mean fitness over ``episodes_per_eval`` episodes seeded
    ``master_seed + k``.

    A degenerate simulation is absorbed as ``WORST_FITNESS`` with the
    ``degenerate`` flag set.
    """
    ruleset = decode(genome)
    seed_base = cfg.master_seed
    scores = []
    arrived = died = 0
    try:
        for k in range(cfg.episodes_per_eval):
            log = run_episode(cfg.scenario, ruleset, seed_base + k)
            scores.append(fitness(log, cfg.fitness))
            counts = log.status_counts(log.n_snapshots - 1)
            arrived += counts[AgentStatus.ARRIVED]
            died += counts[AgentStatus.DEAD]
    except DegenerateInputError as e:
        logger.warning("degenerate evaluation absorbed as worst case: %s", e)
        return EvaluatedGenome(
            genome, WORST_FITNESS, cfg.episodes_per_eval, seed_base, degenerate=True
        )
    value = math.fsum(scores) / len(scores)
    if not math.isfinite(value):
        logger.warning("non-finite fitness %r absorbed as worst case", value)
        return EvaluatedGenome(
            genome, WORST_FITNESS, cfg.episodes_per_eval, seed_base, degenerate=True
        )
    return EvaluatedGenome(
        genome, value, cfg.episodes_per_eval, seed_base, arrived=arrived, died=died
    )


def _evaluate_task(args: Tuple[Genome, GAConfig]) -> EvaluatedGenome:
    genome, cfg = args
    return evaluate(genome, cfg)


def select(pop: Population, n_s: int) -> List[EvaluatedGenome]:
    """
    The ``n_s`` lowest-fitness members; ties go to the lower member index.

    Raises:
        ContractError: If any fitness is pending or ``n_s`` exceeds the population
    """
    values = pop.fitnesses()
    if not 1 <= n_s <= len(values):
        raise ContractError(f"cannot select {n_s} of {len(values)} members")
    order = sorted(range(len(values)), key=lambda i: (values[i], i))
    return [pop.members[i] for i in order[:n_s]]


def splice(first: Genome, second: Genome, cut: int) -> Genome:
    """``first`` genes before ``cut`` followed by ``second`` genes from ``cut``."""
    if not 1 <= cut < GENOME_LENGTH:
        raise ContractError(f"cut must lie in 1..{GENOME_LENGTH - 1}", context=str(cut))
    return Genome(first.genes[:cut] + second.genes[cut:])


def crossover(
    seeds: Sequence[EvaluatedGenome], n_p: int, rng: np.random.Generator
) -> List[Genome]:
    """
    ``n_p - len(seeds)`` children, each spliced from two parents drawn
    independently (with replacement) from ``seeds`` at a cut uniform in
    ``1..19``.
    """
    if not seeds:
        raise ContractError("crossover needs at least one seed")
    children = []
    for _ in range(n_p - len(seeds)):
        first = seeds[int(rng.integers(len(seeds)))].genome
        second = seeds[int(rng.integers(len(seeds)))].genome
        cut = int(rng.integers(1, GENOME_LENGTH))
        children.append(splice(first, second, cut))
    return children


def mutate(
    genomes: Sequence[Genome], r: float, sigma: float, rng: np.random.Generator
) -> List[Genome]:
    """
    Add ``N(0, sigma)`` noise to each gene with probability ``r``, then clamp.

    Both the selection mask and the noise are drawn for every gene, so the
    stream advances identically whatever ``r`` is.
    """
    if not 0.0 <= r <= 1.0:
        raise ContractError("mutation rate must lie in [0,1]", context=repr(r))
    if not sigma > 0:
        raise ContractError("sigma must be > 0", context=repr(sigma))
    out = []
    for genome in genomes:
        genes = np.asarray(genome.genes)
        hit = rng.random(GENOME_LENGTH) < r
        noise = rng.normal(0.0, sigma, GENOME_LENGTH)
        mutated = np.where(hit, _clip(genes + noise), genes)
        out.append(Genome(tuple(float(g) for g in mutated)))
    return out


class _Evaluator:
    """Evaluates pending members in order, with a cache and an optional pool."""

    def __init__(self, cfg: GAConfig, objective: Optional[Objective], audit: EvolutionAuditLogger):
        self.cfg = cfg
        self.objective = objective
        self.audit = audit
        self.cache: Dict[Tuple[float, ...], EvaluatedGenome] = {}

    def _compute(self, genomes: List[Genome]) -> List[EvaluatedGenome]:
        if self.objective is not None:
            objective = self.objective
            return [EvaluatedGenome(g, float(objective(g)), 1, self.cfg.master_seed) for g in genomes]
        if self.cfg.workers > 1 and len(genomes) > 1:
            with ProcessPoolExecutor(max_workers=self.cfg.workers) as pool:
                return list(pool.map(_evaluate_task, [(g, self.cfg) for g in genomes]))
        return [evaluate(g, self.cfg) for g in genomes]

    def __call__(self, pop: Population) -> Tuple[int, int, int]:
        """Fill in pending fitness. Returns (evaluations, cache hits, degenerate)."""
        pending = [i for i, m in enumerate(pop.members) if m.pending]
        todo: List[Genome] = []
        queued = set()
        for i in pending:
            key = pop.members[i].genome.genes
            if key not in self.cache and key not in queued:
                queued.add(key)
                todo.append(pop.members[i].genome)
        for result in self._compute(todo):
            self.cache[result.genome.genes] = result
            counters = self.audit.metrics
            counters.increment("episodes_run", result.episodes)
            counters.increment("agents_arrived", result.arrived)
            counters.increment("agents_died", result.died)
            if result.degenerate:
                counters.increment("degenerate_evaluations")

        hits = len(pending) - len(todo)
        self.audit.metrics.increment("cache_hits", hits)
        for i in pending:
            pop.members[i] = self.cache[pop.members[i].genome.genes]
        degenerate = sum(1 for i in pending if pop.members[i].degenerate)
        return len(todo), hits, degenerate


@dataclass(frozen=True)
class HistoryRow:
    generation: int
    best: float
    mean: float


@dataclass
class Checkpoint:
    """Everything needed to continue an evolution run."""

    population: Population
    config_digest: str
    history: List[HistoryRow] = field(default_factory=list)
    rng_states: Dict[str, Any] = field(default_factory=dict)
    best: Optional[EvaluatedGenome] = None


@dataclass
class EvolutionResult:
    best: RuleSet
    best_member: EvaluatedGenome
    history: List[HistoryRow]
    population: Population
    audit: EvolutionAuditLogger


def _history_row(pop: Population) -> HistoryRow:
    values = pop.fitnesses()
    return HistoryRow(pop.generation, min(values), math.fsum(values) / len(values))


def _restore_stream(state: Dict[str, Any]) -> np.random.Generator:
    rng = np.random.Generator(np.random.PCG64())
    rng.bit_generator.state = state
    return rng


def evolve(
    cfg: GAConfig,
    progress: Optional[EvolutionAuditLogger] = None,
    *,
    objective: Optional[Objective] = None,
    resume: Optional[Checkpoint] = None,
    checkpoint_path: Optional[Union[str, Path]] = None,
) -> EvolutionResult:
    """
    Run the genetic optimization to generation ``cfg.M``.

    Args:
        cfg: Run configuration (validated here)
        progress: Receives one entry per generation; a fresh
            EvolutionAuditLogger when omitted
        objective: Replaces simulation-based evaluation, e.g. a surrogate
            for tests
        resume: Checkpoint to continue from; its config digest must match
        checkpoint_path: When given, a checkpoint is written after every
            generation

    Returns:
        EvolutionResult with the all-time best decoded rule set and the
        history, one row per generation including generation 0

    Raises:
        ConfigError: If ``cfg`` is invalid
        CheckpointCompatibilityError: If ``resume`` belongs to another config
    """
    cfg.validate()
    audit = progress if progress is not None else EvolutionAuditLogger()
    digest = cfg.digest()
    evaluator = _Evaluator(cfg, objective, audit)

    if resume is not None:
        if resume.config_digest != digest:
            raise CheckpointCompatibilityError(
                "checkpoint was written under a different configuration",
                "config_digest",
                resume.config_digest,
            )
        pop = Population(list(resume.population.members), resume.population.generation)
        history = list(resume.history)
        if MUTATION not in resume.rng_states or CROSSOVER not in resume.rng_states:
            raise CheckpointCompatibilityError("checkpoint holds no random stream state", "rng")
        mutation_rng = _restore_stream(resume.rng_states[MUTATION])
        crossover_rng = _restore_stream(resume.rng_states[CROSSOVER])
        best = resume.best if resume.best is not None else pop.best()
        logger.info("resuming at generation %d", pop.generation)
    else:
        mutation_rng = named_stream(cfg.master_seed, MUTATION)
        crossover_rng = named_stream(cfg.master_seed, CROSSOVER)
        started = time.perf_counter()
        pop = init_population(cfg, mutation_rng)
        evaluations, hits, degenerate = evaluator(pop)
        history = [_history_row(pop)]
        best = pop.best()
        audit.record_generation(
            0,
            history[0].best,
            history[0].mean,
            evaluations,
            hits,
            degenerate,
            (time.perf_counter() - started) * 1000,
        )
        if checkpoint_path is not None:
            _save(pop, digest, checkpoint_path, history, mutation_rng, crossover_rng, best)

    while pop.generation < cfg.M:
        started = time.perf_counter()
        elites = select(pop, cfg.N_s)
        children = mutate(crossover(elites, cfg.N_p, crossover_rng), cfg.r, cfg.sigma, mutation_rng)
        pop = Population(
            list(elites) + [EvaluatedGenome(g) for g in children], pop.generation + 1
        )
        evaluations, hits, degenerate = evaluator(pop)
        row = _history_row(pop)
        history.append(row)
        current = pop.best()
        if current.fitness < best.fitness:  # type: ignore[operator]
            best = current
        audit.record_generation(
            pop.generation,
            row.best,
            row.mean,
            evaluations,
            hits,
            degenerate,
            (time.perf_counter() - started) * 1000,
        )
        if checkpoint_path is not None:
            _save(pop, digest, checkpoint_path, history, mutation_rng, crossover_rng, best)

    return EvolutionResult(decode(best.genome), best, history, pop, audit)


def _save(
    pop: Population,
    digest: str,
    path: Union[str, Path],
    history: List[HistoryRow],
    mutation_rng: np.random.Generator,
    crossover_rng: np.random.Generator,
    best: EvaluatedGenome,
) -> None:
    checkpoint_save(
        pop,
        digest,
        path,
        history=history,
        rng_states={
            MUTATION: mutation_rng.bit_generator.state,
            CROSSOVER: crossover_rng.bit_generator.state,
        },
        best=best,
    )


def _member_to_dict(member: EvaluatedGenome) -> Dict[str, Any]:
    return {
        "genes": list(member.genome.genes),
        "fitness": member.fitness,
        "episodes": member.episodes,
        "seed_base": member.seed_base,
        "degenerate": member.degenerate,
    }


def _member_from_dict(raw: Dict[str, Any]) -> EvaluatedGenome:
    return EvaluatedGenome(
        Genome(tuple(float(g) for g in raw["genes"])),
        None if raw["fitness"] is None else float(raw["fitness"]),
        int(raw["episodes"]),
        int(raw["seed_base"]),
        bool(raw["degenerate"]),
    )


def _canonical(payload: Dict[str, Any]) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def checkpoint_save(
    pop: Population,
    config_digest: str,
    path: Union[str, Path],
    *,
    history: Sequence[HistoryRow] = (),
    rng_states: Optional[Dict[str, Any]] = None,
    best: Optional[EvaluatedGenome] = None,
) -> None:
    """
    Write a checkpoint atomically.

    The file is JSON with a sha256 over its canonical payload; floats are
    stored in their shortest round-trip form so loading is bit-exact.
    """
    payload = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "config_digest": config_digest,
        "generation": pop.generation,
        "members": [_member_to_dict(m) for m in pop.members],
        "history": [[row.generation, row.best, row.mean] for row in history],
        "rng": rng_states or {},
        "best": _member_to_dict(best) if best is not None else None,
    }
    document = dict(payload, sha256=sha256_text(_canonical(payload)))
    atomic_write_text(path, json.dumps(document, indent=1) + "\n")


def read_checkpoint(path: Union[str, Path], expected_digest: Optional[str] = None) -> Checkpoint:
    """
    Load a checkpoint, checking integrity and, if given, the config digest.

    Raises:
        CheckpointIntegrityError: Unreadable, truncated, or tampered file
        CheckpointCompatibilityError: Digest differs from ``expected_digest``
    """
    try:
        document = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CheckpointIntegrityError(f"cannot read checkpoint: {e}", context=str(path)) from e
    if not isinstance(document, dict) or "sha256" not in document:
        raise CheckpointIntegrityError("checkpoint has no integrity hash", context=str(path))

    stored = document.pop("sha256")
    if sha256_text(_canonical(document)) != stored:
        raise CheckpointIntegrityError("checkpoint hash mismatch", context=str(path))
    if document.get("format") != CHECKPOINT_FORMAT or document.get("version") != CHECKPOINT_VERSION:
        raise CheckpointCompatibilityError(
            "unsupported checkpoint format", "version", repr(document.get("version"))
        )
    if expected_digest is not None and document["config_digest"] != expected_digest:
        raise CheckpointCompatibilityError(
            "checkpoint was written under a different configuration",
            "config_digest",
            document["config_digest"],
        )

    try:
        population = Population(
            [_member_from_dict(m) for m in document["members"]], int(document["generation"])
        )
        history = [HistoryRow(int(g), float(b), float(m)) for g, b, m in document["history"]]
        best = _member_from_dict(document["best"]) if document["best"] is not None else None
    except (KeyError, TypeError, ValueError, ConfigError) as e:
        raise CheckpointIntegrityError(f"malformed checkpoint: {e}", context=str(path)) from e
    return Checkpoint(population, document["config_digest"], history, document["rng"], best)


def checkpoint_load(path: Union[str, Path], expected_digest: Optional[str] = None) -> Population:
    """Population stored in a checkpoint; see ``read_checkpoint`` for errors."""
    return read_checkpoint(path, expected_digest).population


def evaluate_ruleset(ruleset: RuleSet, cfg: GAConfig) -> EvaluatedGenome:
    """Evaluate a rule set (e.g. the baseline) exactly as the GA would."""
    return evaluate(encode(ruleset), cfg)


def with_generations(cfg: GAConfig, generations: int) -> GAConfig:
    """Copy of ``cfg`` running to ``generations``; the digest is unchanged."""
    return replace(cfg, M=generations)


__all__ = [
    "CHECKPOINT_VERSION",
    "GENOME_LENGTH",
    "WORST_FITNESS",
    "Checkpoint",
    "EvaluatedGenome",
    "EvolutionResult",
    "Genome",
    "HistoryRow",
    "Objective",
    "Population",
    "checkpoint_load",
    "checkpoint_save",
    "crossover",
    "decode",
    "encode",
    "evaluate",
    "evaluate_ruleset",
    "evolve",
    "init_population",
    "mutate",
    "read_checkpoint",
    "select",
    "splice",
    "with_generations",
]
