"""Tests for the genetic optimizer: codec, operators, evolution, checkpoints."""

import json

import numpy as np
import pytest

from gflock.config import GENE_CEIL, GENE_FLOOR, GAConfig
from gflock.exceptions import (
    CheckpointCompatibilityError,
    CheckpointIntegrityError,
    ConfigError,
    ContractError,
    DegenerateInputError,
)
from gflock.genetic import (
    GENOME_LENGTH,
    WORST_FITNESS,
    EvaluatedGenome,
    Genome,
    Population,
    checkpoint_load,
    checkpoint_save,
    crossover,
    decode,
    encode,
    evaluate,
    evaluate_ruleset,
    evolve,
    init_population,
    mutate,
    read_checkpoint,
    select,
    splice,
    with_generations,
)
from gflock.rules import RuleSet, RuleWeights, baseline_rules
from gflock.scenario import open_field


def flat(value):
    return Genome((value,) * GENOME_LENGTH)


def bowl(genome):
    """Surrogate objective with its minimum at every gene = 0.3."""
    return float(sum((g - 0.3) ** 2 for g in genome.genes))


@pytest.fixture
def cfg():
    return GAConfig(
        scenario=open_field().with_overrides(n_agents=3, max_steps=25),
        M=4,
        N_p=8,
        N_s=2,
        r=0.2,
        sigma=0.1,
        episodes_per_eval=1,
        master_seed=11,
    )


class TestCodec:
    def test_round_trip(self):
        ruleset = RuleSet(
            tuple(RuleWeights(0.1 * k + 0.01, 0.2, 0.3, 0.4, 0.5) for k in range(4))
        )
        assert decode(encode(ruleset)) == ruleset
        assert encode(decode(flat(0.42))) == flat(0.42)

    def test_layout_is_rule_by_rule(self):
        genome = Genome(tuple(float(i + 1) / 100 for i in range(GENOME_LENGTH)))
        ruleset = decode(genome)
        assert ruleset.rules[0].a == 0.01
        assert ruleset.rules[1].a == 0.06
        assert ruleset.rules[3].e == 0.2

    def test_wrong_length(self):
        with pytest.raises(ConfigError):
            Genome((0.5,) * 19)

    def test_out_of_bounds_gene(self):
        with pytest.raises(ConfigError):
            flat(0.0)
        with pytest.raises(ConfigError):
            encode(RuleSet.uniform(RuleWeights(0.5, 0.5, 1.0, 0.5, 0.5)))


class TestSelection:
    def test_lowest_fitness_with_index_tie_break(self):
        members = [EvaluatedGenome(flat(0.1 * (i + 1)), f) for i, f in enumerate([3.0, 1.0, 2.0, 1.0])]
        chosen = select(Population(members), 2)
        assert chosen == [members[1], members[3]]

    def test_pending_fitness_rejected(self):
        with pytest.raises(ContractError):
            select(Population([EvaluatedGenome(flat(0.5))]), 1)

    def test_too_many_requested(self):
        with pytest.raises(ContractError):
            select(Population([EvaluatedGenome(flat(0.5), 1.0)]), 2)


class TestCrossover:
    def test_splice(self):
        child = splice(flat(0.1), flat(0.9), 5)
        assert child.genes == (0.1,) * 5 + (0.9,) * 15

    @pytest.mark.parametrize("cut", [0, GENOME_LENGTH])
    def test_cut_must_split(self, cut):
        with pytest.raises(ContractError):
            splice(flat(0.1), flat(0.9), cut)

    def test_children_are_splices_of_seeds(self):
        seeds = [EvaluatedGenome(flat(0.1), 1.0), EvaluatedGenome(flat(0.9), 2.0)]
        children = crossover(seeds, 10, np.random.default_rng(4))
        assert len(children) == 8
        for child in children:
            head = child.genes[0]
            cut = next((i for i, g in enumerate(child.genes) if g != head), GENOME_LENGTH)
            assert head in (0.1, 0.9)
            assert all(g in (0.1, 0.9) for g in child.genes[cut:])
            assert len(set(child.genes[cut:])) <= 1

    def test_deterministic_for_same_stream(self):
        seeds = [EvaluatedGenome(flat(0.1), 1.0), EvaluatedGenome(flat(0.9), 2.0)]
        first = crossover(seeds, 6, np.random.default_rng(8))
        second = crossover(seeds, 6, np.random.default_rng(8))
        assert first == second


class TestMutation:
    def test_zero_rate_keeps_genes_but_advances_stream(self):
        genomes = [flat(0.5), flat(0.25)]
        quiet, loud = np.random.default_rng(3), np.random.default_rng(3)
        assert mutate(genomes, 0.0, 0.1, quiet) == genomes
        mutate(genomes, 1.0, 0.1, loud)
        assert quiet.random() == loud.random()

    def test_clamped_to_gene_bounds(self):
        out = mutate([flat(GENE_CEIL), flat(GENE_FLOOR)], 1.0, 5.0, np.random.default_rng(0))
        for genome in out:
            assert all(GENE_FLOOR <= g <= GENE_CEIL for g in genome.genes)

    def test_invalid_parameters(self):
        rng = np.random.default_rng(0)
        with pytest.raises(ContractError):
            mutate([flat(0.5)], 1.5, 0.1, rng)
        with pytest.raises(ContractError):
            mutate([flat(0.5)], 0.5, 0.0, rng)


class TestInitPopulation:
    def test_size_and_bounds(self, cfg):
        pop = init_population(cfg)
        assert len(pop.members) == cfg.N_p
        assert pop.generation == 0
        assert all(m.pending for m in pop.members)

    def test_expert_seed_replaces_member_zero_only(self, cfg):
        from dataclasses import replace

        plain = init_population(cfg)
        seeded = init_population(replace(cfg, expert_rules=baseline_rules()))
        assert seeded.members[0].genome == encode(baseline_rules())
        assert seeded.members[1:] == plain.members[1:]


class TestEvaluate:
    def test_simulated_fitness(self, cfg):
        result = evaluate(encode(baseline_rules()), cfg)
        assert result.fitness is not None and result.fitness > 0
        assert result.episodes == 1
        assert result.seed_base == cfg.master_seed
        assert not result.degenerate
        assert evaluate_ruleset(baseline_rules(), cfg) == result

    def test_degenerate_episode_absorbed_as_worst(self, cfg, monkeypatch):
        def broken(log, fitness_cfg):
            raise DegenerateInputError("no surviving agents")

        monkeypatch.setattr("gflock.genetic.fitness", broken)
        result = evaluate(encode(baseline_rules()), cfg)
        assert result.fitness == WORST_FITNESS
        assert result.degenerate

    def test_non_finite_fitness_absorbed_as_worst(self, cfg, monkeypatch):
        monkeypatch.setattr("gflock.genetic.fitness", lambda log, fitness_cfg: float("nan"))
        result = evaluate(encode(baseline_rules()), cfg)
        assert result.fitness == WORST_FITNESS
        assert result.degenerate


class TestEvolve:
    def test_history_and_elitism(self, cfg):
        result = evolve(cfg, objective=bowl)
        assert [row.generation for row in result.history] == list(range(cfg.M + 1))
        bests = [row.best for row in result.history]
        assert all(later <= earlier for earlier, later in zip(bests, bests[1:]))
        assert result.best_member.fitness == min(bests)
        assert result.best == decode(result.best_member.genome)
        assert len(result.population.members) == cfg.N_p
        assert len(result.audit.get_entries()) == cfg.M + 1

    def test_deterministic(self, cfg):
        first = evolve(cfg, objective=bowl)
        second = evolve(cfg, objective=bowl)
        assert first.history == second.history
        assert first.population.members == second.population.members

    def test_identical_genomes_evaluated_once(self, cfg):
        from dataclasses import replace

        calls = []

        def counting(genome):
            calls.append(genome)
            return bowl(genome)

        # one elite and no mutation: every child is a copy of the elite
        result = evolve(replace(cfg, N_s=1, r=0.0), objective=counting)
        assert len(calls) == cfg.N_p
        assert result.audit.metrics.counters["cache_hits"] == cfg.M * (cfg.N_p - 1)

    def test_invalid_config_rejected(self, cfg):
        from dataclasses import replace

        with pytest.raises(ConfigError):
            evolve(replace(cfg, N_s=cfg.N_p), objective=bowl)

    def test_simulated_run(self, cfg):
        from dataclasses import replace

        result = evolve(replace(cfg, M=1, N_p=4, N_s=1))
        assert len(result.history) == 2
        assert result.audit.metrics.counters["episodes_run"] >= 4

    @pytest.mark.slow
    def test_worker_pool_matches_in_process(self, cfg):
        from dataclasses import replace

        small = replace(cfg, M=1, N_p=4, N_s=1)
        serial = evolve(small)
        pooled = evolve(replace(small, workers=2))
        assert serial.history == pooled.history


class TestCheckpoint:
    def test_written_every_generation(self, cfg, tmp_path):
        path = tmp_path / "run" / "checkpoint.json"
        result = evolve(cfg, objective=bowl, checkpoint_path=path)
        checkpoint = read_checkpoint(path, expected_digest=cfg.digest())
        assert checkpoint.population.generation == cfg.M
        assert checkpoint.population.members == result.population.members
        assert checkpoint.history == result.history
        assert checkpoint.best == result.best_member
        assert checkpoint_load(path) == checkpoint.population

    def test_resume_matches_uninterrupted_run(self, cfg, tmp_path):
        path = tmp_path / "checkpoint.json"
        full = evolve(cfg, objective=bowl)
        evolve(with_generations(cfg, 2), objective=bowl, checkpoint_path=path)
        resumed = evolve(cfg, objective=bowl, resume=read_checkpoint(path))
        assert resumed.history == full.history
        assert resumed.population.members == full.population.members
        assert resumed.best_member == full.best_member

    def test_digest_ignores_generation_count(self, cfg):
        assert with_generations(cfg, 99).digest() == cfg.digest()

    def test_resume_under_other_config(self, cfg, tmp_path):
        from dataclasses import replace

        path = tmp_path / "checkpoint.json"
        evolve(with_generations(cfg, 1), objective=bowl, checkpoint_path=path)
        other = replace(cfg, sigma=0.3)
        with pytest.raises(CheckpointCompatibilityError):
            read_checkpoint(path, expected_digest=other.digest())
        with pytest.raises(CheckpointCompatibilityError):
            evolve(other, objective=bowl, resume=read_checkpoint(path))

    def test_truncated_file(self, cfg, tmp_path):
        path = tmp_path / "checkpoint.json"
        evolve(with_generations(cfg, 0), objective=bowl, checkpoint_path=path)
        text = path.read_text(encoding="utf-8")
        path.write_text(text[: len(text) // 2], encoding="utf-8")
        with pytest.raises(CheckpointIntegrityError):
            read_checkpoint(path)

    def test_tampered_file(self, cfg, tmp_path):
        path = tmp_path / "checkpoint.json"
        evolve(with_generations(cfg, 0), objective=bowl, checkpoint_path=path)
        document = json.loads(path.read_text(encoding="utf-8"))
        document["members"][0]["fitness"] = 0.0
        path.write_text(json.dumps(document), encoding="utf-8")
        with pytest.raises(CheckpointIntegrityError):
            read_checkpoint(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(CheckpointIntegrityError):
            read_checkpoint(tmp_path / "absent.json")

    def test_save_and_load_pending_members(self, tmp_path):
        pop = Population([EvaluatedGenome(flat(0.5)), EvaluatedGenome(flat(0.7), 2.5, 3, 9)], 4)
        path = tmp_path / "checkpoint.json"
        checkpoint_save(pop, "abc", path)
        loaded = checkpoint_load(path, expected_digest="abc")
        assert loaded == pop
