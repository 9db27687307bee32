"""Configuration classes for the gflock simulator, metrics, and optimizer."""

import hashlib
import json
from dataclasses import dataclass
from enum import Enum, Flag, auto
from typing import TYPE_CHECKING, Any, Dict, Optional

from .exceptions import ConfigError

if TYPE_CHECKING:
    from .rules import RuleSet
    from .scenario import Scenario


GENE_FLOOR = 1e-6
GENE_CEIL = 1.0 - 1e-6


class SimFlags(Flag):
    """Optional simulator behaviour."""

    NONE = 0
    VELOCITY_NOISE = auto()


@dataclass(frozen=True)
class ZoneConfig:
    """
    Radii of the concentric sensing zones around an agent.

    ``[0, R0)`` repulsion, ``[R0, R1)`` alignment, ``[R1, R2)`` attraction;
    obstacles closer than ``R3`` are sensed.
    """

    R0: float  # noqa: N815
    R1: float  # noqa: N815
    R2: float  # noqa: N815
    R3: float  # noqa: N815

    def validate(self) -> None:
        if not 0.0 < self.R0 < self.R1 < self.R2:
            raise ConfigError(
                "zone radii must satisfy 0 < R0 < R1 < R2",
                "zones",
                f"R0={self.R0}, R1={self.R1}, R2={self.R2}",
            )
        if not self.R3 > 0.0:
            raise ConfigError("obstacle radius must satisfy R3 > 0", "zones.R3", repr(self.R3))

    def to_dict(self) -> Dict[str, float]:
        return {"R0": self.R0, "R1": self.R1, "R2": self.R2, "R3": self.R3}


class FitnessVariant(Enum):
    """Which form of the composite fitness to compute."""

    LITERAL = "literal"
    """The printed five-factor product. Collapses to 0 whenever nobody dies."""

    ROBUST = "robust"
    """Each factor smoothed by epsilon; stability uses the gamma variance. Used by the GA."""


@dataclass(frozen=True)
class FitnessConfig:
    """
    Fitness scaling and smoothing.

    Attributes:
        alpha: Global scale of the product
        epsilon: Additive smoothing of each factor in the robust variant
        variant: Literal or robust form
    """

    alpha: float = 1.0
    epsilon: float = 1e-3
    variant: FitnessVariant = FitnessVariant.ROBUST

    def validate(self) -> None:
        if not self.alpha > 0:
            raise ConfigError("alpha must be > 0", "fitness.alpha", repr(self.alpha))
        if not self.epsilon > 0:
            raise ConfigError("epsilon must be > 0", "fitness.epsilon", repr(self.epsilon))


@dataclass
class GAConfig:
    """
    Configuration of one optimization run.

    Attributes:
        M: Number of generations after the initial one
        N_p: Population size
        N_s: Elites kept by truncation selection (seeds of the next generation)
        r: Per-gene mutation probability
        sigma: Standard deviation of the Gaussian mutation step
        episodes_per_eval: Episodes averaged per fitness evaluation
        scenario: Scenario every evaluation runs on
        master_seed: Root of every random stream of the run
        expert_rules: Optional rule set seeded as member 0 of the initial population
        fitness: Fitness configuration (the GA always minimizes)
        workers: Worker processes for evaluation; 1 evaluates in-process
    """

    scenario: "Scenario"
    M: int = 30  # noqa: N815
    N_p: int = 20  # noqa: N815
    N_s: int = 4  # noqa: N815
    r: float = 0.1
    sigma: float = 0.1
    episodes_per_eval: int = 3
    master_seed: int = 0
    expert_rules: Optional["RuleSet"] = None
    fitness: FitnessConfig = FitnessConfig()
    workers: int = 1

    def validate(self) -> None:
        if not 1 <= self.N_s < self.N_p:
            raise ConfigError(
                "elites must satisfy 1 <= N_s < N_p", "ga.N_s", f"N_s={self.N_s}, N_p={self.N_p}"
            )
        if self.M < 0:
            raise ConfigError("generation count must be >= 0", "ga.M", repr(self.M))
        if self.episodes_per_eval < 1:
            raise ConfigError(
                "episodes_per_eval must be >= 1", "ga.episodes_per_eval", repr(self.episodes_per_eval)
            )
        if not 0.0 <= self.r <= 1.0:
            raise ConfigError("mutation rate must lie in [0,1]", "ga.r", repr(self.r))
        if not self.sigma > 0:
            raise ConfigError("sigma must be > 0", "ga.sigma", repr(self.sigma))
        if self.workers < 1:
            raise ConfigError("workers must be >= 1", "ga.workers", repr(self.workers))
        self.fitness.validate()
        if self.expert_rules is not None:
            self.expert_rules.validate()

    def digest(self) -> str:
        """
        Hash of everything that determines the run's trajectory.

        The generation count is left out so a finished run can be extended
        from its checkpoint.
        """
        payload: Dict[str, Any] = {
            "N_p": self.N_p,
            "N_s": self.N_s,
            "r": self.r,
            "sigma": self.sigma,
            "episodes_per_eval": self.episodes_per_eval,
            "master_seed": self.master_seed,
            "expert_rules": self.expert_rules.to_dict() if self.expert_rules else None,
            "fitness": {
                "alpha": self.fitness.alpha,
                "epsilon": self.fitness.epsilon,
                "variant": self.fitness.variant.value,
            },
            "scenario": self.scenario.to_dict(),
        }
        canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


__all__ = [
    "GENE_CEIL",
    "GENE_FLOOR",
    "FitnessConfig",
    "FitnessVariant",
    "GAConfig",
    "SimFlags",
    "ZoneConfig",
]
