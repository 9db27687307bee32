"""
Experiment presets: swarm sizes and optimization budgets.

Presets make the common experiment shapes explicit at the point of use and
keep every knob overridable.
"""

from dataclasses import replace
from enum import Enum
from typing import TYPE_CHECKING, Optional

from .config import FitnessConfig, GAConfig

if TYPE_CHECKING:
    from .rules import RuleSet
    from .scenario import Scenario


class SwarmScale(Enum):
    """
    The three swarm sizes every comparison is run at.

    Examples:
        >>> [s.value for s in SwarmScale]
        [20, 60, 100]
    """

    SMALL = 20
    MEDIUM = 60
    LARGE = 100


class OptimizationBudget(Enum):
    """
    How much compute an optimization run may spend.

    Examples:
        >>> cfg = get_ga_config(OptimizationBudget.SMOKE, scenario)
        >>> cfg.M, cfg.N_p
        (2, 4)
    """

    SMOKE = "smoke"
    """
    Use for: CI, quick sanity checks of the whole pipeline.

    Two generations of four members, one episode each. Finishes in seconds
    on a small scenario; the result carries no optimization value.
    """

    DESK = "desk"
    """
    Use for: real optimization runs on a desktop.

    30 generations of 20 members, 4 elites, mutation rate 0.1 with sigma 0.1,
    three episodes per evaluation.
    """


def get_ga_config(
    budget: OptimizationBudget,
    scenario: "Scenario",
    # Allow overrides
    M: Optional[int] = None,  # noqa: N803
    N_p: Optional[int] = None,  # noqa: N803
    N_s: Optional[int] = None,  # noqa: N803
    r: Optional[float] = None,
    sigma: Optional[float] = None,
    episodes_per_eval: Optional[int] = None,
    master_seed: Optional[int] = None,
    expert_rules: Optional["RuleSet"] = None,
    fitness: Optional[FitnessConfig] = None,
    workers: Optional[int] = None,
) -> GAConfig:
    """
    GA configuration for a budget, with any field overridden.

    Args:
        budget: Compute budget preset
        scenario: Scenario every evaluation runs on
        M..workers: Overrides of the preset's values

    Returns:
        A validated GAConfig

    Examples:
        >>> cfg = get_ga_config(OptimizationBudget.DESK, scenario)
        >>> cfg.N_s
        4
        >>> get_ga_config(OptimizationBudget.DESK, scenario, M=5).M
        5
    """
    if budget is OptimizationBudget.SMOKE:
        defaults = GAConfig(scenario=scenario, M=2, N_p=4, N_s=1, episodes_per_eval=1)
    else:  # DESK
        defaults = GAConfig(scenario=scenario)

    overrides = {
        name: value
        for name, value in (
            ("M", M),
            ("N_p", N_p),
            ("N_s", N_s),
            ("r", r),
            ("sigma", sigma),
            ("episodes_per_eval", episodes_per_eval),
            ("master_seed", master_seed),
            ("expert_rules", expert_rules),
            ("fitness", fitness),
            ("workers", workers),
        )
        if value is not None
    }
    config = replace(defaults, **overrides)
    config.validate()
    return config


__all__ = ["OptimizationBudget", "SwarmScale", "get_ga_config"]
