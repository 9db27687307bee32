"""
Rule weights for the generalized flocking velocity update.

A rule is five weights ``a..e`` in (0, 1), one per term of the update law
(repulsion, alignment, attraction, obstacle avoidance, target seeking). A
rule set binds one rule to each sensing context, giving a 20-dimensional
parameter space.
"""

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterator, List, Tuple, Union

from .exceptions import ConfigError, ParseError

WEIGHT_NAMES: Tuple[str, ...] = ("a", "b", "c", "d", "e")
RULE_LENGTH = len(WEIGHT_NAMES)


class Context(Enum):
    """Sensing context of one agent at one step. Order fixes the genome layout."""

    FREE_FLIGHT = "free_flight"
    OBSTACLE_NEAR = "obstacle_near"
    TARGET_NEAR = "target_near"
    OBSTACLE_AND_TARGET = "obstacle_and_target"


CONTEXT_ORDER: Tuple[Context, ...] = tuple(Context)


@dataclass(frozen=True)
class RuleWeights:
    """
    Weights of one rule.

    Attributes:
        a: repulsion weight
        b: alignment weight
        c: attraction weight
        d: obstacle-avoidance weight
        e: target-seeking weight
    """

    a: float
    b: float
    c: float
    d: float
    e: float

    def validate(self) -> None:
        """Check every weight lies strictly inside (0, 1)."""
        for name in WEIGHT_NAMES:
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise ConfigError("weight must lie in the open interval (0,1)", name, repr(value))

    def as_tuple(self) -> Tuple[float, float, float, float, float]:
        return (self.a, self.b, self.c, self.d, self.e)

    def to_dict(self) -> Dict[str, float]:
        return dict(zip(WEIGHT_NAMES, self.as_tuple()))


@dataclass(frozen=True)
class RuleSet:
    """Exactly four rules, indexed by ``Context`` in ``CONTEXT_ORDER``."""

    rules: Tuple[RuleWeights, RuleWeights, RuleWeights, RuleWeights]

    def __post_init__(self) -> None:
        if len(self.rules) != len(CONTEXT_ORDER):
            raise ConfigError(
                f"a rule set holds exactly {len(CONTEXT_ORDER)} rules",
                "rules",
                f"{len(self.rules)} given",
            )

    def for_context(self, context: Context) -> RuleWeights:
        return self.rules[CONTEXT_ORDER.index(context)]

    def __iter__(self) -> Iterator[RuleWeights]:
        return iter(self.rules)

    def validate(self) -> None:
        for i, rule in enumerate(self.rules):
            try:
                rule.validate()
            except ConfigError as e:
                raise ConfigError(
                    "weight must lie in the open interval (0,1)",
                    f"rules[{i}].{e.field_path}",
                    e.context,
                ) from e

    def flatten(self) -> List[float]:
        """The 20 weights, rule by rule in context order."""
        return [w for rule in self.rules for w in rule.as_tuple()]

    def to_dict(self) -> Dict[str, Any]:
        return {"rules": [rule.to_dict() for rule in self.rules]}

    @classmethod
    def uniform(cls, weights: RuleWeights) -> "RuleSet":
        """The same rule applied in every context."""
        return cls((weights, weights, weights, weights))


def baseline_rules() -> RuleSet:
    """Context-independent midpoint weights used as the comparison baseline."""
    return RuleSet.uniform(RuleWeights(0.5, 0.5, 0.5, 0.5, 0.5))


BUILTIN_RULES = {"baseline": baseline_rules}


def rules_from_dict(document: Any) -> RuleSet:
    """
    Build a validated RuleSet from a parsed JSON document.

    Raises:
        ParseError: If keys are missing or values are not numbers
        ConfigError: If a weight is outside (0, 1)
    """
    if not isinstance(document, dict) or "rules" not in document:
        raise ParseError("expected an object with key 'rules'", "rules")
    raw_rules = document["rules"]
    if not isinstance(raw_rules, list) or len(raw_rules) != len(CONTEXT_ORDER):
        raise ParseError(f"expected an array of {len(CONTEXT_ORDER)} rule objects", "rules")

    rules = []
    for i, raw in enumerate(raw_rules):
        if not isinstance(raw, dict):
            raise ParseError("expected an object", f"rules[{i}]")
        values = []
        for name in WEIGHT_NAMES:
            path = f"rules[{i}].{name}"
            if name not in raw:
                raise ParseError("missing weight", path)
            value = raw[name]
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ParseError("weight must be a number", path, repr(value))
            values.append(float(value))
        rules.append(RuleWeights(*values))

    ruleset = RuleSet(tuple(rules))  # type: ignore[arg-type]
    ruleset.validate()
    return ruleset


def load_rules(source: Union[str, Path]) -> RuleSet:
    """Load a rule set from a JSON file, or a builtin name such as ``baseline``."""
    if isinstance(source, str) and source in BUILTIN_RULES:
        return BUILTIN_RULES[source]()
    path = Path(source)
    if not path.exists():
        raise ConfigError("rules file not found", "rules", str(path))
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e}", "rules", str(path)) from e
    return rules_from_dict(document)


def rules_to_json(ruleset: RuleSet) -> str:
    return json.dumps(ruleset.to_dict(), indent=2) + "\n"


__all__ = [
    "BUILTIN_RULES",
    "CONTEXT_ORDER",
    "RULE_LENGTH",
    "WEIGHT_NAMES",
    "Context",
    "RuleSet",
    "RuleWeights",
    "baseline_rules",
    "load_rules",
    "rules_from_dict",
    "rules_to_json",
]
