"""Creatures with nice norms, their operations, derivations and shrinking."""

from .creature import (
    Creature,
    contribution,
    creatures_equal,
    is_valid_creature,
    leaf_creature,
    make_creature,
    restrict_creature,
    validate_creature,
    weight,
)
from .derivation import (
    ConditionFragment,
    Derivation,
    OrderVerdict,
    StarVerdict,
    compose_orders,
    fragment_leq,
    sigma_star_member,
    verify_derivation,
)
from .norms import LogNorm, NiceNorm, TableNorm, random_table_norm, validate_norm
from .ops import build_S_H, glue_S, refines, sigma_member, upper_half
from .pairs import PairCondition, join, pair_leq
from .shrink import shrink_condition, shrink_contract, shrink_creature, shrink_creature_traced

__all__ = [
    "ConditionFragment",
    "Creature",
    "Derivation",
    "LogNorm",
    "NiceNorm",
    "OrderVerdict",
    "PairCondition",
    "StarVerdict",
    "TableNorm",
    "build_S_H",
    "compose_orders",
    "contribution",
    "creatures_equal",
    "fragment_leq",
    "glue_S",
    "is_valid_creature",
    "join",
    "leaf_creature",
    "make_creature",
    "pair_leq",
    "random_table_norm",
    "refines",
    "restrict_creature",
    "shrink_condition",
    "shrink_contract",
    "shrink_creature",
    "shrink_creature_traced",
    "sigma_member",
    "sigma_star_member",
    "upper_half",
    "validate_creature",
    "validate_norm",
    "verify_derivation",
    "weight",
]
