"""Almost-sure reachability and cut-off analysis for register protocols.

Identical finite-state processes share one register that they read and
write in separate steps, under a scheduler that picks a successor
configuration uniformly at random.
"""
from .concrete import Verdict, check_almost_sure, check_coverable, exact_reach_probability, explore
from .coverability import Basis, KBound, initial_basis, k_bound, member, pre_image_basis, pre_star_basis
from .dsl import load, parse, serialize
from .errors import RegcutError
from .families import Family, FamilySpec, generate
from .model import (Configuration, Multiset, Op, Order, Protocol, ReadPolicy, Relation, Transition,
                    compare, post_distribution, successors, validate)
from .simulate import SimConfig, SimResult, estimate, monitor_filter_invariant, run_trial
from .symbolic import CutoffVerdict, Sign, SymbolicGraph, SymbolicNode, build, cutoff_bounds, decide_cutoff
from .tight import tight_search

__all__ = [
    "Basis", "Configuration", "CutoffVerdict", "Family", "FamilySpec", "KBound", "Multiset", "Op",
    "Order", "Protocol", "ReadPolicy", "RegcutError", "Relation", "Sign", "SimConfig", "SimResult",
    "SymbolicGraph", "SymbolicNode", "Transition", "Verdict", "build", "check_almost_sure",
    "check_coverable", "compare", "cutoff_bounds", "decide_cutoff", "estimate",
    "exact_reach_probability", "explore", "generate", "initial_basis", "k_bound", "load", "member",
    "monitor_filter_invariant", "parse", "post_distribution", "pre_image_basis", "pre_star_basis",
    "run_trial", "serialize", "successors", "tight_search", "validate",
]
