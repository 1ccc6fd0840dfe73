"""Flows and superflows of classical-deterministic causal models."""

from .correlations import DeterministicCorrelation, is_causal_deterministic, validate_theorem3
from .digraph import Digraph, canonical_form, has_chordal_cycle, is_soc, simple_cycles
from .errors import CausalFlowError, ParseError
from .flow import FlowGraph, all_leaves_trivial, build_flow, leaves
from .model import (
    CausalModel,
    SpaceSpec,
    contract,
    derive_causal_structure,
    echo_intervention,
    enumerate_models,
    is_consistent,
    is_faithful,
    reduce,
)
from .superflow import build_superflow, certify_causal_only, is_superflow_of

__all__ = [
    "CausalFlowError",
    "CausalModel",
    "DeterministicCorrelation",
    "Digraph",
    "FlowGraph",
    "ParseError",
    "SpaceSpec",
    "all_leaves_trivial",
    "build_flow",
    "build_superflow",
    "canonical_form",
    "certify_causal_only",
    "contract",
    "derive_causal_structure",
    "echo_intervention",
    "enumerate_models",
    "has_chordal_cycle",
    "is_causal_deterministic",
    "is_consistent",
    "is_faithful",
    "is_soc",
    "is_superflow_of",
    "leaves",
    "reduce",
    "simple_cycles",
    "validate_theorem3",
]
