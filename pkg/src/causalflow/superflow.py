"""Model-parameter agnostic superflow of a causal structure.

Reducing a source can only change the tables of its children, so the
possible successors of a leaf after removing source ``s`` are obtained by
deleting any subset of the edges that point into children of ``s``. Only the
siblings-on-cycles candidates are kept, since no faithful consistent model
lives on any other structure.
"""

from __future__ import annotations

import itertools
import logging
import warnings

from . import digraph as dg
from .digraph import Digraph
from .errors import CausalFlowError
from .flow import FlowGraph, all_leaves_trivial, nontrivial_leaves_with_source

log = logging.getLogger(__name__)


class NonSOCRootWarning(UserWarning):
    pass


def removable_edges(leaf: Digraph, s: str) -> list:
    """Edges of ``leaf - s`` pointing into a child of ``s``."""
    reduced = dg.remove_vertex(leaf, s)
    out = []
    for k in dg.sorted_children(leaf, s):
        for v in dg.sorted_parents(reduced, k):
            out.append((v, k))
    return sorted(out)


def edge_subsets(edges):
    """All subsets, by ascending size then lexicographically."""
    for r in range(len(edges) + 1):
        yield from itertools.combinations(edges, r)


def build_superflow(d: Digraph, annotate_removed=False) -> FlowGraph:
    """Superflow of ``d``.

    Edges are annotated with the name of the removed source; with
    ``annotate_removed`` the annotation also carries the removed edge set.
    """
    root_soc = dg.is_soc(d)
    if not root_soc:
        warnings.warn(
            f"root {d.label()} is not a siblings-on-cycles graph; no faithful consistent model has this structure",
            NonSOCRootWarning,
            stacklevel=2,
        )
    soc_cache: dict[Digraph, bool] = {}

    def soc(g):
        hit = soc_cache.get(g)
        if hit is None:
            hit = soc_cache[g] = dg.is_soc(g)
        return hit

    sf = FlowGraph(d)
    expanded = set()
    pending = nontrivial_leaves_with_source(sf)
    while pending:
        for leaf in pending:
            expanded.add(leaf)
            for s in dg.sorted_sources(leaf):
                reduced = dg.remove_vertex(leaf, s)
                for removed in edge_subsets(removable_edges(leaf, s)):
                    cand = dg.remove_edges(reduced, removed)
                    if soc(cand):
                        label = (s, frozenset(removed)) if annotate_removed else s
                        sf.add_edge(leaf, cand, label)
            if sf.is_leaf(leaf) and root_soc:
                log.warning("leaf %s gained no successor", leaf.label())
        pending = nontrivial_leaves_with_source(sf, exclude=expanded)
    return sf


def is_superflow_of(s: FlowGraph, f: FlowGraph) -> bool:
    if s.root != f.root:
        raise CausalFlowError(f"root mismatch: {s.root.label()} vs {f.root.label()}")
    return f.nodes <= s.nodes and f.edges <= s.edges


def certify_causal_only(d: Digraph) -> bool:
    """True certifies that every faithful consistent model on ``d`` gives causal correlations."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonSOCRootWarning)
        return all_leaves_trivial(build_superflow(d))
