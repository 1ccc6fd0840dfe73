"""Flow graphs and their model-parameter aware construction.

The flow of a causal model is built by repeatedly intervening at source
vertices: each nontrivial leaf that has a source is reduced at every source
and every output value of that source. Afterwards model parameters are
discarded, so models sharing a structure collapse into one node.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Generic, Hashable, Iterable, Optional, TypeVar

from . import digraph as dg
from .digraph import Digraph
from .errors import InconsistentModelError, UnfaithfulModelError
from .model import CausalModel, is_consistent, is_faithful, reduce

N = TypeVar("N", bound=Hashable)


def structure_of(node) -> Digraph:
    return node if isinstance(node, Digraph) else node.structure


def _node_key(node):
    d = structure_of(node)
    if isinstance(node, CausalModel):
        return d.sort_key() + (tuple((v, t.values) for v, t in node.params),)
    return d.sort_key()


class FlowGraph(Generic[N]):
    """Rooted directed graph whose nodes are digraphs (or causal models).

    Edges are deduplicated; every label passed to :meth:`add_edge` for the same
    edge is kept in a set of annotations.
    """

    def __init__(self, root: N):
        self.root = root
        self._succ: dict[N, set] = {root: set()}
        self._pred: dict[N, set] = {root: set()}
        self.annotations: dict[tuple[N, N], set] = defaultdict(set)

    def add_node(self, node: N):
        if node not in self._succ:
            self._succ[node] = set()
            self._pred[node] = set()

    def add_edge(self, u: N, v: N, label: Optional[Hashable] = None):
        self.add_node(u)
        self.add_node(v)
        self._succ[u].add(v)
        self._pred[v].add(u)
        if label is not None:
            self.annotations[(u, v)].add(label)

    @property
    def nodes(self) -> set:
        return set(self._succ)

    @property
    def edges(self) -> set:
        return {(u, v) for u, vs in self._succ.items() for v in vs}

    def successors(self, node) -> list:
        return sorted(self._succ[node], key=_node_key)

    def predecessors(self, node) -> list:
        return sorted(self._pred[node], key=_node_key)

    def is_leaf(self, node) -> bool:
        return not self._succ[node]

    def sorted_nodes(self) -> list:
        """Nodes in deterministic order (larger vertex sets first)."""
        return sorted(self._succ, key=_node_key)

    def sorted_edges(self) -> list:
        ids = {n: k for k, n in enumerate(self.sorted_nodes())}
        return sorted(self.edges, key=lambda e: (ids[e[0]], ids[e[1]]))

    def node_ids(self) -> dict:
        return {n: k for k, n in enumerate(self.sorted_nodes())}

    def layers(self) -> dict[int, list]:
        """Nodes grouped by vertex count."""
        out = defaultdict(list)
        for n in self.sorted_nodes():
            out[len(structure_of(n).vertices)].append(n)
        return dict(out)

    def layer_sizes(self) -> tuple[int, ...]:
        layers = self.layers()
        return tuple(len(layers[k]) for k in sorted(layers, reverse=True))

    def __len__(self):
        return len(self._succ)

    def __contains__(self, node):
        return node in self._succ

    def __repr__(self):
        return f"FlowGraph(nodes={len(self)}, edges={len(self.edges)})"

    def map_nodes(self, fn) -> "FlowGraph":
        """Image of this graph under ``fn``; nodes with equal images merge."""
        out = FlowGraph(fn(self.root))
        for n in self._succ:
            out.add_node(fn(n))
        for (u, v) in self.edges:
            fu, fv = fn(u), fn(v)
            out.add_edge(fu, fv)
            out.annotations[(fu, fv)] |= self.annotations.get((u, v), set())
        return out


#: flow whose nodes still carry their model parameters
AnnotatedFlow = FlowGraph


def nontrivial_leaves_with_source(g: FlowGraph, exclude: Iterable = ()) -> list:
    """Leaves with at least two vertices and at least one source vertex."""
    exclude = set(exclude)
    out = []
    for n in g.sorted_nodes():
        if n in exclude or not g.is_leaf(n):
            continue
        d = structure_of(n)
        if len(d.vertices) >= 2 and dg.sources(d):
            out.append(n)
    return out


def leaves(f: FlowGraph) -> list:
    return [n for n in f.sorted_nodes() if f.is_leaf(n)]


def all_leaves_trivial(f: FlowGraph) -> bool:
    return all(dg.is_trivial(structure_of(n)) for n in leaves(f))


def nontrivial_leaves(f: FlowGraph) -> list:
    return [n for n in leaves(f) if not dg.is_trivial(structure_of(n))]


def build_annotated_flow(m: CausalModel, check=True) -> FlowGraph:
    """Iterated source reduction keeping the model parameters on every node.

    Edge annotations are ``(source, output value)`` pairs.
    """
    if check:
        faith = is_faithful(m)
        if not faith:
            p, v = faith.failing[0]
            raise UnfaithfulModelError(f"edge {p} -> {v} carries no signaling", edge=(p, v))
        cons = is_consistent(m)
        if not cons:
            raise InconsistentModelError(
                f"model is inconsistent: function family {cons.family} has "
                f"{len(cons.fixed_points)} fixed points",
                witness=cons.family,
            )
    g = FlowGraph(m)
    pending = nontrivial_leaves_with_source(g)
    while pending:
        for leaf in pending:
            for s in dg.sorted_sources(leaf.structure):
                for o in range(leaf.spaces.out_card(s)):
                    g.add_edge(leaf, reduce(leaf, s, o), (s, o))
        pending = nontrivial_leaves_with_source(g)
    return g


def remove_model_parameters(g: FlowGraph) -> FlowGraph:
    return g.map_nodes(structure_of)


def build_flow(m: CausalModel, check=True) -> FlowGraph:
    """Flow of a faithful, consistent causal model; nodes are digraphs."""
    return remove_model_parameters(build_annotated_flow(m, check=check))
