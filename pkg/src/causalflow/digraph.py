"""Labeled simple digraphs and the structural predicates used by the flow algorithms.

A :class:`Digraph` is immutable and hashable. Vertices are kept in
lexicographic order and edges in lexicographic order of ``(tail, head)``, so
two digraphs compare equal exactly when their vertex and edge sets agree, and
every textual rendering is byte-stable.
"""

from __future__ import annotations

import itertools
import re
from typing import Iterable, Iterator, Optional

from .errors import CausalFlowError, UnknownVertexError

_NAME = re.compile(r"^[A-Za-z0-9_]+$")

Edge = tuple[str, str]
Cycle = tuple[str, ...]


class Digraph:
    """Directed graph without self-loops or parallel edges."""

    __slots__ = ("_vertices", "_edges", "_eset", "_parents", "_children", "_hash")

    def __init__(self, vertices: Iterable[str] = (), edges: Iterable[Edge] = ()):
        vs = list(vertices)
        vset = set(vs)
        if len(vset) != len(vs):
            dup = sorted(v for v in vset if vs.count(v) > 1)
            raise CausalFlowError(f"duplicate vertices: {' '.join(dup)}")
        for v in vs:
            if not isinstance(v, str) or not _NAME.match(v):
                raise CausalFlowError(f"invalid vertex name {v!r}")
        es = set()
        for u, v in edges:
            if u not in vset:
                raise UnknownVertexError(u)
            if v not in vset:
                raise UnknownVertexError(v)
            if u == v:
                raise CausalFlowError(f"self-loop {u} -> {u} is not allowed")
            es.add((u, v))
        self._vertices = tuple(sorted(vset))
        self._edges = tuple(sorted(es))
        self._eset = frozenset(es)
        parents = {v: [] for v in self._vertices}
        children = {v: [] for v in self._vertices}
        for u, v in self._edges:
            children[u].append(v)
            parents[v].append(u)
        self._parents = {v: tuple(sorted(p)) for v, p in parents.items()}
        self._children = {v: tuple(sorted(c)) for v, c in children.items()}
        self._hash = hash((self._vertices, self._edges))

    @property
    def vertices(self) -> tuple[str, ...]:
        return self._vertices

    @property
    def edges(self) -> tuple[Edge, ...]:
        return self._edges

    def __len__(self):
        return len(self._vertices)

    def __contains__(self, v):
        return v in self._parents

    def __eq__(self, other):
        if not isinstance(other, Digraph):
            return NotImplemented
        return self._vertices == other._vertices and self._edges == other._edges

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def sort_key(self):
        """Ordering used for deterministic output: larger graphs first."""
        return (-len(self._vertices), self._vertices, len(self._edges), self._edges)

    def __repr__(self):
        return f"Digraph({list(self._vertices)!r}, {list(self._edges)!r})"

    def edge_label(self) -> str:
        """Compact canonical edge list, e.g. ``"A>B;B>A"``; ``"-"`` when edgeless."""
        if not self._edges:
            return "-"
        return ";".join(f"{u}>{v}" for u, v in self._edges)

    def label(self) -> str:
        return f"{{{','.join(self._vertices)}}} {self.edge_label()}"

    def has_edge(self, u, v) -> bool:
        return (u, v) in self._eset

    def _check(self, v):
        if v not in self._parents:
            raise UnknownVertexError(v)


def parents(d: Digraph, v: str) -> frozenset[str]:
    d._check(v)
    return frozenset(d._parents[v])


def children(d: Digraph, v: str) -> frozenset[str]:
    d._check(v)
    return frozenset(d._children[v])


def sorted_parents(d: Digraph, v: str) -> tuple[str, ...]:
    """Parents of ``v`` in canonical (lexicographic) order."""
    d._check(v)
    return d._parents[v]


def sorted_children(d: Digraph, v: str) -> tuple[str, ...]:
    d._check(v)
    return d._children[v]


def sources(d: Digraph) -> frozenset[str]:
    return frozenset(v for v in d.vertices if not d._parents[v])


def sorted_sources(d: Digraph) -> tuple[str, ...]:
    return tuple(v for v in d.vertices if not d._parents[v])


def is_trivial(d: Digraph) -> bool:
    return len(d.vertices) == 1


def simple_cycles(d: Digraph) -> list[Cycle]:
    """All directed simple cycles of ``d``.

    Each cycle is rotated so that its lexicographically least vertex comes
    first. Cycles are found by growing paths from each start vertex through
    strictly larger vertices only, which yields every cycle exactly once in
    that normalized rotation.
    """
    out = []
    succ = d._children
    for start in d.vertices:
        stack = [(start, iter(succ[start]))]
        path = [start]
        on_path = {start}
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                stack.pop()
                on_path.discard(path.pop())
                continue
            if nxt == start:
                out.append(tuple(path))
            elif nxt > start and nxt not in on_path:
                path.append(nxt)
                on_path.add(nxt)
                stack.append((nxt, iter(succ[nxt])))
    out.sort(key=lambda c: (len(c), c))
    return out


def has_directed_cycle(d: Digraph) -> bool:
    # Kahn's algorithm; cheaper than enumerating cycles.
    indeg = {v: len(d._parents[v]) for v in d.vertices}
    ready = [v for v, k in indeg.items() if k == 0]
    seen = 0
    while ready:
        v = ready.pop()
        seen += 1
        for c in d._children[v]:
            indeg[c] -= 1
            if indeg[c] == 0:
                ready.append(c)
    return seen < len(d.vertices)


def sibling_pair(d: Digraph, cycle: Cycle) -> Optional[tuple[str, str, str]]:
    """Return ``(u, v, common_parent)`` for two distinct cycle members with a shared parent."""
    for u, v in itertools.combinations(sorted(cycle), 2):
        common = set(d._parents[u]) & set(d._parents[v])
        if common:
            return (u, v, min(common))
    return None


def soc_violation(d: Digraph) -> Optional[Cycle]:
    """First cycle (in canonical order) without a pair of siblings, or ``None``."""
    for cycle in simple_cycles(d):
        if sibling_pair(d, cycle) is None:
            return cycle
    return None


def is_soc(d: Digraph) -> bool:
    """True iff every directed cycle holds two distinct vertices with a common parent."""
    return soc_violation(d) is None


def cycle_chord(d: Digraph, cycle: Cycle) -> Optional[Edge]:
    n = len(cycle)
    pos = {v: i for i, v in enumerate(cycle)}
    for u, v in d.edges:
        if u in pos and v in pos and pos[v] != (pos[u] + 1) % n:
            return (u, v)
    return None


def chordal_witness(d: Digraph) -> Optional[tuple[Cycle, Edge]]:
    """First ``(cycle, chord)`` pair, or ``None`` when every cycle is chordless."""
    for cycle in simple_cycles(d):
        if len(cycle) < 3:
            continue
        chord = cycle_chord(d, cycle)
        if chord is not None:
            return cycle, chord
    return None


def has_chordal_cycle(d: Digraph) -> bool:
    return chordal_witness(d) is not None


def remove_vertex(d: Digraph, s: str) -> Digraph:
    d._check(s)
    return Digraph(
        [v for v in d.vertices if v != s],
        [(u, v) for u, v in d.edges if s not in (u, v)],
    )


def remove_edges(d: Digraph, removed: Iterable[Edge]) -> Digraph:
    removed = set(removed)
    missing = removed - set(d.edges)
    if missing:
        shown = ", ".join(f"{u}->{v}" for u, v in sorted(missing))
        raise CausalFlowError(f"not an edge of the graph: {shown}")
    return Digraph(d.vertices, [e for e in d.edges if e not in removed])


def weakly_connected(d: Digraph) -> bool:
    if not d.vertices:
        return True
    adj = {v: set(d._parents[v]) | set(d._children[v]) for v in d.vertices}
    seen = {d.vertices[0]}
    todo = [d.vertices[0]]
    while todo:
        for w in adj[todo.pop()]:
            if w not in seen:
                seen.add(w)
                todo.append(w)
    return len(seen) == len(d.vertices)


def relabel(d: Digraph, mapping: dict[str, str]) -> Digraph:
    return Digraph([mapping[v] for v in d.vertices], [(mapping[u], mapping[v]) for u, v in d.edges])


def _adjacency_bits(n, edge_idx, perm):
    # perm[i] is the new position of old vertex i
    bits = [0] * (n * n)
    for i, j in edge_idx:
        bits[perm[i] * n + perm[j]] = 1
    return bits


def canonical_form(d: Digraph) -> bytes:
    """Isomorphism-invariant byte string: the lexicographically largest
    adjacency matrix over all vertex permutations. Brute force, meant for n <= 7.
    """
    n = len(d.vertices)
    index = {v: i for i, v in enumerate(d.vertices)}
    edge_idx = [(index[u], index[v]) for u, v in d.edges]
    best = None
    for perm in itertools.permutations(range(n)):
        bits = _adjacency_bits(n, edge_idx, perm)
        if best is None or bits > best:
            best = bits
    body = "".join(map(str, best or []))
    return f"{n}:{body}".encode("ascii")


def _degree_profile(d: Digraph):
    return sorted((len(d._parents[v]), len(d._children[v])) for v in d.vertices)


def isomorphic(d1: Digraph, d2: Digraph) -> bool:
    if len(d1.vertices) != len(d2.vertices) or len(d1.edges) != len(d2.edges):
        return False
    if _degree_profile(d1) != _degree_profile(d2):
        return False
    target = set(d2.edges)
    for image in itertools.permutations(d2.vertices):
        m = dict(zip(d1.vertices, image))
        if all((m[u], m[v]) in target for u, v in d1.edges):
            return True
    return False


def iter_vertex_pairs(vertices: Iterable[str]) -> Iterator[Edge]:
    """Ordered pairs of distinct vertices, in canonical order."""
    vs = sorted(vertices)
    for u in vs:
        for v in vs:
            if u != v:
                yield (u, v)
