"""Brute-force digraph catalogs and the classification of chordal SOC graphs."""

from __future__ import annotations

import csv
import io
import string
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence, Union

from . import digraph as dg
from ._limits import check_limit
from .digraph import Digraph
from .errors import CausalFlowError
from .flow import all_leaves_trivial, leaves, nontrivial_leaves
from .superflow import build_superflow

FILTERS: dict[str, Callable[[Digraph], bool]] = {
    "connected": dg.weakly_connected,
    "cyclic": dg.has_directed_cycle,
    "soc": dg.is_soc,
    "source": lambda d: bool(dg.sources(d)),
    "chordal": dg.has_chordal_cycle,
}

#: the selection used for the four-vertex catalog of chordal SOC graphs
GAP_FILTERS = ("connected", "cyclic", "soc", "source", "chordal")

Filter = Union[str, Callable[[Digraph], bool]]


def default_vertices(n: int) -> tuple[str, ...]:
    if n <= 26:
        return tuple(string.ascii_uppercase[:n])
    return tuple(f"v{k}" for k in range(n))


def resolve_filter(f: Filter) -> Callable[[Digraph], bool]:
    """Named filters accept a ``not-`` or ``!`` prefix for negation."""
    if callable(f):
        return f
    name = f.strip()
    negate = False
    for prefix in ("not-", "!"):
        if name.startswith(prefix):
            negate, name = True, name[len(prefix):]
    try:
        pred = FILTERS[name]
    except KeyError:
        raise CausalFlowError(f"unknown filter {f!r}; known: {', '.join(FILTERS)}") from None
    return (lambda d: not pred(d)) if negate else pred


def all_digraphs(n: int, filters: Iterable[Filter] = (), vertices: Sequence[str] | None = None,
                 max_n=7) -> Iterator[Digraph]:
    """All ``2**(n*(n-1))`` labeled digraphs on ``n`` vertices passing every filter."""
    check_limit(n, max_n, "number of vertices")
    vs = tuple(vertices) if vertices is not None else default_vertices(n)
    if len(vs) != n:
        raise CausalFlowError("vertex list does not match n")
    preds = [resolve_filter(f) for f in filters]
    pairs = list(dg.iter_vertex_pairs(vs))
    for mask in range(1 << len(pairs)):
        d = Digraph(vs, [p for k, p in enumerate(pairs) if mask >> k & 1])
        if all(p(d) for p in preds):
            yield d


@dataclass(frozen=True)
class IsoClass:
    representative: Digraph
    size: int
    canonical: bytes


def iso_classes(graphs: Iterable[Digraph]) -> list[IsoClass]:
    """Partition by canonical form; the first member seen represents its class."""
    reps: dict[bytes, Digraph] = {}
    sizes: dict[bytes, int] = {}
    for d in graphs:
        key = dg.canonical_form(d)
        reps.setdefault(key, d)
        sizes[key] = sizes.get(key, 0) + 1
    return [IsoClass(reps[k], sizes[k], k) for k in sorted(reps)]


@dataclass(frozen=True)
class GapRow:
    class_id: int
    canonical: str
    representative: Digraph
    class_size: int
    edge_count: int
    source_count: int
    certified: bool
    superflow_nodes: int
    leaf_count: int
    nontrivial_leaf_count: int


def classify(classes: Sequence[IsoClass]) -> list[GapRow]:
    rows = []
    for k, cls in enumerate(classes):
        d = cls.representative
        sf = build_superflow(d)
        rows.append(GapRow(
            class_id=k,
            canonical=cls.canonical.decode("ascii"),
            representative=d,
            class_size=cls.size,
            edge_count=len(d.edges),
            source_count=len(dg.sources(d)),
            certified=all_leaves_trivial(sf),
            superflow_nodes=len(sf),
            leaf_count=len(leaves(sf)),
            nontrivial_leaf_count=len(nontrivial_leaves(sf)),
        ))
    return rows


def classify_gap(n: int, max_n=6) -> list[GapRow]:
    """Certify every isomorphism class of connected, cyclic, SOC digraphs on
    ``n`` vertices that have a source and a chordal cycle."""
    check_limit(n, max_n, "number of vertices")
    return classify(iso_classes(all_digraphs(n, GAP_FILTERS)))


CSV_HEADER = [
    "class_id", "canonical_form", "edge_count", "source_count", "certified",
    "superflow_nodes", "leaf_count", "nontrivial_leaf_count", "representative",
]


def gap_csv(rows: Iterable[GapRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([
            r.class_id, r.canonical, r.edge_count, r.source_count, str(r.certified).lower(),
            r.superflow_nodes, r.leaf_count, r.nontrivial_leaf_count, r.representative.edge_label(),
        ])
    return buf.getvalue()


def iso_members(cls: IsoClass, count: int, rng) -> list[Digraph]:
    """``count`` random relabelings of the class representative."""
    vs = cls.representative.vertices
    out = []
    for _ in range(count):
        perm = list(vs)
        rng.shuffle(perm)
        out.append(dg.relabel(cls.representative, dict(zip(vs, perm))))
    return out

