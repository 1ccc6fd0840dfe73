"""Line-based text formats for graphs, models, interventions, correlations and flows.

All formats are UTF-8, one record per line, ``#`` starts a comment. Writers
emit canonical vertex and edge order so output is byte-stable.
"""

from __future__ import annotations

import re

import numpy as np

from . import digraph as dg
from .correlations import DeterministicCorrelation
from .digraph import Digraph
from .errors import CausalFlowError, ParseError
from .flow import FlowGraph, structure_of
from .model import (
    CausalModel,
    Intervention,
    SpaceSpec,
    Table,
    VertexIntervention,
    _check_table,
    echo_vertex,
)

_NAME = r"[A-Za-z0-9_]+"
_EDGE_RE = re.compile(rf"^edge:\s*({_NAME})\s*->\s*({_NAME})$")
_KV_RE = re.compile(r"(\w+)=(\d+)")


def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


# -- graphs -----------------------------------------------------------------


def _parse_graph_records(records):
    """Consume the ``vertices:``/``edge:`` header; return (digraph, remaining records)."""
    records = list(records)
    if not records:
        raise ParseError("empty input: expected 'vertices: ...'", 1)
    lineno, line = records[0]
    if not line.startswith("vertices:"):
        raise ParseError("first record must be 'vertices: <name> ...'", lineno)
    names = line[len("vertices:"):].split()
    seen = set()
    for name in names:
        if not re.fullmatch(_NAME, name):
            raise ParseError(f"invalid vertex name {name!r}", lineno)
        if name in seen:
            raise ParseError(f"duplicate vertex {name}", lineno)
        seen.add(name)
    edges = []
    edge_set = set()
    k = 1
    while k < len(records) and records[k][1].startswith("edge:"):
        lineno, line = records[k]
        m = _EDGE_RE.match(line)
        if not m:
            raise ParseError(f"malformed edge record {line!r}", lineno)
        u, v = m.groups()
        for x in (u, v):
            if x not in seen:
                raise ParseError(f"unknown vertex {x}", lineno)
        if u == v:
            raise ParseError(f"self-loop {u} -> {v}", lineno)
        if (u, v) in edge_set:
            raise ParseError(f"duplicate edge {u} -> {v}", lineno)
        edge_set.add((u, v))
        edges.append((u, v))
        k += 1
    return Digraph(names, edges), records[k:]


def parse_graph(text: str) -> Digraph:
    d, rest = _parse_graph_records(_lines(text))
    if rest:
        lineno, line = rest[0]
        raise ParseError(f"unexpected record {line!r}", lineno)
    return d


def format_graph(d: Digraph) -> str:
    out = ["vertices: " + " ".join(d.vertices)]
    out += [f"edge: {u} -> {v}" for u, v in d.edges]
    return "\n".join(out) + "\n"


# -- models -----------------------------------------------------------------


def _ints(tokens, lineno, what):
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise ParseError(f"{what}: expected integers, got {' '.join(tokens)!r}", lineno) from None


def parse_model(text: str) -> CausalModel:
    """Parse a model file.

    ``parents <v>:`` may list the parents in any order; the ``omega`` entries
    follow that order and are permuted into canonical order internally.
    """
    d, rest = _parse_graph_records(_lines(text))
    spaces, orders, omegas = {}, {}, {}
    where = {}
    for lineno, line in rest:
        if line.startswith("space "):
            parts = line.split()
            if len(parts) < 2:
                raise ParseError("malformed space record", lineno)
            v = parts[1]
            kv = dict(_KV_RE.findall(" ".join(parts[2:])))
            if set(kv) != {"in", "out"} or len(parts) != 4:
                raise ParseError(f"space record must be 'space {v} in=<k> out=<k>'", lineno)
            _known(d, v, lineno)
            if v in spaces:
                raise ParseError(f"duplicate space record for {v}", lineno)
            spaces[v] = (int(kv["in"]), int(kv["out"]))
            if min(spaces[v]) < 1:
                raise ParseError(f"cardinalities of {v} must be >= 1", lineno)
            continue
        head, _, body = line.partition(":")
        kind, _, v = head.strip().partition(" ")
        v = v.strip()
        if kind == "parents":
            _known(d, v, lineno)
            ps = body.split()
            if sorted(ps) != list(dg.sorted_parents(d, v)) or len(set(ps)) != len(ps):
                raise ParseError(
                    f"parents of {v} must be a permutation of {' '.join(dg.sorted_parents(d, v)) or '(none)'}",
                    lineno,
                )
            orders[v] = tuple(ps)
        elif kind == "omega":
            _known(d, v, lineno)
            if v in omegas:
                raise ParseError(f"duplicate omega record for {v}", lineno)
            omegas[v] = _ints(body.split(), lineno, f"omega {v}")
            where[v] = lineno
        else:
            raise ParseError(f"unexpected record {line!r}", lineno)
    missing = [v for v in d.vertices if v not in spaces]
    if missing:
        raise ParseError(f"missing space record for {' '.join(missing)}")
    missing = [v for v in d.vertices if v not in omegas]
    if missing:
        raise ParseError(f"missing omega record for {' '.join(missing)}")
    spec = SpaceSpec(spaces)
    params = []
    for v in d.vertices:
        canon = dg.sorted_parents(d, v)
        order = orders.get(v, canon)
        try:
            declared = Table(order, tuple(omegas[v]))
            _check_table(v, declared, spec)
            if order != canon:
                arr = declared.array(spec)
                perm = [order.index(p) for p in canon]
                declared = Table(canon, tuple(int(x) for x in np.transpose(arr, perm).reshape(-1)))
        except CausalFlowError as exc:
            raise ParseError(str(exc), where[v]) from None
        params.append((v, declared))
    return CausalModel(d, spec, tuple(params))


def _known(d, v, lineno):
    if v not in d:
        raise ParseError(f"unknown vertex {v}", lineno)


def format_model(m: CausalModel) -> str:
    out = [format_graph(m.structure).rstrip("\n")]
    for v in m.vertices:
        out.append(f"space {v} in={m.spaces.in_card(v)} out={m.spaces.out_card(v)}")
    for v, t in m.params:
        out.append(f"parents {v}: {' '.join(t.parents)}".rstrip())
        out.append(f"omega {v}: {' '.join(map(str, t.values))}")
    return "\n".join(out) + "\n"


# -- interventions ------------------------------------------------------------

_ENTRY_RE = re.compile(r"\(\s*(\d+)\s*,\s*(\d+)\s*\)\s*->\s*\(\s*(\d+)\s*,\s*(\d+)\s*\)")


def parse_intervention(text: str, spaces: SpaceSpec) -> Intervention:
    """Parse ``mu <v>: (x,i)->(a,o) ...`` or ``mu <v>: echo`` records.

    The setting cardinality is the entry count divided by the input
    cardinality and the result cardinality is one more than the largest
    result; an optional ``cards <v>: x=<k> a=<k>`` record overrides both.
    """
    entries, cards, where = {}, {}, {}
    for lineno, line in _lines(text):
        head, sep, body = line.partition(":")
        kind, _, v = head.strip().partition(" ")
        v = v.strip()
        if not sep or kind not in ("mu", "cards"):
            raise ParseError(f"unexpected record {line!r}", lineno)
        if v not in spaces.vertices:
            raise ParseError(f"unknown vertex {v}", lineno)
        if kind == "cards":
            kv = dict(_KV_RE.findall(body))
            if set(kv) != {"x", "a"}:
                raise ParseError(f"cards record must be 'cards {v}: x=<k> a=<k>'", lineno)
            cards[v] = (int(kv["x"]), int(kv["a"]))
            continue
        if v in entries:
            raise ParseError(f"duplicate mu record for {v}", lineno)
        where[v] = lineno
        body = body.strip()
        if body == "echo":
            entries[v] = "echo"
            continue
        found = _ENTRY_RE.findall(body)
        if not found or _ENTRY_RE.sub("", body).strip():
            raise ParseError(f"malformed mu record for {v}", lineno)
        rows = [tuple(map(int, f)) for f in found]
        n_in = spaces.in_card(v)
        for k, (x, i, _, _) in enumerate(rows):
            if (x, i) != divmod(k, n_in):
                raise ParseError(
                    f"mu {v}: entry {k} is ({x},{i}), expected {divmod(k, n_in)} (lexicographic order)", lineno
                )
        if len(rows) % n_in:
            raise ParseError(f"mu {v}: entry count {len(rows)} is not a multiple of |I|={n_in}", lineno)
        entries[v] = rows
    mus = {}
    for v in spaces.vertices:
        if v not in entries:
            raise ParseError(f"missing mu record for {v}")
        if entries[v] == "echo":
            mus[v] = echo_vertex(spaces.in_card(v), spaces.out_card(v))
            continue
        rows = entries[v]
        x_card, a_card = cards.get(v, (len(rows) // spaces.in_card(v), max(r[2] for r in rows) + 1))
        mu = VertexIntervention(x_card, a_card, tuple((a, o) for _, _, a, o in rows))
        if len(mu.table) != x_card * spaces.in_card(v):
            raise ParseError(f"mu {v}: expected {x_card * spaces.in_card(v)} entries", where[v])
        for a, o in mu.table:
            if not (0 <= a < a_card and 0 <= o < spaces.out_card(v)):
                raise ParseError(f"mu {v}: entry ->({a},{o}) out of range", where[v])
        mus[v] = mu
    return Intervention.from_mapping(mus)


def format_intervention(iv: Intervention, spaces: SpaceSpec) -> str:
    out = []
    for v, mu in iv.per_vertex:
        n_in = spaces.in_card(v)
        out.append(f"cards {v}: x={mu.setting_card} a={mu.result_card}")
        cells = [
            f"({x},{i})->({mu.table[x * n_in + i][0]},{mu.table[x * n_in + i][1]})"
            for x in range(mu.setting_card)
            for i in range(n_in)
        ]
        out.append(f"mu {v}: {' '.join(cells)}")
    return "\n".join(out) + "\n"


# -- correlations ---------------------------------------------------------------

_ROW_RE = re.compile(r"^g:\s*\(([\d,\s]*)\)\s*->\s*\(([\d,\s]*)\)$")


def _tuple(body):
    body = body.strip()
    return tuple(int(t) for t in body.split(",")) if body else ()


def parse_correlation(text: str) -> DeterministicCorrelation:
    records = list(_lines(text))
    if not records or not records[0][1].startswith("agents:"):
        raise ParseError("first record must be 'agents: <name> ...'", records[0][0] if records else 1)
    agents = records[0][1][len("agents:"):].split()
    if len(set(agents)) != len(agents):
        raise ParseError("duplicate agents", records[0][0])
    agents_sorted = sorted(agents)
    if agents != agents_sorted:
        raise ParseError("agents must be listed in canonical (lexicographic) order", records[0][0])
    cards, rows = {}, []
    for lineno, line in records[1:]:
        if line.startswith("cards "):
            head, _, body = line.partition(":")
            v = head.split()[1] if len(head.split()) == 2 else None
            kv = dict(_KV_RE.findall(body))
            if v not in agents or set(kv) != {"x", "a"}:
                raise ParseError(f"malformed cards record {line!r}", lineno)
            cards[v] = (int(kv["x"]), int(kv["a"]))
        elif line.startswith("g:"):
            m = _ROW_RE.match(line)
            if not m:
                raise ParseError(f"malformed row {line!r}", lineno)
            rows.append((lineno, _tuple(m.group(1)), _tuple(m.group(2))))
        else:
            raise ParseError(f"unexpected record {line!r}", lineno)
    for v in agents:
        if v not in cards:
            raise ParseError(f"missing cards record for {v}")
    s_cards = tuple(cards[v][0] for v in agents)
    r_cards = tuple(cards[v][1] for v in agents)
    expected = list(np.ndindex(*s_cards)) if agents else [()]
    if len(rows) != len(expected):
        raise ParseError(f"expected {len(expected)} rows, got {len(rows)}")
    table = []
    for (lineno, x, a), want in zip(rows, expected):
        if x != tuple(want):
            raise ParseError(f"row for {x} out of order, expected {tuple(want)}", lineno)
        if len(a) != len(agents) or any(not 0 <= ai < c for ai, c in zip(a, r_cards)):
            raise ParseError(f"results {a} out of range", lineno)
        table.append(a)
    return DeterministicCorrelation(tuple(agents), s_cards, r_cards, tuple(table))


def format_correlation(c: DeterministicCorrelation) -> str:
    out = ["agents: " + " ".join(c.agents)]
    for v, x, a in zip(c.agents, c.setting_cards, c.result_cards):
        out.append(f"cards {v}: x={x} a={a}")
    for x, a in zip(c.settings(), c.rows):
        out.append(f"g: ({','.join(map(str, x))}) -> ({','.join(map(str, a))})")
    return "\n".join(out) + "\n"


# -- flows ------------------------------------------------------------------------


def annotation_text(label) -> str:
    """``(s, o)`` -> ``s=P,o=0``; ``s`` -> ``s=P``; ``(s, R)`` -> ``s=P,R=A>B|C>B``."""
    if isinstance(label, str):
        return f"s={label}"
    s, extra = label
    if isinstance(extra, frozenset):
        removed = "|".join(f"{u}>{v}" for u, v in sorted(extra)) or "-"
        return f"s={s},R={removed}"
    return f"s={s},o={extra}"


def edge_annotation(f: FlowGraph, u, v) -> str:
    labels = f.annotations.get((u, v), set())
    return " ".join(sorted(annotation_text(x) for x in labels))


def format_flow(f: FlowGraph, annotate=False, kind="flow") -> str:
    ids = f.node_ids()
    out = [f"# {kind}: {len(ids)} nodes, {len(f.edges)} edges", f"root: n{ids[f.root]}"]
    for n, k in ids.items():
        d = structure_of(n)
        out.append(f"node: n{k} vertices: {' '.join(d.vertices)} edges: {d.edge_label()}")
    for u, v in f.sorted_edges():
        line = f"flowedge: n{ids[u]} -> n{ids[v]}"
        if annotate:
            text = edge_annotation(f, u, v)
            if text:
                line += f" {text}"
        out.append(line)
    return "\n".join(out) + "\n"


_NODE_RE = re.compile(r"^node:\s*(\w+)\s+vertices:\s*([\w\s]*?)\s*edges:\s*(\S+)$")
_FEDGE_RE = re.compile(r"^flowedge:\s*(\w+)\s*->\s*(\w+)(?:\s+.*)?$")


def _parse_edge_label(label: str, lineno) -> list:
    if label == "-":
        return []
    out = []
    for item in label.split(";"):
        u, sep, v = item.partition(">")
        if not sep or not u or not v:
            raise ParseError(f"malformed edge {item!r}", lineno)
        out.append((u, v))
    return out


def parse_flow(text: str) -> FlowGraph:
    """Parse the flow text format back into a :class:`FlowGraph` of digraphs (annotations dropped)."""
    root_id = None
    nodes = {}
    edges = []
    for lineno, line in _lines(text):
        if line.startswith("root:"):
            root_id = line[len("root:"):].strip()
        elif line.startswith("node:"):
            m = _NODE_RE.match(line)
            if not m:
                raise ParseError(f"malformed node record {line!r}", lineno)
            nid, vs, es = m.groups()
            if nid in nodes:
                raise ParseError(f"duplicate node id {nid}", lineno)
            try:
                nodes[nid] = Digraph(vs.split(), _parse_edge_label(es, lineno))
            except CausalFlowError as exc:
                raise ParseError(str(exc), lineno) from None
        elif line.startswith("flowedge:"):
            m = _FEDGE_RE.match(line)
            if not m:
                raise ParseError(f"malformed flowedge record {line!r}", lineno)
            edges.append((lineno, m.group(1), m.group(2)))
        else:
            raise ParseError(f"unexpected record {line!r}", lineno)
    if root_id is None or root_id not in nodes:
        raise ParseError("missing or unknown root")
    f = FlowGraph(nodes[root_id])
    for d in nodes.values():
        f.add_node(d)
    for lineno, a, b in edges:
        if a not in nodes or b not in nodes:
            raise ParseError("flowedge refers to unknown node", lineno)
        f.add_edge(nodes[a], nodes[b])
    return f


# -- DOT ----------------------------------------------------------------------------


def dot_label(d: Digraph) -> str:
    """Canonical edge list, followed by any vertices no edge touches."""
    covered = {x for e in d.edges for x in e}
    parts = [f"{u}>{v}" for u, v in d.edges] + [v for v in d.vertices if v not in covered]
    return ";".join(parts)


def format_dot(f: FlowGraph, annotate=False, name="flow") -> str:
    ids = f.node_ids()
    out = [f"digraph {name} {{", "  node [shape=ellipse, fontname=\"Helvetica\"];"]
    for n, k in ids.items():
        d = structure_of(n)
        attrs = [f'label="{dot_label(d)}"']
        if f.is_leaf(n):
            attrs.append("shape=box")
        if n == f.root:
            attrs.append("peripheries=2")
        out.append(f"  n{k} [{', '.join(attrs)}];")
    for u, v in f.sorted_edges():
        attr = ""
        if annotate:
            text = edge_annotation(f, u, v)
            if text:
                attr = f' [label="{text}"]'
        out.append(f"  n{ids[u]} -> n{ids[v]}{attr};")
    out.append("}")
    return "\n".join(out) + "\n"
