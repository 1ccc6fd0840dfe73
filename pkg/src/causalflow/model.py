"""Classical-deterministic causal models over finite spaces.

Every vertex ``v`` has an input set ``{0..in_card-1}`` and an output set
``{0..out_card-1}``. Its model parameter is a lookup table from the outputs of
its parents to an input value. Tables are flat tuples in row-major order over
the parent order, the first parent being the most significant digit, i.e. the
lexicographic order of parent-output assignments.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Optional, Sequence

import numpy as np

from . import digraph as dg
from ._limits import check_limit
from .digraph import Digraph
from .errors import (
    CausalFlowError,
    InconsistentModelError,
    NotASourceError,
    UnknownVertexError,
)

#: default guard for brute-force enumerations (models, function families, joint assignments)
DEFAULT_LIMIT = 1 << 22


class SpaceSpec:
    """Input and output cardinalities per vertex."""

    __slots__ = ("_cards", "_hash")

    def __init__(self, cards: Mapping[str, tuple[int, int]]):
        items = []
        for v, (i, o) in sorted(cards.items()):
            i, o = int(i), int(o)
            if i < 1 or o < 1:
                raise CausalFlowError(f"cardinalities of {v} must be >= 1, got in={i} out={o}")
            items.append((v, (i, o)))
        self._cards = dict(items)
        self._hash = hash(tuple(items))

    @classmethod
    def uniform(cls, vertices: Iterable[str], in_card=2, out_card=2):
        return cls({v: (in_card, out_card) for v in vertices})

    @property
    def vertices(self):
        return tuple(self._cards)

    def in_card(self, v) -> int:
        try:
            return self._cards[v][0]
        except KeyError:
            raise UnknownVertexError(v) from None

    def out_card(self, v) -> int:
        try:
            return self._cards[v][1]
        except KeyError:
            raise UnknownVertexError(v) from None

    def restrict(self, vertices: Iterable[str]) -> "SpaceSpec":
        return SpaceSpec({v: self._cards[v] for v in vertices})

    def items(self):
        return self._cards.items()

    def __eq__(self, other):
        if not isinstance(other, SpaceSpec):
            return NotImplemented
        return self._cards == other._cards

    def __hash__(self):
        return self._hash

    def __repr__(self):
        body = ", ".join(f"{v}: in={i} out={o}" for v, (i, o) in self._cards.items())
        return f"SpaceSpec({body})"


@dataclass(frozen=True)
class Table:
    """Lookup table of one vertex: ``values[index(parent outputs)]``."""

    parents: tuple[str, ...]
    values: tuple[int, ...]

    def array(self, spaces: SpaceSpec) -> np.ndarray:
        shape = tuple(spaces.out_card(p) for p in self.parents)
        return np.asarray(self.values, dtype=np.int64).reshape(shape)

    def __call__(self, spaces: SpaceSpec, outputs: Mapping[str, int]) -> int:
        idx = 0
        for p in self.parents:
            idx = idx * spaces.out_card(p) + outputs[p]
        return self.values[idx]


def _table_from_array(parents, arr) -> Table:
    return Table(tuple(parents), tuple(int(x) for x in np.asarray(arr).reshape(-1)))


def _check_table(v, table: Table, spaces: SpaceSpec):
    size = math.prod(spaces.out_card(p) for p in table.parents)
    if len(table.values) != size:
        raise CausalFlowError(
            f"table of {v} has {len(table.values)} entries, expected {size} "
            f"(parents: {' '.join(table.parents) or 'none'})"
        )
    bound = spaces.in_card(v)
    for x in table.values:
        if not 0 <= x < bound:
            raise CausalFlowError(f"table of {v} has entry {x} outside 0..{bound - 1}")


def signal_witness(table: Table, spaces: SpaceSpec, parent: str):
    """Witness that ``table`` depends on ``parent``.

    Returns ``(other_outputs, q, r)`` with ``table(q, other) != table(r, other)``,
    or ``None`` when the table is constant in that parent.
    """
    arr = table.array(spaces)
    axis = table.parents.index(parent)
    moved = np.moveaxis(arr, axis, 0)
    card = moved.shape[0]
    others = [p for p in table.parents if p != parent]
    flat = moved.reshape(card, -1)
    for q, r in itertools.combinations(range(card), 2):
        diff = np.nonzero(flat[q] != flat[r])[0]
        if diff.size:
            rest = np.unravel_index(int(diff[0]), moved.shape[1:]) if others else ()
            return dict(zip(others, (int(x) for x in rest))), q, r
    return None


def _signaling_parents(table: Table, spaces: SpaceSpec) -> tuple[str, ...]:
    return tuple(p for p in table.parents if signal_witness(table, spaces, p) is not None)


def _project(table: Table, spaces: SpaceSpec, keep: Sequence[str]) -> Table:
    """Drop non-signaling parents (the table is constant along them)."""
    if tuple(keep) == table.parents:
        return table
    arr = table.array(spaces)
    idx = tuple(slice(None) if p in keep else 0 for p in table.parents)
    return _table_from_array([p for p in table.parents if p in keep], arr[idx])


@dataclass(frozen=True)
class CausalModel:
    """A causal structure together with one lookup table per vertex.

    Use :meth:`build` to construct one from plain value lists; it validates
    table sizes against the parents of each vertex in ``structure``.
    """

    structure: Digraph
    spaces: SpaceSpec
    params: tuple[tuple[str, Table], ...]

    @classmethod
    def build(cls, structure: Digraph, spaces: SpaceSpec, tables: Mapping[str, Sequence[int]]):
        if set(spaces.vertices) != set(structure.vertices):
            raise CausalFlowError("spaces must be declared for exactly the vertices of the structure")
        if set(tables) != set(structure.vertices):
            missing = sorted(set(structure.vertices) - set(tables))
            extra = sorted(set(tables) - set(structure.vertices))
            raise CausalFlowError(f"tables missing for {missing}, unexpected for {extra}")
        params = []
        for v in structure.vertices:
            t = Table(dg.sorted_parents(structure, v), tuple(int(x) for x in tables[v]))
            _check_table(v, t, spaces)
            params.append((v, t))
        return cls(structure, spaces, tuple(params))

    @cached_property
    def _table_map(self) -> dict[str, Table]:
        return dict(self.params)

    def table(self, v) -> Table:
        try:
            return self._table_map[v]
        except KeyError:
            raise UnknownVertexError(v) from None

    def omega(self, v, outputs: Mapping[str, int]) -> int:
        return self.table(v)(self.spaces, outputs)

    @property
    def vertices(self):
        return self.structure.vertices

    def tables(self) -> dict[str, tuple[int, ...]]:
        return {v: t.values for v, t in self.params}


@dataclass
class FaithfulnessReport:
    faithful: bool
    #: edge -> (other parent outputs, q, r)
    witnesses: dict = field(default_factory=dict)
    failing: list = field(default_factory=list)

    def __bool__(self):
        return self.faithful


def is_faithful(m: CausalModel) -> FaithfulnessReport:
    """Check that every declared edge carries signaling in the model parameters."""
    report = FaithfulnessReport(True)
    for v, table in m.params:
        for p in table.parents:
            w = signal_witness(table, m.spaces, p)
            if w is None:
                report.faithful = False
                report.failing.append((p, v))
            else:
                report.witnesses[(p, v)] = w
    return report


def derive_causal_structure(
    spaces: SpaceSpec, params: Mapping[str, Table] | Iterable[tuple[str, Table]]
) -> Digraph:
    """Digraph with an edge ``p -> v`` exactly when ``v``'s table signals from ``p``."""
    items = params.items() if isinstance(params, Mapping) else params
    vertices, edges = [], []
    for v, table in items:
        vertices.append(v)
        for p in _signaling_parents(table, spaces):
            edges.append((p, v))
    return Digraph(vertices, edges)


def faithful_model(spaces: SpaceSpec, params: Mapping[str, Table]) -> CausalModel:
    """Build the model whose structure is derived from ``params``; tables are
    projected onto their signaling parents so the result is faithful."""
    structure = derive_causal_structure(spaces, params)
    out = []
    for v in structure.vertices:
        out.append((v, _project(params[v], spaces, dg.sorted_parents(structure, v))))
    return CausalModel(structure, spaces.restrict(structure.vertices), tuple(out))


# -- consistency ------------------------------------------------------------


def _joint_outputs(m: CausalModel):
    """All joint output assignments (rows, canonical vertex order) and the
    induced joint inputs ``i = omega(o)``."""
    vs = m.vertices
    cards = [m.spaces.out_card(v) for v in vs]
    total = math.prod(cards)
    check_limit(total, DEFAULT_LIMIT, "number of joint output assignments")
    outs = np.array(list(itertools.product(*[range(c) for c in cards])), dtype=np.int64)
    outs = outs.reshape(total, len(vs))
    ins = np.empty_like(outs)
    pos = {v: k for k, v in enumerate(vs)}
    for k, v in enumerate(vs):
        table = m.table(v)
        idx = np.zeros(total, dtype=np.int64)
        for p in table.parents:
            idx = idx * m.spaces.out_card(p) + outs[:, pos[p]]
        ins[:, k] = np.asarray(table.values, dtype=np.int64)[idx]
    return outs, ins


def _functions(in_card, out_card):
    return list(itertools.product(range(out_card), repeat=in_card))


@dataclass
class ConsistencyReport:
    consistent: bool
    families_checked: int = 0
    #: on failure: vertex -> tuple f_v (f_v[i] is the output for input i)
    family: Optional[dict] = None
    #: on failure: the joint outputs fixed by ``family`` (empty or >= 2)
    fixed_points: list = field(default_factory=list)

    def __bool__(self):
        return self.consistent


def is_consistent(m: CausalModel, chunk=4096) -> ConsistencyReport:
    """Decide consistency by brute force.

    The model is consistent iff for every family of functions
    ``f_v : inputs -> outputs`` the system ``o_v = f_v(omega_v(o))`` has exactly
    one solution ``o``. Interventions with settings and results reduce to such
    families one setting at a time, and each family is itself an intervention
    with trivial settings and results.
    """
    vs = m.vertices
    if not vs:
        return ConsistencyReport(True, 1)
    outs, ins = _joint_outputs(m)
    per_vertex = [_functions(m.spaces.in_card(v), m.spaces.out_card(v)) for v in vs]
    n_fam = math.prod(len(f) for f in per_vertex)
    check_limit(n_fam, DEFAULT_LIMIT, "number of intervention function families")

    max_in = max(m.spaces.in_card(v) for v in vs)
    lut = []
    for fs in per_vertex:
        a = np.zeros((len(fs), max_in), dtype=np.int64)
        a[:, : len(fs[0])] = np.asarray(fs, dtype=np.int64)
        lut.append(a)

    cols = np.arange(len(vs))
    checked = 0
    combos = itertools.product(*[range(len(f)) for f in per_vertex])
    while True:
        batch = list(itertools.islice(combos, chunk))
        if not batch:
            break
        sel = np.asarray(batch, dtype=np.int64)  # (C, n)
        # fam[c, k, i] = output of f_k for input i in family c
        fam = np.stack([lut[k][sel[:, k]] for k in range(len(vs))], axis=1)
        images = fam[:, cols[None, :], ins]  # (C, N_o, n)
        fixed = np.all(images == outs[None, :, :], axis=2)
        counts = fixed.sum(axis=1)
        bad = np.nonzero(counts != 1)[0]
        if bad.size:
            c = int(bad[0])
            family = {v: per_vertex[k][sel[c, k]] for k, v in enumerate(vs)}
            fps = [dict(zip(vs, map(int, outs[j]))) for j in np.nonzero(fixed[c])[0]]
            return ConsistencyReport(False, checked + c + 1, family, fps)
        checked += len(batch)
    return ConsistencyReport(True, checked)


# -- reduction ----------------------------------------------------------------


def reduce(m: CausalModel, s: str, o_s: int) -> CausalModel:
    """Fix the output of source ``s`` to ``o_s`` and remove ``s``.

    Children of ``s`` get their tables partially applied at ``o_s``. The
    structure of the result is derived from the reduced tables, so it can lose
    more edges than just those incident to ``s``.
    """
    if s not in m.structure:
        raise UnknownVertexError(s)
    if dg.parents(m.structure, s):
        raise NotASourceError(f"{s} is not a source (parents: {' '.join(dg.sorted_parents(m.structure, s))})")
    card = m.spaces.out_card(s)
    if not 0 <= o_s < card:
        raise CausalFlowError(f"output value {o_s} of {s} outside 0..{card - 1}")
    params = {}
    for v, table in m.params:
        if v == s:
            continue
        if s in table.parents:
            axis = table.parents.index(s)
            arr = np.take(table.array(m.spaces), o_s, axis=axis)
            table = _table_from_array([p for p in table.parents if p != s], arr)
        params[v] = table
    rest = [v for v in m.vertices if v != s]
    return faithful_model(m.spaces.restrict(rest), params)


# -- interventions and contraction -----------------------------------------


@dataclass(frozen=True)
class VertexIntervention:
    """``mu_v``: ``table[x * in_card + i] == (a, o)``."""

    setting_card: int
    result_card: int
    table: tuple[tuple[int, int], ...]

    def __call__(self, x, i, in_card):
        return self.table[x * in_card + i]


@dataclass(frozen=True)
class Intervention:
    per_vertex: tuple[tuple[str, VertexIntervention], ...]

    @classmethod
    def from_mapping(cls, mus: Mapping[str, VertexIntervention]):
        return cls(tuple(sorted(mus.items())))

    def __getitem__(self, v) -> VertexIntervention:
        for k, mu in self.per_vertex:
            if k == v:
                return mu
        raise UnknownVertexError(v)

    def vertices(self):
        return tuple(k for k, _ in self.per_vertex)


def echo_vertex(in_card, out_card) -> VertexIntervention:
    """Report the input as result and emit the setting as output."""
    table = tuple((i, x) for x in range(out_card) for i in range(in_card))
    return VertexIntervention(out_card, in_card, table)


def echo_intervention(spaces: SpaceSpec) -> Intervention:
    return Intervention.from_mapping(
        {v: echo_vertex(spaces.in_card(v), spaces.out_card(v)) for v in spaces.vertices}
    )


def check_intervention(iv: Intervention, spaces: SpaceSpec):
    if set(iv.vertices()) != set(spaces.vertices):
        raise CausalFlowError("intervention must cover exactly the vertices of the model")
    for v, mu in iv.per_vertex:
        n_in, n_out = spaces.in_card(v), spaces.out_card(v)
        if mu.setting_card < 1 or mu.result_card < 1:
            raise CausalFlowError(f"intervention of {v}: cardinalities must be >= 1")
        if len(mu.table) != mu.setting_card * n_in:
            raise CausalFlowError(
                f"intervention of {v} has {len(mu.table)} entries, expected {mu.setting_card * n_in}"
            )
        for a, o in mu.table:
            if not (0 <= a < mu.result_card and 0 <= o < n_out):
                raise CausalFlowError(f"intervention of {v} has out-of-range entry ({a},{o})")


def contract(m: CausalModel, iv: Intervention):
    """Contract the model with an intervention into a deterministic correlation.

    For each joint setting the unique joint fixed point is located by scanning
    all joint outputs; a missing or ambiguous fixed point raises
    :class:`InconsistentModelError` carrying the joint setting.
    """
    from .correlations import DeterministicCorrelation

    check_intervention(iv, m.spaces)
    vs = m.vertices
    outs, ins = _joint_outputs(m)
    mus = [iv[v] for v in vs]
    s_cards = [mu.setting_card for mu in mus]
    check_limit(math.prod(s_cards), DEFAULT_LIMIT, "number of joint settings")
    # out_lut[k][x, i] = o, res_lut[k][x, i] = a
    out_lut, res_lut = [], []
    for v, mu in zip(vs, mus):
        arr = np.asarray(mu.table, dtype=np.int64).reshape(mu.setting_card, m.spaces.in_card(v), 2)
        res_lut.append(arr[:, :, 0])
        out_lut.append(arr[:, :, 1])
    rows = []
    for x in itertools.product(*[range(c) for c in s_cards]):
        ok = np.ones(len(outs), dtype=bool)
        for k in range(len(vs)):
            ok &= out_lut[k][x[k], ins[:, k]] == outs[:, k]
        hits = np.nonzero(ok)[0]
        if hits.size != 1:
            kind = "no" if hits.size == 0 else f"{hits.size}"
            raise InconsistentModelError(
                f"{kind} fixed points for joint setting {dict(zip(vs, x))}", witness=dict(zip(vs, x))
            )
        j = int(hits[0])
        rows.append(tuple(int(res_lut[k][x[k], ins[j, k]]) for k in range(len(vs))))
    return DeterministicCorrelation(
        vs, tuple(s_cards), tuple(mu.result_card for mu in mus), tuple(rows)
    )


# -- enumeration --------------------------------------------------------------


class EnumeratedModel:
    """One enumerated parameter assignment; flags are computed on first access."""

    __slots__ = ("model", "_faithful", "_consistent")

    def __init__(self, model: CausalModel, faithful: Optional[bool] = None):
        self.model = model
        self._faithful = faithful
        self._consistent = None

    @property
    def faithful(self) -> bool:
        if self._faithful is None:
            self._faithful = is_faithful(self.model).faithful
        return self._faithful

    @property
    def consistent(self) -> bool:
        if self._consistent is None:
            self._consistent = is_consistent(self.model).consistent
        return self._consistent

    def __repr__(self):
        return f"EnumeratedModel({self.model.structure.label()}, {self.model.tables()})"


def count_models(d: Digraph, spaces: SpaceSpec) -> int:
    total = 1
    for v in d.vertices:
        size = math.prod(spaces.out_card(p) for p in dg.sorted_parents(d, v))
        total *= spaces.in_card(v) ** size
    return total


def enumerate_models(
    d: Digraph, spaces: SpaceSpec, only_faithful=False, limit=DEFAULT_LIMIT
) -> Iterator[EnumeratedModel]:
    """Yield every parameter assignment on ``d``.

    With ``only_faithful`` the per-vertex tables are filtered before taking the
    product, which is how the property suites keep the search small.
    """
    check_limit(
        count_models(d, spaces), limit, "number of parameter assignments",
        hint="use smaller spaces or fewer vertices",
    )
    choices = []
    for v in d.vertices:
        ps = dg.sorted_parents(d, v)
        size = math.prod(spaces.out_card(p) for p in ps)
        opts = []
        for values in itertools.product(range(spaces.in_card(v)), repeat=size):
            t = Table(ps, values)
            if only_faithful and len(_signaling_parents(t, spaces)) != len(ps):
                continue
            opts.append(t)
        choices.append(opts)
    vs = d.vertices
    for combo in itertools.product(*choices):
        model = CausalModel(d, spaces, tuple(zip(vs, combo)))
        yield EnumeratedModel(model, True if only_faithful else None)
