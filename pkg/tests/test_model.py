import itertools
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from causalflow import digraph as dg
from causalflow.digraph import Digraph
from causalflow.enumeration import all_digraphs
from causalflow.errors import CausalFlowError, InconsistentModelError, NotASourceError
from causalflow.formats import parse_model
from causalflow.model import (
    CausalModel,
    Intervention,
    SpaceSpec,
    VertexIntervention,
    contract,
    count_models,
    echo_intervention,
    enumerate_models,
    is_consistent,
    is_faithful,
    reduce,
)

FIX = Path(__file__).parent / "fixtures"


@pytest.fixture
def switch():
    return parse_model((FIX / "switch.model").read_text())


def fixed_point_oracle(m):
    """Consistency by plain loops over function families and joint outputs."""
    vs = m.vertices
    fams = [list(itertools.product(range(m.spaces.out_card(v)), repeat=m.spaces.in_card(v))) for v in vs]
    joint = list(itertools.product(*[range(m.spaces.out_card(v)) for v in vs]))
    for family in itertools.product(*fams):
        hits = 0
        for o in joint:
            out = dict(zip(vs, o))
            if all(family[k][m.omega(v, out)] == o[k] for k, v in enumerate(vs)):
                hits += 1
        if hits != 1:
            return False
    return True


def test_switch_model_faithful(switch):
    rep = is_faithful(switch)
    assert rep.faithful
    assert set(rep.witnesses) == set(switch.structure.edges)
    other, q, r = rep.witnesses[("P", "A")]
    assert other == {"B": 1} and {q, r} == {0, 1}


def test_switch_model_consistent(switch):
    rep = is_consistent(switch)
    assert rep.consistent
    assert rep.families_checked == 2 * 4 * 4


def test_switch_reductions(switch):
    assert reduce(switch, "P", 0).structure == Digraph("AB", [("A", "B")])
    assert reduce(switch, "P", 1).structure == Digraph("AB", [("B", "A")])


def test_reduce_errors(switch):
    with pytest.raises(NotASourceError):
        reduce(switch, "A", 0)
    with pytest.raises(CausalFlowError):
        reduce(switch, "P", 2)


def test_identity_two_cycle_inconsistent():
    d = Digraph("AB", [("A", "B"), ("B", "A")])
    m = CausalModel.build(d, SpaceSpec.uniform("AB"), {"A": [0, 1], "B": [0, 1]})
    assert is_faithful(m)
    rep = is_consistent(m)
    assert not rep.consistent
    assert rep.family == {"A": (0, 1), "B": (0, 1)}
    assert len(rep.fixed_points) == 2
    # echo ignores the input so it still contracts; passing the input on does not
    assert contract(m, echo_intervention(m.spaces))
    relay = VertexIntervention(1, 1, ((0, 0), (0, 1)))
    with pytest.raises(InconsistentModelError) as exc:
        contract(m, Intervention.from_mapping({"A": relay, "B": relay}))
    assert exc.value.witness == {"A": 0, "B": 0}


def test_unfaithful_constant_table():
    d = Digraph("AB", [("A", "B")])
    m = CausalModel.build(d, SpaceSpec.uniform("AB"), {"A": [0], "B": [1, 1]})
    rep = is_faithful(m)
    assert not rep.faithful and rep.failing == [("A", "B")]


def test_count_models():
    d = Digraph("AB", [("A", "B")])
    assert count_models(d, SpaceSpec.uniform("AB")) == 8
    items = list(enumerate_models(d, SpaceSpec.uniform("AB")))
    assert len(items) == 8
    assert sum(i.faithful for i in items) == 4


def test_build_rejects_bad_table_size():
    d = Digraph("AB", [("A", "B")])
    with pytest.raises(CausalFlowError):
        CausalModel.build(d, SpaceSpec.uniform("AB"), {"A": [0], "B": [0]})


def test_switch_contraction(switch):
    g = contract(switch, echo_intervention(switch.spaces))
    assert g.agents == ("A", "B", "P")
    for (xa, xb, xp), (aa, ab, ap) in g.as_dict().items():
        assert aa == xp * xb
        assert ab == (1 - xp) * xa
        assert ap == 0


@pytest.mark.parametrize("n", [2, 3])
def test_consistency_matches_oracle(n):
    for d in all_digraphs(n):
        spaces = SpaceSpec.uniform(d.vertices)
        for item in enumerate_models(d, spaces):
            assert item.consistent == fixed_point_oracle(item.model), item


def test_nonbinary_consistency_matches_oracle():
    d = Digraph("AB", [("A", "B"), ("B", "A")])
    spaces = SpaceSpec({"A": (3, 2), "B": (2, 3)})
    for item in enumerate_models(d, spaces):
        assert item.consistent == fixed_point_oracle(item.model)


def topological_contract(m, x):
    """Echo contraction of an acyclic model evaluated in topological order."""
    out = {}
    remaining = list(m.vertices)
    inputs = {}
    while remaining:
        for v in remaining:
            if all(p in out for p in dg.parents(m.structure, v)):
                inputs[v] = m.omega(v, out)
                out[v] = x[v]
                remaining.remove(v)
                break
    return inputs


def test_acyclic_contraction_matches_topological_evaluation():
    for d in all_digraphs(3, ("not-cyclic",)):
        spaces = SpaceSpec.uniform(d.vertices)
        for item in enumerate_models(d, spaces, only_faithful=True):
            g = contract(item.model, echo_intervention(spaces))
            for x, a in g.as_dict().items():
                expected = topological_contract(item.model, dict(zip(d.vertices, x)))
                assert a == tuple(expected[v] for v in d.vertices)


@st.composite
def faithful_consistent_models(draw):
    d = draw(st.sampled_from([d for d in all_digraphs(3) if dg.sources(d)]))
    spaces = SpaceSpec.uniform(d.vertices)
    models = [i.model for i in enumerate_models(d, spaces, only_faithful=True) if i.consistent]
    if not models:
        return None
    return draw(st.sampled_from(models))


@settings(max_examples=80, deadline=None)
@given(faithful_consistent_models(), st.data())
def test_reduce_invariants(m, data):
    if m is None:
        return
    s = data.draw(st.sampled_from(dg.sorted_sources(m.structure)))
    o = data.draw(st.integers(0, 1))
    r = reduce(m, s, o)
    assert r.vertices == tuple(v for v in m.vertices if v != s)
    assert set(r.structure.edges) <= set(dg.remove_vertex(m.structure, s).edges)
    assert is_faithful(r)
    assert is_consistent(r)
    # tables of non-children are untouched
    for v in r.vertices:
        if v not in dg.children(m.structure, s):
            assert r.table(v) == m.table(v)
