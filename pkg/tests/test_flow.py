import itertools
import warnings
from pathlib import Path

import pytest

from causalflow import digraph as dg
from causalflow.digraph import Digraph
from causalflow.errors import CausalFlowError, InconsistentModelError, UnfaithfulModelError
from causalflow.flow import (
    FlowGraph,
    build_annotated_flow,
    build_flow,
    leaves,
    nontrivial_leaves_with_source,
)
from causalflow.formats import parse_graph, parse_model
from causalflow.model import CausalModel, SpaceSpec
from causalflow.superflow import (
    NonSOCRootWarning,
    build_superflow,
    certify_causal_only,
    edge_subsets,
    is_superflow_of,
    removable_edges,
)

FIX = Path(__file__).parent / "fixtures"


def test_single_vertex():
    d = Digraph("A")
    m = CausalModel.build(d, SpaceSpec.uniform("A"), {"A": [0]})
    assert len(build_flow(m)) == 1
    sf = build_superflow(d)
    assert len(sf) == 1 and sf.is_leaf(d)
    assert certify_causal_only(d)


def test_nontrivial_leaves_with_source():
    g = FlowGraph(Digraph("AB", [("A", "B")]))
    assert nontrivial_leaves_with_source(g) == [g.root]
    g2 = FlowGraph(Digraph("AB", [("A", "B"), ("B", "A")]))
    assert nontrivial_leaves_with_source(g2) == []
    g3 = FlowGraph(Digraph("A"))
    assert nontrivial_leaves_with_source(g3) == []


def test_flow_annotations():
    m = parse_model((FIX / "switch.model").read_text())
    g = build_annotated_flow(m)
    labels = set().union(*g.annotations.values())
    assert ("P", 0) in labels and ("P", 1) in labels
    f = build_flow(m)
    root_edges = [f.annotations[(f.root, v)] for v in f.successors(f.root)]
    assert all(lbl <= {("P", 0), ("P", 1)} for lbl in root_edges)


def test_flow_rejects_bad_models():
    two = Digraph("AB", [("A", "B"), ("B", "A")])
    ident = CausalModel.build(two, SpaceSpec.uniform("AB"), {"A": [0, 1], "B": [0, 1]})
    with pytest.raises(InconsistentModelError):
        build_flow(ident)
    const = CausalModel.build(Digraph("AB", [("A", "B")]), SpaceSpec.uniform("AB"), {"A": [0], "B": [0, 0]})
    with pytest.raises(UnfaithfulModelError):
        build_flow(const)


def test_merging_uses_structure_only():
    # both reductions of P give the same structure A -> B
    d = Digraph("PAB", [("P", "B"), ("A", "B")])
    m = CausalModel.build(d, SpaceSpec.uniform("PAB"), {"P": [0], "A": [0], "B": [0, 1, 1, 0]})
    f = build_flow(m)
    assert f.successors(f.root) == [Digraph("AB", [("A", "B")]), Digraph("PB", [("P", "B")])]


def test_removable_edges_and_subsets():
    d = parse_graph((FIX / "switch_root.dg").read_text())
    assert removable_edges(d, "P") == [("A", "B"), ("B", "A")]
    assert list(edge_subsets([1, 2])) == [(), (1,), (2,), (1, 2)]


def test_superflow_of_non_soc_root_warns():
    two = Digraph("AB", [("A", "B"), ("B", "A")])
    with pytest.warns(NonSOCRootWarning):
        sf = build_superflow(two)
    assert len(sf) == 1
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert not certify_causal_only(two)


def test_is_superflow_of():
    d = parse_graph((FIX / "switch_root.dg").read_text())
    sf = build_superflow(d)
    f = build_flow(parse_model((FIX / "switch.model").read_text()))
    assert is_superflow_of(sf, f)
    bad = FlowGraph(d)
    bad.add_edge(d, Digraph("AB", [("A", "B"), ("B", "A")]))
    assert not is_superflow_of(sf, bad)
    with pytest.raises(CausalFlowError):
        is_superflow_of(sf, FlowGraph(Digraph("AB")))


def test_superflow_annotations_carry_removed_sets():
    d = parse_graph((FIX / "switch_root.dg").read_text())
    sf = build_superflow(d, annotate_removed=True)
    edgeless = Digraph("AB")
    assert sf.annotations[(d, edgeless)] == {("P", frozenset({("A", "B"), ("B", "A")}))}


def test_superflow_nodes_are_soc():
    d = parse_graph((FIX / "catalog_g.dg").read_text())
    sf = build_superflow(d)
    assert all(dg.is_soc(n) for n in sf.nodes)
    assert len(leaves(sf)) >= 1


@pytest.mark.parametrize("n", range(2, 7))
def test_path_superflow_is_a_line(n):
    vs = [f"v{k}" for k in range(n)]
    d = Digraph(vs, list(zip(vs, vs[1:])))
    sf = build_superflow(d)
    assert sf.layer_sizes() == (1,) * n
    assert len(sf.edges) == n - 1


def test_superflow_layers_shrink():
    d = parse_graph((FIX / "catalog_c_root.dg").read_text())
    sf = build_superflow(d)
    for u, v in sf.edges:
        assert len(v.vertices) == len(u.vertices) - 1
        assert set(v.edges) <= set(u.edges)


def test_every_leaf_of_certified_roots_is_trivial():
    for name in ("example_a.dg", "example_b.dg", "example_c.dg", "example_d.dg"):
        sf = build_superflow(parse_graph((FIX / name).read_text()))
        assert all(len(n.vertices) == 1 for n in leaves(sf))


def test_flow_paths_reach_every_layer():
    m = parse_model((FIX / "switch.model").read_text())
    f = build_flow(m)
    depth = {f.root: 0}
    for n in sorted(f.nodes, key=lambda x: -len(x.vertices)):
        for s in f.successors(n):
            depth[s] = depth[n] + 1
    assert set(depth) == f.nodes
    assert max(depth.values()) == len(m.vertices) - 1


def test_flow_of_acyclic_models_inside_superflow():
    from causalflow.enumeration import all_digraphs
    from causalflow.model import enumerate_models

    for d in itertools.islice(all_digraphs(3, ("not-cyclic", "connected")), 10):
        sf = build_superflow(d)
        for item in enumerate_models(d, SpaceSpec.uniform(d.vertices), only_faithful=True):
            assert is_superflow_of(sf, build_flow(item.model))
