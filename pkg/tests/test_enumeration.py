import random

import networkx as nx
import pytest

from causalflow import digraph as dg
from causalflow.enumeration import (
    GAP_FILTERS,
    all_digraphs,
    classify,
    classify_gap,
    gap_csv,
    iso_classes,
    iso_members,
    resolve_filter,
)
from causalflow.errors import CausalFlowError, LimitExceededError


@pytest.mark.parametrize("n,count", [(1, 1), (2, 4), (3, 64)])
def test_labeled_counts(n, count):
    assert sum(1 for _ in all_digraphs(n)) == count


def test_filters_and_negation():
    cyclic = list(all_digraphs(2, ["cyclic"]))
    assert [d.edge_label() for d in cyclic] == ["A>B;B>A"]
    assert len(list(all_digraphs(2, ["not-cyclic"]))) == 3
    assert len(list(all_digraphs(2, ["!connected"]))) == 1
    with pytest.raises(CausalFlowError):
        resolve_filter("bogus")


def test_filter_composition_matches_networkx():
    for d in all_digraphs(3, ["connected", "cyclic"]):
        g = _nx(d)
        assert nx.is_weakly_connected(g) and not nx.is_directed_acyclic_graph(g)


def _nx(d):
    g = nx.DiGraph(list(d.edges))
    g.add_nodes_from(d.vertices)
    return g


def test_iso_classes_match_networkx():
    classes = iso_classes(all_digraphs(3))
    assert len(classes) == 16
    assert sum(c.size for c in classes) == 64
    reps = [_nx(c.representative) for c in classes]
    for i, a in enumerate(reps):
        for b in reps[i + 1:]:
            assert not nx.is_isomorphic(a, b)


def test_vertex_guard(monkeypatch):
    with pytest.raises(LimitExceededError):
        next(all_digraphs(8))
    monkeypatch.setenv("CAUSALFLOW_LIMIT", "8")
    assert next(all_digraphs(8)).vertices[0] == "A"


def test_three_vertex_catalog_is_empty():
    assert classify_gap(3) == []


def test_classification_is_isomorphism_invariant():
    classes = iso_classes(all_digraphs(4, GAP_FILTERS))
    rows = classify(classes)
    rng = random.Random(7)
    for cls, row in zip(classes, rows):
        for member in iso_members(cls, 3, rng):
            assert dg.canonical_form(member) == cls.canonical
            other = classify(iso_classes([member]))[0]
            assert other.certified == row.certified
            assert other.superflow_nodes == row.superflow_nodes


def test_csv_shape():
    rows = classify_gap(4)
    lines = gap_csv(rows).splitlines()
    assert lines[0].startswith("class_id,canonical_form,")
    assert len(lines) == 8
    assert {line.split(",")[4] for line in lines[1:]} == {"true", "false"}
