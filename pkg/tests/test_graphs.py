import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import naive_automorphism_order, nx_isomorphic
from spinelab.graphs import (
    NotApplicableError,
    StructuralError,
    ThornedGraph,
    basepoint_loop_count,
    basepoint_valence,
    bridges,
    brute_force_isomorphic,
    canonical_form,
    canonical_transport,
    collapse,
    decode,
    degree,
    dumbbell,
    euler_characteristic,
    is_forest,
    is_reduced,
    proof_identity_check,
    rank,
    rose,
    theta,
)
from spinelab.enumeration import EnumerationQuery, enumerate_graphs


def relabel(g: ThornedGraph, rng: random.Random) -> ThornedGraph:
    perm = list(range(g.vertex_count))
    rng.shuffle(perm)
    edges = [(perm[u], perm[v]) for u, v in g.edges]
    rng.shuffle(edges)
    edges = [(v, u) if rng.random() < 0.5 else (u, v) for u, v in edges]
    bp = None if g.basepoint is None else perm[g.basepoint]
    return ThornedGraph(g.vertex_count, tuple(edges), bp, tuple(perm[m] for m in g.marks))


def test_rose_invariants():
    g = rose(3, 2)
    assert rank(g) == 3
    assert euler_characteristic(g) == -2
    assert degree(g) == 0
    assert basepoint_valence(g) == 7
    assert basepoint_loop_count(g) == 3
    assert is_reduced(g)


def test_theta_and_dumbbell():
    assert rank(theta()) == 2 and is_reduced(theta())
    assert canonical_form(theta()).automorphism_order() == 12
    assert bridges(dumbbell()) != []
    assert not is_reduced(dumbbell())
    assert degree(theta(1)) == 1


def test_marked_rose_automorphisms():
    assert canonical_form(rose(2, 1)).automorphism_order() == 8


def test_disconnected_graph_has_no_rank():
    g = ThornedGraph(2, ((0, 0), (1, 1)))
    with pytest.raises(StructuralError):
        rank(g)


def test_collapse_examples():
    assert canonical_form(collapse(theta(), [0])) == canonical_form(rose(2, 0))
    assert canonical_form(collapse(dumbbell(), [1])) == canonical_form(rose(2, 0))


def test_collapse_rejects_cycles():
    assert not is_forest(theta(), [0, 1])
    with pytest.raises(Exception):
        collapse(theta(), [0, 1])


def test_marks_are_labelled():
    # two marks swapped between vertices give different thorned graphs
    a = ThornedGraph(2, ((0, 1), (0, 1), (1, 1)), 0, (0, 1))
    b = ThornedGraph(3, ((0, 1), (0, 2), (1, 2), (1, 2)), 0, (1, 2))
    c = ThornedGraph(3, ((0, 1), (0, 2), (1, 2), (1, 2)), 0, (2, 1))
    assert canonical_form(b) == canonical_form(c)  # symmetric positions
    d = ThornedGraph(3, ((0, 1), (0, 2), (1, 2), (1, 1)), 0, (1, 2))
    e = ThornedGraph(3, ((0, 1), (0, 2), (1, 2), (1, 1)), 0, (2, 1))
    assert canonical_form(d) != canonical_form(e)
    assert not nx_isomorphic(d, e)
    assert canonical_form(a).graph.s == 3


def test_proof_identity_normalization():
    g = theta(1)
    assert proof_identity_check(g)
    with pytest.raises(NotApplicableError):
        proof_identity_check(rose(2, 1))


def test_json_roundtrip():
    g = ThornedGraph(3, ((0, 1), (0, 2), (1, 2), (1, 1)), 0, (2,))
    assert ThornedGraph.from_json(g.to_json()) == g


@pytest.mark.parametrize("n,s", [(2, 0), (2, 2), (3, 1), (2, 3)])
def test_canonical_form_is_relabelling_invariant(n, s):
    rng = random.Random(n * 10 + s)
    for cg in enumerate_graphs(EnumerationQuery(n, s)):
        g = cg.graph
        for _ in range(3):
            h = relabel(g, rng)
            assert canonical_form(h) == cg
            assert decode(cg.canonical_bytes) == cg.graph


@pytest.mark.parametrize("n,s", [(2, 0), (2, 1), (2, 2), (3, 0), (3, 1)])
def test_automorphism_order_matches_oracle(n, s):
    for cg in enumerate_graphs(EnumerationQuery(n, s)):
        assert cg.automorphism_order() == naive_automorphism_order(cg.graph)


def test_canonical_agrees_with_isomorphism_oracles():
    graphs = [cg.graph for cg in enumerate_graphs(EnumerationQuery(2, 2))]
    for a in graphs:
        for b in graphs:
            same = canonical_form(a) == canonical_form(b)
            assert same == nx_isomorphic(a, b) == brute_force_isomorphic(a, b)


def test_transport_is_compatible_with_collapse():
    rng = random.Random(5)
    for cg in enumerate_graphs(EnumerationQuery(3, 1)):
        h = relabel(cg.graph, rng)
        target, emap = canonical_transport(h)
        assert target == cg
        assert sorted(emap) == list(range(h.edge_count))
        for i, (u, v) in enumerate(h.edges):
            a, b = target.graph.edges[emap[i]]
            assert (u == v) == (a == b)
            if u != v:
                assert canonical_form(collapse(h, [i])) == canonical_form(collapse(target.graph, [emap[i]]))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3), st.integers(0, 3), st.integers(0, 10_000))
def test_collapse_preserves_rank_and_never_increases_degree(n, s, seed):
    graphs = enumerate_graphs(EnumerationQuery(n, s), use_cache=True)
    if not graphs:
        return
    rng = random.Random(seed)
    g = rng.choice(graphs).graph
    non_loops = [i for i, (u, v) in enumerate(g.edges) if u != v]
    if not non_loops:
        return
    e = rng.choice(non_loops)
    h = collapse(g, [e])
    assert rank(h) == rank(g)
    assert is_reduced(h)
    if s >= 1:
        assert degree(h) <= degree(g)
