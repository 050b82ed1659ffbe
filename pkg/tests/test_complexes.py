import itertools
import random

import pytest

from spinelab.complexes import (
    SimplicialComplex,
    add_basepoint_loop,
    add_basepoint_mark,
    boundary_of_simplex,
    delta_cells,
    delta_construction,
    delta_homology_check,
    join_last_two,
    pattern_face,
    pattern_quotient,
    random_complex,
    rp2,
    set_partitions,
    spine_quotient,
    stab_target,
    stabilization_chain_map,
)
from spinelab.enumeration import EnumerationQuery, ResourceBudgetExceeded, enumerate_graphs
from spinelab.graphs import GraphError, canonical_form, is_reduced, rank, rose, theta
from spinelab.homology import betti_q, homology_q_summary, homology_z, verify_dd_zero
from spinelab.stability import alpha_equals_beta_mu_mu, stable_range


def test_delta_of_a_point():
    z = SimplicialComplex.from_facets([(0,)])
    for d in range(5):
        assert len(delta_cells(z, d)) == 1
    assert betti_q(delta_construction(z, 4))[:4] == [1, 0, 0, 0]


def test_delta_of_an_edge_counts():
    z = SimplicialComplex.from_facets([(0, 1)])
    assert len(delta_cells(z, 1)) == 4
    assert len(delta_cells(z, 2)) == 8


def test_delta_cells_match_brute_force():
    z = random_complex(random.Random(11), 6)
    faces = {frozenset(f) for d in range(z.dim + 1) for f in z.faces(d)}
    for d in range(3):
        brute = [t for t in itertools.product(z.vertices, repeat=d + 1) if frozenset(t) in faces]
        assert delta_cells(z, d) == sorted(brute)


def test_delta_examples():
    assert delta_homology_check(boundary_of_simplex(2), 2).delta["betti"][1] == 1
    rep = delta_homology_check(boundary_of_simplex(3), 2)
    assert rep.equal and rep.delta["betti"] == [1, 0, 1]
    two_points = SimplicialComplex.from_facets([(0,), (1,)])
    assert delta_homology_check(two_points, 2).delta["betti"][0] == 2
    rep = delta_homology_check(rp2(), 2)
    assert rep.equal and rep.delta["torsion"][1] == [2]


def test_delta_boundaries_square_to_zero():
    assert verify_dd_zero(delta_construction(rp2(), 3))


def test_pattern_counts():
    assert len(set_partitions(1, 3)) == 1
    assert len(set_partitions(2, 2)) == 2
    assert len(set_partitions(3, 2)) == 4
    assert [len(set_partitions(k, 9)) for k in range(1, 7)] == [1, 2, 5, 15, 52, 203]


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_pattern_face_identities(n):
    # semi-simplicial identities d_i d_j = d_{j-1} d_i for i < j
    for d in range(2, 6):
        for cell in set_partitions(d + 1, n):
            for j in range(d + 1):
                for i in range(j):
                    assert pattern_face(pattern_face(cell, j), i) == pattern_face(pattern_face(cell, i), j - 1)


def test_pattern_quotient_rank_one_is_a_point_in_low_degrees():
    assert betti_q(pattern_quotient(1, 4))[:4] == [1, 0, 0, 0]


def test_spine_two_zero():
    sq = spine_quotient(2, 0)
    assert sq.complex.cell_counts() == [2, 1]
    assert homology_q_summary(sq.complex).betti == [1, 0]


def test_spine_one_one():
    sq = spine_quotient(1, 1)
    assert sq.complex.cell_counts() == [1]
    assert betti_q(sq.complex) == [1]


@pytest.mark.parametrize("n,s", [(2, 1), (1, 3), (2, 2), (3, 0), (3, 1)])
def test_spine_consistency(n, s):
    sq = spine_quotient(n, s)
    assert verify_dd_zero(sq.complex)
    h = homology_z(sq.complex)
    assert h.euler_consistent
    assert sq.complex.cell_counts()[0] == len(enumerate_graphs(EnumerationQuery(n, s)))


def test_spine_truncation_and_budget():
    full = spine_quotient(3, 1)
    cut = spine_quotient(3, 1, max_dim=2)
    assert not cut.complex.complete
    assert cut.complex.cell_counts() == full.complex.cell_counts()[:3]
    with pytest.raises(ResourceBudgetExceeded):
        spine_quotient(3, 1, budget=100)


def test_spine_filters():
    loops = spine_quotient(3, 1, restrict_to_L=True)
    assert verify_dd_zero(loops.complex)
    low = spine_quotient(3, 1, degree_max=1)
    assert verify_dd_zero(low.complex)
    assert low.complex.cell_counts()[0] < spine_quotient(3, 1).complex.cell_counts()[0]


def test_spine_workers_agree():
    a = spine_quotient(2, 3)
    b = spine_quotient(2, 3, workers=3)
    assert a.complex.to_json() == b.complex.to_json()


def test_spine_cell_orbits_match_flag_orbits():
    # each d-cell of the (2,0) spine is one Aut-orbit of flags: theta has 3 edges, one orbit
    sq = spine_quotient(2, 0)
    (gi, chain), = sq.complex.cells[1]
    assert sq.graphs[gi] == canonical_form(theta())


def test_graph_stabilizations():
    g = theta(2)
    assert rank(add_basepoint_loop(g)) == 3 and is_reduced(add_basepoint_loop(g))
    assert add_basepoint_mark(g).s == 3
    h = join_last_two(g)
    assert h.basepoint is None and rank(h) == 3 and is_reduced(h)
    with pytest.raises(GraphError):
        join_last_two(rose(2, 1))


def test_alpha_on_rank_one():
    src, tgt = spine_quotient(1, 1), spine_quotient(2, 1)
    f = stabilization_chain_map("alpha", src, tgt)
    (row, value), = f.matrices[0].columns[0].items()
    assert tgt.complex.cells[0][row][0] == tgt.graphs.index(canonical_form(rose(2, 1)))
    assert value == 1


@pytest.mark.parametrize("kind,n,s", [("alpha", 2, 1), ("mu", 2, 2), ("beta", 2, 3), ("beta", 2, 2),
                                      ("mu", 1, 2), ("alpha", 1, 3)])
def test_chain_maps_commute(kind, n, s):
    tn, ts = stab_target(kind, n, s)
    f = stabilization_chain_map(kind, spine_quotient(n, s, max_dim=3), spine_quotient(tn, ts, max_dim=3))
    assert f.commutes()


def test_beta_mu_mu_equals_alpha_on_cells():
    assert alpha_equals_beta_mu_mu(1, 1, 2)
    assert alpha_equals_beta_mu_mu(2, 1, 2)


def test_stable_ranges():
    assert stable_range("alpha", 1, 1, 0) == "surjective"
    assert stable_range("alpha", 2, 1, 0) == "iso"
    assert stable_range("alpha", 2, 1, 1) == "none"
    assert stable_range("beta", 2, 2, 0) == "surjective"
    assert stable_range("beta", 3, 2, 0) == "iso"
    assert stable_range("beta", 2, 3, 0) == "iso"
    assert stable_range("mu", 4, 1, 1) == "iso"
