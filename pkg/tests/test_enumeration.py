import json
import math

import pytest

from oracles import naive_flags, naive_reduced_classes, nx_isomorphic
from spinelab.enumeration import (
    CACHE_STATS,
    EnumerationQuery,
    ResourceBudgetExceeded,
    cache_dir,
    enumerate_flags,
    enumerate_forests,
    enumerate_graphs,
    verify_basepoint_loop_lemma,
    vertex_bound,
)
from spinelab.graphs import (
    UnsupportedParameterError,
    basepoint_loop_count,
    canonical_form,
    degree,
    is_reduced,
    rank,
    rose,
    theta,
)

# class counts of reduced thorned graphs, confirmed against the brute-force oracle below
KNOWN = {(1, 1): 1, (1, 2): 2, (1, 3): 5, (2, 0): 2, (2, 1): 4, (2, 2): 13, (2, 3): 62,
         (3, 0): 8, (3, 1): 25, (3, 2): 138, (4, 0): 43, (4, 1): 230}


def _max_vertices(n, s):
    return 2 * n + s - 2 if s else 2 * n - 2


@pytest.mark.parametrize("n,s", [(1, 1), (1, 2), (1, 3), (2, 0), (2, 1), (2, 2), (3, 0), (3, 1), (2, 3)])
def test_counts_match_brute_force(n, s):
    fast = [cg.graph for cg in enumerate_graphs(EnumerationQuery(n, s))]
    slow = naive_reduced_classes(n, s, _max_vertices(n, s))
    assert len(fast) == len(slow) == KNOWN[(n, s)]
    for g in slow:
        assert sum(nx_isomorphic(g, h) for h in fast) == 1


@pytest.mark.parametrize("n,s", sorted(KNOWN))
def test_known_counts_and_validity(n, s):
    graphs = enumerate_graphs(EnumerationQuery(n, s), use_cache=True)
    assert len(graphs) == KNOWN[(n, s)]
    codes = [cg.canonical_bytes for cg in graphs]
    assert codes == sorted(set(codes))
    for cg in graphs:
        g = cg.graph
        assert rank(g) == n and g.s == s and is_reduced(g)
        assert g.vertex_count < vertex_bound(n, s)


def test_rank_two_examples():
    graphs = enumerate_graphs(EnumerationQuery(2, 0))
    assert {cg.graph.vertex_count for cg in graphs} == {1, 2}
    assert len(graphs) == 2
    assert len(enumerate_graphs(EnumerationQuery(1, 1))) == 1


def test_non_reduced_rank_two():
    # rose, theta and the dumbbell
    assert len(enumerate_graphs(EnumerationQuery(2, 0, reduced=False))) == 3


@pytest.mark.parametrize("n,s,k", [(2, 1, 0), (2, 1, 1), (3, 1, 1), (3, 2, 2), (2, 3, 1), (2, 3, 3)])
def test_degree_filter_matches_post_filter(n, s, k):
    filtered = enumerate_graphs(EnumerationQuery(n, s, degree_max=k))
    everything = enumerate_graphs(EnumerationQuery(n, s), use_cache=True)
    assert filtered == [cg for cg in everything if degree(cg.graph) <= k]


@pytest.mark.parametrize("n,s", [(2, 1), (3, 1), (2, 3), (3, 2)])
def test_basepoint_loop_filters_partition(n, s):
    everything = enumerate_graphs(EnumerationQuery(n, s), use_cache=True)
    with_loop = enumerate_graphs(EnumerationQuery(n, s, require_basepoint_loop=True))
    without = enumerate_graphs(EnumerationQuery(n, s, forbid_basepoint_loop=True))
    assert with_loop == [cg for cg in everything if basepoint_loop_count(cg.graph)]
    assert len(with_loop) + len(without) == len(everything)


def test_degree_filter_needs_basepoint():
    with pytest.raises(UnsupportedParameterError):
        EnumerationQuery(2, 0, degree_max=0)
    with pytest.raises(UnsupportedParameterError):
        EnumerationQuery(0, 1)


def test_rose_has_degree_zero_and_is_the_only_one():
    graphs = enumerate_graphs(EnumerationQuery(3, 2, degree_max=0))
    assert graphs == [canonical_form(rose(3, 2))]


def test_theta_forests_and_flags():
    assert len(enumerate_forests(theta())) == 3
    assert enumerate_flags(theta(), 2) == []
    assert len(enumerate_flags(theta(), 1)) == 3


@pytest.mark.parametrize("n,s", [(2, 2), (3, 0), (3, 1)])
def test_flag_counts_match_subset_enumeration(n, s):
    for cg in enumerate_graphs(EnumerationQuery(n, s)):
        for p in (1, 2, 3):
            assert len(enumerate_flags(cg.graph, p)) == naive_flags(cg.graph, p)


def test_budget_is_enforced():
    with pytest.raises(ResourceBudgetExceeded):
        enumerate_graphs(EnumerationQuery(3, 1), budget=10)


def test_worker_count_does_not_change_output():
    q = EnumerationQuery(3, 2)
    assert enumerate_graphs(q, workers=1) == enumerate_graphs(q, workers=3)


def test_cache_roundtrip():
    q = EnumerationQuery(3, 1, degree_max=2)
    first = enumerate_graphs(q, use_cache=True)
    hits = CACHE_STATS.hits
    second = enumerate_graphs(q, use_cache=True)
    assert first == second and CACHE_STATS.hits == hits + 1
    path = cache_dir() / f"graphs-{q.key()}.jsonl"
    lines = path.read_text().splitlines()
    assert [json.loads(x)["canonical"] for x in lines] == [cg.hex for cg in first]


def test_lemma_small_ranks():
    rep = verify_basepoint_loop_lemma(4, 2)
    assert rep.passed
    for n in range(1, 5):
        w = rep.witnesses[n]
        assert w is not None and w["degree"] == math.ceil(n / 2)
