import itertools

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from s3decomp.flow import edge_connectivity, max_flow, orient_with_indegrees
from s3decomp.gallery import (
    build_tightness_example, circulant, complete_graph, gallery, independent_set_obstruction, verify_named,
)
from s3decomp.orientations import DivisibilityError, find_star_decomposition
from s3decomp.pairing import Multigraph, is_simple


def test_tightness_structure():
    g = build_tightness_example().graph
    assert g.n == 12 and len(g.edges) == 24
    assert g.degrees() == [4] * 12
    assert is_simple(g)
    assert edge_connectivity(g) == 4
    assert nx.edge_connectivity(nx.Graph(g.edges)) == 4


def test_tightness_rejects_other_parameters():
    with pytest.raises(ValueError):
        build_tightness_example(4, 5)


def test_tightness_obstruction():
    obs = independent_set_obstruction(build_tightness_example().graph)
    assert obs["surviving"] == 0 and obs["certified_non_decomposable"]
    assert obs["candidates"] == 495


def test_c9_obstruction_survivor_contains_solution():
    g = circulant(9, (1, 2))
    obs = independent_set_obstruction(g)
    assert obs["surviving"] >= 1
    dec = find_star_decomposition(g)
    centers = tuple(sorted(s.center for s in dec.stars))
    all_survivors = _survivors(g)
    assert centers in all_survivors


def _survivors(g):
    out = set()
    for leaves in itertools.combinations(range(g.n), g.n // 3):
        if not any(u in leaves and v in leaves for u, v in g.edges):
            out.add(tuple(sorted(set(range(g.n)) - set(leaves))))
    return out


def test_k5():
    k5 = complete_graph(5)
    assert edge_connectivity(k5) == 4
    with pytest.raises(DivisibilityError):
        independent_set_obstruction(k5)


def test_disconnected_connectivity_zero():
    two = Multigraph(8, tuple(complete_graph(4).edges) + tuple((u + 4, v + 4) for u, v in complete_graph(4).edges))
    assert edge_connectivity(two) == 0


def test_obstruction_size_cap():
    with pytest.raises(ValueError):
        independent_set_obstruction(circulant(18, (1, 2)))


def test_gallery_expectations_hold():
    results = [verify_named(ng) for ng in gallery()]
    assert [r["status"] for r in results] == ["pass"] * len(results)
    for ng, r in zip(gallery(), results):
        if r.get("obstruction", {}).get("certified_non_decomposable"):
            assert r["decomposable"] is False


@settings(max_examples=30, deadline=None)
@given(n=st.integers(2, 9), p=st.floats(0.2, 0.9), seed=st.integers(0, 2**30))
def test_edge_connectivity_matches_networkx(n, p, seed):
    G = nx.gnp_random_graph(n, p, seed=seed)
    g = Multigraph(n, tuple(G.edges))
    want = nx.edge_connectivity(G) if nx.is_connected(G) else 0
    assert edge_connectivity(g) == want


def test_max_flow_matches_networkx():
    rng = np.random.default_rng(0)
    for _ in range(20):
        cap = {}
        G = nx.DiGraph()
        for _ in range(20):
            u, v = (int(x) for x in rng.integers(0, 7, 2))
            if u != v:
                c = int(rng.integers(1, 5))
                cap.setdefault(u, {})[v] = cap.get(u, {}).get(v, 0) + c
                G.add_edge(u, v, capacity=cap[u][v])
        G.add_nodes_from([0, 6])
        assert max_flow(cap, 0, 6) == nx.maximum_flow_value(G, 0, 6)


def test_orientation_feasibility_against_bruteforce():
    rng = np.random.default_rng(1)
    for _ in range(40):
        n = 4
        edges = [tuple(int(x) for x in rng.integers(0, n, 2)) for _ in range(6)]
        demand = [int(x) for x in rng.multinomial(6, [1 / n] * n)]
        feasible = False
        for heads in itertools.product(*[(u, v) for u, v in edges]):
            if [heads.count(v) for v in range(n)] == demand:
                feasible = True
                break
        res = orient_with_indegrees(n, edges, demand)
        assert (res is not None) == feasible
        if res is not None:
            assert [list(res).count(v) for v in range(n)] == demand
            assert all(h in e for h, e in zip(res, edges))
