import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from s3decomp.gallery import build_tightness_example, circulant, complete_graph
from s3decomp.orientations import (
    DivisibilityError, Orientation, Signature, Star, StarDecomposition, count_orientations_bruteforce,
    count_orientations_fast, count_orientations_fast_kernel, count_signatures, enumerate_signatures,
    extends, find_star_decomposition, is_30_orientation, orientation_from_signature, out_degree_profile,
    signature_of, verify_star_decomposition,
)
from s3decomp.pairing import (
    Multigraph, Pairing, multigraph_to_pairing, pairing_to_multigraph, sample_pairing, sample_simple_graph,
)


def _orientations(p):
    m = len(p.pairs())
    for mask in range(1 << m):
        yield Orientation.from_mask(mask, m)


def test_loop_profile():
    p = Pairing(1, 2, np.array([1, 0]))
    for o in _orientations(p):
        assert out_degree_profile(p, o).tolist() == [1]


def test_parallel_profile():
    p = Pairing.from_pairs(2, 4, [(0, 4), (1, 5), (2, 6), (3, 7)])
    o = Orientation((0, 0, 0, 0))
    assert out_degree_profile(p, o).tolist() == [4, 0]
    assert not is_30_orientation(p, o)


def test_profile_sums_to_pairs():
    p = sample_pairing(3, 4, seed=4)
    for o in _orientations(p):
        assert out_degree_profile(p, o).sum() == 6


def test_profile_330_is_30():
    p = Pairing.from_pairs(3, 4, [(0, 4), (1, 8), (5, 9), (2, 6), (3, 10), (7, 11)])
    # pick an orientation with profile [3, 3, 0] by search and check the predicate on it
    hits = [o for o in _orientations(p) if out_degree_profile(p, o).tolist() == [3, 3, 0]]
    assert hits and all(is_30_orientation(p, o) for o in hits)


def test_two_loops_in_a_cell_kill_every_orientation():
    p = Pairing.from_pairs(3, 4, [(0, 1), (2, 3), (4, 8), (5, 9), (6, 10), (7, 11)])
    assert not any(is_30_orientation(p, o) for o in _orientations(p))
    assert count_orientations_bruteforce(p) == 0
    assert count_orientations_fast(p) == 0


def test_double_triangle_fixture():
    p = Pairing.from_pairs(3, 4, [(0, 4), (1, 8), (5, 9), (2, 6), (3, 10), (7, 11)])
    assert count_orientations_bruteforce(p) == 6
    assert count_orientations_fast(p) == 6


def test_no_center_set_gives_zero():
    # every cell has a loop, so no cell can be a leaf
    p = Pairing.from_pairs(3, 4, [(0, 1), (4, 5), (8, 9), (2, 6), (3, 10), (7, 11)])
    assert count_orientations_fast(p) == 0
    assert count_orientations_bruteforce(p) == 0


def test_bruteforce_cap():
    with pytest.raises(ValueError):
        count_orientations_bruteforce(sample_pairing(18, 4, seed=0))


def test_fast_equals_bruteforce_all_n3(n3_partners, n3_y):
    for row, y in zip(n3_partners, n3_y):
        p = Pairing(3, 4, row)
        assert count_orientations_fast(p) == y
        assert count_orientations_fast_kernel(p) == y


def test_fast_equals_bruteforce_n6_sampled(backend):
    for r in range(100):
        p = sample_pairing(6, 4, seed=606, replicate=r)
        y = count_orientations_bruteforce(p, backend=backend)
        assert count_orientations_fast(p) == y
        assert count_orientations_fast_kernel(p, backend=backend) == y


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32))
def test_fast_counters_agree_n9(seed):
    p = sample_pairing(9, 4, seed)
    assert count_orientations_fast(p) == count_orientations_fast_kernel(p)


def test_signature_bijection_exhaustive(n3_partners, n3_y):
    sigs = list(enumerate_signatures(3))
    assert len(sigs) == count_signatures(3) == 48
    inpt = np.array([[s.is_in_point(q) for q in range(12)] for s in sigs])
    idx = np.arange(12)
    lo_mask = n3_partners > idx
    lo = np.where(lo_mask)[1].reshape(-1, 6)
    hi = np.take_along_axis(n3_partners, lo, axis=1)
    ext = np.stack([np.all(s_in[lo] != s_in[hi], axis=1) for s_in in inpt], axis=1)
    # each (3,0)-orientation extends exactly one signature and vice versa
    assert np.array_equal(ext.sum(axis=1), n3_y)


def test_orientation_signature_roundtrip():
    for r in range(40):
        p = sample_pairing(3, 4, seed=31, replicate=r)
        seen = set()
        for o in _orientations(p):
            if is_30_orientation(p, o):
                s = signature_of(p, o)
                assert extends(p, s)
                assert orientation_from_signature(p, s) == o
                assert s not in seen
                seen.add(s)
        assert len(seen) == count_orientations_bruteforce(p)


def test_leaf_leaf_pair_fails_extension():
    p = Pairing.from_pairs(3, 4, [(0, 1), (2, 4), (3, 5), (6, 8), (7, 10), (9, 11)])
    s = Signature(3, frozenset({4, 8}))   # cell 0 is a leaf with an internal pair
    assert not extends(p, s)


@pytest.mark.parametrize("n,expected", [(0, 1), (3, 48), (6, 3840)])
def test_count_signatures(n, expected):
    assert count_signatures(n) == expected


def test_count_signatures_rejects():
    with pytest.raises(ValueError):
        count_signatures(4)


def test_signature_validation():
    with pytest.raises(ValueError):
        Signature(3, frozenset({0, 1}))
    with pytest.raises(ValueError):
        Signature(3, frozenset({0}))


def test_bitstring_roundtrip():
    o = Orientation.from_bitstring("010011")
    assert o.to_bitstring() == "010011"
    with pytest.raises(ValueError):
        Orientation.from_bitstring("012")


def test_k5_divisibility():
    with pytest.raises(DivisibilityError):
        find_star_decomposition(complete_graph(5))


def test_non_regular_rejected():
    with pytest.raises(ValueError):
        find_star_decomposition(Multigraph(3, ((0, 1), (1, 2), (0, 2))))


def test_c9_decomposition_verified():
    g = circulant(9, (1, 2))
    dec = find_star_decomposition(g)
    assert dec is not None and verify_star_decomposition(g, dec)
    assert StarDecomposition.from_json(dec.to_json()) == dec


def test_tightness_infeasible():
    assert find_star_decomposition(build_tightness_example().graph) is None


def test_verifier_rejects_duplicated_edge():
    g = circulant(9, (1, 2))
    dec = find_star_decomposition(g)
    first = dec.stars[0]
    bad = StarDecomposition((Star(first.center, (first.leaves[0],) * 3),) + dec.stars[1:])
    assert not verify_star_decomposition(g, bad)


def test_verifier_empty():
    assert verify_star_decomposition(Multigraph(0, ()), StarDecomposition(()))


@pytest.mark.parametrize("n", [3, 6, 9, 12])
def test_solver_matches_orientation_count(n):
    for r in range(25):
        g = pairing_to_multigraph(sample_pairing(n, 4, seed=77, replicate=r))
        y = count_orientations_fast_kernel(multigraph_to_pairing(g))
        dec = find_star_decomposition(g)
        assert (dec is None) == (y == 0)
        if dec is not None:
            assert verify_star_decomposition(g, dec)


@pytest.mark.parametrize("n", [9, 12])
def test_solver_on_simple_graphs(n):
    for i in range(10):
        g, _ = sample_simple_graph(n, 4, seed=5, index=i)
        y = count_orientations_fast_kernel(multigraph_to_pairing(g))
        assert (find_star_decomposition(g) is None) == (y == 0)
