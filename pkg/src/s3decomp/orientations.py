"""(3,0)-orientations of configurations, signatures, and S3-decompositions.

An orientation stores one bit per pair, in the order of :meth:`Pairing.pairs`
(sorted by lower point). Bit 0 means the lower-indexed point is the tail,
bit 1 means the higher-indexed point is the tail.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb

import numpy as np

from . import kernels
from .flow import orient_with_indegrees
from .pairing import Multigraph, Pairing

BRUTE_FORCE_MAX_PAIRS = 30


class DivisibilityError(ValueError):
    """Raised when 3 does not divide the edge count, so no S3-decomposition can exist."""


@dataclass(frozen=True)
class Orientation:
    bits: tuple

    @classmethod
    def from_mask(cls, mask: int, m: int) -> "Orientation":
        return cls(tuple((mask >> i) & 1 for i in range(m)))

    @classmethod
    def from_bitstring(cls, s: str) -> "Orientation":
        if set(s) - {"0", "1"}:
            raise ValueError("orientation bit string may only contain 0 and 1")
        return cls(tuple(int(c) for c in s))

    def to_bitstring(self) -> str:
        return "".join(map(str, self.bits))

    def tails(self, p: Pairing) -> np.ndarray:
        pairs = p.pairs()
        if len(self.bits) != len(pairs):
            raise ValueError(f"orientation has {len(self.bits)} bits, pairing has {len(pairs)} pairs")
        b = np.asarray(self.bits, dtype=np.int64)
        return pairs[np.arange(len(pairs)), b]

    def heads(self, p: Pairing) -> np.ndarray:
        pairs = p.pairs()
        b = np.asarray(self.bits, dtype=np.int64)
        return pairs[np.arange(len(pairs)), 1 - b]


@dataclass(frozen=True)
class Signature:
    n: int
    special_points: frozenset
    d: int = 4

    def __post_init__(self):
        object.__setattr__(self, "special_points", frozenset(int(x) for x in self.special_points))
        if self.n % 3:
            raise ValueError("signatures need 3 | n")
        cells = [q // self.d for q in self.special_points]
        if len(set(cells)) != len(cells):
            raise ValueError("two special points share a cell")
        if len(cells) != 2 * self.n // 3:
            raise ValueError(f"a signature has exactly {2 * self.n // 3} special points")
        if any(not 0 <= q < self.n * self.d for q in self.special_points):
            raise ValueError("special point out of range")

    @property
    def centers(self) -> frozenset:
        return frozenset(q // self.d for q in self.special_points)

    def is_in_point(self, q: int) -> bool:
        return q in self.special_points or (q // self.d) not in self.centers


@dataclass(frozen=True)
class Star:
    center: int
    leaves: tuple


@dataclass(frozen=True)
class StarDecomposition:
    stars: tuple

    def to_json(self) -> str:
        return json.dumps([{"center": s.center, "leaves": list(s.leaves)} for s in self.stars])

    @classmethod
    def from_json(cls, text: str) -> "StarDecomposition":
        return cls(tuple(Star(int(o["center"]), tuple(int(x) for x in o["leaves"]))
                         for o in json.loads(text)))


def out_degree_profile(p: Pairing, o: Orientation) -> np.ndarray:
    return np.bincount(o.tails(p) // p.d, minlength=p.n)


def is_30_orientation(p: Pairing, o: Orientation) -> bool:
    prof = out_degree_profile(p, o)
    return bool(np.all((prof == 0) | (prof == 3)))


def _pair_cells(p: Pairing):
    pairs = p.pairs()
    return pairs[:, 0] // p.d, pairs[:, 1] // p.d


def count_orientations_bruteforce(p: Pairing, backend=None) -> int:
    """Y(p) by trying all 2^m orientations."""
    m = p.n * p.d // 2
    if m > BRUTE_FORCE_MAX_PAIRS:
        raise ValueError(f"{m} pairs exceeds the brute-force cap of {BRUTE_FORCE_MAX_PAIRS}")
    lo, hi = _pair_cells(p)
    return kernels.count30(lo, hi, p.n, backend=backend)


def count_orientations_bruteforce_batch(partners: np.ndarray, n: int, d: int, backend=None) -> np.ndarray:
    """Brute-force Y for each row of a ``(count, d*n)`` partner array."""
    partners = np.asarray(partners, dtype=np.int64)
    idx = np.arange(n * d)
    order = np.argsort(np.where(partners > idx, idx, n * d + idx), axis=1, kind="stable")[:, : n * d // 2]
    lo_pts = order
    hi_pts = np.take_along_axis(partners, lo_pts, axis=1)
    return kernels.count30_batch(lo_pts // d, hi_pts // d, n, backend=backend)


def count_orientations_fast(p: Pairing) -> int:
    """Y(p) by summing over center sets.

    Given centers C, every center-leaf pair points at the leaf and each center
    must collect exactly one head from the center-center pairs. Each component
    of the center-center multigraph must then be unicyclic; its tree edges are
    forced and its cycle has two directions (a loop's two points count as two).
    """
    if p.d != 4:
        raise ValueError("count_orientations_fast is specific to d = 4")
    n = p.n
    if n % 3:
        raise ValueError("3 must divide n")
    pairs = p.pairs() // p.d
    edge_list = [(int(u), int(v)) for u, v in pairs]
    total = 0
    for centers in combinations(range(n), 2 * n // 3):
        is_center = [False] * n
        for c in centers:
            is_center[c] = True
        cc = []
        feasible = True
        for u, v in edge_list:
            if is_center[u] and is_center[v]:
                cc.append((u, v))
            elif not is_center[u] and not is_center[v]:
                feasible = False
                break
        if not feasible:
            continue
        total += _unicyclic_factor(centers, cc)
    return total


def count_orientations_fast_kernel(p: Pairing, backend=None) -> int:
    """Same count as :func:`count_orientations_fast`, center sets enumerated as bitmasks (n <= 30)."""
    if p.d != 4 or p.n % 3:
        raise ValueError("needs d = 4 and 3 | n")
    if p.n > 30:
        raise ValueError("bitmask center enumeration is limited to n <= 30")
    lo, hi = _pair_cells(p)
    return kernels.count30_centers(lo, hi, p.n, 2 * p.n // 3, backend=backend)


def _unicyclic_factor(vertices, edges):
    parent = {v: v for v in vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    nverts, nedges = {}, {}
    for v in vertices:
        r = find(v)
        nverts[r] = nverts.get(r, 0) + 1
    for u, _ in edges:
        r = find(u)
        nedges[r] = nedges.get(r, 0) + 1
    factor = 1
    for r, k in nverts.items():
        if nedges.get(r, 0) != k:
            return 0
        factor *= 2
    return factor


def signature_of(p: Pairing, o: Orientation) -> Signature:
    """The unique signature a (3,0)-orientation extends: each center's special point is its head."""
    if not is_30_orientation(p, o):
        raise ValueError("not a (3,0)-orientation")
    prof = out_degree_profile(p, o)
    specials = [int(h) for h in o.heads(p) if prof[h // p.d] == 3]
    return Signature(p.n, frozenset(specials), d=p.d)


def extends(p: Pairing, s: Signature) -> bool:
    """True iff every pair joins an in-point of ``s`` to an out-point."""
    if p.n != s.n or p.d != s.d:
        raise ValueError("pairing and signature disagree on n or d")
    return all(s.is_in_point(int(u)) != s.is_in_point(int(v)) for u, v in p.pairs())


def orientation_from_signature(p: Pairing, s: Signature) -> Orientation:
    """Orient every pair from its out-point to its in-point; ``p`` must extend ``s``."""
    if not extends(p, s):
        raise ValueError("pairing does not extend the signature")
    return Orientation(tuple(0 if s.is_in_point(int(v)) else 1 for _, v in p.pairs()))


def enumerate_signatures(n: int, d: int = 4):
    for centers in combinations(range(n), 2 * n // 3):
        for offsets in np.ndindex(*([d] * len(centers))):
            yield Signature(n, frozenset(c * d + k for c, k in zip(centers, offsets)), d=d)


def count_signatures(n: int) -> Fraction:
    """Number of signatures on ``n`` cells of 4 points, ``C(n, 2n/3) * 4^(2n/3)``."""
    if n < 0 or n % 3:
        raise ValueError("3 must divide n")
    k = 2 * n // 3
    return Fraction(comb(n, k) * 4**k)


# -- decompositions of multigraphs -----------------------------------------

def _check_decomposable_input(g: Multigraph):
    if any(x != 4 for x in g.degrees()):
        raise ValueError("graph is not 4-regular")
    if len(g.edges) % 3:
        raise DivisibilityError(f"3 does not divide e(G) = {len(g.edges)}")


def find_star_decomposition(g: Multigraph) -> StarDecomposition | None:
    """An S3-decomposition of a 4-regular multigraph, or ``None`` if none exists.

    Backtracks over center/leaf labels (leaves must be independent and number
    n/3, each center sends at most three edges to leaves); every complete
    labelling is settled by a max-flow check for in-degree 4 at leaves and 1 at
    centers.
    """
    _check_decomposable_input(g)
    n = g.n
    if n == 0:
        return StarDecomposition(())
    n_leaves = n // 3
    nbrs = [[w for w, _ in g.adjacency[v]] for v in range(n)]
    has_loop = [any(w == v for w in nbrs[v]) for v in range(n)]
    label = [-1] * n  # 0 leaf, 1 center
    leaf_deg = [0] * n  # edge-ends to leaves, with multiplicity
    counts = [0, 0]

    def pick():
        best, best_key = -1, None
        for v in range(n):
            if label[v] == -1:
                key = (sum(label[w] != -1 for w in nbrs[v]), leaf_deg[v])
                if best_key is None or key > best_key:
                    best, best_key = v, key
        return best

    def can_label(v, lab):
        if lab == 0:
            if counts[0] >= n_leaves or has_loop[v] or leaf_deg[v] > 0:
                return False
            for w in set(nbrs[v]):
                if label[w] == 1 and leaf_deg[w] + nbrs[v].count(w) > 3:
                    return False
            return True
        if counts[1] >= n - n_leaves:
            return False
        return leaf_deg[v] <= 3

    def apply(v, lab, sign):
        label[v] = lab if sign > 0 else -1
        counts[lab] += sign
        if lab == 0:
            for w in nbrs[v]:
                leaf_deg[w] += sign

    def rec():
        v = pick()
        if v == -1:
            demand = [4 if label[u] == 0 else 1 for u in range(n)]
            heads = orient_with_indegrees(n, g.edges, demand)
            return heads
        for lab in (0, 1):
            if can_label(v, lab):
                apply(v, lab, +1)
                heads = rec()
                if heads is not None:
                    return heads
                apply(v, lab, -1)
        return None

    heads = rec()
    if heads is None:
        return None
    leaves_of = {v: [] for v in range(n) if label[v] == 1}
    for (u, v), h in zip(g.edges, heads):
        tail = v if h == u else u
        leaves_of[tail].append(h)
    return StarDecomposition(tuple(Star(c, tuple(sorted(ls))) for c, ls in sorted(leaves_of.items())))


def verify_star_decomposition(g: Multigraph, s: StarDecomposition) -> bool:
    """True iff the stars use every edge of ``g`` exactly once, three edges per star."""
    from collections import Counter

    remaining = Counter(g.edges)
    for star in s.stars:
        if len(star.leaves) != 3:
            return False
        for leaf in star.leaves:
            e = (min(star.center, leaf), max(star.center, leaf))
            if remaining[e] <= 0:
                return False
            remaining[e] -= 1
    ok = all(c == 0 for c in remaining.values())
    if ok:
        assert len(g.edges) % 3 == 0
    return ok


def decomposable_fraction(n: int, samples: int, seed: int, backend=None) -> dict:
    """Share of uniformly random simple 4-regular graphs on ``n`` vertices with an S3-decomposition."""
    from .pairing import sample_simple_graph

    hits = 0
    tries = 0
    for i in range(samples):
        g, t = sample_simple_graph(n, 4, seed, index=i, backend=backend)
        tries += t
        dec = find_star_decomposition(g)
        if dec is not None:
            if not verify_star_decomposition(g, dec):
                raise AssertionError("solver produced an invalid decomposition")
            hits += 1
    return {"n": n, "samples": samples, "decomposable": hits, "fraction": hits / samples,
            "configurations_drawn": tries}
