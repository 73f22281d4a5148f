"""Configurations of the pairing model P(n, d) and their multigraphs.

Points are indexed ``0 .. d*n - 1`` and point ``p`` lives in cell ``p // d``.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Iterator

import numpy as np

from . import kernels

DEFAULT_ENUMERATION_CAP = 10**8


class EnumerationCapError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Pairing:
    """A perfect matching on ``d*n`` points; ``partner[p]`` is the point matched to ``p``."""

    n: int
    d: int
    partner: np.ndarray

    def __post_init__(self):
        partner = np.asarray(self.partner, dtype=np.int64)
        npts = self.n * self.d
        if partner.shape != (npts,):
            raise ValueError(f"partner must have length d*n = {npts}")
        idx = np.arange(npts)
        if npts and (partner.min() < 0 or partner.max() >= npts):
            raise ValueError("partner entries out of range")
        if np.any(partner == idx) or np.any(partner[partner] != idx):
            raise ValueError("partner is not a fixed-point-free involution")
        partner.setflags(write=False)
        object.__setattr__(self, "partner", partner)

    def __eq__(self, other):
        return (isinstance(other, Pairing) and self.n == other.n and self.d == other.d
                and np.array_equal(self.partner, other.partner))

    def __hash__(self):
        return hash((self.n, self.d, self.partner.tobytes()))

    def cell(self, p):
        return p // self.d

    def pairs(self) -> np.ndarray:
        """``(m, 2)`` array of pairs ``(lo, hi)``, sorted by the lower point."""
        lo = np.flatnonzero(self.partner > np.arange(self.partner.size))
        return np.stack([lo, self.partner[lo]], axis=1)

    def neighbor_cells(self) -> np.ndarray:
        """``(n, d)`` array: entry ``[v, k]`` is the cell of the partner of point ``d*v + k``."""
        return (self.partner // self.d).reshape(self.n, self.d)

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "d": self.d, "partner": self.partner.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "Pairing":
        obj = json.loads(text)
        return cls(int(obj["n"]), int(obj["d"]), np.asarray(obj["partner"], dtype=np.int64))

    @classmethod
    def from_pairs(cls, n, d, pairs) -> "Pairing":
        partner = np.full(n * d, -1, dtype=np.int64)
        for u, v in pairs:
            partner[u] = v
            partner[v] = u
        return cls(n, d, partner)


@dataclass(frozen=True)
class Multigraph:
    n: int
    edges: tuple
    adjacency: tuple = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        edges = tuple((min(u, v), max(u, v)) for u, v in self.edges)
        for u, v in edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) outside 0..{self.n - 1}")
        adj = [[] for _ in range(self.n)]
        for i, (u, v) in enumerate(edges):
            adj[u].append((v, i))
            if u != v:
                adj[v].append((u, i))
            else:
                adj[u].append((u, i))
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "adjacency", tuple(tuple(a) for a in adj))

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def multiplicities(self) -> Counter:
        return Counter(self.edges)

    def to_edgelist(self) -> str:
        return "".join(f"{u} {v}\n" for u, v in self.edges)

    def to_json(self) -> str:
        return json.dumps([list(e) for e in self.edges])

    @classmethod
    def from_edgelist(cls, text: str, n: int | None = None) -> "Multigraph":
        edges = []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"line {lineno}: expected 'u v', got {line!r}")
            edges.append((int(parts[0]), int(parts[1])))
        if n is None:
            n = 1 + max((max(e) for e in edges), default=-1)
        return cls(n, tuple(edges))


def derived_rng(seed: int, *keys: int) -> np.random.Generator:
    """Philox generator keyed by ``(seed, *keys)``; stable across platforms."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), *map(int, keys)])))


def draw_matching_indices(npoints: int, rng: np.random.Generator) -> np.ndarray:
    """Step ``k`` of the sampler chooses uniformly among ``npoints - 2k - 1`` free points."""
    highs = np.arange(npoints - 1, 0, -2, dtype=np.int64)
    if highs.size == 0:
        return highs
    return rng.integers(0, highs)


def sample_pairing(n: int, d: int, seed: int, replicate: int = 0, backend=None, rng=None) -> Pairing:
    """Uniform random configuration: repeatedly match the lowest free point to a uniform free point.

    The draws come from ``derived_rng(seed, replicate)`` unless an explicit ``rng`` is given.
    """
    if n < 1 or d < 1:
        raise ValueError("n and d must be positive")
    if (n * d) % 2:
        raise ValueError(f"d*n = {d * n} is odd; no perfect matching exists")
    npts = n * d
    if rng is None:
        rng = derived_rng(seed, replicate)
    draws = draw_matching_indices(npts, rng)
    return Pairing(n, d, kernels.match_from_draws(draws, npts, backend=backend))


def sample_partner_batch(n: int, d: int, count: int, seed: int, backend=None) -> np.ndarray:
    """``(count, d*n)`` partner arrays from one stream ``derived_rng(seed)``, for bulk Monte Carlo.

    Row ``r`` uses the ``r``-th block of draws, so the result does not depend on the backend.
    """
    if (n * d) % 2:
        raise ValueError(f"d*n = {d * n} is odd; no perfect matching exists")
    npts = n * d
    highs = np.arange(npts - 1, 0, -2, dtype=np.int64)
    draws = derived_rng(seed).integers(0, highs, size=(count, highs.size))
    return kernels.match_batch(draws, npts, backend=backend)


def count_perfect_matchings(m: int) -> Fraction:
    """Number of perfect matchings of ``2m`` points, ``(2m)! / (m! 2^m)``."""
    if m < 0:
        raise ValueError("m must be non-negative")
    return Fraction(factorial(2 * m), factorial(m) * 2**m)


def enumerate_pairings(n: int, d: int, cap: int = DEFAULT_ENUMERATION_CAP) -> Iterator[Pairing]:
    """Every configuration of P(n, d) once, in canonical "match the lowest free point" order."""
    npts = n * d
    if npts % 2:
        raise ValueError(f"d*n = {npts} is odd")
    total = count_perfect_matchings(npts // 2)
    if total > cap:
        raise EnumerationCapError(f"{total} pairings exceeds the enumeration cap {cap}")
    for partner in _enumerate_partners(npts):
        yield Pairing(n, d, partner)


def _enumerate_partners(npts: int) -> Iterator[np.ndarray]:
    partner = np.full(npts, -1, dtype=np.int64)

    def rec(low):
        while low < npts and partner[low] != -1:
            low += 1
        if low == npts:
            yield partner.copy()
            return
        for q in range(low + 1, npts):
            if partner[q] == -1:
                partner[low] = q
                partner[q] = low
                yield from rec(low + 1)
                partner[low] = -1
                partner[q] = -1

    yield from rec(0)


def all_partners_array(n: int, d: int) -> np.ndarray:
    """All configurations stacked as a ``(count, d*n)`` array; desk-scale only."""
    total = count_perfect_matchings(n * d // 2)
    if total > 10**6:
        raise EnumerationCapError(f"{total} pairings is too many to materialize")
    return np.array(list(_enumerate_partners(n * d)), dtype=np.int64).reshape(-1, n * d)


def pairing_to_multigraph(p: Pairing) -> Multigraph:
    return Multigraph(p.n, tuple((int(u) // p.d, int(v) // p.d) for u, v in p.pairs()))


def is_simple(g: Multigraph) -> bool:
    seen = set()
    for e in g.edges:
        if e[0] == e[1] or e in seen:
            return False
        seen.add(e)
    return True


def multigraph_to_pairing(g: Multigraph) -> Pairing:
    """One configuration projecting onto ``g``: each vertex's edge-ends take its points in order."""
    deg = g.degrees()
    d = deg[0] if deg else 0
    if any(x != d for x in deg):
        raise ValueError("graph is not regular")
    nxt = [v * d for v in range(g.n)]
    pairs = []
    for u, v in g.edges:
        pu = nxt[u]
        nxt[u] += 1
        pv = nxt[v]
        nxt[v] += 1
        pairs.append((pu, pv))
    return Pairing.from_pairs(g.n, d, pairs)


def sample_simple_graph(n: int, d: int, seed: int, index: int = 0, max_tries: int = 100_000, backend=None):
    """Rejection sampling on top of :func:`sample_pairing`; returns ``(graph, tries)``.

    Sample ``index`` uses the draw streams ``(seed, index, try)``.
    """
    for t in range(max_tries):
        g = pairing_to_multigraph(sample_pairing(n, d, seed, backend=backend,
                                                 rng=derived_rng(seed, index, t)))
        if is_simple(g):
            return g, t + 1
    raise RuntimeError(f"no simple graph after {max_tries} tries")
