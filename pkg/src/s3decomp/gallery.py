"""Explicit graphs with known S3-decomposition verdicts.

The known planar counterexample family is not included: it is available only
as a drawing, with no vertex-level construction to reproduce it from.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .flow import edge_connectivity
from .orientations import DivisibilityError, find_star_decomposition, verify_star_decomposition
from .pairing import Multigraph, is_simple

OBSTRUCTION_MAX_N = 15


@dataclass
class NamedGraph:
    name: str
    graph: Multigraph
    expected: dict = field(default_factory=dict)


def build_tightness_example(k: int = 3, d: int = 4) -> NamedGraph:
    """Three copies of K4 joined by a perfect matching into a 4-regular, 4-edge-connected graph.

    Copy ``c`` owns vertices ``4c .. 4c+3``. Its vertices 0 and 1 are matched
    to vertices 2 and 3 of copy ``c+1 (mod 3)``, so every vertex gets exactly
    one inter-copy edge and every pair of copies is joined by two edges.
    """
    if (k, d) != (3, 4):
        raise ValueError("only the S3 case k = 3, d = 4 is supported")
    edges = []
    for c in range(k):
        base = d * c
        edges.extend((base + i, base + j) for i, j in combinations(range(d), 2))
    for c in range(k):
        nxt = d * ((c + 1) % k)
        edges.append((d * c + 0, nxt + 2))
        edges.append((d * c + 1, nxt + 3))
    g = Multigraph(k * d, tuple(edges))
    return NamedGraph("tightness_3xK4", g,
                      {"regular": 4, "edge_connectivity": 4, "divisible": True, "decomposable": False})


def circulant(n: int, jumps) -> Multigraph:
    edges = set()
    for v in range(n):
        for s in jumps:
            w = (v + s) % n
            edges.add((min(v, w), max(v, w)))
    return Multigraph(n, tuple(sorted(edges)))


def complete_graph(n: int) -> Multigraph:
    return Multigraph(n, tuple(combinations(range(n), 2)))


def gallery() -> list[NamedGraph]:
    return [
        build_tightness_example(),
        NamedGraph("C9(1,2)", circulant(9, (1, 2)),
                   {"regular": 4, "edge_connectivity": 4, "divisible": True, "decomposable": True}),
        NamedGraph("K5", complete_graph(5),
                   {"regular": 4, "edge_connectivity": 4, "divisible": False, "decomposable": False}),
    ]


def independent_set_obstruction(g: Multigraph) -> dict:
    """Count center sets of size 2n/3 whose complement is independent.

    Zero survivors certifies that no S3-decomposition exists.
    """
    if any(x != 4 for x in g.degrees()):
        raise ValueError("graph is not 4-regular")
    if len(g.edges) % 3:
        raise DivisibilityError(f"3 does not divide e(G) = {len(g.edges)}")
    n = g.n
    if n > OBSTRUCTION_MAX_N:
        raise ValueError(f"n = {n} exceeds the obstruction check limit {OBSTRUCTION_MAX_N}")
    survivors = []
    total = 0
    for leaves in combinations(range(n), n // 3):
        total += 1
        ls = set(leaves)
        if not any(u in ls and v in ls for u, v in g.edges):
            survivors.append(tuple(sorted(set(range(n)) - ls)))
    return {"candidates": total, "surviving": len(survivors), "certified_non_decomposable": not survivors,
            "examples": survivors[:5]}


def regular_degree(g: Multigraph):
    deg = set(g.degrees())
    return deg.pop() if len(deg) == 1 else None


def verify_named(ng: NamedGraph) -> dict:
    """Compute each expected property of ``ng`` and compare."""
    g = ng.graph
    out = {"name": ng.name, "n": g.n, "edges": len(g.edges), "simple": is_simple(g),
           "regular": regular_degree(g), "edge_connectivity": edge_connectivity(g),
           "divisible": len(g.edges) % 3 == 0}
    if out["regular"] == 4 and out["divisible"]:
        dec = find_star_decomposition(g)
        out["decomposable"] = dec is not None
        if dec is not None:
            out["decomposition_verified"] = verify_star_decomposition(g, dec)
            out["decomposition"] = [{"center": s.center, "leaves": list(s.leaves)} for s in dec.stars]
        if g.n <= OBSTRUCTION_MAX_N:
            obs = independent_set_obstruction(g)
            out["obstruction"] = {k: obs[k] for k in ("candidates", "surviving", "certified_non_decomposable")}
    else:
        out["decomposable"] = False
    mismatches = [k for k, v in ng.expected.items() if out.get(k) != v]
    if out.get("decomposition_verified") is False:
        mismatches.append("decomposition_verified")
    out["mismatches"] = mismatches
    out["status"] = "pass" if not mismatches else "fail"
    return out
