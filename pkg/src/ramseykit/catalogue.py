"""Isomorphism-free catalogues of all small graphs.

Generation works by vertex augmentation: every graph on n vertices arises
from some graph on n-1 vertices by attaching one new vertex, so extending
each canonical representative by every possible neighbourhood and deduping
by canonical code enumerates each isomorphism class exactly once.
"""

from __future__ import annotations

from itertools import permutations, product

from .graphs import Graph, bits


def _refine_classes(g: Graph) -> list[list[int]]:
    """Partition vertices by iterated neighbourhood-colour refinement."""
    n = g.n
    colors = list(g.degrees())
    while True:
        sig = [
            (colors[v], tuple(sorted(colors[u] for u in g.neighbors(v))))
            for v in range(n)
        ]
        rank = {s: i for i, s in enumerate(sorted(set(sig)))}
        new = [rank[sig[v]] for v in range(n)]
        if new == colors:
            break
        colors = new
    classes: dict[int, list[int]] = {}
    for v in range(n):
        classes.setdefault(colors[v], []).append(v)
    return [classes[c] for c in sorted(classes)]


def canonical_code(g: Graph) -> tuple[int, int]:
    """Canonical (n, upper-triangle bit code): equal iff graphs are isomorphic.

    The code is the minimum adjacency bit string over all vertex orderings
    consistent with the refinement classes.  Orderings that mix refinement
    classes cannot map the graph onto itself, so restricting to
    class-respecting orderings is safe and usually leaves very few.
    """
    n = g.n
    if n == 0:
        return (0, 0)
    classes = _refine_classes(g)
    best = None
    for parts in product(*(permutations(c) for c in classes)):
        perm = [v for part in parts for v in part]
        code = 0
        for i in range(n):
            ai = g.adj[perm[i]]
            for j in range(i + 1, n):
                code = (code << 1) | (ai >> perm[j] & 1)
        if best is None or code < best:
            best = code
    return (n, best)


_ALL_CACHE: dict[int, list[Graph]] = {}


def all_graphs(n: int) -> list[Graph]:
    """All non-isomorphic simple graphs on n vertices, one representative each."""
    if n < 0:
        raise ValueError("vertex count must be nonnegative")
    if n in _ALL_CACHE:
        return _ALL_CACHE[n]
    if n == 0:
        out = [Graph(0)]
    elif n == 1:
        out = [Graph(1)]
    else:
        seen: dict[tuple[int, int], Graph] = {}
        for g in all_graphs(n - 1):
            base = list(g.edges())
            for mask in range(1 << (n - 1)):
                cand = Graph(n, base + [(v, n - 1) for v in bits(mask)])
                code = canonical_code(cand)
                if code not in seen:
                    seen[code] = cand
        out = [seen[code] for code in sorted(seen)]
        out.sort(key=lambda g: (g.edge_count, canonical_code(g)))
    _ALL_CACHE[n] = out
    return out


def connected_graphs(n: int) -> list[Graph]:
    return [g for g in all_graphs(n) if g.is_connected()]
