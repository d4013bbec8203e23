"""Immutable simple graphs over {0, ..., n-1} plus the graph6 interchange format.

Adjacency is stored as one integer bitmask per vertex.  That keeps the
exhaustive searches elsewhere in the package tight: neighbourhood
intersections, candidate filtering and reachability sweeps are single
integer operations instead of set algebra.
"""

from __future__ import annotations

import random
from itertools import combinations


def bits(mask: int):
    """Yield the set bit positions of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class Graph:
    """A finite simple undirected graph; treat instances as immutable."""

    __slots__ = ("n", "adj")

    def __init__(self, n: int, edges=()):
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        adj = [0] * n
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        self.n = n
        self.adj = tuple(adj)

    # -- basic queries ---------------------------------------------------

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def neighbors(self, u: int):
        return bits(self.adj[u])

    def degree(self, u: int) -> int:
        return self.adj[u].bit_count()

    def degrees(self) -> list[int]:
        return [m.bit_count() for m in self.adj]

    @property
    def edge_count(self) -> int:
        return sum(m.bit_count() for m in self.adj) // 2

    def edges(self):
        for u in range(self.n):
            rest = self.adj[u] >> (u + 1) << (u + 1)
            for v in bits(rest):
                yield (u, v)

    def max_degree(self) -> int:
        """Maximum degree; defined as 0 for the empty graph."""
        return max(self.degrees(), default=0)

    def min_degree(self) -> int:
        """Minimum degree; defined as 0 for the empty graph."""
        return min(self.degrees(), default=0)

    @property
    def vertex_mask(self) -> int:
        return (1 << self.n) - 1

    # -- derived graphs --------------------------------------------------

    def complement(self) -> "Graph":
        full = self.vertex_mask
        new = Graph.__new__(Graph)
        new.n = self.n
        new.adj = tuple(full & ~self.adj[v] & ~(1 << v) for v in range(self.n))
        return new

    def with_edges(self, extra) -> "Graph":
        """A copy of this graph with the extra edges added."""
        return Graph(self.n, list(self.edges()) + list(extra))

    def induced(self, vertices) -> "Graph":
        """Induced subgraph on the given vertices, relabelled 0.. in sorted order."""
        keep = sorted(set(vertices))
        index = {v: i for i, v in enumerate(keep)}
        edges = [
            (index[u], index[v])
            for u, v in self.edges()
            if u in index and v in index
        ]
        return Graph(len(keep), edges)

    def components(self) -> list[int]:
        """Connected components as vertex bitmasks, largest first."""
        seen = 0
        comps = []
        for s in range(self.n):
            if seen >> s & 1:
                continue
            comp = 1 << s
            frontier = comp
            while frontier:
                nxt = 0
                for v in bits(frontier):
                    nxt |= self.adj[v]
                frontier = nxt & ~comp
                comp |= frontier
            comps.append(comp)
            seen |= comp
        comps.sort(key=lambda m: (-m.bit_count(), m))
        return comps

    def is_connected(self) -> bool:
        return self.n <= 1 or len(self.components()) == 1

    # -- dunder ----------------------------------------------------------

    def __eq__(self, other):
        return isinstance(other, Graph) and self.n == other.n and self.adj == other.adj

    def __hash__(self):
        return hash((self.n, self.adj))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.edge_count})"


# -- family constructors ----------------------------------------------------


def empty_graph(n: int) -> Graph:
    return Graph(n)


def path_graph(n: int) -> Graph:
    if n < 1:
        raise ValueError("path needs at least one vertex")
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycle needs at least three vertices")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    if n < 0:
        raise ValueError("vertex count must be nonnegative")
    return Graph(n, combinations(range(n), 2))


def path_power(n: int, k: int) -> Graph:
    """Graph on path vertices 0..n-1 joining pairs at path distance at most k."""
    if n < 1 or k < 1:
        raise ValueError("path power needs n >= 1 and k >= 1")
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, min(n, i + k + 1))])


def complete_multipartite(*sizes: int) -> Graph:
    """Complete r-partite graph with the given part sizes (zero parts dropped)."""
    parts = [s for s in sizes if s > 0]
    if any(s < 0 for s in sizes):
        raise ValueError("part sizes must be nonnegative")
    n = sum(parts)
    edges = []
    offsets = []
    acc = 0
    for s in parts:
        offsets.append((acc, acc + s))
        acc += s
    for (a0, a1), (b0, b1) in combinations(offsets, 2):
        for u in range(a0, a1):
            for v in range(b0, b1):
                edges.append((u, v))
    return Graph(n, edges)


def disjoint_union(*graphs: Graph) -> Graph:
    n = sum(g.n for g in graphs)
    edges = []
    off = 0
    for g in graphs:
        edges.extend((u + off, v + off) for u, v in g.edges())
        off += g.n
    return Graph(n, edges)


def clique_union(*sizes: int) -> Graph:
    """Disjoint union of complete graphs of the given orders."""
    return disjoint_union(*(complete_graph(s) for s in sizes))


def random_graph(n: int, p: float = 0.5, max_degree: int | None = None, seed: int | None = None) -> Graph:
    """Seeded Erdos-Renyi style graph with an optional maximum-degree cap.

    Candidate pairs are visited in a seed-shuffled order and kept with
    probability ``p`` while both endpoints stay under the cap, so the result
    is a deterministic function of the arguments.
    """
    if seed is None:
        raise ValueError("random generation requires an explicit seed")
    if n < 0:
        raise ValueError("vertex count must be nonnegative")
    if not (0.0 <= p <= 1.0):
        raise ValueError("edge probability must lie in [0, 1]")
    rng = random.Random(seed)
    pairs = list(combinations(range(n), 2))
    rng.shuffle(pairs)
    deg = [0] * n
    edges = []
    for u, v in pairs:
        if rng.random() >= p:
            continue
        if max_degree is not None and (deg[u] >= max_degree or deg[v] >= max_degree):
            continue
        edges.append((u, v))
        deg[u] += 1
        deg[v] += 1
    return Graph(n, edges)


_FAMILIES = ("path", "cycle", "complete", "empty", "path_power", "multipartite", "cliques", "random")


def generate(kind: str, params, *, p: float = 0.5, max_degree: int | None = None, seed: int | None = None) -> Graph:
    """Family constructor addressable by name, for the command-line surface."""
    params = [int(x) for x in params]
    if kind == "path":
        return path_graph(*params)
    if kind == "cycle":
        return cycle_graph(*params)
    if kind == "complete":
        return complete_graph(*params)
    if kind == "empty":
        return empty_graph(*params)
    if kind == "path_power":
        return path_power(*params)
    if kind == "multipartite":
        return complete_multipartite(*params)
    if kind == "cliques":
        return clique_union(*params)
    if kind == "random":
        (n,) = params
        return random_graph(n, p=p, max_degree=max_degree, seed=seed)
    raise ValueError(f"unknown family {kind!r}; known: {', '.join(_FAMILIES)}")


# -- graph6 -------------------------------------------------------------------
#
# Standard ASCII encoding for simple graphs: a size header N(n) followed by
# the upper triangle of the adjacency matrix in column-major order, packed
# big-endian into 6-bit groups offset by 63.


def _g6_size_bytes(n: int) -> str:
    if n < 0:
        raise ValueError("vertex count must be nonnegative")
    if n <= 62:
        return chr(n + 63)
    if n <= 258047:
        groups = [(n >> 12) & 63, (n >> 6) & 63, n & 63]
        return "~" + "".join(chr(g + 63) for g in groups)
    if n <= 68719476735:
        groups = [(n >> (6 * i)) & 63 for i in range(5, -1, -1)]
        return "~~" + "".join(chr(g + 63) for g in groups)
    raise ValueError("graph too large for graph6")


def to_graph6(g: Graph) -> str:
    """Encode a graph in graph6 (no header line)."""
    out = [_g6_size_bytes(g.n)]
    bit_buf = 0
    bit_len = 0
    for j in range(1, g.n):
        col = g.adj[j]
        for i in range(j):
            bit_buf = (bit_buf << 1) | (col >> i & 1)
            bit_len += 1
            if bit_len == 6:
                out.append(chr(bit_buf + 63))
                bit_buf = 0
                bit_len = 0
    if bit_len:
        bit_buf <<= 6 - bit_len
        out.append(chr(bit_buf + 63))
    return "".join(out)


def from_graph6(text: str) -> Graph:
    """Decode a graph6 string (an optional ``>>graph6<<`` header is accepted)."""
    s = text.strip()
    if s.startswith(">>graph6<<"):
        s = s[len(">>graph6<<"):]
    if not s:
        raise ValueError("empty graph6 string")
    if any(not (63 <= ord(c) <= 126) for c in s):
        raise ValueError("invalid graph6 character")
    if s.startswith("~~"):
        if len(s) < 8:
            raise ValueError("truncated graph6 size")
        n = 0
        for c in s[2:8]:
            n = (n << 6) | (ord(c) - 63)
        body = s[8:]
    elif s.startswith("~"):
        if len(s) < 4:
            raise ValueError("truncated graph6 size")
        n = 0
        for c in s[1:4]:
            n = (n << 6) | (ord(c) - 63)
        body = s[4:]
    else:
        n = ord(s[0]) - 63
        body = s[1:]
    need = n * (n - 1) // 2
    if len(body) != (need + 5) // 6:
        raise ValueError("graph6 body has wrong length")
    stream = 0
    for c in body:
        stream = (stream << 6) | (ord(c) - 63)
    total_bits = 6 * len(body)
    edges = []
    pos = 0
    for j in range(1, n):
        for i in range(j):
            if stream >> (total_bits - 1 - pos) & 1:
                edges.append((i, j))
            pos += 1
    return Graph(n, edges)
