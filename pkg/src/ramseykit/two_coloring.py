"""Red/blue edge-colourings of complete graphs and monochromatic containment.

A colouring stores its red graph; blue is the complement inside the host
clique.  Containment is plain-subgraph semantics (not induced), the usual
Ramsey convention.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graphs import Graph, bits, to_graph6
from .invariants import SearchBudget, _budget, chromatic_number, sigma
from .graphs import clique_union

RED = "red"
BLUE = "blue"


class WitnessVerificationError(RuntimeError):
    """A construction that is guaranteed avoidance failed its own check.

    This signals a bug in an invariant computation, never a property of the
    input.
    """


class TwoColoring:
    """A 2-colouring of the complete graph on red.n vertices."""

    __slots__ = ("n", "red")

    def __init__(self, red: Graph):
        self.n = red.n
        self.red = red

    def blue_graph(self) -> Graph:
        return self.red.complement()

    def is_red(self, u: int, v: int) -> bool:
        return self.red.has_edge(u, v)

    def is_blue(self, u: int, v: int) -> bool:
        return u != v and not self.red.has_edge(u, v)

    # -- serialization: order line then sorted red edge lines -------------

    def to_text(self) -> str:
        lines = [str(self.n)]
        lines.extend(f"{u} {v}" for u, v in sorted(self.red.edges()))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "TwoColoring":
        rows = [ln for ln in text.splitlines() if ln.strip()]
        if not rows:
            raise ValueError("empty colouring record")
        try:
            n = int(rows[0])
        except ValueError as exc:
            raise ValueError(f"bad order line {rows[0]!r}") from exc
        edges = []
        for ln in rows[1:]:
            parts = ln.split()
            if len(parts) != 2:
                raise ValueError(f"bad edge line {ln!r}")
            edges.append((int(parts[0]), int(parts[1])))
        return cls(Graph(n, edges))

    def red_graph6(self) -> str:
        return to_graph6(self.red)

    def __eq__(self, other):
        return isinstance(other, TwoColoring) and self.red == other.red

    def __repr__(self):
        return f"TwoColoring(n={self.n}, red_edges={self.red.edge_count})"


@dataclass(frozen=True)
class MonoEmbedding:
    """Certificate that ``pattern`` occurs in the stated colour.

    ``mapping[i]`` is the host vertex carrying pattern vertex i.
    """

    pattern: Graph
    color: str
    mapping: tuple[int, ...]

    def verify(self, col: TwoColoring):
        if len(set(self.mapping)) != self.pattern.n:
            raise WitnessVerificationError("mapping is not injective")
        ok = col.is_red if self.color == RED else col.is_blue
        for u, v in self.pattern.edges():
            if not ok(self.mapping[u], self.mapping[v]):
                raise WitnessVerificationError(
                    f"pattern edge ({u},{v}) is not {self.color} under the mapping"
                )


# -- subgraph search ----------------------------------------------------------


def _pattern_order(pattern: Graph):
    """Connected-expansion order: inside each component, every vertex after
    the anchor is adjacent to an already-ordered one, so every placement is
    neighbourhood-constrained.  Anchors and ties go by descending degree.

    Returns (order, anchor_need) where anchor_need[i] is the component size
    a host component must offer when position i starts a fresh component.
    """
    order: list[int] = []
    anchor_need: dict[int, int] = {}
    for comp in pattern.components():
        verts = set(bits(comp))
        anchor = max(verts, key=lambda v: (pattern.degree(v), -v))
        anchor_need[len(order)] = len(verts)
        order.append(anchor)
        placed = {anchor}
        while len(placed) < len(verts):
            cands = [
                v for v in verts - placed
                if any(u in placed for u in pattern.neighbors(v))
            ]
            v = max(cands, key=lambda u: (pattern.degree(u), -u))
            order.append(v)
            placed.add(v)
    return order, anchor_need


def _host_component_sizes(host_adj, n_host: int) -> list[int]:
    sizes = [0] * n_host
    seen = 0
    for s in range(n_host):
        if seen >> s & 1:
            continue
        comp = 1 << s
        frontier = comp
        while frontier:
            nxt = 0
            for v in bits(frontier):
                nxt |= host_adj[v]
            frontier = nxt & ~comp
            comp |= frontier
        size = comp.bit_count()
        for v in bits(comp):
            sizes[v] = size
        seen |= comp
    return sizes


def _embed(host_adj, host_deg, n_host: int, pattern: Graph, budget: SearchBudget,
           pinned: dict[int, int] | None = None):
    """Backtracking injection of ``pattern`` into the host adjacency.

    Candidates are filtered by degree, by the neighbourhoods of already
    placed pattern neighbours, and (for component anchors) by the size of
    the host component they start in.  Returns the mapping tuple or None.
    """
    order, anchor_need = _pattern_order(pattern)
    k = len(order)
    if k > n_host:
        return None
    pos = {v: i for i, v in enumerate(order)}
    placed_nbrs = [
        [u for u in pattern.neighbors(v) if pos[u] < i]
        for i, v in enumerate(order)
    ]
    comp_sizes = _host_component_sizes(host_adj, n_host)

    image = [-1] * pattern.n
    full = (1 << n_host) - 1

    def place(i, used):
        budget.tick()
        if i == k:
            return True
        pv = order[i]
        cand = full & ~used
        for u in placed_nbrs[i]:
            cand &= host_adj[image[u]]
        if pinned is not None and pv in pinned:
            cand &= 1 << pinned[pv]
        need = pattern.degree(pv)
        min_comp = anchor_need.get(i, 0)
        for h in bits(cand):
            if host_deg[h] < need or comp_sizes[h] < min_comp:
                continue
            image[pv] = h
            if place(i + 1, used | (1 << h)):
                return True
            image[pv] = -1
        return False

    if place(0, 0):
        return tuple(image)
    return None


def find_subgraph(host: Graph, pattern: Graph, budget=None):
    """A subgraph embedding of ``pattern`` into ``host``, or None."""
    b = _budget(budget, "find_subgraph")
    return _embed(host.adj, host.degrees(), host.n, pattern, b)


def contains_mono(col: TwoColoring, pattern: Graph, color: str, budget=None):
    """A verified monochromatic embedding of ``pattern``, or None.

    Exact backtracking with degree and neighbourhood pruning on the stated
    colour's graph.
    """
    if color not in (RED, BLUE):
        raise ValueError("color must be 'red' or 'blue'")
    if pattern.n > col.n:
        raise ValueError("pattern larger than the host clique")
    host = col.red if color == RED else col.blue_graph()
    b = _budget(budget, "contains_mono")
    mapping = _embed(host.adj, host.degrees(), host.n, pattern, b)
    if mapping is None:
        return None
    emb = MonoEmbedding(pattern, color, mapping)
    emb.verify(col)
    return emb


# -- the blocked-clique lower-bound construction ------------------------------


def _fits_multipartite(g: Graph, part_sizes) -> bool:
    """Exact: does g embed into the complete multipartite graph on these parts?

    Equivalent to assigning every vertex of g a part so that adjacent
    vertices land in different parts and no part exceeds its capacity.
    Untouched parts of equal size are interchangeable, so only the first of
    each is tried; this keeps the search tiny even for symmetric targets.
    """
    parts = sorted(part_sizes, reverse=True)
    if g.n > sum(parts):
        return False
    order = sorted(range(g.n), key=lambda v: (-g.degree(v), v))
    part_of = [-1] * g.n
    rem = list(parts)

    def assign(i):
        if i == len(order):
            return True
        v = order[i]
        banned = {part_of[u] for u in g.neighbors(v) if part_of[u] >= 0}
        tried_fresh = set()
        for pi in range(len(parts)):
            if pi in banned or rem[pi] == 0:
                continue
            if rem[pi] == parts[pi]:
                if parts[pi] in tried_fresh:
                    continue
                tried_fresh.add(parts[pi])
            rem[pi] -= 1
            part_of[v] = pi
            if assign(i + 1):
                return True
            part_of[v] = -1
            rem[pi] += 1
        return False

    return assign(0)


def burr_witness(f: Graph, g: Graph, budget=None) -> TwoColoring:
    """The blocked-clique colouring avoiding red F and blue G.

    Red is the disjoint union of (chi(G)-1) cliques of order |F|-1 plus one
    clique of order sigma(G)-1 (dropped when sigma(G)=1), on
    N = (chi(G)-1)(|F|-1) + sigma(G) - 1 vertices.  Red components are too
    small to hold the connected F, and a blue copy of G would yield a
    chromatic colouring of G with a class smaller than sigma(G).  Both
    avoidance facts are re-checked by search before the colouring is
    returned.
    """
    b = _budget(budget, "burr_witness")
    if not f.is_connected():
        raise ValueError("F must be connected")
    k = chromatic_number(g, b)
    s = sigma(g, b)
    if f.n < s:
        raise ValueError(f"need |F| >= sigma(G): {f.n} < {s}")
    sizes = [f.n - 1] * (k - 1)
    if s - 1 > 0:
        sizes.append(s - 1)
    red = clique_union(*sizes)
    col = TwoColoring(red)
    if f.n <= col.n and contains_mono(col, f, RED, b) is not None:
        raise WitnessVerificationError("blocked-clique colouring contains a red F")
    if g.n <= col.n and contains_mono(col, g, BLUE, b) is not None:
        raise WitnessVerificationError("blocked-clique colouring contains a blue G")
    return col
