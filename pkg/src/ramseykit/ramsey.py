"""Exact arrowing decisions and small Ramsey numbers by pruned exhaustion.

The arrowing search colours the edges of the host clique one at a time in
lexicographic order and abandons a branch the moment a red F or a blue G is
completed, since no completion of that branch can avoid both targets.  Only
patterns through the freshly coloured edge are re-searched.  Witnesses are
re-verified independently before being returned.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .graphs import Graph, bits
from .invariants import SearchBudget, Undecided, _budget, chromatic_number, sigma
from .two_coloring import RED, BLUE, TwoColoring, contains_mono, burr_witness

ARROWS_NODE_LIMIT = 100_000_000


class _Pat:
    """Preprocessed pattern: one insertion plan per directed pattern edge."""

    __slots__ = ("n", "deg", "adj", "plans", "has_edges")

    def __init__(self, pattern: Graph):
        self.n = pattern.n
        self.deg = pattern.degrees()
        self.adj = pattern.adj
        self.plans = []
        self.has_edges = pattern.edge_count > 0
        for a, b in pattern.edges():
            for x, y in ((a, b), (b, a)):
                order = [x, y] + sorted(
                    (v for v in range(self.n) if v != x and v != y),
                    key=lambda v: (-self.deg[v], v),
                )
                pos = {v: i for i, v in enumerate(order)}
                placed = [
                    [u for u in bits(self.adj[v]) if pos[u] < i]
                    for i, v in enumerate(order)
                ]
                self.plans.append((order, placed))


def _hits_through_edge(host_adj, host_deg, nh, pat: _Pat, hu, hv):
    """Does the pattern embed using host edge (hu, hv) for some pattern edge?"""
    if pat.n > nh:
        return False
    full = (1 << nh) - 1
    deg = pat.deg
    for order, placed in pat.plans:
        if host_deg[hu] < deg[order[0]] or host_deg[hv] < deg[order[1]]:
            continue
        image = [-1] * pat.n
        image[order[0]] = hu
        image[order[1]] = hv

        def place(i, used):
            if i == len(order):
                return True
            pv = order[i]
            cand = full & ~used
            for u in placed[i]:
                cand &= host_adj[image[u]]
            dv = deg[pv]
            m = cand
            while m:
                low = m & -m
                h = low.bit_length() - 1
                m ^= low
                if host_deg[h] >= dv:
                    image[pv] = h
                    if place(i + 1, used | low):
                        return True
            return False

        if place(2, (1 << hu) | (1 << hv)):
            return True
    return False


def _clique_edges(n: int) -> list[tuple[int, int]]:
    return [(u, v) for u in range(n) for v in range(u + 1, n)]


def _arrows_dfs(n, edges, rpat, bpat, budget, colors, start, radj, badj, rdeg, bdeg):
    """Complete the partial colouring; return a witness red edge list or None.

    Vertex-0 symmetry breaking: among the edges at vertex 0, red ones must
    come first, since any witness can be relabelled into that shape.
    """
    m = len(edges)

    def dfs(i):
        budget.tick()
        if i == m:
            return [edges[j] for j in range(m) if colors[j] == 0]
        u, v = edges[i]
        ubit, vbit = 1 << u, 1 << v
        for c in (0, 1):
            if c == 0 and u == 0 and i > 0 and colors[i - 1] != 0:
                continue
            if c == 0:
                radj[u] |= vbit
                radj[v] |= ubit
                rdeg[u] += 1
                rdeg[v] += 1
                hit = _hits_through_edge(radj, rdeg, n, rpat, u, v)
            else:
                badj[u] |= vbit
                badj[v] |= ubit
                bdeg[u] += 1
                bdeg[v] += 1
                hit = _hits_through_edge(badj, bdeg, n, bpat, u, v)
            colors[i] = c
            if not hit:
                res = dfs(i + 1)
                if res is not None:
                    return res
            colors[i] = -1
            if c == 0:
                radj[u] &= ~vbit
                radj[v] &= ~ubit
                rdeg[u] -= 1
                rdeg[v] -= 1
            else:
                badj[u] &= ~vbit
                badj[v] &= ~ubit
                bdeg[u] -= 1
                bdeg[v] -= 1
        return None

    return dfs(start)


def _fresh_state(n):
    return [0] * n, [0] * n, [0] * n, [0] * n


def _apply_prefix(n, edges, prefix, radj, badj, rdeg, bdeg, colors):
    for i, c in enumerate(prefix):
        u, v = edges[i]
        colors[i] = c
        if c == 0:
            radj[u] |= 1 << v
            radj[v] |= 1 << u
            rdeg[u] += 1
            rdeg[v] += 1
        else:
            badj[u] |= 1 << v
            badj[v] |= 1 << u
            bdeg[u] += 1
            bdeg[v] += 1


def _collect_prefixes(n, edges, rpat, bpat, depth):
    """Consistent colourings of the first ``depth`` edges (the parallel split)."""
    out = []
    colors = [-1] * len(edges)
    radj, badj, rdeg, bdeg = _fresh_state(n)

    def walk(i):
        if i == depth:
            out.append(tuple(colors[:depth]))
            return
        u, v = edges[i]
        ubit, vbit = 1 << u, 1 << v
        for c in (0, 1):
            if c == 0 and u == 0 and i > 0 and colors[i - 1] != 0:
                continue
            if c == 0:
                radj[u] |= vbit
                radj[v] |= ubit
                rdeg[u] += 1
                rdeg[v] += 1
                hit = _hits_through_edge(radj, rdeg, n, rpat, u, v)
            else:
                badj[u] |= vbit
                badj[v] |= ubit
                bdeg[u] += 1
                bdeg[v] += 1
                hit = _hits_through_edge(badj, bdeg, n, bpat, u, v)
            colors[i] = c
            if not hit:
                walk(i + 1)
            colors[i] = -1
            if c == 0:
                radj[u] &= ~vbit
                radj[v] &= ~ubit
                rdeg[u] -= 1
                rdeg[v] -= 1
            else:
                badj[u] &= ~vbit
                badj[v] &= ~ubit
                bdeg[u] -= 1
                bdeg[v] -= 1

    walk(0)
    return out


def _subtree_worker(args):
    """Run one parallel subtree; module level so it pickles."""
    n, f_data, g_data, prefix, limit = args
    f = Graph(*f_data)
    g = Graph(*g_data)
    edges = _clique_edges(n)
    rpat, bpat = _Pat(f), _Pat(g)
    colors = [-1] * len(edges)
    radj, badj, rdeg, bdeg = _fresh_state(n)
    _apply_prefix(n, edges, prefix, radj, badj, rdeg, bdeg, colors)
    budget = SearchBudget(limit, op="arrows")
    try:
        res = _arrows_dfs(n, edges, rpat, bpat, budget, colors, len(prefix),
                          radj, badj, rdeg, bdeg)
    except Undecided:
        return ("undecided", None, budget.used)
    if res is not None:
        return ("witness", res, budget.used)
    return ("exhausted", None, budget.used)


@dataclass
class ArrowResult:
    """Outcome of one arrowing decision at host order n."""

    n: int
    verdict: str  # 'arrows' | 'witness' | 'undecided'
    witness: TwoColoring | None
    nodes: int


def _make_result(n, verdict, witness, nodes, f=None, g=None):
    res = ArrowResult(n, verdict, witness, nodes)
    if witness is not None:
        if f.n <= n and contains_mono(witness, f, RED) is not None:
            raise RuntimeError("internal error: witness contains a red F")
        if g.n <= n and contains_mono(witness, g, BLUE) is not None:
            raise RuntimeError("internal error: witness contains a blue G")
    return res


def arrows(n: int, f: Graph, g: Graph, budget=None, workers: int = 1,
           split_edges: int = 8) -> ArrowResult:
    """Decide whether every 2-colouring of K_n holds a red F or a blue G.

    Returns 'arrows', or a verified avoiding witness, or 'undecided' when
    the node budget ran out.  With workers > 1 the search splits into the
    2^split_edges subtrees below the first coloured edges and runs them in
    separate processes; results are combined in deterministic prefix order.
    """
    if n < 1:
        raise ValueError("host order must be at least 1")
    if f.edge_count == 0 and f.n <= n:
        return ArrowResult(n, "arrows", None, 0)
    if g.edge_count == 0 and g.n <= n:
        return ArrowResult(n, "arrows", None, 0)

    limit = budget if isinstance(budget, int) else (
        budget.limit if isinstance(budget, SearchBudget) else ARROWS_NODE_LIMIT)
    edges = _clique_edges(n)
    rpat, bpat = _Pat(f), _Pat(g)

    if workers <= 1 or len(edges) <= split_edges:
        colors = [-1] * len(edges)
        radj, badj, rdeg, bdeg = _fresh_state(n)
        b = SearchBudget(limit, op="arrows")
        try:
            res = _arrows_dfs(n, edges, rpat, bpat, b, colors, 0,
                              radj, badj, rdeg, bdeg)
        except Undecided:
            return ArrowResult(n, "undecided", None, b.used)
        if res is None:
            return ArrowResult(n, "arrows", None, b.used)
        return _make_result(n, "witness", TwoColoring(Graph(n, res)), b.used, f, g)

    prefixes = _collect_prefixes(n, edges, rpat, bpat, split_edges)
    if not prefixes:
        return ArrowResult(n, "arrows", None, 0)
    f_data = (f.n, list(f.edges()))
    g_data = (g.n, list(g.edges()))
    total_nodes = 0
    undecided = False
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for wave_start in range(0, len(prefixes), workers):
            wave = prefixes[wave_start:wave_start + workers]
            futs = [
                pool.submit(_subtree_worker, (n, f_data, g_data, p, limit))
                for p in wave
            ]
            outcomes = [fut.result() for fut in futs]
            for (kind, payload, used) in outcomes:
                total_nodes += used
                if kind == "witness":
                    col = TwoColoring(Graph(n, payload))
                    return _make_result(n, "witness", col, total_nodes, f, g)
                if kind == "undecided":
                    undecided = True
    if undecided:
        return ArrowResult(n, "undecided", None, total_nodes)
    return ArrowResult(n, "arrows", None, total_nodes)


# -- Ramsey numbers and goodness ----------------------------------------------


def burr_bound(f: Graph, g: Graph, budget=None) -> int:
    """The blocked-clique lower bound (chi(G)-1)(|F|-1) + sigma(G)."""
    b = _budget(budget, "burr_bound")
    if not f.is_connected():
        raise ValueError("F must be connected")
    k = chromatic_number(g, b)
    s = sigma(g, b)
    if f.n < s:
        raise ValueError(f"need |F| >= sigma(G): {f.n} < {s}")
    return (k - 1) * (f.n - 1) + s


def ramsey_number(f: Graph, g: Graph, cap: int, budget=None, workers: int = 1) -> int:
    """Smallest N <= cap arrowing (F, G), by upward exhaustive search.

    When F is connected with |F| >= sigma(G) the search starts at the
    blocked-clique bound, whose witness colouring is constructed and
    verified first; all smaller N are then already witnessed.  Raises
    Undecided (carrying the largest witnessed N) if the cap or a node
    budget is hit.
    """
    if cap < 1:
        raise ValueError("cap must be at least 1")
    largest_witness = 0
    start = max(1, min(f.n, g.n))
    applicable = False
    if f.is_connected():
        s = sigma(g)
        if f.n >= s:
            applicable = True
    if applicable:
        bound = burr_bound(f, g)
        if bound >= 2:
            burr_witness(f, g)  # verified avoidance at N = bound - 1
            largest_witness = bound - 1
        start = max(start, bound)
    for n in range(start, cap + 1):
        res = arrows(n, f, g, budget=budget, workers=workers)
        if res.verdict == "arrows":
            return n
        if res.verdict == "witness":
            largest_witness = n
            continue
        exc = Undecided("ramsey_number", res.nodes, res.nodes,
                        detail=f"arrows undecided at N={n}; largest witnessed N={largest_witness}")
        exc.largest_witness = largest_witness
        raise exc
    exc = Undecided("ramsey_number", cap, cap,
                    detail=f"cap {cap} exhausted; largest witnessed N={largest_witness}")
    exc.largest_witness = largest_witness
    raise exc


@dataclass
class GoodnessReport:
    """Goodness verdict for (F, G) against the blocked-clique bound.

    exact_r and is_good are None when the exhaustive search was undecided.
    """

    burr_bound: int
    exact_r: int | None
    is_good: bool | None
    note: str = ""


def goodness_check(f: Graph, g: Graph, cap: int, budget=None, workers: int = 1) -> GoodnessReport:
    """Compare the exact Ramsey number against the blocked-clique bound."""
    bound = burr_bound(f, g)
    try:
        exact = ramsey_number(f, g, cap, budget=budget, workers=workers)
    except Undecided as exc:
        return GoodnessReport(bound, None, None, note=str(exc))
    if exact < bound:
        raise RuntimeError(
            f"internal error: exact R={exact} below the lower bound {bound}")
    return GoodnessReport(bound, exact, exact == bound)
