"""Exact NP-hard graph invariants behind explicit node budgets.

Every solver here counts search-tree nodes against a budget and raises
:class:`Undecided` when the budget runs out.  A solver never degrades into a
heuristic silently: the caller either gets a certified exact answer or an
explicit refusal, because a quietly wrong invariant would poison every
Ramsey computation built on top of it.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graphs import Graph, bits

DEFAULT_NODE_LIMIT = 5_000_000


class Undecided(Exception):
    """Raised when an exact search exceeds its node budget.

    Carries enough context for reports: the operation name, the nodes spent
    and the limit.  Treat it as a first-class verdict, not a failure.
    """

    def __init__(self, op: str, used: int, limit: int, detail: str = ""):
        self.op = op
        self.used = used
        self.limit = limit
        self.detail = detail
        msg = f"{op}: budget exhausted ({used}/{limit} nodes)"
        if detail:
            msg += f"; {detail}"
        super().__init__(msg)


class SearchBudget:
    """Mutable per-call node counter shared across the stages of one search."""

    __slots__ = ("limit", "used", "op")

    def __init__(self, limit: int = DEFAULT_NODE_LIMIT, op: str = "search"):
        self.limit = limit
        self.used = 0
        self.op = op

    def tick(self, amount: int = 1):
        self.used += amount
        if self.used > self.limit:
            raise Undecided(self.op, self.used, self.limit)

    def __repr__(self):
        return f"SearchBudget({self.used}/{self.limit})"


def _budget(budget, op: str) -> SearchBudget:
    if budget is None:
        return SearchBudget(op=op)
    if isinstance(budget, int):
        return SearchBudget(budget, op=op)
    return budget


# -- reachability helper ------------------------------------------------------


def _reach(adj, start_bit: int, allowed: int) -> int:
    """Vertices reachable from ``start_bit`` moving only inside ``allowed``."""
    seen = start_bit
    frontier = start_bit
    while frontier:
        nxt = 0
        for v in bits(frontier):
            nxt |= adj[v]
        nxt &= allowed & ~seen
        seen |= nxt
        frontier = nxt
    return seen


# -- cycles and paths ---------------------------------------------------------


def _cycle_search(g: Graph, within: int | None, budget: SearchBudget, target: int | None):
    """Backtracking longest-cycle search over a vertex subset.

    Cycles are enumerated anchored at their minimum vertex, neighbours are
    tried in increasing order, and a branch is cut when the vertices still
    reachable from the head cannot beat the requirement.  With ``target``
    set the search stops at the first cycle of at least that length;
    otherwise it proves optimality of the best cycle found.
    """
    allowed_all = g.vertex_mask if within is None else within
    adj = g.adj
    best_len = 0
    best_cycle: tuple[int, ...] | None = None

    comps = []
    seen = 0
    for s in bits(allowed_all):
        if seen >> s & 1:
            continue
        comp = _reach(adj, 1 << s, allowed_all)
        comps.append(comp)
        seen |= comp
    comps.sort(key=lambda m: (-m.bit_count(), m))

    def record(path):
        nonlocal best_len, best_cycle
        best_len = len(path)
        if path[1] <= path[-1]:
            best_cycle = tuple(path)
        else:
            best_cycle = (path[0],) + tuple(reversed(path[1:]))

    for comp in comps:
        size = comp.bit_count()
        if size <= best_len or size < 3:
            break
        if target is not None and best_len >= target:
            break
        for s in bits(comp):
            if target is not None and best_len >= target:
                break
            allowed = comp & ~((1 << (s + 1)) - 1)
            if allowed.bit_count() + 1 <= best_len:
                break  # shrinks as s grows
            path = [s]
            s_bit = 1 << s

            def extend(head, visited):
                nonlocal best_len
                budget.tick()
                if len(path) >= 3 and adj[head] >> s & 1 and len(path) > best_len:
                    record(path)
                    if target is not None and best_len >= target:
                        return True
                need = target if target is not None else best_len + 1
                free = allowed & ~visited
                cand = adj[head] & free
                if not cand:
                    return False
                reach = _reach(adj, 1 << head, free | (1 << head))
                if len(path) + (reach & ~(1 << head)).bit_count() < need:
                    return False
                if not (adj[s] & reach & ~s_bit):
                    return False  # cycle cannot close back at the anchor
                for u in bits(cand):
                    path.append(u)
                    if extend(u, visited | (1 << u)):
                        return True
                    path.pop()
                return False

            if extend(s, s_bit):
                break
        else:
            continue
        break

    return best_cycle


def longest_cycle(g: Graph, budget=None, within: int | None = None):
    """A longest cycle as a vertex tuple, or None if the graph is a forest.

    Exact; ties are resolved by the deterministic search order and the
    returned cycle is rotated to start at its smallest vertex with the
    smaller neighbour second.
    """
    b = _budget(budget, "longest_cycle")
    return _cycle_search(g, within, b, target=None)


def find_cycle_at_least(g: Graph, c: int, budget=None, within: int | None = None):
    """First cycle of length >= c found, or None after certified exhaustion."""
    if c < 3:
        raise ValueError("cycle length threshold must be at least 3")
    b = _budget(budget, "find_cycle_at_least")
    cyc = _cycle_search(g, within, b, target=c)
    if cyc is not None and len(cyc) >= c:
        return cyc
    return None


def has_path(g: Graph, m: int, budget=None, within: int | None = None):
    """A path on m vertices (subgraph containment), or None if none exists.

    Exact DFS from every start vertex; a branch is cut when the head cannot
    reach enough unvisited vertices to complete the path.
    """
    if m < 1:
        raise ValueError("path order must be at least 1")
    allowed = g.vertex_mask if within is None else within
    if m == 1:
        for v in bits(allowed):
            return (v,)
        return None
    b = _budget(budget, "has_path")
    adj = g.adj

    comp_of = {}
    seen = 0
    for s in bits(allowed):
        if seen >> s & 1:
            continue
        comp = _reach(adj, 1 << s, allowed)
        for v in bits(comp):
            comp_of[v] = comp
        seen |= comp

    path: list[int] = []

    def extend(head, visited):
        b.tick()
        if len(path) == m:
            return True
        free = allowed & ~visited
        cand = adj[head] & free
        if not cand:
            return False
        reach = _reach(adj, 1 << head, free | (1 << head))
        if len(path) - 1 + reach.bit_count() < m:
            return False
        for u in bits(cand):
            path.append(u)
            if extend(u, visited | (1 << u)):
                return True
            path.pop()
        return False

    for s in bits(allowed):
        if comp_of[s].bit_count() < m:
            continue
        path = [s]
        if extend(s, 1 << s):
            return tuple(path)
    return None


# -- colouring ----------------------------------------------------------------


@dataclass(frozen=True)
class ProperColoring:
    """A partition of the vertex set into nonempty independent classes."""

    classes: tuple[frozenset, ...]

    @property
    def k(self) -> int:
        return len(self.classes)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.classes)

    def validate(self, g: Graph):
        seen = set()
        for cls in self.classes:
            if not cls:
                raise ValueError("empty colour class")
            if cls & seen:
                raise ValueError("colour classes overlap")
            seen |= cls
            for u in cls:
                if g.adj[u] & sum(1 << v for v in cls):
                    raise ValueError("colour class is not independent")
        if seen != set(range(g.n)):
            raise ValueError("classes do not cover the vertex set")


def _greedy_clique(g: Graph) -> int:
    """Size of a greedily grown clique (a valid lower bound on chi)."""
    if g.n == 0:
        return 0
    order = sorted(range(g.n), key=lambda v: (-g.degree(v), v))
    best = 1
    for start in order[: min(g.n, 8)]:
        clique_mask = 1 << start
        common = g.adj[start]
        while common:
            v = max(bits(common), key=lambda u: ((g.adj[u] & common).bit_count(), -u))
            clique_mask |= 1 << v
            common &= g.adj[v]
        best = max(best, clique_mask.bit_count())
    return best


def _greedy_coloring(g: Graph) -> int:
    """Number of colours used by largest-first greedy colouring (upper bound)."""
    if g.n == 0:
        return 0
    color = {}
    for v in sorted(range(g.n), key=lambda u: (-g.degree(u), u)):
        used = {color[u] for u in g.neighbors(v) if u in color}
        c = 0
        while c in used:
            c += 1
        color[v] = c
    return max(color.values()) + 1


def _k_coloring(g: Graph, k: int, budget: SearchBudget):
    """A proper colouring with at most k colours, or None.

    Backtracking over vertices in a most-saturated-first order; a vertex may
    open at most one new colour, which removes colour-permutation symmetry.
    """
    n = g.n
    assign = [-1] * n
    class_masks = [0] * k

    def pick():
        best_v, best_key = -1, None
        for v in range(n):
            if assign[v] >= 0:
                continue
            sat = len({assign[u] for u in g.neighbors(v) if assign[u] >= 0})
            key = (-sat, -g.degree(v), v)
            if best_key is None or key < best_key:
                best_v, best_key = v, key
        return best_v

    def solve(colored, used):
        budget.tick()
        if colored == n:
            return True
        v = pick()
        vbit = 1 << v
        limit = min(k, used + 1)
        for c in range(limit):
            if class_masks[c] & g.adj[v]:
                continue
            assign[v] = c
            class_masks[c] |= vbit
            if solve(colored + 1, max(used, c + 1)):
                return True
            assign[v] = -1
            class_masks[c] &= ~vbit
        return False

    if solve(0, 0):
        return list(assign)
    return None


def chromatic_number(g: Graph, budget=None) -> int:
    """Exact chromatic number via complete search between clique and greedy bounds."""
    if g.n == 0:
        return 0
    if g.edge_count == 0:
        return 1
    b = _budget(budget, "chromatic_number")
    lo = max(2, _greedy_clique(g))
    hi = _greedy_coloring(g)
    for k in range(lo, hi):
        if _k_coloring(g, k, b) is not None:
            return k
    return hi


def _chi_partitions(g: Graph, k: int, budget: SearchBudget):
    """Yield every partition of the vertices into <= k independent classes.

    Restricted-growth enumeration: vertex v may join an existing class or
    open the next one, so each set partition appears exactly once.  Because
    k equals the chromatic number, every completed partition uses all k
    classes.
    """
    n = g.n
    class_masks: list[int] = []

    def walk(v):
        budget.tick()
        if v == n:
            if len(class_masks) == k:
                yield tuple(class_masks)
            return
        if len(class_masks) + (n - v) < k:
            return  # cannot open enough classes with the vertices left
        vbit = 1 << v
        for idx in range(len(class_masks)):
            if class_masks[idx] & g.adj[v]:
                continue
            class_masks[idx] |= vbit
            yield from walk(v + 1)
            class_masks[idx] &= ~vbit
        if len(class_masks) < k:
            class_masks.append(vbit)
            yield from walk(v + 1)
            class_masks.pop()

    yield from walk(0)


def sigma(g: Graph, budget=None) -> int:
    """Minimum size of the smallest class over all chromatic colourings.

    Exhaustive over partitions into exactly chi(G) independent classes.
    """
    if g.n == 0:
        return 0
    b = _budget(budget, "sigma")
    k = chromatic_number(g, b)
    best = g.n
    for classes in _chi_partitions(g, k, b):
        m = min(c.bit_count() for c in classes)
        if m < best:
            best = m
            if best == 1:
                break
    return best


def optimal_coloring_min_class(g: Graph, budget=None) -> ProperColoring:
    """A chromatic colouring whose smallest class realises sigma(G).

    Classes come back sorted by size descending (ties by vertex content),
    so the last class always has size sigma(G).
    """
    if g.n == 0:
        return ProperColoring(())
    b = _budget(budget, "optimal_coloring_min_class")
    k = chromatic_number(g, b)
    best = None
    best_min = g.n + 1
    for classes in _chi_partitions(g, k, b):
        m = min(c.bit_count() for c in classes)
        if m < best_min:
            best_min = m
            best = classes
            if best_min == 1:
                break
    assert best is not None
    sets = [frozenset(bits(m)) for m in best]
    sets.sort(key=lambda c: (-len(c), sorted(c)))
    return ProperColoring(tuple(sets))


# -- independence -------------------------------------------------------------


def independence_number(g: Graph, budget=None) -> int:
    """Exact independence number by include/exclude branch and bound."""
    b = _budget(budget, "independence_number")
    adj = g.adj
    best = 0

    def bnb(pool, size):
        nonlocal best
        b.tick()
        if size + pool.bit_count() <= best:
            return
        if not pool:
            best = max(best, size)
            return
        v = max(bits(pool), key=lambda u: ((adj[u] & pool).bit_count(), -u))
        vbit = 1 << v
        bnb(pool & ~adj[v] & ~vbit, size + 1)
        bnb(pool & ~vbit, size)

    bnb(g.vertex_mask, 0)
    return best


# -- structure tests ----------------------------------------------------------


def is_equal_clique_union(g: Graph) -> bool:
    """True iff the graph is a disjoint union of same-order complete graphs."""
    comps = g.components()
    if not comps:
        return True
    order = comps[0].bit_count()
    for comp in comps:
        if comp.bit_count() != order:
            return False
        for v in bits(comp):
            if g.adj[v] & comp != comp & ~(1 << v):
                return False
    return True


# -- bandwidth ----------------------------------------------------------------


def bandwidth(g: Graph, budget=None) -> int:
    """Exact bandwidth: min over orderings of the max index stretch of an edge."""
    if g.n < 1:
        raise ValueError("bandwidth needs at least one vertex")
    if g.edge_count == 0:
        return 0
    b = _budget(budget, "bandwidth")
    n = g.n
    adj = g.adj
    best = n - 1  # achieved by any ordering, so a valid incumbent
    pos = [-1] * n
    placed_list: list[int] = []

    def place(i, cur):
        nonlocal best
        b.tick()
        if cur >= best:
            return
        if i == n:
            best = cur
            return
        for v in range(n):
            if pos[v] >= 0:
                continue
            stretch = 0
            ok = True
            for u in bits(adj[v]):
                if pos[u] >= 0:
                    d = i - pos[u]
                    if d >= best:
                        ok = False
                        break
                    if d > stretch:
                        stretch = d
            if not ok:
                continue
            new_cur = max(cur, stretch)
            if new_cur >= best:
                continue
            # any placed vertex with t unfinished neighbours forces a future
            # stretch of at least (i + t) - its position
            feasible = True
            for u in placed_list:
                t = 0
                for w in bits(adj[u]):
                    if pos[w] < 0 and w != v:
                        t += 1
                if t and (i + t) - pos[u] >= best:
                    feasible = False
                    break
            if not feasible:
                continue
            pos[v] = i
            placed_list.append(v)
            place(i + 1, new_cur)
            placed_list.pop()
            pos[v] = -1

    place(0, 0)
    return best
