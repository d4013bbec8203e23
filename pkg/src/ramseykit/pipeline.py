"""Constructive blue embedding for colourings whose red side has no long path.

Given a 2-colouring of K_N and a target graph G on n vertices with bounded
degree, the pipeline either exhibits a red path on n vertices (the
hypothesis fails constructively) or works through the stages

    longest-cycle extraction -> leftover pruning -> cross-blue structure
    -> target-set partition -> greedy embedding with backtracking

and returns a verified blue embedding of G, or the first stage diagnostic.

The asymptotic parameter regime (eps <= 1/Delta^5, beta = ceil(1/eps^7)) is
astronomically out of reach for any runnable instance, so strict parameters
exist as a calculator/validator while actual runs use relaxed overrides.
Every capacity inequality a branch relies on is re-evaluated on the concrete
instance and must hold before embedding begins; failures surface as named
diagnostics rather than silently weakened checks.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .graphs import Graph, bits, to_graph6
from .invariants import (
    SearchBudget,
    Undecided,
    _budget,
    chromatic_number,
    find_cycle_at_least,
    has_path,
    independence_number,
    longest_cycle,
    optimal_coloring_min_class,
    sigma,
    ProperColoring,
)
from .two_coloring import TwoColoring


# -- errors -------------------------------------------------------------------


class PipelineError(Exception):
    """Base for stage diagnostics; ``stage`` names the stage that failed."""

    stage = "pipeline"


class MaximalityViolation(PipelineError):
    """The input decomposition cannot consist of residual-longest cycles.

    Raised when a structural consequence of longest-cycle maximality fails,
    e.g. two independent red edges between cycle segments.
    """

    stage = "cross-blue-structure"

    def __init__(self, message, edges=None):
        super().__init__(message)
        self.edges = edges


class BetaExceeded(PipelineError):
    stage = "cross-blue-structure"

    def __init__(self, message, removals):
        super().__init__(message)
        self.removals = removals


class SmallLeftoverError(PipelineError):
    """Fewer than chi(G)-1 long cycles although the leftover is small."""

    stage = "partition"


class CapacityViolation(PipelineError):
    """A branch capacity inequality fails on this instance."""

    stage = "partition"

    def __init__(self, inequality, lhs, rhs, case, context=None):
        self.inequality = inequality
        self.lhs = lhs
        self.rhs = rhs
        self.case = case
        self.context = context or {}
        super().__init__(
            f"capacity inequality {inequality!r} fails in {case}: {lhs} < {rhs}")


class EmbedError(PipelineError):
    stage = "embedding"

    def __init__(self, message, vertex=None, candidates=None, placements=None):
        super().__init__(message)
        self.vertex = vertex
        self.candidates = candidates
        self.placements = placements


class InvalidEmbedding(RuntimeError):
    """An embedding failed its independent re-verification (internal bug)."""


# -- parameters ---------------------------------------------------------------


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        # snap floats like 0.05 or 1/243 back to the intended rational
        return Fraction(x).limit_denominator(10**9)
    raise TypeError(f"cannot interpret {x!r} as a rational")


@dataclass(frozen=True)
class PipelineParams:
    """Run parameters; strict instances follow the asymptotic formulas exactly."""

    delta: int
    eps: Fraction
    beta: int
    n: int
    k: int
    sigma: int
    host_order: int
    strict: bool
    overrides: tuple[str, ...]
    required_n: dict = field(compare=False)

    @property
    def min_cycle_len(self) -> int:
        return max(3, math.ceil(self.eps**2 * self.n))

    @property
    def eps_n(self) -> Fraction:
        return self.eps * self.n

    def summary(self) -> dict:
        return {
            "delta": self.delta,
            "eps": str(self.eps),
            "beta": self.beta,
            "n": self.n,
            "k": self.k,
            "sigma": self.sigma,
            "host_order": self.host_order,
            "strict": self.strict,
            "overrides": list(self.overrides),
        }


def make_params(delta: int, eps, n: int, k: int, sigma: int, strict: bool = False,
                beta: int | None = None, host_order: int | None = None) -> PipelineParams:
    """Build run parameters.

    Strict mode validates eps <= 1/delta^5 and computes beta and the host
    order from the defining formulas; it also reports the (astronomical)
    instance sizes each structural guarantee needs.  Relaxed mode accepts
    beta and host-order overrides and records them, so a run can state
    which guarantees were actually in force.
    """
    if delta < 2:
        raise ValueError("degree bound must be at least 2")
    if n < 1 or k < 1 or sigma < 1:
        raise ValueError("need n >= 1, k >= 1, sigma >= 1")
    eps = _to_fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    formula_beta = math.ceil(1 / eps**7)
    formula_host = (k - 1) * n + sigma + math.ceil(Fraction(delta**4) * eps * n)
    overrides: list[str] = []
    if strict:
        if beta is not None or host_order is not None:
            raise ValueError("strict mode computes beta and the host order itself")
        if eps > Fraction(1, delta**5):
            raise ValueError(
                f"strict mode requires eps <= 1/delta^5 = 1/{delta**5}, got {eps}")
        beta = formula_beta
        host_order = formula_host
    else:
        if eps > Fraction(1, delta**5):
            overrides.append(f"eps={eps} above the strict bound 1/{delta**5}")
        if beta is None:
            beta = formula_beta
        elif beta != formula_beta:
            if beta < 0:
                raise ValueError("beta must be nonnegative")
            overrides.append(f"beta={beta} (formula value {formula_beta})")
        if host_order is None:
            host_order = formula_host
        elif host_order != formula_host:
            overrides.append(f"host_order={host_order} (formula value {formula_host})")
    eps2 = eps**2
    required_n = {
        "cycle-threshold-meaningful": math.ceil(3 / eps2),
        "multipartite-trim": math.ceil((beta + 1) / eps2),
        "neighbourhood-bound": math.ceil((delta**2 + 2) / eps2),
        "eta-positive": math.ceil((2 * beta + 2) / eps2),
    }
    return PipelineParams(delta, eps, beta, n, k, sigma, host_order, strict,
                          tuple(overrides), required_n)


# -- cycle cover dichotomy ----------------------------------------------------


def erdos_gallai(h: Graph, c: int, budget=None):
    """Either a cycle of length >= c, or a certified edge-count bound.

    Returns ('long_cycle', cycle) when such a cycle exists; otherwise
    ('edge_bound', e) after checking e < (c-1)(|H|-1)/2 + 1 exactly.  The
    bound failing with no long cycle would mean the cycle search is broken,
    so that case raises instead of returning.
    """
    if not (3 <= c <= h.n):
        raise ValueError("need 3 <= c <= |H|")
    cyc = find_cycle_at_least(h, c, budget=budget)
    if cyc is not None:
        return ("long_cycle", cyc)
    e = h.edge_count
    if not 2 * e < (c - 1) * (h.n - 1) + 2:
        raise RuntimeError(
            "internal error: no cycle of length >= "
            f"{c} found but e(H)={e} violates the edge bound")
    return ("edge_bound", e)


# -- ordered disjoint longest cycles ------------------------------------------


@dataclass(frozen=True)
class CycleDecomposition:
    """Greedily extracted residual-longest red cycles plus the leftover W."""

    host_order: int
    cycles: tuple[tuple[int, ...], ...]
    w: frozenset
    min_len: int
    certified: bool

    @property
    def r(self) -> int:
        return len(self.cycles)

    @property
    def lengths(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.cycles)

    def cycle_set(self, i: int) -> frozenset:
        return frozenset(self.cycles[i])


def _check_red_cycle(red: Graph, cyc) -> None:
    m = len(cyc)
    if m < 3 or len(set(cyc)) != m:
        raise ValueError(f"not a cycle: {cyc}")
    for i in range(m):
        if not red.has_edge(cyc[i], cyc[(i + 1) % m]):
            raise ValueError(f"missing red edge ({cyc[i]},{cyc[(i + 1) % m]})")


def _heuristic_cycle(g: Graph, within: int):
    """Greedy path growth with rotations; long cycle, no optimality claim."""
    adj = g.adj
    best: list[int] | None = None
    for s in bits(within):
        path = [s]
        onpath = 1 << s
        rotations = 0
        while True:
            head = path[-1]
            ext = adj[head] & within & ~onpath
            if ext:
                u = next(bits(ext))
                path.append(u)
                onpath |= 1 << u
                continue
            if rotations >= 2 * len(path):
                break
            rotated = False
            for u in bits(adj[head] & onpath):
                i = path.index(u)
                if i + 2 < len(path):
                    pivot = path[i + 1]
                    if adj[pivot] & within & ~onpath:
                        path[i + 1:] = reversed(path[i + 1:])
                        rotations += 1
                        rotated = True
                        break
            if not rotated:
                break
        head = path[-1]
        for u in bits(adj[head] & onpath):
            i = path.index(u)
            clen = len(path) - i
            if clen >= 3 and (best is None or clen > len(best)):
                best = path[i:]
    if best is None:
        return None
    mi = best.index(min(best))
    cyc = best[mi:] + best[:mi]
    if cyc[1] > cyc[-1]:
        cyc = [cyc[0]] + cyc[:0:-1]
    return tuple(cyc)


def extract_longest_cycles(red: Graph, min_len: int, budget=None,
                           fallback: bool = False) -> CycleDecomposition:
    """Greedy maximal extraction of residual-longest red cycles.

    Each extracted cycle is certified longest in its residual graph by the
    exact solver.  If the budget runs out, the decomposition is flagged
    non-certified; with ``fallback`` set, extraction continues with a
    rotation-extension heuristic whose output carries no maximality claim.
    """
    if min_len < 3:
        raise ValueError("min_len must be at least 3")
    b = _budget(budget, "extract_longest_cycles")
    remaining = red.vertex_mask
    cycles: list[tuple[int, ...]] = []
    certified = True
    use_exact = True
    while True:
        cyc = None
        if use_exact:
            try:
                cyc = longest_cycle(red, budget=b, within=remaining)
            except Undecided:
                certified = False
                use_exact = False
                if not fallback:
                    break
        if not use_exact:
            cyc = _heuristic_cycle(red, remaining)
        if cyc is None or len(cyc) < min_len:
            break
        _check_red_cycle(red, cyc)
        cycles.append(tuple(cyc))
        for v in cyc:
            remaining &= ~(1 << v)
    if certified:
        lens = [len(c) for c in cycles]
        assert lens == sorted(lens, reverse=True), "extraction order broken"
    return CycleDecomposition(red.n, tuple(cycles), frozenset(bits(remaining)),
                              min_len, certified)


# -- leftover pruning ----------------------------------------------------------


@dataclass(frozen=True)
class PruneResult:
    """Split of the leftover: W0 holds the red-heavy vertices, W' the rest."""

    wprime: frozenset
    w0: frozenset
    guarantee_met: bool | None


def prune_heavy_red(red: Graph, w, threshold, eps=None) -> PruneResult:
    """Drop vertices of W with at least ``threshold`` red neighbours in W.

    With ``eps`` given, additionally reports whether |W'| >= (1-eps)|W|,
    the guarantee the edge-count argument provides when threshold = eps*n.
    """
    w = frozenset(w)
    wmask = 0
    for v in w:
        wmask |= 1 << v
    w0 = frozenset(v for v in w if (red.adj[v] & wmask).bit_count() >= threshold)
    wprime = w - w0
    guarantee = None
    if eps is not None:
        guarantee = Fraction(len(wprime)) >= (1 - _to_fraction(eps)) * len(w)
    return PruneResult(wprime, w0, guarantee)


# -- cross-blue multipartite structure ----------------------------------------


@dataclass(frozen=True)
class MultipartiteWitness:
    """Parts V_i inside the cycles that are pairwise completely blue."""

    parts: tuple[frozenset, ...]
    ignored: tuple[frozenset, ...]
    notes: tuple[str, ...] = ()


def _independent_pair(edges):
    """Two vertex-disjoint edges from the list, or None."""
    for a in range(len(edges)):
        u1, x1 = edges[a]
        for bidx in range(a + 1, len(edges)):
            u2, x2 = edges[bidx]
            if u1 != u2 and x1 != x2:
                return (edges[a], edges[bidx])
    return None


def blue_multipartite(col: TwoColoring, decomp: CycleDecomposition,
                      beta: int) -> MultipartiteWitness:
    """Trim at most beta vertices per cycle so all cross-cycle pairs are blue.

    Each cycle is cut into consecutive segments of ceil(c_r/2) vertices
    (the last may be shorter).  Between two segments of different cycles a
    residual-longest decomposition admits no two independent red edges:
    such a pair would reroute into a longer cycle.  So the red edges of a
    segment pair form a star and removing its centre makes the pair blue.
    Finding an independent pair on a certified decomposition is therefore
    reported as a maximality violation; on non-certified input it is noted
    and repaired greedily instead.
    """
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    red = col.red
    r = decomp.r
    if r == 0:
        return MultipartiteWitness((), ())
    seg_len = math.ceil(len(decomp.cycles[-1]) / 2)
    segments = [
        [cyc[p:p + seg_len] for p in range(0, len(cyc), seg_len)]
        for cyc in decomp.cycles
    ]
    removed: list[set] = [set() for _ in range(r)]
    notes: list[str] = []

    for i in range(r):
        for j in range(i + 1, r):
            for s_seg in segments[i]:
                for t_seg in segments[j]:
                    red_edges = [
                        (u, x) for u in s_seg for x in t_seg if red.has_edge(u, x)
                    ]
                    if not red_edges:
                        continue
                    pair = _independent_pair(red_edges)
                    if pair is not None:
                        msg = (
                            f"independent red edges {pair[0]} and {pair[1]} between "
                            f"cycles {i} and {j}: the red graph then has a cycle "
                            f"longer than cycle {i}, so the decomposition is not "
                            "residual-longest")
                        if decomp.certified:
                            raise MaximalityViolation(msg, edges=pair)
                        notes.append(msg)
                    live = [
                        (u, x) for u, x in red_edges
                        if u not in removed[i] and x not in removed[j]
                    ]
                    while live:
                        lefts = {u for u, _ in live}
                        rights = {x for _, x in live}
                        if len(lefts) == 1:
                            removed[i].add(next(iter(lefts)))
                            break
                        if len(rights) == 1:
                            removed[j].add(next(iter(rights)))
                            break
                        # only reachable on non-certified input: peel greedily
                        side_counts = [("i", u, sum(1 for e in live if e[0] == u)) for u in sorted(lefts)]
                        side_counts += [("j", x, sum(1 for e in live if e[1] == x)) for x in sorted(rights)]
                        side, v, _ = max(side_counts, key=lambda t: (t[2], t[0] == "i", -t[1]))
                        if side == "i":
                            removed[i].add(v)
                        else:
                            removed[j].add(v)
                        live = [
                            (u, x) for u, x in live
                            if u not in removed[i] and x not in removed[j]
                        ]

    parts = tuple(
        frozenset(decomp.cycles[i]) - removed[i] for i in range(r)
    )
    for i in range(r):
        ci = len(decomp.cycles[i])
        if len(parts[i]) < ci - beta:
            msg = (f"cycle {i} needed {len(removed[i])} removals, exceeding the "
                   f"allowance beta={beta} (sizes {ci} -> {len(parts[i])})")
            if decomp.certified:
                raise BetaExceeded(msg, removals=tuple(len(s) for s in removed))
            notes.append(msg)
    # independent quadratic verification: every surviving cross pair is blue
    for i in range(r):
        for j in range(i + 1, r):
            for u in parts[i]:
                for x in parts[j]:
                    if red.has_edge(u, x):
                        raise RuntimeError(
                            f"internal error: red edge ({u},{x}) survived trimming")
    return MultipartiteWitness(parts, tuple(frozenset(s) for s in removed),
                               tuple(notes))


# -- common blue neighbourhoods -----------------------------------------------


def common_blue_neighborhood(col: TwoColoring, decomp: CycleDecomposition,
                             ws, cycle_index: int, delta: int) -> frozenset:
    """Common blue neighbours of <= delta leftover vertices inside one cycle.

    On a certified decomposition this also checks the rotation consequences
    of maximality: no leftover vertex has two cyclically consecutive red
    neighbours on the cycle, any other chosen vertex has at most one red
    neighbour among the successors of the first one's red neighbours, and
    the neighbourhood covers at least (c_i - delta^2)/2 vertices.
    """
    ws = sorted(set(ws))
    if not ws:
        raise ValueError("need at least one leftover vertex")
    if len(ws) > delta:
        raise ValueError(f"at most delta={delta} vertices allowed, got {len(ws)}")
    if not set(ws) <= decomp.w:
        raise ValueError("chosen vertices must lie in the leftover set W")
    red = col.red
    cyc = decomp.cycles[cycle_index]
    c = len(cyc)
    common = set(cyc)
    for w in ws:
        common = {v for v in common if not red.has_edge(w, v)}

    if decomp.certified:
        succ = {cyc[p]: cyc[(p + 1) % c] for p in range(c)}
        red_on_cycle = {
            w: [v for v in cyc if red.has_edge(w, v)] for w in ws
        }
        for w in ws:
            shifted = {succ[v] for v in red_on_cycle[w]}
            for y in shifted:
                if red.has_edge(w, y):
                    raise MaximalityViolation(
                        f"leftover vertex {w} has red neighbours on two consecutive "
                        f"cycle positions ({y} follows one), which would lengthen "
                        f"cycle {cycle_index}")
            for other in ws:
                if other == w:
                    continue
                hits = [y for y in shifted if red.has_edge(other, y)]
                if len(hits) > 1:
                    raise MaximalityViolation(
                        f"leftover vertex {other} has {len(hits)} red neighbours "
                        f"among the successors of {w}'s red neighbours on cycle "
                        f"{cycle_index}, which would lengthen the cycle")
        if 2 * len(common) < c - delta * delta:
            raise MaximalityViolation(
                f"common blue neighbourhood of {ws} covers {len(common)} < "
                f"(c-delta^2)/2 = {(c - delta * delta) / 2} vertices of cycle "
                f"{cycle_index}")
    return frozenset(common)


# -- target-set partition -------------------------------------------------------


@dataclass(frozen=True)
class PartitionPlan:
    """Host target sets for each colour class, plus the branch bookkeeping.

    Class and cycle indices are 0-based: classes[j] is the (j+1)-largest
    colour class and lam/gamma hold indices below k-1.  ``h`` is 0-based as
    well when present.
    """

    case: str  # 'case1' | 'case2' | 'shortcut' | 'edgeless'
    k: int
    q_sets: tuple[frozenset, ...]
    v_sets: tuple[frozenset, ...]
    lam: frozenset
    gamma: frozenset
    eta: tuple[int, ...]
    h: int | None
    cbar: int
    u_set: frozenset
    w0: frozenset
    wprime: frozenset
    checks: tuple[tuple, ...]

    def summary(self) -> dict:
        return {
            "case": self.case,
            "q_sizes": [len(q) for q in self.q_sets],
            "v_sizes": [len(v) for v in self.v_sets],
            "lam": sorted(self.lam),
            "gamma": sorted(self.gamma),
            "eta": list(self.eta),
            "h": self.h,
            "cbar": self.cbar,
            "u": len(self.u_set),
            "w0": len(self.w0),
            "wprime": len(self.wprime),
            "checks": [list(c) for c in self.checks],
        }


def _frac_ceil(x) -> int:
    return math.ceil(_to_fraction(x))


def partition_plan(col: TwoColoring, decomp: CycleDecomposition,
                   witness: MultipartiteWitness | None, classes: ProperColoring,
                   params: PipelineParams, prune: PruneResult | None = None,
                   budget=None) -> PartitionPlan:
    """Build the per-class host target sets for the chosen branch.

    Branches: if the leftover W already has at least n + 2*delta*eps*n
    vertices, everything embeds into W' directly (shortcut).  Otherwise at
    least k-1 long cycles must exist; the small-leftover branch (case 1,
    |W| < sigma + 2*delta*eps*n) partitions the later whole cycles, and the
    large-leftover branch (case 2) additionally draws on W' below a pivot
    class h.  Every inequality the construction relies on is evaluated on
    the instance and a failure raises a CapacityViolation naming it.
    """
    red = col.red
    n, k, sig = params.n, params.k, params.sigma
    delta, beta = params.delta, params.beta
    a = classes.sizes
    if classes.k != k:
        raise ValueError(f"colouring has {classes.k} classes, params say k={k}")
    if list(a) != sorted(a, reverse=True):
        raise ValueError("classes must be sorted by size descending")
    if a and a[-1] != sig:
        raise ValueError(f"smallest class has {a[-1]} vertices, params say sigma={sig}")

    hosts = frozenset(range(col.n))
    w_set = decomp.w
    eps_n = params.eps_n
    d_eps_n = delta * eps_n

    if prune is None:
        prune = prune_heavy_red(red, w_set, threshold=eps_n, eps=params.eps)
    w0, wprime = prune.w0, prune.wprime

    checks: list[tuple] = []
    ctx = {"case": None, "lam": frozenset(), "gamma": frozenset()}

    def chk(name, lhs, rhs, strict=False):
        ok = (lhs > rhs) if strict else (lhs >= rhs)
        checks.append((name, str(lhs), str(rhs), ok))
        if not ok:
            raise CapacityViolation(name, lhs, rhs, ctx["case"], context=dict(ctx))

    if k == 1:
        # edgeless target: any injective placement works
        return PartitionPlan("edgeless", 1, (hosts,), (), frozenset(), frozenset(),
                             (), None, 0, hosts, w0, wprime, tuple(checks))

    if Fraction(len(w_set)) >= n + 2 * d_eps_n:
        ctx["case"] = "shortcut"
        chk("shortcut-wprime-capacity", Fraction(len(wprime)),
            (1 + delta * params.eps) * n, strict=True)
        return PartitionPlan("shortcut", k, tuple(frozenset() for _ in range(k)),
                             (), frozenset(), frozenset(), (), None, 0,
                             hosts, w0, wprime, tuple(checks))

    if decomp.r < k - 1:
        raise SmallLeftoverError(
            f"only r={decomp.r} long red cycles for k={k} colour classes while the "
            f"leftover |W|={len(w_set)} is below the all-in-leftover threshold "
            f"{n} + 2*delta*eps*n = {str(n + 2 * d_eps_n)}")
    if witness is None:
        raise ValueError("a multipartite witness is required outside the shortcut")

    cyc_lens = decomp.lengths
    first_cycles_mask = set()
    for i in range(k - 1):
        first_cycles_mask |= set(decomp.cycles[i])
    u_set = hosts - frozenset(first_cycles_mask)

    if decomp.r >= k:
        cbar = cyc_lens[k - 1]
    else:
        u_mask = 0
        for v in u_set:
            u_mask |= 1 << v
        b = _budget(budget, "partition_plan")
        cyc = longest_cycle(red, budget=b, within=u_mask)
        cbar = len(cyc) if cyc is not None else 0

    eta = tuple((ci - 2 * beta) // 2 for ci in cyc_lens)
    lam = frozenset(j for j in range(k - 1) if a[j] > eta[j])
    gamma = frozenset(j for j in range(k - 1) if a[j] > cyc_lens[j] - beta)
    if not gamma <= lam:
        raise RuntimeError("internal error: gamma must be contained in lam")
    ctx["lam"], ctx["gamma"] = lam, gamma

    q: list[frozenset] = [frozenset() for _ in range(k)]
    v_sets = tuple(witness.parts[: k - 1])
    free_cycles = list(range(k - 1, decomp.r))
    h0: int | None = None

    if Fraction(len(w_set)) < sig + 2 * d_eps_n:
        ctx["case"] = case = "case1"
        uw = u_set - w_set  # exactly the vertices of the later cycles
        supply = Fraction(len(uw) + sum(len(witness.parts[j]) for j in gamma))
        demand = sum((a[j] + cbar for j in gamma), start=Fraction(0)) + sig + eps_n
        chk("case1-supply", supply, demand)
        for j in sorted(gamma):
            got: set = set()
            while len(witness.parts[j]) + len(got) < a[j] + decomp.r * beta:
                if not free_cycles:
                    raise CapacityViolation(
                        "case1-cycle-allocation",
                        len(witness.parts[j]) + len(got),
                        a[j] + decomp.r * beta, case, context=dict(ctx))
                got |= set(decomp.cycles[free_cycles.pop(0)])
            q[j] = frozenset(got)
        qk = uw - frozenset().union(*q[: k - 1]) if k > 1 else uw
        q[k - 1] = frozenset(qk)
        chk("case1-qk-size", len(qk), sig + decomp.r * beta)
    else:
        ctx["case"] = case = "case2"
        u_w0 = u_set - w0
        supply = Fraction(len(u_w0) + sum(len(witness.parts[j]) for j in lam))
        demand = sum((2 * a[j] + cbar + 2 * d_eps_n for j in lam),
                     start=Fraction(0)) + sig
        chk("case2-supply", supply, demand)
        pool = sorted(wprime)
        qk_need = _frac_ceil(sig + d_eps_n)
        chk("case2-qk-from-wprime", len(pool), qk_need)
        q[k - 1] = frozenset(pool[:qk_need])
        pool = pool[qk_need:]
        # pivot: smallest h (1-based math, 0-based h0 = h-1) with
        # |W'| >= sum_{j in lam, h < j+1 < k} (2a_j - |V_j|) + sigma + (k-h)*delta*eps*n
        for h_math in range(1, k):
            tail = [j for j in range(h_math, k - 1) if j in lam]
            need = sum((2 * a[j] - len(witness.parts[j]) for j in tail),
                       start=Fraction(0)) + sig + (k - h_math) * d_eps_n
            checks.append((f"case2-pivot-h={h_math}", str(Fraction(len(wprime))),
                           str(need), Fraction(len(wprime)) >= need))
            if Fraction(len(wprime)) >= need:
                h0 = h_math - 1
                break
        if h0 is None:
            raise CapacityViolation(
                "case2-pivot", len(wprime),
                str(sig + d_eps_n), case, context=dict(ctx))
        for j in sorted(lam):
            if not (h0 < j <= k - 2):
                continue
            cnt = max(0, _frac_ceil(2 * a[j] - len(witness.parts[j]) + d_eps_n))
            if cnt > len(pool):
                raise CapacityViolation(
                    "case2-wprime-allocation", len(pool), cnt, case,
                    context=dict(ctx))
            q[j] = frozenset(pool[:cnt])
            pool = pool[cnt:]
        for j in sorted(lam):
            if not j < h0:
                continue
            got = set()
            while Fraction(len(witness.parts[j]) + len(got)) < 2 * a[j] + 2 * d_eps_n:
                if not free_cycles:
                    raise CapacityViolation(
                        "case2-cycle-allocation",
                        len(witness.parts[j]) + len(got),
                        str(2 * a[j] + 2 * d_eps_n), case, context=dict(ctx))
                got |= set(decomp.cycles[free_cycles.pop(0)])
            q[j] = frozenset(got)
        residue = u_w0
        for idx in range(k):
            if idx != h0:
                residue = residue - q[idx]
        q[h0] = frozenset(residue)
        chk("case2-qh-size",
            Fraction(len(witness.parts[h0]) + len(q[h0])),
            2 * a[h0] + 2 * d_eps_n)

    # structural invariants of the produced plan
    seen: set = set()
    for qs in q:
        if qs & seen:
            raise RuntimeError("internal error: target sets overlap")
        seen |= qs
    for ci in range(k - 1, decomp.r):
        touching = sum(1 for qs in q if qs & decomp.cycle_set(ci))
        if touching > 1:
            raise RuntimeError(
                f"internal error: cycle {ci} is shared by {touching} target sets")

    return PartitionPlan(case, k, tuple(q), v_sets, lam, gamma, eta, h0, cbar,
                         u_set, w0, wprime, tuple(checks))


# -- embedding ----------------------------------------------------------------


@dataclass(frozen=True)
class Embedding:
    """Injective map from target-graph vertices to host vertices, all edges blue."""

    mapping: tuple[int, ...]
    class_targets: tuple[frozenset, ...]


def verify_embedding(col: TwoColoring, g: Graph, mapping) -> None:
    """Re-check an embedding edge by edge, independent of how it was found."""
    if len(mapping) != g.n:
        raise InvalidEmbedding("mapping does not cover the target graph")
    if len(set(mapping)) != g.n:
        raise InvalidEmbedding("mapping is not injective")
    for h in mapping:
        if not (0 <= h < col.n):
            raise InvalidEmbedding(f"host vertex {h} out of range")
    for u, v in g.edges():
        if not col.is_blue(mapping[u], mapping[v]):
            raise InvalidEmbedding(
                f"target edge ({u},{v}) lands on a non-blue host pair "
                f"({mapping[u]},{mapping[v]})")


def embed_classes(col: TwoColoring, plan: PartitionPlan, g: Graph,
                  classes: ProperColoring,
                  placement_budget: int = 1_000_000) -> Embedding:
    """Greedy embedding with backtracking over the planned target sets.

    Classes are processed smallest first (A_k, then A_{k-1}, ...); inside a
    class, vertices go in descending target-graph degree.  A vertex may
    only take an unused host in its class target that is blue-adjacent to
    the hosts of all its already-embedded neighbours.  The result is
    re-verified edge by edge before it is returned.
    """
    k = plan.k
    if classes.k != k:
        raise ValueError("colouring does not match the plan")
    if plan.case in ("shortcut", "edgeless"):
        base = plan.wprime if plan.case == "shortcut" else frozenset(range(col.n))
        targets = [base] * k
    else:
        targets = [plan.v_sets[i] | plan.q_sets[i] for i in range(k - 1)]
        targets.append(plan.q_sets[k - 1])

    order: list[int] = []
    target_of: dict[int, frozenset] = {}
    for idx in range(k - 1, -1, -1):
        members = sorted(classes.classes[idx], key=lambda v: (-g.degree(v), v))
        for v in members:
            order.append(v)
            target_of[v] = targets[idx]

    pos = {v: i for i, v in enumerate(order)}
    earlier_nbrs = [
        [u for u in g.neighbors(v) if pos[u] < pos[v]] for v in order
    ]
    target_masks = []
    for v in order:
        m = 0
        for hvert in target_of[v]:
            m |= 1 << hvert
        target_masks.append(m)

    blue = col.blue_graph()
    image = [-1] * g.n
    placements = 0
    deepest = -1
    stuck_vertex = None
    stuck_candidates = 0

    def dfs(t, used):
        nonlocal placements, deepest, stuck_vertex, stuck_candidates
        if t == len(order):
            return True
        v = order[t]
        cand = target_masks[t] & ~used
        for u in earlier_nbrs[t]:
            cand &= blue.adj[image[u]]
        if t > deepest:
            deepest = t
            stuck_vertex = v
            stuck_candidates = cand.bit_count()
        for h in bits(cand):
            placements += 1
            if placements > placement_budget:
                raise EmbedError(
                    f"placement budget {placement_budget} exhausted; deepest "
                    f"frontier at target vertex {stuck_vertex} "
                    f"({stuck_candidates} candidates there)",
                    vertex=stuck_vertex, candidates=stuck_candidates,
                    placements=placements)
            image[v] = h
            if dfs(t + 1, used | (1 << h)):
                return True
            image[v] = -1
        return False

    if not dfs(0, 0):
        raise EmbedError(
            f"no admissible host for target vertex {stuck_vertex}: its class "
            f"target offers {stuck_candidates} candidates after blue-adjacency "
            f"filtering ({placements} placements tried)",
            vertex=stuck_vertex, candidates=stuck_candidates,
            placements=placements)
    verify_embedding(col, g, image)
    return Embedding(tuple(image), tuple(targets))


# -- end-to-end ---------------------------------------------------------------


@dataclass
class PipelineResult:
    """Outcome of one end-to-end run plus the per-stage trace."""

    status: str  # 'embedded' | 'red-path' | 'diagnostic'
    embedding: Embedding | None
    red_path: tuple | None
    stage: str | None
    diagnostic: str | None
    trace: tuple[dict, ...]
    params: PipelineParams


def run_pipeline(col: TwoColoring, g: Graph, params: PipelineParams,
                 budget=None, placement_budget: int = 1_000_000,
                 fallback: bool = False) -> PipelineResult:
    """Either a red path on n vertices, a verified blue embedding of G, or
    the first stage diagnostic; always with a machine-readable trace.
    """
    b = _budget(budget, "run_pipeline")
    if g.n != params.n:
        raise ValueError(f"|G|={g.n} does not match params n={params.n}")
    if col.n != params.host_order:
        raise ValueError(
            f"host order {col.n} does not match params host_order={params.host_order}")
    k = chromatic_number(g, b)
    s = sigma(g, b)
    if k != params.k or s != params.sigma:
        raise ValueError(
            f"recomputed (k, sigma) = ({k}, {s}) differs from params "
            f"({params.k}, {params.sigma})")
    classes = optimal_coloring_min_class(g, b)

    trace: list[dict] = [{
        "stage": "inputs",
        "coloring_sha256": hashlib.sha256(col.to_text().encode()).hexdigest(),
        "target_graph6": to_graph6(g),
        "host_order": col.n,
        "params": params.summary(),
    }]

    path = has_path(col.red, params.n, budget=b)
    trace.append({"stage": "red-path-check", "found": path is not None,
                  "outcome": "hypothesis-fails" if path else "ok"})
    if path is not None:
        return PipelineResult("red-path", None, path, "red-path-check",
                              "the red graph contains a path on n vertices",
                              tuple(trace), params)

    try:
        decomp = extract_longest_cycles(col.red, params.min_cycle_len,
                                        budget=b, fallback=fallback)
        trace.append({
            "stage": "cycle-extraction",
            "lengths": list(decomp.lengths),
            "leftover": len(decomp.w),
            "certified": decomp.certified,
            "outcome": "ok",
        })
        prune = prune_heavy_red(col.red, decomp.w, threshold=params.eps_n,
                                eps=params.eps)
        trace.append({
            "stage": "leftover-pruning",
            "w0": len(prune.w0),
            "wprime": len(prune.wprime),
            "guarantee_met": prune.guarantee_met,
            "outcome": "ok",
        })
        shortcut = Fraction(len(decomp.w)) >= params.n + 2 * params.delta * params.eps_n
        witness = None
        if not shortcut and k > 1 and decomp.r > 0:
            witness = blue_multipartite(col, decomp, params.beta)
            trace.append({
                "stage": "cross-blue-structure",
                "part_sizes": [len(p) for p in witness.parts],
                "removals": [len(s) for s in witness.ignored],
                "notes": list(witness.notes),
                "outcome": "ok",
            })
        plan = partition_plan(col, decomp, witness, classes, params,
                              prune=prune, budget=b)
        trace.append({"stage": "partition", "outcome": "ok", **plan.summary()})
        emb = embed_classes(col, plan, g, classes,
                            placement_budget=placement_budget)
        trace.append({"stage": "embedding", "outcome": "ok",
                      "mapping": list(emb.mapping)})
        return PipelineResult("embedded", emb, None, None, None,
                              tuple(trace), params)
    except PipelineError as exc:
        note = ""
        if isinstance(exc, (CapacityViolation, EmbedError, SmallLeftoverError)):
            try:
                alpha = independence_number(g, b)
                if 4 * alpha > params.n:
                    note = (f" [alpha(G)={alpha} > n/4: instance lies outside "
                            "the guarantee regime]")
            except Undecided:
                pass
        trace.append({"stage": exc.stage, "outcome": "diagnostic",
                      "message": str(exc) + note})
        return PipelineResult("diagnostic", None, None, exc.stage,
                              str(exc) + note, tuple(trace), params)
