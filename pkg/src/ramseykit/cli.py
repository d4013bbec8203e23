"""Command-line surface emitting self-contained JSON run reports.

Exit codes: 0 decided, 1 for negative boolean verdicts (not good, no
embedding), 2 parse errors, 3 undecided/budget, 4 precondition violations.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .graphs import Graph, from_graph6, generate, to_graph6
from .invariants import (
    SearchBudget,
    Undecided,
    bandwidth,
    chromatic_number,
    has_path,
    independence_number,
    is_equal_clique_union,
    longest_cycle,
    sigma,
)
from .two_coloring import TwoColoring, burr_witness
from .ramsey import burr_bound, goodness_check, ramsey_number
from .pipeline import erdos_gallai, make_params, run_pipeline

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_PARSE = 2
EXIT_UNDECIDED = 3
EXIT_PRECONDITION = 4


class ParseFailure(Exception):
    pass


def _load_graph(arg: str) -> tuple[Graph, str]:
    """Accept a literal graph6 string or a path to a file holding one."""
    text = arg
    p = Path(arg)
    try:
        if p.is_file():
            text = p.read_text()
    except OSError:
        pass
    line = next((ln.strip() for ln in text.splitlines() if ln.strip()), "")
    try:
        return from_graph6(line), line
    except ValueError as exc:
        raise ParseFailure(f"cannot parse graph6 from {arg!r}: {exc}") from exc


def _load_coloring(arg: str) -> TwoColoring:
    p = Path(arg)
    if not p.is_file():
        raise ParseFailure(f"colouring file {arg!r} not found")
    try:
        return TwoColoring.from_text(p.read_text())
    except ValueError as exc:
        raise ParseFailure(f"cannot parse colouring file {arg!r}: {exc}") from exc


def _report(args, inputs, verdict, data, budget_info, started) -> dict:
    return {
        "command": list(args),
        "inputs": inputs,
        "verdict": verdict,
        "data": data,
        "budget": budget_info,
        "timing": {"seconds": round(time.perf_counter() - started, 6)},
    }


def _emit(report: dict) -> None:
    print(json.dumps(report, indent=2, sort_keys=True))


# -- subcommands ---------------------------------------------------------------


def _cmd_invariants(ns, argv, started):
    g, g6 = _load_graph(ns.graph)
    budget = SearchBudget(ns.budget, op="invariants")
    data: dict = {"n": g.n, "edges": g.edge_count,
                  "max_degree": g.max_degree(), "min_degree": g.min_degree(),
                  "equal_clique_union": is_equal_clique_union(g)}
    undecided = []

    def attempt(name, fn):
        try:
            data[name] = fn()
        except Undecided:
            data[name] = "undecided"
            undecided.append(name)

    attempt("chromatic_number", lambda: chromatic_number(g, budget))
    attempt("sigma", lambda: sigma(g, budget))
    attempt("independence_number", lambda: independence_number(g, budget))
    attempt("bandwidth", lambda: bandwidth(g, budget) if g.n >= 1 else 0)

    def longest_cycle_entry():
        cyc = longest_cycle(g, budget)
        return list(cyc) if cyc is not None else None

    attempt("longest_cycle", longest_cycle_entry)

    def longest_path_entry():
        for m in range(g.n, 0, -1):
            p = has_path(g, m, budget)
            if p is not None:
                return list(p)
        return None

    attempt("longest_path", longest_path_entry)

    verdict = "ok" if not undecided else f"partial: undecided {sorted(undecided)}"
    _emit(_report(argv, {"graph6": g6}, verdict, data,
                  {"limit": budget.limit, "used": budget.used}, started))
    return EXIT_OK if not undecided else EXIT_UNDECIDED


def _cmd_ramsey(ns, argv, started):
    f, f6 = _load_graph(ns.F)
    g, g6 = _load_graph(ns.G)
    inputs = {"F_graph6": f6, "G_graph6": g6, "cap": ns.cap}
    try:
        value = ramsey_number(f, g, ns.cap, budget=ns.budget, workers=ns.threads)
    except Undecided as exc:
        _emit(_report(argv, inputs, "undecided", {"detail": str(exc),
                      "largest_witness": getattr(exc, "largest_witness", None)},
                      {"limit": ns.budget}, started))
        return EXIT_UNDECIDED
    _emit(_report(argv, inputs, "decided", {"ramsey_number": value},
                  {"limit": ns.budget}, started))
    return EXIT_OK


def _cmd_goodness(ns, argv, started):
    f, f6 = _load_graph(ns.F)
    g, g6 = _load_graph(ns.G)
    inputs = {"F_graph6": f6, "G_graph6": g6, "cap": ns.cap}
    report = goodness_check(f, g, ns.cap, budget=ns.budget, workers=ns.threads)
    data = {"burr_bound": report.burr_bound, "exact_r": report.exact_r,
            "is_good": report.is_good, "note": report.note}
    if report.is_good is None:
        _emit(_report(argv, inputs, "undecided", data, {"limit": ns.budget}, started))
        return EXIT_UNDECIDED
    verdict = "good" if report.is_good else "not good"
    _emit(_report(argv, inputs, verdict, data, {"limit": ns.budget}, started))
    return EXIT_OK if report.is_good else EXIT_NEGATIVE


def _cmd_witness(ns, argv, started):
    f, f6 = _load_graph(ns.F)
    g, g6 = _load_graph(ns.G)
    col = burr_witness(f, g)
    text = col.to_text()
    if ns.out:
        Path(ns.out).write_text(text)
    data = {"host_order": col.n, "coloring": text,
            "red_graph6": col.red_graph6(), "written_to": ns.out}
    _emit(_report(argv, {"F_graph6": f6, "G_graph6": g6}, "witness", data,
                  {}, started))
    return EXIT_OK


def _cmd_eg_check(ns, argv, started):
    h, h6 = _load_graph(ns.H)
    outcome = erdos_gallai(h, ns.c, budget=ns.budget)
    if outcome[0] == "long_cycle":
        data = {"branch": "long_cycle", "cycle": list(outcome[1])}
    else:
        bound_num = (ns.c - 1) * (h.n - 1) + 2
        data = {"branch": "edge_bound", "edges": outcome[1],
                "bound": f"2e < {bound_num}"}
    _emit(_report(argv, {"H_graph6": h6, "c": ns.c}, data["branch"], data,
                  {"limit": ns.budget}, started))
    return EXIT_OK


def _cmd_pipeline(ns, argv, started):
    col = _load_coloring(ns.coloring)
    g, g6 = _load_graph(ns.G)
    budget = SearchBudget(ns.budget, op="pipeline")
    k = chromatic_number(g, budget)
    s = sigma(g, budget)
    delta = ns.delta if ns.delta is not None else max(2, g.max_degree())
    params = make_params(delta, ns.eps, g.n, k, s, strict=ns.strict,
                         beta=None if ns.strict else ns.beta,
                         host_order=None if ns.strict else col.n)
    if params.host_order != col.n:
        raise ValueError(
            f"strict host order {params.host_order} != colouring order {col.n}")
    result = run_pipeline(col, g, params, budget=budget,
                          placement_budget=ns.placement_budget)
    if ns.trace:
        Path(ns.trace).write_text(json.dumps(list(result.trace), indent=2,
                                             sort_keys=True, default=str))
    data = {
        "status": result.status,
        "stage": result.stage,
        "diagnostic": result.diagnostic,
        "red_path": list(result.red_path) if result.red_path else None,
        "embedding": list(result.embedding.mapping) if result.embedding else None,
        "seed": ns.seed,
        "trace_written_to": ns.trace,
    }
    inputs = {"coloring_sha_stage": "see trace", "coloring_file": ns.coloring,
              "G_graph6": g6}
    _emit(_report(argv, inputs, result.status, data,
                  {"limit": budget.limit, "used": budget.used}, started))
    return EXIT_OK if result.status == "embedded" else EXIT_NEGATIVE


def _cmd_gen(ns, argv, started):
    g = generate(ns.kind, ns.params, p=ns.p, max_degree=ns.max_degree,
                 seed=ns.seed)
    line = to_graph6(g)
    if ns.out:
        Path(ns.out).write_text(line + "\n")
    print(line)
    return EXIT_OK


# -- parser --------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ramseykit",
        description="Exact small-case Ramsey machinery and the blue-embedding pipeline")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def common(p):
        p.add_argument("--budget", type=int, default=20_000_000,
                       help="node budget for exact searches")
        p.add_argument("--threads", type=int, default=1,
                       help="worker processes for the arrowing search")

    p = sub.add_parser("invariants", help="all invariants of one graph")
    p.add_argument("graph", help="graph6 string or file")
    common(p)

    p = sub.add_parser("ramsey", help="exact Ramsey number by exhaustive search")
    p.add_argument("F")
    p.add_argument("G")
    p.add_argument("--cap", type=int, required=True)
    common(p)

    p = sub.add_parser("goodness", help="compare exact R(F,G) with the Burr bound")
    p.add_argument("F")
    p.add_argument("G")
    p.add_argument("--cap", type=int, required=True)
    common(p)

    p = sub.add_parser("witness", help="blocked-clique avoiding colouring")
    p.add_argument("F")
    p.add_argument("G")
    p.add_argument("-o", "--out", help="write the colouring file here")
    common(p)

    p = sub.add_parser("eg-check", help="long cycle or edge bound dichotomy")
    p.add_argument("H")
    p.add_argument("c", type=int)
    common(p)

    p = sub.add_parser("pipeline", help="run the blue-embedding pipeline")
    p.add_argument("coloring", help="colouring file (order line + red edges)")
    p.add_argument("G", help="target graph, graph6 string or file")
    p.add_argument("--eps", default="1/36", help="rational like 1/36")
    p.add_argument("--beta", type=int, default=1)
    p.add_argument("--delta", type=int, default=None,
                   help="degree bound (default: max degree of G, at least 2)")
    p.add_argument("--strict", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trace", help="write the stage trace JSON here")
    p.add_argument("--placement-budget", type=int, default=1_000_000)
    common(p)

    p = sub.add_parser("gen", help="emit a named family graph as graph6")
    p.add_argument("kind", help="path|cycle|complete|empty|path_power|multipartite|cliques|random")
    p.add_argument("params", nargs="*", type=int)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--max-degree", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("-o", "--out")

    return ap


_DISPATCH = {
    "invariants": _cmd_invariants,
    "ramsey": _cmd_ramsey,
    "goodness": _cmd_goodness,
    "witness": _cmd_witness,
    "eg-check": _cmd_eg_check,
    "pipeline": _cmd_pipeline,
    "gen": _cmd_gen,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    started = time.perf_counter()
    ap = _build_parser()
    ns = ap.parse_args(argv)
    try:
        return _DISPATCH[ns.cmd](ns, argv, started)
    except ParseFailure as exc:
        _emit(_report(argv, {}, "parse-error", {"detail": str(exc)}, {}, started))
        return EXIT_PARSE
    except Undecided as exc:
        _emit(_report(argv, {}, "undecided", {"detail": str(exc)}, {}, started))
        return EXIT_UNDECIDED
    except ValueError as exc:
        _emit(_report(argv, {}, "precondition-violation", {"detail": str(exc)},
                      {}, started))
        return EXIT_PRECONDITION


def console_entry():
    raise SystemExit(main())


if __name__ == "__main__":
    console_entry()
