"""Command-line interface.

Subcommands: dbase, represent, recognize, cgi, scheme-info.  Graphs are read
from edge-list files ("n m [directed|undirected]" header, then "u v" lines,
'#' comments); machine-readable JSON goes to stdout, a human summary and
timing to stderr.  Exit codes: 0 success/yes, 1 no, 2 malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass

from .cayley import AbstractGroupD, cayley_isomorphic, crg, representation_from_subgroup
from .classify import is_quasinormal, singular_data
from .cohcfg import cc_from_graph, is_feasible, is_primitive
from .dbase import PipelineTrace, main_dbase, prime_power
from .errors import MalformedInput

EXIT_YES = 0
EXIT_NO = 1
EXIT_MALFORMED = 2


@dataclass
class GraphInput:
    n: int
    edges: list[tuple[int, int]]
    directed: bool


def parse_graph_text(text: str) -> GraphInput:
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines:
        raise MalformedInput("empty graph file")
    head = lines[0].split()
    if len(head) not in (2, 3):
        raise MalformedInput(f"bad header {lines[0]!r}: expected 'n m [directed|undirected]'")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError as exc:
        raise MalformedInput(f"bad header {lines[0]!r}") from exc
    directed = True
    if len(head) == 3:
        if head[2] not in ("directed", "undirected"):
            raise MalformedInput(f"bad directedness flag {head[2]!r}")
        directed = head[2] == "directed"
    if n < 1:
        raise MalformedInput("vertex count must be positive")
    if len(lines) - 1 != m:
        raise MalformedInput(f"expected {m} edge lines, found {len(lines) - 1}")
    edges = set()
    for line in lines[1:]:
        parts = line.split()
        if len(parts) != 2:
            raise MalformedInput(f"bad edge line {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise MalformedInput(f"bad edge line {line!r}") from exc
        if not (0 <= u < n and 0 <= v < n):
            raise MalformedInput(f"edge ({u}, {v}) out of range")
        edges.add((u, v))
        if not directed:
            edges.add((v, u))
    return GraphInput(n, sorted(edges), directed)


def parse_graph_file(path: str) -> GraphInput:
    try:
        with open(path) as fh:
            return parse_graph_text(fh.read())
    except OSError as exc:
        raise MalformedInput(f"cannot read graph file {path}: {exc}") from exc


def parse_cayley_file(path: str) -> tuple[int, int, list[tuple[int, int]]]:
    """Connection-set file: first line 'p k', then one 'i j' pair per line."""
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise MalformedInput(f"cannot read cayley file {path}: {exc}") from exc
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise MalformedInput("empty cayley file")
    head = lines[0].split()
    if len(head) != 2:
        raise MalformedInput(f"bad cayley header {lines[0]!r}: expected 'p k'")
    try:
        p, k = int(head[0]), int(head[1])
    except ValueError as exc:
        raise MalformedInput(f"bad cayley header {lines[0]!r}") from exc
    if p not in (2, 3) or k < 1:
        raise MalformedInput("cayley header requires p in {2, 3} and k >= 1")
    conn = []
    for line in lines[1:]:
        parts = line.split()
        if len(parts) != 2:
            raise MalformedInput(f"bad connection-set line {line!r}")
        conn.append((int(parts[0]) % p ** k, int(parts[1]) % p))
    if (0, 0) in conn:
        raise MalformedInput("connection set contains the identity")
    return p, k, sorted(set(conn))


def _emit(report: dict, summary_lines: list[str], elapsed: float) -> None:
    print(json.dumps(report, sort_keys=True, separators=(",", ":")))
    for line in summary_lines:
        print(line, file=sys.stderr)
    print(f"elapsed: {elapsed:.3f}s", file=sys.stderr)


def _check_size(graph: GraphInput, p: int, k: int) -> None:
    if graph.n != p ** (k + 1):
        raise MalformedInput(
            f"graph has {graph.n} vertices, expected {p}^{k + 1} = {p ** (k + 1)}")


def build_dbase_report(n: int, edges, p: int, k: int, seed: int) -> dict:
    """The dbase report for a parsed graph; deterministic for a fixed seed."""
    X = cc_from_graph(n, edges)
    trace = PipelineTrace()
    out = main_dbase(X, p, k, seed=seed, trace=trace)
    return {
        "command": "dbase",
        "n": n,
        "p": p,
        "k": k,
        "seed": seed,
        "b_D": len(out.subgroups),
        "classes": [
            {"generators": [g.cycle_string() for g in G.generators]}
            for G in out.subgroups
        ],
        "iterations": trace.iterations,
        "gate": trace.gate,
        "aut_order": trace.aut_order,
        "sylow_order": trace.sylow_order,
    }


def cmd_dbase(args) -> int:
    t0 = time.perf_counter()
    graph = parse_graph_file(args.graph)
    _check_size(graph, args.p, args.k)
    X = cc_from_graph(graph.n, graph.edges)
    report = build_dbase_report(graph.n, graph.edges, args.p, args.k, args.seed)
    elapsed = time.perf_counter() - t0
    summary = [f"D-base size: {report['b_D']}",
               f"singular resolutions: {len(report['iterations'])}"]
    if report["gate"]:
        summary.append(f"gate: {report['gate']}")
    _emit(report, summary, elapsed)
    if args.figure:
        from .viz import render_color_matrix

        render_color_matrix(X, args.figure,
                            title=f"closure of input: n={X.n}, rank={X.rank}")
    return EXIT_YES


def cmd_represent(args) -> int:
    t0 = time.perf_counter()
    graph = parse_graph_file(args.graph)
    _check_size(graph, args.p, args.k)
    reps = crg(graph.n, graph.edges, args.p, args.k, seed=args.seed)
    report = {
        "command": "represent",
        "n": graph.n,
        "p": args.p,
        "k": args.k,
        "seed": args.seed,
        "count": len(reps),
        "representations": [r.to_json_dict() for r in reps],
    }
    elapsed = time.perf_counter() - t0
    _emit(report, [f"representations: {len(reps)}"], elapsed)
    if args.figure:
        from .viz import render_connection_sets

        render_connection_sets(reps, args.p, args.k, args.figure)
    return EXIT_YES


def cmd_recognize(args) -> int:
    t0 = time.perf_counter()
    graph = parse_graph_file(args.graph)
    _check_size(graph, args.p, args.k)
    reps = crg(graph.n, graph.edges, args.p, args.k, seed=args.seed)
    yes = bool(reps)
    report = {
        "command": "recognize",
        "n": graph.n,
        "p": args.p,
        "k": args.k,
        "seed": args.seed,
        "cayley": yes,
    }
    elapsed = time.perf_counter() - t0
    _emit(report, ["cayley graph" if yes else "not a cayley graph"], elapsed)
    return EXIT_YES if yes else EXIT_NO


def cmd_cgi(args) -> int:
    t0 = time.perf_counter()
    p, k, conn = parse_cayley_file(args.cayley)
    graph = parse_graph_file(args.graph)
    _check_size(graph, p, k)
    reps = crg(graph.n, graph.edges, p, k, seed=args.seed)
    yes = any(cayley_isomorphic(r.connection_set, conn, p, k) for r in reps)
    report = {
        "command": "cgi",
        "n": graph.n,
        "p": p,
        "k": k,
        "seed": args.seed,
        "connection_set": [list(x) for x in conn],
        "isomorphic": yes,
    }
    elapsed = time.perf_counter() - t0
    _emit(report, ["isomorphic" if yes else "not isomorphic"], elapsed)
    return EXIT_YES if yes else EXIT_NO


def cmd_scheme_info(args) -> int:
    t0 = time.perf_counter()
    graph = parse_graph_file(args.graph)
    X = cc_from_graph(graph.n, graph.edges)
    pe = prime_power(graph.n)
    p = pe[0] if pe and pe[0] in (2, 3) and pe[1] >= 2 else None
    feasible = is_feasible(X)
    report = {
        "command": "scheme-info",
        "n": X.n,
        "rank": X.rank,
        "fibers": [list(f) for f in X.fibers],
        "homogeneous": X.is_homogeneous(),
        "feasible": feasible,
        "primitive": is_primitive(X),
        "p": p,
        "quasinormal": is_quasinormal(X, p) if p else None,
        "singular": None,
        "singular_pairs": [],
    }
    if feasible and p:
        data = singular_data(X, p)
        report["singular"] = data is not None
        if data is not None:
            report["singular_pairs"] = [
                {"f_class_size": len(F.classes[0]), "e_class_size": len(E.classes[0])}
                for F, E in data.all_pairs
            ]
    elapsed = time.perf_counter() - t0
    summary = [f"n={X.n} rank={X.rank} fibers={len(X.fibers)}",
               f"feasible={feasible} primitive={report['primitive']}"]
    _emit(report, summary, elapsed)
    if args.figure:
        from .viz import render_color_matrix

        render_color_matrix(X, args.figure)
    return EXIT_YES


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cayrep",
        description="Cayley representations of graphs over C_p x C_{p^k}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp, needs_pk=True):
        sp.add_argument("--graph", required=True, help="edge-list file")
        if needs_pk:
            sp.add_argument("--p", type=int, required=True, choices=(2, 3))
            sp.add_argument("--k", type=int, required=True)
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("dbase", help="D-base of the automorphism group")
    add_common(sp)
    sp.add_argument("--figure", help="write a color-matrix figure (png)")
    sp.set_defaults(func=cmd_dbase)

    sp = sub.add_parser("represent", help="all non-equivalent Cayley representations")
    add_common(sp)
    sp.add_argument("--figure", help="write a connection-set figure (png)")
    sp.set_defaults(func=cmd_represent)

    sp = sub.add_parser("recognize", help="is the graph a Cayley graph over D?")
    add_common(sp)
    sp.set_defaults(func=cmd_recognize)

    sp = sub.add_parser("cgi", help="isomorphism against an explicit Cayley graph")
    sp.add_argument("--cayley", required=True, help="connection-set file")
    sp.add_argument("--graph", required=True, help="edge-list file")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_cgi)

    sp = sub.add_parser("scheme-info", help="diagnostics of the coherent closure")
    sp.add_argument("--graph", required=True, help="edge-list file")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--figure", help="write a color-matrix figure (png)")
    sp.set_defaults(func=cmd_scheme_info)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "k", None) is not None and args.k < 1:
        print("error: k must be at least 1", file=sys.stderr)
        return EXIT_MALFORMED
    try:
        return args.func(args)
    except MalformedInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED


if __name__ == "__main__":
    sys.exit(main())
