"""Command line interface.

Exit codes: 0 on success, 1 for domain errors (invalid template, cycle,
inadmissible length), 2 for I/O and usage errors.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .boundary import GLOBAL_MEASURES, LOCAL_MEASURES, build_window, search_both
from .engine import OBJECTIVES, EngineSettings, parse_chain
from .graph import GraphError
from .pipeline import K_VIRTUAL, run_pipeline
from .randgen import GenParams, generate
from .repartition import RepartitionError, partition
from .template import TemplateError, format_template, parse_template, unroll, validate


class DomainError(Exception):
    """Problem with the model itself (exit code 1)."""


_UNITS = {"ms": 0.001, "s": 1.0, "m": 60.0, "h": 3600.0, "d": 86400.0}


def parse_duration(text: str) -> float:
    """``"500ms"``, ``"1s"``, ``"2m"``, ``"1.5h"`` or plain seconds."""
    m = re.fullmatch(r"\s*(\d+(?:\.\d*)?|\.\d+)\s*(ms|s|m|h|d)?\s*", text)
    if not m:
        raise argparse.ArgumentTypeError(f"bad duration {text!r}")
    return float(m.group(1)) * _UNITS[m.group(2) or "s"]


def _chain(text: str) -> tuple[str, ...]:
    try:
        return parse_chain(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


# --- input --------------------------------------------------------------------

def read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def load(args) -> tuple:
    text = read_text(args.file)
    try:
        t = parse_template(text)
    except TemplateError as exc:
        raise DomainError(str(exc)) from None
    return t, hashlib.sha256(text.encode()).hexdigest()


def settings_from(args) -> EngineSettings:
    return EngineSettings(heuristics=args.heuristics, seed=args.seed, budget=args.budget,
                          exhaustive_limit=args.exhaustive_limit, objective=args.objective)


# --- output -------------------------------------------------------------------

def emit(args, report: dict, lines: list[str]) -> None:
    if args.json:
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        print("\n".join(lines))


def write_dot(args, text: str) -> None:
    if getattr(args, "dot", None):
        Path(args.dot).write_text(text)


# --- subcommands -----------------------------------------------------------------

def cmd_check(args) -> int:
    text = read_text(args.file)
    try:
        t = parse_template(text, check=False)
    except TemplateError as exc:
        problems = [str(exc)]
    else:
        problems = validate(t)
    report = {"file": args.file, "valid": not problems, "diagnostics": problems}
    emit(args, report, ["ok"] if not problems else [f"error: {p}" for p in problems])
    return 0 if not problems else 1


def _graph_report(g, directed: bool) -> dict:
    edges = g.edges()
    return {
        "nodes": [{"id": v, "label": i.label, "card": i.card} for v, i in g.info.items()],
        "edges": [[g.info[a].label, g.info[b].label] for a, b in edges],
        "directed": directed,
    }


def cmd_unroll(args) -> int:
    t, digest = load(args)
    u = unroll(t, args.k)
    report = {"input": digest, "k": args.k, "slices": u.slices, **_graph_report(u.graph, True)}
    lines = [f"k={args.k} slices={u.slices} nodes={len(u.graph)} edges={len(u.graph.edges())}"]
    lines += [f"{a} -> {b}" for a, b in report["edges"]]
    emit(args, report, lines)
    if args.dot:
        out = ["digraph G {"]
        out += [f'  {v} [label="{i.label}"];' for v, i in u.graph.info.items()]
        out += [f"  {a} -> {b};" for a, b in u.graph.edges()]
        write_dot(args, "\n".join(out + ["}"]) + "\n")
    return 0


def cmd_moralize(args) -> int:
    t, digest = load(args)
    u = unroll(t, args.k)
    g = u.moral()
    report = {"input": digest, "k": args.k, **_graph_report(g, False)}
    lines = [f"k={args.k} nodes={len(g)} edges={len(g.edges())}"]
    lines += [f"{a} -- {b}" for a, b in report["edges"]]
    emit(args, report, lines)
    write_dot(args, g.to_dot())
    return 0


def _boundary_dict(res) -> dict:
    return {
        "direction": res.direction,
        "initial_interface": res.labels(res.initial_interface),
        "initial_quality": res.initial_quality,
        "interface": res.labels(),
        "passed": res.labels(res.left_of_boundary),
        "quality": res.quality,
        "states_visited": res.states_visited,
    }


def cmd_boundary(args) -> int:
    t, digest = load(args)
    w = build_window(t, args.M)
    sizes = {"left": len(w.left_interface()), "right": len(w.right_interface())}
    report = {"input": digest, "M": args.M, "S": args.S, "j": args.j,
              "initial_interface_size": sizes, "results": {}}
    directions = ["left", "right"] if args.direction == "both" else [args.direction]
    if args.j in LOCAL_MEASURES:
        left, right = search_both(t, args.M, args.j)
        found = {"left": left, "right": right}
        for d in directions:
            report["results"][d] = _boundary_dict(found[d])
    else:
        for d in directions:
            rt = partition(t, args.M, args.S, args.j, d, settings=settings_from(args))
            report["results"][d] = _boundary_dict(rt.boundary)
            report["results"][d]["direction"] = d
    if args.direction == "both":
        qs = [r["quality"] for r in report["results"].values()]
        report["parity"] = qs[0] == qs[1]
    lines = [f"initial interface size: left {sizes['left']}, right {sizes['right']}"]
    for d, r in report["results"].items():
        lines.append(f"{d:>5}: best {{{', '.join(r['interface'])}}} quality={r['quality']:g} "
                     f"(initial {r['initial_quality']:g}) states_visited={r['states_visited']}")
    if "parity" in report:
        lines.append(f"parity: {'yes' if report['parity'] else 'NO'}")
    emit(args, report, lines)
    if args.dot:
        first = next(iter(report["results"]))
        res = found[first] if args.j in LOCAL_MEASURES else None
        write_dot(args, w.graph.to_dot(res.interface if res else ()))
    return 0


def _direction(args) -> str:
    return "best" if args.direction == "both" else args.direction


def cmd_partition(args) -> int:
    t, digest = load(args)
    rt = partition(t, args.M, args.S, args.j, _direction(args), args.basic_interface, settings_from(args))
    report = {"input": digest, **rt.to_dict()}
    d = rt.to_dict()
    lines = [
        f"M={rt.m} S={rt.s} direction={d['direction']}",
        f"P': {len(rt.p_prime)} nodes  C': {len(rt.c_prime)} nodes  E': {len(rt.e_prime)} nodes",
        f"left interface:  {{{', '.join(d['left_interface'])}}}",
        f"right interface: {{{', '.join(d['right_interface'])}}}",
        f"admissible lengths: {rt.formula()}",
    ]
    emit(args, report, lines)
    return 0


def _pipeline(args, t):
    return run_pipeline(t, args.M, args.S, args.j, _direction(args), args.basic_interface, settings_from(args))


def cmd_triangulate(args) -> int:
    t, digest = load(args)
    start = time.perf_counter()
    res = _pipeline(args, t)
    rt, tt = res.rt, res.tt
    k_orig = args.k if args.k is not None else rt.m + 2 * rt.s
    length = t.p_frames + k_orig * t.c_frames + t.e_frames
    if not rt.admissible(length):
        raise DomainError(f"k={k_orig} (T={length}) is not admissible; need {rt.formula()} "
                          f"with k counting copies of C'")
    k = rt.k_for(length)
    summary = tt.summary(k, args.k_virtual)
    report = {"input": digest, "engine": settings_from(args).to_dict(), "repartition": rt.to_dict(),
              "triangulation": summary}
    if args.timings:
        report["timings"] = {"total_seconds": time.perf_counter() - start}
    a = summary["assembled"]
    ver = a["verification"]
    lines = [
        f"interface |C_L| = {len(rt.left_interface)} {{{', '.join(rt.labels(rt.left_interface))}}}",
        "pieces: " + "  ".join(f"{n}: mc={p['maxclique']} fill={p['fill']}" for n, p in summary["pieces"].items()),
        f"maxclique {summary['maxclique']} (elimination only {summary['elim_maxclique']})",
        f"log10 weight, {args.k_virtual} virtual copies: {summary['virtual_log_weight']:.4f}",
        f"assembled k={k_orig} (T={length}): maxclique {a['maxclique']} log10 weight {a['log_weight']:.4f}",
        "verification: " + ", ".join(f"{n}={'pass' if ok else 'FAIL'}" for n, ok in ver.items()),
    ]
    emit(args, report, lines)
    if args.dot:
        asm = tt.assemble(k)
        write_dot(args, asm.filled.to_dot())
    return 0 if all(ver.values()) else 1


def cmd_score(args) -> int:
    t, digest = load(args)
    res = _pipeline(args, t)
    mc, lw = res.tt.maxclique, res.tt.log_weight(args.k_virtual)
    report = {"input": digest, "maxclique": mc, "log_weight": round(lw, 6), "virtual_k": args.k_virtual,
              "interface_size": len(res.rt.left_interface)}
    emit(args, report, [f"maxclique {mc}  log10 weight {lw:.4f}  (k={args.k_virtual})"])
    return 0


def cmd_randgen(args) -> int:
    p = GenParams(args.nodes, (args.card_min, args.card_max), args.density, args.backward, args.seed)
    text = format_template(generate(p))
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


BENCH_COLUMNS = ("seed", "nodes", "backward", "init_left", "init_right", "basic_mc", "basic_weight",
                 "boundary_iface", "boundary_mc", "boundary_weight")


def bench_row(job) -> dict:
    seed, nodes, backward, density, m, s, j, settings, k_virtual = job
    t = generate(GenParams(nodes, edge_density=density, allow_backward=backward, seed=seed))
    w = build_window(t, m)
    basic = run_pipeline(t, m, s, basic=True, settings=settings)
    found = run_pipeline(t, m, s, j, "best", settings=settings)
    return {
        "seed": seed, "nodes": nodes, "backward": int(backward),
        "init_left": len(w.left_interface()), "init_right": len(w.right_interface()),
        "basic_mc": basic.tt.maxclique, "basic_weight": round(basic.tt.log_weight(k_virtual), 4),
        "boundary_iface": len(found.rt.left_interface), "boundary_mc": found.tt.maxclique,
        "boundary_weight": round(found.tt.log_weight(k_virtual), 4),
    }


def cmd_bench(args) -> int:
    settings = settings_from(args)
    jobs = [(args.seed + i, args.nodes, args.backward, args.density, args.M, args.S, args.j, settings,
             args.k_virtual) for i in range(args.trials)]
    if args.threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(args.threads) as pool:
            rows = list(pool.map(bench_row, jobs))
    else:
        rows = [bench_row(job) for job in jobs]
    if args.json:
        print(json.dumps({"columns": list(BENCH_COLUMNS), "rows": rows}, indent=2, sort_keys=True))
    else:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=BENCH_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        sys.stdout.write(buf.getvalue())
    return 0


# --- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dyntri", description="Boundary search and triangulation "
                                     "for dynamic graphical model templates.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, file=True):
        if file:
            p.add_argument("file", help="template file ('-' reads stdin)")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        return p

    def search_opts(p):
        p.add_argument("--M", type=_positive, default=1, help="chunks a boundary may span")
        p.add_argument("--S", type=_positive, default=1, help="chunks between boundaries")
        p.add_argument("--j", choices=LOCAL_MEASURES + GLOBAL_MEASURES, default="size",
                       help="interface quality measure")
        p.add_argument("--direction", choices=("left", "right", "both"), default="both")

    def engine_opts(p):
        p.add_argument("--heuristics", type=_chain, default=("fillin", "cliqueSize"),
                       help="comma-separated chain, e.g. fillin,cliqueSize,random")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--budget", type=parse_duration, default=0.0,
                       help="anytime budget such as 500ms, 10s, 2m (0 = single greedy pass)")
        p.add_argument("--exhaustive-limit", type=int, default=10)
        p.add_argument("--objective", choices=OBJECTIVES, default="maxclique")
        p.add_argument("--basic-interface", action="store_true", help="skip the boundary search")
        p.add_argument("--k-virtual", type=int, default=K_VIRTUAL)

    p = common(sub.add_parser("check", help="validate a template"))
    p.set_defaults(func=cmd_check)

    for name, func, helptext in (("unroll", cmd_unroll, "unroll a template k times"),
                                 ("moralize", cmd_moralize, "moral graph of the k-unrolled template")):
        p = common(sub.add_parser(name, help=helptext))
        p.add_argument("--k", type=_positive, default=2)
        p.add_argument("--dot", metavar="PATH")
        p.set_defaults(func=func)

    p = common(sub.add_parser("boundary", help="search the best interface"))
    search_opts(p)
    engine_opts(p)
    p.add_argument("--dot", metavar="PATH")
    p.set_defaults(func=cmd_boundary)

    p = common(sub.add_parser("partition", help="repartition along the best boundary"))
    search_opts(p)
    engine_opts(p)
    p.set_defaults(func=cmd_partition)

    p = common(sub.add_parser("triangulate", help="full pipeline with verification"))
    search_opts(p)
    engine_opts(p)
    p.add_argument("--k", type=int, default=None, help="chunk copies of the original template")
    p.add_argument("--dot", metavar="PATH")
    p.add_argument("--timings", action="store_true", help="include wall-clock timings")
    p.set_defaults(func=cmd_triangulate)

    p = common(sub.add_parser("score", help="maxclique and virtual weight"))
    search_opts(p)
    engine_opts(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("randgen", help="emit a random template")
    p.add_argument("--nodes", type=_positive, default=5)
    p.add_argument("--density", type=float, default=None)
    p.add_argument("--backward", action="store_true")
    p.add_argument("--card-min", type=int, default=2)
    p.add_argument("--card-max", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_randgen)

    p = common(sub.add_parser("bench", help="basic vs boundary pipelines on random templates"), file=False)
    search_opts(p)
    engine_opts(p)
    p.set_defaults(j="global-weight")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--nodes", type=_positive, default=5)
    p.add_argument("--density", type=float, default=None)
    p.add_argument("--backward", action="store_true")
    p.add_argument("--threads", type=_positive, default=1, help="worker processes (results unchanged)")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, TemplateError, RepartitionError, GraphError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
