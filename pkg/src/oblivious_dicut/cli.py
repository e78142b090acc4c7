"""Command-line front end: ``oblivious-dicut <command> ...``.

Exit codes: 0 ok, 1 other input error, 2 parse error, 3 size limit,
4 solver failure, 5 invalid certificate.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from fractions import Fraction

from . import algorithms, bounds, graph, ratio_lp, search, selection, twoand
from .errors import DicutError, ParseError
from .rational import format_decimal, format_fraction, parse_number

log = logging.getLogger("oblivious_dicut")


def _num(x: Fraction) -> str:
    return f"{format_fraction(x)} ({format_decimal(x)})"


def resolve_function(spec: str) -> selection.StepFunction:
    """A ``stepfn v1`` file path or one of the built-in names."""
    if os.path.exists(spec):
        return selection.read_stepfn(spec)
    try:
        return selection.named_function(spec)
    except KeyError:
        raise ParseError(f"no such file or built-in function: {spec!r}")
    except ValueError as exc:
        raise ParseError(f"bad function argument in {spec!r}: {exc}")


def _read_graph(path: str) -> graph.WeightedDigraph:
    try:
        return graph.read_graph(path)
    except FileNotFoundError:
        raise ParseError(f"cannot open graph file {path!r}")


def _write(path: str, text: str) -> None:
    with open(path, "w") as fh:
        fh.write(text)


def _number_arg(text: str) -> Fraction:
    try:
        return parse_number(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


# --- subcommands -----------------------------------------------------------


def cmd_ratio(args) -> int:
    f = resolve_function(args.fn)
    cert = ratio_lp.approximation_ratio(
        f, sym_reduce=args.sym_reduce, time_limit=args.time_limit, rule=args.rule
    )
    print(f"{format_decimal(cert.lower)} {format_decimal(cert.upper)}")
    print(f"exact {format_fraction(cert.lower)} {format_fraction(cert.upper)}")
    print(f"function {cert.fingerprint}")
    print(f"witness {cert.witness.vertex_count} vertices, ratio <= {_num(cert.witness_ratio())}")
    if args.witness:
        graph.write_graph(cert.witness, args.witness)
    if args.cert:
        text = ratio_lp.format_certificate(cert)
        ratio_lp.verify_certificate(text, f)
        _write(args.cert, text)
    return 0


def cmd_verify(args) -> int:
    f = resolve_function(args.fn)
    with open(args.cert) as fh:
        lower, upper = ratio_lp.verify_certificate(fh.read(), f)
    print(f"valid {format_decimal(lower)} {format_decimal(upper)}")
    return 0


def cmd_eval(args) -> int:
    g = _read_graph(args.graph)
    f = resolve_function(args.fn)
    exp = graph.expected_cut_weight(g, f)
    total = g.total_weight
    print(f"expected {_num(exp)}")
    print(f"relative {_num(exp / total)}")
    if args.mc:
        mean, se = graph.monte_carlo_cut_weight(g, f, args.mc, args.seed)
        print(f"monte-carlo {mean:.10f} +- {se:.10f} ({args.mc} trials, seed {args.seed})")
    return 0


def cmd_opt(args) -> int:
    g = _read_graph(args.graph)
    cut, weight = graph.brute_force_opt(g)
    names = [g.labels[v] if g.labels else str(v) for v in sorted(cut)]
    print(f"opt {_num(weight)}")
    print("cut " + " ".join(names))
    return 0


def cmd_search(args) -> int:
    ledger = open(args.ledger, "w") if args.ledger else None
    try:
        f, cert = search.exhaustive_best(args.n, jobs=args.jobs, ledger=ledger)
    finally:
        if ledger is not None:
            ledger.close()
    print(f"best {_num(cert.lower)} upper {_num(cert.upper)}")
    if args.refine:
        grid, rounds = args.refine
        f, cert = search.local_refine(f, grid, rounds)
        print(f"refined {_num(cert.lower)} upper {_num(cert.upper)}")
    sys.stdout.write(selection.format_stepfn(f))
    return 0


def cmd_bound(args) -> int:
    c, k1, k2 = args.c, args.g1, args.g2
    g = bounds.build_combined(c, k1, k2)
    opt = bounds.combined_opt(c, k1, k2)
    print(f"graph {g.vertex_count} vertices {len(g.edges)} edges opt {_num(opt)}")
    alpha = bounds.best_alpha(c, k1, k2)
    print(f"max {_num(bounds.gadget_ratio(c, alpha, k1, k2))} at alpha {_num(alpha)}")
    if args.alpha_grid is not None:
        step = args.alpha_grid
        if step <= 0 or step > 1:
            raise ParseError("--alpha-grid must lie in (0, 1]")
        print("alpha,ratio")
        k = 0
        while k * step <= 1:
            a = k * step
            print(f"{format_decimal(a)},{format_decimal(bounds.gadget_ratio(c, a, k1, k2))}")
            k += 1
    if args.fn:
        f = resolve_function(args.fn)
        on_graph = graph.expected_cut_weight(g, f) / opt
        print(f"fn ratio on gadgets {_num(on_graph)}")
        print(f"fn ratio on even cycle {_num(bounds.even_cycle_ratio(f))}")
        print(f"fn bound {_num(bounds.nonsymmetric_bound(f, c, k1, k2))}")
    if args.out:
        graph.write_graph(g, args.out)
    return 0


def cmd_reduce2and(args) -> int:
    try:
        phi = twoand.read_twoand(args.input)
    except FileNotFoundError:
        raise ParseError(f"cannot open 2-AND file {args.input!r}")
    g, _ = twoand.reduce_to_dicut(phi)
    graph.write_graph(g, args.out)
    print(f"wrote {g.vertex_count} vertices {len(g.edges)} edges")
    return 0


def cmd_expand(args) -> int:
    g = _read_graph(args.graph)
    _, m = graph.unweighted_scale(g)
    h = graph.expand_to_unweighted(g, max_copies=args.max_copies)
    graph.write_graph(h, args.out)
    print(f"copies {m} vertices {h.vertex_count} edges {len(h.edges)}")
    return 0


def cmd_mixmax(args) -> int:
    g = _read_graph(args.graph)
    members = tuple(algorithms.parse_member(m, resolve_function) for m in args.members)
    mix = None
    if args.mix:
        if len(args.mix) != len(members):
            raise ParseError("--mix needs one weight per member")
        mix = tuple(args.mix)
    try:
        p = algorithms.PortfolioSpec(members, mix)
    except ValueError as exc:
        raise ParseError(str(exc))
    opt = None
    if g.vertex_count <= graph.max_brute_vertices():
        opt = graph.brute_force_opt(g)[1]
        print(f"opt {_num(opt)}")

    def show(label, value):
        extra = f" ratio {_num(value / opt)}" if opt else ""
        print(f"{label} {_num(value)}{extra}")

    for name, m in zip(args.members, members):
        show(f"member {name}", algorithms.member_expected_weight(g, m))
    show("maxexp", algorithms.portfolio_maxexp(g, p))
    if mix is not None:
        show("mix", algorithms.portfolio_mix(g, p))
    if args.trials:
        mean, se = algorithms.portfolio_expmax(g, p, args.seed, args.trials)
        print(f"expmax {mean:.10f} +- {se:.10f} ({args.trials} trials, seed {args.seed})")
    return 0


# --- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="oblivious-dicut", description="Oblivious algorithms for Max DICUT.")
    p.add_argument("--log-level", default="WARNING", help="logging level (default WARNING)")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("ratio", help="certified worst-case ratio of a step function")
    s.add_argument("--fn", required=True, help="stepfn file or built-in name")
    s.add_argument("--witness", help="write the witness graph here")
    s.add_argument("--cert", help="write a ratio-cert v1 certificate here")
    s.add_argument("--sym-reduce", action="store_true", help="halve the LP using reversal symmetry")
    s.add_argument("--rule", choices=("dantzig", "bland"), default="dantzig")
    s.add_argument("--time-limit", type=float, default=None, help="seconds")
    s.set_defaults(func=cmd_ratio)

    s = sub.add_parser("verify", help="re-check a certificate file")
    s.add_argument("--fn", required=True)
    s.add_argument("--cert", required=True)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("eval", help="exact expected cut weight")
    s.add_argument("--graph", required=True)
    s.add_argument("--fn", required=True)
    s.add_argument("--mc", type=int, default=0, metavar="TRIALS")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("opt", help="brute-force optimal cut")
    s.add_argument("--graph", required=True)
    s.set_defaults(func=cmd_opt)

    s = sub.add_parser("search", help="best member of the discretized family")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--refine", type=int, nargs=2, metavar=("GRID", "ROUNDS"))
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--ledger", help="write one '<hash> <lower> <upper>' line per candidate")
    s.set_defaults(func=cmd_search)

    s = sub.add_parser("bound", help="gadget upper bounds")
    s.add_argument("--c", type=_number_arg, default=Fraction(5, 4))
    s.add_argument("--g1", type=int, default=1)
    s.add_argument("--g2", type=int, default=3)
    s.add_argument("--alpha-grid", type=_number_arg, metavar="STEP")
    s.add_argument("--fn")
    s.add_argument("--out", help="write the combined gadget graph here")
    s.set_defaults(func=cmd_bound)

    s = sub.add_parser("reduce2and", help="2-AND instance to DICUT graph")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_reduce2and)

    s = sub.add_parser("expand", help="weighted graph to unit-weight graph")
    s.add_argument("--graph", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--max-copies", type=int, default=graph.DEFAULT_MAX_EXPANSION)
    s.set_defaults(func=cmd_expand)

    s = sub.add_parser("mixmax", help="portfolio report")
    s.add_argument("--graph", required=True)
    s.add_argument("--members", nargs="+", required=True, help="'greedy' or function names/files")
    s.add_argument("--mix", type=_number_arg, nargs="+")
    s.add_argument("--trials", type=int, default=0)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_mixmax)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=getattr(logging, str(args.log_level).upper(), logging.WARNING))
    try:
        return args.func(args)
    except DicutError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
