"""Command-line entry point.

Exit codes: 0 the property holds or the construction succeeded, 1 it fails
or a search was exhausted, 2 bad input or usage, 3 a resource cap was hit.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import coding
from . import constructions as cons
from . import expansivity as ex
from .errors import CapExceeded, ExpnetError, NotBijective, NotExpansive
from .graphs import (
    cycle_decomposition,
    cycle_of_cycles,
    family,
    format_graph,
    is_coverable,
    is_strong,
    parse_graph,
    term_rank,
)
from .networks import Network, format_network, parse_network

log = logging.getLogger("expnet")

OK, FAILS, INPUT_ERROR, CAP = 0, 1, 2, 3

CHECK_MODES = ("expansive", "weak", "quasi", "strong", "super", "linear-criterion")
GRAPH_QUERIES = ("strong", "coverable", "term-rank", "decomposition")


class UsageError(ExpnetError):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text() if path != "-" else sys.stdin.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _int_list(text: str | None) -> list[int]:
    if not text:
        return []
    try:
        return [int(t) for t in text.replace(";", ",").split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _links(text: str | None) -> list[tuple[int, int]] | None:
    if not text:
        return None
    out = []
    for chunk in text.split(";"):
        pair = _int_list(chunk)
        if len(pair) != 2:
            raise UsageError(f"a link is 'in,out', got {chunk!r}")
        out.append((pair[0], pair[1]))
    return out


def _yes(flag: bool) -> str:
    return "yes" if flag else "no"


def _load_network(args):
    return parse_network(_read(args.network), args.max_states)


def _load_graph(args):
    if args.family:
        params = _int_list(args.params)
        return family(args.family, *params)
    if not args.graph:
        raise UsageError("give a graph file or --family")
    return parse_graph(_read(args.graph))


# -- subcommands --------------------------------------------------------------------

def cmd_check(args, out) -> int:
    f = _load_network(args)
    mode = args.mode
    if mode == "linear-criterion":
        if f.matrix is None:
            raise UsageError("linear-criterion needs a linear network file")
        cert = ex.linear_certificate(f.matrix)
        out.write(cert.to_text())
        return OK if cert.expansive else FAILS
    if mode == "super":
        if f.matrix is not None and f.matrix.ring.is_field:
            rep = ex.super_linear_report(f.matrix, max_observations=args.max_observations)
        else:
            rep = ex.super_expansive_report(f, max_states=args.max_states,
                                            max_observations=args.max_observations)
        out.write(rep.to_text())
        return OK if rep.super_expansive else FAILS
    if mode == "strong":
        try:
            rep = ex.expansion_time_report(f, args.max_states)
        except NotExpansive:
            out.write("expansive: no\nstrongly expansive: no\n")
            return FAILS
        out.write(rep.to_text())
        strong = rep.T == f.n
        out.write(f"strongly expansive: {_yes(strong)}\n")
        return OK if strong else FAILS
    variant = {"expansive": ex.FORWARD, "weak": ex.WEAK, "quasi": ex.QUASI}[mode]
    cert = ex.brute_certificate(f, variant, args.max_states)
    out.write(cert.to_text())
    if cert.holds and variant == ex.FORWARD:
        out.write(f"T(f) = {max(cert.depths.values())}\n")
    return OK if cert.holds else FAILS


def cmd_graph(args, out) -> int:
    d = _load_graph(args)
    if args.emit:
        out.write(format_graph(d))
    queries = args.query or list(GRAPH_QUERIES)
    answers = {}
    for q in queries:
        if q == "strong":
            answers[q] = is_strong(d)
            out.write(f"strong = {_yes(answers[q])}\n")
        elif q == "coverable":
            answers[q] = is_coverable(d)
            out.write(f"coverable = {_yes(answers[q])}\n")
        elif q == "term-rank":
            out.write(f"term-rank = {term_rank(d)}\n")
        elif q == "decomposition":
            cover = cycle_decomposition(d)
            answers[q] = cover is not None
            if cover is None:
                out.write("decomposition = none\n")
            else:
                out.write("decomposition = " + " ".join("(" + " ".join(map(str, c)) + ")" for c in cover) + "\n")
    for req in args.require or []:
        if req not in answers:
            answers[req] = is_strong(d) if req == "strong" else is_coverable(d)
        if not answers[req]:
            return FAILS
    return OK


def cmd_construct(args, out) -> int:
    name = args.name
    needs = {"prop5": ("q",), "nonsingular": ("q",), "random-linear": ("q",), "cycle-of-cycles": ("q",)}
    missing = [k for k in needs.get(name, ("n", "q")) if getattr(args, k) is None]
    if missing:
        raise UsageError(f"{name} needs " + " and ".join("--" + k for k in missing))
    graph = None
    if name in ("nonsingular", "random-linear"):
        graph = _load_graph(args)
    cycles = None
    if name == "cycle-of-cycles":
        cycles = cycle_of_cycles(_int_list(args.cycles), _links(args.links))
    report = cons.build(name, n=args.n, q=args.q, seed=args.seed, graph=graph,
                        loops=_int_list(args.loops), cycles=cycles, budget=args.budget)
    if report is None:
        out.write(f"search exhausted after {args.budget} attempts (seed {args.seed})\n")
        return FAILS
    results = report.verify()
    text = format_network(report.network)
    summary = report.to_text(results)
    if args.output:
        Path(args.output).write_text(text)
        Path(args.output + ".report").write_text(summary)
        out.write(summary)
    else:
        out.write(text)
        sys.stderr.write(summary)
    return OK if all(results.values()) else FAILS


def cmd_metrics(args, out) -> int:
    f = _load_network(args)
    want_time = args.time or not args.frequency
    try:
        if want_time:
            out.write(ex.expansion_time_report(f, args.max_states).to_text())
        if args.frequency:
            out.write(ex.expansion_frequency_report(f, args.max_states).to_text())
    except (NotExpansive, NotBijective) as exc:
        out.write(f"undefined: {exc}\n")
        return FAILS
    return OK


def cmd_code(args, out) -> int:
    f = _load_network(args)
    array = coding.orbit_array(f, args.max_states)
    code = coding.Code.from_array(array)
    status = OK
    if args.strength is not None:
        ok = coding.check_oa(array, args.strength)
        out.write(f"strength {args.strength} (index 1): {_yes(ok)}\n")
        status = max(status, OK if ok else FAILS)
    if args.distance:
        out.write(f"N = {code.length}\n|C| = {len(code)}\nd = {code.d_min}\nMDS = {_yes(coding.is_mds(code))}\n")
    if args.export or (args.strength is None and not args.distance):
        generator = None
        if f.matrix is not None and f.matrix.ring.is_field and ex.is_super_expansive_linear(f.matrix):
            generator = coding.generator_matrix(f.matrix)
        text = coding.format_code(code, generator)
        if args.output:
            Path(args.output).write_text(text)
            out.write(text.splitlines()[0] + "\n")
        else:
            out.write(text)
    return status


def cmd_search(args, out) -> int:
    res = cons.super_expansive_search(args.n, args.q, args.seed, args.budget, count_all=True)
    rate = res.successes / res.attempts if res.attempts else 0.0
    log.info("super-expansive search n=%d q=%d seed=%s: %d/%d", args.n, args.q, args.seed,
             res.successes, res.attempts)
    out.write(f"seed: {args.seed}\nattempts: {res.attempts}\nsuccesses: {res.successes}\n"
              f"success rate: {rate:.4f}\n")
    if res.matrix is None:
        return FAILS
    if args.output:
        Path(args.output).write_text(format_network(Network.from_matrix(res.matrix)))
    return OK


# -- parser ---------------------------------------------------------------------------

def _add_caps(p):
    p.add_argument("--max-states", type=int, default=None, help="cap on q^n (default 2^20)")
    p.add_argument("--max-observations", type=int, default=None,
                   help="cap on the number of n-cell observations (default 100000)")


def _add_graph_source(p, positional: bool):
    if positional:
        p.add_argument("graph", nargs="?", help="graph file ('-' for stdin)")
    else:
        p.add_argument("--graph", help="graph file")
    p.add_argument("--family", help="named family instead of a file (g_n, complete, circulant, path, ...)")
    p.add_argument("--params", help="comma-separated integer parameters for --family")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS,
                        help="log progress to stderr")
    parser = argparse.ArgumentParser(prog="expnet", description=__doc__.splitlines()[0], parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_parser(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    p = add_parser("check", help="decide an expansivity property of a network file")
    p.add_argument("network")
    p.add_argument("--mode", choices=CHECK_MODES, default="expansive")
    _add_caps(p)
    p.set_defaults(func=cmd_check)

    p = add_parser("graph", help="structural queries on a digraph")
    _add_graph_source(p, positional=True)
    p.add_argument("--query", action="append", choices=GRAPH_QUERIES)
    p.add_argument("--require", action="append", choices=("strong", "coverable", "decomposition"))
    p.add_argument("--emit", action="store_true", help="print the graph in file format first")
    p.set_defaults(func=cmd_graph)

    p = add_parser("construct", help="run a named construction")
    p.add_argument("name", choices=cons.CONSTRUCTIONS)
    p.add_argument("--n", type=int)
    p.add_argument("--q", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--loops", help="looped vertices for cycle-with-loops, e.g. 1,3")
    p.add_argument("--cycles", help="cycle lengths for cycle-of-cycles, e.g. 2,3")
    p.add_argument("--links", help="link endpoints 'in,out;in,out' for cycle-of-cycles")
    p.add_argument("--budget", type=int, default=100)
    p.add_argument("-o", "--output", help="network file; a '.report' sidecar is written next to it")
    _add_graph_source(p, positional=False)
    p.set_defaults(func=cmd_construct)

    p = add_parser("metrics", help="expansion time and frequency")
    p.add_argument("network")
    p.add_argument("--time", action="store_true")
    p.add_argument("--frequency", action="store_true")
    _add_caps(p)
    p.set_defaults(func=cmd_metrics)

    p = add_parser("code", help="orbit array and code of a network")
    p.add_argument("network")
    p.add_argument("--export", action="store_true")
    p.add_argument("--strength", type=int)
    p.add_argument("--distance", action="store_true")
    p.add_argument("-o", "--output")
    _add_caps(p)
    p.set_defaults(func=cmd_code)

    p = add_parser("search", help="randomized super-expansive search with success-rate logging")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=100)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_search)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return INPUT_ERROR if exc.code else OK
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args, out)
    except CapExceeded as exc:
        sys.stderr.write(f"cap exceeded: {exc}\n")
        return CAP
    except ExpnetError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
