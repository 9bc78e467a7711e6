"""Command-line front end.

Exit codes: 0 secure, 1 insecure, 2 unknown, 3 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import deciders
from .constructions import build_nd, build_ndc_product, build_pcheck
from .deciders import CheckReport, Status
from .dot import net_to_dot, reachability_to_dot
from .errors import NicheckError, OracleOverflow
from .reach import Limits
from .textformat import load_net, serialize_net

EXIT = {Status.SECURE: 0, Status.INSECURE: 1, Status.UNKNOWN: 2}
EXIT_USAGE = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _pair(text: str) -> tuple[str, str]:
    parts = text.split(",")
    if len(parts) != 2 or not all(parts):
        raise argparse.ArgumentTypeError("expected HIGH,LOW")
    return parts[0], parts[1]


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="nicheck", description="Non-interference checks for Place/Transition nets.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", help="decide a security property")
    c.add_argument("net", help="net file in the nicheck text format")
    c.add_argument("--property", required=True, choices=deciders.PROPERTIES)
    c.add_argument("--engine", choices=("structural", "oracle", "both"), default="structural")
    c.add_argument("--state-bound", type=_positive, default=None)
    c.add_argument("--depth-bound", type=_positive, default=None)
    c.add_argument("--json", action="store_true", help="print the report as JSON")
    c.add_argument("--dot", metavar="FILE", help="also write the net graph in DOT format")
    c.add_argument("--allow-reserved", action="store_true",
                   help="accept names generated by the constructions")

    k = sub.add_parser("construct", help="print a derived net in the text format")
    k.add_argument("net")
    g = k.add_mutually_exclusive_group(required=True)
    g.add_argument("--pcheck", type=_pair, metavar="H,L", help="two-copy check net for (H, L)")
    g.add_argument("--qcheck", type=_pair, metavar="H,L",
                   help="two-copy check net where downgrading transitions are guarded too")
    g.add_argument("--nd", metavar="D", help="downgrading net for D")
    g.add_argument("--ndc-product", action="store_true", help="language-inclusion product")
    k.add_argument("-o", "--output", metavar="FILE")
    k.add_argument("--allow-reserved", action="store_true")

    d = sub.add_parser("dot", help="export the net or its reachability graph in DOT format")
    d.add_argument("net")
    d.add_argument("--rg", action="store_true", help="export the reachability graph")
    d.add_argument("--state-bound", type=_positive, default=None)
    d.add_argument("-o", "--output", metavar="FILE")
    d.add_argument("--allow-reserved", action="store_true")
    return p


def _seq(xs) -> str:
    return " ".join(xs) if xs else "ε"


def render_report(report: CheckReport) -> str:
    lines = [f"{report.property}: {report.status.value}"]
    w = report.witness
    if w is not None:
        lines.append(f"  witness: h={w['h']} l={w['l']} ({w['direction']})")
        if w.get("d"):
            lines.append(f"    after  = {_seq(w.get('prefix'))} {w['d']}")
        lines.append(f"    w      = {_seq(w['w'])}")
        lines.append(f"    s      = {_seq(w['s'])}")
    lines.append("  subchecks:")
    for sc in report.subchecks:
        proof = f" [{sc.proof}]" if sc.proof else ""
        lines.append(f"    {sc.name:<12} {sc.status.value}{proof}")
    st = report.stats
    lines.append(f"  states explored: {st['states']}, ILP solves: {st['ilp_solves']}, "
                 f"Karp-Miller nodes: {st['km_nodes']}")
    lines.append(f"  limits: max_states={report.limits.max_states} "
                 f"max_depth={report.limits.max_depth}")
    return "\n".join(lines)


def _write(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _run_check(args) -> int:
    net = load_net(args.net, args.allow_reserved)
    limits = Limits.from_env(max_states=args.state_bound, max_depth=args.depth_bound)
    if args.dot:
        _write(net_to_dot(net), args.dot)
    extra = {}
    if args.engine == "oracle":
        try:
            report = deciders.oracle_check(net, args.property, limits)
        except OracleOverflow as exc:
            print(f"{args.property.upper()}: unknown (oracle does not apply: {exc})",
                  file=sys.stderr)
            return EXIT[Status.UNKNOWN]
    elif args.engine == "both":
        cv = deciders.cross_validate(net, args.property, limits)
        report = deciders.check(net, args.property, limits)
        extra = {"cross_validation": cv.to_json()}
        if cv.agree is False:
            print("structural and oracle verdicts disagree", file=sys.stderr)
    else:
        report = deciders.check(net, args.property, limits)
    if args.json:
        print(json.dumps({**report.to_json(), **extra}, indent=2))
    else:
        print(render_report(report))
        if extra:
            cv = extra["cross_validation"]
            print(f"  oracle: {cv['oracle'] or 'skipped'}; agreement: "
                  f"{ {True: 'yes', False: 'NO', None: 'undecided'}[cv['agree']] }"
                  + (f" ({cv['reason']})" if cv["reason"] else ""))
    return EXIT[report.status]


def _run_construct(args) -> int:
    net = load_net(args.net, args.allow_reserved)
    if args.pcheck or args.qcheck:
        h, l = args.pcheck or args.qcheck
        out = build_pcheck(net, h, l, declassify_too=bool(args.qcheck)).net
    elif args.nd:
        out = build_nd(net, args.nd).net
    else:
        out = build_ndc_product(net).net
    _write(serialize_net(out), args.output)
    return 0


def _run_dot(args) -> int:
    net = load_net(args.net, args.allow_reserved)
    if args.rg:
        limits = Limits.from_env(max_states=args.state_bound)
        text = reachability_to_dot(net, limits.max_states)
    else:
        text = net_to_dot(net)
    _write(text, args.output)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return {"check": _run_check, "construct": _run_construct, "dot": _run_dot}[
            args.command](args)
    except (NicheckError, OSError) as exc:
        print(f"nicheck: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
