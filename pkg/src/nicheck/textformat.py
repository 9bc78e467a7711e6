"""Line-oriented text format for net systems.

::

    # comment
    place NAME NAT
    trans NAME (L|H|D)
    arc NAME -> NAME [NAT]      # place->trans or trans->place, weight default 1

Names match ``[A-Za-z_][A-Za-z0-9_]*``.  Names produced by the constructions
also contain ``#``, ``@`` or ``'``; they are accepted only with
``allow_reserved=True``.  A ``#`` starts a comment when it begins a token, so
such names still round-trip.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import NicheckError, StructuralError
from .net import Level, NetSystem, Transition

__all__ = ["NetParseError", "NetDocument", "parse_net", "serialize_net", "load_net"]

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_RESERVED_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_#@']*\Z")
_NAT = re.compile(r"[0-9]+\Z")


class NetParseError(NicheckError, ValueError):
    def __init__(self, message: str, line: int, col: int):
        self.message = message
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: {message}")


@dataclass(frozen=True)
class NetDocument:
    """A parsed net with the source position ``(line, col)`` of every declaration."""

    net: NetSystem
    spans: dict[str, tuple[int, int]] = field(default_factory=dict)
    arc_spans: dict[tuple[str, str], tuple[int, int]] = field(default_factory=dict)


def _tokens(line: str) -> list[tuple[str, int]]:
    out = []
    for m in re.finditer(r"\S+", line):
        if m.group().startswith("#"):
            break
        out.append((m.group(), m.start() + 1))
    return out


def parse_net(text: str, allow_reserved: bool = False) -> NetDocument:
    name_re = _RESERVED_NAME if allow_reserved else _NAME
    places: list[str] = []
    initial: dict[str, int] = {}
    transitions: list[Transition] = []
    spans: dict[str, tuple[int, int]] = {}
    arcs: dict[tuple[str, str], int] = {}
    arc_spans: dict[tuple[str, str], tuple[int, int]] = {}
    pending = []

    def name(tok: str, ln: int, col: int) -> str:
        if not name_re.match(tok):
            bad = next((c for c in tok if c in "#@'"), None)
            if bad and _RESERVED_NAME.match(tok):
                raise NetParseError(f"reserved character {bad!r} in name {tok!r}", ln, col)
            raise NetParseError(f"invalid name {tok!r}", ln, col)
        return tok

    def declare(n: str, ln: int, col: int) -> None:
        if n in spans:
            raise NetParseError(f"duplicate identifier {n!r} (first declared at "
                                f"{spans[n][0]}:{spans[n][1]})", ln, col)
        spans[n] = (ln, col)

    def nat(tok: str, ln: int, col: int, what: str) -> int:
        if not _NAT.match(tok):
            raise NetParseError(f"{what} must be a natural number, got {tok!r}", ln, col)
        return int(tok)

    for ln, line in enumerate(text.splitlines(), start=1):
        toks = _tokens(line)
        if not toks:
            continue
        kw, kcol = toks[0]
        args = toks[1:]
        end_col = len(line.rstrip()) + 1
        if kw == "place":
            if len(args) != 2:
                at = args[2][1] if len(args) > 2 else end_col
                raise NetParseError("expected 'place NAME NAT'", ln, at)
            n = name(args[0][0], ln, args[0][1])
            declare(n, ln, args[0][1])
            places.append(n)
            k = nat(args[1][0], ln, args[1][1], "initial token count")
            if k:
                initial[n] = k
        elif kw == "trans":
            if len(args) < 2:
                raise NetParseError("missing level (expected 'trans NAME L|H|D')", ln,
                                    args[0][1] if args else end_col)
            if len(args) > 2:
                raise NetParseError("unexpected token after level", ln, args[2][1])
            n = name(args[0][0], ln, args[0][1])
            declare(n, ln, args[0][1])
            lvl = args[1][0]
            if lvl not in ("L", "H", "D"):
                raise NetParseError(f"level must be L, H or D, got {lvl!r}", ln, args[1][1])
            transitions.append(Transition(n, Level(lvl)))
        elif kw == "arc":
            if len(args) not in (3, 4) or args[1][0] != "->":
                raise NetParseError("expected 'arc NAME -> NAME [NAT]'", ln, kcol)
            src = name(args[0][0], ln, args[0][1])
            dst = name(args[2][0], ln, args[2][1])
            w = 1
            if len(args) == 4:
                w = nat(args[3][0], ln, args[3][1], "arc weight")
                if w == 0:
                    raise NetParseError("arc weight must be at least 1 (omit the arc for 0)",
                                        ln, args[3][1])
            if (src, dst) in arcs:
                raise NetParseError(f"duplicate arc {src} -> {dst}", ln, kcol)
            arcs[(src, dst)] = w
            arc_spans[(src, dst)] = (ln, kcol)
            pending.append((src, args[0][1], dst, args[2][1], ln))
        else:
            raise NetParseError(f"unknown declaration {kw!r}", ln, kcol)

    pset = set(places)
    tset = {t.name for t in transitions}
    for src, scol, dst, dcol, ln in pending:
        for n, col in ((src, scol), (dst, dcol)):
            if n not in pset and n not in tset:
                raise NetParseError(f"unknown identifier {n!r}", ln, col)
        if (src in pset) == (dst in pset):
            raise NetParseError(f"arc {src} -> {dst} must join a place and a transition",
                                ln, scol)
    try:
        net = NetSystem(places, transitions, arcs, initial)
    except StructuralError as exc:  # pragma: no cover - guarded by the checks above
        raise NetParseError(str(exc), 1, 1) from exc
    return NetDocument(net, spans, arc_spans)


def serialize_net(net: NetSystem) -> str:
    """Canonical text: places, then transitions, then arcs (per transition, inputs first)."""
    if not net.has_default_labels:
        raise StructuralError("the text format cannot express custom labels")
    lines = [f"place {p} {net.initial[p]}" for p in net.places]
    lines += [f"trans {t.name} {t.level.value}" for t in net.transitions]
    for src, dst, w in net.arcs():
        lines.append(f"arc {src} -> {dst}" + (f" {w}" if w != 1 else ""))
    return "\n".join(lines) + ("\n" if lines else "")


def load_net(path, allow_reserved: bool = False) -> NetSystem:
    with open(path, encoding="utf-8") as fh:
        return parse_net(fh.read(), allow_reserved).net
