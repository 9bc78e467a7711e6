"""Graphviz DOT export of net structure and of bounded reachability graphs."""

from __future__ import annotations

from .coverability import karp_miller
from .errors import UsageError
from .lts import build_lts
from .net import Level, NetSystem

__all__ = ["net_to_dot", "reachability_to_dot"]

_FILL = {Level.LOW: "white", Level.HIGH: "gray70", Level.DOWN: "lightblue"}


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def net_to_dot(net: NetSystem, name: str = "net") -> str:
    """Places as circles (with their initial tokens), transitions as boxes filled by level."""
    out = [f"digraph {_q(name)} {{", "  rankdir=LR;"]
    for p in net.places:
        k = net.initial[p]
        label = p if not k else f"{p}\\n{k}"
        out.append(f"  {_q('p:' + p)} [shape=circle, label={_q(label)}];")
    for t in net.transitions:
        out.append(f"  {_q('t:' + t.name)} [shape=box, style=filled, "
                   f"fillcolor={_FILL[t.level]}, label={_q(f'{t.name} [{t.level.value}]')}];")
    for src, dst, w in net.arcs():
        a = ("p:" + src) if src in net.places else ("t:" + src)
        b = ("p:" + dst) if dst in net.places else ("t:" + dst)
        attr = f" [label={_q(str(w))}]" if w != 1 else ""
        out.append(f"  {_q(a)} -> {_q(b)}{attr};")
    out.append("}")
    return "\n".join(out) + "\n"


def _marking_label(net: NetSystem, m: tuple) -> str:
    parts = [f"{p}:{c}" for p, c in zip(net.places, m) if c]
    return "{" + ", ".join(parts) + "}"


def reachability_to_dot(net: NetSystem, max_states: int = 10_000, name: str = "rg") -> str:
    """Reachability graph of a bounded net; unbounded nets are rejected with the pumped place."""
    tree = karp_miller(net, max_nodes=max(max_states, 10_000))
    if tree.complete and not tree.is_bounded:
        place = tree.unbounded_places()[0]
        seq = " ".join(tree.omega_witness(place))
        raise UsageError(f"cannot export the reachability graph: the net is unbounded "
                         f"(Karp-Miller puts omega on place {place!r} after {seq})")
    lts = build_lts(net, max_states, check_bounded=False)
    out = [f"digraph {_q(name)} {{"]
    for q, m in enumerate(lts.states):
        shape = "doublecircle" if q == lts.initial else "ellipse"
        out.append(f"  m{q} [shape={shape}, label={_q(_marking_label(net, m))}];")
    for q, edges in enumerate(lts.edges):
        for _, q2, t in edges:
            style = ", style=dashed" if net.level(t) is Level.HIGH else ""
            out.append(f"  m{q} -> m{q2} [label={_q(t)}{style}];")
    out.append("}")
    return "\n".join(out) + "\n"
