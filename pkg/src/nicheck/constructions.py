"""Derived nets whose reachability questions decide the security properties.

Fresh identifiers use characters that the strict text parser rejects in user
input (``#``, ``@`` and a trailing ``'``), so they can never collide with the
names of the net being transformed:

* two-copy check net: places ``p#1`` / ``p#2``, control places ``x@`` /
  ``y@``, the shifted high transition ``h'`` and the probes ``l#1'`` / ``l#2'``;
* language-inclusion product: places ``p#A`` / ``p#B`` and probes ``l#A'`` /
  ``l#B'``;
* downgrading net: control places ``d@p`` / ``d@p'``, ``d'`` and primed
  copies ``t'``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import UsageError
from .net import Level, NetSystem, Transition
from .reach import TargetSet

__all__ = [
    "PCheckNet",
    "NdcProduct",
    "NdNet",
    "build_pcheck",
    "pcheck_target",
    "build_ndc_product",
    "build_nd",
    "prime",
    "unprime",
]


def prime(name: str) -> str:
    return name + "'"


def unprime(name: str) -> str:
    return name[:-1] if name.endswith("'") else name


class _Builder:
    """Accumulates places, transitions and arcs in insertion order."""

    def __init__(self):
        self.places: list[str] = []
        self.initial: dict[str, int] = {}
        self.transitions: list[Transition] = []
        self.flow: dict[tuple[str, str], int] = {}

    def place(self, name: str, tokens: int = 0) -> None:
        self.places.append(name)
        if tokens:
            self.initial[name] = tokens

    def trans(self, name: str, level: Level, pre: dict[str, int], post: dict[str, int]) -> None:
        self.transitions.append(Transition(name, level))
        for p, w in pre.items():
            self.flow[(p, name)] = self.flow.get((p, name), 0) + w
        for p, w in post.items():
            self.flow[(name, p)] = self.flow.get((name, p), 0) + w

    def build(self) -> NetSystem:
        return NetSystem(self.places, self.transitions, self.flow, self.initial)


def _renamed(flow: dict[str, int], suffix: str) -> dict[str, int]:
    return {p + suffix: w for p, w in flow.items()}


def _require(net: NetSystem, t: str, level: Level, role: str) -> None:
    if not net.has_transition(t):
        raise UsageError(f"{role} {t!r} is not a transition of the net")
    if net.level(t) is not level:
        raise UsageError(f"{role} {t!r} has level {net.level(t).value}, expected {level.value}")


@dataclass(frozen=True)
class PCheckNet:
    """Two-copy net whose target is reachable iff the pair ``(h, l)`` leaks."""

    net: NetSystem
    h: str
    l: str
    h_prime: str
    l1: str
    l2: str
    x: str
    y: str
    copy1: dict[str, str]
    copy2: dict[str, str]
    declassify_too: bool
    target: TargetSet = field(repr=False)

    @property
    def excluded(self) -> frozenset[str]:
        return frozenset({self.l1, self.l2})


def build_pcheck(net: NetSystem, h: str, l: str, declassify_too: bool = False) -> PCheckNet:
    """Two copies of ``net`` that run in lock step until ``h'`` fires ``h`` on copy 2.

    A side-condition loop on ``x@`` lets high transitions (and, for the
    bisimulation variant of intransitive checks, downgrading ones) fire only
    while ``h'`` has not yet fired; afterwards the copies can only continue
    with low transitions.  The probes ``l#1'`` / ``l#2'`` test enabledness of
    ``l`` on each copy once ``y@`` is marked.
    """
    _require(net, h, Level.HIGH, "high transition")
    _require(net, l, Level.LOW, "low transition")
    if net.down and not declassify_too:
        raise UsageError("net has downgrading transitions; use the declassifying variant")
    guarded = {Level.HIGH, Level.DOWN} if declassify_too else {Level.HIGH}
    x, y = "x@", "y@"
    b = _Builder()
    for p in net.places:
        b.place(p + "#1", net.initial[p])
    for p in net.places:
        b.place(p + "#2", net.initial[p])
    b.place(x, 1)
    b.place(y)
    for t in net.transitions:
        pre = {**_renamed(net.pre(t.name), "#1"), **_renamed(net.pre(t.name), "#2")}
        post = {**_renamed(net.post(t.name), "#1"), **_renamed(net.post(t.name), "#2")}
        if t.level in guarded:
            pre[x] = 1
            post[x] = 1
        b.trans(t.name, t.level, pre, post)
    h_prime = prime(h)
    b.trans(h_prime, Level.HIGH, {**_renamed(net.pre(h), "#2"), x: 1},
            {**_renamed(net.post(h), "#2"), y: 1})
    l1, l2 = f"{l}#1'", f"{l}#2'"
    b.trans(l1, Level.LOW, {**_renamed(net.pre(l), "#1"), y: 1}, _renamed(net.post(l), "#1"))
    b.trans(l2, Level.LOW, {**_renamed(net.pre(l), "#2"), y: 1}, _renamed(net.post(l), "#2"))
    out = b.build()
    target = pcheck_target_for(out, l1, l2)
    return PCheckNet(out, h, l, h_prime, l1, l2, x, y,
                     {p: p + "#1" for p in net.places}, {p: p + "#2" for p in net.places},
                     declassify_too, target)


def pcheck_target_for(net: NetSystem, l1: str, l2: str) -> TargetSet:
    e1, e2 = TargetSet.enabled(net, l1), TargetSet.enabled(net, l2)
    n1, n2 = TargetSet.disabled(net, l1), TargetSet.disabled(net, l2)
    return ((e1 & n2) | (n1 & e2)).satisfiable()


def pcheck_target(c: PCheckNet) -> TargetSet:
    """Markings where exactly one of the two probes is enabled."""
    return pcheck_target_for(c.net, c.l1, c.l2)


@dataclass(frozen=True)
class NdcProduct:
    """Product of ``N`` (copy A) with ``N\\H`` (copy B), synchronised on low moves.

    Since low transitions are labelled by their own names, ``N\\H`` is
    deterministic, so the product reaches a marking where some probe ``l#A'``
    is enabled but ``l#B'`` is not iff ``L(N)`` is not included in ``L(N\\H)``.
    """

    net: NetSystem
    target: TargetSet
    probes: dict[str, tuple[str, str]]
    high: tuple[str, ...]

    @property
    def excluded(self) -> frozenset[str]:
        return frozenset(p for pair in self.probes.values() for p in pair)

    def __iter__(self):
        yield self.net
        yield self.target


def build_ndc_product(net: NetSystem) -> NdcProduct:
    if net.down:
        raise UsageError("language-inclusion product needs a two-level net "
                         "(restrict or build the downgrading net first)")
    if not net.has_default_labels:
        raise UsageError("language-inclusion product needs the default labelling")
    b = _Builder()
    for p in net.places:
        b.place(p + "#A", net.initial[p])
    for p in net.places:
        b.place(p + "#B", net.initial[p])
    for t in net.transitions:
        pre = _renamed(net.pre(t.name), "#A")
        post = _renamed(net.post(t.name), "#A")
        if t.level is Level.LOW:
            pre.update(_renamed(net.pre(t.name), "#B"))
            post.update(_renamed(net.post(t.name), "#B"))
        b.trans(t.name, t.level, pre, post)
    probes = {}
    for l in net.low:
        pa, pb = f"{l}#A'", f"{l}#B'"
        b.trans(pa, Level.LOW, _renamed(net.pre(l), "#A"), _renamed(net.post(l), "#A"))
        b.trans(pb, Level.LOW, _renamed(net.pre(l), "#B"), _renamed(net.post(l), "#B"))
        probes[l] = (pa, pb)
    out = b.build()
    target = TargetSet()
    for pa, pb in probes.values():
        target = target | (TargetSet.enabled(out, pa) & TargetSet.disabled(out, pb))
    return NdcProduct(out, target.satisfiable(), probes, net.high)


@dataclass(frozen=True)
class NdNet:
    """Net that behaves as ``N`` until ``d'`` fires, then as ``N\\D`` with primed moves."""

    net: NetSystem
    d: str
    d_prime: str
    pd: str
    pd_prime: str
    primed: dict[str, str]

    @property
    def high_primed(self) -> tuple[str, ...]:
        return tuple(self.net.high)


def build_nd(net: NetSystem, d: str) -> NdNet:
    """Downgrading net for ``d``.

    Every original transition runs under a side condition on ``d@p``; ``d'``
    behaves as ``d`` but moves that token to ``d@p'``, which then enables the
    primed copies of the low and high transitions.  All transitions are low
    except the primed high ones.
    """
    _require(net, d, Level.DOWN, "downgrading transition")
    pd, pdp = f"{d}@p", f"{d}@p'"
    b = _Builder()
    for p in net.places:
        b.place(p, net.initial[p])
    b.place(pd, 1)
    b.place(pdp)
    for t in net.transitions:
        b.trans(t.name, Level.LOW, {**net.pre(t.name), pd: 1}, {**net.post(t.name), pd: 1})
    d_prime = prime(d)
    b.trans(d_prime, Level.LOW, {**net.pre(d), pd: 1}, {**net.post(d), pdp: 1})
    primed = {}
    for t in net.transitions:
        if t.level is Level.DOWN:
            continue
        tp = prime(t.name)
        primed[t.name] = tp
        b.trans(tp, Level.HIGH if t.level is Level.HIGH else Level.LOW,
                {**net.pre(t.name), pdp: 1}, {**net.post(t.name), pdp: 1})
    return NdNet(b.build(), d, d_prime, pd, pdp, primed)
