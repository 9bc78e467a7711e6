"""Explicit-state ground truth on bounded nets.

Everything here works on the reachability graph of a net, built by plain
breadth-first search, and checks the security properties by their literal
definitions: language equality via ε-closure and subset construction, weak
bisimilarity via saturation and partition refinement.  Nothing in this module
uses the product constructions or the symbolic certificates, so it can serve
as an independent oracle for the structural deciders.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Iterable
from dataclasses import dataclass, field, replace

from .coverability import karp_miller
from .errors import OracleOverflow
from .net import Level, NetSystem, restrict

__all__ = [
    "FiniteLTS",
    "OracleResult",
    "build_lts",
    "determinize",
    "language_equivalent",
    "weakly_bisimilar",
    "weak_simulation_check",
    "bisimulation_classes",
    "ndc_direct",
    "sbndc_direct",
    "relation_R",
    "bndc_via_elabeth",
    "bini_direct",
    "ini_direct",
    "nd_equivalent",
    "per_d_condition",
    "downgraded_markings",
    "truncated_words",
    "truncated_ndc",
    "truncated_ini",
    "truncated_sbndc",
    "truncated_bini",
]

DEFAULT_MAX_STATES = 200_000


@dataclass(frozen=True)
class FiniteLTS:
    """Reachability graph of a net with edges labelled by ``λ(t)``.

    ``edges[q]`` lists ``(symbol, target, transition)`` with ``symbol=None``
    for silent moves.  ``states[q]`` is the marking vector of state ``q``.
    """

    places: tuple[str, ...]
    states: tuple[tuple[int, ...], ...]
    edges: tuple[tuple[tuple[str | None, int, str], ...], ...]
    initial: int
    alphabet: frozenset[str]
    index: dict = field(repr=False, compare=False, hash=False, default_factory=dict)

    def __len__(self) -> int:
        return len(self.states)

    def rooted(self, q: int) -> "FiniteLTS":
        """The same graph seen from state ``q``."""
        return replace(self, initial=q)

    def state_of(self, marking) -> int:
        key = tuple(marking.counts) if hasattr(marking, "counts") else tuple(marking)
        return self.index[key]

    def transitions(self) -> Iterable[tuple[int, str | None, int]]:
        for q, out in enumerate(self.edges):
            for sym, q2, _ in out:
                yield q, sym, q2


def _check_bounded(net: NetSystem, max_states: int) -> None:
    tree = karp_miller(net, max_nodes=max(10_000, max_states // 10))
    if tree.complete and not tree.is_bounded:
        place = tree.unbounded_places()[0]
        raise OracleOverflow(
            f"net is unbounded (place {place!r} is pumped by "
            f"{' '.join(tree.omega_witness(place)) or 'the empty sequence'}); "
            f"the explicit-state oracle does not apply")


def build_lts(net: NetSystem, max_states: int = DEFAULT_MAX_STATES,
              roots: Iterable | None = None, check_bounded: bool = True) -> FiniteLTS:
    """Reachability graph from M0 (or from every marking in ``roots``).

    Raises :class:`OracleOverflow` when the net is unbounded or the graph has
    more than ``max_states`` states.
    """
    if check_bounded:
        _check_bounded(net, max_states)
    cn = net.compiled()
    starts = [tuple(cn.initial)] if roots is None else [
        tuple(r.counts) if hasattr(r, "counts") else tuple(r) for r in roots]
    index: dict[tuple, int] = {}
    states: list[tuple] = []
    for m in starts:
        if m not in index:
            index[m] = len(states)
            states.append(m)
    edges: list[list] = []
    labels = {t: net.label(t) for t in cn.names}
    k = 0
    while k < len(states):
        m = states[k]
        out = []
        for t, m2 in cn.successors(m):
            j = index.get(m2)
            if j is None:
                if len(states) >= max_states:
                    raise OracleOverflow(f"more than {max_states} reachable markings")
                j = index[m2] = len(states)
                states.append(m2)
            out.append((labels[t], j, t))
        edges.append(tuple(out))
        k += 1
    return FiniteLTS(net.places, tuple(states), tuple(edges), index[starts[0]] if starts else 0,
                     net.observable_alphabet, index)


# -- language equivalence ------------------------------------------------------


def _closure(lts: FiniteLTS, qs: Iterable[int]) -> frozenset[int]:
    seen = set(qs)
    stack = list(seen)
    while stack:
        q = stack.pop()
        for sym, q2, _ in lts.edges[q]:
            if sym is None and q2 not in seen:
                seen.add(q2)
                stack.append(q2)
    return frozenset(seen)


def _moves(lts: FiniteLTS, S: frozenset[int]) -> dict[str, set[int]]:
    out: dict[str, set[int]] = {}
    for q in S:
        for sym, q2, _ in lts.edges[q]:
            if sym is not None:
                out.setdefault(sym, set()).add(q2)
    return out


def determinize(lts: FiniteLTS) -> tuple[list[frozenset[int]], list[dict[str, int]]]:
    """Subset construction over ε-closures.

    Returns the reachable subsets (index 0 is the initial one) and, per
    subset, its observable successor map ``symbol -> subset index``.
    """
    start = _closure(lts, [lts.initial])
    subsets = [start]
    index = {start: 0}
    delta: list[dict[str, int]] = []
    k = 0
    while k < len(subsets):
        out = {}
        for sym, qs in sorted(_moves(lts, subsets[k]).items()):
            S = _closure(lts, qs)
            if S not in index:
                index[S] = len(subsets)
                subsets.append(S)
            out[sym] = index[S]
        delta.append(out)
        k += 1
    return subsets, delta


def language_equivalent(a: FiniteLTS, b: FiniteLTS) -> tuple[bool, tuple[str, ...] | None]:
    """Compare languages by exploring the product of the two subset automata.

    Languages of reachability graphs are prefix closed, so they differ iff
    some reachable pair of subsets disagrees on whether a symbol is possible.
    Returns ``(True, None)`` or ``(False, shortest distinguishing word)``.
    """
    start = (_closure(a, [a.initial]), _closure(b, [b.initial]))
    parent: dict = {start: None}
    queue = deque([start])
    ca: dict = {}
    cb: dict = {}
    while queue:
        pair = queue.popleft()
        Sa, Sb = pair
        ma = ca.get(Sa) or ca.setdefault(Sa, _moves(a, Sa))
        mb = cb.get(Sb) or cb.setdefault(Sb, _moves(b, Sb))
        for sym in sorted(set(ma) | set(mb)):
            if (sym in ma) != (sym in mb):
                word = [sym]
                p = pair
                while parent[p] is not None:
                    p, s = parent[p]
                    word.append(s)
                return False, tuple(reversed(word))
            nxt = (_closure(a, ma[sym]), _closure(b, mb[sym]))
            if nxt not in parent:
                parent[nxt] = (pair, sym)
                queue.append(nxt)
    return True, None


# -- weak bisimilarity ---------------------------------------------------------


def _saturate(edges, n: int):
    """Weak moves ``q ⇒σ q'`` (σ observable) and ``q ⇒ q'`` (σ = None) per state."""
    closure = []
    for q in range(n):
        seen = {q}
        stack = [q]
        while stack:
            u = stack.pop()
            for sym, v in edges[u]:
                if sym is None and v not in seen:
                    seen.add(v)
                    stack.append(v)
        closure.append(frozenset(seen))
    weak = []
    for q in range(n):
        moves = {(None, v) for v in closure[q]}
        for u in closure[q]:
            for sym, v in edges[u]:
                if sym is not None:
                    moves.update((sym, w) for w in closure[v])
        weak.append(tuple(moves))
    return weak


def _refine(weak, n: int) -> list[int]:
    block = [0] * n
    count = 1
    while True:
        sigs: dict = {}
        new = []
        for q in range(n):
            sig = (block[q], frozenset((s, block[v]) for s, v in weak[q]))
            new.append(sigs.setdefault(sig, len(sigs)))
        if len(sigs) == count:
            return new
        block, count = new, len(sigs)


def bisimulation_classes(lts: FiniteLTS) -> list[int]:
    """Block index per state of the coarsest weak bisimulation on ``lts``."""
    edges = [[(s, v) for s, v, _ in out] for out in lts.edges]
    return _refine(_saturate(edges, len(lts)), len(lts))


def weakly_bisimilar(a: FiniteLTS, b: FiniteLTS) -> tuple[bool, set[tuple[int, int]] | None]:
    """Decide ``a ≈ b``; on success also return the largest weak bisimulation between them."""
    n = len(a)
    edges = [[(s, v) for s, v, _ in out] for out in a.edges]
    edges += [[(s, v + n) for s, v, _ in out] for out in b.edges]
    blocks = _refine(_saturate(edges, len(edges)), len(edges))
    if blocks[a.initial] != blocks[b.initial + n]:
        return False, None
    by_block: dict[int, list[int]] = {}
    for q in range(len(b)):
        by_block.setdefault(blocks[q + n], []).append(q)
    rel = {(p, q) for p in range(n) for q in by_block.get(blocks[p], ())}
    return True, rel


def weak_simulation_check(a: FiniteLTS, b: FiniteLTS, r: set[tuple[int, int]]) -> bool:
    """Check that ``r`` contains the initial pair and is a weak simulation of ``a`` by ``b``."""
    if (a.initial, b.initial) not in r:
        return False
    weak_b = _saturate([[(s, v) for s, v, _ in out] for out in b.edges], len(b))
    weak_b = [set(w) for w in weak_b]
    for q1, p1 in r:
        for sym, q2, _ in a.edges[q1]:
            if not any((sym, p2) in weak_b[p1] for p2 in range(len(b)) if (q2, p2) in r):
                return False
    return True


# -- security properties by definition ---------------------------------------


@dataclass(frozen=True)
class OracleResult:
    """Outcome of a literal-definition check.  ``witness`` explains a failure."""

    property: str
    secure: bool
    witness: dict | None = None
    checked: int = 0


def _marking(net: NetSystem, m: tuple) -> dict[str, int]:
    return {p: c for p, c in zip(net.places, m) if c}


class _LanguageTable:
    """Memoised language comparisons between markings of one net."""

    def __init__(self, net: NetSystem, roots: Iterable, max_states: int):
        self.lts = build_lts(net, max_states, roots=roots)
        self.cache: dict = {}

    def equal(self, m1: tuple, m2: tuple) -> tuple[bool, tuple[str, ...] | None]:
        key = (m1, m2)
        if key not in self.cache:
            a = self.lts.rooted(self.lts.index[m1])
            b = self.lts.rooted(self.lts.index[m2])
            self.cache[key] = language_equivalent(a, b)
        return self.cache[key]


def _two_level(net: NetSystem) -> None:
    if net.down:
        raise ValueError("expected a two-level net")


def ndc_direct(net: NetSystem, max_states: int = DEFAULT_MAX_STATES) -> OracleResult:
    """``L(N) = L(N\\H)`` with high transitions silent."""
    _two_level(net)
    ok, word = language_equivalent(build_lts(net, max_states),
                                   build_lts(restrict(net, net.high), max_states))
    return OracleResult("NDC", ok, None if ok else {"word": list(word)}, 1)


def _high_firings(net: NetSystem, lts: FiniteLTS, high: Iterable[str]):
    high = set(high)
    for q, out in enumerate(lts.edges):
        for _, q2, t in out:
            if t in high:
                yield lts.states[q], t, lts.states[q2]


def sbndc_direct(net: NetSystem, max_states: int = DEFAULT_MAX_STATES) -> OracleResult:
    """After every reachable ``M1 [h> M2``, ``(N\\H, M1)`` and ``(N\\H, M2)`` are weakly bisimilar.

    Both weak bisimilarity and language equality are evaluated for every pair;
    with the identity labelling they must agree, and a disagreement raises.
    """
    _two_level(net)
    full = build_lts(net, max_states)
    firings = list(_high_firings(net, full, net.high))
    low_net = restrict(net, net.high)
    roots = sorted({m for m1, _, m2 in firings for m in (m1, m2)})
    lts = build_lts(low_net, max_states, roots=roots or None)
    blocks = bisimulation_classes(lts)
    for m1, h, m2 in firings:
        q1, q2 = lts.index[m1], lts.index[m2]
        bisim = blocks[q1] == blocks[q2]
        same, word = language_equivalent(lts.rooted(q1), lts.rooted(q2))
        if bisim != same:
            raise AssertionError(f"bisimilarity and language equality disagree at {m1} [{h}>")
        if not same:
            return OracleResult("SBNDC", False, {
                "m1": _marking(net, m1), "h": h, "m2": _marking(net, m2), "word": list(word)},
                len(firings))
    return OracleResult("SBNDC", True, None, len(firings))


def relation_R(net: NetSystem, max_states: int = DEFAULT_MAX_STATES) -> set[tuple[tuple, tuple]]:
    """Least relation containing ``(M0, M0)`` closed under high moves on the right
    and joint low moves on both sides."""
    _two_level(net)
    _check_bounded(net, max_states)
    cn = net.compiled()
    low, high = net.low, net.high
    m0 = tuple(cn.initial)
    rel = {(m0, m0)}
    queue = deque(rel)
    while queue:
        m1, m2 = queue.popleft()
        nxt = [(m1, cn.fire(m2, h)) for h in high if cn.enabled(m2, h)]
        nxt += [(cn.fire(m1, l), cn.fire(m2, l)) for l in low
                if cn.enabled(m1, l) and cn.enabled(m2, l)]
        for pair in nxt:
            if pair not in rel:
                if len(rel) >= max_states:
                    raise OracleOverflow(f"relation exceeds {max_states} pairs")
                rel.add(pair)
                queue.append(pair)
    return rel


def bndc_via_elabeth(net: NetSystem, max_states: int = DEFAULT_MAX_STATES) -> OracleResult:
    """Every pair of the relation R has equal low languages in ``N\\H``."""
    rel = relation_R(net, max_states)
    roots = sorted({m for pair in rel for m in pair})
    table = _LanguageTable(restrict(net, net.high), roots, max_states)
    for m1, m2 in sorted(rel):
        same, word = table.equal(m1, m2)
        if not same:
            return OracleResult("BNDC", False, {
                "m1": _marking(net, m1), "m2": _marking(net, m2), "word": list(word)}, len(rel))
    return OracleResult("BNDC", True, None, len(rel))


def bini_direct(net: NetSystem, max_states: int = DEFAULT_MAX_STATES) -> OracleResult:
    """After every reachable ``M1 [h> M2``, ``N\\(H∪D)`` has equal languages at M1 and M2."""
    full = build_lts(net, max_states)
    firings = list(_high_firings(net, full, net.high))
    roots = sorted({m for m1, _, m2 in firings for m in (m1, m2)})
    if not roots:
        return OracleResult("BINI", True, None, 0)
    table = _LanguageTable(restrict(net, net.high + net.down), roots, max_states)
    for m1, h, m2 in firings:
        same, word = table.equal(m1, m2)
        if not same:
            return OracleResult("BINI", False, {
                "m1": _marking(net, m1), "h": h, "m2": _marking(net, m2), "word": list(word)},
                len(firings))
    return OracleResult("BINI", True, None, len(firings))


def downgraded_markings(net: NetSystem, d: str | None = None,
                        max_states: int = DEFAULT_MAX_STATES) -> list[tuple]:
    """Markings ``M`` with ``M0 [υ d> M`` (for one ``d``, or any downgrading ``d``)."""
    full = build_lts(net, max_states)
    ds = {d} if d is not None else set(net.down)
    return sorted({full.states[q2] for out in full.edges for _, q2, t in out if t in ds})


def _ndc_at(net: NetSystem, m: tuple, max_states: int) -> tuple[bool, tuple[str, ...] | None]:
    """NDC of ``(N\\D, M)``: languages of ``N\\D`` and ``N\\(H∪D)`` at ``M`` coincide."""
    a = build_lts(restrict(net, net.down), max_states, roots=[m])
    b = build_lts(restrict(net, net.high + net.down), max_states, roots=[m])
    return language_equivalent(a, b)


def per_d_condition(net: NetSystem, d: str, max_states: int = DEFAULT_MAX_STATES) -> OracleResult:
    """For every ``M`` with ``M0 [υ d> M``, ``(N\\D, M) ∼ (N\\(H∪D), M)``."""
    ms = downgraded_markings(net, d, max_states)
    for m in ms:
        ok, word = _ndc_at(net, m, max_states)
        if not ok:
            return OracleResult("INI", False, {"d": d, "m": _marking(net, m), "word": list(word)},
                                len(ms))
    return OracleResult("INI", True, None, len(ms))


def nd_equivalent(nd_net: NetSystem, max_states: int = DEFAULT_MAX_STATES) -> OracleResult:
    """``N_d ∼ N_d\\H'`` checked on explicit graphs (the primed high moves are silent)."""
    ok, word = language_equivalent(build_lts(nd_net, max_states),
                                   build_lts(restrict(nd_net, nd_net.high), max_states))
    return OracleResult("NDC", ok, None if ok else {"word": list(word)}, 1)


def ini_direct(net: NetSystem, max_states: int = DEFAULT_MAX_STATES) -> OracleResult:
    """NDC of ``(N\\D, M)`` at ``M0`` and after every downgrading firing."""
    ok, word = _ndc_at(net, tuple(net.initial.counts), max_states)
    if not ok:
        return OracleResult("INI", False, {"d": None, "m": _marking(net, net.initial.counts),
                                           "word": list(word)}, 1)
    checked = 1
    for d in net.down:
        r = per_d_condition(net, d, max_states)
        checked += r.checked
        if not r.secure:
            return replace(r, checked=checked)
    return OracleResult("INI", True, None, checked)


# -- depth-truncated comparisons for unbounded nets ---------------------------


def truncated_words(net: NetSystem, k: int, start: tuple | None = None) -> set[tuple[str, ...]]:
    """Observable projections of all firing sequences of length at most ``k``."""
    cn = net.compiled()
    labels = {t: net.label(t) for t in cn.names}
    m0 = tuple(cn.initial) if start is None else tuple(start)
    layer = {(m0, ())}
    seen = set(layer)
    for _ in range(k):
        nxt = set()
        for m, w in layer:
            for t, m2 in cn.successors(m):
                sym = labels[t]
                item = (m2, w if sym is None else w + (sym,))
                if item not in seen:
                    seen.add(item)
                    nxt.add(item)
        layer = nxt
    return {w for _, w in seen}


def _accepts(net: NetSystem, start: tuple, word: tuple[str, ...]) -> bool:
    """Membership for a net without silent moves and the identity labelling."""
    cn = net.compiled()
    m = start
    for t in word:
        if not cn.enabled(m, t):
            return False
        m = cn.fire(m, t)
    return True


def _truncated_ndc_at(net: NetSystem, high: tuple[str, ...], removed: tuple[str, ...],
                      m: tuple, k: int) -> tuple[str, ...] | None:
    """First word of ``(N\\removed, m)`` within ``k`` moves not in ``(N\\(removed∪high), m)``."""
    visible = restrict(net, removed)
    hidden = restrict(net, removed + high)
    for w in sorted(truncated_words(visible, k, m), key=lambda w: (len(w), w)):
        if not _accepts(hidden, m, w):
            return w
    return None


def truncated_ndc(net: NetSystem, k: int) -> OracleResult:
    """Depth-``k`` NDC comparison; a pass is evidence, not a proof."""
    w = _truncated_ndc_at(net, net.high, (), tuple(net.initial.counts), k)
    return OracleResult(f"NDC<={k}", w is None, None if w is None else {"word": list(w)})


def _markings_within(net: NetSystem, k: int):
    """Pairs ``(M, t, M')`` of firings whose source is reachable in fewer than ``k`` moves."""
    cn = net.compiled()
    frontier = [tuple(cn.initial)]
    seen = set(frontier)
    for _ in range(k):
        nxt = []
        for m in frontier:
            for t, m2 in cn.successors(m):
                yield m, t, m2
                if m2 not in seen:
                    seen.add(m2)
                    nxt.append(m2)
        frontier = nxt


def truncated_ini(net: NetSystem, k_reach: int, k_lang: int) -> OracleResult:
    """INI restricted to downgrading firings within ``k_reach`` moves and words
    of at most ``k_lang`` moves."""
    removed = net.down
    w = _truncated_ndc_at(net, net.high, removed, tuple(net.initial.counts), k_lang)
    if w is not None:
        return OracleResult("INI", False, {"d": None, "word": list(w)})
    targets = sorted({m2 for _, t, m2 in _markings_within(net, k_reach)
                      if net.level(t) is Level.DOWN})
    for m in targets:
        w = _truncated_ndc_at(net, net.high, removed, m, k_lang)
        if w is not None:
            return OracleResult("INI", False, {"m": _marking(net, m), "word": list(w)})
    return OracleResult(f"INI<={k_reach},{k_lang}", True, None, 1 + len(targets))


def _truncated_pairs(net: NetSystem, prop: str, removed: tuple[str, ...],
                     k_reach: int, k_lang: int) -> OracleResult:
    low_net = restrict(net, removed)
    pairs = sorted({(m1, t, m2) for m1, t, m2 in _markings_within(net, k_reach)
                    if net.level(t) is Level.HIGH})
    for m1, h, m2 in pairs:
        w1 = truncated_words(low_net, k_lang, m1)
        w2 = truncated_words(low_net, k_lang, m2)
        if w1 != w2:
            word = min(w1 ^ w2, key=lambda w: (len(w), w))
            return OracleResult(prop, False, {"m1": _marking(net, m1), "h": h,
                                              "m2": _marking(net, m2), "word": list(word)})
    return OracleResult(f"{prop}<={k_reach},{k_lang}", True, None, len(pairs))


def truncated_sbndc(net: NetSystem, k_reach: int, k_lang: int) -> OracleResult:
    """SBNDC restricted to high firings within ``k_reach`` moves and words of at
    most ``k_lang`` low moves.  ``N\\H`` is deterministic, so a reported
    difference is a genuine violation; a pass is only evidence."""
    _two_level(net)
    return _truncated_pairs(net, "SBNDC", net.high, k_reach, k_lang)


def truncated_bini(net: NetSystem, k_reach: int, k_lang: int) -> OracleResult:
    """BINI analogue of :func:`truncated_sbndc` over ``N\\(H∪D)``."""
    return _truncated_pairs(net, "BINI", net.high + net.down, k_reach, k_lang)
