"""Place/Transition net systems: data model, firing rule and net algebra.

A :class:`NetSystem` is immutable.  Places are ordered by declaration; that
order fixes the coordinate order of the integer vectors used by every search
in the package.  Flow is stored sparsely (zero weights are simply absent).
"""

from __future__ import annotations

import enum
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass
from functools import lru_cache

from .errors import FiringError, StructuralError

__all__ = [
    "Level",
    "Transition",
    "Marking",
    "NetSystem",
    "enabled",
    "fire",
    "fire_sequence",
    "compose",
    "restrict",
    "observable_projection",
]


class Level(str, enum.Enum):
    LOW = "L"
    HIGH = "H"
    DOWN = "D"

    @classmethod
    def parse(cls, value: "Level | str") -> "Level":
        if isinstance(value, Level):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise StructuralError(f"unknown level {value!r} (expected L, H or D)") from None


@dataclass(frozen=True)
class Transition:
    name: str
    level: Level = Level.LOW


@lru_cache(maxsize=256)
def _index_of(places: tuple[str, ...]) -> dict[str, int]:
    return {p: i for i, p in enumerate(places)}


class Marking(Mapping[str, int]):
    """Total map from the places of a net to token counts.

    Compares equal to another marking with the same places and counts, and to
    any plain mapping that agrees on every place (absent keys read as 0).
    """

    __slots__ = ("places", "counts")

    def __init__(self, places: tuple[str, ...], counts: Iterable[int]):
        counts = tuple(int(c) for c in counts)
        if len(counts) != len(places):
            raise StructuralError("marking length does not match the place set")
        if any(c < 0 for c in counts):
            raise StructuralError("markings cannot hold negative counts")
        self.places = places
        self.counts = counts

    @classmethod
    def of(cls, places: tuple[str, ...], values: Mapping[str, int]) -> "Marking":
        index = _index_of(places)
        unknown = [p for p in values if p not in index]
        if unknown:
            raise StructuralError(f"marking mentions unknown place(s) {unknown}")
        return cls(places, (values.get(p, 0) for p in places))

    def __getitem__(self, place: str) -> int:
        try:
            return self.counts[_index_of(self.places)[place]]
        except KeyError:
            raise KeyError(place) from None

    def __iter__(self) -> Iterator[str]:
        return iter(self.places)

    def __len__(self) -> int:
        return len(self.places)

    def __hash__(self) -> int:
        return hash((self.places, self.counts))

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Marking):
            return self.places == other.places and self.counts == other.counts
        if isinstance(other, Mapping):
            index = _index_of(self.places)
            if any(k not in index for k in other):
                return False
            return all(self.counts[i] == other.get(p, 0) for p, i in index.items())
        return NotImplemented

    def __le__(self, other: "Marking") -> bool:
        return all(a <= b for a, b in zip(self.counts, other.counts))

    def support(self) -> dict[str, int]:
        """Non-zero entries only."""
        return {p: c for p, c in zip(self.places, self.counts) if c}

    def __repr__(self) -> str:
        return f"Marking({self.support()})"


ArcSpec = Iterable[tuple] | Mapping[tuple[str, str], int]


class NetSystem:
    """A PT-net system with leveled transitions and an optional labelling.

    ``arcs`` is either an iterable of ``(src, dst)`` / ``(src, dst, weight)``
    tuples or a mapping ``{(src, dst): weight}``; each arc must join a place and
    a transition.  ``labels`` overrides the default labelling, which is the
    identity on low and downgrading transitions and silent (``None``) on high
    ones.
    """

    __slots__ = ("_places", "_transitions", "_pre", "_post", "_initial", "_labels",
                 "_pindex", "_tindex", "_compiled")

    def __init__(
        self,
        places: Iterable[str],
        transitions: Iterable[Transition | tuple[str, Level | str] | str],
        arcs: ArcSpec = (),
        initial: Mapping[str, int] | None = None,
        labels: Mapping[str, str | None] | None = None,
    ):
        self._places = tuple(places)
        trs = []
        for t in transitions:
            if isinstance(t, Transition):
                trs.append(Transition(t.name, Level.parse(t.level)))
            elif isinstance(t, str):
                trs.append(Transition(t))
            else:
                name, level = t
                trs.append(Transition(name, Level.parse(level)))
        self._transitions = tuple(trs)
        self._check_names()
        self._pindex = _index_of(self._places)
        self._tindex = {t.name: i for i, t in enumerate(self._transitions)}

        pre: dict[str, dict[str, int]] = {t.name: {} for t in self._transitions}
        post: dict[str, dict[str, int]] = {t.name: {} for t in self._transitions}
        items = arcs.items() if isinstance(arcs, Mapping) else (
            ((a[0], a[1]), a[2] if len(a) > 2 else 1) for a in arcs)
        for (src, dst), w in items:
            w = int(w)
            if w < 0:
                raise StructuralError(f"arc {src}->{dst} has negative weight {w}")
            if src in self._pindex and dst in self._tindex:
                table, key, sub = pre, dst, src
            elif src in self._tindex and dst in self._pindex:
                table, key, sub = post, src, dst
            else:
                raise StructuralError(
                    f"arc {src}->{dst} must join a declared place and a declared transition")
            if w:
                table[key][sub] = table[key].get(sub, 0) + w
        # canonical per-transition place order
        self._pre = {t: {p: d[p] for p in self._places if p in d} for t, d in pre.items()}
        self._post = {t: {p: d[p] for p in self._places if p in d} for t, d in post.items()}

        if isinstance(initial, Marking):
            initial = dict(zip(initial.places, initial.counts))
        self._initial = Marking.of(self._places, initial or {})

        self._labels: dict[str, str | None] = {}
        for t, sym in (labels or {}).items():
            if t not in self._tindex:
                raise StructuralError(f"label given for unknown transition {t!r}")
            if sym == "":
                sym = None
            if sym != self._default_label(self._transitions[self._tindex[t]]):
                self._labels[t] = sym
        self._compiled = None

    def _check_names(self) -> None:
        seen: set[str] = set()
        for name in list(self._places) + [t.name for t in self._transitions]:
            if not isinstance(name, str) or not name or any(c.isspace() for c in name):
                raise StructuralError(f"invalid identifier {name!r}")
            if name in seen:
                raise StructuralError(f"duplicate identifier {name!r}")
            seen.add(name)

    # -- accessors -------------------------------------------------------

    @property
    def places(self) -> tuple[str, ...]:
        return self._places

    @property
    def transitions(self) -> tuple[Transition, ...]:
        return self._transitions

    @property
    def transition_names(self) -> tuple[str, ...]:
        return tuple(t.name for t in self._transitions)

    @property
    def initial(self) -> Marking:
        return self._initial

    @property
    def explicit_labels(self) -> dict[str, str | None]:
        return dict(self._labels)

    def has_transition(self, name: str) -> bool:
        return name in self._tindex

    def transition(self, name: str) -> Transition:
        try:
            return self._transitions[self._tindex[name]]
        except KeyError:
            raise StructuralError(f"unknown transition {name!r}") from None

    def level(self, name: str) -> Level:
        return self.transition(name).level

    def names(self, *levels: Level) -> tuple[str, ...]:
        return tuple(t.name for t in self._transitions if t.level in levels)

    @property
    def low(self) -> tuple[str, ...]:
        return self.names(Level.LOW)

    @property
    def high(self) -> tuple[str, ...]:
        return self.names(Level.HIGH)

    @property
    def down(self) -> tuple[str, ...]:
        return self.names(Level.DOWN)

    @property
    def is_two_level(self) -> bool:
        return not self.down

    def pre(self, t: str) -> dict[str, int]:
        """Input places of ``t`` with their weights."""
        self.transition(t)
        return dict(self._pre[t])

    def post(self, t: str) -> dict[str, int]:
        """Output places of ``t`` with their weights."""
        self.transition(t)
        return dict(self._post[t])

    def flow(self, src: str, dst: str) -> int:
        if src in self._pindex and dst in self._tindex:
            return self._pre[dst].get(src, 0)
        if src in self._tindex and dst in self._pindex:
            return self._post[src].get(dst, 0)
        raise StructuralError(f"{src}->{dst} does not join a place and a transition")

    def arcs(self) -> Iterator[tuple[str, str, int]]:
        """All arcs in canonical order: per transition, inputs then outputs."""
        for t in self._transitions:
            for p, w in self._pre[t.name].items():
                yield p, t.name, w
            for p, w in self._post[t.name].items():
                yield t.name, p, w

    @staticmethod
    def _default_label(t: Transition) -> str | None:
        return None if t.level is Level.HIGH else t.name

    def label(self, t: str) -> str | None:
        """Observable symbol of ``t``, or ``None`` when ``t`` is silent."""
        tr = self.transition(t)
        return self._labels.get(t, self._default_label(tr))

    @property
    def has_default_labels(self) -> bool:
        return not self._labels

    @property
    def observable_alphabet(self) -> frozenset[str]:
        return frozenset(s for s in (self.label(t.name) for t in self._transitions)
                         if s is not None)

    def marking(self, values: Mapping[str, int] | None = None) -> Marking:
        """Build a marking of this net from a sparse mapping."""
        return Marking.of(self._places, values or {})

    # -- derived nets ------------------------------------------------------

    def with_initial(self, m: Mapping[str, int] | Marking) -> "NetSystem":
        return NetSystem(self._places, self._transitions, dict(self._flow_items()), m,
                         self._labels)

    def with_levels(self, levels: Mapping[str, Level | str]) -> "NetSystem":
        """Copy of the net with some transitions moved to other levels."""
        for t in levels:
            self.transition(t)
        trs = [Transition(t.name, Level.parse(levels.get(t.name, t.level)))
               for t in self._transitions]
        return NetSystem(self._places, trs, dict(self._flow_items()), self._initial,
                         self._labels)

    def _flow_items(self) -> Iterator[tuple[tuple[str, str], int]]:
        for src, dst, w in self.arcs():
            yield (src, dst), w

    # -- equality ----------------------------------------------------------

    def _key(self):
        return (self._places, self._transitions,
                tuple(sorted(self._flow_items())), self._initial.counts,
                tuple(sorted(self._labels.items(), key=lambda kv: kv[0])))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NetSystem):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        return (f"NetSystem(places={len(self._places)}, transitions="
                f"{len(self._transitions)}, initial={self._initial.support()})")

    # -- vector view used by the search engines ---------------------------

    def compiled(self) -> "CompiledNet":
        if self._compiled is None:
            self._compiled = CompiledNet(self)
        return self._compiled


class CompiledNet:
    """Index-based view of a net: per-transition input and delta vectors."""

    __slots__ = ("net", "names", "pre", "delta", "post", "initial")

    def __init__(self, net: NetSystem):
        idx = net._pindex
        self.net = net
        self.names = net.transition_names
        self.pre = {}
        self.post = {}
        self.delta = {}
        for t in self.names:
            self.pre[t] = tuple((idx[p], w) for p, w in net._pre[t].items())
            self.post[t] = tuple((idx[p], w) for p, w in net._post[t].items())
            d: dict[int, int] = {}
            for p, w in net._pre[t].items():
                d[idx[p]] = d.get(idx[p], 0) - w
            for p, w in net._post[t].items():
                d[idx[p]] = d.get(idx[p], 0) + w
            self.delta[t] = tuple((i, v) for i, v in sorted(d.items()) if v)
        self.initial = net.initial.counts

    def enabled(self, m: tuple, t: str) -> bool:
        for i, w in self.pre[t]:
            if m[i] < w:
                return False
        return True

    def fire(self, m: tuple, t: str) -> tuple:
        out = list(m)
        for i, v in self.delta[t]:
            out[i] += v
        return tuple(out)

    def successors(self, m: tuple, names: Iterable[str] | None = None):
        """Yield ``(t, m')`` for every enabled transition, in declaration order."""
        for t in (self.names if names is None else names):
            ok = True
            for i, w in self.pre[t]:
                if m[i] < w:
                    ok = False
                    break
            if ok:
                out = list(m)
                for i, v in self.delta[t]:
                    out[i] += v
                yield t, tuple(out)


def _as_marking(net: NetSystem, m: Mapping[str, int]) -> Marking:
    if isinstance(m, Marking) and m.places == net.places:
        return m
    return net.marking(m)


def enabled(net: NetSystem, m: Mapping[str, int], t: str) -> bool:
    """True iff every input place of ``t`` holds at least the arc weight."""
    net.transition(t)
    m = _as_marking(net, m)
    return net.compiled().enabled(m.counts, t)


def fire(net: NetSystem, m: Mapping[str, int], t: str) -> Marking:
    """Fire ``t`` at ``m`` and return the successor marking."""
    net.transition(t)
    m = _as_marking(net, m)
    for p, w in net._pre[t].items():
        if m[p] < w:
            raise FiringError(t, p, w, m[p])
    return Marking(net.places, net.compiled().fire(m.counts, t))


def fire_sequence(net: NetSystem, m: Mapping[str, int], seq: Iterable[str]) -> Marking:
    """Left fold of :func:`fire`; the error reports the first disabled position."""
    cur = _as_marking(net, m)
    for k, t in enumerate(seq):
        try:
            cur = fire(net, cur, t)
        except FiringError as e:
            raise FiringError(e.transition, e.place, e.needed, e.available, index=k) from None
    return cur


def compose(a: NetSystem, b: NetSystem) -> NetSystem:
    """Synchronous composition over shared transitions (place sets must be disjoint)."""
    overlap = set(a.places) & set(b.places)
    if overlap:
        raise StructuralError(f"cannot compose nets sharing places {sorted(overlap)}")
    clash = set(a.places) & set(b.transition_names) | set(b.places) & set(a.transition_names)
    if clash:
        raise StructuralError(f"identifiers used as place and transition: {sorted(clash)}")
    transitions = list(a.transitions)
    labels = dict(a.explicit_labels)
    for t in b.transitions:
        if a.has_transition(t.name):
            if a.level(t.name) is not t.level:
                raise StructuralError(
                    f"shared transition {t.name!r} has levels {a.level(t.name).value} "
                    f"and {t.level.value}")
            if a.label(t.name) != b.label(t.name):
                raise StructuralError(f"shared transition {t.name!r} has conflicting labels")
        else:
            transitions.append(t)
            if t.name in b.explicit_labels:
                labels[t.name] = b.explicit_labels[t.name]
    flow = dict(a._flow_items())
    flow.update(b._flow_items())
    initial = dict(a.initial.support())
    initial.update(b.initial.support())
    return NetSystem(a.places + b.places, transitions, flow, initial, labels)


def restrict(net: NetSystem, removed: Iterable[str]) -> NetSystem:
    """Drop the given transitions and their arcs; places and M0 are kept."""
    removed = set(removed)
    for t in removed:
        net.transition(t)
    keep = [t for t in net.transitions if t.name not in removed]
    flow = {(s, d): w for (s, d), w in net._flow_items() if s not in removed and d not in removed}
    labels = {t: s for t, s in net.explicit_labels.items() if t not in removed}
    return NetSystem(net.places, keep, flow, net.initial, labels)


def observable_projection(net: NetSystem, seq: Iterable[str]) -> list[str]:
    """Map a transition sequence through the labelling, dropping silent steps."""
    out = []
    for t in seq:
        sym = net.label(t)
        if sym is not None:
            out.append(sym)
    return out
