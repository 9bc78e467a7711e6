"""Three-valued reachability of interval-constrained marking sets.

A :class:`TargetSet` is a disjunction of clauses; a clause is a conjunction of
per-place bounds ``p >= k`` / ``p <= k``.  :func:`decide_reach` answers

* ``TargetReachable`` with a shortest firing sequence (BFS order, ties broken
  by transition declaration order),
* ``TargetUnreachableProven`` with the kind of certificate that closed it, or
* ``Unknown`` when the limits were hit without a conclusion.

Search order: a small exhaustive BFS probe; per-clause certificates (marking
equation, then the upward-closed relaxation checked on a Karp–Miller tree);
finally a BFS restricted to the clauses still open, within the full limits.
"""

from __future__ import annotations

import enum
import os
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

from . import stateeq
from .coverability import karp_miller
from .errors import ConfigurationError, WitnessError
from .net import Marking, NetSystem, fire_sequence

__all__ = [
    "Rel",
    "Atom",
    "TargetSet",
    "Limits",
    "Outcome",
    "ProofKind",
    "SearchStats",
    "Verdict",
    "satisfies",
    "decide_reach",
]

INF = float("inf")

# BFS states tried before falling back to certificates on large or unbounded nets.
PROBE_STATES = 2_000
KM_NODE_BUDGET = 20_000


class Rel(str, enum.Enum):
    GE = ">="
    LE = "<="


@dataclass(frozen=True, order=True)
class Atom:
    place: str
    rel: Rel
    bound: int

    def holds(self, value: int) -> bool:
        return value >= self.bound if self.rel is Rel.GE else value <= self.bound

    def __str__(self) -> str:
        return f"{self.place} {self.rel.value} {self.bound}"


Clause = tuple[Atom, ...]


def clause_box(clause: Iterable[Atom]) -> dict[str, tuple[float, float]] | None:
    """Intersect the atoms of a clause per place; ``None`` when empty."""
    box: dict[str, list] = {}
    for a in clause:
        lo, hi = box.setdefault(a.place, [0, INF])
        if a.rel is Rel.GE:
            lo = max(lo, a.bound)
        else:
            hi = min(hi, a.bound)
        if lo > hi:
            return None
        box[a.place] = [lo, hi]
    return {p: (lo, hi) for p, (lo, hi) in box.items()}


@dataclass(frozen=True)
class TargetSet:
    """Finite union of boxes ``{M | lo <= M <= hi}`` over marking vectors."""

    clauses: tuple[Clause, ...] = ()

    @classmethod
    def of(cls, clauses: Iterable[Iterable[Atom | tuple]]) -> "TargetSet":
        out = []
        for c in clauses:
            out.append(tuple(a if isinstance(a, Atom) else Atom(a[0], Rel(a[1]), int(a[2]))
                             for a in c))
        return cls(tuple(out))

    @classmethod
    def enabled(cls, net: NetSystem, t: str) -> "TargetSet":
        """Markings enabling ``t``: one clause ``p >= F(p,t)`` over its input places."""
        return cls((tuple(Atom(p, Rel.GE, w) for p, w in net.pre(t).items()),))

    @classmethod
    def disabled(cls, net: NetSystem, t: str) -> "TargetSet":
        """Markings disabling ``t``: one clause ``p <= F(p,t)-1`` per input place."""
        return cls(tuple((Atom(p, Rel.LE, w - 1),) for p, w in net.pre(t).items()))

    def __or__(self, other: "TargetSet") -> "TargetSet":
        return TargetSet(self.clauses + other.clauses)

    def __and__(self, other: "TargetSet") -> "TargetSet":
        return TargetSet(tuple(a + b for a in self.clauses for b in other.clauses))

    def __len__(self) -> int:
        return len(self.clauses)

    def satisfiable(self) -> "TargetSet":
        """Drop clauses whose atoms contradict each other."""
        return TargetSet(tuple(c for c in self.clauses if clause_box(c) is not None))

    @property
    def places(self) -> set[str]:
        return {a.place for c in self.clauses for a in c}

    def __str__(self) -> str:
        if not self.clauses:
            return "false"
        return " | ".join("(" + " & ".join(map(str, c)) + ")" if c else "true"
                          for c in self.clauses)


def satisfies(m: Mapping[str, int], target: TargetSet) -> bool:
    """True iff some clause has all of its atoms satisfied by ``m``."""
    return any(all(a.holds(m[a.place]) for a in c) for c in target.clauses)


@dataclass(frozen=True)
class Limits:
    max_states: int = 1_000_000
    max_depth: int = 10_000

    def __post_init__(self):
        for name in ("max_states", "max_depth"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v < 1:
                raise ConfigurationError(f"{name} must be a positive integer, got {v!r}")

    @classmethod
    def from_env(cls, **overrides) -> "Limits":
        """Defaults, with ``NICHECK_STATE_BOUND`` overriding the state bound."""
        raw = os.environ.get("NICHECK_STATE_BOUND")
        kw = {}
        if raw:
            try:
                kw["max_states"] = int(raw)
            except ValueError:
                raise ConfigurationError(f"NICHECK_STATE_BOUND={raw!r} is not an integer") from None
        kw.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**kw)


class Outcome(str, enum.Enum):
    REACHABLE = "TargetReachable"
    UNREACHABLE = "TargetUnreachableProven"
    UNKNOWN = "Unknown"


class ProofKind(str, enum.Enum):
    EXHAUSTED = "ExhaustedBoundedStateSpace"
    UPWARD = "UpwardRelaxationUncoverable"
    STATE_EQUATION = "StateEquationInfeasible"
    UNSATISFIABLE = "UnsatisfiableTarget"


@dataclass(frozen=True)
class SearchStats:
    states: int = 0
    frontier_peak: int = 0
    depth: int = 0
    max_states: int = 0
    max_depth: int = 0
    km_nodes: int = 0
    ilp_solves: int = 0

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True)
class Verdict:
    outcome: Outcome
    witness: tuple[str, ...] | None = None
    marking: Marking | None = None
    proof: ProofKind | None = None
    clause_proofs: tuple[ProofKind | None, ...] = ()
    stats: SearchStats = field(default_factory=SearchStats)

    @property
    def reachable(self) -> bool:
        return self.outcome is Outcome.REACHABLE

    @property
    def unreachable(self) -> bool:
        return self.outcome is Outcome.UNREACHABLE


@dataclass
class _BFSResult:
    found: tuple | None
    parents: dict
    states: int
    frontier_peak: int
    depth: int
    exhausted: bool


def _bfs(cn, names, boxes, max_states: int, max_depth: int) -> _BFSResult:
    def hit(m):
        for box in boxes:
            for i, lo, hi in box:
                if not lo <= m[i] <= hi:
                    break
            else:
                return True
        return False

    m0 = tuple(cn.initial)
    parents: dict = {m0: None}
    if hit(m0):
        return _BFSResult(m0, parents, 1, 1, 0, False)
    frontier = [m0]
    depth = 0
    peak = 1
    while frontier:
        if depth >= max_depth:
            return _BFSResult(None, parents, len(parents), peak, depth, False)
        nxt = []
        for m in frontier:
            for t, m2 in cn.successors(m, names):
                if m2 in parents:
                    continue
                parents[m2] = (m, t)
                if hit(m2):
                    return _BFSResult(m2, parents, len(parents), max(peak, len(nxt)),
                                      depth + 1, False)
                if len(parents) >= max_states:
                    return _BFSResult(None, parents, len(parents), max(peak, len(nxt)),
                                      depth + 1, False)
                nxt.append(m2)
        frontier = nxt
        peak = max(peak, len(frontier))
        depth += 1
    return _BFSResult(None, parents, len(parents), peak, depth, True)


def _path(parents: dict, m: tuple) -> tuple[str, ...]:
    seq = []
    while parents[m] is not None:
        m, t = parents[m]
        seq.append(t)
    return tuple(reversed(seq))


def decide_reach(net: NetSystem, target: TargetSet, limits: Limits | None = None,
                 excluded: Iterable[str] = (), *, probe_states: int = PROBE_STATES) -> Verdict:
    """Decide whether some marking of ``target`` is reachable from M0.

    Transitions in ``excluded`` are never fired; they may still occur in the
    target through the places they read.  ``probe_states`` bounds the initial
    exhaustive search that runs before any certificate is attempted.
    """
    limits = limits or Limits()
    excluded = set(excluded)
    for t in excluded:
        net.transition(t)
    cn = net.compiled()
    names = [t for t in cn.names if t not in excluded]
    index = {p: i for i, p in enumerate(net.places)}
    for p in target.places:
        if p not in index:
            raise ConfigurationError(f"target mentions unknown place {p!r}")

    all_boxes = []
    proofs: list[ProofKind | None] = []
    for c in target.clauses:
        box = clause_box(c)
        proofs.append(ProofKind.UNSATISFIABLE if box is None else None)
        all_boxes.append(None if box is None else
                         tuple((index[p], lo, hi) for p, (lo, hi) in sorted(box.items())))
    stats = dict(max_states=limits.max_states, max_depth=limits.max_depth)

    def live():
        return [b for b, pk in zip(all_boxes, proofs) if pk is None]

    def finish(outcome, res=None, proof=None, **extra):
        if res is not None:
            stats.update(states=max(stats.get("states", 0), res.states),
                         frontier_peak=max(stats.get("frontier_peak", 0), res.frontier_peak),
                         depth=res.depth)
        witness = marking = None
        if outcome is Outcome.REACHABLE:
            witness = _path(res.parents, res.found)
            marking = fire_sequence(net, net.initial, witness)
            if not satisfies(marking, target) or marking.counts != res.found:
                raise WitnessError(f"witness {witness} does not land in the target")
        return Verdict(outcome, witness, marking, proof, tuple(proofs),
                       SearchStats(**stats, **extra))

    if not live():
        return finish(Outcome.UNREACHABLE, proof=ProofKind.UNSATISFIABLE)

    res = _bfs(cn, names, live(), max(1, min(probe_states, limits.max_states)), limits.max_depth)
    if res.found is not None:
        return finish(Outcome.REACHABLE, res)
    if res.exhausted:
        for k, pk in enumerate(proofs):
            if pk is None:
                proofs[k] = ProofKind.EXHAUSTED
        return finish(Outcome.UNREACHABLE, res, ProofKind.EXHAUSTED)

    solves = 0
    for k, box in enumerate(all_boxes):
        if proofs[k] is not None:
            continue
        ok, n = stateeq.refutes(cn, names, cn.initial, {i: (lo, hi) for i, lo, hi in box})
        solves += n
        if ok:
            proofs[k] = ProofKind.STATE_EQUATION
    stats["ilp_solves"] = solves

    if live():
        tree = karp_miller(net, excluded, max_nodes=min(KM_NODE_BUDGET, limits.max_states))
        stats["km_nodes"] = len(tree)
        if tree.complete:
            for k, box in enumerate(all_boxes):
                if proofs[k] is None and not tree.covers((i, lo) for i, lo, _ in box):
                    proofs[k] = ProofKind.UPWARD

    remaining = live()
    if not remaining:
        kinds = {pk for pk in proofs if pk is not ProofKind.UNSATISFIABLE}
        proof = ProofKind.UPWARD if kinds == {ProofKind.UPWARD} else ProofKind.STATE_EQUATION
        return finish(Outcome.UNREACHABLE, res, proof)

    res = _bfs(cn, names, remaining, limits.max_states, limits.max_depth)
    if res.found is not None:
        return finish(Outcome.REACHABLE, res)
    if res.exhausted:
        for k, pk in enumerate(proofs):
            if pk is None:
                proofs[k] = ProofKind.EXHAUSTED
        return finish(Outcome.UNREACHABLE, res, ProofKind.EXHAUSTED)
    return finish(Outcome.UNKNOWN, res)
