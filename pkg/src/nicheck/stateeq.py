"""Unreachability certificates from the marking equation.

Every reachable marking satisfies ``M = M0 + C·x`` for some integer Parikh
vector ``x ≥ 0``.  If no such ``x`` puts ``M`` inside a clause, the clause is
unreachable.  The plain equation ignores causality, so a solution may use
transitions that can never become enabled; such spurious solutions are
refined away by branching on a set ``Z`` of initially empty places:

* either no transition consuming from ``Z`` fires, or
* some transition that feeds ``Z`` without consuming from it fires.

Every real firing sequence satisfies one of the two branches (the first
token ever taken from ``Z`` had to be put there by a feeder), so refuting
both keeps the argument sound.  Integer programs are solved with HiGHS via
:func:`scipy.optimize.milp`.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp

from .net import CompiledNet

INF = np.inf


class _Refuter:
    def __init__(self, cn: CompiledNet, names: list[str], m0: tuple, box: dict[int, tuple],
                 max_solves: int):
        self.cn = cn
        self.names = names
        self.m0 = m0
        self.max_solves = max_solves
        self.solves = 0
        n_p, n_t = len(m0), len(names)
        C = np.zeros((n_p, n_t))
        for j, t in enumerate(names):
            for i, v in cn.delta[t]:
                C[i, j] = v
        lo = np.array([-float(m) for m in m0])
        hi = np.full(n_p, INF)
        for i, (a, b) in box.items():
            lo[i] = max(lo[i], a - m0[i])
            if b != INF:
                hi[i] = b - m0[i]
        self.C, self.lo, self.hi = C, lo, hi
        self.inputs = {t: {i for i, _ in cn.pre[t]} for t in names}
        self.outputs = {t: {i for i, _ in cn.post[t]} for t in names}

    def _solve(self, zero: frozenset, atleast: tuple[frozenset, ...]):
        self.solves += 1
        n_t = len(self.names)
        rows = [LinearConstraint(self.C, self.lo, self.hi)]
        for group in atleast:
            row = np.zeros(n_t)
            row[[self.names.index(t) for t in group]] = 1
            rows.append(LinearConstraint(row[None, :], 1, INF))
        ub = np.array([0.0 if t in zero else INF for t in self.names])
        res = milp(c=np.ones(n_t), constraints=rows, integrality=np.ones(n_t),
                   bounds=Bounds(np.zeros(n_t), ub))
        if res.status == 2:
            return None
        if res.status != 0:
            raise _GiveUp
        return {t: int(round(v)) for t, v in zip(self.names, res.x) if round(v) > 0}

    def refute(self, zero: frozenset = frozenset(), atleast: tuple = (), depth: int = 0) -> bool:
        if self.solves >= self.max_solves or depth > 64:
            raise _GiveUp
        if not self.names:
            return not all(lo <= 0 <= hi for lo, hi in zip(self.lo, self.hi))
        x = self._solve(zero, atleast)
        if x is None:
            return True
        support = set(x)
        marked = {i for i, c in enumerate(self.m0) if c > 0}
        active: set[str] = set()
        produced = set(marked)
        grew = True
        while grew:
            grew = False
            for t in support - active:
                if self.inputs[t] <= produced:
                    active.add(t)
                    produced |= self.outputs[t]
                    grew = True
        blocked = support - active
        if not blocked:
            return False
        fed = set().union(*(self.outputs[t] for t in active)) if active else set()

        def starving(t: str) -> set[int]:
            return {i for i in self.inputs[t] if self.m0[i] == 0 and i not in fed}

        Z: set[int] = set()
        for t in blocked:
            Z |= starving(t)
        grew = True
        while grew:
            grew = False
            for u in blocked:
                if self.outputs[u] & Z and not self.inputs[u] & Z:
                    Z |= starving(u)
                    grew = True
        consumers = frozenset(t for t in self.names if self.inputs[t] & Z)
        feeders = frozenset(t for t in self.names
                            if self.outputs[t] & Z and not self.inputs[t] & Z)
        if not self.refute(zero | consumers, atleast, depth + 1):
            return False
        if not feeders:
            return True
        return self.refute(zero, atleast + (feeders,), depth + 1)


class _GiveUp(Exception):
    pass


def refutes(cn: CompiledNet, names: list[str], m0: tuple, box: dict[int, tuple],
            max_solves: int = 200) -> tuple[bool, int]:
    """Try to prove that no marking inside ``box`` is reachable.

    ``box`` maps place indices to ``(lower, upper)`` bounds (``upper`` may be
    ``inf``).  Returns ``(proven, solver_calls)``; ``proven=False`` means the
    certificate search failed, not that the box is reachable.
    """
    r = _Refuter(cn, names, m0, box, max_solves)
    try:
        return r.refute(), r.solves
    except _GiveUp:
        return False, r.solves
