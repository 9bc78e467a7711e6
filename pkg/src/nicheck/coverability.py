"""Karp–Miller coverability trees.

Labels are tuples whose entries are ints or ``OMEGA`` (``math.inf``), so the
ordinary firing arithmetic works unchanged on accelerated coordinates.
Nodes whose label already occurs earlier in the tree are kept as leaves with a
``link`` to that node instead of being expanded again.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

from .net import NetSystem

OMEGA = math.inf


@dataclass
class KMNode:
    label: tuple
    parent: int | None = None
    via: str | None = None
    children: list[int] = field(default_factory=list)
    link: int | None = None


class CoverabilityTree:
    def __init__(self, places: tuple[str, ...], nodes: list[KMNode], complete: bool):
        self.places = places
        self.nodes = nodes
        self.complete = complete

    def __len__(self) -> int:
        return len(self.nodes)

    def labels(self) -> set[tuple]:
        return {n.label for n in self.nodes}

    def unbounded_places(self) -> list[str]:
        hit = set()
        for n in self.nodes:
            hit.update(i for i, v in enumerate(n.label) if v == OMEGA)
        return [self.places[i] for i in sorted(hit)]

    @property
    def is_bounded(self) -> bool:
        return not self.unbounded_places()

    def path_to(self, i: int) -> list[str]:
        seq = []
        while self.nodes[i].parent is not None:
            seq.append(self.nodes[i].via)
            i = self.nodes[i].parent
        return seq[::-1]

    def omega_witness(self, place: str) -> list[str] | None:
        """Transitions leading from the root to the first node with ω at ``place``.

        When no other place is accelerated earlier on that path, the result is a
        real firing sequence whose final marking strictly covers an ancestor.
        """
        k = self.places.index(place)
        for i, n in enumerate(self.nodes):
            if n.label[k] == OMEGA:
                return self.path_to(i)
        return None

    def covers(self, lower: Iterable[tuple[int, int]]) -> bool:
        """True iff some label is ≥ every ``(place_index, bound)`` pair (ω ≥ anything)."""
        lower = tuple(lower)
        return any(all(n.label[i] >= b for i, b in lower) for n in self.nodes)


def karp_miller(net: NetSystem, excluded: Iterable[str] = (),
                max_nodes: int | None = None) -> CoverabilityTree:
    """Build the Karp–Miller tree of ``net`` (ignoring ``excluded`` transitions).

    With ``max_nodes`` the construction stops early and the tree is marked
    incomplete; otherwise it always terminates.
    """
    cn = net.compiled()
    excluded = set(excluded)
    names = [t for t in cn.names if t not in excluded]
    root = tuple(cn.initial)
    nodes = [KMNode(root)]
    first = {root: 0}
    queue = deque([0])
    while queue:
        i = queue.popleft()
        node = nodes[i]
        for t, succ in cn.successors(node.label, names):
            lab = list(succ)
            anc: int | None = i
            while anc is not None:
                a = nodes[anc].label
                if all(x <= y for x, y in zip(a, lab)) and any(x < y for x, y in zip(a, lab)):
                    for k, (x, y) in enumerate(zip(a, lab)):
                        if x < y:
                            lab[k] = OMEGA
                anc = nodes[anc].parent
            lab = tuple(lab)
            j = len(nodes)
            child = KMNode(lab, parent=i, via=t)
            nodes.append(child)
            node.children.append(j)
            if lab in first:
                child.link = first[lab]
            else:
                first[lab] = j
                queue.append(j)
            if max_nodes is not None and len(nodes) > max_nodes:
                return CoverabilityTree(net.places, nodes, complete=False)
    return CoverabilityTree(net.places, nodes, complete=True)


def is_bounded(net: NetSystem) -> bool:
    return karp_miller(net).is_bounded
