"""Seeded generators of small random nets for property-based comparisons."""

from __future__ import annotations

import random
from collections.abc import Iterator

from .coverability import karp_miller
from .net import Level, NetSystem


def random_net(rng: random.Random, max_places: int = 5, max_transitions: int = 5,
               max_weight: int = 2, max_tokens: int = 2, three_level: bool = False,
               density: float = 0.35, conservative: bool = False) -> NetSystem:
    """A random net with at least one low and one high (and, if asked, one downgrading) transition.

    With ``conservative=True`` every transition puts back as many tokens as it
    takes (possibly into other places), so the net is bounded by construction.
    """
    n_p = rng.randint(1, max_places)
    min_t = 3 if three_level else 2
    n_t = rng.randint(min_t, max(min_t, max_transitions))
    places = [f"p{i}" for i in range(n_p)]
    levels = [Level.LOW, Level.HIGH] + ([Level.DOWN] if three_level else [])
    pool = levels + [Level.LOW, Level.HIGH] + ([Level.DOWN] if three_level else [])
    levels += [rng.choice(pool) for _ in range(n_t - len(levels))]
    rng.shuffle(levels)
    transitions = [(f"t{i}", lv) for i, lv in enumerate(levels)]
    arcs = {}
    for t, _ in transitions:
        for p in places:
            if rng.random() < density:
                arcs[(p, t)] = rng.randint(1, max_weight)
            if not conservative and rng.random() < density:
                arcs[(t, p)] = rng.randint(1, max_weight)
        if conservative:
            taken = sum(w for (p, u), w in arcs.items() if u == t)
            for _ in range(taken):
                p = rng.choice(places)
                if arcs.get((t, p), 0) < max_weight:
                    arcs[(t, p)] = arcs.get((t, p), 0) + 1
    initial = {p: rng.randint(0, max_tokens) for p in places}
    return NetSystem(places, transitions, arcs, initial)


def reachable_count(net: NetSystem, cap: int) -> int | None:
    """Number of reachable markings, or ``None`` when it exceeds ``cap``."""
    cn = net.compiled()
    seen = {tuple(cn.initial)}
    stack = list(seen)
    while stack:
        m = stack.pop()
        for _, m2 in cn.successors(m):
            if m2 not in seen:
                if len(seen) >= cap:
                    return None
                seen.add(m2)
                stack.append(m2)
    return len(seen)


def bounded_nets(seed: int, count: int, max_states: int = 60, min_states: int = 1,
                 **kw) -> Iterator[NetSystem]:
    """``count`` random bounded nets with ``min_states``..``max_states`` reachable markings.

    Unconstrained and token-conserving nets alternate, so the stream mixes
    tiny state spaces with larger ones.
    """
    rng = random.Random(seed)
    made = 0
    while made < count:
        net = random_net(rng, conservative=made % 2 == 1, **kw)
        tree = karp_miller(net, max_nodes=2_000)
        if not tree.complete or not tree.is_bounded:
            continue
        size = reachable_count(net, max_states)
        if size is None or size < min_states:
            continue
        made += 1
        yield net
