"""Brute-force reference computations shared by the test modules.

These deliberately avoid the package's search code: markings are plain dicts
and the firing rule is re-stated here from the arc weights.
"""

from __future__ import annotations


from nicheck.net import NetSystem


def step(net: NetSystem, m: dict, t: str) -> dict | None:
    pre, post = net.pre(t), net.post(t)
    if any(m.get(p, 0) < w for p, w in pre.items()):
        return None
    out = dict(m)
    for p, w in pre.items():
        out[p] = out.get(p, 0) - w
    for p, w in post.items():
        out[p] = out.get(p, 0) + w
    return {p: c for p, c in out.items() if c}


def freeze(m: dict) -> tuple:
    return tuple(sorted((p, c) for p, c in m.items() if c))


def reachable(net: NetSystem, cap: int = 100_000, skip=()) -> dict[tuple, dict]:
    """All reachable markings (as frozen dicts) with their dict form."""
    m0 = {p: c for p, c in net.initial.items() if c}
    seen = {freeze(m0): m0}
    stack = [m0]
    while stack:
        m = stack.pop()
        for t in net.transition_names:
            if t in skip:
                continue
            m2 = step(net, m, t)
            if m2 is not None and freeze(m2) not in seen:
                assert len(seen) < cap, "state space larger than the brute-force cap"
                seen[freeze(m2)] = m2
                stack.append(m2)
    return seen


def shortest_distance(net: NetSystem, pred, skip=(), max_depth: int = 50) -> int | None:
    """Length of the shortest firing sequence reaching a marking satisfying ``pred``."""
    m0 = {p: c for p, c in net.initial.items() if c}
    layer = {freeze(m0): m0}
    seen = set(layer)
    for depth in range(max_depth + 1):
        if any(pred(m) for m in layer.values()):
            return depth
        nxt = {}
        for m in layer.values():
            for t in net.transition_names:
                if t in skip:
                    continue
                m2 = step(net, m, t)
                if m2 is not None and freeze(m2) not in seen:
                    seen.add(freeze(m2))
                    nxt[freeze(m2)] = m2
        if not nxt:
            return None
        layer = nxt
    return None


def words(net: NetSystem, start: dict, k: int, removed=()) -> set[tuple]:
    """Observable words of firing sequences of length <= k (default labelling)."""
    out = set()
    frontier = {(freeze(start), ())}
    out.add(())
    for _ in range(k):
        nxt = set()
        for fm, w in frontier:
            m = dict(fm)
            for t in net.transition_names:
                if t in removed:
                    continue
                m2 = step(net, m, t)
                if m2 is None:
                    continue
                sym = net.label(t)
                item = (freeze(m2), w if sym is None else w + (sym,))
                nxt.add(item)
                out.add(item[1])
        frontier = nxt
    return out


def all_boxes(places, lo_range=(0, 1, 2), rng=None, count=10):
    """Random interval boxes over ``places``."""
    boxes = []
    for _ in range(count):
        box = {}
        for p in places:
            r = rng.random()
            if r < 0.4:
                box[p] = (rng.choice(lo_range), None)
            elif r < 0.6:
                lo = rng.choice(lo_range)
                box[p] = (lo, lo + rng.randint(0, 1))
        boxes.append(box)
    return boxes


__all__ = ["step", "freeze", "reachable", "shortest_distance", "words", "all_boxes"]
