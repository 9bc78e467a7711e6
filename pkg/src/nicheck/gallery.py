"""Small reference nets used by the tests, the acceptance suite and the CLI demos.

Each function returns a fresh :class:`NetSystem`.  They are the textbook
examples of the non-interference literature on nets: direct causal leaks,
conflicts, pumps that keep a language intact, and a shop with declassification.
"""

from __future__ import annotations

from .net import NetSystem


def leak_causal() -> NetSystem:
    """High ``h`` produces the token that low ``l`` needs (insecure)."""
    return NetSystem(["s0", "s"], [("h", "H"), ("l", "L")],
                     [("s0", "h"), ("h", "s"), ("s", "l")], {"s0": 1})


def high_after_low() -> NetSystem:
    """High ``h`` can only happen after low ``l`` (secure)."""
    return NetSystem(["s0", "s1"], [("l", "L"), ("h", "H")],
                     [("s0", "l"), ("l", "s1"), ("s1", "h")], {"s0": 1})


def twin_pumps() -> NetSystem:
    """Two independent unbounded pumps, one high and one low, with identical shape."""
    return NetSystem(
        ["sh", "mh", "sl", "ml"],
        [("h1", "H"), ("h2", "H"), ("l1", "L"), ("l2", "L")],
        [("sh", "h1"), ("h1", "sh"), ("h1", "mh"), ("mh", "h2"),
         ("sl", "l1"), ("l1", "sl"), ("l1", "ml"), ("ml", "l2")],
        {"sh": 1, "sl": 1},
    )


def shared_token() -> NetSystem:
    """High ``h`` and low ``l`` compete for one token (language-secure, not bisimilar)."""
    return NetSystem(["s"], [("h", "H"), ("l", "L")], [("s", "h"), ("s", "l")], {"s": 1})


def causal_pair() -> NetSystem:
    """``h`` (a loop on ``p``) feeds ``q``; ``k`` moves ``p`` to ``r``; ``l`` needs ``q`` and ``r``."""
    return NetSystem(
        ["p", "q", "r"],
        [("h", "H"), ("k", "L"), ("l", "L")],
        [("p", "h"), ("h", "p"), ("h", "q"), ("p", "k"), ("k", "r"), ("q", "l"), ("r", "l")],
        {"p": 1},
    )


def late_leak() -> NetSystem:
    """A high firing becomes observable only after two low steps (insecure at ``l3``)."""
    return NetSystem(
        ["s0", "s1", "s2", "s3", "s"],
        [("h", "H"), ("l1", "L"), ("l2", "L"), ("l3", "L")],
        [("s0", "h"), ("h", "s"), ("s1", "h"), ("h", "s1"),
         ("s1", "l1"), ("l1", "s2"), ("l1", "s"),
         ("s2", "l2"), ("s", "l2"), ("l2", "s3"),
         ("s3", "l3"), ("s", "l3")],
        {"s0": 1, "s1": 1},
    )


def _shop_arcs():
    return [
        ("s1", "l2"), ("l2", "s1"), ("s2", "l2"),
        ("s1", "d1"), ("d1", "s3"), ("s3", "d2"), ("d2", "s1"),
        ("s3", "h1"), ("s2", "h1"), ("h1", "s4"),
        ("s4", "h2"), ("h2", "s3"), ("h2", "s2"),
        ("l1", "s2"),
    ]


_SHOP_TRANSITIONS = [("l1", "L"), ("l2", "L"), ("h1", "H"), ("h2", "H"),
                     ("d1", "D"), ("d2", "D")]


def shop() -> NetSystem:
    """Shop with declassification: ``l1`` restocks without bound, ``d1``/``d2`` open and close."""
    return NetSystem(["s1", "s2", "s3", "s4"], _SHOP_TRANSITIONS, _shop_arcs(), {"s1": 1})


def shop_bounded(supply: int = 2) -> NetSystem:
    """:func:`shop` with restocking drawn from a finite ``supply`` place."""
    return NetSystem(["s1", "s2", "s3", "s4", "supply"], _SHOP_TRANSITIONS,
                     _shop_arcs() + [("supply", "l1")], {"s1": 1, "supply": supply})


def shop_leaky(supply: int | None = None) -> NetSystem:
    """Shop where ``h1`` also returns a token to ``s1`` (insecure for intransitive checks)."""
    places = ["s1", "s2", "s3", "s4"]
    arcs = _shop_arcs() + [("h1", "s1")]
    initial = {"s1": 1}
    if supply is not None:
        places.append("supply")
        arcs.append(("supply", "l1"))
        initial["supply"] = supply
    return NetSystem(places, _SHOP_TRANSITIONS, arcs, initial)


def rings() -> NetSystem:
    """A low ring and a high ring coupled only through downgrading read arcs."""
    return NetSystem(
        ["s0", "s1", "s2", "s3", "q1", "q2", "q3"],
        [("l1", "L"), ("l2", "L"), ("l3", "L"), ("h1", "H"), ("h2", "H"), ("h3", "H"),
         ("d1", "D"), ("d2", "D"), ("d3", "D")],
        [("s1", "l1"), ("l1", "s2", 2), ("s2", "l2"), ("l2", "s3"), ("s3", "l3"), ("l3", "s1"),
         ("q3", "h1"), ("h1", "q1"), ("q1", "h2"), ("h2", "q2"), ("q2", "h3"), ("h3", "q3"),
         ("s1", "h1"), ("h1", "s1"), ("s2", "h2"), ("h2", "s2"), ("s3", "h3"), ("h3", "s3"),
         ("q1", "d1"), ("d1", "q1"), ("q2", "d2"), ("d2", "q2"), ("q3", "d3"), ("d3", "q3"),
         ("s2", "d1"), ("s3", "d2"), ("s1", "d3"),
         ("d1", "s0"), ("d2", "s0"), ("d3", "s0")],
        {"s1": 1, "q3": 1},
    )


GALLERY = {
    "leak_causal": leak_causal,
    "high_after_low": high_after_low,
    "twin_pumps": twin_pumps,
    "shared_token": shared_token,
    "causal_pair": causal_pair,
    "late_leak": late_leak,
    "shop": shop,
    "shop_bounded": shop_bounded,
    "shop_leaky": shop_leaky,
    "rings": rings,
}
