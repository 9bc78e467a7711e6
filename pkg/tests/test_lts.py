import random

import pytest

from nicheck import lts as oracle
from nicheck.errors import OracleOverflow
from nicheck.lts import (
    build_lts,
    determinize,
    language_equivalent,
    weak_simulation_check,
    weakly_bisimilar,
)
from nicheck.net import NetSystem, restrict
from nicheck.randnets import bounded_nets

from helpers import reachable, step, words


def test_lts_has_one_state_per_reachable_marking(shared_token, late_leak):
    for net in (shared_token, late_leak):
        g = build_lts(net)
        assert len(g) == len(reachable(net))
        assert g.states[g.initial] == tuple(net.initial.counts)


def test_high_edges_are_silent(leak_causal):
    g = build_lts(leak_causal)
    assert {s for _, s, _ in g.transitions()} == {None, "l"}


def test_unbounded_net_overflows_with_the_pumped_place(twin_pumps):
    with pytest.raises(OracleOverflow, match="mh"):
        build_lts(twin_pumps)


def test_state_cap_overflows(shop_bounded):
    with pytest.raises(OracleOverflow):
        build_lts(shop_bounded, max_states=3)


def test_language_difference_comes_with_shortest_word(leak_causal):
    ok, word = language_equivalent(build_lts(leak_causal),
                                   build_lts(restrict(leak_causal, ["h"])))
    assert not ok and word == ("l",)


def test_ndc_oracle_examples(leak_causal, high_after_low, shared_token):
    assert not oracle.ndc_direct(leak_causal).secure
    assert oracle.ndc_direct(high_after_low).secure
    assert oracle.ndc_direct(shared_token).secure


def test_bndc_oracle_examples(high_after_low, shared_token, late_leak):
    assert oracle.sbndc_direct(high_after_low).secure
    assert oracle.bndc_via_elabeth(high_after_low).secure
    r = oracle.sbndc_direct(shared_token)
    assert not r.secure and r.witness["h"] == "h"
    assert not oracle.bndc_via_elabeth(shared_token).secure
    r = oracle.sbndc_direct(late_leak)
    assert not r.secure and r.witness["word"][-1] == "l3"


def test_ini_oracle_examples(shop_bounded, rings):
    assert oracle.ini_direct(shop_bounded).secure
    assert oracle.bini_direct(shop_bounded).secure


def test_downgraded_late_leak_is_bini_secure(late_leak):
    net = late_leak.with_levels({"l3": "D"})
    assert oracle.bini_direct(net).secure
    assert oracle.ini_direct(net).secure


def test_nd_oracle_agrees_with_per_d_condition(shop_bounded):
    from nicheck.constructions import build_nd
    for d in shop_bounded.down:
        a = oracle.nd_equivalent(build_nd(shop_bounded, d).net)
        b = oracle.per_d_condition(shop_bounded, d)
        assert a.secure == b.secure


def test_truncated_oracles_find_genuine_leaks(causal_pair, shop_leaky):
    r = oracle.truncated_sbndc(causal_pair, 4, 4)
    assert not r.secure and r.witness["word"] == ["k", "l"]
    r = oracle.truncated_ini(shop_leaky, 6, 4)
    assert not r.secure


def test_truncated_oracles_accept_secure_unbounded_nets(twin_pumps, shop):
    assert oracle.truncated_ndc(twin_pumps, 10).secure
    assert oracle.truncated_ini(shop, 5, 5).secure
    assert oracle.truncated_bini(shop, 5, 5).secure


def test_truncated_words_match_brute_force(late_leak):
    for k in range(6):
        assert oracle.truncated_words(late_leak, k) == words(
            late_leak, dict(late_leak.initial.support()), k)


# -- determinisation -----------------------------------------------------------

def _subset_graph_as_lts(lts, subsets, delta):
    edges = tuple(tuple((s, j, s) for s, j in sorted(d.items())) for d in delta)
    return oracle.FiniteLTS(lts.places, tuple((i,) for i in range(len(subsets))), edges, 0,
                            lts.alphabet)


def test_determinisation_is_idempotent_and_language_preserving():
    for net in bounded_nets(seed=31, count=80, max_states=40, min_states=3):
        g = build_lts(net)
        subsets, delta = determinize(g)
        d1 = _subset_graph_as_lts(g, subsets, delta)
        assert language_equivalent(g, d1)[0]
        subsets2, delta2 = determinize(d1)
        assert len(subsets2) == len(subsets)
        assert [sorted(d) for d in delta2] == [sorted(d) for d in delta]


# -- weak bisimulation versus language equality ---------------------------------

def test_bisimilarity_coincides_with_language_equality_without_silent_moves():
    rng = random.Random(12)
    pairs = agree_eq = 0
    for net in bounded_nets(seed=12, count=200, max_states=40, min_states=2):
        g = build_lts(restrict(net, net.high))  # identity labelling, no silent moves
        q1, q2 = rng.randrange(len(g)), rng.randrange(len(g))
        if rng.random() < 0.3:
            q2 = q1
        a, b = g.rooted(q1), g.rooted(q2)
        bis, rel = weakly_bisimilar(a, b)
        same, word = language_equivalent(a, b)
        assert bis == same
        if bis:
            assert weak_simulation_check(a, b, rel)
            agree_eq += 1
        else:
            assert word is not None
        pairs += 1
    assert pairs == 200 and 0 < agree_eq < 200


def test_bisimilarity_implies_language_equality_with_silent_moves():
    rng = random.Random(13)
    for net in bounded_nets(seed=13, count=150, max_states=40, min_states=2):
        g = build_lts(net)
        q1, q2 = rng.randrange(len(g)), rng.randrange(len(g))
        if weakly_bisimilar(g.rooted(q1), g.rooted(q2))[0]:
            assert language_equivalent(g.rooted(q1), g.rooted(q2))[0]


def test_language_equal_but_not_bisimilar_under_shared_labels():
    # a.(b + c) versus a.b + a.c: equal languages, but the second commits early
    net = NetSystem(
        ["x", "u", "y", "v", "w"],
        [("a", "L"), ("b", "L"), ("c", "L"), ("a1", "L"), ("a2", "L"), ("b1", "L"),
         ("c2", "L")],
        [("x", "a"), ("a", "u"), ("u", "b"), ("u", "c"),
         ("y", "a1"), ("a1", "v"), ("v", "b1"), ("y", "a2"), ("a2", "w"), ("w", "c2")],
        {"x": 1, "y": 1},
        labels={"a1": "a", "a2": "a", "b1": "b", "c2": "c"})
    left = restrict(net, ["a1", "a2", "b1", "c2"])
    right = restrict(net, ["a", "b", "c"])
    a, b = build_lts(left), build_lts(right)
    assert language_equivalent(a, b)[0]
    assert not weakly_bisimilar(a, b)[0]


def test_weak_simulation_check_rejects_bad_relations(high_after_low):
    g = build_lts(high_after_low)
    ok, rel = weakly_bisimilar(g, g)
    assert ok and weak_simulation_check(g, g, rel)
    assert not weak_simulation_check(g, g, set())
    only_root = {(g.initial, g.initial)}
    assert not weak_simulation_check(g, g, only_root)


# -- relation R ------------------------------------------------------------

def _relation_by_paths(net, depth):
    """Pairs (M1, M2) with M0 [γ> M1 and M0 [γ'> M2, γ low, γ' = γ interleaved with highs."""
    m0 = dict(net.initial.support())
    key = lambda m: tuple(m.get(p, 0) for p in net.places)  # noqa: E731
    out = set()
    layer = {(key(m0), key(m0))}
    out |= layer
    for _ in range(depth):
        nxt = set()
        for a, b in layer:
            da, db = dict(zip(net.places, a)), dict(zip(net.places, b))
            for h in net.high:
                m = step(net, db, h)
                if m is not None:
                    nxt.add((a, key(m)))
            for l in net.low:
                x, y = step(net, da, l), step(net, db, l)
                if x is not None and y is not None:
                    nxt.add((key(x), key(y)))
        layer = nxt - out
        out |= nxt
    return out


def test_relation_R_matches_path_characterisation():
    for net in bounded_nets(seed=17, count=60, max_states=30, min_states=2):
        assert oracle.relation_R(net) == _relation_by_paths(net, 60)


def test_relation_R_is_closed_under_its_rules(shared_token, late_leak):
    for net in (shared_token, late_leak):
        rel = oracle.relation_R(net)
        cn = net.compiled()
        for m1, m2 in rel:
            for h in net.high:
                if cn.enabled(m2, h):
                    assert (m1, cn.fire(m2, h)) in rel
            for l in net.low:
                if cn.enabled(m1, l) and cn.enabled(m2, l):
                    assert (cn.fire(m1, l), cn.fire(m2, l)) in rel
