
from nicheck.coverability import OMEGA, is_bounded, karp_miller
from nicheck.net import fire_sequence
from nicheck.randnets import bounded_nets, random_net

from helpers import reachable


def test_bounded_fixture_tree_has_no_omega(leak_causal, high_after_low, shared_token):
    for net in (leak_causal, high_after_low, shared_token):
        tree = karp_miller(net)
        assert tree.complete and tree.is_bounded
        assert is_bounded(net)


def test_twin_pumps_accelerates_both_pumped_places(twin_pumps):
    tree = karp_miller(twin_pumps)
    assert tree.complete
    assert set(tree.unbounded_places()) == {"mh", "ml"}
    assert tree.omega_witness("mh") == ["h1"]


def test_causal_pair_is_unbounded_through_its_high_loop(causal_pair):
    tree = karp_miller(causal_pair)
    assert "q" in tree.unbounded_places()
    seq = tree.omega_witness("q")
    assert seq and seq[-1] == "h"
    # the witness is a real firing sequence of the net
    fire_sequence(causal_pair, causal_pair.initial, seq)


def test_excluding_the_pump_makes_the_tree_bounded(twin_pumps):
    tree = karp_miller(twin_pumps, excluded=["h1", "l1"])
    assert tree.is_bounded


def test_node_budget_marks_tree_incomplete(twin_pumps):
    tree = karp_miller(twin_pumps, max_nodes=2)
    assert not tree.complete


def test_covers_treats_omega_as_arbitrarily_large(twin_pumps):
    tree = karp_miller(twin_pumps)
    k = twin_pumps.places.index("mh")
    assert tree.covers([(k, 10**6)])
    assert OMEGA > 10**9


def test_shop_is_unbounded_but_the_supplied_variant_is_not(shop, shop_bounded):
    assert not is_bounded(shop)
    assert is_bounded(shop_bounded)


def test_omega_witness_is_none_for_bounded_place(leak_causal):
    assert karp_miller(leak_causal).omega_witness("s") is None


def test_tree_labels_equal_reachable_set_on_bounded_random_nets():
    checked = 0
    for net in bounded_nets(seed=11, count=150, max_states=40):
        tree = karp_miller(net)
        ref = {tuple(m.get(p, 0) for p in net.places) for m in reachable(net).values()}
        assert tree.labels() == ref
        checked += 1
    assert checked == 150


def test_first_acceleration_is_a_real_pumping_sequence():
    import random
    rng = random.Random(5)
    seen = 0
    while seen < 40:
        net = random_net(rng)
        tree = karp_miller(net, max_nodes=2000)
        if not tree.complete or tree.is_bounded:
            continue
        seen += 1
        first = next(i for i, n in enumerate(tree.nodes) if OMEGA in n.label)
        place = tree.places[tree.nodes[first].label.index(OMEGA)]
        seq = tree.omega_witness(place)
        assert seq == tree.path_to(first)
        # replaying the path works, and the last marking strictly covers an
        # earlier one on the same run, so the segment between them can be repeated
        run = [fire_sequence(net, net.initial, seq[:i]) for i in range(len(seq) + 1)]
        last = run[-1].counts
        assert any(all(a <= b for a, b in zip(m.counts, last)) and m.counts != last
                   for m in run[:-1])
