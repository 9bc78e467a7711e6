import random
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nicheck import gallery
from nicheck.errors import StructuralError
from nicheck.net import Level, NetSystem
from nicheck.randnets import random_net
from nicheck.textformat import NetParseError, load_net, parse_net, serialize_net

NETS = Path(__file__).resolve().parent.parent / "nets"

EXAMPLE = """\
# a small net
place s0 1   # marked
place s 0
trans h H
trans l L
arc s0 -> h
arc h -> s
arc s -> l 2
"""


def test_parse_example():
    doc = parse_net(EXAMPLE)
    net = doc.net
    assert net.places == ("s0", "s")
    assert net.initial.support() == {"s0": 1}
    assert net.level("h") is Level.HIGH
    assert net.pre("l") == {"s": 2}
    assert doc.spans["s"] == (3, 7)
    assert doc.arc_spans[("s", "l")] == (8, 1)


def test_serialize_is_canonical():
    text = serialize_net(parse_net(EXAMPLE).net)
    assert text == ("place s0 1\nplace s 0\ntrans h H\ntrans l L\n"
                    "arc s0 -> h\narc h -> s\narc s -> l 2\n")


@pytest.mark.parametrize("text, line, col, fragment", [
    ("place p 1\nplace p 0\n", 2, 7, "duplicate identifier"),
    ("trans t\n", 1, 7, "missing level"),
    ("trans t X\n", 1, 9, "level must be"),
    ("place p -1\n", 1, 9, "natural number"),
    ("place p x\n", 1, 9, "natural number"),
    ("place p 1\ntrans t L\narc p -> t 0\n", 3, 12, "at least 1"),
    ("place p 1\ntrans t L\narc p -> t\narc p -> t\n", 4, 1, "duplicate arc"),
    ("place p 1\narc p -> q\n", 2, 10, "unknown identifier"),
    ("place p 1\nplace q 0\narc p -> q\n", 3, 5, "must join"),
    ("place 1p 0\n", 1, 7, "invalid name"),
    ("place p@q 0\n", 1, 7, "reserved character '@'"),
    ("place p' 0\n", 1, 7, "reserved character"),
    ("transition t L\n", 1, 1, "unknown declaration"),
    ("arc p t\n", 1, 1, "expected 'arc"),
    ("place p 1 2\n", 1, 11, "expected 'place"),
])
def test_parse_errors_carry_positions(text, line, col, fragment):
    with pytest.raises(NetParseError) as info:
        parse_net(text)
    err = info.value
    assert (err.line, err.col) == (line, col)
    assert fragment in err.message
    assert str(err).startswith(f"{line}:{col}:")


def test_reserved_names_accepted_on_request():
    text = "place p#1 1\nplace x@ 0\ntrans h' H\narc p#1 -> h'\narc h' -> x@\n"
    net = parse_net(text, allow_reserved=True).net
    assert net.places == ("p#1", "x@")
    assert serialize_net(net) == text


def test_hash_inside_token_is_not_a_comment():
    net = parse_net("place p#1 1 # trailing\n", allow_reserved=True).net
    assert net.places == ("p#1",)


def test_custom_labels_cannot_be_serialized():
    net = NetSystem(["p"], [("t", "L")], labels={"t": "a"})
    with pytest.raises(StructuralError):
        serialize_net(net)


def test_empty_document_is_the_empty_net():
    net = parse_net("# nothing\n\n").net
    assert net.places == () and net.transitions == ()
    assert serialize_net(net) == ""


@pytest.mark.parametrize("name", sorted(gallery.GALLERY))
def test_fixture_files_match_the_gallery(name):
    path = NETS / f"{name}.net"
    assert load_net(path) == gallery.GALLERY[name]()
    assert parse_net(serialize_net(load_net(path))).net == load_net(path)


def test_round_trip_on_random_nets():
    rng = random.Random(99)
    for i in range(500):
        net = random_net(rng, three_level=i % 2 == 1, max_weight=3, max_tokens=3)
        text = serialize_net(net)
        again = parse_net(text).net
        assert again == net
        assert serialize_net(again) == text


names = st.from_regex(r"[A-Za-z_][A-Za-z0-9_]{0,5}", fullmatch=True)


@settings(max_examples=150, deadline=None)
@given(st.lists(names, min_size=1, max_size=8, unique=True), st.data())
def test_round_trip_property(idents, data):
    k = data.draw(st.integers(0, len(idents)))
    places, trans = idents[:k], idents[k:]
    levels = [data.draw(st.sampled_from("LHD")) for _ in trans]
    arcs = {}
    for p in places:
        for t in trans:
            if data.draw(st.booleans()):
                pair = (p, t) if data.draw(st.booleans()) else (t, p)
                arcs[pair] = data.draw(st.integers(1, 4))
    initial = {p: data.draw(st.integers(0, 5)) for p in places}
    net = NetSystem(places, list(zip(trans, levels)), arcs, initial)
    assert parse_net(serialize_net(net)).net == net
