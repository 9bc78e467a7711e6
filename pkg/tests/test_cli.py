import json
import subprocess
import sys
from pathlib import Path

import pytest

from nicheck.cli import main
from nicheck.textformat import parse_net

NETS = Path(__file__).resolve().parent.parent / "nets"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("name, prop, code", [
    ("leak_causal", "ndc", 1),
    ("high_after_low", "ndc", 0),
    ("twin_pumps", "ndc", 0),
    ("shared_token", "ndc", 0),
    ("shared_token", "bndc", 1),
    ("causal_pair", "sbndc", 1),
    ("late_leak", "bndc", 1),
    ("shop", "ini", 0),
    ("shop", "bini", 0),
    ("rings", "bini", 0),
    ("shop_leaky", "ini", 1),
])
def test_check_exit_codes(capsys, name, prop, code):
    assert run(capsys, "check", NETS / f"{name}.net", "--property", prop)[0] == code


def test_unknown_exit_code_under_tight_bounds(capsys):
    code, out, _ = run(capsys, "check", NETS / "causal_pair.net", "--property", "sbndc",
                       "--depth-bound", "1")
    assert code == 2
    assert "SBNDC: unknown" in out


def test_text_report_shows_witness_and_subchecks(capsys):
    code, out, _ = run(capsys, "check", NETS / "causal_pair.net", "--property", "sbndc")
    assert code == 1
    assert "witness: h=h l=l (causal)" in out
    assert "s      = k" in out
    assert "h,l" in out


def test_json_report(capsys):
    code, out, _ = run(capsys, "check", NETS / "late_leak.net", "--property", "bndc", "--json")
    data = json.loads(out)
    assert code == 1
    assert data["verdict"] == "insecure"
    assert data["witness"] == {"h": "h", "l": "l3", "w": [], "s": ["l1", "l2"],
                               "direction": "causal"}


def test_json_output_is_deterministic(capsys):
    args = ("check", NETS / "shop.net", "--property", "ini", "--json")
    first = run(capsys, *args)[1]
    assert run(capsys, *args)[1] == first


def test_state_bound_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("NICHECK_STATE_BOUND", "123")
    out = run(capsys, "check", NETS / "shop.net", "--property", "ini", "--json")[1]
    assert json.loads(out)["limits"]["max_states"] == 123
    out = run(capsys, "check", NETS / "shop.net", "--property", "ini", "--json",
              "--state-bound", "7")[1]
    assert json.loads(out)["limits"]["max_states"] == 7


def test_oracle_engine(capsys):
    assert run(capsys, "check", NETS / "shop_bounded.net", "--property", "ini",
               "--engine", "oracle")[0] == 0
    code, _, err = run(capsys, "check", NETS / "twin_pumps.net", "--property", "ndc",
                       "--engine", "oracle")
    assert code == 2 and "mh" in err


def test_both_engines_report_agreement(capsys):
    code, out, _ = run(capsys, "check", NETS / "shared_token.net", "--property", "bndc",
                       "--engine", "both", "--json")
    data = json.loads(out)
    assert code == 1
    assert data["cross_validation"]["agree"] is True


@pytest.mark.parametrize("argv", [
    ["check", "NET", "--property", "gni"],
    ["check", "NET"],
    ["check", "NET", "--property", "ndc", "--state-bound", "0"],
    ["construct", "NET", "--pcheck", "h,l", "--nd", "d"],
    ["construct", "NET", "--pcheck", "h"],
    ["frobnicate"],
])
def test_usage_errors_exit_3(capsys, argv):
    argv = [str(NETS / "leak_causal.net") if a == "NET" else a for a in argv]
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 3


def test_semantic_usage_errors_exit_3(capsys, tmp_path):
    code, _, err = run(capsys, "check", NETS / "shop.net", "--property", "ndc")
    assert code == 3 and "INI or BINI" in err
    assert run(capsys, "check", tmp_path / "missing.net", "--property", "ndc")[0] == 3
    bad = tmp_path / "bad.net"
    bad.write_text("place p 1\ntrans t Q\n")
    code, _, err = run(capsys, "check", bad, "--property", "ndc")
    assert code == 3 and "2:9" in err


def test_reserved_names_need_the_flag(capsys, tmp_path):
    net = tmp_path / "r.net"
    net.write_text("place p#1 1\ntrans h H\ntrans l L\narc p#1 -> h\n")
    code, _, err = run(capsys, "check", net, "--property", "ndc")
    assert code == 3 and "reserved" in err
    assert run(capsys, "check", net, "--property", "ndc", "--allow-reserved")[0] == 0


def test_construct_prints_parseable_nets(capsys, tmp_path):
    code, out, _ = run(capsys, "construct", NETS / "causal_pair.net", "--pcheck", "h,l")
    assert code == 0
    net = parse_net(out, allow_reserved=True).net
    assert len(net.places) == 8 and net.initial["x@"] == 1
    code, out, _ = run(capsys, "construct", NETS / "shop.net", "--nd", "d1")
    assert len(parse_net(out, allow_reserved=True).net.transitions) == 11
    dest = tmp_path / "q.net"
    assert run(capsys, "construct", NETS / "shop.net", "--qcheck", "h1,l1", "-o", dest)[0] == 0
    assert "x@" in parse_net(dest.read_text(), allow_reserved=True).net.pre("d1")
    code, out, _ = run(capsys, "construct", NETS / "leak_causal.net", "--ndc-product")
    assert code == 0 and "l#A'" in out
    assert run(capsys, "construct", NETS / "shop.net", "--pcheck", "h1,l1")[0] == 3


def test_dot_export(capsys, tmp_path):
    code, out, _ = run(capsys, "dot", NETS / "leak_causal.net")
    assert code == 0 and out.startswith('digraph "net"') and '"t:h"' in out
    code, out, _ = run(capsys, "dot", NETS / "shared_token.net", "--rg")
    assert code == 0 and "doublecircle" in out and "style=dashed" in out
    code, _, err = run(capsys, "dot", NETS / "twin_pumps.net", "--rg")
    assert code == 3 and "mh" in err
    dest = tmp_path / "n.dot"
    code, out, _ = run(capsys, "check", NETS / "leak_causal.net", "--property", "ndc",
                       "--dot", dest)
    assert code == 1 and dest.read_text().startswith("digraph")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "nicheck", "check",
                           str(NETS / "leak_causal.net"), "--property", "ndc"],
                          capture_output=True, text=True)
    assert proc.returncode == 1
    assert "NDC: insecure" in proc.stdout


def test_dot_graph_sizes_for_small_fixtures(capsys):
    out = run(capsys, "dot", NETS / "shared_token.net")[1]
    assert out.count("shape=circle") + out.count("shape=box") == 3
    out = run(capsys, "dot", NETS / "high_after_low.net", "--rg")[1]
    nodes = [ln for ln in out.splitlines() if "shape=" in ln]
    edges = [ln for ln in out.splitlines() if "->" in ln]
    assert len(nodes) == 3 and len(edges) == 2


def test_causal_pair_json_witness(capsys):
    code, out, _ = run(capsys, "check", NETS / "causal_pair.net", "--property", "sbndc", "--json")
    wit = json.loads(out)["witness"]
    assert code == 1
    assert (wit["h"], wit["l"], wit["w"], wit["s"]) == ("h", "l", [], ["k"])
