"""Security checks built from the constructions and the reachability engine.

Each check runs a list of subchecks (one reachability question each), in
declaration order, and aggregates them: any violation makes the net
Insecure; otherwise a single inconclusive subcheck makes it Unknown; only when
every subcheck is proven is the net Secure.

An Insecure report always carries a witness phrased in the original net:

* ``w`` — a firing sequence of the original net,
* ``h`` — the high transition whose occurrence is revealed,
* ``s`` — a low sequence,
* ``l`` — the low transition whose enabledness differs,
* ``direction`` — ``causal`` when ``l`` is enabled only with ``h``, ``conflict``
  when ``h`` disables it.

For the pairwise checks the two runs are ``w s`` and ``w h s``; for the
language checks ``w`` itself enables ``l`` while its low projection ``s``
does not in the net without high transitions.  Intransitive checks add the
downgrading transition ``d`` and the ``prefix`` fired before it.  Every
witness is replayed through the firing rule before it is returned.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field

from . import lts as oracle
from .constructions import build_nd, build_ndc_product, build_pcheck, unprime
from .errors import OracleOverflow, UsageError, WitnessError
from .net import Level, NetSystem, enabled, fire_sequence, restrict
from .reach import Limits, Outcome, Verdict, decide_reach

__all__ = [
    "Status",
    "Subcheck",
    "CheckReport",
    "CrossValidation",
    "PROPERTIES",
    "check_ndc",
    "check_sbndc",
    "check_bndc",
    "check_ini",
    "check_bini",
    "check",
    "oracle_check",
    "cross_validate",
    "validate_witness",
]

PROPERTIES = ("ndc", "sbndc", "bndc", "ini", "bini")


class Status(str, enum.Enum):
    SECURE = "secure"
    INSECURE = "insecure"
    UNKNOWN = "unknown"


def _status(v: Verdict) -> Status:
    return {Outcome.REACHABLE: Status.INSECURE,
            Outcome.UNREACHABLE: Status.SECURE,
            Outcome.UNKNOWN: Status.UNKNOWN}[v.outcome]


@dataclass(frozen=True)
class Subcheck:
    name: str
    status: Status
    proof: str | None = None
    stats: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "verdict": self.status.value, "proof": self.proof,
                "stats": dict(self.stats)}


@dataclass(frozen=True)
class CheckReport:
    property: str
    status: Status
    witness: dict | None
    subchecks: tuple[Subcheck, ...]
    limits: Limits
    engine: str = "structural"

    @property
    def stats(self) -> dict:
        tot = {"subchecks": len(self.subchecks), "states": 0, "ilp_solves": 0, "km_nodes": 0}
        for sc in self.subchecks:
            for k in ("states", "ilp_solves", "km_nodes"):
                tot[k] += sc.stats.get(k, 0)
        return tot

    def to_json(self) -> dict:
        return {
            "property": self.property,
            "verdict": self.status.value,
            "witness": self.witness,
            "subchecks": [sc.to_json() for sc in self.subchecks],
            "stats": self.stats,
            "limits": {"max_states": self.limits.max_states, "max_depth": self.limits.max_depth},
        }


def _aggregate(prop: str, subs: list[tuple[Subcheck, dict | None]], limits: Limits) -> CheckReport:
    witness = next((w for sc, w in subs if sc.status is Status.INSECURE), None)
    statuses = {sc.status for sc, _ in subs}
    if Status.INSECURE in statuses:
        status = Status.INSECURE
    elif Status.UNKNOWN in statuses:
        status = Status.UNKNOWN
    else:
        status = Status.SECURE
    return CheckReport(prop, status, witness, tuple(sc for sc, _ in subs), limits)


def _subcheck(name: str, v: Verdict) -> Subcheck:
    stats = {"states": v.stats.states, "depth": v.stats.depth,
             "ilp_solves": v.stats.ilp_solves, "km_nodes": v.stats.km_nodes}
    return Subcheck(name, _status(v), v.proof.value if v.proof else None, stats)


# -- level checks --------------------------------------------------------------


def _require_default_labels(net: NetSystem) -> None:
    if not net.has_default_labels:
        raise UsageError("security checks assume the default labelling "
                         "(low/downgrading observable by name, high silent)")


def _require_two_level(net: NetSystem, prop: str) -> None:
    _require_default_labels(net)
    if net.down:
        raise UsageError(f"{prop} applies to two-level nets; this net has downgrading "
                         "transitions, use INI or BINI")


def _require_three_level(net: NetSystem, prop: str) -> None:
    _require_default_labels(net)
    if not net.down:
        raise UsageError(f"{prop} applies to three-level nets; this net has no downgrading "
                         "transitions, use NDC or BNDC")


# -- witness validation --------------------------------------------------------


def validate_witness(net: NetSystem, prop: str, wit: dict) -> None:
    """Replay ``wit`` in ``net`` and check that it exhibits the claimed mismatch.

    Raises :class:`WitnessError` when it does not.
    """
    prop = prop.upper()
    h, l, w, s = wit["h"], wit["l"], list(wit["w"]), list(wit["s"])
    prefix = list(wit.get("prefix") or [])
    d = wit.get("d")
    start = prefix + ([d] if d else [])
    try:
        if net.level(h) is not Level.HIGH or net.level(l) is not Level.LOW:
            raise WitnessError(f"witness roles have wrong levels: h={h}, l={l}")
        if any(net.level(t) is not Level.LOW for t in s):
            raise WitnessError(f"s contains non-low transitions: {s}")
        if d is not None and net.level(d) is not Level.DOWN:
            raise WitnessError(f"{d} is not a downgrading transition")
        m = fire_sequence(net, net.initial, start)
        if prop in ("NDC", "INI"):
            if net.down and any(net.level(t) is Level.DOWN for t in w):
                raise WitnessError("w must avoid downgrading transitions")
            if [t for t in w if net.level(t) is Level.LOW] != s or h not in w:
                raise WitnessError("s must be the low projection of w, and w must contain h")
            ok = enabled(net, fire_sequence(net, m, w), l) and not enabled(
                net, fire_sequence(net, m, s), l)
            if wit["direction"] != "causal":
                raise WitnessError("language witnesses are causal")
        else:
            if prop in ("SBNDC", "BNDC") and any(net.level(t) is Level.DOWN for t in w):
                raise WitnessError("w must avoid downgrading transitions")
            m3 = fire_sequence(net, m, w + s)
            m4 = fire_sequence(net, m, w + [h] + s)
            e3, e4 = enabled(net, m3, l), enabled(net, m4, l)
            ok = e3 != e4 and wit["direction"] == ("causal" if e4 else "conflict")
    except WitnessError:
        raise
    except Exception as exc:  # a firing error means the witness does not replay
        raise WitnessError(f"witness does not replay: {exc}") from exc
    if not ok:
        raise WitnessError(f"witness does not exhibit an enabledness mismatch: {wit}")


def _finish(net: NetSystem, report: CheckReport) -> CheckReport:
    if report.witness is not None:
        validate_witness(net, report.property, report.witness)
    return report


# -- language-based checks -----------------------------------------------------


def _ndc_subcheck(view: NetSystem, limits: Limits):
    prod = build_ndc_product(view)
    v = decide_reach(prod.net, prod.target, limits, excluded=prod.excluded)
    if not v.reachable:
        return v, None
    m = v.marking
    for l, (pa, pb) in prod.probes.items():
        if enabled(prod.net, m, pa) and not enabled(prod.net, m, pb):
            return v, (list(v.witness), l)
    raise WitnessError("product witness does not enable any probe")


def _language_witness(view: NetSystem, w: list[str], l: str) -> dict:
    high = set(view.high)
    h = next((t for t in w if t in high), None)
    if h is None:
        raise WitnessError("language witness without a high transition")
    s = [t for t in w if t not in high]
    return {"h": h, "l": l, "w": w, "s": s, "direction": "causal"}


def check_ndc(net: NetSystem, limits: Limits | None = None) -> CheckReport:
    """``L(N) = L(N\\H)``, decided as non-reachability in the inclusion product."""
    limits = limits or Limits()
    _require_two_level(net, "NDC")
    v, hit = _ndc_subcheck(net, limits)
    wit = _language_witness(net, *hit) if hit else None
    return _finish(net, _aggregate("NDC", [(_subcheck("inclusion", v), wit)], limits))


def check_ini(net: NetSystem, limits: Limits | None = None) -> CheckReport:
    """NDC of ``N\\D`` at M0 and after every downgrading firing.

    The second part is decided once per downgrading transition ``d`` on the
    downgrading net, whose primed copy runs ``N\\D`` from the markings
    reached by ``d``.
    """
    limits = limits or Limits()
    _require_three_level(net, "INI")
    subs = []
    view = restrict(net, net.down)
    v, hit = _ndc_subcheck(view, limits)
    wit = None
    if hit:
        wit = {**_language_witness(view, *hit), "d": None, "prefix": []}
    subs.append((_subcheck("initial", v), wit))
    for d in net.down:
        nd = build_nd(net, d)
        v, hit = _ndc_subcheck(nd.net, limits)
        wit = None
        if hit:
            seq, probe = hit
            if nd.d_prime not in seq:
                raise WitnessError("downgrading-net witness does not fire the primed d")
            k = seq.index(nd.d_prime)
            prefix, tail = seq[:k], [unprime(t) for t in seq[k + 1:]]
            wit = {**_language_witness(view, tail, unprime(probe)), "d": d, "prefix": prefix}
        subs.append((_subcheck(f"after {d}", v), wit))
    return _finish(net, _aggregate("INI", subs, limits))


# -- pairwise checks -----------------------------------------------------------


def _pair_checks(net: NetSystem, prop: str, declassify_too: bool, limits: Limits) -> CheckReport:
    subs = []
    for h in net.high:
        for l in net.low:
            c = build_pcheck(net, h, l, declassify_too)
            v = decide_reach(c.net, c.target, limits, excluded=c.excluded)
            wit = None
            if v.reachable:
                seq = list(v.witness)
                k = seq.index(c.h_prime)
                causal = enabled(c.net, v.marking, c.l2)
                wit = {"h": h, "l": l, "w": seq[:k], "s": seq[k + 1:],
                       "direction": "causal" if causal else "conflict"}
            subs.append((_subcheck(f"{h},{l}", v), wit))
    return _finish(net, _aggregate(prop, subs, limits))


def check_sbndc(net: NetSystem, limits: Limits | None = None) -> CheckReport:
    """One two-copy reachability check per pair (h, l) in ``H × L``."""
    limits = limits or Limits()
    _require_two_level(net, "SBNDC")
    return _pair_checks(net, "SBNDC", False, limits)


def check_bndc(net: NetSystem, limits: Limits | None = None) -> CheckReport:
    """BNDC coincides with SBNDC; the report is relabelled."""
    limits = limits or Limits()
    _require_two_level(net, "BNDC")
    return _pair_checks(net, "BNDC", False, limits)


def check_bini(net: NetSystem, limits: Limits | None = None) -> CheckReport:
    """Pairwise checks where downgrading transitions, like high ones, stop after ``h'``."""
    limits = limits or Limits()
    _require_three_level(net, "BINI")
    return _pair_checks(net, "BINI", True, limits)


_CHECKS = {"ndc": check_ndc, "sbndc": check_sbndc, "bndc": check_bndc,
           "ini": check_ini, "bini": check_bini}


def check(net: NetSystem, prop: str, limits: Limits | None = None) -> CheckReport:
    try:
        fn = _CHECKS[prop.lower()]
    except KeyError:
        raise UsageError(f"unknown property {prop!r}; choose from {', '.join(PROPERTIES)}") from None
    return fn(net, limits)


# -- oracle-backed checks ------------------------------------------------------


def _path_to(net: NetSystem, start: tuple, goal: tuple, last: str | None = None) -> list[str]:
    """Shortest firing sequence from ``start`` to ``goal`` (ending with ``last`` if given)."""
    cn = net.compiled()
    parents = {(start, False): None}
    queue = deque([(start, False)])
    while queue:
        node = queue.popleft()
        m, _ = node
        if m == goal and (last is None or node[1]):
            seq = []
            while parents[node] is not None:
                node, t = parents[node]
                seq.append(t)
            return seq[::-1]
        for t, m2 in cn.successors(m):
            nxt = (m2, last is not None and t == last)
            if nxt not in parents:
                parents[nxt] = (node, t)
                queue.append(nxt)
    raise WitnessError(f"no firing sequence reaches {goal}")


def _sequence_for_word(net: NetSystem, start: tuple, word: list[str]) -> list[str]:
    """Shortest firing sequence from ``start`` whose observable projection is ``word``."""
    cn = net.compiled()
    labels = {t: net.label(t) for t in cn.names}
    root = (start, 0)
    parents = {root: None}
    queue = deque([root])
    while queue:
        node = queue.popleft()
        m, i = node
        if i == len(word):
            seq = []
            while parents[node] is not None:
                node, t = parents[node]
                seq.append(t)
            return seq[::-1]
        for t, m2 in cn.successors(m):
            sym = labels[t]
            if sym is None:
                nxt = (m2, i)
            elif sym == word[i]:
                nxt = (m2, i + 1)
            else:
                continue
            if nxt not in parents:
                parents[nxt] = (node, t)
                queue.append(nxt)
    raise WitnessError(f"no firing sequence projects to {word}")


def _oracle_language_witness(net: NetSystem, view: NetSystem, start: tuple,
                             word: list[str]) -> dict:
    seq = _sequence_for_word(view, start, word)
    return _language_witness(view, seq[:-1], seq[-1])


def _oracle_pair_witness(net: NetSystem, res: oracle.OracleResult) -> dict:
    wit = res.witness
    m1 = tuple(net.marking(wit["m1"]).counts)
    w = _path_to(net, tuple(net.initial.counts), m1)
    word = list(wit["word"])
    s, l = word[:-1], word[-1]
    m4 = fire_sequence(net, net.marking(wit["m2"]), s)
    return {"h": wit["h"], "l": l, "w": w, "s": s,
            "direction": "causal" if enabled(net, m4, l) else "conflict"}


def oracle_check(net: NetSystem, prop: str, limits: Limits | None = None) -> CheckReport:
    """Decide ``prop`` with the explicit-state oracle (bounded nets only)."""
    limits = limits or Limits()
    prop = prop.lower()
    if prop not in PROPERTIES:
        raise UsageError(f"unknown property {prop!r}")
    (_require_two_level if prop in ("ndc", "sbndc", "bndc") else _require_three_level)(
        net, prop.upper())
    n = limits.max_states
    m0 = tuple(net.initial.counts)
    wit = None
    if prop == "ndc":
        res = oracle.ndc_direct(net, n)
        if not res.secure:
            wit = _oracle_language_witness(net, net, m0, res.witness["word"])
    elif prop in ("sbndc", "bndc"):
        res = oracle.sbndc_direct(net, n) if prop == "sbndc" else oracle.bndc_via_elabeth(net, n)
        if not res.secure:
            res = res if prop == "sbndc" else oracle.sbndc_direct(net, n)
            wit = _oracle_pair_witness(net, res)
    elif prop == "bini":
        res = oracle.bini_direct(net, n)
        if not res.secure:
            wit = _oracle_pair_witness(net, res)
    else:
        res = oracle.ini_direct(net, n)
        if not res.secure:
            view = restrict(net, net.down)
            d = res.witness["d"]
            m = tuple(net.marking(res.witness["m"]).counts)
            prefix = _path_to(net, m0, m, last=d)[:-1] if d else []
            wit = {**_oracle_language_witness(net, view, m, res.witness["word"]),
                   "d": d, "prefix": prefix}
    status = Status.SECURE if res.secure else Status.INSECURE
    sub = Subcheck("oracle", status, "explicit-state", {"checked": res.checked})
    report = CheckReport(prop.upper(), status, wit, (sub,), limits, engine="oracle")
    return _finish(net, report)


@dataclass(frozen=True)
class CrossValidation:
    property: str
    structural: Status
    oracle: Status | None
    agree: bool | None
    reason: str = ""
    structural_witness: dict | None = None
    oracle_witness: dict | None = None

    def to_json(self) -> dict:
        return {"property": self.property, "structural": self.structural.value,
                "oracle": self.oracle.value if self.oracle else None, "agree": self.agree,
                "reason": self.reason, "structural_witness": self.structural_witness,
                "oracle_witness": self.oracle_witness}


_TRUNCATED = {
    "ndc": lambda net, k: oracle.truncated_ndc(net, k),
    "sbndc": lambda net, k: oracle.truncated_sbndc(net, k, k),
    "bndc": lambda net, k: oracle.truncated_sbndc(net, k, k),
    "ini": lambda net, k: oracle.truncated_ini(net, k, k),
    "bini": lambda net, k: oracle.truncated_bini(net, k, k),
}


def cross_validate(net: NetSystem, prop: str, limits: Limits | None = None,
                   truncation: int = 8) -> CrossValidation:
    """Run the structural decider and the oracle on the same net and compare.

    When the oracle does not apply (unbounded net), a depth-truncated search is
    run instead: a violation it finds is genuine and is compared; a pass is
    only evidence, so agreement is left undecided.
    """
    limits = limits or Limits()
    prop = prop.lower()
    rep = check(net, prop, limits)
    try:
        orc = oracle_check(net, prop, limits)
    except OracleOverflow as exc:
        tr = _TRUNCATED[prop](net, truncation)
        if tr.secure:
            return CrossValidation(prop.upper(), rep.status, None, None,
                                   f"oracle skipped: {exc}; no violation within depth "
                                   f"{truncation}", rep.witness)
        agree = rep.status is Status.INSECURE
        return CrossValidation(prop.upper(), rep.status, Status.INSECURE, agree,
                               f"oracle skipped: {exc}; violation found within depth "
                               f"{truncation}", rep.witness, tr.witness)
    agree = None if rep.status is Status.UNKNOWN else rep.status is orc.status
    return CrossValidation(prop.upper(), rep.status, orc.status, agree, "", rep.witness,
                           orc.witness)
