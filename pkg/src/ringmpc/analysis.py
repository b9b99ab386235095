"""Executable secrecy claims, coalition analysis, and transcript metrics.

A secrecy claim here is always about distributions, never about single
runs: an observer's view tells it nothing about a protected quantity iff
the view's distribution (over everyone's randomness) is the same for
every value of that quantity consistent with what the observer
legitimately knows.  Because the protocols are unconditionally secure,
the check demands *exact* distribution equality, verified by enumerating
every input assignment and every randomness assignment over a finite
ring and comparing integer counts; no statistical slack is permitted.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import prod

from . import ring as ring_mod
from .arithmetic import MillionairesCompare, SecureSum
from .commitment import Commit2Dummy, Commit3
from .engine import (
    EAVESDROPPER,
    Protocol,
    ScriptedSource,
    Transcript,
    eavesdropper_view,
    extract_view,
    merge_views,
    run,
)
from .errors import BudgetExceeded, ProtocolError, TopologyError
from .topology import ChannelGraph, build_cycle, secure_cycles

INDEPENDENT = "independent"
INDEPENDENT_UNIFORM = "independent_uniform"
DETERMINED = "determined"


@dataclass
class SecrecySpec:
    """One executable hiding claim.

    The claim shapes:
      independent          -- observer view carries nothing about the target
                              beyond ``given`` and the observer's own inputs
      independent_uniform  -- additionally, the target is uniform given the view
      determined           -- the view (plus given) pins the target down exactly
    ``target`` maps (inputs, outcome) to the protected quantity; by default
    it is the tuple of ``protected`` input slots.  ``given`` maps
    (inputs, outcome) to whatever the claim concedes the observer may learn.
    """

    name: str
    protocol: Protocol
    input_domains: tuple
    observer: object  # party name, tuple of names, or EAVESDROPPER
    observer_inputs: tuple = ()
    protected: tuple = ()
    target: object = None
    given: object = None
    claim: str = INDEPENDENT
    graph: ChannelGraph | None = None
    budget: int = 2_000_000

    def target_of(self, inputs, outcome):
        if self.target is not None:
            return self.target(inputs, outcome)
        return tuple(inputs[i] for i in self.protected)

    def given_of(self, inputs, outcome):
        return self.given(inputs, outcome) if self.given is not None else None


@dataclass(frozen=True)
class Counterexample:
    group: object
    target_a: object
    target_b: object
    detail: str


@dataclass(frozen=True)
class SecrecyReport:
    name: str
    ok: bool
    runs: int
    counterexample: Counterexample | None = None

    def __bool__(self):
        return self.ok


def _observer_view(spec, transcript: Transcript):
    obs = spec.observer
    if obs == EAVESDROPPER:
        return eavesdropper_view(transcript)
    if isinstance(obs, tuple):
        return merge_views(*(extract_view(transcript, name) for name in obs))
    return extract_view(transcript, obs)


def discover_draw_sites(spec: SecrecySpec):
    """Dry-run the protocol once to learn its randomness sites in order."""
    inputs0 = tuple(domain[0] for domain in spec.input_domains)
    _, transcript = run(spec.protocol, spec.graph, inputs0, seed=0)
    return transcript.draw_sites


def enumerate_runs(spec: SecrecySpec):
    """Yield (inputs, outcome, transcript) over all inputs x all randomness."""
    sites = discover_draw_sites(spec)
    total = prod(len(d) for d in spec.input_domains) * prod(n for _, n in sites)
    if total > spec.budget:
        raise BudgetExceeded(
            f"{spec.name}: enumeration needs {total} runs, budget is {spec.budget}"
        )
    site_domains = [range(n) for _, n in sites]
    for inputs in product(*spec.input_domains):
        for assignment in product(*site_domains):
            per_party: dict[int, list] = {}
            for (party, _), value in zip(sites, assignment):
                per_party.setdefault(party, []).append(value)
            sources = {p: ScriptedSource(vals) for p, vals in per_party.items()}
            outcome, transcript = run(
                spec.protocol, spec.graph, inputs, seed=0, sources=sources, record=False
            )
            yield inputs, outcome, transcript


def secrecy_enumeration_check(spec: SecrecySpec) -> SecrecyReport:
    """Exhaustively verify one secrecy claim; exact counts, no tolerance.

    Within every group (observer's own inputs plus the ``given`` value),
    independence demands count(view, target) * total == count(view) *
    count(target) for every cell — the integer form of P(view, target) =
    P(view) P(target).  A counterexample names two target values whose
    conditional view distributions differ.
    """
    tally: dict = {}
    runs_done = 0
    for inputs, outcome, transcript in enumerate_runs(spec):
        runs_done += 1
        view = _observer_view(spec, transcript)
        key = (
            tuple(inputs[i] for i in spec.observer_inputs),
            spec.given_of(inputs, outcome),
        )
        target = spec.target_of(inputs, outcome)
        cells, view_totals, target_totals, group_total = tally.setdefault(
            key, ({}, {}, {}, [0])
        )
        vk = view.key()
        cells[(vk, target)] = cells.get((vk, target), 0) + 1
        view_totals[vk] = view_totals.get(vk, 0) + 1
        target_totals[target] = target_totals.get(target, 0) + 1
        group_total[0] += 1

    for key, (cells, view_totals, target_totals, group_total) in tally.items():
        total = group_total[0]
        if spec.claim == DETERMINED:
            by_view: dict = {}
            for (vk, target), _ in cells.items():
                by_view.setdefault(vk, set()).add(target)
            for vk, targets in by_view.items():
                if len(targets) > 1:
                    a, b = sorted(targets, key=repr)[:2]
                    return SecrecyReport(
                        spec.name, False, runs_done,
                        Counterexample(key, a, b,
                                       "one view is compatible with several target values"),
                    )
            continue
        # independence: every (view, target) cell must factorize exactly
        for vk in view_totals:
            for target in target_totals:
                c = cells.get((vk, target), 0)
                if c * total != view_totals[vk] * target_totals[target]:
                    other = next(t for t in target_totals if t != target) \
                        if len(target_totals) > 1 else target
                    return SecrecyReport(
                        spec.name, False, runs_done,
                        Counterexample(
                            key, target, other,
                            "view distribution differs between target values "
                            f"(cell count {c}, expected {view_totals[vk]}*"
                            f"{target_totals[target]}/{total})",
                        ),
                    )
        if spec.claim == INDEPENDENT_UNIFORM:
            counts = set(target_totals.values())
            if len(counts) != 1:
                a, b = sorted(target_totals, key=repr)[:2]
                return SecrecyReport(
                    spec.name, False, runs_done,
                    Counterexample(key, a, b, "target marginal is not uniform"),
                )
    return SecrecyReport(spec.name, True, runs_done)


# -- the standard claim suite -----------------------------------------------


def _sum_specs(m: int, k: int, budget: int):
    ring = ring_mod.mod_ring(m)
    proto = SecureSum(ring)
    graph = build_cycle(k)
    domains = tuple(range(m) for _ in range(k))
    specs = []
    for i in range(k):
        others = tuple(j for j in range(k) if j != i)
        specs.append(
            SecrecySpec(
                name=f"secure_sum/Z_{m}/k={k}/P{i + 1} learns only the others' total",
                protocol=proto,
                graph=graph,
                input_domains=domains,
                observer=f"P{i + 1}",
                observer_inputs=(i,),
                protected=others,
                given=lambda inputs, _o, others=others, m=m: sum(
                    inputs[j] for j in others
                ) % m,
                budget=budget,
            )
        )
    return specs


def _commit3_specs(m: int, budget: int):
    ring = ring_mod.mod_ring(m)
    proto = Commit3(ring)
    domains = (range(m), range(m), range(m))
    return [
        SecrecySpec(
            name=f"commit3/Z_{m}/P2 learns nothing about (n1,n3)",
            protocol=proto, input_domains=domains,
            observer="P2", observer_inputs=(1,), protected=(0, 2), budget=budget,
        ),
        SecrecySpec(
            name=f"commit3/Z_{m}/P1 learns only n2+n3",
            protocol=proto, input_domains=domains,
            observer="P1", observer_inputs=(0,), protected=(1, 2),
            given=lambda inputs, _o, m=m: (inputs[1] + inputs[2]) % m, budget=budget,
        ),
        SecrecySpec(
            name=f"commit3/Z_{m}/P3 learns only n1+n2",
            protocol=proto, input_domains=domains,
            observer="P3", observer_inputs=(2,), protected=(0, 1),
            given=lambda inputs, _o, m=m: (inputs[0] + inputs[1]) % m, budget=budget,
        ),
    ]


def _commit2_specs(m: int, budget: int):
    ring = ring_mod.mod_ring(m)
    proto = Commit2Dummy(ring)
    domains = (range(m), range(m))
    return [
        SecrecySpec(
            name=f"commit2_dummy/Z_{m}/D learns only n1+n2",
            protocol=proto, input_domains=domains,
            observer="D", observer_inputs=(), protected=(0, 1),
            given=lambda inputs, _o, m=m: (inputs[0] + inputs[1]) % m, budget=budget,
        ),
        SecrecySpec(
            name=f"commit2_dummy/Z_{m}/A learns nothing about n2",
            protocol=proto, input_domains=domains,
            observer="A", observer_inputs=(0,), protected=(1,), budget=budget,
        ),
        SecrecySpec(
            name=f"commit2_dummy/Z_{m}/B learns nothing about n1",
            protocol=proto, input_domains=domains,
            observer="B", observer_inputs=(1,), protected=(0,), budget=budget,
        ),
    ]


def _millionaires_spec(m: int, budget: int):
    proto = MillionairesCompare(ring_mod.mod_ring(m))
    return SecrecySpec(
        name=f"millionaires/Z_{m}/D learns only n1-n2",
        protocol=proto,
        input_domains=(range(m), range(m)),
        observer="D",
        observer_inputs=(),
        protected=(0, 1),
        given=lambda inputs, _o, m=m: (inputs[0] - inputs[1]) % m,
        budget=budget,
    )


def standard_suite(budget: int = 2_000_000):
    """The package's full set of exhaustively checkable hiding claims."""
    specs = []
    for m in (2, 3):
        for k in (3, 4):
            specs.extend(_sum_specs(m, k, budget))
    for m in (2, 3):
        specs.extend(_commit3_specs(m, budget))
    specs.extend(_commit2_specs(2, budget))
    specs.append(_millionaires_spec(11, budget))
    return specs


def suite_by_name(names=None, budget: int = 2_000_000):
    suite = standard_suite(budget)
    if names is None:
        return suite
    index = {s.name: s for s in suite}
    missing = [n for n in names if n not in index]
    if missing:
        raise ProtocolError(f"unknown secrecy checks: {missing}")
    return [index[n] for n in names]


# -- coalitions --------------------------------------------------------------


@dataclass(frozen=True)
class CoalitionReport:
    """What a contiguous coalition can determine from a sum-protocol run.

    ``learns_inputs`` lists input slots whose exact value the coalition
    pins down (always at least its own); ``learns_complement_sum`` says
    whether the sum of all non-members' inputs becomes known once the
    protocol output is public (it always does, by subtraction).
    """

    coalition: tuple
    learns_inputs: frozenset
    learns_complement_sum: bool


def coalition_closure(g: ChannelGraph, coalition, protocol: str = "secure_sum") -> CoalitionReport:
    """Closure of a contiguous coalition's knowledge for the sum protocol.

    Members pooled, they always learn each other's inputs and (given the
    public total) the sum of the others'.  Individual outsider inputs
    fall only to a coalition of k-1: gluing the members into one vertex
    reduces the run to a shorter cycle in which the remaining parties'
    noise still masks everything.  Non-contiguous coalitions are rejected:
    with only cycle channels, members not adjacent along the cycle cannot
    pool knowledge undetected.
    """
    if protocol != "secure_sum":
        raise ProtocolError(f"coalition analysis covers secure_sum, not {protocol!r}")
    cycles = secure_cycles(g)
    if len(cycles) != 1:
        raise TopologyError("coalition analysis runs on a single cycle")
    cycle = cycles[0]
    k = len(cycle)
    members = sorted(set(coalition))
    if not 0 < len(members) < k:
        raise ProtocolError("coalition must be a proper non-empty subset")
    positions = sorted(cycle.index(p) for p in members)
    n = len(positions)
    # A block is contiguous iff some start position covers it consecutively mod k.
    pos_set = set(positions)
    contiguous = any(all((s + t) % k in pos_set for t in range(n)) for s in range(k))
    if not contiguous:
        raise ProtocolError("coalition is not contiguous along the cycle")
    if n == k - 1:
        learns = frozenset(range(k))
    else:
        learns = frozenset(members)
    return CoalitionReport(tuple(members), learns, True)


# -- transcript metrics ------------------------------------------------------


@dataclass(frozen=True)
class TransmissionStats:
    """Counts extracted from a deal transcript.

    ``circles[v]`` is the number of complete circles value v made before
    being kept (complete = returned to its introducer); the final value
    is excluded since its keep is deliberately invisible.
    ``active_players[v]`` is how many players were still following their
    counters when v entered circulation; the mean-circles formula applies
    to values with full participation.
    """

    message_count: int
    total_bits: int
    players: int
    circles: dict
    keeper_of: dict
    active_players: dict

    def circle_samples(self, full_participation_only: bool = True) -> list:
        return [
            c for v, c in sorted(self.circles.items())
            if not full_participation_only or self.active_players[v] == self.players
        ]

    def mean_circles(self, full_participation_only: bool = True) -> float:
        samples = self.circle_samples(full_participation_only)
        if not samples:
            raise ProtocolError("no qualifying values in this transcript")
        return sum(samples) / len(samples)


def _payload_bits(payload) -> int:
    if isinstance(payload, tuple):
        return sum(_payload_bits(p) for p in payload)
    if isinstance(payload, int):
        if payload < 0:
            raise ProtocolError("bit accounting expects non-negative payloads")
        return (payload + 1).bit_length()  # = ceil(log2(payload + 2))
    raise ProtocolError(f"bit accounting cannot size payload {payload!r}")


def transmission_stats(t: Transcript) -> TransmissionStats:
    """Message counts, bit totals, and per-value circle counts for a deal."""
    if t.protocol != "card_deal":
        raise ProtocolError(f"transmission stats need a card_deal transcript, got {t.protocol!r}")
    params = t.params
    r, k = int(params["r"]), int(params["k"])
    quotas = params.get("quotas")
    if quotas is None:
        base, extra = divmod(r, k)
        quotas = [base] * k
        if extra:
            lottery = [m.payload for m in t.messages if m.label == "quota lottery value"
                       and m.to == "*"]
            if len(lottery) != 1:
                raise ProtocolError("cannot recover quotas: no lottery broadcast found")
            v = int(lottery[0])
            for step in range(extra):
                quotas[(v + step) % k] += 1
    quotas = [int(q) for q in quotas]

    total_bits = sum(_payload_bits(m.payload) for m in t.messages)
    tokens = [(m.frm, int(m.payload)) for m in t.messages if m.kind == "token"
              and m.label == "token"]
    hops: dict[int, int] = {}
    first_sender: dict[int, str] = {}
    for frm, v in tokens:
        hops[v] = hops.get(v, 0) + 1
        first_sender.setdefault(v, frm)
    keeper_of = {v: first_sender[v + 1] for v in range(r) if v + 1 in first_sender}
    circles = {v: -(-hops[v] // k) - 1 for v in range(r) if v in hops}

    names = [p["name"] for p in t.topology["parties"]]
    kept_count = {name: 0 for name in names}
    active_players = {0: k}
    for v in range(1, r):
        if v - 1 >= 1 and (v - 1) in keeper_of:
            kept_count[keeper_of[v - 1]] += 1
        active_players[v] = sum(
            1 for i, name in enumerate(names) if kept_count[name] < quotas[i]
        )
    return TransmissionStats(
        len(t.messages), total_bits, k, circles, keeper_of, active_players
    )
