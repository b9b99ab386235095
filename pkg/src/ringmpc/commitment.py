"""Three-party commitment, its two-party dummy reduction, and dummy OT.

Commitment here is a two-phase protocol.  In the commit phase each value
is split into two random summands which accumulate around the secure
cycle in opposite directions, leaving every party with sums that reveal
nothing beyond what the scheme admits (e.g. the first party can form
n2+n3, and only that).  In the reveal phase every transmitted quantity
is something some *other* party already committed to, so each message is
corroborated against committed-phase holdings; any mismatch raises
``CheatDetected`` naming the message.

The corroboration checks are listed explicitly in ``COMMIT3_CHECKS`` /
``COMMIT2_CHECKS``: they are the protocol's verification table, and the
binding test suite injects a substitution at every reveal message to
confirm each one is caught.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import ring as ring_mod
from .engine import Protocol, Run, run
from .errors import CheatDetected, PhaseError, ProtocolError, TopologyError
from .ring import RingSpec
from .topology import SECURE, build_cycle, dummy_triangle

COMMITTED = "committed"
REVEALED = "revealed"

BIT = "bit"
INTEGER = "integer"


@dataclass(frozen=True)
class CommitSplit:
    """One committed value split as committed = r + s (mod m)."""

    r: int
    s: int
    committed: int


def split_value(n: int, m: int, mode: str = INTEGER, rng=None) -> CommitSplit:
    """Randomly split n into r + s mod m; r is uniform.

    In bit mode (m = 2, n in {0,1}) this yields exactly the two-way
    splits 0 = 0+0 = 1+1 and 1 = 0+1 = 1+0, each with probability 1/2.
    """
    if mode == BIT:
        if m != 2 or n not in (0, 1):
            raise ProtocolError("bit mode needs m = 2 and n in {0, 1}")
    elif mode != INTEGER:
        raise ProtocolError(f"unknown split mode {mode!r}")
    if rng is None:
        import random as _random

        rng = _random.Random()
    R = ring_mod.mod_ring(m)
    r = R.sample_noise(rng)
    return CommitSplit(r, R.sub(n, r), R.normalize(n))


@dataclass
class CommitmentLedger:
    """What one party holds after the commit phase: role-labelled values."""

    party: str
    holdings: dict = field(default_factory=dict)
    phase: str = COMMITTED

    def __getitem__(self, label):
        return self.holdings[label]


# Verification table for the 3-party reveal phase.  Each reveal message
# is checked against the committed-phase holdings of the parties that can
# corroborate it; the pair check for "n1+n2" uses both owners' values.
COMMIT3_CHECKS = [
    ("n1+n2 to P1", "both copies of n1+n2 must agree (P1 and P2 compare)"),
    ("n1+n2 to P2", "value must equal P1's n1 plus P2's n2"),
    ("r1 reveal", "P1 corroborates against the r1 it generated"),
    ("s2+s3 reveal", "P2 corroborates against its committed s2 and s3"),
    ("r1+r2+r3 reveal", "P3 corroborates against its committed r1+r2 and r3"),
]


class Commit3(Protocol):
    """Commit phase of the 3-party scheme over Z_m."""

    name = "commit3"

    def __init__(self, ring: RingSpec):
        if not ring.modular:
            raise ProtocolError("commitment runs modulo a fixed m >= 2")
        super().__init__(ring)

    def default_graph(self):
        return build_cycle(3)

    def program(self, run: Run):
        R = self.ring
        if len(run.inputs) != 3:
            raise ProtocolError("commit3 takes exactly three values")
        n = [R.normalize(v) for v in run.inputs]
        r = []
        s = []
        for i in range(3):
            run.note(i, f"n{i + 1}", n[i])
            r.append(run.noise(i, f"r{i + 1}"))
            s.append(R.sub(n[i], r[i]))
            run.note(i, f"s{i + 1}", s[i])
        # r-direction: P1 -> P2 -> P3 -> P1, accumulating.
        run.send(0, 1, r[0], "r1")
        run.send(1, 2, R.add(r[0], r[1]), "r1+r2")
        run.send(2, 0, R.add(R.add(r[0], r[1]), r[2]), "r1+r2+r3")
        # s-direction: P3 -> P2 -> P1 -> P3, accumulating the other way.
        run.send(2, 1, s[2], "s3")
        run.send(1, 0, R.add(s[1], s[2]), "s2+s3")
        run.send(0, 2, R.add(R.add(s[0], s[1]), s[2]), "s1+s2+s3")
        ledgers = {
            "P1": CommitmentLedger(
                "P1",
                {
                    "s1": s[0],
                    "s2+s3": R.add(s[1], s[2]),
                    "r1": r[0],
                    "r1+r2+r3": R.add(R.add(r[0], r[1]), r[2]),
                },
            ),
            "P2": CommitmentLedger(
                "P2", {"s2": s[1], "s3": s[2], "r1": r[0], "r2": r[1]}
            ),
            "P3": CommitmentLedger(
                "P3",
                {
                    "s3": s[2],
                    "r3": r[2],
                    "r1+r2": R.add(r[0], r[1]),
                    "s1+s2+s3": R.add(R.add(s[0], s[1]), s[2]),
                },
            ),
        }
        return ledgers


@dataclass
class Commit3Session:
    """Open commitment: ledgers plus the live run, awaiting the reveal phase."""

    ring: RingSpec
    values: tuple
    ledgers: dict
    run: Run
    phase: str = COMMITTED

    @property
    def transcript(self):
        return self.run.transcript()


def commit3(values, m=None, seed=0, ring=None, sources=None) -> Commit3Session:
    """Commit three values; returns the session used to decommit later."""
    R = ring if ring is not None else ring_mod.mod_ring(m if m is not None else 2)
    proto = Commit3(R)
    g = proto.default_graph()
    proto.check_graph(g)
    r = Run(proto, g, tuple(values), seed, sources=sources)
    ledgers = proto.program(r)
    return Commit3Session(R, tuple(R.normalize(v) for v in values), ledgers, r)


def decommit3(session: Commit3Session, tamper: dict | None = None):
    """Reveal phase: every party recovers both other values, with corroboration.

    ``tamper`` optionally substitutes reveal-message payloads by label
    (fault injection for binding tests).  Any corroboration failure
    raises CheatDetected naming the message; on success returns the
    per-party recovered triples.
    """
    if session.phase != COMMITTED:
        raise PhaseError(f"decommit3 requires phase {COMMITTED!r}, session is {session.phase!r}")
    R = session.ring
    r = session.run
    led = session.ledgers
    tamper = tamper or {}

    def value_of(label, honest):
        return R.normalize(tamper[label]) if label in tamper else honest

    n1, n2, n3 = session.values
    # P3 forms n1+n2 from its committed sums and sends it to both peers.
    honest_n1n2 = R.add(led["P3"]["r1+r2"], R.sub(led["P3"]["s1+s2+s3"], led["P3"]["s3"]))
    v_a = value_of("n1+n2 to P1", honest_n1n2)
    v_b = value_of("n1+n2 to P2", honest_n1n2)
    r.send(2, 0, v_a, "n1+n2 to P1")
    r.send(2, 1, v_b, "n1+n2 to P2")
    if v_a != v_b:
        raise CheatDetected("n1+n2", "the two announced copies disagree")
    if v_a != R.add(n1, n2):
        raise CheatDetected("n1+n2", "announced sum fails the owners' corroboration")
    p1_n2 = R.sub(v_a, n1)
    p1_n3 = R.sub(
        R.add(R.sub(led["P1"]["r1+r2+r3"], led["P1"]["r1"]), led["P1"]["s2+s3"]), p1_n2
    )
    p2_n1 = R.sub(v_b, n2)
    # P2 reveals r1 to P3, corroborated by P1 who generated it.
    w = value_of("r1 reveal", led["P2"]["r1"])
    r.send(1, 2, w, "r1 reveal")
    if w != led["P1"]["r1"]:
        raise CheatDetected("r1 reveal", "does not match P1's committed r1")
    p3_r2 = R.sub(led["P3"]["r1+r2"], w)
    # P1 reveals s2+s3 to P3, corroborated by P2 who committed both parts.
    x = value_of("s2+s3 reveal", led["P1"]["s2+s3"])
    r.send(0, 2, x, "s2+s3 reveal")
    if x != R.add(led["P2"]["s2"], led["P2"]["s3"]):
        raise CheatDetected("s2+s3 reveal", "does not match P2's committed s2+s3")
    p3_n2 = R.add(p3_r2, R.sub(x, led["P3"]["s3"]))
    p3_n1 = R.sub(v_a, p3_n2)
    # P1 reveals r1+r2+r3 to P2, corroborated by P3.
    y = value_of("r1+r2+r3 reveal", led["P1"]["r1+r2+r3"])
    r.send(0, 1, y, "r1+r2+r3 reveal")
    if y != R.add(led["P3"]["r1+r2"], led["P3"]["r3"]):
        raise CheatDetected("r1+r2+r3 reveal", "does not match P3's committed r-chain")
    p2_r3 = R.sub(R.sub(y, led["P2"]["r1"]), led["P2"]["r2"])
    p2_n3 = R.add(p2_r3, led["P2"]["s3"])
    session.phase = REVEALED
    for ledger in led.values():
        ledger.phase = REVEALED
    recovered = {
        "P1": (n1, p1_n2, p1_n3),
        "P2": (p2_n1, n2, p2_n3),
        "P3": (p3_n1, p3_n2, n3),
    }
    for name, triple in recovered.items():
        r.note(r.graph.party(name).index, "recovered values", triple)
    return recovered


@dataclass
class CommitKSession:
    """Experimental k-party commitment state (see ``commit_k``)."""

    ring: RingSpec
    values: tuple
    r_parts: tuple
    s_parts: tuple
    run: Run
    phase: str = COMMITTED

    @property
    def transcript(self):
        return self.run.transcript()


def commit_k(values, m=None, seed=0, ring=None, sources=None) -> CommitKSession:
    """Experimental: the natural k-cycle extension of the 3-party commitment.

    r-shares accumulate forward around the cycle, s-shares backward, so
    after the commit phase a middle party holds only one masked prefix
    and one masked suffix (nothing about anyone's value), while the two
    end parties can form the sum of all other values and nothing finer.
    Not part of the acceptance surface.
    """
    R = ring if ring is not None else ring_mod.mod_ring(m if m is not None else 2)
    if not R.modular:
        raise ProtocolError("commitment runs modulo a fixed m >= 2")
    k = len(values)
    if k < 3:
        raise ProtocolError("the cycle commitment needs k >= 3 parties")

    class _CommitK(Protocol):
        name = "commit_k"

        def default_graph(self):
            return build_cycle(k)

        def program(self, run: Run):
            n = [R.normalize(v) for v in run.inputs]
            r = []
            s = []
            for i in range(k):
                run.note(i, f"n{i + 1}", n[i])
                r.append(run.noise(i, f"r{i + 1}"))
                s.append(R.sub(n[i], r[i]))
                run.note(i, f"s{i + 1}", s[i])
            acc = 0
            for i in range(k - 1):
                acc = R.add(acc, r[i])
                run.send(i, i + 1, acc, f"r prefix {i + 1}")
            acc = R.add(acc, r[k - 1])
            run.send(k - 1, 0, acc, f"r prefix {k}")
            acc = 0
            for i in range(k - 1, 0, -1):
                acc = R.add(acc, s[i])
                run.send(i, i - 1, acc, f"s suffix {i + 1}")
            acc = R.add(acc, s[0])
            run.send(0, k - 1, acc, "s suffix 1")
            return tuple(r), tuple(s)

    proto = _CommitK(R)
    g = proto.default_graph()
    proto.check_graph(g)
    r = Run(proto, g, tuple(values), seed, sources=sources)
    r_parts, s_parts = proto.program(r)
    return CommitKSession(R, tuple(R.normalize(v) for v in values), r_parts, s_parts, r)


def decommit_k(session: CommitKSession, tamper: dict | None = None):
    """Experimental reveal for ``commit_k``.

    Every committed prefix and suffix is re-announced by its commit-phase
    receiver and checked against its commit-phase sender's value, so a
    single cheater cannot substitute anything silently; the share chain
    then opens every value to every party.
    """
    if session.phase != COMMITTED:
        raise PhaseError(f"decommit_k requires phase {COMMITTED!r}")
    R = session.ring
    run = session.run
    k = len(session.values)
    tamper = tamper or {}
    r, s = session.r_parts, session.s_parts
    r_prefix = []
    acc = 0
    for i in range(k):
        acc = R.add(acc, r[i])
        r_prefix.append(acc)
    s_suffix = [None] * k  # s_suffix[i] = s_{i+1} + ... + s_k  (1-based tail)
    acc = 0
    for i in range(k - 1, -1, -1):
        acc = R.add(acc, s[i])
        s_suffix[i] = acc
    # commit-phase receivers re-announce; commit-phase senders corroborate
    announced_r = []
    for j in range(1, k + 1):
        label = f"r prefix {j} reveal"
        value = R.normalize(tamper.get(label, r_prefix[j - 1]))
        run.broadcast(j % k, value, label)  # prefix j was received by P_{j+1}
        if value != r_prefix[j - 1]:
            raise CheatDetected(label, "does not match the committed prefix")
        announced_r.append(value)
    announced_s = [None] * k
    for j in range(k, 0, -1):
        label = f"s suffix {j} reveal"
        value = R.normalize(tamper.get(label, s_suffix[j - 1]))
        run.broadcast((j - 2) % k, value, label)  # suffix j was received by P_{j-1}
        if value != s_suffix[j - 1]:
            raise CheatDetected(label, "does not match the committed suffix")
        announced_s[j - 1] = value
    session.phase = REVEALED
    recovered = []
    for i in range(k):
        r_i = R.sub(announced_r[i], announced_r[i - 1] if i > 0 else 0)
        s_i = R.sub(announced_s[i], announced_s[i + 1] if i < k - 1 else 0)
        recovered.append(R.add(r_i, s_i))
    return tuple(recovered)


COMMIT2_CHECKS = [
    ("n1+n2 to A", "both revealed copies must agree (A and B compare)"),
    ("n1+n2 to B", "value must equal A's n1 plus B's n2"),
]


class Commit2Dummy(Protocol):
    """Commit phase of the two-party scheme mediated by a dummy.

    The dummy only ever holds r1+r2 and s1+s2, whose sum it reveals; it
    never sees n1 or n2 individually and draws no randomness.
    """

    name = "commit2_dummy"

    def __init__(self, ring: RingSpec):
        if not ring.modular:
            raise ProtocolError("commitment runs modulo a fixed m >= 2")
        super().__init__(ring)

    def default_graph(self):
        return dummy_triangle()

    def check_graph(self, g):
        if g.k != 3:
            raise TopologyError("commit2_dummy runs between A, B and a dummy")
        for i, j in ((0, 1), (0, 2), (1, 2)):
            if not (g.has_edge(i, j) and g.security(i, j) == SECURE):
                raise TopologyError(f"commit2_dummy needs a secure link between parties {i} and {j}")

    def program(self, run: Run):
        R = self.ring
        if len(run.inputs) != 2:
            raise ProtocolError("commit2_dummy takes exactly two values")
        n1, n2 = (R.normalize(v) for v in run.inputs)
        run.note(0, "n1", n1)
        run.note(1, "n2", n2)
        r1 = run.noise(0, "r1")
        s1 = R.sub(n1, r1)
        run.note(0, "s1", s1)
        r2 = run.noise(1, "r2")
        s2 = R.sub(n2, r2)
        run.note(1, "s2", s2)
        run.send(0, 1, s1, "s1")
        run.send(1, 0, r2, "r2")
        run.send(0, 2, R.add(r1, r2), "r1+r2")
        run.send(1, 2, R.add(s1, s2), "s1+s2")
        return {
            "A": CommitmentLedger("A", {"n1": n1, "r1": r1, "s1": s1, "r2": r2}),
            "B": CommitmentLedger("B", {"n2": n2, "r2": r2, "s2": s2, "s1": s1}),
            "D": CommitmentLedger("D", {"r1+r2": R.add(r1, r2), "s1+s2": R.add(s1, s2)}),
        }


@dataclass
class Commit2Session:
    ring: RingSpec
    values: tuple
    ledgers: dict
    run: Run
    phase: str = COMMITTED

    @property
    def transcript(self):
        return self.run.transcript()


def commit2_dummy(n1, n2, m=None, seed=0, ring=None, sources=None) -> Commit2Session:
    R = ring if ring is not None else ring_mod.mod_ring(m if m is not None else 2)
    proto = Commit2Dummy(R)
    g = proto.default_graph()
    proto.check_graph(g)
    r = Run(proto, g, (n1, n2), seed, sources=sources)
    ledgers = proto.program(r)
    return Commit2Session(R, tuple(R.normalize(v) for v in (n1, n2)), ledgers, r)


def decommit2_dummy(session: Commit2Session, tamper: dict | None = None):
    """The dummy reveals n1+n2 to both parties; each recovers the other's value."""
    if session.phase != COMMITTED:
        raise PhaseError(f"decommit2 requires phase {COMMITTED!r}, session is {session.phase!r}")
    R = session.ring
    r = session.run
    led = session.ledgers
    tamper = tamper or {}
    honest = R.add(led["D"]["r1+r2"], led["D"]["s1+s2"])
    v_a = R.normalize(tamper.get("n1+n2 to A", honest))
    v_b = R.normalize(tamper.get("n1+n2 to B", honest))
    r.send(2, 0, v_a, "n1+n2 to A")
    r.send(2, 1, v_b, "n1+n2 to B")
    if v_a != v_b:
        raise CheatDetected("n1+n2", "the two revealed copies disagree")
    n1, n2 = session.values
    if v_a != R.add(n1, n2):
        raise CheatDetected("n1+n2", "revealed sum fails the owners' corroboration")
    a_learns = R.sub(v_a, n1)
    b_learns = R.sub(v_b, n2)
    r.note(0, "recovered n2", a_learns)
    r.note(1, "recovered n1", b_learns)
    session.phase = REVEALED
    for ledger in led.values():
        ledger.phase = REVEALED
    return a_learns, b_learns


@dataclass(frozen=True)
class OTOutcome:
    retrieved: tuple
    indices: tuple


class ObliviousTransfer(Protocol):
    """k-of-n transfer: A splits every message, D serves the masked halves.

    After the two setup transmissions A receives nothing, so A cannot
    learn which indices were requested; D sees the index set but only
    the r-halves of the messages, which are uniform masks of them.
    """

    name = "ot_dummy"

    def __init__(self, ring: RingSpec):
        super().__init__(ring)

    def default_graph(self):
        return dummy_triangle()

    check_graph = Commit2Dummy.check_graph

    def program(self, run: Run):
        R = self.ring
        messages, indices = run.inputs
        messages = tuple(R.normalize(v) for v in messages)
        indices = tuple(indices)
        n = len(messages)
        if not indices or len(set(indices)) != len(indices):
            raise ProtocolError("indices must be distinct and non-empty")
        if any(not 1 <= j <= n for j in indices):
            raise ProtocolError(f"indices must lie in 1..{n}")
        run.note(0, "messages", messages)
        run.note(1, "indices", indices)
        r_parts = []
        s_parts = []
        for i, m in enumerate(messages):
            r = run.noise(0, f"r{i + 1}")
            r_parts.append(r)
            s_parts.append(R.sub(m, r))
        run.send(0, 2, list(r_parts), "r parts", kind="elems")
        run.send(0, 1, list(s_parts), "s parts", kind="elems")
        run.send(1, 2, list(indices), "requested indices", kind="indices")
        served = [r_parts[j - 1] for j in indices]
        run.send(2, 1, served, "served r parts", kind="elems")
        retrieved = tuple(R.add(served[t], s_parts[j - 1]) for t, j in enumerate(indices))
        run.note(1, "retrieved", retrieved)
        return OTOutcome(retrieved, indices)


def ot_dummy(messages, indices, seed=0, ring=None):
    """Retrieve messages[j-1] for each requested index j via the dummy."""
    R = ring if ring is not None else ring_mod.integers()
    outcome, _ = run(ObliviousTransfer(R), None, (tuple(messages), tuple(indices)), seed)
    return outcome.retrieved
