"""Cycle protocols for sums, products, power sums, and comparisons.

All of these follow the same masking idea: the value travelling around
the cycle always carries at least one random term known only to one
party, so no partial aggregate is ever exposed.  Additive protocols mask
with added noise, the product protocol with unit factors (so the mask
can be divided out exactly), and the comparison protocols split each
private value into a random difference before anything is transmitted.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import ring as ring_mod
from .engine import Protocol, Run, run
from .errors import ProtocolError, RingError, TopologyError
from .ring import RingSpec
from .topology import (
    ChannelGraph,
    INSECURE,
    Party,
    SECURE,
    build_cycle,
    default_parties,
    dummy_triangle,
    secure_cycles,
    validate_topology,
)


def _cycles_or_raise(name, g):
    try:
        return secure_cycles(g)
    except TopologyError as e:
        raise TopologyError(f"{name}: {e}") from None


class SecureSum(Protocol):
    """Noised forward pass, publication of the masked total, then unmasking.

    Works on any disjoint union of secure cycles covering all parties;
    each cycle publishes its own subtotal and the outcome is their sum.
    """

    name = "secure_sum"

    def default_graph(self):
        raise TopologyError("secure_sum needs an explicit cycle graph")

    def program(self, run: Run):
        R = self.ring
        values = [R.normalize(v) for v in run.inputs]
        for i, v in enumerate(values):
            run.note(i, f"n{i + 1}", v)
        total = 0
        for cycle in _cycles_or_raise(self.name, run.graph):
            total = R.add(total, self._one_cycle(run, cycle, values))
        return total

    def _one_cycle(self, run: Run, cycle, values):
        R = self.ring
        k = len(cycle)
        noises = {}
        first = cycle[0]
        # Forward pass: each party adds its value plus fresh noise.
        noises[first] = run.noise(first, f"n0{first + 1}")
        m = R.add(values[first], noises[first])
        run.send(first, cycle[1], m, "masked partial sum")
        for pos in range(1, k):
            p = cycle[pos]
            noises[p] = run.noise(p, f"n0{p + 1}")
            m = R.add(m, R.add(values[p], noises[p]))
            run.send(p, cycle[(pos + 1) % k], m, "masked partial sum")
        # The initiator subtracts its own noise and publishes.
        masked_total = R.sub(m, noises[first])
        run.broadcast(first, masked_total, "masked total")
        # Everyone else broadcasts their noise; all unmask.
        noise_sum = 0
        for p in cycle[1:]:
            run.broadcast(p, noises[p], f"noise n0{p + 1}")
            noise_sum = R.add(noise_sum, noises[p])
        return R.sub(masked_total, noise_sum)


class SecureRating(Protocol):
    """Sum collection for an untrusted aggregator over insecure links.

    The parties run the noised forward pass, hand the fully masked total
    to the aggregator, then collect the noise total in the opposite
    direction and hand that over too; only the difference, the true sum,
    is ever computable by the aggregator or by a wiretapper.
    """

    name = "secure_rating"

    def __init__(self, ring: RingSpec, k: int):
        super().__init__(ring)
        self.k = k

    def params(self):
        return {"k": self.k}

    def default_graph(self):
        return rating_graph(self.k)

    def check_graph(self, g):
        k = self.k
        if g.k != k + 1:
            raise TopologyError(f"secure_rating with k={k} needs {k + 1} parties (incl. the aggregator)")
        ok = validate_topology(_subgraph_without(g, k))
        if not ok:
            raise TopologyError(f"secure_rating: {ok.reason}")
        if len(secure_cycles(_subgraph_without(g, k))) != 1:
            raise TopologyError("secure_rating needs a single cycle of parties")
        for endpoint in (0, k - 1):
            if not g.has_edge(endpoint, k):
                raise TopologyError(f"secure_rating: aggregator unreachable from party {endpoint}")

    def program(self, run: Run):
        R = self.ring
        k = self.k
        boss = k
        values = [R.normalize(v) for v in run.inputs]
        for i, v in enumerate(values):
            run.note(i, f"n{i + 1}", v)
        noises = []
        # Forward pass, every party masking with private noise.
        m = 0
        for i in range(k):
            noises.append(run.noise(i, f"n0{i + 1}"))
            m = R.add(m, R.add(values[i], noises[i]))
            if i < k - 1:
                run.send(i, i + 1, m, "masked partial sum")
        run.send(k - 1, boss, m, "masked grand total")
        # Reverse adjustment pass collecting the noise total.
        adj = noises[k - 1]
        run.send(k - 1, k - 2, adj, "noise adjustment")
        for i in range(k - 2, 0, -1):
            adj = R.add(adj, noises[i])
            run.send(i, i - 1, adj, "noise adjustment")
        adj = R.add(adj, noises[0])
        run.send(0, boss, adj, "noise total")
        result = R.sub(m, adj)
        run.note(boss, "aggregated total", result)
        return result


def rating_graph(k: int) -> ChannelGraph:
    """Secure cycle of k parties plus an aggregator on insecure spokes."""
    if k < 3:
        raise TopologyError("rating needs k >= 3 parties")
    parties = default_parties(k) + [Party(k, "B")]
    edges = [(i, (i + 1) % k, SECURE) for i in range(k)]
    edges += [(k - 1, k, INSECURE), (0, k, INSECURE)]
    return ChannelGraph(parties, edges)


def _subgraph_without(g: ChannelGraph, drop: int) -> ChannelGraph:
    parties = [p for p in g.parties if p.index != drop]
    edges = [(i, j, sec) for i, j, sec in g.edges() if drop not in (i, j)]
    return ChannelGraph(parties, edges)


class SecureProduct(Protocol):
    """Multiplicative analogue of the sum: masks are units so they divide out."""

    name = "secure_product"

    def program(self, run: Run):
        R = self.ring
        values = [R.normalize(v) for v in run.inputs]
        for i, v in enumerate(values):
            if not R.is_unit(v):
                raise RingError(
                    f"input {v} of party {i + 1} is not a legal factor in {R}; "
                    "the product protocol needs units (nonzero over Z)"
                )
            run.note(i, f"n{i + 1}", v)
        total = 1
        for cycle in _cycles_or_raise(self.name, run.graph):
            total = R.mul(total, self._one_cycle(run, cycle, values))
        return total

    def _one_cycle(self, run: Run, cycle, values):
        R = self.ring
        k = len(cycle)
        noises = {}
        first = cycle[0]
        noises[first] = run.noise(first, f"n0{first + 1}", require_unit=True)
        m = R.mul(values[first], noises[first])
        run.send(first, cycle[1], m, "masked partial product")
        for pos in range(1, k):
            p = cycle[pos]
            noises[p] = run.noise(p, f"n0{p + 1}", require_unit=True)
            m = R.mul(m, R.mul(values[p], noises[p]))
            run.send(p, cycle[(pos + 1) % k], m, "masked partial product")
        masked_total = R.exact_div(m, noises[first])
        run.broadcast(first, masked_total, "masked product")
        noise_prod = 1
        for p in cycle[1:]:
            run.broadcast(p, noises[p], f"noise n0{p + 1}")
            noise_prod = R.mul(noise_prod, noises[p])
        return R.exact_div(masked_total, noise_prod)


class SumOfPowers(Protocol):
    """Sum of r-th powers behind a single random mask held by the initiator."""

    name = "sum_of_powers"

    def __init__(self, ring: RingSpec, exponent: int):
        if exponent < 1:
            raise ProtocolError("exponent must be >= 1")
        super().__init__(ring)
        self.exponent = exponent

    def params(self):
        return {"exponent": self.exponent}

    def program(self, run: Run):
        R = self.ring
        r = self.exponent
        cycles = _cycles_or_raise(self.name, run.graph)
        if len(cycles) != 1:
            raise TopologyError("sum_of_powers runs on a single cycle")
        cycle = cycles[0]
        values = [R.normalize(v) for v in run.inputs]
        for i, v in enumerate(values):
            run.note(i, f"n{i + 1}", v)
        first = cycle[0]
        mask = run.noise(first, "mask n0")
        m = mask
        run.send(first, cycle[1], m, "masked power sum")
        for pos in range(1, len(cycle)):
            p = cycle[pos]
            m = R.add(m, R.pow(values[p], r))
            run.send(p, cycle[(pos + 1) % len(cycle)], m, "masked power sum")
        # The initiator removes the mask and contributes its own power.
        total = R.sub(m, R.sub(mask, R.pow(values[first], r)))
        run.broadcast(first, total, "power sum total")
        return total


def symmetric_from_power_sums(power_sums, ring: RingSpec | None = None):
    """Elementary symmetric values e_1..e_k from power sums p_1..p_k.

    Inverts the Newton recurrence j*e_j = sum_{i=1..j} (-1)^(i-1) e_{j-i} p_i.
    Over a modular ring every j in 1..k must be invertible; over Z every
    division must come out exact, anything else is rejected rather than
    rounded.  Composing this with the power-sum protocol yields any
    symmetric polynomial of the private inputs, but note the composition
    is not private: a party holding several power sums may be able to
    reconstruct individual inputs (though not their owners).
    """
    R = ring if ring is not None else ring_mod.integers()
    p = [R.normalize(v) for v in power_sums]
    k = len(p)
    if R.modular:
        for j in range(1, k + 1):
            if not R.is_unit(j % R.modulus):
                raise RingError(f"{j} is not invertible in {R}; cannot solve the recurrence")
    e = [R.normalize(1)]
    for j in range(1, k + 1):
        acc = 0
        for i in range(1, j + 1):
            term = R.mul(e[j - i], p[i - 1])
            acc = R.add(acc, term) if i % 2 == 1 else R.sub(acc, term)
        e.append(R.exact_div(acc, R.normalize(j)))
    return tuple(e[1:])


class ExampleF1(Protocol):
    """f(n1,n2,n3) = n1*n2 + n2*n3 on a 3-cycle without forming either product.

    The middle party circulates a mask, receives back mask + n3 + n1,
    strips the mask and multiplies by its own n2; the products exist only
    inside that final local step.
    """

    name = "example_f1"

    def default_graph(self):
        return build_cycle(3)

    def program(self, run: Run):
        R = self.ring
        if len(run.inputs) != 3:
            raise ProtocolError("example_f1 takes exactly three inputs")
        n1, n2, n3 = (R.normalize(v) for v in run.inputs)
        for i, v in enumerate((n1, n2, n3)):
            run.note(i, f"n{i + 1}", v)
        mask = run.noise(1, "mask n0")
        run.send(1, 2, mask, "mask")
        m = R.add(n3, mask)
        run.send(2, 0, m, "mask+n3")
        m = R.add(m, n1)
        run.send(0, 1, m, "mask+n3+n1")
        result = R.mul(R.sub(m, mask), n2)
        run.note(1, "f result", result)
        return result


class ExampleF2(Protocol):
    """f(n1,n2,n3) = n1*n2 + g(n3): multiplicative masking, two directions.

    Both masks are sampled invertible so the two exact divisions always
    succeed.  ``g_name`` tags the function for transcript metadata.
    """

    name = "example_f2"

    def __init__(self, ring: RingSpec, g_func, g_name: str = "custom"):
        super().__init__(ring)
        self.g_func = g_func
        self.g_name = g_name

    def params(self):
        return {"g": self.g_name}

    def default_graph(self):
        return build_cycle(3)

    def program(self, run: Run):
        R = self.ring
        if len(run.inputs) != 3:
            raise ProtocolError("example_f2 takes exactly three inputs")
        n1, n2, n3 = (R.normalize(v) for v in run.inputs)
        for i, v in enumerate((n1, n2, n3)):
            run.note(i, f"n{i + 1}", v)
        a0 = run.noise(0, "mask a0", require_unit=True)
        run.send(0, 1, a0, "mask a0")
        m = R.mul(a0, n2)
        run.send(1, 2, m, "a0*n2")
        c0 = run.noise(2, "mask c0", require_unit=True)
        m = R.mul(m, c0)
        run.send(2, 0, m, "a0*n2*c0")
        m = R.exact_div(R.mul(m, n1), a0)
        run.send(0, 2, m, "n1*n2*c0")  # reverse direction along the cycle
        result = R.add(R.exact_div(m, c0), R.normalize(self.g_func(n3)))
        run.note(2, "f result", result)
        return result


POSITIVE = "positive"
NEGATIVE = "negative"
EQUAL = "equal"


@dataclass(frozen=True)
class CompareOutcome:
    verdict: str
    difference_holder: str = "D"


class MillionairesCompare(Protocol):
    """Sign of n1 - n2 via a dummy that sees only the difference.

    Each real party splits its value into a random difference and hands
    the negative half to the other; the dummy receives the two cross
    sums, whose difference is exactly n1 - n2, and announces its sign.
    Over a modular ring the difference is decoded from the centered
    representative, so inputs must satisfy |n1 - n2| <= (m-1)//2.
    """

    name = "millionaires_compare"

    def default_graph(self):
        return dummy_triangle()

    def check_graph(self, g):
        if g.k != 3:
            raise TopologyError("millionaires runs between A, B and a dummy")
        for i, j in ((0, 1), (0, 2), (1, 2)):
            if not (g.has_edge(i, j) and g.security(i, j) == SECURE):
                raise TopologyError(f"millionaires needs a secure link between parties {i} and {j}")

    def program(self, run: Run):
        R = self.ring
        if R.modular and R.modulus < 3:
            raise RingError("sign decoding needs a modulus >= 3")
        n1, n2 = (R.normalize(v) for v in run.inputs)
        run.note(0, "n1", n1)
        run.note(1, "n2", n2)
        # Random difference splits: n = plus - minus.
        minus1 = run.noise(0, "n1 minus part")
        plus1 = R.add(n1, minus1)
        run.note(0, "n1 plus part", plus1)
        minus2 = run.noise(1, "n2 minus part")
        plus2 = R.add(n2, minus2)
        run.note(1, "n2 plus part", plus2)
        run.send(0, 1, minus1, "n1 minus part")
        run.send(1, 0, minus2, "n2 minus part")
        run.send(0, 2, R.add(plus1, minus2), "cross sum A")
        run.send(1, 2, R.add(plus2, minus1), "cross sum B")
        diff = R.sub(R.add(plus1, minus2), R.add(plus2, minus1))
        run.note(2, "difference", diff)
        verdict = _sign_verdict(R, diff)
        run.broadcast(2, verdict, "verdict", kind="token")
        return CompareOutcome(verdict)


def _sign_verdict(R: RingSpec, diff: int) -> str:
    if R.modular:
        centered = diff if diff <= (R.modulus - 1) // 2 else diff - R.modulus
    else:
        centered = diff
    if centered > 0:
        return POSITIVE
    if centered < 0:
        return NEGATIVE
    return EQUAL


GREATER = "greater"
LESS = "less"


@dataclass(frozen=True)
class BitwiseOutcome:
    verdict: str  # "greater" | "less" | "equal"
    decided_bit: int | None  # bit position (0 = least significant), None if equal


class MillionairesBitwise(Protocol):
    """Most-significant-bit-first comparison; stops at the first unequal bit.

    Each round compares one bit pair with the difference-split scheme
    over Z_3 (bit differences live in {-1,0,1}), so the dummy learns the
    deciding bit position but never the magnitude of n1 - n2.
    """

    name = "millionaires_bitwise"

    def __init__(self, bit_width: int):
        if bit_width < 1:
            raise ProtocolError("bit_width must be >= 1")
        super().__init__(ring_mod.mod_ring(3))
        self.bit_width = bit_width

    def params(self):
        return {"bit_width": self.bit_width}

    def default_graph(self):
        return dummy_triangle()

    check_graph = MillionairesCompare.check_graph

    def program(self, run: Run):
        R = self.ring
        n1, n2 = run.inputs
        if not (0 <= n1 < 2**self.bit_width and 0 <= n2 < 2**self.bit_width):
            raise ProtocolError(f"inputs must fit in {self.bit_width} bits")
        run.note(0, "n1", n1)
        run.note(1, "n2", n2)
        for bit in range(self.bit_width - 1, -1, -1):
            b1 = (n1 >> bit) & 1
            b2 = (n2 >> bit) & 1
            minus1 = run.noise(0, f"bit {bit} minus part A")
            minus2 = run.noise(1, f"bit {bit} minus part B")
            plus1 = R.add(b1, minus1)
            plus2 = R.add(b2, minus2)
            run.send(0, 1, minus1, f"bit {bit} minus part A")
            run.send(1, 0, minus2, f"bit {bit} minus part B")
            run.send(0, 2, R.add(plus1, minus2), f"bit {bit} cross sum A")
            run.send(1, 2, R.add(plus2, minus1), f"bit {bit} cross sum B")
            diff = R.sub(R.add(plus1, minus2), R.add(plus2, minus1))
            verdict = _sign_verdict(R, diff)
            run.broadcast(2, verdict, f"bit {bit} verdict", kind="token")
            if verdict != EQUAL:
                return BitwiseOutcome(GREATER if verdict == POSITIVE else LESS, bit)
        return BitwiseOutcome(EQUAL, None)


# -- plain-call wrappers -------------------------------------------------


def secure_sum(inputs, graph=None, seed=0, ring=None):
    R = ring if ring is not None else ring_mod.integers()
    g = graph if graph is not None else build_cycle(len(inputs))
    outcome, _ = run(SecureSum(R), g, inputs, seed)
    return outcome


def secure_rating(inputs, graph=None, seed=0, ring=None):
    R = ring if ring is not None else ring_mod.integers()
    proto = SecureRating(R, len(inputs))
    outcome, _ = run(proto, graph, inputs, seed)
    return outcome


def secure_product(inputs, graph=None, seed=0, ring=None):
    R = ring if ring is not None else ring_mod.integers()
    g = graph if graph is not None else build_cycle(len(inputs))
    outcome, _ = run(SecureProduct(R), g, inputs, seed)
    return outcome


def sum_of_powers(inputs, exponent, graph=None, seed=0, ring=None):
    R = ring if ring is not None else ring_mod.integers()
    g = graph if graph is not None else build_cycle(len(inputs))
    outcome, _ = run(SumOfPowers(R, exponent), g, inputs, seed)
    return outcome


def example_f1(n1, n2, n3, seed=0, ring=None):
    R = ring if ring is not None else ring_mod.integers()
    outcome, _ = run(ExampleF1(R), None, (n1, n2, n3), seed)
    return outcome


def example_f2(n1, n2, n3, g_func, seed=0, ring=None, g_name="custom"):
    R = ring if ring is not None else ring_mod.integers()
    outcome, _ = run(ExampleF2(R, g_func, g_name), None, (n1, n2, n3), seed)
    return outcome


def millionaires_compare(n1, n2, seed=0, ring=None):
    R = ring if ring is not None else ring_mod.integers()
    outcome, _ = run(MillionairesCompare(R), None, (n1, n2), seed)
    return outcome.verdict


def millionaires_bitwise(n1, n2, bit_width, seed=0):
    outcome, _ = run(MillionairesBitwise(bit_width), None, (n1, n2), seed)
    return outcome
