"""Mental-poker dealing: random disjoint distribution plus collective shuffling.

The deal works by circulating a single token around the secure cycle.
Each player keeps a private counter, freshly drawn from 1..N whenever a
new value first passes through (and after every keep); when the same
value arrives more often than the counter allows, the player keeps it
and sends value+1 onward.  Keeps are therefore invisible: neighbours see
only values passing, and a value's keeper is hidden among everyone
upstream.  The token starts at the throwaway value 0 so that even the
first real value's keeper is ambiguous.

The keeper of the last value forwards it as if untaken, and the process
halts once that value has returned to its introducer N+1 times, at which
point every player has seen it N+1 times and knows the deal is over
without learning who took it.

Card labels are attached by a collectively generated uniform
permutation: swap positions are drawn by three-party collective
randomness (two contributors, one receiver, announced), which stays
uniform even against one adversarial contributor.  Dummy players hold no
randomness; their counters are synthesized from two real players'
contributions, combined modulo N with residue 0 mapped to N.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import ring as ring_mod
from .engine import Protocol, Run, run
from .errors import ProtocolError, TopologyError
from .topology import ChannelGraph, Party, SECURE, build_cycle, default_parties


def expected_circles(N: int, k: int) -> Fraction:
    """Exact mean number of complete circles a value travels before it is kept.

    With every player's counter uniform on 1..N, a value is kept by the
    player whose counter first runs out, after exactly min(counters)
    complete circles; the mean of that minimum over k players is
    (sum of j^k for j = 1..N) / N^k.
    """
    if N < 1 or k < 1:
        raise ProtocolError("expected_circles needs N >= 1 and k >= 1")
    return Fraction(sum(j**k for j in range(1, N + 1)), N**k)


def knuth_shuffle(m: int, draw) -> list[int]:
    """Uniform permutation of 1..m from position-wise swaps.

    ``draw(lo, hi)`` must return a uniform integer in [lo, hi].  Walking
    positions 1..m-1 and swapping each with a uniformly chosen position
    from i..m yields every permutation with probability exactly 1/m!.
    """
    if m < 1:
        raise ProtocolError("deck size must be >= 1")
    perm = list(range(1, m + 1))
    for i in range(1, m):
        j = draw(i, m)
        perm[i - 1], perm[j - 1] = perm[j - 1], perm[i - 1]
    return perm


def collective_round(run: Run, M: int, receiver: int, contributors, label: str,
                     announce: bool = False) -> int:
    """One collective-randomness round: contributors send uniform values mod M.

    The receiver's result is their sum mod M, uniform as long as at least
    one contributor plays honestly.  With ``announce`` the receiver
    broadcasts the result (needed whenever the value must be public,
    e.g. shuffle swaps).
    """
    if M < 1:
        raise ProtocolError("modulus must be >= 1")
    total = 0
    for c in contributors:
        v = run.rand_int(c, 0, M - 1, f"{label} contribution")
        run.send(c, receiver, v, f"{label} contribution")
        total = (total + v) % M
    run.note(receiver, f"{label} value", total)
    if announce:
        run.broadcast(receiver, total, f"{label} value")
    return total


class CollectiveRandom(Protocol):
    """Standalone three-party collective randomness (one value mod M)."""

    name = "protocol2_random"

    def __init__(self, M: int, receiver: int = 0, contributors=(1, 2)):
        super().__init__(ring_mod.integers())
        if len(contributors) != 2 or receiver in contributors:
            raise ProtocolError("one receiver and two distinct contributors required")
        self.M = M
        self.receiver = receiver
        self.contributors = tuple(contributors)

    def params(self):
        return {"M": self.M, "receiver": self.receiver, "contributors": list(self.contributors)}

    def default_graph(self):
        return build_cycle(3)

    def check_graph(self, g):
        for c in self.contributors:
            if not (g.has_edge(c, self.receiver) and g.security(c, self.receiver) == SECURE):
                raise TopologyError(
                    f"collective randomness needs a secure channel {c} -> {self.receiver}"
                )

    def program(self, run: Run):
        return collective_round(run, self.M, self.receiver, self.contributors, "random")


def protocol2_random3(M, receiver=0, contributors=(1, 2), graph=None, seed=0, sources=None):
    """Collective uniform value mod M at the receiver (default: P1 from P2, P3)."""
    outcome, _ = run(CollectiveRandom(M, receiver, contributors), graph, (), seed, sources=sources)
    return outcome


def protocol2_roles(i: int, k: int) -> tuple[int, tuple[int, int]]:
    """Receiver and contributors for round i (1-based) on a k-cycle.

    Round i engages the cycle-adjacent triple: contributors P_i and
    P_{i+2}, receiver P_{i+1}, indices wrapping modulo k.  Returned as
    0-based indices.
    """
    if k < 3:
        raise ProtocolError("needs k >= 3")
    return i % k, ((i - 1) % k, (i + 1) % k)


def protocol2_random_k(M, i, k, graph=None, seed=0, sources=None):
    """Round i of collective randomness on a k-cycle, using adjacent channels only."""
    receiver, contributors = protocol2_roles(i, k)
    g = graph if graph is not None else build_cycle(k)
    outcome, _ = run(CollectiveRandom(M, receiver, contributors), g, (), seed, sources=sources)
    return outcome


@dataclass(frozen=True)
class DealConfig:
    """Parameters of one token-passing deal.

    ``quotas`` is the per-player hand size; None means even quotas with
    the extra cards (when r % k != 0) assigned to a contiguous block of
    players picked by a public collective-randomness lottery.
    """

    r: int
    k: int
    N: int
    quotas: tuple | None = None

    def __post_init__(self):
        if self.r < 1:
            raise ProtocolError("need at least one card index")
        if self.k < 3:
            raise ProtocolError("dealing needs k >= 3 players")
        if self.N < 1:
            raise ProtocolError("counter bound N must be >= 1")
        if self.quotas is not None:
            if len(self.quotas) != self.k or any(q < 0 for q in self.quotas):
                raise ProtocolError("quotas must list one non-negative size per player")
            if sum(self.quotas) != self.r:
                raise ProtocolError("quotas must sum to the number of cards")


@dataclass(frozen=True)
class DealResult:
    """Hands as card indices (1..r), plus the public card-label permutation if drawn."""

    hands: tuple  # per player, sorted tuples of indices
    zero_keeper: str
    quotas: tuple
    permutation: tuple | None = None  # permutation[idx-1] = card label

    def labeled_hands(self):
        if self.permutation is None:
            raise ProtocolError("this deal carried no label permutation")
        return tuple(
            tuple(sorted(self.permutation[i - 1] for i in hand)) for hand in self.hands
        )


class CardDeal(Protocol):
    """Token-passing deal, optionally composed with the label shuffle.

    ``counter_contributors`` names the two real players that synthesize
    every dummy counter (required when the graph contains dummies).
    ``shuffle_receiver`` fixes the collective-randomness receiver in
    dummy mode; in all-real mode the roles rotate around the cycle.
    """

    name = "card_deal"

    def __init__(self, cfg: DealConfig, with_labels: bool = False,
                 counter_contributors=None, consolidate_to=None, post_draws=()):
        super().__init__(ring_mod.integers())
        self.cfg = cfg
        self.with_labels = with_labels
        self.counter_contributors = counter_contributors
        self.consolidate_to = consolidate_to
        self.post_draws = tuple(post_draws)

    def params(self):
        return {
            "r": self.cfg.r,
            "k": self.cfg.k,
            "N": self.cfg.N,
            "quotas": list(self.cfg.quotas) if self.cfg.quotas is not None else None,
            "with_labels": self.with_labels,
            "counter_contributors": (
                list(self.counter_contributors) if self.counter_contributors else None
            ),
            "consolidate_to": self.consolidate_to,
            "post_draws": [list(d) for d in self.post_draws],
        }

    def default_graph(self):
        return build_cycle(self.cfg.k)

    def check_graph(self, g):
        k = self.cfg.k
        if g.k != k:
            raise TopologyError(f"deal config names {k} players, graph has {g.k}")
        for i in range(k):
            j = (i + 1) % k
            if not (g.has_edge(i, j) and g.security(i, j) == SECURE):
                raise TopologyError(f"dealing needs the secure cycle edge ({i},{j})")
        dummies = [p.index for p in g.parties if not p.full]
        if dummies:
            cc = self.counter_contributors
            if cc is None or len(cc) != 2:
                raise TopologyError("dummies present: two counter contributors required")
            for d in dummies:
                for c in cc:
                    if not (g.has_edge(c, d) and g.security(c, d) == SECURE):
                        raise TopologyError(
                            f"dummy {d} needs a secure channel from contributor {c}"
                        )

    # -- counters ---------------------------------------------------------

    def _fresh_counter(self, run: Run, p: int) -> int:
        N = self.cfg.N
        if run.graph.parties[p].full:
            return run.rand_int(p, 1, N, "counter")
        a, b = self.counter_contributors
        ca = run.rand_int(a, 1, N, "counter share")
        run.send(a, p, ca, "counter share")
        cb = run.rand_int(b, 1, N, "counter share")
        run.send(b, p, cb, "counter share")
        # (ca + cb) mod N, with residue 0 mapped to N, stays uniform on 1..N.
        c = ((ca + cb - 1) % N) + 1
        run.note(p, "synthesized counter", c)
        return c

    # -- quota resolution --------------------------------------------------

    def _resolve_quotas(self, run: Run):
        cfg = self.cfg
        if cfg.quotas is not None:
            return tuple(cfg.quotas)
        base, extra = divmod(cfg.r, cfg.k)
        quotas = [base] * cfg.k
        if extra:
            receiver, contributors = self._shuffle_roles(run, 0)
            v = collective_round(run, cfg.k, receiver, contributors, "quota lottery",
                                 announce=True)
            for t in range(extra):
                quotas[(v + t) % cfg.k] += 1
        return tuple(quotas)

    def _shuffle_roles(self, run: Run, round_index: int):
        dummies = [p.index for p in run.graph.parties if not p.full]
        if dummies:
            # Reals contribute; the first dummy receives and announces.
            return dummies[0], self.counter_contributors
        receiver, contributors = protocol2_roles(round_index + 1, self.cfg.k)
        return receiver, contributors

    # -- the deal ----------------------------------------------------------

    def program(self, run: Run):
        cfg = self.cfg
        k, N, final = cfg.k, cfg.N, cfg.r
        quotas = self._resolve_quotas(run)
        counters = [self._fresh_counter(run, p) for p in range(k)]
        seen = [dict() for _ in range(k)]
        kept = [[] for _ in range(k)]
        zero_keeper = None
        introducer = {0: 0}
        run.send(0, 1 % k, 0, "token", kind="token")
        receiver, value = 1 % k, 0
        final_passes = [0] * k
        hops, hop_guard = 1, (N + 2) * k * (final + 2) + 64
        while True:
            p, v = receiver, value
            cnt = seen[p].get(v, 0) + 1
            seen[p][v] = cnt
            first = cnt == 1
            if v == final:
                final_passes[p] += 1
            active = (zero_keeper is None) if v == 0 else (len(kept[p]) < quotas[p])
            if active and cnt > counters[p]:
                if v == 0:
                    zero_keeper = p
                else:
                    kept[p].append(v)
                if v != final:
                    value = v + 1
                    introducer[value] = p
                counters[p] = self._fresh_counter(run, p)
            elif active and first:
                counters[p] = self._fresh_counter(run, p)
            if v == final and introducer.get(final) == p and final_passes[p] == N + 1:
                break  # the final value has made N+1 full circles
            nxt = (p + 1) % k
            run.send(p, nxt, value, "token", kind="token")
            receiver = nxt
            hops += 1
            if hops >= hop_guard:
                raise ProtocolError("deal failed to terminate within the hop bound")
        hands = tuple(tuple(sorted(h)) for h in kept)
        permutation = self._draw_permutation(run) if self.with_labels else None
        result = DealResult(hands, run.name(zero_keeper), quotas, permutation)
        return self._postprocess(run, result)

    def _draw_permutation(self, run: Run):
        m = self.cfg.r
        counter = [0]

        def draw(lo, hi):
            receiver, contributors = self._shuffle_roles(run, counter[0])
            counter[0] += 1
            v = collective_round(run, hi - lo + 1, receiver, contributors,
                                 f"swap {counter[0]}", announce=True)
            return lo + v

        return tuple(knuth_shuffle(m, draw))

    def _postprocess(self, run: Run, result: DealResult):
        if self.consolidate_to is None:
            return result
        # All dummy hands travel along the dummy chain to the dealer dummy.
        dealer = self.consolidate_to
        dummies = sorted(p.index for p in run.graph.parties if not p.full)
        carried: dict[int, list] = {d: list(result.hands[d]) for d in dummies}
        for d in sorted((d for d in dummies if d != dealer), reverse=True):
            load = sorted(carried.pop(d))
            run.send(d, d - 1, load, "consolidated cards", kind="elems")
            carried[d - 1].extend(load)
        residual = sorted(carried[dealer])
        served = []
        for requester, count in self.post_draws:
            for _ in range(count):
                if not residual:
                    raise ProtocolError("dealer has no residual cards left")
                a, b = self.counter_contributors
                idx = collective_round(run, len(residual), dealer, (a, b), "deal draw")
                card = residual.pop(idx)
                run.send(dealer, requester, card, "drawn card", kind="token")
                served.append((run.name(requester), card))
        return DealerOutcome(result, tuple(residual), tuple(served))


@dataclass(frozen=True)
class DealerOutcome:
    """Deal result plus the dummy dealer's residual deck and any served draws."""

    deal: DealResult
    residual: tuple
    served: tuple


# -- graphs and wrappers ---------------------------------------------------


def dummy_deal_graph() -> ChannelGraph:
    """Two real players and a dummy third on a secure 3-cycle."""
    parties = [Party(0, "P1"), Party(1, "P2"), Party(2, "P3", full=False)]
    return ChannelGraph(parties, [(0, 1, SECURE), (1, 2, SECURE), (2, 0, SECURE)])


def dealer_graph(k: int, d: int) -> ChannelGraph:
    """k reals then d contiguous dummies on a cycle, plus the declared spokes.

    Spokes: both counter contributors (reals 0 and 1) reach every dummy,
    and the dealer dummy (index k) reaches every real, so cards can be
    served privately during play.
    """
    total = k + d
    parties = default_parties(k) + [Party(k + j, f"D{j + 1}", full=False) for j in range(d)]
    g = ChannelGraph(parties, [(i, (i + 1) % total, SECURE) for i in range(total)])
    for dummy in range(k, total):
        for c in (0, 1):
            if not g.has_edge(c, dummy):
                g.add_edge(c, dummy, SECURE)
    for real in range(k):
        if not g.has_edge(real, k):
            g.add_edge(real, k, SECURE)
    return g


def protocol1_distribute(cfg: DealConfig, graph=None, seed=0, sources=None, record=True):
    """Distribute card indices 1..r into disjoint hands; no labels attached."""
    proto = CardDeal(cfg)
    g = graph if graph is not None else build_cycle(cfg.k)
    outcome, transcript = run(proto, g, (), seed, sources=sources, record=record)
    return outcome, transcript


def deal_deck(m: int, k: int, N: int, seed=0, graph=None, record=True):
    """Full deal of an m-card deck to k players: indices, then public labels."""
    proto = CardDeal(DealConfig(m, k, N), with_labels=True)
    g = graph if graph is not None else build_cycle(k)
    outcome, transcript = run(proto, g, (), seed, record=record)
    return outcome, transcript


def dummy_deal_two_players(m: int, N: int, seed=0, record=True):
    """Deal to two real players via a dummy third whose hand goes back to the deck.

    Every dummy counter is synthesized from both reals' contributions;
    the dummy draws nothing itself.  Returns (real hands, discarded dummy
    hand, full result, transcript).
    """
    proto = CardDeal(DealConfig(m, 3, N), with_labels=True, counter_contributors=(0, 1))
    outcome, transcript = run(proto, dummy_deal_graph(), (), seed, record=record)
    real_hands = outcome.hands[:2]
    discarded = outcome.hands[2]
    return real_hands, discarded, outcome, transcript


def dummy_dealer_count(m: int, s: int, k: int) -> int:
    """Number of dummies so that (dummies + reals) * s is close to the deck size."""
    return max(1, round(m / s) - k)


def dummy_dealer_fixed_hands(m: int, k: int, s: int, N: int = 10, seed=0,
                             post_draws=(), record=True):
    """Deal exactly s cards to each of k reals; dummies absorb the rest.

    The dummies' cards are consolidated at one dummy dealer, which then
    serves uniformly random residual cards on request (``post_draws`` is
    a sequence of (real player index, count) pairs).
    """
    if k < 2 or s < 1:
        raise ProtocolError("need k >= 2 real players and s >= 1 cards each")
    if m < k * s:
        raise ProtocolError(f"infeasible: {m} cards cannot give {k} players {s} each")
    d = dummy_dealer_count(m, s, k)
    rest = m - k * s
    base, extra = divmod(rest, d)
    quotas = tuple([s] * k + [base + (1 if j < extra else 0) for j in range(d)])
    for requester, _ in post_draws:
        if not 0 <= requester < k:
            raise ProtocolError("post draws must go to real players")
    proto = CardDeal(
        DealConfig(m, k + d, N, quotas=quotas),
        counter_contributors=(0, 1),
        consolidate_to=k,
        post_draws=post_draws,
    )
    outcome, transcript = run(proto, dealer_graph(k, d), (), seed, record=record)
    return outcome, transcript
