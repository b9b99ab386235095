"""(k,k) secret sharing in which nobody, the dealer included, sees a share.

The dealer splits the secret into k pieces and hands one piece to each
player; each player then re-splits its piece around the cycle with the
masking subroutine, so every player's final share is a sum of k summands
that only ever existed in masked transit.  All k shares are required to
reconstruct; any strict subset, with the secret private, pins down
nothing about the missing share.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import ring as ring_mod
from .engine import Protocol, Run, run
from .errors import ProtocolError, TopologyError
from .ring import RingSpec
from .topology import ChannelGraph, Party, SECURE, build_cycle, default_parties, secure_cycles, validate_topology


@dataclass(frozen=True)
class ShareVector:
    """Final per-player shares; their sum is the shared secret."""

    shares: tuple


def _cycle_order(g: ChannelGraph, k: int):
    cycles = secure_cycles(_players_subgraph(g, k))
    if len(cycles) != 1:
        raise TopologyError("secret sharing needs the players on a single cycle")
    return cycles[0]


def _players_subgraph(g: ChannelGraph, k: int) -> ChannelGraph:
    parties = [p for p in g.parties if p.index < k]
    edges = [(i, j, sec) for i, j, sec in g.edges() if i < k and j < k]
    return ChannelGraph(parties, edges)


def masked_split_subroutine(run: Run, ring: RingSpec, cycle, initiator_pos: int, value: int,
                            tag: str):
    """Split ``value`` into one private summand per cycle player.

    The initiator forwards value minus a random mask; every subsequent
    player peels off a fresh random summand and forwards the remainder;
    the initiator's own summand is its mask plus whatever returns.  Only
    masked partial values ever travel.  Returns summands in cycle order.
    """
    R = ring
    k = len(cycle)
    initiator = cycle[initiator_pos]
    mask = run.noise(initiator, f"{tag} mask of {run.name(initiator)}")
    m = R.sub(value, mask)
    summands = {}
    pos = initiator_pos
    for step in range(1, k):
        nxt = cycle[(pos + 1) % k]
        run.send(cycle[pos], nxt, m, f"{tag} masked remainder")
        pos = (pos + 1) % k
        part = run.noise(nxt, f"{tag} summand of {run.name(nxt)}")
        summands[nxt] = part
        m = R.sub(m, part)
    run.send(cycle[pos], initiator, m, f"{tag} masked remainder")
    summands[initiator] = R.add(mask, m)
    run.note(initiator, f"{tag} summand of {run.name(initiator)}", summands[initiator])
    return summands


class DistributeShares(Protocol):
    """Standalone run of the masking subroutine for one value."""

    name = "distribute_shares"

    def __init__(self, ring: RingSpec, initiator: int = 0, k: int = 3):
        super().__init__(ring)
        self.initiator = initiator
        self.k = k

    def params(self):
        return {"initiator": self.initiator, "k": self.k}

    def default_graph(self):
        return build_cycle(self.k)

    def program(self, run: Run):
        R = self.ring
        (value,) = run.inputs
        value = R.normalize(value)
        cycles = secure_cycles(run.graph)
        if len(cycles) != 1:
            raise TopologyError("share distribution needs a single cycle")
        cycle = cycles[0]
        if self.initiator not in cycle:
            raise ProtocolError(f"initiator {self.initiator} is not on the cycle")
        run.note(self.initiator, "value to split", value)
        summands = masked_split_subroutine(
            run, R, cycle, cycle.index(self.initiator), value, "split"
        )
        return tuple(summands[i] for i in sorted(summands))


def distribute_shares_subroutine(value, initiator=0, k=3, graph=None, seed=0, ring=None):
    """Split ``value`` into k summands, one per player, summing to value."""
    R = ring if ring is not None else ring_mod.integers()
    g = graph if graph is not None else build_cycle(k)
    outcome, _ = run(DistributeShares(R, initiator), g, (value,), seed)
    return outcome


class ShareSecret(Protocol):
    """The full (k,k) scheme: dealer splits, every piece is re-split on the cycle."""

    name = "share_secret_kk"

    def __init__(self, ring: RingSpec, k: int):
        if k < 3:
            raise ProtocolError("the sharing cycle needs k >= 3 players")
        super().__init__(ring)
        self.k = k

    def params(self):
        return {"k": self.k}

    def default_graph(self):
        return sharing_graph(self.k)

    def check_graph(self, g):
        k = self.k
        if g.k != k + 1:
            raise TopologyError(f"share_secret_kk with k={k} needs {k + 1} parties (incl. dealer)")
        ok = validate_topology(_players_subgraph(g, k))
        if not ok:
            raise TopologyError(f"share_secret_kk: {ok.reason}")
        for i in range(k):
            if not (g.has_edge(i, k) and g.security(i, k) == SECURE):
                raise TopologyError(f"share_secret_kk: dealer needs a secure link to player {i}")

    def program(self, run: Run):
        R = self.ring
        k = self.k
        dealer = k
        (secret,) = run.inputs
        secret = R.normalize(secret)
        run.note(dealer, "secret", secret)
        # Dealer's arbitrary split of the secret into k pieces.
        pieces = []
        rest = secret
        for i in range(k - 1):
            piece = run.noise(dealer, f"dealer piece {i + 1}")
            pieces.append(piece)
            rest = R.sub(rest, piece)
        pieces.append(rest)
        run.note(dealer, f"dealer piece {k}", rest)
        cycle = _cycle_order(run.graph, k)
        totals = {i: 0 for i in range(k)}
        # Loop: piece i goes to player i, who re-splits it around the cycle.
        for i in range(k):
            run.send(dealer, i, pieces[i], f"piece for {run.name(i)}")
            summands = masked_split_subroutine(
                run, R, cycle, cycle.index(i), pieces[i], f"piece{i + 1}"
            )
            for j, part in summands.items():
                totals[j] = R.add(totals[j], part)
        for j in range(k):
            run.note(j, "final share", totals[j])
        return ShareVector(tuple(totals[j] for j in range(k)))


def sharing_graph(k: int) -> ChannelGraph:
    """Player cycle plus a dealer with a secure spoke to every player: 2k channels."""
    parties = default_parties(k) + [Party(k, "D")]
    edges = [(i, (i + 1) % k, SECURE) for i in range(k)]
    edges += [(i, k, SECURE) for i in range(k)]
    return ChannelGraph(parties, edges)


def share_secret_kk(secret, k, graph=None, seed=0, ring=None) -> ShareVector:
    R = ring if ring is not None else ring_mod.integers()
    outcome, _ = run(ShareSecret(R, k), graph, (secret,), seed)
    return outcome


def reconstruct(shares, ring=None):
    """Sum of all k shares.  Every share is required; None marks a withheld one."""
    R = ring if ring is not None else ring_mod.integers()
    values = list(shares.shares if isinstance(shares, ShareVector) else shares)
    if not values or any(v is None for v in values):
        raise ProtocolError("reconstruction needs every share; this is a (k,k) scheme")
    total = 0
    for v in values:
        total = R.add(total, v)
    return total
