"""Parties, channel graphs, and the cycle-cover validity gate.

The cycle protocols only hide anything if every participant has secure
degree exactly 2: a vertex of degree 0 leaks to everybody, a vertex of
degree 1 leaks to its single neighbour, and with exactly k secure edges
on k vertices the handshaking count forces the secure subgraph to be a
disjoint union of cycles.  Cycles of length 1 or 2 cannot occur in a
simple graph, so "2-regular" is the whole acceptance condition; the
protocols that use a star around a dummy declare their own channel sets
and are checked against those instead.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import TopologyError

SECURE = "secure"
INSECURE = "insecure"


@dataclass(frozen=True)
class Party:
    """A protocol participant.  ``full=False`` marks a dummy with no randomness."""

    index: int
    name: str
    full: bool = True


@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    reason: str | None = None

    def __bool__(self):
        return self.ok


class ChannelGraph:
    """Undirected channel graph over k parties, each edge secure or insecure."""

    def __init__(self, parties, edges=()):
        self.parties = tuple(parties)
        if len({p.index for p in self.parties}) != len(self.parties):
            raise TopologyError("duplicate party indices")
        if len({p.name for p in self.parties}) != len(self.parties):
            raise TopologyError("duplicate party names")
        self._security: dict[frozenset, str] = {}
        for i, j, security in edges:
            self.add_edge(i, j, security)

    @property
    def k(self) -> int:
        return len(self.parties)

    def add_edge(self, i: int, j: int, security: str = SECURE) -> None:
        if i == j:
            raise TopologyError(f"self-loop at vertex {i}")
        if not (0 <= i < self.k and 0 <= j < self.k):
            raise TopologyError(f"edge ({i},{j}) references an unknown vertex")
        if security not in (SECURE, INSECURE):
            raise TopologyError(f"bad channel security {security!r}")
        key = frozenset((i, j))
        if key in self._security:
            raise TopologyError(f"duplicate edge ({i},{j})")
        self._security[key] = security

    def has_edge(self, i: int, j: int) -> bool:
        return frozenset((i, j)) in self._security

    def security(self, i: int, j: int) -> str:
        try:
            return self._security[frozenset((i, j))]
        except KeyError:
            raise TopologyError(f"no channel between {i} and {j}") from None

    def edges(self):
        """Edges as sorted (i, j, security) triples, deterministic order."""
        out = []
        for key, sec in self._security.items():
            i, j = sorted(key)
            out.append((i, j, sec))
        return sorted(out)

    def secure_pairs(self):
        return [(i, j) for i, j, sec in self.edges() if sec == SECURE]

    def party(self, name: str) -> Party:
        for p in self.parties:
            if p.name == name:
                return p
        raise TopologyError(f"unknown party {name!r}")

    def to_config(self) -> dict:
        return {
            "k": self.k,
            "parties": [{"name": p.name, "full": p.full} for p in self.parties],
            "edges": [[i, j, sec] for i, j, sec in self.edges()],
        }

    @classmethod
    def from_config(cls, cfg: dict) -> "ChannelGraph":
        if "cycle" in cfg:
            return build_cycle(int(cfg["cycle"]))
        k = int(cfg["k"])
        specs = cfg.get("parties")
        if specs is None:
            parties = default_parties(k)
        else:
            parties = [
                Party(i, s.get("name", f"P{i + 1}"), bool(s.get("full", True)))
                for i, s in enumerate(specs)
            ]
        return cls(parties, [(e[0], e[1], e[2]) for e in cfg.get("edges", [])])


def default_parties(k: int, prefix: str = "P") -> list[Party]:
    return [Party(i, f"{prefix}{i + 1}") for i in range(k)]


def build_cycle(k: int) -> ChannelGraph:
    """Secure cycle P1 -> P2 -> ... -> Pk -> P1.  Needs k >= 3 parties."""
    if k < 3:
        raise TopologyError(f"a cycle of secure channels needs at least 3 parties, got {k}")
    edges = [(i, (i + 1) % k, SECURE) for i in range(k)]
    return ChannelGraph(default_parties(k), edges)


def dummy_triangle(a: str = "A", b: str = "B", dummy: str = "D") -> ChannelGraph:
    """Two real parties plus a dummy, all three links secure."""
    parties = [Party(0, a), Party(1, b), Party(2, dummy, full=False)]
    return ChannelGraph(parties, [(0, 1, SECURE), (0, 2, SECURE), (1, 2, SECURE)])


def validate_secure_edges(k: int, pairs) -> tuple[bool, str | None]:
    """Core acceptance test: is the secure subgraph a disjoint cycle union?

    ``pairs`` is an iterable of distinct unordered vertex pairs.  In a
    simple graph, "every vertex has secure degree exactly 2" is
    equivalent to "disjoint union of cycles of length >= 3".
    """
    deg = [0] * k
    for i, j in pairs:
        deg[i] += 1
        deg[j] += 1
    for v, d in enumerate(deg):
        if d != 2:
            return False, f"vertex {v} has secure degree {d}, a cycle cover needs exactly 2"
    return True, None


def validate_topology(g: ChannelGraph) -> ValidationResult:
    """Accept iff the secure subgraph is a disjoint union of cycles of length >= 3."""
    ok, reason = validate_secure_edges(g.k, [(i, j) for i, j in g.secure_pairs()])
    return ValidationResult(ok, reason)


def secure_cycles(g: ChannelGraph) -> list[list[int]]:
    """The secure components as ordered vertex cycles.

    Each cycle starts at its lowest-index vertex and proceeds toward that
    vertex's lower-indexed neighbour's opposite, giving a deterministic
    orientation.  Raises TopologyError if the graph is not a valid cycle
    cover.
    """
    result = validate_topology(g)
    if not result:
        raise TopologyError(result.reason)
    adj: dict[int, list[int]] = {v: [] for v in range(g.k)}
    for i, j in g.secure_pairs():
        adj[i].append(j)
        adj[j].append(i)
    for v in adj:
        adj[v].sort()
    seen = set()
    cycles = []
    for start in range(g.k):
        if start in seen:
            continue
        cycle = [start]
        seen.add(start)
        prev, cur = start, adj[start][0]
        while cur != start:
            cycle.append(cur)
            seen.add(cur)
            nxt = adj[cur][0] if adj[cur][0] != prev else adj[cur][1]
            prev, cur = cur, nxt
        cycles.append(cycle)
    return cycles
