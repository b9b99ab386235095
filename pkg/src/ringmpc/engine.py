"""Deterministic protocol execution: scheduling, transcripts, and views.

Every protocol in this package is sequential token passing, so the
engine is a single logical thread that plays the protocol's steps in
narrative order.  What the engine adds on top of the protocol code is
discipline and evidence:

* every transmission must traverse a declared channel and is recorded
  in a global transcript with a strictly increasing sequence number;
* each full party owns a deterministic random generator forked from the
  run seed by party index, while a dummy owns none and any draw attempt
  raises ``DummyRandomnessError``;
* everything a party sends, receives, generates, or sees broadcast is
  accumulated into its view, and everything on insecure channels or
  broadcast into the eavesdropper's view.

Randomness goes through a single ``randrange``-shaped interface, so a
test can replace a party's generator with a scripted source and
enumerate the entire noise space of a run exhaustively.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Any, NamedTuple

from .errors import DummyRandomnessError, ReplayError, TopologyError
from .ring import RingSpec
from .topology import ChannelGraph, INSECURE, validate_topology

BROADCAST = "*"
EAVESDROPPER = "eavesdropper"


class Message(NamedTuple):
    seq: int
    frm: str
    to: str  # party name, or "*" for broadcast
    security: str
    kind: str  # "elem" | "elems" | "token" | "indices"
    payload: Any
    label: str


@dataclass(frozen=True)
class View:
    """Everything one observer knows after a run: ordered (label, value) pairs."""

    observer: str
    entries: tuple

    def values(self, label: str) -> list:
        return [v for lbl, v in self.entries if lbl == label]

    def value(self, label: str):
        vals = self.values(label)
        if len(vals) != 1:
            raise KeyError(f"{label!r} appears {len(vals)} times in {self.observer}'s view")
        return vals[0]

    def labels(self) -> list[str]:
        return [lbl for lbl, _ in self.entries]

    def key(self) -> tuple:
        """Hashable identity of the view's content (for distribution counting)."""
        return self.entries


def merge_views(*views: View) -> View:
    name = "+".join(v.observer for v in views)
    entries = tuple((f"{v.observer}:{lbl}", val) for v in views for lbl, val in v.entries)
    return View(name, entries)


@dataclass
class Transcript:
    """Ordered message log plus run metadata; the ground truth for views and metrics."""

    protocol: str
    ring: dict
    seed: int
    topology: dict
    inputs: Any
    params: dict
    messages: tuple
    views: dict  # party name -> tuple of (label, value)
    eavesdropped: tuple
    draw_counts: dict  # party name -> number of randomness draws
    draw_sites: tuple = ()  # ordered (party index, domain size) per draw

    def serialize(self) -> str:
        head = {
            "meta": {
                "protocol": self.protocol,
                "ring": self.ring,
                "seed": self.seed,
                "topology": self.topology,
                "inputs": _encode(self.inputs),
                "params": _encode(self.params),
            }
        }
        lines = [json.dumps(head, sort_keys=True, separators=(",", ":"))]
        for m in self.messages:
            lines.append(
                json.dumps(
                    {
                        "seq": m.seq,
                        "from": m.frm,
                        "to": m.to,
                        "security": m.security,
                        "kind": m.kind,
                        "payload": _encode(m.payload),
                    },
                    sort_keys=True,
                    separators=(",", ":"),
                )
            )
        return "\n".join(lines) + "\n"


def _encode(value):
    """JSON-safe encoding with arbitrary-precision ints as decimal strings."""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        return value
    if isinstance(value, dict):
        return {k: _encode(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_encode(v) for v in value]
    raise TypeError(f"cannot encode {value!r}")


def parse_transcript(text: str) -> tuple[dict, list[dict]]:
    """Split serialized transcript text into (meta, message dicts).

    Raises ReplayError for anything structurally unusable; tampered but
    well-formed payloads are left for the replay comparison to flag.
    """
    lines = [ln for ln in text.split("\n") if ln.strip()]
    if not lines:
        raise ReplayError("empty transcript")
    try:
        head = json.loads(lines[0])
    except json.JSONDecodeError as e:
        raise ReplayError(f"unreadable transcript header: {e}") from None
    if "meta" not in head:
        raise ReplayError("transcript header has no metadata")
    records = []
    for n, ln in enumerate(lines[1:], start=2):
        try:
            rec = json.loads(ln)
        except json.JSONDecodeError as e:
            raise ReplayError(f"truncated or corrupt transcript at line {n}: {e}") from None
        if not {"seq", "from", "to", "security", "kind", "payload"} <= rec.keys():
            raise ReplayError(f"message record at line {n} is missing fields")
        records.append(rec)
    return head["meta"], records


class ScriptedSource:
    """Randomness source that replays prescribed draw indices.

    Each ``randrange(n)`` consumes one prescribed value, which must lie
    in ``range(n)``.  Used by the enumeration harness to sweep a
    protocol's entire randomness space.
    """

    def __init__(self, values):
        self.values = list(values)
        self.pos = 0

    def randrange(self, n: int) -> int:
        if self.pos >= len(self.values):
            raise IndexError("scripted source exhausted")
        v = self.values[self.pos]
        self.pos += 1
        if not 0 <= v < n:
            raise ValueError(f"scripted value {v} outside range({n})")
        return v


class Protocol:
    """One runnable protocol: a name, a ring, a topology contract, and a program.

    ``program(run)`` drives the run object through the protocol's steps
    and returns the outcome.  Subclasses override ``default_graph`` and,
    when they need something other than a plain cycle cover,
    ``check_graph``.
    """

    name = "?"

    def __init__(self, ring: RingSpec):
        self.ring = ring

    def params(self) -> dict:
        return {}

    def default_graph(self) -> ChannelGraph:
        raise TopologyError(f"{self.name} needs an explicit channel graph")

    def check_graph(self, g: ChannelGraph) -> None:
        result = validate_topology(g)
        if not result:
            raise TopologyError(f"{self.name}: {result.reason}")

    def program(self, run: "Run"):
        raise NotImplementedError


class Run:
    """Mutable state of one protocol execution."""

    def __init__(self, protocol, graph, inputs, seed, sources=None, record=True):
        self.protocol = protocol
        self.graph = graph
        self.ring = protocol.ring
        self.inputs = tuple(inputs)
        self.seed = seed
        self.record = record
        self.messages: list[Message] = []
        self.seq = 0
        self._views: dict[str, list] = {p.name: [] for p in graph.parties}
        self._eavesdropped: list = []
        self.draw_counts: dict[str, int] = {p.name: 0 for p in graph.parties}
        self.draw_sites: list[tuple[int, int]] = []  # (party index, domain size)
        self._sources = {}
        for p in graph.parties:
            if sources is not None and p.index in sources:
                self._sources[p.index] = sources[p.index]
            elif p.full:
                self._sources[p.index] = random.Random(f"{seed}/{p.index}")
            else:
                self._sources[p.index] = None

    # -- party helpers -------------------------------------------------

    def name(self, i: int) -> str:
        return self.graph.parties[i].name

    def source(self, i: int):
        src = self._sources[i]
        if src is None:
            raise DummyRandomnessError(
                f"dummy party {self.name(i)} attempted to draw randomness"
            )
        return src

    # -- randomness ----------------------------------------------------

    def randrange(self, party: int, n: int, label: str) -> int:
        src = self.source(party)
        self.draw_sites.append((party, n))
        self.draw_counts[self.name(party)] += 1
        v = src.randrange(n)
        self.note(party, label, v)
        return v

    def rand_int(self, party: int, lo: int, hi: int, label: str) -> int:
        """Uniform integer in [lo, hi]."""
        src = self.source(party)
        self.draw_sites.append((party, hi - lo + 1))
        self.draw_counts[self.name(party)] += 1
        v = lo + src.randrange(hi - lo + 1)
        self.note(party, label, v)
        return v

    def noise(self, party: int, label: str, require_unit: bool = False) -> int:
        """Draw ring noise for ``party`` and record it in the party's view."""
        src = self.source(party)
        n = len(self.ring.units()) if (self.ring.modular and require_unit) else None
        if n is None:
            if self.ring.modular:
                n = self.ring.modulus
            else:
                b = self.ring.noise_bound
                n = 2 * b if require_unit else 2 * b + 1
        self.draw_sites.append((party, n))
        self.draw_counts[self.name(party)] += 1
        v = self.ring.sample_noise(src, require_unit=require_unit)
        self.note(party, label, v)
        return v

    # -- knowledge and transmission -------------------------------------

    def note(self, party: int, label: str, value) -> None:
        """Record a privately held value (input, noise, local result) in a view."""
        self._views[self.name(party)].append((label, _hashable(value)))

    def send(self, frm: int, to: int, value, label: str, kind: str = "elem") -> None:
        security = self.graph.security(frm, to)  # raises if not a channel
        payload = _hashable(value)
        if self.record:
            self.messages.append(
                Message(self.seq, self.name(frm), self.name(to), security, kind, payload, label)
            )
        self.seq += 1
        self._views[self.name(frm)].append((label, payload))
        self._views[self.name(to)].append((label, payload))
        if security == INSECURE:
            self._eavesdropped.append((label, payload))

    def broadcast(self, frm: int, value, label: str, kind: str = "elem") -> None:
        """One message visible to every party and to the eavesdropper."""
        payload = _hashable(value)
        if self.record:
            self.messages.append(
                Message(self.seq, self.name(frm), BROADCAST, INSECURE, kind, payload, label)
            )
        self.seq += 1
        for p in self.graph.parties:
            self._views[p.name].append((label, payload))
        self._eavesdropped.append((label, payload))

    # -- packaging -------------------------------------------------------

    def transcript(self, inputs_meta=None) -> Transcript:
        return Transcript(
            protocol=self.protocol.name,
            ring=self.ring.to_config(),
            seed=self.seed,
            topology=self.graph.to_config(),
            inputs=self.inputs if inputs_meta is None else inputs_meta,
            params=self.protocol.params(),
            messages=tuple(self.messages),
            views={name: tuple(entries) for name, entries in self._views.items()},
            eavesdropped=tuple(self._eavesdropped),
            draw_counts=dict(self.draw_counts),
            draw_sites=tuple(self.draw_sites),
        )


def _hashable(value):
    if isinstance(value, list):
        return tuple(value)
    return value


def run(protocol: Protocol, graph: ChannelGraph | None = None, inputs=(), seed: int = 0,
        sources=None, record: bool = True):
    """Execute ``protocol`` and return (outcome, transcript).

    Same (protocol, graph, inputs, seed) always produces an identical
    transcript.  ``sources`` optionally overrides per-party randomness
    with scripted sources, keyed by party index.
    """
    g = graph if graph is not None else protocol.default_graph()
    protocol.check_graph(g)
    r = Run(protocol, g, inputs, seed, sources=sources, record=record)
    outcome = protocol.program(r)
    return outcome, r.transcript()


def extract_view(t: Transcript, party: str) -> View:
    """The named party's knowledge: inputs, own noise, incident messages, broadcasts."""
    if party not in t.views:
        raise KeyError(f"{party!r} did not participate in this run")
    return View(party, t.views[party])


def eavesdropper_view(t: Transcript) -> View:
    """Everything that crossed an insecure channel or was broadcast."""
    return View(EAVESDROPPER, t.eavesdropped)
