"""Shared domain types: values, messages, processor state, traces, views.

Processors are numbered 1..n; processor 1 is always the source. Values are
either plain alphabet symbols or one of two sentinels: EMPTY (no supported
candidate) and MANY (two or more supported candidates). The canonical order
EMPTY < MANY < plain(0) < plain(1) < ... gives deterministic serialization
and tie-breaking everywhere.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

_EMPTY_KIND = 0
_MANY_KIND = 1
_PLAIN_KIND = 2


@dataclass(frozen=True)
class Value:
    """A protocol value: a plain alphabet symbol or a support sentinel."""

    kind: int
    symbol: int = -1

    @staticmethod
    def plain(symbol: int) -> "Value":
        if symbol < 0:
            raise ValueError("plain symbols are non-negative integers")
        return Value(_PLAIN_KIND, symbol)

    @property
    def is_plain(self) -> bool:
        return self.kind == _PLAIN_KIND

    def sort_key(self):
        return (self.kind, self.symbol)

    def __lt__(self, other: "Value") -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        if self.kind == _EMPTY_KIND:
            return "empty"
        if self.kind == _MANY_KIND:
            return "many"
        return str(self.symbol)

    def __repr__(self) -> str:
        return f"Value({self})"


EMPTY = Value(_EMPTY_KIND)
MANY = Value(_MANY_KIND)


def parse_value(token: str) -> Value:
    if token == "empty":
        return EMPTY
    if token == "many":
        return MANY
    try:
        return Value.plain(int(token))
    except ValueError:
        raise ValueError(f"not a value token: {token!r}") from None


def value_eq(x: Value, y: Value) -> bool:
    """Structural equality; sentinels compare equal only to themselves."""
    return x == y


@dataclass(frozen=True)
class PairMessage:
    """The (high, medium) support summaries a processor broadcasts each round."""

    high: Value
    medium: Value

    def sort_key(self):
        return self.high.sort_key() + self.medium.sort_key()

    def __str__(self) -> str:
        return f"{self.high},{self.medium}"


@dataclass(frozen=True)
class ProcessorState:
    """Per-processor protocol memory.

    `high`/`medium` are the transmitted summaries of `high_set`/`medium_set`;
    `decided` is the agreed-on source value, None while unset. `buffers` holds
    message copies collected mid logical round under a lifted protocol, keyed
    by sender (ground truth taint flags included for the checkers).
    """

    high: Value = EMPTY
    medium: Value = EMPTY
    high_set: frozenset = frozenset()
    medium_set: frozenset = frozenset()
    decided: Optional[Value] = None
    buffers: tuple = ()

    def emission(self) -> PairMessage:
        return PairMessage(self.high, self.medium)

    def to_record(self) -> dict:
        rec = {
            "high": str(self.high),
            "medium": str(self.medium),
            "high_set": sorted(str(v) for v in self.high_set),
            "medium_set": sorted(str(v) for v in self.medium_set),
            "decided": None if self.decided is None else str(self.decided),
        }
        if self.buffers:
            rec["buffers"] = [list(b) for b in self.buffers]
        return rec


def payload_record(payload) -> object:
    """JSON-ready form of any message payload appearing in a trace."""
    if isinstance(payload, Value):
        return str(payload)
    if isinstance(payload, PairMessage):
        return [str(payload.high), str(payload.medium)]
    if isinstance(payload, (list, tuple)):
        return [payload_record(p) for p in payload]
    if isinstance(payload, dict):
        return {k: payload_record(v) for k, v in payload.items()}
    return payload


@dataclass
class RoundTrace:
    """Everything that happened in one (physical) round."""

    round: int
    controlled: frozenset
    sent: dict  # (sender, receiver) -> payload, or list of hop payloads
    states_after: dict  # pid -> ProcessorState

    def to_record(self) -> dict:
        return {
            "round": self.round,
            "controlled": sorted(self.controlled),
            "sent": {
                f"{i}->{j}": payload_record(p) for (i, j), p in self.sent.items()
            },
            "states": {str(p): s.to_record() for p, s in self.states_after.items()},
        }

    def to_line(self) -> str:
        return json.dumps(self.to_record(), sort_keys=True, separators=(",", ":"))


@dataclass
class Trace:
    """A full run: per-round records plus the run's basic parameters.

    decode_fallbacks counts transfer decodes that had no strict majority
    (possible only for transfers whose endpoint windows the adversary broke).
    """

    n: int
    rounds: list = field(default_factory=list)
    decode_fallbacks: int = 0

    def append(self, rt: RoundTrace) -> None:
        self.rounds.append(rt)

    def to_text(self) -> str:
        return "".join(rt.to_line() + "\n" for rt in self.rounds)

    def final_states(self) -> dict:
        return self.rounds[-1].states_after

    def controlled_in(self, round_no: int) -> frozenset:
        return self.rounds[round_no - 1].controlled

    def ever_controlled(self) -> frozenset:
        out = set()
        for rt in self.rounds:
            out |= rt.controlled
        return frozenset(out)


@dataclass
class View:
    """What one processor observes: messages delivered to it and its own states.

    Carries no information about other processors' states or about which
    processors the adversary controlled.
    """

    owner: int
    per_round: list  # (received: dict sender -> payload, own ProcessorState)

    def to_text(self) -> str:
        lines = []
        for rno, (received, state) in enumerate(self.per_round, start=1):
            rec = {
                "round": rno,
                "received": {
                    str(sender): payload_record(p) for sender, p in received.items()
                },
                "state": state.to_record(),
            }
            lines.append(json.dumps(rec, sort_keys=True, separators=(",", ":")))
        return "\n".join(lines) + "\n"


def view_of(trace: Trace, p: int) -> View:
    """Extract processor p's view from a complete trace. Pure in the trace."""
    if not 1 <= p <= trace.n:
        raise ValueError(f"processor {p} out of range 1..{trace.n}")
    per_round = []
    for rt in trace.rounds:
        received = {i: payload for (i, j), payload in rt.sent.items() if j == p}
        per_round.append((received, rt.states_after[p]))
    return View(owner=p, per_round=per_round)
