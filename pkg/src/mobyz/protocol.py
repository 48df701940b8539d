"""The complete-network agreement protocol as pure state transitions.

Each round every processor broadcasts its (high, medium) summary pair. A
pivot processor (index floor(r/2)+1, drifting forward every two rounds) uses
an intermediate threshold so that "medium" support crystallizes into high or
low, which is what lets all honest processors converge.

Thresholds count received messages against multiples of `fault_unit`: the
per-round fault bound m for the bare protocol, m*K when the protocol is run
over a multi-round communication scheme.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .core import EMPTY, MANY, PairMessage, ProcessorState, Value


@dataclass(frozen=True)
class ProtocolParams:
    """Protocol-wide constants. Requires n > 6*fault_unit (the sufficiency
    hypothesis); constructing parameters outside it is an error."""

    n: int
    m: int
    alphabet_size: int = 2
    fault_unit: int = -1  # -1: use m

    def __post_init__(self):
        if self.fault_unit == -1:
            object.__setattr__(self, "fault_unit", self.m)
        if self.m < 0 or self.fault_unit < 0:
            raise ValueError("fault bounds must be non-negative")
        if self.alphabet_size < 1:
            raise ValueError("alphabet must have at least one symbol")
        if self.n <= 6 * self.fault_unit:
            raise ValueError(
                f"need n > 6*faults: n={self.n}, unit={self.fault_unit}"
            )

    def alphabet(self):
        return [Value.plain(i) for i in range(self.alphabet_size)]


def pivot_index(r: int) -> int:
    """The pivot processor for round r (meaningful for r >= 2).

    May exceed n in the very last round, in which case no processor takes
    the pivot role.
    """
    if r < 2:
        raise ValueError("no pivot in round 1")
    return r // 2 + 1


def termination_round(params: ProtocolParams) -> int:
    """The bare protocol stops after 2n rounds."""
    return 2 * params.n


def first_round_state(received: Value) -> ProcessorState:
    """Round 1: adopt whatever the source claims, verbatim."""
    return ProcessorState(high=received, medium=received)


def honest_emit(state: ProcessorState, r: int) -> PairMessage:
    """The identical (high, medium) pair sent to every recipient in round r >= 2."""
    if r < 2:
        raise ValueError("round 1 emission is the source value only")
    return state.emission()


def _summary(support: frozenset) -> Value:
    if len(support) == 0:
        return EMPTY
    if len(support) >= 2:
        return MANY
    return next(iter(support))


def round_update(
    self_id: int,
    state: ProcessorState,
    received: list,
    r: int,
    params: ProtocolParams,
) -> ProcessorState:
    """One honest update for round r >= 2 from exactly n received pairs.

    received[i-1] is the pair from processor i (everyone sends, self
    included). Pure: identical inputs give identical outputs.
    """
    n, unit = params.n, params.fault_unit
    if len(received) != n:
        raise ValueError(f"expected {n} messages, got {len(received)}")
    if r < 2:
        raise ValueError("round_update applies from round 2 on")

    highs = [msg.high for msg in received]
    mediums = [msg.medium for msg in received]
    high_counts = Counter(highs)

    # decision: a value carried by all but at most 2*unit of the highs
    decided = state.decided
    qualifying = [x for x, c in high_counts.items() if c >= n - 2 * unit]
    # two values cannot both clear n-2u senders once n > 4u
    assert len(qualifying) <= 1 or n <= 4 * unit
    if qualifying:
        decided = qualifying[0]

    pivot = pivot_index(r)
    pivot_high = highs[pivot - 1] if pivot <= n else None
    own_threshold = 3 * unit if self_id == pivot else 4 * unit

    # candidates can only be values someone actually sent as a high
    candidates = sorted(set(highs) - {EMPTY}, key=Value.sort_key)

    def member(x: Value, threshold: int) -> bool:
        if pivot_high is not None and pivot_high == x:
            backing = sum(1 for b in mediums if b == x or b == MANY)
            if backing > threshold:
                return True
        return high_counts[x] > threshold

    high_set = frozenset(x for x in candidates if member(x, own_threshold))
    if self_id == pivot:
        medium_set = high_set
    else:
        medium_set = frozenset(x for x in candidates if member(x, 2 * unit))

    return ProcessorState(
        high=_summary(high_set),
        medium=_summary(medium_set),
        high_set=high_set,
        medium_set=medium_set,
        decided=decided,
    )
