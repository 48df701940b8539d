"""Reliable point-to-point transfer over incomplete networks, plus the
reduction that runs the complete-network protocol on top of such transfers.

Two schemes are provided. The two-round scheme pushes 4m+1 copies through
common neighbors (plus the two direct "pseudo-path" sends when the endpoints
are adjacent) and takes T=2 rounds with endpoint windows K=1. The flooding
scheme repeatedly injects the message into kappa pre-agreed disjoint paths
for T-1 rounds (T = ceil((n-1-4m)/(kappa-4m))), windows K=T-1. Receivers
take a majority vote over the copies that arrive.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from .graphs import Network, common_neighbors, disjoint_paths
from .protocol import ProtocolParams


@dataclass(frozen=True)
class Route:
    """One copy-carrying path with the rounds the sender injects into it."""

    path: tuple  # (u, ..., v); length-1 hops allowed for direct sends
    inject_rounds: tuple


@dataclass(frozen=True)
class TransferPlan:
    sender: int
    receiver: int
    routes: tuple  # of Route; empty for the self-storage plan

    @property
    def is_self(self) -> bool:
        return self.sender == self.receiver


@dataclass
class CommScheme:
    """A (T, K) communication scheme over a fixed network.

    Transfer from u to v succeeds whenever u is non-faulty through the first
    K of the T rounds and v through the last K. Plans are deterministic and
    cached, so all parties pre-agree on them for free.
    """

    kind: str
    network: Network
    m: int
    T: int
    K: int
    kappa: int = 0  # flooding only
    _plans: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not 1 <= self.K <= self.T:
            raise ValueError("endpoint window K must lie within 1..T")

    def plan(self, u: int, v: int) -> TransferPlan:
        key = (u, v)
        if key not in self._plans:
            if self.kind == "two-round":
                self._plans[key] = two_round_plan(self.network, u, v, self.m)
            else:
                self._plans[key] = flood_plan(self.network, u, v, self.m, self.kappa)
        return self._plans[key]


def two_round_plan(g: Network, u: int, v: int, m: int) -> TransferPlan:
    """Length-2 relay routes through the 4m+1 smallest common neighbors.

    Adjacent endpoints use 4m-1 relays plus a direct send in each round;
    u == v stores the value locally and needs no routes.
    """
    if u == v:
        return TransferPlan(u, v, ())
    shared = sorted(common_neighbors(g, u, v))
    if g.adjacent(u, v):
        needed = 4 * m - 1
    else:
        needed = 4 * m + 1
    if len(shared) < needed:
        raise ValueError(
            f"pair ({u},{v}) has {len(shared)} common neighbors, needs {needed}"
        )
    routes = [
        Route(path=(u, w, v), inject_rounds=(1,)) for w in shared[:needed]
    ]
    if g.adjacent(u, v):
        routes.append(Route(path=(u, v), inject_rounds=(1,)))  # send now, v holds it
        routes.append(Route(path=(u, v), inject_rounds=(2,)))  # send again next round
    return TransferPlan(u, v, tuple(routes))


def compute_T(n: int, m: int, kappa: int) -> int:
    """Rounds needed by the flooding scheme: ceil((n-1-4m)/(kappa-4m))."""
    if kappa <= 4 * m:
        raise ValueError(f"kappa={kappa} must exceed 4m={4 * m}")
    return -((n - 1 - 4 * m) // -(kappa - 4 * m))


def flood_plan(g: Network, u: int, v: int, m: int, kappa: int) -> TransferPlan:
    """kappa disjoint paths, injected every round from 1 to T-1.

    With T=2 this is just the two-round scheme. Adjacent endpoints exchange
    directly in round 2 (the clock still runs the full T rounds).
    """
    T = compute_T(g.n, m, kappa)
    if T == 2:
        return two_round_plan(g, u, v, m)
    if u == v:
        return TransferPlan(u, v, ())
    if g.adjacent(u, v):
        return TransferPlan(u, v, (Route(path=(u, v), inject_rounds=(2,)),))
    system = disjoint_paths(g, u, v, kappa)
    routes = tuple(
        Route(path=path, inject_rounds=tuple(range(1, T)))
        for path in system.paths
    )
    return TransferPlan(u, v, routes)


def two_round_scheme(g: Network, m: int) -> CommScheme:
    return CommScheme(kind="two-round", network=g, m=m, T=2, K=1)


def flood_scheme(g: Network, m: int, kappa: int) -> CommScheme:
    T = compute_T(g.n, m, kappa)
    if T < 2:
        raise ValueError("complete network: run the bare protocol instead")
    return CommScheme(kind="flood", network=g, m=m, T=T, K=T - 1, kappa=kappa)


def _decode(copies: list):
    if not copies:
        raise ValueError("cannot decode an empty copy list")
    counts = Counter(copies)
    top = max(counts.values())
    winner = min((x for x, c in counts.items() if c == top), key=lambda x: x.sort_key())
    return winner, 2 * top <= len(copies)


def majority_decode(copies: list):
    """The strict-majority value among copies.

    Falls back to the canonically smallest most-frequent value when no strict
    majority exists; that branch is unreachable while the scheme's
    preconditions hold, so taking it is logged.
    """
    value, fell_back = _decode(copies)
    if fell_back:
        logging.getLogger(__name__).warning(
            "no strict majority among %d copies; deterministic fallback to %s",
            len(copies), value,
        )
    return value


# --- transfer execution --------------------------------------------------------


@dataclass
class Copy:
    route_id: int
    at: int  # index into the route path of the current holder
    value: object
    tainted: bool


@dataclass(frozen=True)
class TransferOutcome:
    """What the receiver ends up with: every (route, arrival round, value)
    copy it collected, the majority-decoded value, and whether the decode had
    to fall back past a missing strict majority (never, while the scheme's
    preconditions hold)."""

    copies: tuple
    decoded: object
    fell_back: bool


@dataclass
class TransferRun:
    """Marches copies along one plan's routes, one hop per round.

    The engine drives it: step() once per round with the currently controlled
    set and a corruption oracle, then decode() after round T. Copies held by
    a controlled processor (including the receiver's collected ones) are
    adversary-chosen and marked tainted — ground truth for the checkers.
    """

    plan: TransferPlan
    payload_fn: object  # round -> payload the sender would inject
    in_flight: list = field(default_factory=list)
    collected: list = field(default_factory=list)  # (route_id, arrival, value, tainted)

    def step(self, t: int, controlled, corrupt, record_hop=None) -> None:
        if self.plan.is_self:
            return
        u = self.plan.sender
        moved = []
        for copy in self.in_flight:
            path = self.plan.routes[copy.route_id].path
            holder = path[copy.at]
            value, tainted = copy.value, copy.tainted
            if holder in controlled:  # forwards whatever the adversary says
                value, tainted = corrupt(holder), True
            nxt = copy.at + 1
            receiver = path[nxt]
            if record_hop is not None:
                record_hop(holder, receiver, self.plan, copy.route_id, value)
            if receiver in controlled:  # stores whatever the adversary says
                value, tainted = corrupt(receiver), True
            if receiver == self.plan.receiver:
                self.collected.append((copy.route_id, t, value, tainted))
            else:
                moved.append(Copy(copy.route_id, nxt, value, tainted))
        self.in_flight = moved
        for route_id, route in enumerate(self.plan.routes):
            if t not in route.inject_rounds:
                continue
            value = self.payload_fn(t)
            tainted = False
            if u in controlled:
                value, tainted = corrupt(u), True
            first = route.path[1]
            if record_hop is not None:
                record_hop(u, first, self.plan, route_id, value)
            if first in controlled:
                value, tainted = corrupt(first), True
            if first == self.plan.receiver:
                self.collected.append((route_id, t, value, tainted))
            else:
                self.in_flight.append(Copy(route_id, 1, value, tainted))

    def receiver_controlled(self, corrupt) -> None:
        """The receiver's stored copies are rewritten while it is controlled."""
        self.collected = [
            (rid, arr, corrupt(self.plan.receiver), True)
            for (rid, arr, _v, _t) in self.collected
        ]

    def decode(self):
        return _decode([v for (_r, _a, v, _t) in self.collected])

    def outcome(self) -> TransferOutcome:
        decoded, fell_back = self.decode()
        return TransferOutcome(
            copies=tuple((r, a, v) for (r, a, v, _t) in self.collected),
            decoded=decoded,
            fell_back=fell_back,
        )

    def tainted_count(self) -> int:
        return sum(1 for (_r, _a, _v, t) in self.collected if t)


# --- the reduction to the complete-network protocol -----------------------------


@dataclass(frozen=True)
class LiftedProtocol:
    """The complete-network protocol run over a (T, K) scheme.

    Each of the 2n logical rounds takes T physical rounds in which every
    ordered pair transfers; all thresholds use fault unit m*K.
    """

    scheme: CommScheme
    params: ProtocolParams

    @property
    def physical_rounds(self) -> int:
        return 2 * self.params.n * self.scheme.T

    @property
    def logical_rounds(self) -> int:
        return 2 * self.params.n


def lift(scheme: CommScheme, params: ProtocolParams) -> LiftedProtocol:
    """Validate K < n/(6m) and build the lifted protocol description."""
    n, m, K = params.n, params.m, scheme.K
    if 6 * m * K >= n:
        raise ValueError(
            f"scheme window K={K} is not below n/(6m) = {Fraction(n, 6 * m)}"
        )
    lifted_params = ProtocolParams(
        n=n, m=m, alphabet_size=params.alphabet_size, fault_unit=m * K
    )
    return LiftedProtocol(scheme=scheme, params=lifted_params)


def kappa_sufficiency_bounds(n: int, m: int):
    """Both sufficient connectivity thresholds, as exact rationals.

    Returns (general bound 10m - 24m^2/n - 6m/n, ratio-form bound for
    A = n/m: (A/2+2)m when 6 < A <= 12, (10-24/A)m when A >= 12; the two
    ratio forms agree at A = 12).
    """
    if n <= 6 * m:
        raise ValueError("bounds assume n > 6m")
    general = 10 * m - Fraction(24 * m * m, n) - Fraction(6 * m, n)
    A = Fraction(n, m)
    if A <= 12:
        ratio_form = (A / 2 + 2) * m
    else:
        ratio_form = (10 - Fraction(24, 1) / A) * m
    return general, ratio_form
