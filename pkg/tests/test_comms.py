import itertools
import random
from fractions import Fraction

import pytest

from mobyz import (
    EMPTY,
    MANY,
    ProtocolParams,
    TransferRun,
    Value,
    complete_minus_matching,
    complete_network,
    compute_T,
    flood_plan,
    flood_scheme,
    kappa_sufficiency_bounds,
    lift,
    majority_decode,
    make_two_clique_network,
    two_round_plan,
    two_round_scheme,
)

ZERO, ONE = Value.plain(0), Value.plain(1)


# --- two-round plans ---------------------------------------------------------


def test_two_round_plan_non_adjacent():
    g = complete_minus_matching(7, 1)
    plan = two_round_plan(g, 1, 2, 1)
    # 4m+1 = 5 length-2 relays through the smallest common neighbors
    assert [r.path for r in plan.routes] == [
        (1, 3, 2), (1, 4, 2), (1, 5, 2), (1, 6, 2), (1, 7, 2)
    ]
    assert all(r.inject_rounds == (1,) for r in plan.routes)


def test_two_round_plan_adjacent_uses_direct_sends():
    plan = two_round_plan(complete_network(7), 1, 2, 1)
    assert [r.path for r in plan.routes] == [
        (1, 3, 2), (1, 4, 2), (1, 5, 2), (1, 2), (1, 2)
    ]
    assert plan.routes[-2].inject_rounds == (1,)
    assert plan.routes[-1].inject_rounds == (2,)
    assert len(plan.routes) == 5  # 4m+1 routes either way


def test_two_round_plan_self_is_trivial():
    plan = two_round_plan(complete_network(7), 3, 3, 1)
    assert plan.is_self and plan.routes == ()


def test_two_round_plan_insufficient_neighbors_names_pair():
    g = make_two_clique_network(4, 4)  # cross-clique pairs share only 4
    with pytest.raises(ValueError, match=r"\(1,5\).*4 common neighbors.*needs 5"):
        two_round_plan(g, 1, 5, 1)


def test_two_round_exhaustive_one_fault_per_round():
    """Every placement of one controlled processor per round that respects the
    endpoint windows still decodes correctly, for every corruption value."""
    g = complete_minus_matching(7, 1)
    cases = 0
    for u, v in ((1, 2), (1, 3)):  # removed edge (non-adjacent) and adjacent
        plan = two_round_plan(g, u, v, 1)
        for c1, c2 in itertools.product(range(1, 8), repeat=2):
            if c1 == u or c2 == v:
                continue  # the endpoint windows: u honest in 1, v honest in 2
            for lie in (ZERO, MANY, EMPTY):
                tr = TransferRun(plan=plan, payload_fn=lambda t: ONE)
                tr.step(1, {c1}, lambda pid: lie)
                if v == c1:
                    tr.receiver_controlled(lambda pid: lie)
                tr.step(2, {c2}, lambda pid: lie)
                decoded, fell_back = tr.decode()
                assert decoded == ONE and not fell_back, (u, v, c1, c2, lie)
                assert tr.tainted_count() <= 2
                cases += 1
    assert cases == 2 * 36 * 3


def test_two_round_sound_on_every_qualifying_small_graph():
    """Exhaustive soundness sweep: every connected graph on <= 7 vertices
    whose pairs all meet the common-neighbor requirement, every ordered pair,
    every admissible one-fault-per-round placement."""
    nx = pytest.importorskip("networkx")
    from networkx.generators.atlas import graph_atlas_g

    from mobyz import Network

    qualifying = 0
    for G in graph_atlas_g():
        n = G.number_of_nodes()
        if n < 5 or not nx.is_connected(G):
            continue
        g = Network(n, [(a + 1, b + 1) for a, b in G.edges()])
        try:
            plans = {
                (u, v): two_round_plan(g, u, v, 1)
                for u in g.vertices
                for v in g.vertices
                if u != v
            }
        except ValueError:
            continue
        qualifying += 1
        for (u, v), plan in plans.items():
            for c1, c2 in itertools.product(range(1, n + 1), repeat=2):
                if c1 == u or c2 == v:
                    continue
                tr = TransferRun(plan=plan, payload_fn=lambda t: ONE)
                tr.step(1, {c1}, lambda pid: ZERO)
                if v == c1:
                    tr.receiver_controlled(lambda pid: ZERO)
                tr.step(2, {c2}, lambda pid: ZERO)
                decoded, fell_back = tr.decode()
                assert decoded == ONE and not fell_back, (g.edges(), u, v, c1, c2)
    # the family at this scale: K5, K6, K7 and K7 minus matchings
    assert qualifying == 6


# --- flooding ---------------------------------------------------------------


def test_compute_T_examples():
    assert compute_T(25, 2, 12) == 4
    assert compute_T(13, 1, 9) == 2
    assert compute_T(13, 1, 5) == 8
    with pytest.raises(ValueError):
        compute_T(12, 1, 4)


def test_compute_T_satisfies_sufficient_inequality():
    for n in range(8, 40):
        for m in (1, 2):
            for kappa in range(4 * m + 1, n):
                T = compute_T(n, m, kappa)
                assert T > Fraction(n - 2 - 4 * m, kappa - 4 * m)


def test_flood_plan_uses_kappa_paths_and_all_inject_rounds():
    g = make_two_clique_network(4, 5)  # n=13, kappa=5, T=8
    plan = flood_plan(g, 1, 5, 1, 5)
    assert len(plan.routes) == 5
    assert all(r.inject_rounds == tuple(range(1, 8)) for r in plan.routes)


def test_flood_plan_delegates_to_two_round_when_T_is_two():
    g = complete_minus_matching(13, 1)  # kappa = 11, T = 2
    assert compute_T(13, 1, 11) == 2
    plan = flood_plan(g, 1, 2, 1, 11)
    assert all(len(r.path) == 3 for r in plan.routes)  # length-2 relays


def test_flood_plan_adjacent_direct_exchange_in_round_two():
    g = make_two_clique_network(4, 5)
    plan = flood_plan(g, 1, 9, 1, 5)  # bridge vertex, adjacent
    assert [r.path for r in plan.routes] == [(1, 9)]
    assert plan.routes[0].inject_rounds == (2,)


def test_flood_plan_rejects_low_kappa():
    g = make_two_clique_network(4, 4)
    with pytest.raises(ValueError, match="must exceed 4m"):
        flood_plan(g, 1, 5, 1, 4)


def test_flood_counting_and_decode_under_window_respecting_adversary():
    g = make_two_clique_network(4, 5)
    n, m, kappa, T = 13, 1, 5, 8
    plan = flood_plan(g, 1, 5, m, kappa)
    guaranteed = kappa * T - n + 2
    budget = 2 * m * (T - 1)
    assert budget < Fraction(guaranteed, 2)
    for seed in range(300):
        rng = random.Random(seed)
        tr = TransferRun(plan=plan, payload_fn=lambda t: ONE)
        for t in range(1, T + 1):
            allowed = [
                p for p in range(1, n + 1)
                if not (p == 1 and t <= T - 1) and not (p == 5 and t >= 2)
            ]
            tr.step(t, {rng.choice(allowed)}, lambda pid: ZERO)
        assert len(tr.collected) >= guaranteed
        assert tr.tainted_count() <= budget
        decoded, fell_back = tr.decode()
        assert decoded == ONE and not fell_back


# --- majority decode -----------------------------------------------------------


def test_majority_examples():
    assert majority_decode([ONE, ONE, ONE, ZERO, ZERO]) == ONE
    assert majority_decode([ONE] * 5) == ONE
    with pytest.raises(ValueError):
        majority_decode([])


def test_majority_exhaustive_small_scale():
    # 7 copies, up to 3 corrupted to arbitrary values: strict majority forces
    # the original through every corruption pattern
    pool = [ZERO, ONE, EMPTY, MANY]
    for positions in itertools.combinations(range(7), 3):
        for lies in itertools.product(pool, repeat=3):
            copies = [ONE] * 7
            for pos, lie in zip(positions, lies):
                copies[pos] = lie
            assert majority_decode(copies) == ONE


def test_majority_25_copies_12_corrupted():
    copies = [ONE] * 13 + [ZERO] * 12
    assert majority_decode(copies) == ONE


def test_majority_fallback_is_canonical_smallest():
    assert majority_decode([ZERO, ONE]) == ZERO
    assert majority_decode([MANY, ONE, ZERO, ZERO, ONE]) == ZERO


# --- the lifting reduction --------------------------------------------------------


def test_lift_two_round_scheme():
    g = complete_minus_matching(12, 1)
    lifted = lift(two_round_scheme(g, 1), ProtocolParams(n=12, m=1))
    assert lifted.physical_rounds == 48
    assert lifted.params.fault_unit == 1


def test_lift_flood_scheme():
    g25 = make_two_clique_network(8, 9)  # n=25, kappa=9, so T=4 and K=3
    scheme = flood_scheme(g25, 1, 9)
    assert (scheme.T, scheme.K) == (4, 3)
    lifted = lift(scheme, ProtocolParams(n=25, m=1))  # 3 < 25/6
    assert lifted.params.fault_unit == 3
    assert lifted.physical_rounds == 2 * 25 * 4


def test_lift_rejects_wide_windows():
    class FakeScheme:
        T, K, m = 4, 3, 1

    with pytest.raises(ValueError, match="n/\\(6m\\)"):
        lift(FakeScheme(), ProtocolParams(n=18, m=1))
    # and the same window is fine with more processors
    assert lift(FakeScheme(), ProtocolParams(n=25, m=1)).params.fault_unit == 3


# --- sufficiency bounds --------------------------------------------------------


def test_kappa_bounds_regime_table():
    # at the regime boundary A=12 both ratio formulas give 8m
    for m in (1, 2, 3):
        general, ratio_form = kappa_sufficiency_bounds(12 * m, m)
        assert ratio_form == 8 * m
        A = Fraction(12)
        assert (A / 2 + 2) * m == (10 - 24 / A) * m == 8 * m
        assert general == 10 * m - Fraction(24 * m * m, 12 * m) - Fraction(6 * m, 12 * m)

    general, ratio_form = kappa_sufficiency_bounds(24, 1)
    assert ratio_form == 9  # (10 - 24/24) * 1

    general, _ = kappa_sufficiency_bounds(25, 1)
    assert general == Fraction(44, 5)  # 10 - 24/25 - 6/25 = 8.8, exactly

    with pytest.raises(ValueError):
        kappa_sufficiency_bounds(6, 1)


def test_kappa_bounds_low_ratio_regime():
    general, ratio_form = kappa_sufficiency_bounds(8, 1)  # A = 8
    assert ratio_form == Fraction(8, 2) + 2  # (A/2 + 2) * m = 6
    assert general == 10 - Fraction(24, 8) - Fraction(6, 8)
