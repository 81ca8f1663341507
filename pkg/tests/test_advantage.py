import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bidgame import (
    AdvantageTie,
    Buchi,
    Configuration,
    InternalConsistencyError,
    Reachability,
    Threshold,
    UnsupportedMechanismError,
    configurations,
    make_game,
    threshold_frontier,
    validate_advantage_monotonicity,
)
from bidgame.advantage import check_monotonicity, frontier_from_table, winning_table
from bidgame.generators import random_bidding_game


def test_threshold_ordering():
    assert Threshold(1, True).rank == 3
    assert Threshold.from_rank(4) == Threshold(2, False)
    assert str(Threshold(0, True)) == "0*"
    assert Threshold(1, False).rank < Threshold(1, True).rank < Threshold(2, False).rank


def test_frontier_of_small_game(advantage_game):
    f = threshold_frontier(advantage_game)
    assert f.thresholds == {"v": Threshold(0, True), "t": Threshold(0, False), "d": Threshold(1, False)}
    assert f.wins(Configuration("v", 0, 2, 1))
    assert not f.wins(Configuration("v", 0, 2, 2))
    assert "v: 0*" in f.render()


def test_unwinnable_vertex():
    spec = make_game(["v", "t", "d"], [("v", "d"), ("t", "t"), ("d", "d")], 2, Reachability(("t",)), AdvantageTie(1))
    f = threshold_frontier(spec)
    assert f.thresholds["v"] is None
    assert "unwinnable at this N" in f.render()


def test_frontier_needs_reachability():
    spec = make_game(["a"], [("a", "a")], 1, Buchi(("a",)), AdvantageTie(1))
    with pytest.raises(UnsupportedMechanismError):
        threshold_frontier(spec)
    # monotonicity is checked for any objective
    assert validate_advantage_monotonicity(spec) == []


def test_corrupted_table_is_not_upward_closed(advantage_game):
    table = winning_table(advantage_game)
    table[Configuration("v", 2, 0, 1)] = 2  # richest Player 1 now loses
    with pytest.raises(InternalConsistencyError):
        frontier_from_table(advantage_game, table)


def test_corrupted_table_breaks_monotonicity(advantage_game):
    table = winning_table(advantage_game)
    assert check_monotonicity(advantage_game, table) == []
    bad = dict(table)
    bad[Configuration("v", 0, 2, 1)] = 1
    bad[Configuration("v", 1, 1, 2)] = 2  # trading the advantage for a unit fails
    checks = {v.check for v in check_monotonicity(advantage_game, bad)}
    assert "b" in checks
    bad = dict(table)
    bad[Configuration("d", 1, 1, 2)] = 1
    bad[Configuration("d", 1, 1, 1)] = 2  # gaining the advantage hurts Player 1
    assert "a" in {v.check for v in check_monotonicity(advantage_game, bad)}


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2 ** 32))
def test_frontier_matches_table(seed):
    spec = random_bidding_game(random.Random(seed), "advantage", kinds=("reachability",))
    table = winning_table(spec)
    f = threshold_frontier(spec)
    for c in configurations(spec):
        assert f.wins(c) == (table[c] == 1)
    assert validate_advantage_monotonicity(spec, table=table) == []
