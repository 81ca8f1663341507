import io
import random

import pytest
from conftest import coin_game
from hypothesis import given, settings
from hypothesis import strategies as st

from bidgame import (
    BidGameError,
    Configuration,
    Determined,
    IllegalBidError,
    RandomTie,
    Reachability,
    RevealFirstAnalysis,
    SplitMix64,
    StrategyError,
    TransducerTie,
    configurations,
    constant_transducer,
    make_game,
    play_deterministic,
    play_random,
    play_steps,
)
from bidgame.fixtures import FIG1_START, fig1_game, scc_buchi_game, scc_buchi_start
from bidgame.generators import random_bidding_game, strongly_connected_edges, vertex_names
from bidgame.sim import (
    ConstantZero,
    Optimal,
    Scripted,
    build_scc_strategy,
    coverage_step,
    exhaustion_step,
    interactive_session,
    play_round,
    random_scripted,
    run_scc_buchi_experiment,
)


def test_splitmix64_reference_values():
    g = SplitMix64(0)
    assert g.next() == 0xE220A8397B1DCDAF
    assert g.next() == 0x6E789E6AA1B965F4
    coins = [SplitMix64(7).coin() for _ in range(3)]
    assert coins[0] == coins[1] == coins[2] and coins[0] in (1, 2)


def test_round_transcript_line():
    spec = fig1_game()
    s1 = Scripted(spec, 1, {FIG1_START: (0, "v1", True)})
    s2 = Scripted(spec, 2, {FIG1_START: (1, "v1", True)})
    r = play_round(spec, FIG1_START, (s1, s2), (None, None))
    assert r.resolution == "win2" and r.winner == 2
    assert r.line(0) == "0 v0 1 1 A2 0 1 win2 <v1,2,0,A2>"


def test_scripted_strategy_missing_entry():
    spec = fig1_game()
    s = Scripted(spec, 1, {})
    with pytest.raises(StrategyError):
        s.bid(FIG1_START, None)


def test_illegal_bid_is_rejected():
    spec = fig1_game()
    s1 = Scripted(spec, 1, {FIG1_START: (2, "t", True)})
    s2 = ConstantZero(spec, 2)
    with pytest.raises(IllegalBidError):
        play_round(spec, FIG1_START, (s1, s2), (None, None))


def test_budget_conserved_along_plays():
    spec = fig1_game()
    rng = random.Random(1)
    rec = play_steps(spec, FIG1_START, random_scripted(spec, 1, rng), random_scripted(spec, 2, rng), 50)
    assert all(c.budget1 + c.budget2 == 2 for c in rec.configurations)
    assert len(rec.rounds) == 50


def test_lasso_detection():
    spec = fig1_game()
    rec = play_deterministic(spec, Configuration("v0", 2, 0, "A1"), ConstantZero(spec, 1), ConstantZero(spec, 2))
    assert rec.lasso_start is not None
    assert rec.outcome == 2  # the ties keep the token on v0 -> v1 -> v2 -> v0


def test_random_play_is_reproducible():
    spec = coin_game()
    start = Configuration("v", 0, 0)
    a = [play_random(spec, start, ConstantZero(spec, 1, ("t",)), ConstantZero(spec, 2, ("d",)), seed, 10).outcome
         for seed in range(20)]
    b = [play_random(spec, start, ConstantZero(spec, 1, ("t",)), ConstantZero(spec, 2, ("d",)), seed, 10).outcome
         for seed in range(20)]
    assert a == b
    assert set(a) == {1, 2}  # both coin outcomes show up


def test_random_play_needs_random_ties():
    spec = fig1_game()
    with pytest.raises(BidGameError):
        play_random(spec, FIG1_START, ConstantZero(spec, 1), ConstantZero(spec, 2), 0, 5)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2 ** 32), mechanism=st.sampled_from(["transducer", "advantage"]))
def test_optimal_strategy_wins(seed, mechanism):
    """The winner's extracted strategy beats random memoryless opponents."""
    rng = random.Random(seed)
    spec = random_bidding_game(rng, mechanism, max_vertices=4, max_budget=3)
    a = RevealFirstAnalysis(spec)
    players = {1: Optimal(spec, 1, a), 2: Optimal(spec, 2, a)}
    for c in configurations(spec):
        v = a.verdict(c)
        if not isinstance(v, Determined):
            continue
        w = v.winner
        for _ in range(3):
            other = random_scripted(spec, 3 - w, rng)
            s1, s2 = (players[1], other) if w == 1 else (other, players[2])
            assert play_deterministic(spec, c, s1, s2).outcome == w


def test_optimal_on_fig1_from_determined_configurations():
    spec = fig1_game()
    a = RevealFirstAnalysis(spec)
    rng = random.Random(4)
    for c in configurations(spec):
        v = a.verdict(c)
        if v == Determined(1):
            rec = play_deterministic(spec, c, Optimal(spec, 1, a), random_scripted(spec, 2, rng))
            assert rec.outcome == 1


def test_scc_strategy_covers_every_vertex():
    rng = random.Random(9)
    vs = vertex_names(5)
    spec = make_game(vs, strongly_connected_edges(rng, vs), 3, Reachability(("v0",)),
                     TransducerTie(constant_transducer(1)))
    s1 = build_scc_strategy(spec)
    rec = play_steps(spec, Configuration("v2", 0, 3, "P1"), s1, random_scripted(spec, 2, rng), 10 * 5 * 5)
    assert coverage_step(rec, vs) is not None
    assert exhaustion_step(rec) <= len(rec.rounds)


def test_scc_strategy_requires_player1_ties():
    vs = vertex_names(3)
    spec = make_game(vs, strongly_connected_edges(random.Random(0), vs), 1, Reachability(("v0",)),
                     TransducerTie(constant_transducer(2)))
    with pytest.raises(BidGameError, match="prefers Player 1"):
        build_scc_strategy(spec)
    spec = make_game(vs, [("v0", "v1"), ("v1", "v1"), ("v2", "v0")], 1, Reachability(("v0",)), RandomTie())
    with pytest.raises(BidGameError, match="strongly connected"):
        build_scc_strategy(spec)


def test_scc_buchi_fixture():
    spec = scc_buchi_game(3, 1)
    a = RevealFirstAnalysis(spec)
    assert a.verdict(scc_buchi_start(3, 1)) == Determined(2)
    cases = run_scc_buchi_experiment(3)
    assert [c.max_v3_visits for c in cases] == [0, 0, 1, 1, 2, 2, 3, 3]


def test_interactive_session():
    spec = fig1_game()
    stdin = io.StringIO("hint\n0\nt\n")
    stdout = io.StringIO()
    rec = interactive_session(spec, Configuration("v0", 1, 1, "A1"), 1, stdin, stdout)
    text = stdout.getvalue()
    assert "rows: Player 1 bid" in text
    assert rec.outcome == 1 and "Player 1 wins" in text


def test_interactive_session_quits_on_eof():
    spec = fig1_game()
    rec = interactive_session(spec, FIG1_START, 2, io.StringIO(""), io.StringIO())
    assert rec.truncated and rec.rounds == []
