import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bidgame import (
    AdvantageTie,
    Configuration,
    Determined,
    NotDetermined,
    RandomTie,
    Reachability,
    RevealFirstAnalysis,
    TransducerTie,
    UnsupportedMechanismError,
    bidding_matrix,
    classify_matrix,
    configurations,
    constant_transducer,
    global_determinacy,
    make_game,
    validate_matrix_lemmas,
)
from bidgame.determinacy import check_matrix_lemmas, scan_nondetermined
from bidgame.fixtures import FIG1_START, fig1_game
from bidgame.generators import random_bidding_game


def test_fig1_start_not_determined():
    spec = fig1_game()
    assert global_determinacy(spec, FIG1_START) == NotDetermined()
    assert str(NotDetermined()) == "NOT DETERMINED"


def test_fig1_nondetermined_set():
    got = {str(c) for c in scan_nondetermined(fig1_game())}
    assert got == {"<v0,1,1,A2>", "<v1,1,1,A2>", "<v1,2,0,A1>", "<v2,1,1,A1>", "<v2,2,0,A2>"}


def test_fig1_target_and_rich_player():
    a = RevealFirstAnalysis(fig1_game())
    assert a.verdict(Configuration("t", 0, 2, "A2")) == Determined(1)
    assert a.verdict(Configuration("v0", 2, 0, "A1")) == Determined(1)


def test_fig1_matrix_is_neither():
    m = bidding_matrix(fig1_game(), FIG1_START)
    assert m.entries == ((2, 1), (1, 2))
    assert (m.rows, m.columns) == (2, 2)
    assert m[0, 1] == 1
    assert classify_matrix(m).kind == "neither"
    assert "rows: Player 1 bid" in m.render()


@pytest.mark.parametrize("entries,kind", [
    (((1, 1), (2, 1)), "one-row"),
    (((1, 2), (1, 2)), "two-column"),
    (((2, 1), (1, 2)), "neither"),
])
def test_classify(entries, kind):
    assert classify_matrix(entries).kind == kind


def test_random_ties_rejected():
    spec = make_game(["t"], [("t", "t")], 0, Reachability(("t",)), RandomTie())
    with pytest.raises(UnsupportedMechanismError):
        RevealFirstAnalysis(spec)


def test_rich_player_wins_reachability():
    # with the whole budget Player 1 wins every bidding that matters
    spec = make_game(["v", "t", "d"], [("v", "t"), ("v", "d"), ("t", "t"), ("d", "d")], 3,
                     Reachability(("t",)), TransducerTie(constant_transducer(2)))
    a = RevealFirstAnalysis(spec)
    assert a.verdict(Configuration("v", 1, 2, "P2")) == Determined(2)
    assert a.verdict(Configuration("v", 3, 0, "P2")) == Determined(1)


# --- lemma checks on corrupted matrices ---------------------------------


def test_lemma_a_detects_column_break():
    cfg = Configuration("v", 2, 2, 1)
    good = ((1, 2, 2), (1, 1, 2), (1, 1, 1))
    assert check_matrix_lemmas(good, cfg, AdvantageTie(1)) == []
    bad = ((1, 2, 2), (1, 1, 1), (1, 1, 1))
    assert any(v.check == "a" for v in check_matrix_lemmas(bad, cfg, AdvantageTie(1)))


def test_lemma_b_detects_diagonal_break():
    tie = TransducerTie(constant_transducer(1))
    cfg = Configuration("v", 1, 1, "P1")
    assert check_matrix_lemmas(((2, 2), (1, 1)), cfg, tie) == []
    assert any(v.check == "b" for v in check_matrix_lemmas(((2, 2), (1, 2)), cfg, tie))


def test_lemma_c_and_d():
    cfg1 = Configuration("v", 1, 1, 1)
    # both neighbours 2 but the tie is 1
    assert any(v.check == "c" for v in check_matrix_lemmas(((2, 2), (2, 1)), cfg1, AdvantageTie(1)))
    cfg2 = Configuration("v", 1, 1, 2)
    assert any(v.check == "d" for v in check_matrix_lemmas(((2, 1), (1, 2)), cfg2, AdvantageTie(1)))
    assert any(v.check == "d" for v in check_matrix_lemmas(((1, 1), (2, 1)), cfg2, AdvantageTie(1)))


# --- properties over random games ----------------------------------------


def _decided_by_bidding(spec, c):
    """False on reachability targets, which are won before any bidding."""
    return not (isinstance(spec.objective, Reachability) and c.vertex in spec.objective.target)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2 ** 32), mechanism=st.sampled_from(["transducer", "advantage"]))
def test_locally_determined_classes(seed, mechanism):
    """For tie-unaware transducers and advantage ties every configuration is
    determined, and NotDetermined coincides with a matrix that is neither."""
    spec = random_bidding_game(random.Random(seed), mechanism)
    a = RevealFirstAnalysis(spec)
    assert a.never_both_violations() == []
    for c in configurations(spec):
        v = a.verdict(c)
        assert isinstance(v, Determined)
        assert validate_matrix_lemmas(spec, c, a) == []
        if _decided_by_bidding(spec, c):
            kind = classify_matrix(bidding_matrix(spec, c, a)).kind
            assert (v == NotDetermined()) == (kind == "neither")


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2 ** 32))
def test_row_and_column_decide_winner(seed):
    spec = random_bidding_game(random.Random(seed), "transducer")
    a = RevealFirstAnalysis(spec)
    for c in filter(lambda c: _decided_by_bidding(spec, c), configurations(spec)):
        kind = classify_matrix(bidding_matrix(spec, c, a)).kind
        if kind == "one-row":
            assert a.verdict(c) == Determined(1)
        elif kind == "two-column":
            assert a.verdict(c) == Determined(2)
