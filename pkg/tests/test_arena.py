import dataclasses
import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bidgame import (
    AdvantageTie,
    BiddingArena,
    Buchi,
    GameReferenceError,
    GameSemanticError,
    GameSpec,
    GameSyntaxError,
    Muller,
    Parity,
    RandomTie,
    Reachability,
    TieTransducer,
    TransducerRule,
    TransducerTie,
    make_game,
    parse_game,
    serialize_game,
    validate_spec,
)
from bidgame.fixtures import fig1_game, fig2_game
from bidgame.generators import random_bidding_game

MINIMAL = """{
  "vertices": ["t"],
  "edges": [["t", "t"]],
  "totalBudget": 0,
  "objective": {"type": "reachability", "target": ["t"]},
  "tie": {"type": "advantage", "holder": 1}
}
"""


def test_minimal_document():
    spec = parse_game(MINIMAL.encode())
    assert spec.vertices == ("t",)
    assert spec.tie == AdvantageTie(1)
    assert serialize_game(spec).decode() == MINIMAL


def test_vertex_without_successor():
    doc = json.loads(MINIMAL)
    doc["vertices"].append("v")
    with pytest.raises(GameSemanticError) as exc:
        parse_game(json.dumps(doc))
    assert any("vertex without successor" in v for v in exc.value.violations)


def test_syntax_error_has_position():
    with pytest.raises(GameSyntaxError) as exc:
        parse_game(b'{\n  "vertices": [\n  ,]\n}')
    assert exc.value.line == 3
    assert exc.value.column is not None


@pytest.mark.parametrize("field,value", [
    ("vertices", "t"),
    ("totalBudget", "two"),
    ("objective", {"type": "cobuchi", "set": ["t"]}),
    ("tie", {"type": "advantage", "holder": 3}),
])
def test_malformed_fields(field, value):
    doc = json.loads(MINIMAL)
    doc[field] = value
    with pytest.raises(GameSyntaxError):
        parse_game(json.dumps(doc))


def test_reference_error_names_vertex():
    doc = json.loads(MINIMAL)
    doc["objective"]["target"] = ["nowhere"]
    with pytest.raises(GameReferenceError, match="nowhere"):
        parse_game(json.dumps(doc))


def test_fig1_fixture():
    spec = fig1_game()
    assert len(spec.vertices) == 4 and spec.total_budget == 2
    assert spec.tie.transducer.states == ("A1", "A2")
    assert validate_spec(spec) == []


@pytest.mark.parametrize("build", [fig1_game, lambda: fig2_game(4)])
def test_fixture_round_trip(build):
    spec = build()
    data = serialize_game(spec)
    again = parse_game(data)
    assert again == spec
    assert again.tie.transducer.rules == spec.tie.transducer.rules
    assert serialize_game(again) == data


def test_serialization_is_deterministic():
    a = serialize_game(parse_game(MINIMAL))
    b = serialize_game(parse_game(MINIMAL))
    assert a == b


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2 ** 32), mechanism=st.sampled_from(["transducer", "advantage", "random"]))
def test_round_trip_property(seed, mechanism):
    spec = random_bidding_game(random.Random(seed), mechanism)
    once = parse_game(serialize_game(spec))
    assert once == spec
    assert parse_game(serialize_game(once)) == once


# --- mutation of valid fixtures: every invariant is reported ------------


def _mutate_arena(spec, **changes):
    return GameSpec(dataclasses.replace(spec.arena, **changes), spec.objective, spec.tie)


def _with_transducer(spec, **changes):
    t = dataclasses.replace(spec.tie.transducer, **changes)
    return GameSpec(spec.arena, spec.objective, TransducerTie(t))


MUTATIONS = {
    "duplicate vertex": lambda s: _mutate_arena(s, vertices=s.vertices + ("v0",)),
    "empty vertex name": lambda s: _mutate_arena(s, vertices=s.vertices + ("",), edges=s.arena.edges + (("", ""),)),
    "unknown vertex": lambda s: _mutate_arena(s, edges=s.arena.edges + (("v0", "zz"),)),
    "vertex without successor": lambda s: _mutate_arena(s, edges=tuple(e for e in s.arena.edges if e[0] != "t")),
    "total budget": lambda s: _mutate_arena(s, total_budget=-1),
    "unknown vertex in objective": lambda s: GameSpec(s.arena, Reachability(("zz",)), s.tie),
    "initial state": lambda s: _with_transducer(s, initial="A3"),
    "output of state": lambda s: _with_transducer(s, output={"A1": 1, "A2": 3}),
    "unknown transducer state": lambda s: _with_transducer(
        s, rules=s.tie.transducer.rules + (TransducerRule("A1", target="A9"),)),
    "tie-unaware": lambda s: _with_transducer(s, tie_aware=False),
    "non-total transition": lambda s: _with_transducer(s, rules=s.tie.transducer.rules[:2]),
    "advantage holder": lambda s: GameSpec(s.arena, s.objective, AdvantageTie(0)),
}


@pytest.mark.parametrize("name", sorted(MUTATIONS))
def test_mutations_are_reported(name):
    spec = fig1_game()
    report = validate_spec(MUTATIONS[name](spec))
    assert any(name.split()[0] in m for m in report), report


def test_objective_mutations():
    arena = BiddingArena(("a", "b"), (("a", "b"), ("b", "a")), 1)
    cases = [
        (Parity((("a", 1),)), "priority not defined"),
        (Parity((("a", 0), ("b", 1))), "positive integer"),
        (Muller(((),)), "empty Muller set"),
        (Muller((("a", "zz"),)), "unknown vertex"),
        (Buchi(("zz",)), "unknown vertex"),
    ]
    for obj, expected in cases:
        report = validate_spec(GameSpec(arena, obj, RandomTie()))
        assert any(expected in m for m in report), (obj, report)


def test_transducer_step_and_letter():
    t = TieTransducer(("p", "q"), "p", {"p": 1, "q": 2}, False, (
        TransducerRule("p", vertex="b", target="q"),
        TransducerRule("*", target="p"),
    ))
    letter = t.letter("b", 2, True, 1)
    assert letter.tie is None  # tie-unaware transducers never see ties
    assert t.step("p", letter) == "q"
    assert t.step("q", letter) == "p"


def test_make_game_validates():
    with pytest.raises(GameSemanticError):
        make_game(["a"], [], 0, Reachability(("a",)), RandomTie())
