"""Built-in example games.

The figures these games come from are not available, so the arenas are
rebuilt from the worked examples around them (see the decisions notes for
how each edge set was settled).
"""
from __future__ import annotations

from .arena import Buchi, GameSpec, Reachability, TieTransducer, TransducerRule, TransducerTie, make_game
from .configgraph import Configuration, build_alternating_transducer
from .sim import SCC_BUCHI_EDGES, SCC_BUCHI_VERTICES, scc_buchi_game  # noqa: F401  re-exported

# v2 -> v1 lets Player 2 turn back before v0; without it Player 1 wins
# every configuration of this arena.
FIG1_VERTICES = ("v0", "v1", "v2", "t")
FIG1_EDGES = (("v0", "v1"), ("v0", "t"), ("v1", "v2"), ("v2", "v0"), ("v2", "v1"), ("t", "t"))
FIG1_START = Configuration("v0", 1, 1, "A2")


def fig1_game() -> GameSpec:
    """Reachability of ``t`` with alternating tie-breaking and N = 2."""
    return make_game(FIG1_VERTICES, FIG1_EDGES, 2, Reachability(("t",)), TransducerTie(build_alternating_transducer()))


# Example 1, Player 2 revealing first: (bid1, bid2, mover's vertex, configuration reached)
EXAMPLE1_LINE = (
    (0, 1, "v1", Configuration("v1", 2, 0, "A2")),
    (0, 0, "v2", Configuration("v2", 2, 0, "A1")),
    (1, 0, "v0", Configuration("v0", 1, 1, "A1")),
)
# last round: Player 1 bids 1 and moves to t; Player 2 answers 1 or 0
EXAMPLE1_FINISH = {1: Configuration("t", 0, 2, "A2"), 0: Configuration("t", 0, 2, "A1")}


FIG2_VERTICES = ("v1", "v2")
FIG2_EDGES = tuple((u, v) for u in FIG2_VERTICES for v in FIG2_VERTICES)


def first_tie_transducer() -> TieTransducer:
    """A tie in the first bidding hands every later tie to Player 2;
    otherwise Player 1 wins all ties."""
    return TieTransducer(
        states=("first", "p2", "p1"),
        initial="first",
        output={"first": 2, "p2": 2, "p1": 1},
        tie_aware=True,
        rules=(
            TransducerRule("first", tie=True, target="p2"),
            TransducerRule("first", tie=False, target="p1"),
            TransducerRule("p2", target="p2"),
            TransducerRule("p1", target="p1"),
        ),
    )


def fig2_game(total_budget: int) -> GameSpec:
    """Büchi game on two vertices (accepting ``v1``), all four edges."""
    return make_game(FIG2_VERTICES, FIG2_EDGES, total_budget, Buchi(("v1",)), TransducerTie(first_tie_transducer()))


def fig2_start(vertex: str, budget1: int, total_budget: int) -> Configuration:
    return Configuration(vertex, budget1, total_budget - budget1, "first")


def scc_buchi_start(budget1: int, holder: int) -> Configuration:
    return Configuration("v1", budget1, 0, holder)
