"""Random games for property tests and the acceptance suite.

Every generator takes a ``random.Random`` so runs are reproducible.
"""
from __future__ import annotations

import random
from typing import Optional, Sequence

from .arena import (
    AdvantageTie,
    Buchi,
    Muller,
    Parity,
    RandomTie,
    Reachability,
    TieTransducer,
    TransducerRule,
    TransducerTie,
    WILDCARD,
    make_game,
)
from .tbsolve import TurnBasedGame

OBJECTIVE_KINDS = ("reachability", "buchi", "parity", "muller")


def vertex_names(n: int) -> list:
    return [f"v{i}" for i in range(n)]


def random_edges(rng: random.Random, vertices: Sequence[str], density: float = 0.35) -> list:
    """Random edge set in which every vertex has a successor."""
    edges = [(u, v) for u in vertices for v in vertices if rng.random() < density]
    for u in vertices:
        if not any(e[0] == u for e in edges):
            edges.append((u, rng.choice(vertices)))
    return edges


def strongly_connected_edges(rng: random.Random, vertices: Sequence[str], chords: Optional[int] = None) -> list:
    """A shuffled Hamiltonian cycle plus random chords."""
    order = list(vertices)
    rng.shuffle(order)
    edges = {(order[i], order[(i + 1) % len(order)]) for i in range(len(order))}
    n = len(order)
    for _ in range(rng.randint(0, n) if chords is None else chords):
        edges.add((rng.choice(order), rng.choice(order)))
    return sorted(edges)


def random_objective(rng: random.Random, vertices: Sequence[str], kind: str, muller_colors: int = 3):
    vs = list(vertices)
    if kind == "reachability":
        return Reachability(tuple(rng.sample(vs, rng.randint(1, max(1, len(vs) // 2)))))
    if kind == "buchi":
        return Buchi(tuple(rng.sample(vs, rng.randint(1, max(1, len(vs) // 2)))))
    if kind == "parity":
        d = rng.randint(1, 4)
        return Parity(tuple((v, rng.randint(1, d)) for v in vs))
    if kind == "muller":
        pool = rng.sample(vs, min(muller_colors, len(vs)))
        sets = set()
        for _ in range(rng.randint(1, 3)):
            sets.add(tuple(sorted(rng.sample(pool, rng.randint(1, len(pool))))))
        return Muller(tuple(sorted(sets)))
    raise ValueError(f"unknown objective kind {kind!r}")


def random_tie_unaware_transducer(rng: random.Random, vertices: Sequence[str], total_budget: int,
                                  max_states: int = 3) -> TieTransducer:
    """Random tie-unaware transducer: a few specific rules per state, then a
    per-state catch-all so every letter is handled."""
    states = tuple(f"q{i}" for i in range(rng.randint(1, max_states)))
    rules = []
    for s in states:
        for _ in range(rng.randint(0, 3)):
            rules.append(TransducerRule(
                s,
                vertex=rng.choice([WILDCARD, rng.choice(list(vertices))]),
                winner=rng.choice([WILDCARD, 1, 2]),
                bid=rng.choice([WILDCARD, rng.randint(0, total_budget)]),
                target=rng.choice(states),
            ))
        rules.append(TransducerRule(s, target=rng.choice(states)))
    output = {s: rng.choice((1, 2)) for s in states}
    return TieTransducer(states, states[0], output, False, tuple(rules))


def random_bidding_game(rng: random.Random, mechanism: str, max_vertices: int = 5, max_budget: int = 4,
                        kinds: Sequence[str] = OBJECTIVE_KINDS, max_states: int = 3, min_vertices: int = 2):
    """Random game with the given mechanism: ``transducer`` (tie-unaware),
    ``advantage`` or ``random``."""
    vs = vertex_names(rng.randint(min(min_vertices, max_vertices), max_vertices))
    edges = random_edges(rng, vs)
    n = rng.randint(0, max_budget)
    obj = random_objective(rng, vs, rng.choice(list(kinds)))
    if mechanism == "transducer":
        tie = TransducerTie(random_tie_unaware_transducer(rng, vs, n, max_states))
    elif mechanism == "advantage":
        tie = AdvantageTie(rng.choice((1, 2)))
    elif mechanism == "random":
        tie = RandomTie()
    else:
        raise ValueError(f"unknown mechanism {mechanism!r}")
    return make_game(vs, edges, n, obj, tie)


def random_turn_based_game(rng: random.Random, max_nodes: int = 5, kind: Optional[str] = None,
                           muller_colors: int = 3) -> TurnBasedGame:
    """Plain turn-based game whose nodes are named vertices (their own colors)."""
    vs = vertex_names(rng.randint(1, max_nodes))
    owner = {v: rng.choice((1, 2)) for v in vs}
    edges = random_edges(rng, vs)
    obj = random_objective(rng, vs, kind or rng.choice(OBJECTIVE_KINDS), muller_colors)
    return TurnBasedGame.from_arena(vs, owner, edges, obj)
