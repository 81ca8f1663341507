"""Finite turn-based games: attractors, Zielonka, LAR products, and an
exhaustive cycle-forming oracle.

Nodes are addressed by integer index internally; ``TurnBasedGame.nodes``
holds the user-facing keys.  A node with color ``None`` is neutral: it never
counts towards the objective.  Parity is max-priority, odd wins for Player 1;
neutral nodes get priority 0.
"""
from __future__ import annotations

import sys
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

from .arena import Buchi, Muller, Objective, Parity, Reachability, _load_json, _parse_objective, _validate_objective
from .errors import BidGameError, GameReferenceError, GameSemanticError, GameSyntaxError, SizeLimitExceeded

CHANCE = 0


@dataclass
class TurnBasedGame:
    nodes: list
    owner: list  # 1 or 2 per node (CHANCE only in stochastic variants)
    succ: list  # tuple of successor indices per node
    colors: list  # arena vertex per node, or None for neutral nodes
    objective: Objective

    @classmethod
    def build(cls, nodes, owner, moves, colors, objective):
        """Build from node keys and per-key successor keys."""
        nodes = list(nodes)
        index = {n: i for i, n in enumerate(nodes)}
        if len(index) != len(nodes):
            raise BidGameError("duplicate node keys")
        succ = []
        for n in nodes:
            seen = []
            for m in moves[n]:
                j = index[m]
                if j not in seen:
                    seen.append(j)
            if not seen:
                raise BidGameError(f"node {n!r} has no successor")
            succ.append(tuple(seen))
        return cls(nodes, [owner[n] for n in nodes], succ, [colors[n] for n in nodes], objective)

    @classmethod
    def from_arena(cls, vertices, owner, edges, objective):
        """Plain turn-based game whose nodes are the arena vertices."""
        moves = {v: [] for v in vertices}
        for u, v in edges:
            moves[u].append(v)
        return cls.build(vertices, owner, moves, {v: v for v in vertices}, objective)

    @cached_property
    def index(self) -> dict:
        return {n: i for i, n in enumerate(self.nodes)}

    @cached_property
    def pred(self) -> list:
        pred = [[] for _ in self.nodes]
        for i, ss in enumerate(self.succ):
            for j in ss:
                pred[j].append(i)
        return pred

    def __len__(self):
        return len(self.nodes)

    @cached_property
    def priorities(self) -> list:
        obj = self.objective
        if isinstance(obj, Parity):
            pr = obj.priority_of
            return [pr[c] if c is not None else 0 for c in self.colors]
        if isinstance(obj, Buchi):
            acc = set(obj.accepting)
            return [(1 if c in acc else 0) if c is not None else 0 for c in self.colors]
        raise BidGameError(f"no priority assignment for {type(obj).__name__} objectives")

    def colored_nodes(self, vertices) -> set:
        vertices = set(vertices)
        return {i for i, c in enumerate(self.colors) if c is not None and c in vertices}


# --------------------------------------------------------------------------
# attractors


def attractor(game: TurnBasedGame, target, player: int, active=None):
    """Least set from which ``player`` forces a visit to ``target``.

    Returns ``(attr, strategy)``; the strategy maps each of ``player``'s
    nodes in ``attr - target`` to a successor one step closer.  ``active``
    restricts the computation to a subgame.
    """
    succ, owner, pred = game.succ, game.owner, game.pred
    attr = set(target) if active is None else {x for x in target if x in active}
    strategy = {}
    remaining = {}
    queue = deque(sorted(attr))
    while queue:
        x = queue.popleft()
        for p in pred[x]:
            if p in attr or (active is not None and p not in active):
                continue
            if owner[p] == player:
                attr.add(p)
                strategy[p] = x
                queue.append(p)
            else:
                left = remaining.get(p)
                if left is None:
                    left = len(succ[p]) if active is None else sum(1 for s in succ[p] if s in active)
                left -= 1
                remaining[p] = left
                if left == 0:
                    attr.add(p)
                    queue.append(p)
    return attr, strategy


def _stay_move(game, node, region):
    for s in game.succ[node]:
        if s in region:
            return s
    raise BidGameError(f"node {game.nodes[node]!r} has no successor inside its region")


# --------------------------------------------------------------------------
# results


@dataclass
class SolveResult:
    game: TurnBasedGame
    winner: list  # 1 or 2 per node index
    strategy1: dict  # node index -> successor index (memoryless)
    strategy2: dict
    memory: Optional["MullerStrategies"] = None

    @cached_property
    def region1(self) -> frozenset:
        return frozenset(i for i, w in enumerate(self.winner) if w == 1)

    @cached_property
    def region2(self) -> frozenset:
        return frozenset(i for i, w in enumerate(self.winner) if w == 2)

    @property
    def winning_region1(self) -> frozenset:
        return frozenset(self.game.nodes[i] for i in self.region1)

    @property
    def winning_region2(self) -> frozenset:
        return frozenset(self.game.nodes[i] for i in self.region2)

    def winner_of(self, node) -> int:
        return self.winner[self.game.index[node]]

    def strategy(self, player: int):
        """A strategy object with ``initial_memory``, ``move`` and ``update``."""
        if self.memory is not None:
            return self.memory.for_player(player)
        return TableStrategy(self.strategy1 if player == 1 else self.strategy2)


# --------------------------------------------------------------------------
# solvers


def solve_reachability(game: TurnBasedGame, target=None) -> SolveResult:
    if target is None:
        target = game.colored_nodes(game.objective.target)
    attr, strat = attractor(game, target, 1)
    s1, s2 = dict(strat), {}
    outside = set(range(len(game))) - attr
    for x in range(len(game)):
        if x in attr:
            if game.owner[x] == 1 and x not in s1:
                s1[x] = game.succ[x][0]
        elif game.owner[x] == 2:
            s2[x] = _stay_move(game, x, outside)
    winner = [1 if x in attr else 2 for x in range(len(game))]
    return SolveResult(game, winner, s1, s2)


def solve_buchi(game: TurnBasedGame, accepting=None) -> SolveResult:
    """Classic nested fixed point: peel off traps where Player 2 avoids the
    accepting set, closed under Player 2 attraction."""
    if accepting is None:
        accepting = game.colored_nodes(game.objective.accepting)
    active = set(range(len(game)))
    s2 = {}
    last_strat = {}
    while True:
        reach, last_strat = attractor(game, accepting & active, 1, active)
        avoid = active - reach
        if not avoid:
            break
        for x in avoid:
            if game.owner[x] == 2:
                s2[x] = _stay_move(game, x, avoid)
        lost, strat = attractor(game, avoid, 2, active)
        for x, y in strat.items():
            s2.setdefault(x, y)
        active -= lost
    s1 = {}
    for x in active:
        if game.owner[x] == 1:
            s1[x] = last_strat[x] if x in last_strat else _stay_move(game, x, active)
    winner = [1 if x in active else 2 for x in range(len(game))]
    return SolveResult(game, winner, s1, s2)


def _zielonka(game, active, prio):
    if not active:
        return set(), set(), {}, {}
    top = max(prio[x] for x in active)
    alpha = 1 if top % 2 == 1 else 2
    opp = 3 - alpha
    top_nodes = {x for x in active if prio[x] == top}
    attr_a, strat_a = attractor(game, top_nodes, alpha, active)
    w1, w2, s1, s2 = _zielonka(game, active - attr_a, prio)
    sub = {1: (w1, s1), 2: (w2, s2)}
    w_opp, s_opp = sub[opp]
    if not w_opp:
        w_alpha, s_alpha = sub[alpha]
        strat = dict(s_alpha)
        strat.update(strat_a)
        for x in top_nodes:
            if game.owner[x] == alpha:
                strat[x] = _stay_move(game, x, active)
        res = {alpha: (set(active), strat), opp: (set(), {})}
        return res[1][0], res[2][0], res[1][1], res[2][1]
    attr_b, strat_b = attractor(game, w_opp, opp, active)
    v1, v2, t1, t2 = _zielonka(game, active - attr_b, prio)
    sub2 = {1: (v1, t1), 2: (v2, t2)}
    win_opp = sub2[opp][0] | attr_b
    strat_opp = dict(sub2[opp][1])
    strat_opp.update(s_opp)
    strat_opp.update(strat_b)
    res = {alpha: sub2[alpha], opp: (win_opp, strat_opp)}
    return res[1][0], res[2][0], res[1][1], res[2][1]


def solve_parity(game: TurnBasedGame, prio=None) -> SolveResult:
    if prio is None:
        prio = game.priorities
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 10000))
    try:
        w1, w2, s1, s2 = _zielonka(game, set(range(len(game))), prio)
    finally:
        sys.setrecursionlimit(limit)
    winner = [1 if x in w1 else 2 for x in range(len(game))]
    s1 = {x: y for x, y in s1.items() if game.owner[x] == 1 and x in w1}
    s2 = {x: y for x, y in s2.items() if game.owner[x] == 2 and x in w2}
    return SolveResult(game, winner, s1, s2)


# --------------------------------------------------------------------------
# Muller games via latest appearance records


def lar_update(record: tuple, color: int):
    """Move ``color`` to the front; return ``(new_record, hit_position)``."""
    h = record.index(color)
    return (color,) + record[:h] + record[h + 1:], h


@dataclass
class LarProduct:
    game: TurnBasedGame  # parity game over product states
    base: TurnBasedGame
    palette: tuple  # tracked colors, in order
    initial: tuple  # initial record (indices into palette)
    cidx: dict  # color -> palette index
    states: list  # (base node, record) per product node
    index: dict

    def start(self, node: int) -> int:
        return self.index[(node, self.initial)]


OTHER = object()


def _muller_palette(game, family):
    """Colors tracked by the record.  Colors outside every Muller set share
    one slot: any of them seen infinitely often already loses."""
    relevant = set().union(*family) if family else set()
    palette = list(dict.fromkeys(c for c in game.colors if c is not None and c in relevant))
    cidx = {c: i for i, c in enumerate(palette)}
    if any(c is not None and c not in relevant for c in game.colors):
        palette.append(OTHER)
        for c in game.colors:
            if c is not None and c not in relevant:
                cidx[c] = len(palette) - 1
    return tuple(palette), cidx


def muller_to_parity(game: TurnBasedGame) -> LarProduct:
    """Product with a latest-appearance record over the colored nodes.

    A product state ``(x, record)`` holds the record *before* ``x``'s color is
    processed; its priority is ``2h+1`` if the hit set (the first ``h+1``
    colors) belongs to the Muller family and ``2h+2`` otherwise.  Neutral
    nodes get priority 0 and leave the record unchanged.
    """
    obj = game.objective
    if not isinstance(obj, Muller):
        raise BidGameError("muller_to_parity needs a Muller objective")
    family = {frozenset(s) for s in obj.family}
    palette, cidx = _muller_palette(game, family)
    initial = tuple(range(len(palette)))

    states, index, succ, prio = [], {}, [], []
    queue = deque()

    def visit(state):
        j = index.get(state)
        if j is None:
            j = len(states)
            index[state] = j
            states.append(state)
            succ.append(None)
            prio.append(None)
            queue.append(j)
        return j

    for x in range(len(game)):
        visit((x, initial))
    while queue:
        j = queue.popleft()
        x, rec = states[j]
        c = game.colors[x]
        if c is None:
            nxt_rec, p = rec, 0
        else:
            nxt_rec, h = lar_update(rec, cidx[c])
            hit = frozenset(palette[k] for k in rec[: h + 1])
            p = 2 * h + 1 if hit in family else 2 * h + 2
        prio[j] = p
        succ[j] = tuple(visit((y, nxt_rec)) for y in game.succ[x])

    top = max(prio, default=0)
    colors = [f"p{p}" if p else None for p in prio]
    pobj = Parity(tuple((f"p{p}", p) for p in range(1, top + 1)))
    pgame = TurnBasedGame(
        nodes=list(states),
        owner=[game.owner[x] for x, _ in states],
        succ=succ,
        colors=colors,
        objective=pobj,
    )
    return LarProduct(pgame, game, palette, initial, cidx, states, index)


class MullerStrategies:
    """Finite-memory strategies read back from a solved LAR product."""

    def __init__(self, product: LarProduct, result: SolveResult):
        self.product = product
        self.result = result
        self._cidx = product.cidx

    def for_player(self, player):
        return _MullerStrategy(self, player)


class _MullerStrategy:
    def __init__(self, parent: MullerStrategies, player: int):
        self.parent = parent
        self.table = parent.result.strategy1 if player == 1 else parent.result.strategy2

    def initial_memory(self):
        return self.parent.product.initial

    def update(self, memory, node):
        c = self.parent.product.base.colors[node]
        if c is None:
            return memory
        return lar_update(memory, self.parent._cidx[c])[0]

    def move(self, node, memory):
        prod = self.parent.product
        j = prod.index.get((node, memory))
        if j is None:
            return None
        k = self.table.get(j)
        return None if k is None else prod.states[k][0]


def solve_muller(game: TurnBasedGame) -> SolveResult:
    product = muller_to_parity(game)
    res = solve_parity(product.game)
    winner = [res.winner[product.start(x)] for x in range(len(game))]
    out = SolveResult(game, winner, {}, {}, memory=None)
    out.memory = MullerStrategies(product, res)
    return out


def solve_turn_based(game: TurnBasedGame) -> SolveResult:
    if any(o not in (1, 2) for o in game.owner):
        raise BidGameError("turn-based solving needs every node owned by Player 1 or 2")
    obj = game.objective
    if isinstance(obj, Reachability):
        return solve_reachability(game)
    if isinstance(obj, Buchi):
        return solve_buchi(game)
    if isinstance(obj, Parity):
        return solve_parity(game)
    if isinstance(obj, Muller):
        return solve_muller(game)
    raise BidGameError(f"unsupported objective {obj!r}")


# --------------------------------------------------------------------------
# lasso evaluation and the cycle-forming oracle


def lasso_winner(game: TurnBasedGame, path: Sequence[int], loop_start: int) -> int:
    """Winner of ``path[:loop_start] (path[loop_start:])^omega``."""
    colors = game.colors
    prefix = [colors[x] for x in path[:loop_start] if colors[x] is not None]
    cycle = [colors[x] for x in path[loop_start:] if colors[x] is not None]
    return 1 if game.objective.wins(prefix, cycle) else 2


def cycle_forming_oracle(game: TurnBasedGame, start, limit: int = 2_000_000) -> int:
    """Winner from ``start`` by playing until a node repeats and judging the
    closed lasso, with plain backward induction over the history tree.

    Muller games are judged on their LAR product, since a cycle-forming
    game over the bare arena is only sound for memoryless objectives.
    """
    if isinstance(game.objective, Muller):
        product = muller_to_parity(game)
        return cycle_forming_oracle(product.game, (game.index[start], product.initial), limit)
    s = game.index[start]
    budget = [limit]
    path, pos = [s], {s: 0}

    def solve() -> int:
        budget[0] -= 1
        if budget[0] < 0:
            raise SizeLimitExceeded(f"history tree exceeds {limit} nodes")
        x = path[-1]
        me = game.owner[x]
        for y in game.succ[x]:
            if y in pos:
                w = lasso_winner(game, path, pos[y])
            else:
                path.append(y)
                pos[y] = len(path) - 1
                w = solve()
                path.pop()
                del pos[y]
            if w == me:
                return me
        return 3 - me

    limit_before = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit_before, 10000))
    try:
        return solve()
    finally:
        sys.setrecursionlimit(limit_before)


def play_strategies(game: TurnBasedGame, start: int, strat1, strat2, max_steps: int = 1_000_000):
    """Run two strategy objects from ``start`` until a (node, memories)
    state repeats; return ``(winner, path, loop_start)``.

    Strategies return ``None`` where undefined; the first successor is used.
    """
    m1, m2 = strat1.initial_memory(), strat2.initial_memory()
    x = start
    path, seen = [], {}
    for _ in range(max_steps):
        key = (x, m1, m2)
        if key in seen:
            loop = seen[key]
            return lasso_winner(game, path, loop), path, loop
        seen[key] = len(path)
        path.append(x)
        strat = strat1 if game.owner[x] == 1 else strat2
        mem = m1 if game.owner[x] == 1 else m2
        y = strat.move(x, mem)
        if y is None or y not in game.succ[x]:
            y = game.succ[x][0]
        m1 = strat1.update(m1, x)
        m2 = strat2.update(m2, x)
        x = y
    raise SizeLimitExceeded("play did not close a lasso")


class TableStrategy:
    """Memoryless strategy given by an explicit node -> successor table."""

    def __init__(self, table):
        self.table = table

    def initial_memory(self):
        return None

    def update(self, memory, node):
        return None

    def move(self, node, memory):
        return self.table.get(node)


# --------------------------------------------------------------------------
# turn-based game documents


def parse_turn_based(document) -> TurnBasedGame:
    """Parse ``{"vertices", "owner", "edges", "objective"}``; ``owner`` maps
    every vertex to 1 or 2 and ``objective`` uses the game-file syntax."""
    doc = _load_json(document)
    vertices = doc.get("vertices")
    if not isinstance(vertices, list) or not all(isinstance(v, str) and v for v in vertices):
        raise GameSyntaxError("field 'vertices' must be an array of nonempty strings")
    owner = doc.get("owner")
    if not isinstance(owner, dict):
        raise GameSyntaxError("field 'owner' must be an object")
    edges = doc.get("edges")
    if not isinstance(edges, list) or not all(
        isinstance(e, list) and len(e) == 2 and all(isinstance(x, str) for x in e) for e in edges
    ):
        raise GameSyntaxError("field 'edges' must be an array of 2-element string arrays")
    obj = _parse_objective(doc.get("objective"))
    vset = set(vertices)
    refs = [f"unknown vertex {x!r} in edge" for e in edges for x in e if x not in vset]
    refs += [m for m in _validate_objective(obj, vset) if m.startswith("unknown vertex")]
    refs += [f"unknown vertex {v!r} in owner" for v in owner if v not in vset]
    if refs:
        raise GameReferenceError("; ".join(refs))
    problems = [m for m in _validate_objective(obj, vset) if not m.startswith("unknown vertex")]
    problems += [f"owner of {v!r} must be 1 or 2" for v in vertices if owner.get(v) not in (1, 2)]
    problems += [f"vertex without successor: {v!r}" for v in vertices if not any(e[0] == v for e in edges)]
    if len(vset) != len(vertices):
        problems.append("duplicate vertex")
    if problems:
        raise GameSemanticError(problems)
    return TurnBasedGame.from_arena(vertices, owner, [tuple(e) for e in edges], obj)
