"""Explicit configuration graphs of bidding games.

A configuration is ``(vertex, B1, B2, tie_state)``.  Every bidding at a
configuration leads to an intermediate node tagged with that configuration,
so intermediate neighbourhoods of distinct configurations never overlap.
"""
from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .arena import (
    AdvantageTie,
    Buchi,
    GameSpec,
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
from .errors import BidGameError, IllegalBidError, NodeCapExceeded, SizeLimitExceeded, UnsupportedMechanismError
from .tbsolve import CHANCE, TurnBasedGame

DEFAULT_NODE_CAP = 5_000_000
MULLER_PASSTHROUGH_LIMIT = 4


def node_cap(cap: Optional[int] = None) -> int:
    if cap is not None:
        return cap
    env = os.environ.get("BIDGAME_NODE_CAP")
    return int(env) if env else DEFAULT_NODE_CAP


class Configuration(NamedTuple):
    vertex: str
    budget1: int
    budget2: int
    state: object = None  # transducer state, advantage holder, or None

    def __str__(self):
        state = "" if self.state is None else f",{self.state}"
        return f"<{self.vertex},{self.budget1},{self.budget2}{state}>"


class Reveal(NamedTuple):
    """Reveal-first node: ``revealer`` has announced ``bid`` at ``config``."""

    config: Configuration
    revealer: int
    bid: int


class Intermediate(NamedTuple):
    """Bid pair at a configuration.  ``stage`` is ``"resolve"`` for the node
    reached right after bidding, ``"decline"`` after the advantage holder
    declines a tie, and ``"win1"``/``"win2"`` for the coin outcomes of a
    random tie."""

    config: Configuration
    bid1: int
    bid2: int
    stage: str = "resolve"


def configurations(spec: GameSpec) -> list:
    n = spec.total_budget
    return [
        Configuration(v, b1, n - b1, s)
        for v in spec.vertices
        for b1 in range(n + 1)
        for s in spec.tie_states()
    ]


def allowed_bids(config: Configuration):
    return range(config.budget1 + 1), range(config.budget2 + 1)


# --------------------------------------------------------------------------
# bidding resolution


@dataclass(frozen=True)
class Decided:
    winner: int
    payment: int
    tie: bool = False


@dataclass(frozen=True)
class AdvantageChoice:
    """Holder decides a tie: taking wins and passes the advantage on,
    declining hands the win (and the move) to the other player."""

    holder: int
    payment: int

    @property
    def take(self) -> Decided:
        return Decided(self.holder, self.payment, True)

    @property
    def decline(self) -> Decided:
        return Decided(3 - self.holder, self.payment, True)


@dataclass(frozen=True)
class Chance:
    payment: int

    @property
    def branches(self):
        return ((1, self.payment, 0.5), (2, self.payment, 0.5))


def resolve_bidding(spec: GameSpec, config: Configuration, b1: int, b2: int):
    if not (0 <= b1 <= config.budget1) or not (0 <= b2 <= config.budget2):
        raise IllegalBidError(f"bids ({b1}, {b2}) exceed budgets at {config}")
    if b1 > b2:
        return Decided(1, b1)
    if b2 > b1:
        return Decided(2, b2)
    tie = spec.tie
    if isinstance(tie, TransducerTie):
        return Decided(tie.transducer.output[config.state], b1, True)
    if isinstance(tie, AdvantageTie):
        return AdvantageChoice(config.state, b1)
    return Chance(b1)


def next_configuration(spec: GameSpec, config: Configuration, outcome: Decided, vertex: str,
                       choice: Optional[str] = None) -> Configuration:
    """Configuration after ``outcome.winner`` pays and moves to ``vertex``.

    ``choice`` is ``"take"`` or ``"decline"`` for advantage ties.
    """
    p = outcome.payment
    if outcome.winner == 1:
        b1, b2 = config.budget1 - p, config.budget2 + p
    else:
        b1, b2 = config.budget1 + p, config.budget2 - p
    tie = spec.tie
    state = config.state
    if isinstance(tie, TransducerTie):
        t = tie.transducer
        state = t.step(state, t.letter(vertex, outcome.winner, outcome.tie, p))
    elif isinstance(tie, AdvantageTie) and choice == "take":
        state = 3 - state
    return Configuration(vertex, b1, b2, state)


def _moves(spec, config, outcome, choice=None):
    return [next_configuration(spec, config, outcome, v, choice) for v in spec.successors(config.vertex)]


# --------------------------------------------------------------------------
# explicit graphs


class _Builder:
    def __init__(self, cap):
        self.cap = cap
        self.nodes, self.index, self.owner, self.succ, self.colors = [], {}, [], [], []

    def add(self, key, owner, color=None):
        j = self.index.get(key)
        if j is None:
            if len(self.nodes) >= self.cap:
                raise NodeCapExceeded(self.cap)
            j = len(self.nodes)
            self.index[key] = j
            self.nodes.append(key)
            self.owner.append(owner)
            self.succ.append(None)
            self.colors.append(color)
        return j


def _resolution_successors(spec, builder, node: Intermediate):
    """Owner and successor keys of a resolution node; registers new nodes."""
    c = node.config
    if node.stage == "decline":
        out = Decided(3 - c.state, node.bid1, True)
        return out.winner, _moves(spec, c, out, "decline")
    if node.stage in ("win1", "win2"):
        out = Decided(int(node.stage[-1]), node.bid1, True)
        return out.winner, _moves(spec, c, out)
    res = resolve_bidding(spec, c, node.bid1, node.bid2)
    if isinstance(res, Decided):
        return res.winner, _moves(spec, c, res)
    if isinstance(res, AdvantageChoice):
        return res.holder, _moves(spec, c, res.take, "take") + [node._replace(stage="decline")]
    return CHANCE, [node._replace(stage="win1"), node._replace(stage="win2")]


def _close(spec, b: _Builder, pending):
    """Expand intermediate nodes until every registered node has successors."""
    while pending:
        key = pending.pop()
        j = b.index[key]
        owner, succ_keys = _resolution_successors(spec, b, key)
        b.owner[j] = owner
        succ = []
        for s in succ_keys:
            if isinstance(s, Configuration):
                k = b.index[s]
            else:
                k = b.index.get(s)
                if k is None:
                    k = b.add(s, None)
                    pending.append(s)
            if k not in succ:
                succ.append(k)
        b.succ[j] = tuple(succ)


@dataclass
class ConfigGraph:
    """The concurrent configuration graph.  Configuration nodes have owner
    ``None`` (both players bid simultaneously); chance nodes have owner 0."""

    nodes: list
    index: dict
    owner: list
    succ: list
    colors: list

    @property
    def configurations(self):
        return [n for n in self.nodes if isinstance(n, Configuration)]

    @property
    def chance_nodes(self):
        return [n for n, o in zip(self.nodes, self.owner) if o == CHANCE]

    def successors(self, node):
        return [self.nodes[j] for j in self.succ[self.index[node]]]


def build_config_graph(spec: GameSpec, cap: Optional[int] = None) -> ConfigGraph:
    b = _Builder(node_cap(cap))
    configs = configurations(spec)
    for c in configs:
        b.add(c, None, c.vertex)
    pending = []
    for c in configs:
        j = b.index[c]
        succ = []
        for b1, b2 in itertools.product(*allowed_bids(c)):
            key = Intermediate(c, b1, b2)
            succ.append(b.add(key, None))
            pending.append(key)
        b.succ[j] = tuple(succ)
    pending.reverse()
    _close(spec, b, pending)
    return ConfigGraph(b.nodes, b.index, b.owner, b.succ, b.colors)


def build_reveal_first(spec: GameSpec, revealer: int, cap: Optional[int] = None) -> TurnBasedGame:
    """Turn-based game in which ``revealer`` announces every bid first."""
    if isinstance(spec.tie, RandomTie):
        raise UnsupportedMechanismError("random tie-breaking has no turn-based expansion; use randomtie")
    if revealer not in (1, 2):
        raise BidGameError("revealer must be 1 or 2")
    other = 3 - revealer
    b = _Builder(node_cap(cap))
    configs = configurations(spec)
    for c in configs:
        b.add(c, revealer, c.vertex)
    pending = []
    for c in configs:
        j = b.index[c]
        mine, theirs = allowed_bids(c)
        if revealer == 2:
            mine, theirs = theirs, mine
        reveal_ids = []
        for bid in mine:
            r = Reveal(c, revealer, bid)
            rid = b.add(r, other)
            reveal_ids.append(rid)
            succ = []
            for answer in theirs:
                b1, b2 = (bid, answer) if revealer == 1 else (answer, bid)
                key = Intermediate(c, b1, b2)
                k = b.index.get(key)
                if k is None:
                    k = b.add(key, None)
                    pending.append(key)
                succ.append(k)
            b.succ[rid] = tuple(succ)
        b.succ[j] = tuple(reveal_ids)
    pending.reverse()
    _close(spec, b, pending)
    return TurnBasedGame(b.nodes, b.owner, b.succ, b.colors, spec.objective)


# --------------------------------------------------------------------------
# transducers


def build_alternating_transducer() -> TieTransducer:
    """Two states; the advantage swaps exactly when a tie occurs."""
    return TieTransducer(
        states=("A1", "A2"),
        initial="A1",
        output={"A1": 1, "A2": 2},
        tie_aware=True,
        rules=(
            TransducerRule("A1", tie=True, target="A2"),
            TransducerRule("A2", tie=True, target="A1"),
            TransducerRule("A1", target="A1"),
            TransducerRule("A2", target="A2"),
        ),
    )


def constant_transducer(player: int) -> TieTransducer:
    name = f"P{player}"
    return TieTransducer((name,), name, {name: player}, False, (TransducerRule(WILDCARD, target=name),))


# --------------------------------------------------------------------------
# reductions from turn-based games


def _fresh(name, taken):
    while name in taken:
        name += "'"
    taken.add(name)
    return name


def _state_name(v):
    return f"at:{v}"


@dataclass(frozen=True)
class Reduction:
    spec: GameSpec
    flavor: str
    owner: dict  # owner of every vertex of the produced arena

    def start(self, vertex: str) -> Configuration:
        """Configuration of the bidding game that corresponds to ``vertex``."""
        if self.flavor == "transducer":
            return Configuration(vertex, 0, 0, _state_name(vertex))
        return Configuration(vertex, 0, 0, self.owner[vertex])


def reduce_turn_based(tbg: TurnBasedGame, flavor: str) -> GameSpec:
    return reduction(tbg, flavor).spec


def reduction(tbg: TurnBasedGame, flavor: str) -> Reduction:
    """Bidding game with total budget 0 in which every bidding ties.

    ``transducer``: a transducer tracks the current vertex and hands ties to
    its owner.  ``advantage``: players are made to alternate, two sinks are
    added and every Player-i vertex gets an edge to the opponent's sink, so
    the advantage holder must use it.
    """
    vertices = [str(v) for v in tbg.nodes]
    if vertices != list(tbg.nodes) or list(tbg.colors) != vertices:
        raise BidGameError("reduction needs a plain turn-based game over named vertices")
    owner = {v: o for v, o in zip(vertices, tbg.owner)}
    edges = [(vertices[i], vertices[j]) for i, ss in enumerate(tbg.succ) for j in ss]
    obj = tbg.objective

    if flavor == "transducer":
        t = TieTransducer(
            states=tuple(_state_name(v) for v in vertices),
            initial=_state_name(vertices[0]),
            output={_state_name(v): owner[v] for v in vertices},
            tie_aware=True,
            rules=tuple(TransducerRule(WILDCARD, vertex=v, target=_state_name(v)) for v in vertices),
        )
        spec = make_game(vertices, edges, 0, obj, TransducerTie(t))
        return Reduction(spec, flavor, owner)

    if flavor != "advantage":
        raise BidGameError(f"unknown reduction flavor {flavor!r}")

    taken = set(vertices)
    new_vertices = list(vertices)
    new_owner = dict(owner)
    new_edges = []
    passthrough = []
    for u, w in edges:
        if owner[u] == owner[w]:
            p = _fresh(f"{u}>{w}", taken)
            new_vertices.append(p)
            new_owner[p] = 3 - owner[u]
            new_edges += [(u, p), (p, w)]
            passthrough.append(p)
        else:
            new_edges.append((u, w))
    t1, t2 = _fresh("t1", taken), _fresh("t2", taken)
    for v in list(new_vertices):
        new_edges.append((v, t2 if new_owner[v] == 1 else t1))
    new_vertices += [t1, t2]
    new_owner[t1], new_owner[t2] = 1, 2
    new_edges += [(t1, t1), (t2, t2)]

    if isinstance(obj, Reachability):
        lifted = Reachability(tuple(obj.target) + (t1,))
    elif isinstance(obj, Buchi):
        lifted = Buchi(tuple(obj.accepting) + (t1,))
    elif isinstance(obj, Parity):
        # priority 1 never raises the maximum of a cycle through original vertices
        lifted = Parity(tuple(obj.priority) + tuple((p, 1) for p in passthrough) + ((t1, 1), (t2, 2)))
    elif isinstance(obj, Muller):
        # every subset of pass-through vertices joins each set
        if len(passthrough) > MULLER_PASSTHROUGH_LIMIT:
            raise SizeLimitExceeded(
                f"{len(passthrough)} pass-through vertices; a Muller condition is lifted for at most "
                f"{MULLER_PASSTHROUGH_LIMIT}"
            )
        sets = []
        for s in obj.sets:
            for k in range(len(passthrough) + 1):
                for extra in itertools.combinations(passthrough, k):
                    sets.append(tuple(s) + extra)
        sets.append((t1,))
        lifted = Muller(tuple(sets))
    else:
        raise BidGameError(f"unsupported objective {obj!r}")
    spec = make_game(new_vertices, new_edges, 0, lifted, AdvantageTie(1))
    return Reduction(spec, flavor, new_owner)
