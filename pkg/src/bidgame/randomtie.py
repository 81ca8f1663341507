"""Pure-strategy values of reachability bidding games with random ties.

Ties are broken by a fair coin; the winning bid is paid on both branches.
The value after ``n`` rounds is computed by backward induction over the
layered unrolling, where a play that has not reached the target after ``n``
rounds is awarded to the player the timeout favors.  At every configuration
the matrix of intermediate values has a weakly dominant bid, so the pure
maxmin and minmax coincide on the unrolling.

``value_bounds`` brackets the infinite-horizon value: the lower sequence is
the timeout-favors-2 unrolling; the upper sequence starts from 1 and is
deflated on end components in which Player 2 can keep the play forever
(bounded value iteration), since the plain timeout-favors-1 unrolling never
drops below 1 on such components.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Optional

import networkx as nx

from .arena import GameSpec, RandomTie, Reachability
from .configgraph import Configuration, configurations, node_cap
from .errors import BidGameError, InternalConsistencyError, NodeCapExceeded, UnsupportedMechanismError


def _check(spec: GameSpec):
    if not isinstance(spec.tie, RandomTie):
        raise UnsupportedMechanismError("values are defined for random tie-breaking only")
    if not isinstance(spec.objective, Reachability):
        raise UnsupportedMechanismError("random-tie values are computed for reachability objectives only")


class _Layout:
    """Index of configurations plus, per configuration and payment, the
    successor configurations when Player 1 or Player 2 wins."""

    def __init__(self, spec: GameSpec):
        _check(spec)
        self.spec = spec
        self.configs = configurations(spec)
        self.index = {c: i for i, c in enumerate(self.configs)}
        target = set(spec.objective.target)
        self.target = [c.vertex in target for c in self.configs]
        self.win1, self.win2 = [], []
        for c in self.configs:
            succ = spec.successors(c.vertex)
            self.win1.append([
                [self.index[Configuration(v, c.budget1 - b, c.budget2 + b, None)] for v in succ]
                for b in range(c.budget1 + 1)
            ])
            self.win2.append([
                [self.index[Configuration(v, c.budget1 + b, c.budget2 - b, None)] for v in succ]
                for b in range(c.budget2 + 1)
            ])

    def matrix(self, i: int, values, half) -> list:
        """Intermediate values at configuration ``i`` given successor values."""
        hi = [max(values[j] for j in js) for js in self.win1[i]]
        lo = [min(values[j] for j in js) for js in self.win2[i]]
        rows = []
        for b1 in range(len(hi)):
            row = []
            for b2 in range(len(lo)):
                if b1 > b2:
                    row.append(hi[b1])
                elif b2 > b1:
                    row.append(lo[b2])
                else:
                    row.append(half * (hi[b1] + lo[b2]))
            rows.append(row)
        return rows


def _maxmin(rows):
    return max(min(r) for r in rows)


def _minmax(rows):
    return min(max(r[j] for r in rows) for j in range(len(rows[0])))


def _bellman(layout: _Layout, values, half, check=False, upper=False):
    """One round of backward induction.  ``upper`` uses the minmax (Player 2
    reveals first), which is never below the maxmin."""
    out = []
    for i in range(len(layout.configs)):
        if layout.target[i]:
            out.append(half * 2)
            continue
        rows = layout.matrix(i, values, half)
        v = _minmax(rows) if upper else _maxmin(rows)
        if check and v != _minmax(rows):
            raise InternalConsistencyError(f"maxmin and minmax differ at {layout.configs[i]}")
        out.append(v)
    return out


def _numbers(exact: bool):
    if exact:
        return Fraction(0), Fraction(1), Fraction(1, 2)
    return 0.0, 1.0, 0.5


# --------------------------------------------------------------------------
# finite horizon


@dataclass
class HorizonGame:
    """The ``n``-round unrolling from ``start``.  Layers are implicit: the
    node ``(c, k)`` is configuration ``c`` after ``k`` rounds; target
    configurations go to the Player-1 sink, layer-``n`` configurations to
    the sink of ``timeout_favors``."""

    spec: GameSpec
    start: Configuration
    horizon: int
    timeout_favors: int = 2
    exact: bool = True
    layout: _Layout = field(repr=False, default=None)

    def layer_count(self) -> int:
        return self.horizon + 1

    def node_count(self) -> int:
        return len(self.layout.configs) * (self.horizon + 1) + 2


def unroll_horizon(spec: GameSpec, start: Configuration, n: int, timeout_favors: int = 2,
                   exact: bool = True, cap: Optional[int] = None) -> HorizonGame:
    if n < 0:
        raise BidGameError("horizon must be nonnegative")
    if timeout_favors not in (1, 2):
        raise BidGameError("timeout_favors must be 1 or 2")
    layout = _Layout(spec)
    start = Configuration(start.vertex, start.budget1, start.budget2, None)
    if start not in layout.index:
        raise BidGameError(f"{start} is not a configuration of this game")
    h = HorizonGame(spec, start, n, timeout_favors, exact, layout)
    limit = node_cap(cap)
    if h.node_count() > limit:
        raise NodeCapExceeded(limit)
    return h


class DominantBid(NamedTuple):
    player: int
    bid: int


class HorizonValue(NamedTuple):
    value: object
    bids: dict  # (configuration, layer) -> DominantBid


def _layers(h: HorizonGame, record=None):
    """Value vectors by remaining rounds ``0..n``; optionally records the
    dominant bid of every non-target configuration per layer."""
    zero, one, half = _numbers(h.exact)
    lay = h.layout
    timeout = one if h.timeout_favors == 1 else zero
    values = [one if t else timeout for t in lay.target]
    for remaining in range(1, h.horizon + 1):
        if record is not None:
            layer = h.horizon - remaining
            for i, c in enumerate(lay.configs):
                if not lay.target[i]:
                    record[(c, layer)] = dominant_bid(lay.matrix(i, values, half))
        values = _bellman(lay, values, half, check=True)
    return values


def value_horizon(h: HorizonGame) -> HorizonValue:
    """Backward induction; reports a weakly dominant bid at every
    non-target configuration of every layer."""
    bids = {}
    values = _layers(h, bids)
    return HorizonValue(values[h.layout.index[h.start]], bids)


# --------------------------------------------------------------------------
# matrices and dominance


@dataclass(frozen=True)
class ValueMatrix:
    config: Configuration
    entries: tuple

    def __getitem__(self, pos):
        b1, b2 = pos
        return self.entries[b1][b2]

    def render(self) -> str:
        cells = [[str(x) for x in row] for row in self.entries]
        width = max(len(x) for row in cells for x in row)
        head = " " * 5 + " ".join(f"{b:>{width}}" for b in range(len(cells[0])))
        lines = [f"{self.config}  rows: Player 1 bid, columns: Player 2 bid", head]
        for b1, row in enumerate(cells):
            lines.append(f"{b1:>3}: " + " ".join(f"{x:>{width}}" for x in row))
        return "\n".join(lines)


def value_matrix(spec: GameSpec, config: Configuration, n: int, exact: bool = True) -> ValueMatrix:
    """Values of the intermediate nodes at ``config`` in the first round of
    the ``n``-round unrolling (timeout favors Player 2)."""
    if n < 1:
        raise BidGameError("a value matrix needs at least one round")
    h = unroll_horizon(spec, config, n - 1, 2, exact)
    lay = h.layout
    i = lay.index[h.start]
    _, one, half = _numbers(exact)
    if lay.target[i]:
        rows = [[one] * (config.budget2 + 1) for _ in range(config.budget1 + 1)]
    else:
        rows = lay.matrix(i, _layers(h), half)
    return ValueMatrix(h.start, tuple(tuple(r) for r in rows))


def dominant_bid(m) -> DominantBid:
    """Lowest player, then lowest bid, whose row (column) weakly dominates."""
    rows = m.entries if isinstance(m, ValueMatrix) else m
    n1, n2 = len(rows), len(rows[0])
    for i in range(n1):
        if all(rows[i][j] >= rows[k][j] for k in range(n1) for j in range(n2)):
            return DominantBid(1, i)
    for j in range(n2):
        if all(rows[i][j] <= rows[i][k] for k in range(n2) for i in range(n1)):
            return DominantBid(2, j)
    raise InternalConsistencyError("no weakly dominant bid in a value matrix")


# --------------------------------------------------------------------------
# two-sided bounds


class ValueResult(NamedTuple):
    lower: object
    upper: object
    horizon_used: int
    converged: bool


class _StochasticGame:
    """The Player-2-reveals-first game as an explicit simple stochastic game,
    used to find end components for deflation.

    Nodes: ``("c", i)`` Player 2 picks a bid; ``("r", i, b2)`` Player 1
    answers; ``("w1", i, b)``/``("w2", i, b)`` the winner moves after paying
    ``b``; ``("tie", i, b)`` a coin.
    """

    def __init__(self, lay: _Layout):
        self.lay = lay
        self.owner, self.succ = {}, {}
        for i, c in enumerate(lay.configs):
            if lay.target[i]:
                continue
            self._add(("c", i), 2, [("r", i, b2) for b2 in range(c.budget2 + 1)])
            for b2 in range(c.budget2 + 1):
                out = []
                for b1 in range(c.budget1 + 1):
                    if b1 > b2:
                        out.append(("w1", i, b1))
                    elif b2 > b1:
                        out.append(("w2", i, b2))
                    else:
                        out.append(("tie", i, b1))
                self._add(("r", i, b2), 1, list(dict.fromkeys(out)))
            for b in range(c.budget1 + 1):
                self._add(("w1", i, b), 1, [("c", j) for j in lay.win1[i][b]])
            for b in range(c.budget2 + 1):
                self._add(("w2", i, b), 2, [("c", j) for j in lay.win2[i][b]])
            for b in range(min(c.budget1, c.budget2) + 1):
                self._add(("tie", i, b), 0, [("w1", i, b), ("w2", i, b)])

    def _add(self, node, owner, succ):
        self.owner[node] = owner
        self.succ[node] = list(dict.fromkeys(succ))

    def value(self, node, values, half):
        kind, i = node[0], node[1]
        lay = self.lay
        if kind == "c":
            return values[i]
        if kind == "w1":
            return max(values[j] for j in lay.win1[i][node[2]])
        if kind == "w2":
            return min(values[j] for j in lay.win2[i][node[2]])
        if kind == "tie":
            b = node[2]
            return half * (max(values[j] for j in lay.win1[i][b]) + min(values[j] for j in lay.win2[i][b]))
        return max(self.value(s, values, half) for s in self.succ[node])

    def allowed(self, node, lower, half, close):
        """Player 2 is restricted to moves optimal for the lower bound."""
        succ = self.succ[node]
        if self.owner[node] != 2:
            return succ
        vals = [self.value(s, lower, half) for s in succ]
        best = min(vals)
        return [s for s, v in zip(succ, vals) if close(v, best)]

    def end_components(self, lower, half, close):
        live = {n: (s if n[0] != "c" or not self.lay.target[n[1]] else []) for n, s in self.succ.items()}
        moves = {n: self.allowed(n, lower, half, close) for n in live}
        active = set(moves)
        while True:
            g = nx.DiGraph()
            g.add_nodes_from(active)
            g.add_edges_from((n, s) for n in active for s in moves[n] if s in active)
            comp = {}
            for k, scc in enumerate(nx.strongly_connected_components(g)):
                for n in scc:
                    comp[n] = k
            drop = set()
            for n in active:
                inside = [s for s in moves[n] if s in active and comp.get(s) == comp[n]]
                if self.owner[n] == 0:
                    if len(inside) != len(moves[n]):
                        drop.add(n)
                elif not inside:
                    drop.add(n)
            if not drop:
                groups = {}
                for n in active:
                    groups.setdefault(comp[n], set()).add(n)
                return list(groups.values())
            active -= drop

    def deflate(self, upper, lower, zero, half, close):
        upper = list(upper)
        for ec in self.end_components(lower, half, close):
            exits = [
                self.value(s, upper, half)
                for n in ec if self.owner[n] == 1
                for s in self.succ[n] if s not in ec
            ]
            best = max(exits, default=zero)
            for n in ec:
                if n[0] == "c" and upper[n[1]] > best:
                    upper[n[1]] = best
        return upper


def value_bounds(spec: GameSpec, start: Configuration, tol: float = 1e-6, max_horizon: int = 2 ** 14,
                 exact: bool = True) -> ValueResult:
    """Bracket the value from ``start``; checks the gap at horizons
    0, 1, 2, 4, ... and stops once it is at most ``tol``."""
    lay = _Layout(spec)
    start = Configuration(start.vertex, start.budget1, start.budget2, None)
    i0 = lay.index[start]
    zero, one, half = _numbers(exact)
    close = (lambda a, b: a == b) if exact else (lambda a, b: abs(a - b) <= 1e-12)
    ssg = _StochasticGame(lay)
    lower = [one if t else zero for t in lay.target]
    upper = [one] * len(lay.configs)
    upper = ssg.deflate(upper, lower, zero, half, close)
    n, check = 0, 1
    while True:
        gap = upper[i0] - lower[i0]
        if gap < 0 and not close(upper[i0], lower[i0]):
            raise InternalConsistencyError(f"upper bound below lower bound at {start}")
        if n == 0 or n == check:
            if gap <= tol:
                return ValueResult(lower[i0], upper[i0], n, True)
            if n == check and n > 0:
                check *= 2
        if n >= max_horizon:
            return ValueResult(lower[i0], upper[i0], n, False)
        lower = _bellman(lay, lower, half)
        upper = [min(u, v) for u, v in zip(upper, _bellman(lay, upper, half, upper=True))]
        upper = ssg.deflate(upper, lower, zero, half, close)
        n += 1
