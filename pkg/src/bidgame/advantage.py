"""Threshold budgets and monotonicity checks under advantage tie-breaking.

Player-1 resources are ordered by ``rank = 2 * B1 + (1 if Player 1 holds the
advantage)``, so budget ``k`` alone sits below ``k`` with the advantage,
which sits below ``k + 1`` alone.
"""
from __future__ import annotations

from typing import Mapping, NamedTuple, Optional

from .arena import AdvantageTie, GameSpec, Reachability
from .configgraph import Configuration, configurations
from .determinacy import RevealFirstAnalysis
from .errors import InternalConsistencyError, UnsupportedMechanismError


class Threshold(NamedTuple):
    budget: int
    needs_advantage: bool

    @property
    def rank(self) -> int:
        return 2 * self.budget + int(self.needs_advantage)

    @classmethod
    def from_rank(cls, rank: int) -> "Threshold":
        return cls(rank // 2, bool(rank % 2))

    def __str__(self):
        return f"{self.budget}{'*' if self.needs_advantage else ''}"


def _rank(config: Configuration) -> int:
    return 2 * config.budget1 + int(config.state == 1)


def _check(spec: GameSpec, reach_only: bool = True):
    if not isinstance(spec.tie, AdvantageTie):
        raise UnsupportedMechanismError("thresholds are defined for advantage tie-breaking")
    if reach_only and not isinstance(spec.objective, Reachability):
        raise UnsupportedMechanismError("threshold frontiers are computed for reachability objectives only")


def winning_table(spec: GameSpec, analysis: Optional[RevealFirstAnalysis] = None) -> dict:
    """Configuration -> winner, from the (determined) reveal-first solves."""
    a = analysis if analysis is not None else RevealFirstAnalysis(spec)
    table = {}
    for c in configurations(spec):
        v = a.verdict(c)
        if not hasattr(v, "winner"):
            raise InternalConsistencyError(f"advantage game not determined at {c}")
        table[c] = v.winner
    return table


class ThresholdFrontier(NamedTuple):
    total_budget: int
    thresholds: dict  # vertex -> Threshold, or None when Player 1 never wins

    def wins(self, config: Configuration) -> bool:
        t = self.thresholds[config.vertex]
        return t is not None and _rank(config) >= t.rank

    def render(self) -> str:
        lines = [f"threshold budgets for N = {self.total_budget}"]
        for v, t in self.thresholds.items():
            lines.append(f"{v}: {'unwinnable at this N' if t is None else t}")
        return "\n".join(lines)


def frontier_from_table(spec: GameSpec, table: Mapping) -> ThresholdFrontier:
    """Minimal winning rank per vertex; the winning ranks must be upward
    closed, otherwise the table contradicts the threshold structure."""
    out = {}
    for v in spec.vertices:
        ranks = sorted((_rank(c), table[c]) for c in table if c.vertex == v)
        winning = [r for r, w in ranks if w == 1]
        if not winning:
            out[v] = None
            continue
        low = winning[0]
        bad = [r for r, w in ranks if r >= low and w != 1]
        if bad:
            raise InternalConsistencyError(
                f"winning set at {v} is not upward closed: rank {low} wins but rank {bad[0]} loses"
            )
        out[v] = Threshold.from_rank(low)
    return ThresholdFrontier(spec.total_budget, out)


def threshold_frontier(spec: GameSpec, analysis: Optional[RevealFirstAnalysis] = None) -> ThresholdFrontier:
    _check(spec)
    return frontier_from_table(spec, winning_table(spec, analysis))


class MonotonicityViolation(NamedTuple):
    check: str
    premise: Configuration
    conclusion: Configuration

    def __str__(self):
        return f"({self.check}) {self.premise} is won but {self.conclusion} is not"


def check_monotonicity(spec: GameSpec, table: Mapping) -> list:
    """Holding the advantage never hurts, and it is worth at most one unit
    of budget.  ``table`` maps configurations to winners."""
    n = spec.total_budget
    out = []
    for c in configurations(spec):
        w = table[c]
        other = c._replace(state=3 - c.state)
        # (a) the winner also wins when it holds the advantage
        if c.state == 3 - w and table[other] != w:
            out.append(MonotonicityViolation("a", c, other))
        # (b) Player 1's advantage can be traded for one unit of budget
        if w == 1 and c.state == 1 and c.budget2 >= 1:
            d = Configuration(c.vertex, c.budget1 + 1, n - c.budget1 - 1, 2)
            if table[d] != 1:
                out.append(MonotonicityViolation("b", c, d))
        # (c) and dually for Player 2
        if w == 2 and c.state == 2 and c.budget1 >= 1:
            d = Configuration(c.vertex, c.budget1 - 1, n - c.budget1 + 1, 1)
            if table[d] != 2:
                out.append(MonotonicityViolation("c", c, d))
    return out


def validate_advantage_monotonicity(spec: GameSpec, analysis: Optional[RevealFirstAnalysis] = None,
                                    table: Optional[Mapping] = None) -> list:
    _check(spec, reach_only=False)
    if table is None:
        table = winning_table(spec, analysis)
    return check_monotonicity(spec, table)
