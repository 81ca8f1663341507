"""Bidding matrices and determinacy verdicts from the reveal-first games.

Player 1 wins the concurrent game from ``c`` iff Player 1 wins from ``c``
in G1, where Player 1 announces every bid first; dually for Player 2 in
G2.  Anything else is not determined.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Optional

from .arena import AdvantageTie, GameSpec, RandomTie, TransducerTie
from .configgraph import Configuration, Intermediate, build_reveal_first, configurations
from .errors import InternalConsistencyError, UnsupportedMechanismError
from .tbsolve import SolveResult, solve_turn_based


class Determined(NamedTuple):
    winner: int

    def __str__(self):
        return f"DETERMINED (Player {self.winner} wins)"


class NotDetermined(NamedTuple):
    def __str__(self):
        return "NOT DETERMINED"


@dataclass
class RevealFirstAnalysis:
    """Lazily solved G1 and G2 of one spec; share it between queries."""

    spec: GameSpec
    cap: Optional[int] = None

    def __post_init__(self):
        if isinstance(self.spec.tie, RandomTie):
            raise UnsupportedMechanismError("determinacy needs transducer or advantage tie-breaking")

    @cached_property
    def g1(self) -> SolveResult:
        return solve_turn_based(build_reveal_first(self.spec, 1, self.cap))

    @cached_property
    def g2(self) -> SolveResult:
        return solve_turn_based(build_reveal_first(self.spec, 2, self.cap))

    def wins_g1(self, node) -> bool:
        return self.g1.winner_of(node) == 1

    def wins_g2(self, node) -> bool:
        return self.g2.winner_of(node) == 2

    def verdict(self, config: Configuration):
        one, two = self.wins_g1(config), self.wins_g2(config)
        if one and two:
            raise InternalConsistencyError(f"{config} is won by Player 1 in G1 and by Player 2 in G2")
        if one:
            return Determined(1)
        if two:
            return Determined(2)
        return NotDetermined()

    def never_both_violations(self) -> list:
        return [c for c in configurations(self.spec) if self.wins_g1(c) and self.wins_g2(c)]


def analyze(spec: GameSpec, cap: Optional[int] = None) -> RevealFirstAnalysis:
    return RevealFirstAnalysis(spec, cap)


def _analysis(spec, analysis):
    return analysis if analysis is not None else RevealFirstAnalysis(spec)


# --------------------------------------------------------------------------
# matrices


@dataclass(frozen=True)
class BiddingMatrix:
    """``entries[b1][b2]`` is the player who wins from the intermediate node
    reached by bids ``(b1, b2)`` when Player 1 reveals first."""

    config: Configuration
    entries: tuple

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def columns(self) -> int:
        return len(self.entries[0])

    def __getitem__(self, pos):
        b1, b2 = pos
        return self.entries[b1][b2]

    def render(self) -> str:
        width = max(2, len(str(self.columns - 1)))
        head = " " * 5 + " ".join(f"{b:>{width}}" for b in range(self.columns))
        lines = [f"{self.config}  rows: Player 1 bid, columns: Player 2 bid", head]
        for b1, row in enumerate(self.entries):
            lines.append(f"{b1:>3}: " + " ".join(f"{x:>{width}}" for x in row))
        return "\n".join(lines)


def bidding_matrix(spec: GameSpec, config: Configuration, analysis: Optional[RevealFirstAnalysis] = None
                   ) -> BiddingMatrix:
    a = _analysis(spec, analysis)
    entries = tuple(
        tuple(1 if a.wins_g1(Intermediate(config, b1, b2)) else 2 for b2 in range(config.budget2 + 1))
        for b1 in range(config.budget1 + 1)
    )
    return BiddingMatrix(config, entries)


class MatrixClass(NamedTuple):
    """``kind`` is ``"one-row"``, ``"two-column"``, ``"both"`` or ``"neither"``;
    ``row``/``column`` hold the lowest witnessing bids."""

    kind: str
    row: Optional[int] = None
    column: Optional[int] = None

    def __str__(self):
        if self.kind == "one-row":
            return f"1-row at bid {self.row}"
        if self.kind == "two-column":
            return f"2-column at bid {self.column}"
        if self.kind == "both":
            return f"1-row at bid {self.row} and 2-column at bid {self.column}"
        return "neither a 1-row nor a 2-column"


def classify_matrix(m) -> MatrixClass:
    entries = m.entries if isinstance(m, BiddingMatrix) else m
    row = next((i for i, r in enumerate(entries) if all(x == 1 for x in r)), None)
    column = next(
        (j for j in range(len(entries[0])) if all(r[j] == 2 for r in entries)),
        None,
    )
    if row is not None and column is not None:
        return MatrixClass("both", row, column)
    if row is not None:
        return MatrixClass("one-row", row=row)
    if column is not None:
        return MatrixClass("two-column", column=column)
    return MatrixClass("neither")


# --------------------------------------------------------------------------
# verdicts


def global_determinacy(spec: GameSpec, config: Configuration,
                       analysis: Optional[RevealFirstAnalysis] = None):
    return _analysis(spec, analysis).verdict(config)


def scan_nondetermined(spec: GameSpec, analysis: Optional[RevealFirstAnalysis] = None) -> list:
    a = _analysis(spec, analysis)
    return [c for c in configurations(spec) if isinstance(a.verdict(c), NotDetermined)]


# --------------------------------------------------------------------------
# matrix lemma checks


class LemmaViolation(NamedTuple):
    check: str
    row: int
    column: int
    detail: str

    def __str__(self):
        return f"({self.check}) at row {self.row}, column {self.column}: {self.detail}"


def check_matrix_lemmas(entries, config: Configuration, tie) -> list:
    """Structural checks on a matrix (given as nested rows) for mechanism ``tie``.

    (a) off-diagonal constancy; (b) tie-unaware transducers copy the
    neighbouring strict outcome onto the diagonal; (c)/(d) advantage
    implications for holders 1 and 2.
    """
    out = []
    rows, cols = len(entries), len(entries[0])
    diag = min(rows, cols) - 1
    m = lambda i, j: entries[i][j]

    for j in range(cols):
        above = [m(i, j) for i in range(min(j, rows))]
        for i in range(1, len(above)):
            if above[i] != above[0]:
                out.append(LemmaViolation("a", i, j, "entries above the diagonal differ within the column"))
    for i in range(rows):
        left = [m(i, j) for j in range(min(i, cols))]
        for j in range(1, len(left)):
            if left[j] != left[0]:
                out.append(LemmaViolation("a", i, j, "entries left of the diagonal differ within the row"))

    if isinstance(tie, TransducerTie) and not tie.transducer.tie_aware:
        favored = tie.transducer.output[config.state]
        for b in range(1, diag + 1):
            ref = m(b, b - 1) if favored == 1 else m(b - 1, b)
            if m(b, b) != ref:
                out.append(LemmaViolation("b", b, b, f"tie won by Player {favored} differs from its strict neighbour"))

    if isinstance(tie, AdvantageTie):
        if config.state == 1:
            for i in range(1, diag + 1):
                if m(i - 1, i) == 2 and m(i, i - 1) == 2 and m(i, i) != 2:
                    out.append(LemmaViolation("c", i, i, "both neighbours are 2 but the tie is 1"))
            for i in range(diag + 1):
                if i + 1 < rows and m(i, i) == 2 and m(i + 1, i) != 2:
                    out.append(LemmaViolation("c", i + 1, i, "tie is 2 but overbidding it by one is not"))
        else:
            for i in range(1, diag + 1):
                if m(i - 1, i) == 1 and m(i, i - 1) == 1 and m(i, i) != 1:
                    out.append(LemmaViolation("d", i, i, "both neighbours are 1 but the tie is 2"))
                if m(i, i - 1) == 2 and m(i, i) != 2:
                    out.append(LemmaViolation("d", i, i, "left neighbour is 2 but the tie is 1"))
    return out


def validate_matrix_lemmas(spec: GameSpec, config: Configuration,
                           analysis: Optional[RevealFirstAnalysis] = None) -> list:
    m = bidding_matrix(spec, config, analysis)
    return check_matrix_lemmas(m.entries, config, spec.tie)
