"""Bidding-game domain types, validation, and the JSON game format.

A game document looks like::

    {
      "vertices": ["v0", "t"],
      "edges": [["v0", "t"], ["t", "t"]],
      "totalBudget": 2,
      "objective": {"type": "reachability", "target": ["t"]},
      "tie": {"type": "advantage", "holder": 1}
    }

Transducer tie-breaking uses ``"tie": {"type": "transducer", "states": [...],
"initial": ..., "tieAware": ..., "output": {...}, "rules": [...]}`` where each
rule is ``{"from": state or "*", "on": {"vertex", "winner", "tie", "bid"},
"to": state}`` and every field of ``on`` is a literal or ``"*"``.  Rules are
tried in order; the first match wins.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence, Union

from .errors import GameReferenceError, GameSemanticError, GameSyntaxError

WILDCARD = "*"


# --------------------------------------------------------------------------
# objectives


@dataclass(frozen=True)
class Reachability:
    target: tuple

    kind = "reachability"

    def wins(self, prefix: Iterable[str], cycle: Iterable[str]) -> bool:
        target = set(self.target)
        return any(c in target for c in prefix) or any(c in target for c in cycle)

    def vertices(self):
        return set(self.target)


@dataclass(frozen=True)
class Buchi:
    accepting: tuple

    kind = "buchi"

    def wins(self, prefix, cycle) -> bool:
        accepting = set(self.accepting)
        return any(c in accepting for c in cycle)

    def vertices(self):
        return set(self.accepting)


@dataclass(frozen=True)
class Parity:
    """Max-priority parity condition; Player 1 wins when the maximum is odd."""

    priority: tuple  # ((vertex, priority), ...) in declaration order

    kind = "parity"

    @cached_property
    def priority_of(self) -> dict:
        return dict(self.priority)

    def wins(self, prefix, cycle) -> bool:
        pr = self.priority_of
        top = max((pr[c] for c in cycle), default=0)
        return top % 2 == 1

    def vertices(self):
        return set(self.priority_of)


@dataclass(frozen=True)
class Muller:
    sets: tuple  # (tuple of vertices, ...)

    kind = "muller"

    @cached_property
    def family(self) -> frozenset:
        return frozenset(frozenset(s) for s in self.sets)

    def wins(self, prefix, cycle) -> bool:
        return frozenset(cycle) in self.family

    def vertices(self):
        return set().union(*map(set, self.sets)) if self.sets else set()


Objective = Union[Reachability, Buchi, Parity, Muller]


# --------------------------------------------------------------------------
# tie-breaking


class Letter(NamedTuple):
    """What a transducer reads after a bidding: the winner's chosen vertex,
    the winner, whether a tie occurred (``None`` for tie-unaware
    transducers) and the winning bid."""

    vertex: str
    winner: int
    tie: Optional[bool]
    bid: int


@dataclass(frozen=True)
class TransducerRule:
    source: str
    vertex: object = WILDCARD
    winner: object = WILDCARD
    tie: object = WILDCARD
    bid: object = WILDCARD
    target: str = ""

    def matches(self, state: str, letter: Letter) -> bool:
        return (
            (self.source == WILDCARD or self.source == state)
            and (self.vertex == WILDCARD or self.vertex == letter.vertex)
            and (self.winner == WILDCARD or self.winner == letter.winner)
            and (self.tie == WILDCARD or self.tie == letter.tie)
            and (self.bid == WILDCARD or self.bid == letter.bid)
        )


@dataclass(frozen=True, eq=True)
class TieTransducer:
    states: tuple
    initial: str
    output: Mapping[str, int]
    tie_aware: bool
    rules: tuple

    def __hash__(self):
        return hash((self.states, self.initial, self.tie_aware, self.rules))

    def letter(self, vertex: str, winner: int, tie: bool, bid: int) -> Letter:
        return Letter(vertex, winner, tie if self.tie_aware else None, bid)

    def step(self, state: str, letter: Letter) -> str:
        cache = self.__dict__.setdefault("_step_cache", {})
        key = (state, letter)
        nxt = cache.get(key)
        if nxt is None:
            for rule in self.rules:
                if rule.matches(state, letter):
                    nxt = rule.target
                    break
            else:
                raise GameSemanticError(
                    [f"non-total transition: state {state!r} has no rule for {tuple(letter)}"]
                )
            cache[key] = nxt
        return nxt


@dataclass(frozen=True)
class TransducerTie:
    transducer: TieTransducer
    kind = "transducer"


@dataclass(frozen=True)
class RandomTie:
    kind = "random"


@dataclass(frozen=True)
class AdvantageTie:
    holder: int = 1
    kind = "advantage"


TieMechanism = Union[TransducerTie, RandomTie, AdvantageTie]


# --------------------------------------------------------------------------
# arena and game


@dataclass(frozen=True)
class BiddingArena:
    vertices: tuple
    edges: tuple  # ((u, v), ...)
    total_budget: int

    @cached_property
    def successors(self) -> dict:
        succ = {v: [] for v in self.vertices}
        for u, v in self.edges:
            if u in succ and v not in succ[u]:
                succ[u].append(v)
        return {u: tuple(vs) for u, vs in succ.items()}


@dataclass(frozen=True)
class GameSpec:
    arena: BiddingArena
    objective: Objective
    tie: TieMechanism

    @property
    def vertices(self):
        return self.arena.vertices

    @property
    def total_budget(self) -> int:
        return self.arena.total_budget

    def successors(self, vertex: str) -> tuple:
        return self.arena.successors[vertex]

    def tie_states(self) -> tuple:
        """All states of the tie mechanism, in declaration order."""
        if isinstance(self.tie, TransducerTie):
            return tuple(self.tie.transducer.states)
        if isinstance(self.tie, AdvantageTie):
            return (1, 2)
        return (None,)

    def initial_tie_state(self):
        if isinstance(self.tie, TransducerTie):
            return self.tie.transducer.initial
        if isinstance(self.tie, AdvantageTie):
            return self.tie.holder
        return None


# --------------------------------------------------------------------------
# validation


def validate_spec(spec: GameSpec) -> list:
    """Return every violated invariant as a message; empty means valid."""
    report = []
    arena = spec.arena
    names = list(arena.vertices)
    vset = set(names)
    for v in names:
        if not isinstance(v, str) or not v:
            report.append(f"empty vertex name: {v!r}")
    seen = set()
    for v in names:
        if v in seen:
            report.append(f"duplicate vertex: {v!r}")
        seen.add(v)
    for u, v in arena.edges:
        for x in (u, v):
            if x not in vset:
                report.append(f"unknown vertex {x!r} in edge ({u!r}, {v!r})")
    has_succ = {u for u, v in arena.edges if v in vset}
    for v in names:
        if v not in has_succ:
            report.append(f"vertex without successor: {v!r}")
    if not isinstance(arena.total_budget, int) or arena.total_budget < 0:
        report.append(f"total budget must be a natural number, got {arena.total_budget!r}")

    report.extend(_validate_objective(spec.objective, vset))

    tie = spec.tie
    if isinstance(tie, AdvantageTie):
        if tie.holder not in (1, 2):
            report.append(f"advantage holder must be 1 or 2, got {tie.holder!r}")
    elif isinstance(tie, TransducerTie):
        report.extend(_validate_transducer(tie.transducer, spec))
    elif not isinstance(tie, RandomTie):
        report.append(f"unknown tie mechanism: {tie!r}")
    return report


def _validate_objective(obj, vset) -> list:
    report = []
    if isinstance(obj, Reachability):
        items = obj.target
    elif isinstance(obj, Buchi):
        items = obj.accepting
    elif isinstance(obj, Parity):
        items = [v for v, _ in obj.priority]
        pr = obj.priority_of
        for v in sorted(vset - set(pr)):
            report.append(f"priority not defined for vertex {v!r}")
        for v, p in obj.priority:
            if not isinstance(p, int) or isinstance(p, bool) or p < 1:
                report.append(f"priority of {v!r} must be a positive integer, got {p!r}")
    elif isinstance(obj, Muller):
        items = [v for s in obj.sets for v in s]
        for i, s in enumerate(obj.sets):
            if not s:
                report.append(f"empty Muller set at index {i}")
    else:
        return [f"unknown objective: {obj!r}"]
    for v in items:
        if v not in vset:
            report.append(f"unknown vertex {v!r} in objective")
    return report


def _validate_transducer(t: TieTransducer, spec: GameSpec) -> list:
    report = []
    qset = set(t.states)
    if not t.states:
        report.append("transducer has no states")
    if len(qset) != len(t.states):
        report.append("duplicate transducer state")
    if t.initial not in qset:
        report.append(f"unknown transducer state {t.initial!r} as initial state")
    for q in t.states:
        if t.output.get(q) not in (1, 2):
            report.append(f"output of state {q!r} must be 1 or 2")
    for q in t.output:
        if q not in qset:
            report.append(f"unknown transducer state {q!r} in output")
    vset = set(spec.arena.vertices)
    n = spec.arena.total_budget
    structurally_ok = True
    for i, r in enumerate(t.rules):
        if r.source != WILDCARD and r.source not in qset:
            report.append(f"unknown transducer state {r.source!r} in rule {i}")
            structurally_ok = False
        if r.target not in qset:
            report.append(f"unknown transducer state {r.target!r} in rule {i}")
            structurally_ok = False
        if r.vertex != WILDCARD and r.vertex not in vset:
            report.append(f"unknown vertex {r.vertex!r} in rule {i}")
        if r.winner != WILDCARD and r.winner not in (1, 2):
            report.append(f"winner pattern in rule {i} must be 1, 2 or '*'")
        if r.bid != WILDCARD and (not isinstance(r.bid, int) or isinstance(r.bid, bool) or r.bid < 0):
            report.append(f"bid pattern in rule {i} must be a natural number or '*'")
        if r.tie != WILDCARD:
            if not t.tie_aware:
                report.append(f"rule {i} tests ties but the transducer is tie-unaware")
            elif not isinstance(r.tie, bool):
                report.append(f"tie pattern in rule {i} must be a boolean or '*'")
    if not structurally_ok or not t.states:
        return report
    # totality over the letters the game can produce
    targets = sorted({v for _, v in spec.arena.edges if v in vset}, key=spec.arena.vertices.index)
    ties = (False, True) if t.tie_aware else (None,)
    for q in t.states:
        missing = None
        for v in targets:
            for w in (1, 2):
                for tie in ties:
                    for b in range(n + 1):
                        letter = Letter(v, w, tie, b)
                        if not any(r.matches(q, letter) for r in t.rules):
                            missing = letter
                            break
                    if missing:
                        break
                if missing:
                    break
            if missing:
                break
        if missing:
            report.append(
                f"non-total transition: state {q!r} has no rule for letter {tuple(missing)}"
            )
    return report


# --------------------------------------------------------------------------
# parsing


def _fail(msg):
    raise GameSyntaxError(msg)


def _expect(cond, msg):
    if not cond:
        _fail(msg)


def _string_list(doc, key, where="game"):
    val = doc.get(key)
    _expect(isinstance(val, list), f"{where}: field {key!r} must be an array")
    _expect(all(isinstance(x, str) for x in val), f"{where}: field {key!r} must contain strings")
    return tuple(val)


def _pattern(val, what, allowed_types):
    if val == WILDCARD:
        return WILDCARD
    if isinstance(val, bool) and bool not in allowed_types:
        _fail(f"rule pattern {what!r} has invalid value {val!r}")
    _expect(isinstance(val, allowed_types), f"rule pattern {what!r} has invalid value {val!r}")
    return val


def _load_json(document):
    if isinstance(document, (bytes, bytearray)):
        try:
            document = document.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise GameSyntaxError(f"document is not UTF-8: {exc}") from None
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise GameSyntaxError(exc.msg, exc.lineno, exc.colno) from None
    _expect(isinstance(doc, dict), "document must be a JSON object")
    return doc


def _parse_objective(obj) -> Objective:
    _expect(isinstance(obj, dict), "field 'objective' must be an object")
    kind = obj.get("type")
    if kind == "reachability":
        return Reachability(_string_list(obj, "target", "objective"))
    if kind == "buchi":
        return Buchi(_string_list(obj, "accepting", "objective"))
    if kind == "parity":
        pr = obj.get("priority")
        _expect(isinstance(pr, dict), "objective: field 'priority' must be an object")
        for v, p in pr.items():
            _expect(isinstance(p, int) and not isinstance(p, bool),
                    f"objective: priority of {v!r} must be an integer")
        return Parity(tuple(pr.items()))
    if kind == "muller":
        sets = obj.get("sets")
        _expect(isinstance(sets, list), "objective: field 'sets' must be an array")
        out = []
        for s in sets:
            _expect(isinstance(s, list) and all(isinstance(x, str) for x in s),
                    "objective: every Muller set must be an array of strings")
            out.append(tuple(s))
        return Muller(tuple(out))
    _fail(f"unknown objective type {kind!r}")


def _parse_tie(tie) -> TieMechanism:
    _expect(isinstance(tie, dict), "field 'tie' must be an object")
    kind = tie.get("type")
    if kind == "random":
        return RandomTie()
    if kind == "advantage":
        holder = tie.get("holder")
        _expect(holder in (1, 2) and not isinstance(holder, bool), "tie: 'holder' must be 1 or 2")
        return AdvantageTie(holder)
    if kind == "transducer":
        states = _string_list(tie, "states", "tie")
        initial = tie.get("initial")
        _expect(isinstance(initial, str), "tie: 'initial' must be a string")
        aware = tie.get("tieAware")
        _expect(isinstance(aware, bool), "tie: 'tieAware' must be a boolean")
        output = tie.get("output")
        _expect(isinstance(output, dict), "tie: 'output' must be an object")
        rules_doc = tie.get("rules")
        _expect(isinstance(rules_doc, list), "tie: 'rules' must be an array")
        rules = []
        for i, r in enumerate(rules_doc):
            _expect(isinstance(r, dict), f"tie: rule {i} must be an object")
            on = r.get("on", {})
            _expect(isinstance(on, dict), f"tie: rule {i} field 'on' must be an object")
            src, dst = r.get("from"), r.get("to")
            _expect(isinstance(src, str) and isinstance(dst, str),
                    f"tie: rule {i} needs string 'from' and 'to'")
            rules.append(TransducerRule(
                source=src,
                vertex=_pattern(on.get("vertex", WILDCARD), "vertex", (str,)),
                winner=_pattern(on.get("winner", WILDCARD), "winner", (int,)),
                tie=_pattern(on.get("tie", WILDCARD), "tie", (bool,)),
                bid=_pattern(on.get("bid", WILDCARD), "bid", (int,)),
                target=dst,
            ))
        return TransducerTie(TieTransducer(states, initial, dict(output), aware, tuple(rules)))
    _fail(f"unknown tie type {kind!r}")


_REFERENCE_MARKERS = ("unknown vertex", "unknown transducer state")


def _raise_if_invalid(report):
    refs = [m for m in report if m.startswith(_REFERENCE_MARKERS)]
    if refs:
        raise GameReferenceError("; ".join(refs))
    if report:
        raise GameSemanticError(report)


def parse_game(document) -> GameSpec:
    """Parse and validate a game document (bytes or str)."""
    doc = _load_json(document)
    vertices = _string_list(doc, "vertices")
    edges_doc = doc.get("edges")
    _expect(isinstance(edges_doc, list), "game: field 'edges' must be an array")
    edges = []
    for e in edges_doc:
        _expect(isinstance(e, list) and len(e) == 2 and all(isinstance(x, str) for x in e),
                "game: every edge must be a 2-element array of strings")
        edges.append((e[0], e[1]))
    n = doc.get("totalBudget")
    _expect(isinstance(n, int) and not isinstance(n, bool), "game: 'totalBudget' must be an integer")
    spec = GameSpec(
        BiddingArena(vertices, tuple(edges), n),
        _parse_objective(doc.get("objective")),
        _parse_tie(doc.get("tie")),
    )
    _raise_if_invalid(validate_spec(spec))
    return spec


# --------------------------------------------------------------------------
# serialization


def _dump(value) -> str:
    return json.dumps(value, ensure_ascii=False, separators=(", ", ": "))


def _objective_doc(obj) -> dict:
    if isinstance(obj, Reachability):
        return {"type": "reachability", "target": list(obj.target)}
    if isinstance(obj, Buchi):
        return {"type": "buchi", "accepting": list(obj.accepting)}
    if isinstance(obj, Parity):
        return {"type": "parity", "priority": dict(obj.priority)}
    return {"type": "muller", "sets": [list(s) for s in obj.sets]}


def _tie_doc(tie) -> dict:
    if isinstance(tie, RandomTie):
        return {"type": "random"}
    if isinstance(tie, AdvantageTie):
        return {"type": "advantage", "holder": tie.holder}
    t = tie.transducer
    return {
        "type": "transducer",
        "states": list(t.states),
        "initial": t.initial,
        "tieAware": t.tie_aware,
        "output": {q: t.output[q] for q in t.states},
        "rules": [
            {"from": r.source,
             "on": {"vertex": r.vertex, "winner": r.winner, "tie": r.tie, "bid": r.bid},
             "to": r.target}
            for r in t.rules
        ],
    }


def game_document(spec: GameSpec) -> dict:
    return {
        "vertices": list(spec.arena.vertices),
        "edges": [list(e) for e in spec.arena.edges],
        "totalBudget": spec.arena.total_budget,
        "objective": _objective_doc(spec.objective),
        "tie": _tie_doc(spec.tie),
    }


def serialize_game(spec: GameSpec) -> bytes:
    """Canonical UTF-8 form: fixed key order, one top-level field per line."""
    doc = game_document(spec)
    body = ",\n".join(f"  {_dump(k)}: {_dump(v)}" for k, v in doc.items())
    return ("{\n" + body + "\n}\n").encode("utf-8")


def load_game(path) -> GameSpec:
    with open(path, "rb") as fh:
        return parse_game(fh.read())


def make_game(vertices: Sequence[str], edges, total_budget: int, objective, tie) -> GameSpec:
    """Build and validate a spec from Python values."""
    spec = GameSpec(
        BiddingArena(tuple(vertices), tuple(tuple(e) for e in edges), total_budget),
        objective,
        tie,
    )
    _raise_if_invalid(validate_spec(spec))
    return spec
