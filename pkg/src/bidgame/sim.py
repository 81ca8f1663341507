"""Strategies, simulated plays, and the experiments built on them.

A strategy object answers three questions at a configuration: which bid to
place, where to move after winning, and whether to use the advantage on a
tie.  Strategies may carry memory; it is threaded through ``observe`` so
that plays can detect repetitions of (configuration, memories).
"""
from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from typing import IO, Iterable, Mapping, NamedTuple, Optional, Sequence

import networkx as nx

from .arena import AdvantageTie, Buchi, GameSpec, RandomTie, Reachability, TransducerTie, make_game
from .configgraph import (
    AdvantageChoice,
    Configuration,
    Decided,
    Intermediate,
    Reveal,
    configurations,
    next_configuration,
    resolve_bidding,
)
from .determinacy import Determined, RevealFirstAnalysis, bidding_matrix
from .errors import BidGameError, IllegalBidError, StrategyError

MASK64 = (1 << 64) - 1


class SplitMix64:
    """The splitmix64 generator; one draw per random tie."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def coin(self) -> int:
        """Winner of a tie: low bit 0 gives Player 1."""
        return 1 if self.next() & 1 == 0 else 2


# --------------------------------------------------------------------------
# strategies


class Strategy:
    """Base class: memoryless, bids 0, moves to the first successor, and
    always uses the advantage."""

    def __init__(self, spec: GameSpec, player: int):
        self.spec = spec
        self.player = player

    def initial_memory(self):
        return None

    def observe(self, memory, config: Configuration):
        return memory

    def bid(self, config: Configuration, memory) -> int:
        return 0

    def move(self, config: Configuration, bid1: int, bid2: int, stage: str, memory) -> str:
        return self.spec.successors(config.vertex)[0]

    def take_tie(self, config: Configuration, bid: int, memory) -> bool:
        return True


class ConstantZero(Strategy):
    """Always bids 0.  Moves to the first successor in ``preference``, or,
    with a ``tour``, along shortest paths to the current tour vertex,
    advancing the tour on arrival (memory is the tour position)."""

    def __init__(self, spec: GameSpec, player: int, preference: Sequence[str] = (),
                 tour: Optional[Sequence[str]] = None):
        super().__init__(spec, player)
        self.preference = list(preference)
        self.tour = list(tour) if tour else None
        if self.tour:
            g = nx.DiGraph(list(spec.arena.edges))
            g.add_nodes_from(spec.vertices)
            self._dist = {v: nx.shortest_path_length(g, target=v) for v in set(self.tour)}

    def initial_memory(self):
        return 0 if self.tour else None

    def observe(self, memory, config):
        if not self.tour:
            return memory
        while self.tour[memory] == config.vertex:
            memory = (memory + 1) % len(self.tour)
            if len(self.tour) == 1:
                break
        return memory

    def move(self, config, bid1, bid2, stage, memory):
        succ = self.spec.successors(config.vertex)
        if self.tour:
            dist = self._dist[self.tour[memory]]
            return min(succ, key=lambda v: (dist.get(v, float("inf")), succ.index(v)))
        for v in self.preference:
            if v in succ:
                return v
        return succ[0]


class Scripted(Strategy):
    """Memoryless strategy from a table ``configuration -> (bid, move, take)``."""

    def __init__(self, spec: GameSpec, player: int, table: Mapping):
        super().__init__(spec, player)
        self.table = dict(table)

    def _entry(self, config):
        try:
            return self.table[config]
        except KeyError:
            raise StrategyError(f"scripted strategy of Player {self.player} has no entry for {config}") from None

    def bid(self, config, memory):
        return self._entry(config)[0]

    def move(self, config, bid1, bid2, stage, memory):
        return self._entry(config)[1]

    def take_tie(self, config, bid, memory):
        entry = self._entry(config)
        return bool(entry[2]) if len(entry) > 2 and entry[2] is not None else True


def random_scripted(spec: GameSpec, player: int, rng: random.Random, max_bid: Optional[int] = None) -> Scripted:
    """A uniformly random memoryless strategy over all configurations."""
    table = {}
    for c in configurations(spec):
        budget = c.budget1 if player == 1 else c.budget2
        top = budget if max_bid is None else min(budget, max_bid)
        table[c] = (rng.randint(0, top), rng.choice(spec.successors(c.vertex)), rng.random() < 0.5)
    return Scripted(spec, player, table)


class Optimal(Strategy):
    """Plays the strategy extracted for ``player`` from the game in which that
    player reveals bids first.  Where that strategy is undefined (the
    configuration is not winning for the player there) it falls back to the base
    behaviour."""

    def __init__(self, spec: GameSpec, player: int, analysis: Optional[RevealFirstAnalysis] = None):
        super().__init__(spec, player)
        self.analysis = analysis if analysis is not None else RevealFirstAnalysis(spec)
        self.result = self.analysis.g1 if player == 1 else self.analysis.g2
        self.game = self.result.game
        self.inner = self.result.strategy(player)

    # memory is (record before the current configuration, record after it);
    # the bid is chosen at the configuration, later choices at neutral nodes
    def initial_memory(self):
        return (None, self.inner.initial_memory())

    def observe(self, memory, config):
        before = memory[1]
        return (before, self.inner.update(before, self.game.index[config]))

    def _choice(self, node, memory):
        j = self.inner.move(self.game.index[node], memory)
        return None if j is None else self.game.nodes[j]

    def bid(self, config, memory):
        nxt = self._choice(config, memory[0])
        return nxt.bid if isinstance(nxt, Reveal) else 0

    def move(self, config, bid1, bid2, stage, memory):
        nxt = self._choice(Intermediate(config, bid1, bid2, stage), memory[1])
        if isinstance(nxt, Configuration):
            return nxt.vertex
        return super().move(config, bid1, bid2, stage, memory)

    def take_tie(self, config, bid, memory):
        nxt = self._choice(Intermediate(config, bid, bid), memory[1])
        return not (isinstance(nxt, Intermediate) and nxt.stage == "decline")


# --------------------------------------------------------------------------
# plays


class Round(NamedTuple):
    config: Configuration
    bid1: int
    bid2: int
    resolution: str  # win1/win2, tie1/tie2, take1/decline2, coin1/coin2 ...
    winner: int
    next: Configuration

    def line(self, k: int) -> str:
        c = self.config
        state = "-" if c.state is None else c.state
        return f"{k} {c.vertex} {c.budget1} {c.budget2} {state} {self.bid1} {self.bid2} {self.resolution} {self.next}"


@dataclass
class PlayRecord:
    start: Configuration
    rounds: list = field(default_factory=list)
    outcome: Optional[int] = None
    lasso_start: Optional[int] = None  # round index where the repeated cycle starts
    truncated: bool = False

    @property
    def configurations(self) -> list:
        return [self.start] + [r.next for r in self.rounds]

    @property
    def visited(self) -> Counter:
        return Counter(c.vertex for c in self.configurations)

    def transcript(self) -> str:
        return "".join(r.line(k) + "\n" for k, r in enumerate(self.rounds))


def _check_bid(config, player, b):
    budget = config.budget1 if player == 1 else config.budget2
    if not isinstance(b, int) or not 0 <= b <= budget:
        raise IllegalBidError(f"Player {player} bid {b!r} at {config} with budget {budget}")


def play_round(spec: GameSpec, config: Configuration, strategies, memories, coin: Optional[SplitMix64] = None
               ) -> Round:
    s1, s2 = strategies
    m1, m2 = memories
    b1, b2 = s1.bid(config, m1), s2.bid(config, m2)
    _check_bid(config, 1, b1)
    _check_bid(config, 2, b2)
    res = resolve_bidding(spec, config, b1, b2)
    choice, stage = None, "resolve"
    if isinstance(res, Decided):
        outcome = res
        token = f"{'tie' if res.tie else 'win'}{res.winner}"
    elif isinstance(res, AdvantageChoice):
        holder = (s1, s2)[res.holder - 1]
        take = holder.take_tie(config, b1, memories[res.holder - 1])
        outcome = res.take if take else res.decline
        choice = "take" if take else "decline"
        stage = "resolve" if take else "decline"
        token = f"{choice}{res.holder}"
    else:
        if coin is None:
            raise BidGameError("random tie-breaking needs a seeded generator")
        w = coin.coin()
        outcome = Decided(w, res.payment, True)
        stage = f"win{w}"
        token = f"coin{w}"
    mover = (s1, s2)[outcome.winner - 1]
    v = mover.move(config, b1, b2, stage, memories[outcome.winner - 1])
    if v not in spec.successors(config.vertex):
        raise StrategyError(f"Player {outcome.winner} moved from {config.vertex} to non-successor {v!r}")
    nxt = next_configuration(spec, config, outcome, v, choice)
    return Round(config, b1, b2, token, outcome.winner, nxt)


def _normalize(spec, start):
    if start.state is None and not isinstance(spec.tie, RandomTie):
        start = start._replace(state=spec.initial_tie_state())
    return start


def play_deterministic(spec: GameSpec, start: Configuration, s1: Strategy, s2: Strategy,
                       max_rounds: int = 1_000_000) -> PlayRecord:
    """Play until (configuration, memories) repeats; the lasso decides."""
    if isinstance(spec.tie, RandomTie):
        raise BidGameError("random tie-breaking needs play_random")
    start = _normalize(spec, start)
    rec = PlayRecord(start)
    c = start
    m1, m2 = s1.observe(s1.initial_memory(), c), s2.observe(s2.initial_memory(), c)
    seen = {}
    for k in range(max_rounds + 1):
        key = (c, m1, m2)
        if key in seen:
            rec.lasso_start = seen[key]
            configs = rec.configurations
            prefix = [x.vertex for x in configs[: seen[key]]]
            cycle = [x.vertex for x in configs[seen[key]: k]]
            rec.outcome = 1 if spec.objective.wins(prefix, cycle) else 2
            return rec
        seen[key] = k
        r = play_round(spec, c, (s1, s2), (m1, m2))
        rec.rounds.append(r)
        c = r.next
        m1, m2 = s1.observe(m1, c), s2.observe(m2, c)
    raise StrategyError("play did not close a lasso within the round limit")


def play_random(spec: GameSpec, start: Configuration, s1: Strategy, s2: Strategy, seed: int,
                max_steps: int) -> PlayRecord:
    """Sampled play under random tie-breaking.  Reachability plays stop at
    the target (outcome 1) or after ``max_steps`` rounds (outcome 2,
    truncated); other objectives run the full budget and report no outcome."""
    if not isinstance(spec.tie, RandomTie):
        raise BidGameError("play_random needs random tie-breaking")
    coin = SplitMix64(seed)
    rec = PlayRecord(_normalize(spec, start))
    c = rec.start
    reach = set(spec.objective.target) if isinstance(spec.objective, Reachability) else None
    m1, m2 = s1.observe(s1.initial_memory(), c), s2.observe(s2.initial_memory(), c)
    for _ in range(max_steps):
        if reach is not None and c.vertex in reach:
            rec.outcome = 1
            return rec
        r = play_round(spec, c, (s1, s2), (m1, m2), coin)
        rec.rounds.append(r)
        c = r.next
        m1, m2 = s1.observe(m1, c), s2.observe(m2, c)
    if reach is not None and c.vertex in reach:
        rec.outcome = 1
    else:
        rec.truncated = True
        rec.outcome = 2 if reach is not None else None
    return rec


def play_steps(spec: GameSpec, start: Configuration, s1: Strategy, s2: Strategy, steps: int,
               seed: int = 0) -> PlayRecord:
    """Exactly ``steps`` rounds under any mechanism (no lasso detection)."""
    coin = SplitMix64(seed)
    rec = PlayRecord(_normalize(spec, start), truncated=True)
    c = rec.start
    m1, m2 = s1.observe(s1.initial_memory(), c), s2.observe(s2.initial_memory(), c)
    for _ in range(steps):
        r = play_round(spec, c, (s1, s2), (m1, m2), coin)
        rec.rounds.append(r)
        c = r.next
        m1, m2 = s1.observe(m1, c), s2.observe(m2, c)
    return rec


# --------------------------------------------------------------------------
# strongly connected games


def _prefers_player1(spec: GameSpec) -> bool:
    tie = spec.tie
    if isinstance(tie, RandomTie):
        return True
    if isinstance(tie, TransducerTie):
        return all(p == 1 for p in tie.transducer.output.values())
    return False


def build_scc_strategy(spec: GameSpec, tour: Optional[Sequence[str]] = None) -> ConstantZero:
    """Player 1 bids 0 and walks along shortest paths through ``tour``
    (all vertices in declaration order by default)."""
    g = nx.DiGraph(list(spec.arena.edges))
    g.add_nodes_from(spec.vertices)
    if not nx.is_strongly_connected(g):
        raise BidGameError("arena is not strongly connected")
    if not _prefers_player1(spec):
        raise BidGameError("needs random ties or a transducer that always prefers Player 1")
    return ConstantZero(spec, 1, tour=list(tour) if tour else list(spec.vertices))


def coverage_step(record: PlayRecord, vertices: Iterable[str]) -> Optional[int]:
    """Round count after which every vertex has been visited, or ``None``."""
    missing = set(vertices)
    for k, c in enumerate(record.configurations):
        missing.discard(c.vertex)
        if not missing:
            return k
    return None


def exhaustion_step(record: PlayRecord) -> int:
    """Round count after which Player 2 never wins a bidding again."""
    last = 0
    for k, r in enumerate(record.rounds):
        if r.winner == 2:
            last = k + 1
    return last


SCC_BUCHI_VERTICES = ("v1", "v2", "v3")
SCC_BUCHI_EDGES = (("v1", "v1"), ("v1", "v2"), ("v2", "v1"), ("v2", "v3"), ("v3", "v1"))


def scc_buchi_game(budget1: int, holder: int = 1) -> GameSpec:
    """Strongly connected Büchi game, accepting ``v3``, with ``N = B1``."""
    return make_game(SCC_BUCHI_VERTICES, SCC_BUCHI_EDGES, budget1, Buchi(("v3",)), AdvantageTie(holder))


class SccBuchiCase(NamedTuple):
    budget1: int
    holder: int
    verdict: object
    max_v3_visits: object  # int, or float("inf")


def _max_visits_against_adversary(spec: GameSpec, start: Configuration, vertex: str):
    """Most visits to ``vertex`` any Player-1 strategy achieves against the
    adversary that bids 0, uses the advantage, and heads back to ``v1``."""
    g = nx.DiGraph()
    frontier, seen = [start], {start}
    while frontier:
        c = frontier.pop()
        g.add_node(c)
        for b1 in range(c.budget1 + 1):
            res = resolve_bidding(spec, c, b1, 0)
            options = []
            if isinstance(res, Decided):
                options.append((res, None))
            elif res.holder == 2:
                options.append((res.take, "take"))
            else:
                options += [(res.take, "take"), (res.decline, "decline")]
            for out, choice in options:
                moves = spec.successors(c.vertex) if out.winner == 1 else ("v1",)
                for v in moves:
                    d = next_configuration(spec, c, out, v, choice)
                    g.add_edge(c, d)
                    if d not in seen:
                        seen.add(d)
                        frontier.append(d)
    cond = nx.condensation(g)
    members = cond.graph["mapping"]
    weight = Counter()
    for c, k in members.items():
        if c.vertex == vertex:
            if len(cond.nodes[k]["members"]) > 1 or g.has_edge(c, c):
                return float("inf")
            weight[k] += 1
    best = {}
    for k in reversed(list(nx.topological_sort(cond))):
        best[k] = weight[k] + max((best[j] for j in cond.successors(k)), default=0)
    return best[members[start]]


def run_scc_buchi_experiment(max_b1: int = 8) -> list:
    cases = []
    for b1 in range(max_b1 + 1):
        for holder in (1, 2):
            spec = scc_buchi_game(b1, holder)
            start = Configuration("v1", b1, 0, holder)
            verdict = RevealFirstAnalysis(spec).verdict(start)
            visits = _max_visits_against_adversary(spec, start, "v3")
            cases.append(SccBuchiCase(b1, holder, verdict, visits))
    return cases


def scc_buchi_claim_holds(cases) -> bool:
    return all(c.verdict == Determined(2) and c.max_v3_visits <= c.budget1 for c in cases)


# --------------------------------------------------------------------------
# interactive play


class _Quit(Exception):
    pass


class _Human(Strategy):
    def __init__(self, spec, player, session):
        super().__init__(spec, player)
        self.session = session

    def bid(self, config, memory):
        budget = config.budget1 if self.player == 1 else config.budget2
        while True:
            text = self.session.ask(f"your bid (0..{budget}, 'hint' or 'quit'): ")
            if text == "hint":
                self.session.hint(config)
                continue
            try:
                b = int(text)
            except ValueError:
                self.session.say("not a number")
                continue
            if 0 <= b <= budget:
                return b
            self.session.say(f"bid must be between 0 and {budget}")

    def move(self, config, bid1, bid2, stage, memory):
        succ = self.spec.successors(config.vertex)
        if len(succ) == 1:
            return succ[0]
        while True:
            text = self.session.ask(f"you move; choose one of {' '.join(succ)}: ")
            if text in succ:
                return text
            self.session.say("not a successor")

    def take_tie(self, config, bid, memory):
        while True:
            text = self.session.ask("tie and you hold the advantage; 'take' or 'decline': ")
            if text in ("take", "decline"):
                return text == "take"
            self.session.say("answer 'take' or 'decline'")


class InteractiveSession:
    """Terminal play of a human against the solved engine."""

    def __init__(self, spec: GameSpec, start: Configuration, human: int, stdin: IO, stdout: IO,
                 seed: int = 0, max_rounds: int = 1000):
        self.spec = spec
        self.start = _normalize(spec, start)
        self.human = human
        self.stdin, self.stdout = stdin, stdout
        self.seed = seed
        self.max_rounds = max_rounds
        self.analysis = None if isinstance(spec.tie, RandomTie) else RevealFirstAnalysis(spec)

    def say(self, text):
        self.stdout.write(text + "\n")

    def ask(self, prompt):
        self.stdout.write(prompt)
        self.stdout.flush()
        line = self.stdin.readline()
        if not line:
            raise _Quit()
        text = line.strip()
        if text == "quit":
            raise _Quit()
        return text

    def hint(self, config):
        if self.analysis is None:
            self.say("no hint under random tie-breaking")
            return
        self.say(bidding_matrix(self.spec, config, self.analysis).render())

    def run(self) -> PlayRecord:
        engine_player = 3 - self.human
        if self.analysis is None:
            engine = Strategy(self.spec, engine_player)
        else:
            engine = Optimal(self.spec, engine_player, self.analysis)
        human = _Human(self.spec, self.human, self)
        players = (human, engine) if self.human == 1 else (engine, human)
        coin = SplitMix64(self.seed) if isinstance(self.spec.tie, RandomTie) else None
        rec = PlayRecord(self.start)
        c = self.start
        mem = [p.observe(p.initial_memory(), c) for p in players]
        reach = set(self.spec.objective.target) if isinstance(self.spec.objective, Reachability) else None
        try:
            for k in range(self.max_rounds):
                if reach is not None and c.vertex in reach:
                    rec.outcome = 1
                    self.say(f"token on {c.vertex}: Player 1 wins")
                    break
                self.say(f"round {k}: {c}")
                r = play_round(self.spec, c, players, mem, coin)
                self.say(f"bids {r.bid1} {r.bid2}: {r.resolution}, now {r.next}")
                rec.rounds.append(r)
                c = r.next
                mem = [p.observe(m, c) for p, m in zip(players, mem)]
            else:
                rec.truncated = True
        except _Quit:
            rec.truncated = True
        return rec


def interactive_session(spec: GameSpec, start: Configuration, human: int, stdin: IO, stdout: IO,
                        seed: int = 0, max_rounds: int = 1000) -> PlayRecord:
    return InteractiveSession(spec, start, human, stdin, stdout, seed, max_rounds).run()
