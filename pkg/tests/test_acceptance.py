"""Acceptance criteria 1-9.

Each test prints one PASS/FAIL line (also collected into the
"acceptance criteria" section of the pytest summary).  Run directly with
``python tests/test_acceptance.py`` for just these lines.
"""
import io
import random
import time
from fractions import Fraction
from functools import lru_cache

from conftest import coin_game, record_acceptance

from bidgame import (
    Configuration,
    Determined,
    NotDetermined,
    RevealFirstAnalysis,
    TransducerTie,
    configurations,
    constant_transducer,
    make_game,
    reduction,
    validate_advantage_monotonicity,
    value_bounds,
    value_matrix,
)
from bidgame.arena import RandomTie, Reachability
from bidgame.cli import fig2_table, main, replay_example1
from bidgame.determinacy import scan_nondetermined, validate_matrix_lemmas
from bidgame.fixtures import EXAMPLE1_FINISH, FIG1_START, fig1_game, fig2_game
from bidgame.generators import (
    random_bidding_game,
    random_turn_based_game,
    strongly_connected_edges,
    vertex_names,
)
from bidgame.randomtie import dominant_bid
from bidgame.sim import (
    build_scc_strategy,
    coverage_step,
    play_steps,
    random_scripted,
    run_scc_buchi_experiment,
)
from bidgame.tbsolve import cycle_forming_oracle, solve_turn_based


def _report(number: int, ok: bool, detail: str, seconds: float):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} ({detail}; {seconds:.2f}s)"
    print(line)
    record_acceptance(line)


def _cli(argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(argv, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


@lru_cache(maxsize=None)
def _suite(mechanism: str, count: int = 200, seed: int = 7):
    """The random games of criteria 3 and 4 with their reveal-first analyses."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        spec = random_bidding_game(rng, mechanism, max_vertices=5, max_budget=4, max_states=3)
        out.append((spec, RevealFirstAnalysis(spec)))
    return tuple(out)


def test_criterion_1_fig1_not_determined():
    t0 = time.perf_counter()
    code, text, _ = _cli(["paper", "fig1"])
    runs = replay_example1()
    elapsed = time.perf_counter() - t0

    spec = fig1_game()
    verdict = RevealFirstAnalysis(spec).verdict(FIG1_START)
    quoted = Configuration("v1", 2, 0, "A1")  # as written in the criterion
    reached = runs[1][0]
    player1_wins = all(runs[b][-1] == EXAMPLE1_FINISH[b] and runs[b][-1].vertex == "t" for b in (1, 0))
    checks = {
        "exit 0": code == 0,
        "NOT DETERMINED at <v0,1,1,A2>": "NOT DETERMINED at <v0,1,1,A2>" in text
        and verdict == NotDetermined(),
        f"replay reaches {quoted}": reached == quoted,
        "Player 1 wins after bidding 1 twice": player1_wins,
        "under 1 s": elapsed < 1.0,
    }
    failed = [k for k, ok in checks.items() if not ok]
    detail = "all checks hold" if not failed else "failed: " + ", ".join(failed)
    if reached != quoted:
        detail += f"; the replay reaches {reached} instead"
    _report(1, not failed, detail, elapsed)
    assert not failed, detail


def test_criterion_2_fig2_not_determined():
    t0 = time.perf_counter()
    rows = fig2_table(6)
    elapsed = time.perf_counter() - t0
    bad = [(c, v) for c, v in rows if v != NotDetermined()]
    ok = not bad and elapsed < 5.0
    detail = f"{len(rows) - len(bad)}/{len(rows)} budget pairs not determined"
    if bad:
        detail += "; determined at " + " ".join(f"{c}={v.winner}" for c, v in bad)
    _report(2, ok, detail, elapsed)
    assert ok, detail


def test_criterion_3_tie_unaware_transducers_determined():
    t0 = time.perf_counter()
    nondet, lemma, configs = [], [], 0
    for spec, a in _suite("transducer"):
        nondet += [(spec, c) for c in scan_nondetermined(spec, a)]
        for c in configurations(spec):
            configs += 1
            lemma += validate_matrix_lemmas(spec, c, a)
    elapsed = time.perf_counter() - t0
    ok = not nondet and not lemma and elapsed < 300
    _report(3, ok, f"200 games, {configs} configurations, {len(nondet)} not determined, "
                   f"{len(lemma)} lemma violations", elapsed)
    assert ok


def test_criterion_4_advantage_determined():
    t0 = time.perf_counter()
    nondet, mono = [], []
    for spec, a in _suite("advantage"):
        nondet += scan_nondetermined(spec, a)
        mono += validate_advantage_monotonicity(spec, a)
    elapsed = time.perf_counter() - t0
    ok = not nondet and not mono and elapsed < 300
    _report(4, ok, f"200 games, {len(nondet)} not determined, {len(mono)} monotonicity violations", elapsed)
    assert ok


def _random_reachability_game(rng):
    return random_bidding_game(rng, "random", max_vertices=4, max_budget=3, kinds=("reachability",))


def test_criterion_5_random_tie_values():
    t0 = time.perf_counter()
    problems = []

    r = value_bounds(coin_game(0), Configuration("v", 0, 0, None), tol=1e-9)
    if not (r.lower == r.upper == Fraction(1, 2) and f"{float(r.lower):.9f}" == "0.500000000"):
        problems.append(f"coin game gives [{r.lower}, {r.upper}]")

    rng = random.Random(5)
    matrices = dominants = 0
    for _ in range(100):
        spec = _random_reachability_game(rng)
        n = rng.randint(1, 6)
        for c in configurations(spec):
            m = value_matrix(spec, c, n)
            matrices += 1
            e = m.entries
            for b in range(1, min(c.budget1, c.budget2) + 1):
                if e[b][b] != (e[b - 1][b] + e[b][b - 1]) / 2:
                    problems.append(f"diagonal averaging fails at {c}, bid {b}")
            dominant_bid(m)  # raises when no bid dominates
            dominants += 1

    rng = random.Random(6)
    games, unconverged, worst = 0, [], 0
    for _ in range(100):
        spec = _random_reachability_game(rng)
        games += 1
        for c in configurations(spec):
            res = value_bounds(spec, c, tol=1e-6, max_horizon=2 ** 14)
            worst = max(worst, res.horizon_used)
            if not res.converged or res.upper - res.lower > 1e-6:
                unconverged.append(c)
    problems += [f"bounds do not close at {c}" for c in unconverged]
    elapsed = time.perf_counter() - t0
    ok = not problems and elapsed < 600
    detail = (f"coin game 1/2, {matrices} matrices averaged, {dominants} dominant bids, "
              f"bounds closed on {games} games (largest horizon {worst})")
    if problems:
        detail = "; ".join(problems[:5])
    _report(5, ok, detail, elapsed)
    assert ok, detail


def test_criterion_6_reductions_preserve_winner():
    t0 = time.perf_counter()
    rng = random.Random(11)
    mismatches, checked = [], 0
    for _ in range(50):
        tbg = random_turn_based_game(rng, max_nodes=6, kind="reachability")
        truth = solve_turn_based(tbg)
        for flavor in ("transducer", "advantage"):
            red = reduction(tbg, flavor)
            a = RevealFirstAnalysis(red.spec)
            for v in tbg.nodes:
                checked += 1
                if a.verdict(red.start(v)) != Determined(truth.winner_of(v)):
                    mismatches.append((flavor, v))
    elapsed = time.perf_counter() - t0
    ok = not mismatches and elapsed < 120
    _report(6, ok, f"50 games, {checked} start vertices, {len(mismatches)} mismatches", elapsed)
    assert ok


def test_criterion_7_cycle_forming_oracle():
    t0 = time.perf_counter()
    rng = random.Random(5)
    kinds = ("reachability", "buchi", "parity", "muller")
    mismatches, checked = [], 0
    for i in range(100):
        g = random_turn_based_game(rng, max_nodes=5, kind=kinds[i % 4])
        res = solve_turn_based(g)
        for v in g.nodes:
            checked += 1
            if cycle_forming_oracle(g, v) != res.winner_of(v):
                mismatches.append((i, v))
    elapsed = time.perf_counter() - t0
    ok = not mismatches and elapsed < 120
    _report(7, ok, f"100 games, {checked} nodes, {len(mismatches)} disagreements", elapsed)
    assert ok


def test_criterion_8_strongly_connected_games():
    t0 = time.perf_counter()
    code, text, _ = _cli(["paper", "scc-buchi"])
    cases = run_scc_buchi_experiment(8)
    problems = []
    if code != 0 or "Player 2 wins for all B1 <= 8" not in text:
        problems.append("paper scc-buchi did not confirm the claim")
    if {(c.budget1, c.holder) for c in cases} != {(b, h) for b in range(9) for h in (1, 2)}:
        problems.append("not every budget and holder was checked")
    problems += [f"B1={c.budget1} holder {c.holder}: {c.verdict}, {c.max_v3_visits} visits"
                 for c in cases if c.verdict != Determined(2) or c.max_v3_visits > c.budget1]

    rng = random.Random(2024)
    runs = covered = 0
    for _ in range(10):
        vs = vertex_names(rng.randint(2, 5))
        edges = strongly_connected_edges(rng, vs)
        n = rng.randint(0, 4)
        for tie in (TransducerTie(constant_transducer(1)), RandomTie()):
            spec = make_game(vs, edges, n, Reachability((vs[0],)), tie)
            s1 = build_scc_strategy(spec)
            cap = 10 * len(vs) * (n + 2)
            for seed in range(100):
                r = random.Random(seed)
                b1 = r.randint(0, n)
                state = None if isinstance(tie, RandomTie) else spec.initial_tie_state()
                start = Configuration(r.choice(vs), b1, n - b1, state)
                rec = play_steps(spec, start, s1, random_scripted(spec, 2, r), cap, seed)
                runs += 1
                covered += coverage_step(rec, vs) is not None
    if covered != runs:
        problems.append(f"coverage in {covered}/{runs} runs")
    elapsed = time.perf_counter() - t0
    ok = not problems and elapsed < 120
    detail = f"Determined(2) for B1 <= 8 and both holders, coverage in {covered}/{runs} runs"
    if problems:
        detail = "; ".join(problems[:5])
    _report(8, ok, detail, elapsed)
    assert ok, detail


def test_criterion_9_never_both():
    t0 = time.perf_counter()
    scans = [fig1_game()] + [fig2_game(n) for n in range(2, 7)]
    analyses = [RevealFirstAnalysis(s) for s in scans]
    analyses += [a for _, a in _suite("transducer")] + [a for _, a in _suite("advantage")]
    both = [c for a in analyses for c in a.never_both_violations()]
    configs = sum(len(configurations(a.spec)) for a in analyses)
    elapsed = time.perf_counter() - t0
    _report(9, not both, f"{len(analyses)} games, {configs} configurations, {len(both)} won in both G1 and G2",
            elapsed)
    assert not both


if __name__ == "__main__":
    import sys

    import pytest

    sys.exit(pytest.main([__file__, "-q", "-s"]))
