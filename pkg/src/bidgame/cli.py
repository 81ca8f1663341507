"""Command-line interface: ``bidgame COMMAND ...``.

Exit codes: 0 success, 1 input or validation error, 2 a ``paper`` claim
check failed, 3 a resource cap was hit.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import random
import sys
from fractions import Fraction
from typing import Optional, Sequence

from .advantage import threshold_frontier
from .arena import AdvantageTie, GameSpec, RandomTie, TransducerTie, load_game, serialize_game
from .configgraph import Configuration, configurations, reduction
from .determinacy import Determined, RevealFirstAnalysis, bidding_matrix, classify_matrix
from .errors import BidGameError, NodeCapExceeded, SizeLimitExceeded, StrategyError
from .fixtures import (
    EXAMPLE1_FINISH,
    EXAMPLE1_LINE,
    FIG1_START,
    fig1_game,
    fig2_game,
    fig2_start,
)
from .randomtie import value_bounds, value_matrix
from .sim import (
    ConstantZero,
    Optimal,
    Scripted,
    Strategy,
    build_scc_strategy,
    interactive_session,
    play_deterministic,
    play_random,
    play_round,
    play_steps,
    random_scripted,
    run_scc_buchi_experiment,
    scc_buchi_claim_holds,
)
from .tbsolve import parse_turn_based

EXIT_OK, EXIT_INPUT, EXIT_CLAIM, EXIT_CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return f"{x} ({float(x):.9f})"
    return f"{x:.9f}" if isinstance(x, float) else str(x)


def _num_doc(x):
    if isinstance(x, Fraction):
        return {"fraction": str(x), "float": float(x)}
    return x


def config_doc(c: Configuration) -> dict:
    return {"vertex": c.vertex, "budget1": c.budget1, "budget2": c.budget2, "tieState": c.state}


def verdict_doc(v) -> dict:
    if isinstance(v, Determined):
        return {"determined": True, "winner": v.winner}
    return {"determined": False}


def _emit_doc(out, doc):
    out.write(json.dumps(doc, ensure_ascii=False, separators=(", ", ": ")) + "\n")


# --------------------------------------------------------------------------
# argument helpers


def _tie_state(spec: GameSpec, text: Optional[str]):
    if isinstance(spec.tie, RandomTie):
        if text is not None:
            raise UsageError("random tie-breaking has no tie state")
        return None
    if text is None:
        return spec.initial_tie_state()
    if isinstance(spec.tie, AdvantageTie):
        if text not in ("1", "2"):
            raise UsageError("--tie-state must be 1 or 2 under advantage tie-breaking")
        return int(text)
    if text not in spec.tie.transducer.states:
        raise UsageError(f"unknown transducer state {text!r}")
    return text


def _config(spec: GameSpec, args, required=True) -> Optional[Configuration]:
    if args.vertex is None and args.b1 is None:
        if required:
            raise UsageError("--from and --b1 are required")
        return None
    if args.vertex is None or args.b1 is None:
        raise UsageError("--from and --b1 go together")
    if args.vertex not in spec.vertices:
        raise UsageError(f"unknown vertex {args.vertex!r}")
    n = spec.total_budget
    if not 0 <= args.b1 <= n:
        raise UsageError(f"--b1 must be between 0 and {n}")
    return Configuration(args.vertex, args.b1, n - args.b1, _tie_state(spec, args.tie_state))


def _add_config_flags(p, required=False):
    p.add_argument("--from", dest="vertex", metavar="V", required=required, help="start vertex")
    p.add_argument("--b1", type=int, metavar="K", required=required, help="Player 1 budget (B2 = N - K)")
    p.add_argument("--tie-state", metavar="S", help="transducer state or advantage holder")


# --------------------------------------------------------------------------
# commands


def cmd_solve(args, out):
    spec = load_game(args.file)
    start = _config(spec, args, required=False)
    targets = [start] if start else configurations(spec)
    if isinstance(spec.tie, RandomTie):
        results = [(c, value_bounds(spec, c)) for c in targets]
        if args.format == "doc":
            _emit_doc(out, {"values": [
                {"configuration": config_doc(c), "lower": _num_doc(r.lower), "upper": _num_doc(r.upper),
                 "horizon": r.horizon_used, "converged": r.converged} for c, r in results]})
        else:
            for c, r in results:
                out.write(f"{c}  value in [{_fmt(r.lower)}, {_fmt(r.upper)}]\n")
        return EXIT_OK
    a = RevealFirstAnalysis(spec)
    verdicts = [(c, a.verdict(c)) for c in targets]
    if args.format == "doc":
        _emit_doc(out, {"verdicts": [dict(configuration=config_doc(c), **verdict_doc(v)) for c, v in verdicts]})
    else:
        for c, v in verdicts:
            out.write(f"{c}  {v}\n")
    return EXIT_OK


def cmd_determinacy(args, out):
    spec = load_game(args.file)
    a = RevealFirstAnalysis(spec)
    rows = [(c, a.verdict(c)) for c in configurations(spec)]
    if not args.all:
        rows = [(c, v) for c, v in rows if not isinstance(v, Determined)]
    if args.format == "doc":
        _emit_doc(out, {"verdicts": [dict(configuration=config_doc(c), **verdict_doc(v)) for c, v in rows]})
        return EXIT_OK
    if not rows and not args.all:
        out.write("every configuration is determined\n")
    for c, v in rows:
        out.write(f"{c}  {v}\n")
    return EXIT_OK


def cmd_matrix(args, out):
    spec = load_game(args.file)
    c = _config(spec, args)
    if isinstance(spec.tie, RandomTie):
        m = value_matrix(spec, c, args.horizon, exact=not args.float)
        if args.format == "doc":
            _emit_doc(out, {"configuration": config_doc(c), "horizon": args.horizon,
                            "entries": [[_num_doc(x) for x in row] for row in m.entries]})
        else:
            out.write(m.render() + "\n")
        return EXIT_OK
    m = bidding_matrix(spec, c)
    kind = classify_matrix(m)
    if args.format == "doc":
        _emit_doc(out, {"configuration": config_doc(c), "entries": [list(r) for r in m.entries],
                        "class": kind.kind, "row": kind.row, "column": kind.column})
    else:
        out.write(m.render() + "\n" + str(kind) + "\n")
    return EXIT_OK


def cmd_value(args, out):
    spec = load_game(args.file)
    c = _config(spec, args)
    r = value_bounds(spec, c, args.tol, args.max_horizon, exact=not args.float)
    if args.format == "doc":
        _emit_doc(out, {"configuration": config_doc(c), "lower": _num_doc(r.lower), "upper": _num_doc(r.upper),
                        "horizon": r.horizon_used, "converged": r.converged})
    else:
        out.write(f"{c}\nlower {_fmt(r.lower)}\nupper {_fmt(r.upper)}\nhorizon {r.horizon_used}\n"
                  f"converged {'yes' if r.converged else 'no'}\n")
    return EXIT_OK


def cmd_threshold(args, out):
    spec = load_game(args.file)
    f = threshold_frontier(spec)
    if args.format == "doc":
        _emit_doc(out, {"totalBudget": f.total_budget, "thresholds": {
            v: None if t is None else {"budget": t.budget, "needsAdvantage": t.needs_advantage}
            for v, t in f.thresholds.items()}})
    else:
        out.write(f.render() + "\n")
    return EXIT_OK


def cmd_reduce(args, out):
    with open(args.file, "rb") as fh:
        tbg = parse_turn_based(fh.read())
    red = reduction(tbg, args.flavor)
    spec = red.spec
    start = args.start or tbg.nodes[0]
    if start not in tbg.nodes:
        raise UsageError(f"unknown vertex {start!r}")
    if args.flavor == "advantage":
        spec = GameSpec(spec.arena, spec.objective, AdvantageTie(red.owner[start]))
    else:
        t = spec.tie.transducer
        spec = GameSpec(spec.arena, spec.objective, TransducerTie(dataclasses.replace(t, initial=f"at:{start}")))
    out.write(serialize_game(spec).decode("utf-8"))
    return EXIT_OK


STRATEGY_KINDS = ("optimal", "zero", "random", "scc")


def _strategy(kind: str, spec: GameSpec, player: int, seed: int, analysis) -> Strategy:
    if kind == "optimal":
        if isinstance(spec.tie, RandomTie):
            raise UsageError("optimal strategies are not available under random tie-breaking")
        return Optimal(spec, player, analysis)
    if kind == "zero":
        return ConstantZero(spec, player)
    if kind == "random":
        return random_scripted(spec, player, random.Random(seed * 2 + player))
    if kind == "scc":
        if player != 1:
            raise UsageError("the scc strategy is a Player 1 strategy")
        return build_scc_strategy(spec)
    raise UsageError(f"unknown strategy kind {kind!r}")


def _record_doc(rec) -> dict:
    return {
        "start": config_doc(rec.start),
        "rounds": [{"configuration": config_doc(r.config), "bid1": r.bid1, "bid2": r.bid2,
                    "resolution": r.resolution, "next": config_doc(r.next)} for r in rec.rounds],
        "outcome": rec.outcome,
        "lassoStart": rec.lasso_start,
        "truncated": rec.truncated,
    }


def cmd_simulate(args, out, err):
    spec = load_game(args.file)
    start = _config(spec, args, required=False) or Configuration(
        spec.vertices[0], spec.total_budget, 0, _tie_state(spec, None))
    analysis = None if isinstance(spec.tie, RandomTie) else RevealFirstAnalysis(spec)
    s1 = _strategy(args.p1, spec, 1, args.seed, analysis)
    s2 = _strategy(args.p2, spec, 2, args.seed, analysis)
    if isinstance(spec.tie, RandomTie):
        rec = play_random(spec, start, s1, s2, args.seed, args.steps)
    else:
        try:
            rec = play_deterministic(spec, start, s1, s2, args.steps)
        except StrategyError:
            # no lasso within the step budget: report the truncated play
            rec = play_steps(spec, start, s1, s2, args.steps, args.seed)
    if args.format == "doc":
        _emit_doc(out, _record_doc(rec))
    else:
        out.write(rec.transcript())
        visited = " ".join(f"{v}:{k}" for v, k in sorted(rec.visited.items()))
        lasso = "" if rec.lasso_start is None else f"; lasso from round {rec.lasso_start}"
        err.write(f"rounds {len(rec.rounds)}; visits {visited}{lasso}; outcome {rec.outcome}\n")
    return EXIT_OK


def cmd_play(args, out, inp):
    spec = load_game(args.file)
    start = _config(spec, args, required=False) or Configuration(
        spec.vertices[0], spec.total_budget // 2, spec.total_budget - spec.total_budget // 2,
        _tie_state(spec, None))
    rec = interactive_session(spec, start, args.human, inp, out, seed=args.seed)
    out.write("transcript:\n" + rec.transcript())
    return EXIT_OK


# --------------------------------------------------------------------------
# paper claims


def replay_example1():
    """Replay Example 1 with Player 2 revealing first; returns the
    configurations reached, one list per answer of Player 2 in the last round."""
    spec = fig1_game()
    runs = {}
    for last_bid2 in (1, 0):
        script1, script2 = {}, {}
        c = FIG1_START
        for b1, b2, v, _ in EXAMPLE1_LINE:
            script1[c] = (b1, v, True)
            script2[c] = (b2, v, True)
            c = play_round(spec, c, (Scripted(spec, 1, script1), Scripted(spec, 2, script2)), (None, None)).next
        script1[c] = (1, "t", True)
        script2[c] = (last_bid2, "t", True)
        reached, c = [], FIG1_START
        s = (Scripted(spec, 1, script1), Scripted(spec, 2, script2))
        for _ in range(len(EXAMPLE1_LINE) + 1):
            c = play_round(spec, c, s, (None, None)).next
            reached.append(c)
        runs[last_bid2] = reached
    return runs


def example1_matches(runs) -> bool:
    quoted = [x[3] for x in EXAMPLE1_LINE]
    return all(runs[b][:-1] == quoted and runs[b][-1] == EXAMPLE1_FINISH[b] for b in (1, 0))


def paper_fig1(out, fmt):
    spec = fig1_game()
    a = RevealFirstAnalysis(spec)
    verdict = a.verdict(FIG1_START)
    nondet = [c for c in configurations(spec) if not isinstance(a.verdict(c), Determined)]
    runs = replay_example1()
    replay_ok = example1_matches(runs)
    ok = not isinstance(verdict, Determined) and FIG1_START in nondet and replay_ok
    if fmt == "doc":
        _emit_doc(out, {"claim": "fig1", "holds": ok, "start": config_doc(FIG1_START),
                        "verdict": verdict_doc(verdict), "nondetermined": [config_doc(c) for c in nondet],
                        "example1Replay": replay_ok})
    else:
        out.write(f"{verdict} at {FIG1_START}\n")
        out.write("not determined: " + " ".join(str(c) for c in nondet) + "\n")
        out.write(bidding_matrix(spec, FIG1_START, a).render() + "\n")
        for b in (1, 0):
            out.write(f"Example 1 line (Player 2 answers {b} last): " + " -> ".join(str(c) for c in runs[b]) + "\n")
        out.write(f"Example 1 replay {'matches' if replay_ok else 'DOES NOT match'} the quoted configurations\n")
    return ok


def fig2_table(max_total: int = 6):
    rows = []
    for n in range(2, max_total + 1):
        spec = fig2_game(n)
        a = RevealFirstAnalysis(spec)
        for v in ("v1", "v2"):
            for b1 in range(1, n):
                c = fig2_start(v, b1, n)
                rows.append((c, a.verdict(c)))
    return rows


def paper_fig2(out, fmt):
    rows = fig2_table(6)
    bad = [(c, v) for c, v in rows if isinstance(v, Determined)]
    ok = not bad
    if fmt == "doc":
        _emit_doc(out, {"claim": "fig2", "holds": ok,
                        "verdicts": [dict(configuration=config_doc(c), **verdict_doc(v)) for c, v in rows]})
    else:
        for c, v in rows:
            out.write(f"{c}  {v}\n")
        if ok:
            out.write("NOT DETERMINED for all positive budgets with N <= 6\n")
        else:
            out.write(f"claim fails at {len(bad)} of {len(rows)} budget pairs\n")
    return ok


def paper_scc_buchi(out, fmt, max_b1=8):
    cases = run_scc_buchi_experiment(max_b1)
    ok = scc_buchi_claim_holds(cases)
    if fmt == "doc":
        _emit_doc(out, {"claim": "scc-buchi", "holds": ok, "cases": [
            {"budget1": c.budget1, "holder": c.holder, **verdict_doc(c.verdict),
             "maxVisitsV3": None if c.max_v3_visits == float("inf") else c.max_v3_visits} for c in cases]})
    else:
        for c in cases:
            out.write(f"<v1,{c.budget1},0,{c.holder}>  {c.verdict}; at most {c.max_v3_visits} visits to v3 "
                      f"against the bid-0 adversary\n")
        if ok:
            out.write(f"Player 2 wins for all B1 <= {max_b1}\n")
        else:
            out.write("claim fails\n")
    return ok


def cmd_paper(args, out):
    fn = {"fig1": paper_fig1, "fig2": paper_fig2, "scc-buchi": paper_scc_buchi}[args.example]
    return EXIT_OK if fn(out, args.format) else EXIT_CLAIM


# --------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bidgame", description="Discrete-bidding games on graphs.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser, metavar="COMMAND")
    sub.required = True

    def add(name, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--format", choices=("text", "doc"), default="text")
        return sp

    sp = add("solve", "determinacy verdicts (values under random ties)")
    sp.add_argument("file")
    _add_config_flags(sp)
    sp = add("determinacy", "list non-determined configurations")
    sp.add_argument("file")
    sp.add_argument("--all", action="store_true", help="list every configuration with its verdict")
    sp = add("matrix", "bidding matrix (value matrix under random ties)")
    sp.add_argument("file")
    _add_config_flags(sp, required=True)
    sp.add_argument("--horizon", type=int, default=64, help="rounds for value matrices")
    sp.add_argument("--float", action="store_true", help="floating point instead of exact values")
    sp = add("value", "bounds on the value under random ties")
    sp.add_argument("file")
    _add_config_flags(sp, required=True)
    sp.add_argument("--tol", type=float, default=1e-6)
    sp.add_argument("--max-horizon", type=int, default=2 ** 14)
    sp.add_argument("--float", action="store_true", help="floating point instead of exact values")
    sp = add("threshold", "threshold budgets under advantage ties")
    sp.add_argument("file")
    sp = add("reduce", "turn-based game to bidding game")
    sp.add_argument("--flavor", choices=("transducer", "advantage"), required=True)
    sp.add_argument("--start", metavar="V", help="vertex whose owner starts with the tie advantage")
    sp.add_argument("file")
    sp = add("simulate", "simulate a play and print its transcript")
    sp.add_argument("file")
    _add_config_flags(sp)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--steps", type=int, default=100)
    sp.add_argument("--p1", choices=STRATEGY_KINDS, default="optimal")
    sp.add_argument("--p2", choices=STRATEGY_KINDS, default="optimal")
    sp = add("play", "play interactively against the engine")
    sp.add_argument("file")
    _add_config_flags(sp)
    sp.add_argument("--human", type=int, choices=(1, 2), required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp = add("paper", "check a built-in example")
    sp.add_argument("example", choices=("fig1", "fig2", "scc-buchi"))
    return p


def main(argv: Optional[Sequence[str]] = None, stdin=None, stdout=None, stderr=None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if args.command == "simulate":
            return cmd_simulate(args, stdout, stderr)
        if args.command == "play":
            return cmd_play(args, stdout, stdin)
        handler = {
            "solve": cmd_solve, "determinacy": cmd_determinacy, "matrix": cmd_matrix, "value": cmd_value,
            "threshold": cmd_threshold, "reduce": cmd_reduce, "paper": cmd_paper,
        }[args.command]
        return handler(args, stdout)
    except UsageError as exc:
        stderr.write(f"{exc}\n")
        return EXIT_INPUT
    except (NodeCapExceeded, SizeLimitExceeded) as exc:
        stderr.write(f"bidgame: {exc}\n")
        return EXIT_CAP
    except (BidGameError, OSError) as exc:
        stderr.write(f"bidgame: {exc}\n")
        return EXIT_INPUT
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
