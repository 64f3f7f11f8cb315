"""Command-line front end: ``inclogic eval|translate|gfp|efgame|suite|examples``.

Exit codes: 0 success (``eval``: formula true), 1 ``eval`` false or a failed
suite, 2 usage/parse/guard error, 3 the two ``eval`` engines disagree.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import acceptance, corpus, efgame
from .fixpoint import FixpointContext, FixpointEvaluator, gfp, lfp
from .structures import (Relation, Structure, StructureError, Team, format_model, graph,
                         parse_model, parse_team)
from .syntax import (Fix, FormulaError, FreshNames, Incl, Signature, free_vars,
                     is_fixpoint_formula, is_incl, parse_formula, to_nnf, to_text, walk)
from .team_eval import GuardError, NaiveEvaluator
from .translate import (gfp_to_inc_fo, gfp_to_inc_sentence, inc_to_gfp, myopic_to_inc,
                        wrap_sentence_inc_to_gfp)

EXIT_TRUE, EXIT_FALSE, EXIT_ERROR, EXIT_DISAGREE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _emit(args, payload: dict, text: str):
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True, default=str))
    else:
        print(text)


def _so_vars(specs) -> dict:
    out = {}
    for spec in specs or ():
        name, sep, arity = spec.partition("/")
        if not sep or not arity.isdigit() or not name.isidentifier():
            raise UsageError(f"--so expects NAME/ARITY, got {spec!r}")
        out[name] = int(arity)
    return out


def _vars(text):
    if text is None:
        return None
    names = tuple(v for v in text.replace(" ", "").split(",") if v)
    if not names:
        raise UsageError("--vars needs at least one variable")
    return names


def _formula_text(args) -> str:
    if args.file:
        return _read(args.file)
    if args.formula is None:
        raise UsageError("give a formula or --file")
    return args.formula


def _read(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


# -- eval --------------------------------------------------------------------

def _fixpoint_verdict(M: Structure, X: Team, f, fresh_rel: str):
    """Pointwise evaluation; inclusion formulas are translated first."""
    if not any(isinstance(g, Incl) for g in walk(f)) and is_fixpoint_formula(f):
        ev = FixpointEvaluator(FixpointContext(M), f, extra_vars=X.vars)
        return ev.holds_all(X)
    if not is_incl(f):
        raise UsageError("the gfp engine takes inclusion formulas or first-order "
                         "formulas with fixed points")
    if not X.rows:
        return True
    if not X.vars:
        # the team {()}: a sentence, translated with a dummy variable
        if M.size == 0:
            raise UsageError("the gfp engine needs a nonempty universe for sentences")
        return FixpointEvaluator(FixpointContext(M), wrap_sentence_inc_to_gfp(f)).holds()
    star = inc_to_gfp(f, X.vars, rel=fresh_rel)
    rel = Relation(len(X.vars), X.rows)
    ev = FixpointEvaluator(FixpointContext(M, {fresh_rel: rel}), star)
    return ev.holds_all(X)


def cmd_eval(args) -> int:
    M = parse_model(_read(args.model))
    so = _so_vars(args.so)
    X = parse_team(_read(args.team), M.size) if args.team else Team.unit()
    f = to_nnf(parse_formula(_formula_text(args), M.signature(so)))
    missing = [v for v in free_vars(f) if v not in X.vars]
    if missing:
        raise UsageError(f"free variables not in the team domain: {', '.join(missing)}")
    verdicts = {}
    if args.engine in ("naive", "both"):
        if any(isinstance(g, Fix) for g in walk(f)):
            raise UsageError("the naive engine does not evaluate fixed points; use --engine gfp")
        verdicts["naive"] = NaiveEvaluator(M, force=args.force).holds(X, f)
    if args.engine in ("gfp", "both"):
        fresh = FreshNames.avoiding(f, names=set(M.relations) | set(M.params), rel_prefix="T")
        verdicts["gfp"] = _fixpoint_verdict(M, X, f, fresh.prefer("R", kind="rel"))
    values = set(verdicts.values())
    value = values.pop() if len(values) == 1 else None
    payload = {"formula": to_text(f), "engines": verdicts, "value": value}
    lines = [f"{name}: {str(v).lower()}" for name, v in verdicts.items()]
    if args.engine == "both":
        payload["agree"] = value is not None
        lines.append(f"agree: {str(value is not None).lower()}")
    else:
        lines = [str(value).lower()]
    _emit(args, payload, "\n".join(lines))
    if value is None:
        return EXIT_DISAGREE
    return EXIT_TRUE if value else EXIT_FALSE


# -- translate ---------------------------------------------------------------

def cmd_translate(args) -> int:
    text = _formula_text(args)
    so = _so_vars(args.so)
    xs = _vars(args.vars)
    if args.direction == "inc2gfp":
        f = to_nnf(parse_formula(text))
        if xs is None:
            if free_vars(f):
                raise UsageError("a formula with free variables needs --vars")
            out = wrap_sentence_inc_to_gfp(f)
        else:
            out = inc_to_gfp(f, xs, rel=args.rel)
    elif args.direction == "gfp2inc":
        if xs is None:
            out = gfp_to_inc_sentence(parse_formula(text))
        else:
            sig = Signature(so_vars=so or None) if so else None
            out = gfp_to_inc_fo(parse_formula(text, sig), args.rel, xs)
    else:
        out = myopic_to_inc(parse_formula(text))
    result = to_text(out)
    _emit(args, {"direction": args.direction, "input": text.strip(), "output": result}, result)
    return 0


# -- gfp ---------------------------------------------------------------------

def cmd_gfp(args) -> int:
    M = parse_model(_read(args.model))
    xs = _vars(args.vars)
    if xs is None:
        raise UsageError("--vars is required")
    sig = M.signature({**_so_vars(args.so), args.rel: len(xs)})
    body = to_nnf(parse_formula(_formula_text(args), sig))
    fixpoint = gfp if args.kind == "gfp" else lfp
    P = fixpoint(FixpointContext(M), body, args.rel, xs)
    tuples = sorted(P.tuples)
    text = "{ " + " ".join("(" + ",".join(map(str, t)) + ")" for t in tuples) + " }"
    _emit(args, {"kind": args.kind, "vars": list(xs), "tuples": tuples}, text)
    return 0


# -- efgame ------------------------------------------------------------------

def _position(args) -> efgame.GamePosition:
    if args.preset:
        make = efgame.PRESETS.get(args.preset)
        if make is None:
            raise UsageError(f"unknown preset {args.preset!r}; known: {', '.join(efgame.PRESETS)}")
        return make(args.n)
    if not (args.left and args.right):
        raise UsageError("give --preset or both --left and --right model files")
    A = parse_model(_read(args.left))
    B = parse_model(_read(args.right))
    X = parse_team(_read(args.left_team), A.size) if args.left_team else Team.unit()
    Y = parse_team(_read(args.right_team), B.size) if args.right_team else Team.unit()
    return efgame.GamePosition(A, X, B, Y.conform(X.vars), args.rounds)


def cmd_efgame(args) -> int:
    p = _position(args)
    budget = efgame.AtomBudget(max_inclusion_length=args.max_inclusion)
    solver = efgame.GameSolver(p.A, p.B, budget=budget, force=args.force)
    if args.mode == "solve":
        sol = solver.solve(p)
        payload = {"winner": sol.winner, "rounds": p.rounds}
        lines = [f"winner: {sol.winner}"]
        if sol.witness is not None:
            payload["witness"] = to_text(sol.witness)
            lines[0] += f" (witness: {payload['witness']})"
        if sol.move is not None:
            payload["move"] = efgame.format_move(sol.move, p.X)
            lines.append(f"first move: {payload['move']}")
        if args.tree:
            payload["tree"] = solver.strategy_tree(p.X, p.Y, p.rounds)
            lines.append(json.dumps(payload["tree"], indent=2))
        _emit(args, payload, "\n".join(lines))
        return 0
    side = efgame.SPOILER if args.side == "spoiler" else efgame.DUPLICATOR
    if args.mode == "replay":
        if not args.replay:
            raise UsageError("replay needs --replay FILE")
        read = efgame.replay_lines(_read(args.replay).splitlines())
    else:
        read = input
    solver.check_guard(p)
    session = efgame.GameSession(p, side, read=read, solver=solver)
    try:
        winner = session.play()
    except (EOFError, efgame.ReplayExhausted) as exc:
        raise UsageError(f"game ended early: {exc or 'end of input'}") from None
    if args.transcript:
        Path(args.transcript).write_text("\n".join(session.transcript) + "\n")
    if args.json:
        print(json.dumps({"winner": winner, "moves": session.transcript}, indent=2))
    return 0


# -- suite -------------------------------------------------------------------

def cmd_suite(args) -> int:
    if args.name == "acceptance":
        only = {int(k) for k in args.only.split(",")} if args.only else None
        results = acceptance.run_all(only, report=lambda r: print(r.line(), file=sys.stderr))
        summary = {"passed": all(r.passed for r in results),
                   "criteria": [r.as_dict() for r in results]}
        print(json.dumps(summary, indent=2, default=str))
        return 0 if summary["passed"] else 1
    if args.name == "perf":
        sizes = list(range(5, args.max_n + 1, args.step))
        report = {}
        for backend in acceptance.available_backends():
            rows = acceptance.time_agap(sizes, backend=backend)
            report[backend] = {"timings": rows,
                               "fitted_exponent": round(acceptance.fit_exponent(rows), 2)}
            print(f"{backend}: fitted exponent {report[backend]['fitted_exponent']}",
                  file=sys.stderr)
        report["naive_guard_trips"] = {n: acceptance.naive_guard_trips(n) for n in (3, 4, 5)}
        print(json.dumps(report, indent=2))
        return 0
    raise UsageError(f"unknown suite {args.name!r}; known: acceptance, perf")


# -- examples ----------------------------------------------------------------

def _examples():
    two_cycle = graph(2, [(0, 1), (1, 0)])
    cycle = corpus.parsed(corpus.CYCLE_INCL)
    yield "cycle sentence", corpus.CYCLE_INCL, [
        ("naive on a 2-cycle", NaiveEvaluator(two_cycle).holds(Team.unit(), cycle)),
        ("wrapped gfp sentence", to_text(wrap_sentence_inc_to_gfp(cycle))),
    ]
    yield "cycle normal form", corpus.CYCLE_PGFP, [
        ("back-translation", to_text(gfp_to_inc_sentence(corpus.parsed(corpus.CYCLE_PGFP)))),
    ]
    yield "inclusion atom", "(y) <= (x)", [
        ("inc2gfp over x,y", to_text(inc_to_gfp(parse_formula("(y) <= (x)"), ("x", "y")))),
    ]
    myopic = corpus.MYOPIC_SUITE[0].text
    yield "myopic sentence", myopic, [
        ("myopic2inc", to_text(myopic_to_inc(parse_formula(myopic)))),
    ]
    yield "game sentence", corpus.AGAP_INCL, [
        ("equivalent gfp sentence", corpus.AGAP_PGFP),
    ]
    yield "cardinality game n=1", "A = {0}, B = {0,1}, teams {()}", [
        ("winner", efgame.solve(efgame.cardinality_preset(1)).winner),
    ]
    yield "predicate game", "P = {0} against P = {}, teams {()}", [
        ("winner", efgame.solve(efgame.predicate_preset(1)).winner),
    ]


def cmd_examples(args) -> int:
    if args.write_models:
        out = Path(args.write_models)
        out.mkdir(parents=True, exist_ok=True)
        (out / "two_cycle.model").write_text(format_model(graph(2, [(0, 1), (1, 0)])))
        (out / "path.model").write_text(format_model(graph(3, [(0, 1), (1, 2)])))
        (out / "unit.team").write_text("vars\n()\n")
        (out / "swap.team").write_text("vars x y\n0 1\n1 0\n")
    items = []
    for name, source, rows in _examples():
        items.append({"name": name, "input": source, "results": dict(rows)})
    lines = []
    for item in items:
        lines.append(f"{item['name']}: {item['input']}")
        lines += [f"  {k}: {v}" for k, v in item["results"].items()]
    _emit(args, {"examples": items}, "\n".join(lines))
    return 0


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="inclogic",
                                     description="Inclusion logic and greatest fixed points.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    sub = parser.add_subparsers(dest="command", required=True)

    def sub_add(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    def formula_args(p, positional=True):
        if positional:
            p.add_argument("formula", nargs="?", help="formula text")
        p.add_argument("--file", help="read the formula from a file")
        p.add_argument("--so", action="append", metavar="R/K",
                       help="declare a second-order relation variable")

    p = sub_add("eval", help="evaluate a formula on a model and team")
    p.add_argument("model", help="model file")
    formula_args(p)
    p.add_argument("--team", help="team file (default: the team {()})")
    p.add_argument("--engine", choices=("naive", "gfp", "both"), default="naive")
    p.add_argument("--force", action="store_true", help="ignore the naive engine's size guards")
    p.set_defaults(run=cmd_eval)

    p = sub_add("translate", help="translate between the logics")
    p.add_argument("direction", choices=("inc2gfp", "gfp2inc", "myopic2inc"))
    formula_args(p)
    p.add_argument("--vars", help="comma separated variable tuple carrying the relation")
    p.add_argument("--rel", default="R", help="relation symbol for the team (default R)")
    p.set_defaults(run=cmd_translate)

    p = sub_add("gfp", help="compute a greatest or least fixed point")
    p.add_argument("model", help="model file")
    formula_args(p)
    p.add_argument("--rel", default="R", help="the fixed-point relation symbol")
    p.add_argument("--vars", help="comma separated bound variables")
    p.add_argument("--kind", choices=("gfp", "lfp"), default="gfp")
    p.set_defaults(run=cmd_gfp)

    p = sub_add("efgame", help="solve or play the team EF game")
    p.add_argument("mode", choices=("solve", "play", "replay"))
    p.add_argument("--preset", help="efex (|A| = n, |B| = n+1) or patom")
    p.add_argument("--n", type=int, default=1, help="preset size / rounds")
    p.add_argument("--left", help="left model file")
    p.add_argument("--left-team", help="left team file")
    p.add_argument("--right", help="right model file")
    p.add_argument("--right-team", help="right team file")
    p.add_argument("--rounds", type=int, default=1)
    p.add_argument("--side", choices=("spoiler", "duplicator"), default="spoiler",
                   help="the side played by the human")
    p.add_argument("--replay", metavar="FILE", help="read the human's moves from a transcript")
    p.add_argument("--transcript", metavar="FILE", help="save the human's moves")
    p.add_argument("--tree", action="store_true", help="print the strategy tree")
    p.add_argument("--max-inclusion", type=int, default=3)
    p.add_argument("--force", action="store_true", help="ignore the solver's size guard")
    p.set_defaults(run=cmd_efgame)

    p = sub_add("suite", help="run the acceptance or perf suite")
    p.add_argument("name")
    p.add_argument("--only", help="comma separated check numbers")
    p.add_argument("--max-n", type=int, default=30)
    p.add_argument("--step", type=int, default=5)
    p.set_defaults(run=cmd_suite)

    p = sub_add("examples", help="run the worked examples")
    p.add_argument("--write-models", metavar="DIR", help="also write sample model/team files")
    p.set_defaults(run=cmd_examples)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args, rest = parser.parse_known_args(argv)
    # a formula given after the options lands in ``rest``
    if (len(rest) == 1 and getattr(args, "formula", "") is None
            and not rest[0].startswith("--")):
        args.formula = rest[0]
    elif rest:
        parser.error(f"unrecognized arguments: {' '.join(rest)}")
    try:
        return args.run(args)
    except (UsageError, FormulaError, StructureError, GuardError, efgame.GuardExceeded,
            efgame.MoveSyntaxError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
