"""The acceptance checks: each one compares two independent computations.

``run_all`` returns one :class:`CheckResult` per check; the CLI prints them
as JSON and the test suite asserts on them.  Every check is deterministic:
sampling uses a seeded ``random.Random``.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

from . import corpus
from .efgame import (GamePosition, GameSolver, cardinality_preset, enumerate_formulas,
                     replay_canonical)
from .fixpoint import FixpointContext, FixpointEvaluator, available_backends
from .oracles import agap_player1_wins, has_cycle
from .structures import Relation, Structure, Team, all_teams, graph
from .syntax import Fix, Signature, Var, parse_formula, to_nnf
from .team_eval import GuardError, NaiveEvaluator, eval_flat, eval_tarski
from .translate import (gfp_to_inc_fo, gfp_to_inc_sentence, inc_to_gfp, myopic_to_inc,
                        wrap_sentence_inc_to_gfp)

MAX_FAILURES = 5      # failing instances kept per check


@dataclass
class CheckResult:
    number: int
    title: str
    passed: bool = True
    checked: int = 0
    failures: list = field(default_factory=list)
    seconds: float = 0.0
    details: dict = field(default_factory=dict)

    def fail(self, what):
        self.passed = False
        if len(self.failures) < MAX_FAILURES:
            self.failures.append(str(what))

    def expect(self, ok, what):
        self.checked += 1
        if not ok:
            self.fail(what)

    def as_dict(self) -> dict:
        return asdict(self)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"[{status}] {self.number:2d} {self.title}: {self.checked} checks "
                f"in {self.seconds:.1f}s")


def digraphs(n: int):
    """All structures with one binary relation E on a universe of size n."""
    for mask in range(1 << (n * n)):
        yield Structure(n, {"E": Relation.from_mask(n, 2, mask)})


def _random_digraph(n, rng, density=0.5, **unary):
    edges = [(a, b) for a in range(n) for b in range(n) if rng.random() < density]
    return graph(n, edges, **unary)


def _projection(X: Team, xs) -> Relation:
    return Relation(len(xs), X.conform(xs).rows)


def _timed(number, title):
    def deco(fn):
        def run(**options) -> CheckResult:
            res = CheckResult(number, title)
            t0 = time.perf_counter()
            try:
                fn(res, **options)
            except Exception as exc:      # a crash is a failed check, not a crashed run
                res.fail(f"{type(exc).__name__}: {exc}")
            res.seconds = time.perf_counter() - t0
            return res
        run.number = number
        run.title = title
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return deco


# -- teams used at universe size 3 -----------------------------------------

def _sampled_teams(n, depth, rng, count):
    """Singletons always; larger teams only where the naive engine stays fast."""
    rows = list(itertools.product(range(n), repeat=2))
    teams = [Team(("x", "y"), frozenset([r])) for r in rows]
    teams.append(Team.empty(("x", "y")))
    size = {0: 4, 1: 2}.get(depth, 1)
    for _ in range(count if size > 1 else 0):
        k = rng.randint(2, size)
        teams.append(Team(("x", "y"), frozenset(rng.sample(rows, k))))
    return teams


def _regime(rng, models3, teams3):
    """(structure, teams, depth filter) triples: exhaustive n <= 2, sampled n = 3."""
    for n in (1, 2):
        teams = list(all_teams(("x", "y"), n))
        for M in digraphs(n):
            yield M, lambda depth, teams=teams: teams
    for _ in range(models3):
        M = _random_digraph(3, rng)
        cache = {}

        def teams(depth, cache=cache):
            if depth not in cache:
                cache[depth] = _sampled_teams(3, depth, rng, teams3)
            return cache[depth]
        yield M, teams


# -- 1 ---------------------------------------------------------------------

@_timed(1, "inclusion formula vs translated gfp formula, pointwise")
def check_inc_to_gfp(res: CheckResult, models3=40, teams3=6, seed=1):
    rng = random.Random(seed)
    xs = ("x", "y")
    stars = [(e, inc_to_gfp(e.formula, xs)) for e in corpus.INCL_SUITE]
    res.details = {"formulas": len(stars), "sampled_models_n3": models3}
    for M, teams in _regime(rng, models3, teams3):
        naive = NaiveEvaluator(M)
        ctx = FixpointContext(M, {"R": Relation(2, frozenset())})
        for entry, star in stars:
            ev = FixpointEvaluator(ctx, star)
            for X in teams(entry.depth):
                ev.rebind(R=_projection(X, xs))
                left = naive.holds(X, entry.formula)
                right = ev.holds_all(X)
                res.expect(left == right, f"{entry.name} n={M.size} E={sorted(M.relations['E'])} "
                                          f"X={sorted(X.rows)}: naive={left} gfp={right}")


# -- 2 ---------------------------------------------------------------------

@_timed(2, "first-order formula with R vs its inclusion translation")
def check_gfp_to_inc(res: CheckResult, models3=40, teams3=6, seed=2):
    rng = random.Random(seed)
    plus = [(e, gfp_to_inc_fo(e.formula, "R", e.xs)) for e in corpus.FO_R_SUITE]
    res.details = {"formulas": len(plus), "sampled_models_n3": models3}
    for M, teams in _regime(rng, models3, teams3):
        naive = NaiveEvaluator(M)
        for entry, inc in plus:
            ctx = FixpointContext(M, {"R": Relation(len(entry.xs), frozenset())})
            ev = FixpointEvaluator(ctx, entry.formula, extra_vars=("x", "y"))
            depth = entry.depth + 1     # every disjunction gains one quantifier
            for X in teams(depth):
                ev.rebind(R=_projection(X, entry.xs))
                left = naive.holds(X, inc)
                right = ev.holds_all(X)
                res.expect(left == right, f"{entry.name} n={M.size} E={sorted(M.relations['E'])} "
                                          f"X={sorted(X.rows)}: naive={left} fo={right}")


# -- 3 ---------------------------------------------------------------------

@_timed(3, "cycle sentence in both directions vs cycle detection")
def check_cycle(res: CheckResult, n=3):
    incl = corpus.parsed(corpus.CYCLE_INCL)
    wrapped = wrap_sentence_inc_to_gfp(incl)
    pgfp = corpus.parsed(corpus.CYCLE_PGFP)
    back = gfp_to_inc_sentence(pgfp)
    rewrapped = wrap_sentence_inc_to_gfp(back)
    res.details = {"wrapped": str(wrapped), "back_translated": str(back)}
    unit = Team.unit()
    for size in range(1, n + 1):
        for M in digraphs(size):
            want = has_cycle(M.relations["E"], size)
            ctx = FixpointContext(M)
            got = {
                "naive": NaiveEvaluator(M).holds(unit, incl),
                "wrapped": FixpointEvaluator(ctx, wrapped).holds(),
                "pgfp": FixpointEvaluator(ctx, pgfp).holds(),
                "back-wrapped": FixpointEvaluator(ctx, rewrapped).holds(),
            }
            # three nested quantifiers over a growing team: naive only while small
            if size <= 2:
                got["back-naive"] = NaiveEvaluator(M).holds(unit, back)
            for how, value in got.items():
                res.expect(value == want, f"{how} n={size} E={sorted(M.relations['E'])}: "
                                          f"{value}, oracle {want}")


# -- 4 ---------------------------------------------------------------------

def agap_structures(n: int):
    for pmask in range(1 << n):
        P = Relation.from_mask(n, 1, pmask)
        for M in digraphs(n):
            yield Structure(n, {"E": M.relations["E"], "P": P})


@_timed(4, "game sentence via gfp translation vs alternating reachability")
def check_agap(res: CheckResult, n=3, naive_up_to=2):
    psi = corpus.parsed(corpus.AGAP_INCL)
    wrapped = wrap_sentence_inc_to_gfp(psi)
    res.details = {"wrapped": str(wrapped), "instances": {}}
    for size in range(1, n + 1):
        count = 0
        for M in agap_structures(size):
            want = agap_player1_wins(M.relations["P"], M.relations["E"], size)
            got = FixpointEvaluator(FixpointContext(M), wrapped).holds()
            res.expect(got == want, f"gfp n={size} {M.relations}: {got}, oracle {want}")
            if size <= naive_up_to:
                got = NaiveEvaluator(M).holds(Team.unit(), psi)
                res.expect(got == want, f"naive n={size} {M.relations}: {got}, oracle {want}")
            count += 1
        res.details["instances"][size] = count


# -- 5 ---------------------------------------------------------------------

@_timed(5, "flatness of first-order formulas")
def check_flatness(res: CheckResult):
    res.details = {"formulas": len(corpus.FO_SUITE)}
    for n in (1, 2):
        teams = list(all_teams(("x", "y"), n))
        for M in digraphs(n):
            naive = NaiveEvaluator(M)
            for entry in corpus.FO_SUITE:
                for X in teams:
                    left = naive.holds(X, entry.formula)
                    right = eval_flat(M, X, entry.formula)
                    res.expect(left == right, f"{entry.name} n={n} X={sorted(X.rows)}")


# -- 6 ---------------------------------------------------------------------

@_timed(6, "union closure and empty team property")
def check_union_closure(res: CheckResult):
    res.details = {"formulas": len(corpus.INCL_SUITE)}
    for n in (1, 2):
        teams = list(all_teams(("x", "y"), n))
        for M in digraphs(n):
            naive = NaiveEvaluator(M)
            for entry in corpus.INCL_SUITE:
                good = {X.rows for X in teams if naive.holds(X, entry.formula)}
                res.expect(frozenset() in good, f"{entry.name}: empty team fails")
                for a, b in itertools.combinations(sorted(good, key=sorted), 2):
                    res.expect(a | b in good, f"{entry.name} n={n} E={sorted(M.relations['E'])}"
                                              f" union of {sorted(a)} and {sorted(b)}")


# -- 7 ---------------------------------------------------------------------

def tarski_gamma(M: Structure, body, r, xs, Q: Relation) -> Relation:
    """One operator step computed tuple by tuple with the Tarski evaluator."""
    Mq = M.expand(**{r: Q})
    return Relation(len(xs), frozenset(
        a for a in itertools.product(range(M.size), repeat=len(xs))
        if eval_tarski(Mq, dict(zip(xs, a)), body)))


def subset_fixpoints(M: Structure, body, r, xs):
    """(union of post-fixed points, intersection of pre-fixed points)."""
    k = len(xs)
    size = M.size ** k
    union = Relation(k, frozenset())
    inter = Relation.full(M.size, k)
    for mask in range(1 << size):
        Q = Relation.from_mask(M.size, k, mask)
        G = tarski_gamma(M, body, r, xs, Q)
        if Q <= G:
            union = union | Q
        if G <= Q:
            inter = inter & Q
    return union, inter


def _fix_evaluator(M, body_entry, kind):
    xs = body_entry.xs
    node = Fix(kind, body_entry.rel, xs, body_entry.formula, tuple(Var(x) for x in xs))
    return FixpointEvaluator(FixpointContext(M), node)


@_timed(7, "gfp/lfp iteration vs subset characterisation; post-fixed teams")
def check_fixpoints(res: CheckResult, samples=100, seed=7):
    bodies = corpus.FIXPOINT_BODIES
    res.details = {"bodies": len(bodies)}
    for body in bodies:
        sizes = (1, 2, 3) if len(body.xs) == 1 else (1, 2)
        for n in sizes:
            for M in digraphs(n):
                union, inter = subset_fixpoints(M, body.formula, body.rel, body.xs)
                for kind, want in (("gfp", union), ("lfp", inter)):
                    got = _fix_evaluator(M, body, kind).satisfying(body.xs)
                    res.expect(got == want, f"{kind} {body.name} n={n} "
                                            f"E={sorted(M.relations['E'])}: {got} != {want}")
    # every assignment of a team whose relation is post-fixed lies in the gfp
    rng = random.Random(seed)
    nonempty = 0
    for _ in range(samples):
        body = rng.choice(bodies)
        n = rng.choice((2, 3))
        M = _random_digraph(n, rng)
        k = len(body.xs)
        Q = Relation.from_mask(n, k, rng.getrandbits(n ** k))
        while True:
            smaller = Q & tarski_gamma(M, body.formula, body.rel, body.xs, Q)
            if smaller == Q:
                break
            Q = smaller
        nonempty += bool(len(Q))
        Y = Team(body.xs, Q.tuples)
        ev = _fix_evaluator(M, body, "gfp")
        res.expect(ev.holds_all(Y), f"post-fixed team not inside gfp: {body.name} n={n} {Q}")
    res.details["post_fixed_samples"] = samples
    res.details["post_fixed_nonempty"] = nonempty


# -- 8 ---------------------------------------------------------------------

@_timed(8, "myopic sentences vs their inclusion translations")
def check_myopic(res: CheckResult, n=3):
    pairs = [(e, myopic_to_inc(parse_formula(e.text))) for e in corpus.MYOPIC_SUITE]
    res.details = {"translations": {e.name: str(inc) for e, inc in pairs}}
    for size in range(1, n + 1):
        teams = list(all_teams(("x",), size))
        for M in digraphs(size):
            naive = NaiveEvaluator(M)
            for entry, inc in pairs:
                phi = to_nnf(parse_formula(entry.text))
                for X in teams:
                    left = naive.holds(X, inc)
                    right = eval_tarski(M.expand(R=_projection(X, ("x",))), {}, phi)
                    res.expect(left == right, f"{entry.name} n={size} "
                                              f"E={sorted(M.relations['E'])} X={sorted(X.rows)}")


# -- 9 ---------------------------------------------------------------------

@_timed(9, "game solver vs bounded distinguishing formulas; canonical strategy")
def check_efgame(res: CheckResult, max_universe=2, max_rounds=1, replay_rounds=3):
    sig = Signature()
    models = {k: Structure(k) for k in range(1, max_universe + 1)}
    spoiler = 0
    for dom in ((), ("x",)):
        pool = GameSolver.default_pool(dom, 1)
        for rounds in range(max_rounds + 1):
            formulas = enumerate_formulas(sig, dom, rounds, pool=pool)
            truth = {}
            for k, M in models.items():
                naive = NaiveEvaluator(M)
                for X in all_teams(dom, k):
                    truth[k, X] = [naive.holds(X, f) for f in formulas]
            for a, b in itertools.product(models, repeat=2):
                solver = GameSolver(models[a], models[b], pool=pool)
                for X in all_teams(dom, a):
                    for Y in all_teams(dom, b):
                        p = GamePosition(models[a], X, models[b], Y, rounds)
                        winner = solver.solve(p).winner
                        distinguishing = next((f for f, l, r in zip(formulas, truth[a, X],
                                                                    truth[b, Y]) if l and not r),
                                              None)
                        spoiler += winner == "Spoiler"
                        res.expect((winner == "Spoiler") == (distinguishing is not None),
                                   f"|A|={a} |B|={b} X={X} Y={Y} rounds={rounds}: {winner}, "
                                   f"formula {distinguishing}")
    res.details["spoiler_wins"] = spoiler
    res.details["positions"] = res.checked
    winner = GameSolver(Structure(1), Structure(2)).solve(cardinality_preset(1)).winner
    res.expect(winner == "Duplicator", f"cardinality preset n=1: {winner}")
    replays = {}
    for n in range(1, replay_rounds + 1):
        report = replay_canonical(n, exhaustive_rounds=2 if n == 3 else None, samples=30)
        replays[n] = report.positions
        res.expect(report.positions > 0, f"replay n={n} visited nothing")
    res.details["canonical_replay_positions"] = replays


# -- 10 --------------------------------------------------------------------

def agap_instance(n: int, rng: random.Random) -> Structure:
    """Random game graph with about two successors per node and three starts."""
    density = min(1.0, 2.0 / n)
    starts = rng.sample(range(n), min(3, n))
    return _random_digraph(n, rng, density, P=starts)


def time_agap(sizes, seed=10, instances=20, backend=None) -> list:
    """Total evaluation time of the game sentence over random instances per size."""
    rng = random.Random(seed)
    sentence = corpus.parsed(corpus.AGAP_PGFP)
    rows = []
    for n in sizes:
        total = 0.0
        agree = True
        for _ in range(instances):
            M = agap_instance(n, rng)
            ev = FixpointEvaluator(FixpointContext(M, backend=backend), sentence)
            t0 = time.perf_counter()
            value = ev.holds()
            total += time.perf_counter() - t0
            agree &= value == agap_player1_wins(M.relations["P"], M.relations["E"], n)
        rows.append({"n": n, "seconds": total, "agrees_with_oracle": agree})
    return rows


def fit_exponent(rows) -> float:
    import numpy as np
    n = np.array([r["n"] for r in rows], dtype=float)
    t = np.array([max(r["seconds"], 1e-7) for r in rows])
    slope, _ = np.polyfit(np.log(n), np.log(t), 1)
    return float(slope)


def naive_guard_trips(n: int, seed=10) -> bool:
    M = agap_instance(n, random.Random(seed))
    try:
        NaiveEvaluator(M).holds(Team.unit(), corpus.parsed(corpus.AGAP_INCL))
    except GuardError:
        return True
    return False


@_timed(10, "gfp engine growth on the game sentence; naive engine refuses")
def check_perf(res: CheckResult, sizes=tuple(range(5, 31, 5))):
    res.details = {"timings": {}, "fitted_exponent": {}}
    for backend in available_backends():
        rows = time_agap(sizes, backend=backend)
        for r in rows:
            res.expect(r["agrees_with_oracle"], f"{backend} n={r['n']}: disagrees with oracle")
        res.details["timings"][backend] = rows
        res.details["fitted_exponent"][backend] = round(fit_exponent(rows), 2)
    trips = {n: naive_guard_trips(n) for n in (3, 4, 5)}
    for n, tripped in trips.items():
        res.expect(tripped, f"naive engine accepted the game sentence at n={n}")
    res.details["naive_guard_trips"] = trips


CHECKS: tuple = (check_inc_to_gfp, check_gfp_to_inc, check_cycle, check_agap, check_flatness,
                 check_union_closure, check_fixpoints, check_myopic, check_efgame, check_perf)


def run_all(only=None, report: Callable[[CheckResult], None] | None = None) -> list:
    results = []
    for check in CHECKS:
        if only and check.number not in only:
            continue
        res = check()
        if report:
            report(res)
        results.append(res)
    return results
