import io
import itertools
import json
from pathlib import Path

import pytest

from inclogic.efgame import (DUPLICATOR, SPOILER, AtomBudget, Duplicate, FormulaBudget,
                             GamePosition, GameSession, GameSolver, GuardExceeded,
                             InvariantViolation, MoveSyntaxError, Split, Supplement,
                             apply_canonical, atom_family, canonical_duplicator,
                             cardinality_preset, enumerate_formulas, final_witness,
                             format_move, invariant_holds, make_choice, parse_pick,
                             parse_spoiler_move, parse_split_response,
                             parse_supplement_response, predicate_preset, replay_canonical,
                             replay_lines, solve, spoiler_wins_final, supplements, team_splits)
from inclogic.structures import Relation, Structure, Team, all_teams, duplicate, supplement
from inclogic.syntax import Signature, parse_formula, to_text
from inclogic.team_eval import NaiveEvaluator

GOLDEN = json.loads((Path(__file__).parent / "golden" / "enumerator_counts.json").read_text())
EMPTY = Signature()


# -- final check --------------------------------------------------------------

def test_identical_positions_have_no_witness():
    M = Structure(2, {"E": Relation(2, frozenset({(0, 1)}))})
    X = Team.of("x y", (0, 1), (1, 1))
    won, atom = spoiler_wins_final(GamePosition(M, X, M, X, 0))
    assert not won and atom is None


def test_atomic_difference_is_witnessed():
    A = Structure(1, {"P": Relation(1, frozenset({(0,)}))})
    B = Structure(1, {"P": Relation(1, frozenset())})
    X = Team.of("x", 0)
    won, atom = spoiler_wins_final(GamePosition(A, X, B, X, 0))
    assert won and to_text(atom) == "P(x)"


def test_swap_team_has_no_witness_over_empty_signature():
    X = Team.of("x y", (0, 1))
    Y = Team.of("x y", (0, 1), (1, 0))
    won, _ = spoiler_wins_final(GamePosition(Structure(2), X, Structure(2), Y, 0))
    assert not won


def test_atom_family_shapes():
    atoms = {to_text(a) for a in atom_family(EMPTY, ("x", "y"), AtomBudget())}
    assert {"x = y", "x != y", "(x) <= (y)", "(x,y) <= (y,x)"} <= atoms
    assert not any("<= (x,x)" in a for a in atoms)
    short = atom_family(EMPTY, ("x", "y"), AtomBudget(max_inclusion_length=1))
    assert all("," not in to_text(a) for a in short)


# -- solver -------------------------------------------------------------------

def test_zero_rounds_identical_is_duplicator():
    M = Structure(2)
    X = Team.of("x", 0, 1)
    assert solve(GamePosition(M, X, M, X, 0)).winner == DUPLICATOR


def test_cardinality_preset_one_round():
    assert solve(cardinality_preset(1)).winner == DUPLICATOR


def test_predicate_preset_spoiler_with_formula_cross_check():
    p = predicate_preset(1)
    assert solve(p).winner == SPOILER
    sig = p.A.signature()
    formulas = enumerate_formulas(sig, (), 1, pool=("v1",))
    left, right = NaiveEvaluator(p.A), NaiveEvaluator(p.B)
    assert any(left.holds(p.X, f) and not right.holds(p.Y, f) for f in formulas)


def test_game_is_asymmetric():
    M = Structure(1)
    empty, full = Team.empty(("x",)), Team.of("x", 0)
    won, atom = spoiler_wins_final(GamePosition(M, empty, M, full, 0))
    assert won and to_text(atom) == "x != x"
    assert solve(GamePosition(M, full, M, empty, 0)).winner == DUPLICATOR


def test_guard():
    p = GamePosition(Structure(4), Team.unit(), Structure(4), Team.unit(), 1)
    with pytest.raises(GuardExceeded):
        solve(p)
    p = GamePosition(Structure(1), Team.unit(), Structure(1), Team.unit(), 3)
    with pytest.raises(GuardExceeded):
        solve(p)


def test_team_splits_and_supplements():
    X = Team.of("x", 0, 1)
    splits = list(team_splits(X))
    assert all(a.rows | b.rows == X.rows for a, b in splits)
    assert (X, X) in [(a, b) for a, b in splits] or (X, X) in [(b, a) for a, b in splits]
    sups = list(supplements(X, "v", 2))
    assert len(sups) == 9
    assert len({Y for _, Y in sups}) == 9


def test_solver_winning_move_works():
    p = predicate_preset(1)
    solver = GameSolver(p.A, p.B)
    sol = solver.solve(p)
    assert isinstance(sol.move, Duplicate)
    p1 = GamePosition(p.A, duplicate(p.X, sol.move.var, p.A), p.B,
                      duplicate(p.Y, sol.move.var, p.B), 0)
    assert spoiler_wins_final(p1)[0]


def test_strategy_tree():
    p = cardinality_preset(1)
    tree = GameSolver(p.A, p.B, pool=("x",)).strategy_tree(p.X, p.Y, 1)
    assert tree["winner"] == DUPLICATOR
    assert all(reply["move"] for reply in tree["replies"])


def test_soundness_and_completeness_small():
    models = [Structure(1), Structure(2)]
    pool = ("v1",)
    formulas = enumerate_formulas(EMPTY, (), 1, pool=pool)
    for A, B in itertools.product(models, repeat=2):
        solver = GameSolver(A, B, pool=pool)
        for X in all_teams((), A.size):
            for Y in all_teams((), B.size):
                spoiler = solver.solve(GamePosition(A, X, B, Y, 1)).winner == SPOILER
                distinguished = any(NaiveEvaluator(A).holds(X, f) and
                                    not NaiveEvaluator(B).holds(Y, f) for f in formulas)
                assert spoiler == distinguished


# -- canonical strategy -------------------------------------------------------

def test_invariant_trivial_at_start():
    assert invariant_holds(cardinality_preset(3))


def test_duplicate_keeps_invariant():
    p = GamePosition(Structure(2), Team.unit(), Structure(3), Team.unit(), 2)
    assert canonical_duplicator(p, Duplicate("v")) is None
    assert invariant_holds(apply_canonical(p, Duplicate("v")))


def test_constant_supplement_response():
    p = GamePosition(Structure(2), Team.unit(), Structure(3), Team.unit(), 1)
    K = dict(canonical_duplicator(p, Supplement("v", make_choice({(): {0}}))))
    assert K == {(): {0, 1, 2}}
    q = GamePosition(Structure(2), Team.of("x", 0, 1), Structure(3), Team.of("x", 0, 1, 2), 1)
    K = dict(canonical_duplicator(q, Supplement("v", make_choice({(0,): {0}, (1,): {0}}))))
    assert K == {(t,): {0, 1, 2} for t in range(3)}
    assert invariant_holds(apply_canonical(q, Supplement("v", make_choice({(0,): {0},
                                                                            (1,): {0}}))))


def test_canonical_rejects_bad_positions():
    p = GamePosition(Structure(2), Team.of("x", 0), Structure(3), Team.of("x", 0), 1)
    with pytest.raises(InvariantViolation):
        canonical_duplicator(p, Duplicate("v"))
    q = GamePosition(Structure(3), Team.unit(), Structure(2), Team.unit(), 1)
    with pytest.raises(ValueError):
        canonical_duplicator(q, Duplicate("v"))
    r = predicate_preset(1)
    with pytest.raises(ValueError):
        canonical_duplicator(r, Duplicate("v"))


@pytest.mark.parametrize("n", [1, 2])
def test_canonical_replay_exhaustive(n):
    report = replay_canonical(n)
    assert report.positions > 0 and not report.sampled


def test_canonical_replay_three_rounds_sampled():
    report = replay_canonical(3, exhaustive_rounds=1, samples=10)
    assert report.sampled and report.positions > 0


# -- enumerator -----------------------------------------------------------------

def test_rank_zero_one_variable():
    texts = [to_text(f) for f in enumerate_formulas(EMPTY, ("x",), 0)]
    assert {"x = x", "x != x", "(x) <= (x)"} <= set(texts)
    assert len(texts) == GOLDEN["empty signature, variables (x), rank <= 0"]
    assert "x = x & x = x" not in texts


def test_golden_count_rank_one():
    assert len(enumerate_formulas(EMPTY, ("x",), 1)) == \
        GOLDEN["empty signature, variables (x), rank <= 1"]


def test_enumerator_budget():
    from inclogic.efgame import BudgetExceeded
    with pytest.raises(BudgetExceeded):
        enumerate_formulas(EMPTY, ("x", "y"), 1, FormulaBudget(max_formulas=100))


# -- text formats and the REPL --------------------------------------------------

def test_move_parsing():
    X = Team.of("x", 0, 1)
    move = parse_spoiler_move("split L: {0} {0,1}", X, 2)
    assert isinstance(move, Split) and move.left == Team.of("x", 0)
    assert parse_spoiler_move("dup v", X, 2) == Duplicate("v")
    sup = parse_spoiler_move("supp v {0:{1}, 1:{0,1}}", X, 2)
    assert sup.as_dict() == {(0,): frozenset({1}), (1,): frozenset({0, 1})}
    assert parse_spoiler_move(format_move(sup, X), X, 2) == sup
    assert parse_split_response("resp {0} {1}", X) == (Team.of("x", 0), Team.of("x", 1))
    assert dict(parse_supplement_response("resp {0:{0}, 1:{1}}", X, 2)) == \
        {(0,): {0}, (1,): {1}}
    assert parse_pick("pick 2") == 2


@pytest.mark.parametrize("text", ["split {0} {}", "split {0} {5}", "supp v {0:{}}",
                                  "supp v {0:{0}}", "jump", "dup 1x"])
def test_move_syntax_errors(text):
    X = Team.of("x", 0, 1)
    with pytest.raises(MoveSyntaxError):
        parse_spoiler_move(text, X, 2)


def _session(p, lines, human=SPOILER):
    out = []
    session = GameSession(p, human, read=replay_lines(lines), write=out.append)
    return session.play(), out, session.transcript


def test_repl_spoiler_cannot_win_cardinality_preset():
    p = cardinality_preset(1)
    moves = ["dup x", "supp x {0:{0}}", "split {0} {0}", "split {0} {}"]
    for move in moves:
        lines = [move, "pick 1"] if move.startswith("split") else [move]
        winner, out, _ = _session(p, lines)
        assert winner == DUPLICATOR
        assert out[-1] == "winner: Duplicator"


def test_repl_reprompts_on_bad_input():
    winner, out, transcript = _session(cardinality_preset(1), ["nonsense", "dup x"])
    assert any(line.startswith("  ?") for line in out)
    assert transcript == ["dup x"]


def test_repl_human_duplicator_loses_predicate_preset():
    winner, out, _ = _session(predicate_preset(1), [], human=DUPLICATOR)
    assert winner == SPOILER
    assert out[-1].startswith("winner: Spoiler (witness: P(")


def test_transcript_replay_is_deterministic():
    p = cardinality_preset(1)
    first = _session(p, ["split {0} {0}", "pick 2"])
    second = _session(p, first[2])
    assert first == second


def test_replay_exhausted():
    from inclogic.efgame import ReplayExhausted
    with pytest.raises(ReplayExhausted):
        _session(cardinality_preset(1), [])
