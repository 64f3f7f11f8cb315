import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from inclogic.structures import (Relation, Structure, StructureError, Team, UnboundVariable,
                                 all_teams, duplicate, eval_term, format_model, format_team,
                                 graph, parse_model, parse_team, rel, supplement,
                                 team_relation)
from inclogic.syntax import Const, Func, Var

from strategies import relations, teams

SUCC3 = parse_model("""
universe 3
rel E/2 = { (0,1) (1,2) }
fun f/1 = { (0):1, (1):2, (2):0 }
const c = 2
""")


def test_eval_term_constant():
    assert eval_term(SUCC3, {}, Const("c")) == 2


def test_eval_term_variable():
    assert eval_term(SUCC3, {"x": 1}, Var("x")) == 1


def test_eval_term_successor_wraps():
    assert eval_term(SUCC3, {"x": 2}, Func("f", (Var("x"),))) == 0


def test_eval_term_unbound():
    with pytest.raises(UnboundVariable):
        eval_term(SUCC3, {}, Var("x"))


def test_team_relation_empty_team():
    assert team_relation(SUCC3, Team.empty(("x",)), (Var("x"), Var("x"))) == Relation(2, frozenset())


def test_team_relation_diagonal():
    X = Team.of("x", 0, 1)
    assert team_relation(SUCC3, X, (Var("x"), Var("x"))) == rel(2, (0, 0), (1, 1))


def test_team_relation_projection():
    X = Team.of("x y", (0, 1), (2, 2))
    assert team_relation(SUCC3, X, (Var("y"),)) == rel(1, 1, 2)


def test_team_relation_unbound():
    with pytest.raises(UnboundVariable):
        team_relation(SUCC3, Team.of("x", 0), (Var("y"),))


def test_supplement_constant_choice():
    X = Team.of("x", 0, 1, 2)
    Y = supplement(X, {r: {0} for r in X}, "v")
    assert len(Y) == len(X)
    assert Y == Team.of("x v", (0, 0), (1, 0), (2, 0))


def test_supplement_unit_team():
    assert supplement(Team.unit(), {(): {0, 1}}, "v") == Team.of("v", 0, 1)


def test_supplement_full_choice_is_duplicate():
    X = Team.of("x", 0, 2)
    assert supplement(X, {r: range(3) for r in X}, "v") == duplicate(X, "v", SUCC3)


def test_supplement_rejects_empty_choice():
    with pytest.raises(StructureError):
        supplement(Team.of("x", 0), {(0,): set()}, "v")


def test_supplement_tuple_of_variables():
    X = Team.of("x y", (0, 1))
    assert supplement(X, {(0, 1): {(1, 1)}}, ("x", "z")) == Team.of("x y z", (1, 1, 1))


def test_duplicate_unit_team():
    assert len(duplicate(Team.unit(), "v", SUCC3)) == 3


def test_duplicate_empty_team():
    assert duplicate(Team.empty(("x",)), "v", SUCC3) == Team.empty(("x", "v"))


def test_duplicate_overwrites():
    assert duplicate(Team.of("x", 0), "x", 2) == Team.of("x", 0, 1)


def test_model_round_trip():
    assert parse_model(format_model(SUCC3)) == SUCC3


@pytest.mark.parametrize("text", [
    "rel E/2 = { (0,1) }",
    "universe 2\nrel E/2 = { (0,2) }",
    "universe 2\nrel E/2 = { (0) }",
    "universe 2\nfun f/1 = { (0):1 }",
    "universe 2\nconst c = 5",
    "universe 2\nwhatever",
])
def test_model_parse_errors(text):
    with pytest.raises(StructureError):
        parse_model(text)


def test_model_param_lines_are_second_order_values():
    M = parse_model("universe 2\nparam R/1 = { (1) }\n")
    assert M.lookup("R") == rel(1, 1)
    assert not M.relations


def test_team_file_round_trip():
    X = Team.of("x y", (0, 1), (1, 0))
    assert parse_team(format_team(X)) == X
    assert parse_team("vars\n()\n") == Team.unit()


def test_team_file_rejects_out_of_range():
    with pytest.raises(StructureError):
        parse_team("vars x\n3\n", n=2)


def test_all_teams_count():
    assert sum(1 for _ in all_teams(("x", "y"), 2)) == 16
    assert list(all_teams((), 3)) == [Team.empty(()), Team.unit()]


def test_dense_encodings_round_trip():
    r = rel(2, (0, 1), (2, 2))
    assert Relation.from_dense(3, 2, r.to_dense(3)) == r
    assert Relation.from_mask(3, 2, r.to_mask(3)) == r


def test_graph_helper():
    M = graph(3, [(0, 1)], P=[2])
    assert M.relations["P"] == rel(1, 2)


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_team_relation_distributes_over_union(data):
    n = data.draw(st.sampled_from((1, 2, 3)))
    X = data.draw(teams(n))
    Y = data.draw(teams(n))
    ts = (Var("y"), Var("x"))
    M = Structure(n)
    assert team_relation(M, X | Y, ts) == team_relation(M, X, ts) | team_relation(M, Y, ts)


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_supplement_grows_team(data):
    n = data.draw(st.sampled_from((1, 2, 3)))
    X = data.draw(teams(n))
    H = {r: data.draw(st.sets(st.integers(0, n - 1), min_size=1)) for r in X}
    Y = supplement(X, H, "v")
    assert len(Y) >= len(X)
    assert Y.conform(X.vars) == X
    assert Y <= duplicate(X, "v", n)


@settings(max_examples=50, deadline=None)
@given(st.sampled_from((1, 2, 3)).flatmap(lambda n: relations(n, 2)))
def test_relation_algebra(r):
    full = Relation.full(3, 2)
    assert r & full == r
    assert r | Relation(2, frozenset()) == r
