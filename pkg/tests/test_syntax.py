import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from inclogic.syntax import (And, Eq, Exists, Forall, FormulaError, FreshNames, Incl, Not, Or,
                             ParseError, Rel, Signature, Var, check_positive, free_vars,
                             is_nnf, negate, parse_formula, rank, to_nnf, to_text, walk)

from strategies import fo_formulas, incl_formulas, literals

x, y, z = Var("x"), Var("y"), Var("z")


def test_parse_cycle_formula():
    f = parse_formula("exists x. exists y. ((y) <= (x) & E(x,y))")
    assert f == Exists("x", Exists("y", And(Incl((y,), (x,)), Rel("E", (x, y)))))


def test_parse_equality_without_signature_lookup():
    assert parse_formula("x = x", Signature()) == Eq(x, x)


def test_inclusion_tuple_length_mismatch():
    with pytest.raises(ParseError):
        parse_formula("(x,y) <= (y)")


def test_parse_error_reports_position():
    with pytest.raises(ParseError) as err:
        parse_formula("E(x,y) &")
    assert err.value.pos >= 7


def test_signature_checks_symbols_and_arity():
    sig = Signature(relations={"E": 2})
    assert parse_formula("E(x,y)", sig) == Rel("E", (x, y))
    with pytest.raises(FormulaError):
        parse_formula("E(x)", sig)
    with pytest.raises(FormulaError):
        parse_formula("P(x)", sig)


def test_quantifier_scope_extends_right():
    f = parse_formula("exists x. E(x,y) & E(y,x)")
    assert isinstance(f, Exists) and isinstance(f.body, And)


def test_generalised_atoms_parse_and_print():
    for text in ("dep(x ; y)", "excl(x ; y)", "indep(x ; y)", "cindep(x ; y ; z)"):
        assert to_text(parse_formula(text)) == text


@pytest.mark.parametrize("text, positive", [
    ("R(x) | E(x,y)", True),
    ("!R(x)", False),
    ("gfp S(x). (R(x) & S(x)) @ (y)", True),
    ("exists y. (E(x,y) & !R(y))", False),
    ("gfp S(x). (!R(x) & S(x)) @ (y)", False),
])
def test_check_positive(text, positive):
    assert check_positive(parse_formula(text), "R") is positive


def test_shadowed_relation_is_not_the_free_one():
    # R bound by the operator is a different symbol from a free R outside
    f = parse_formula("E(x,x) & gfp R(x). R(x) @ (y)")
    assert check_positive(f, "R")


@pytest.mark.parametrize("text, expected", [
    ("E(x,y)", 0),
    ("!E(x,y)", 0),
    ("exists x. exists y. ((y) <= (x) & E(x,y))", 2),
    ("E(x,y) & (x) <= (y)", 0),
    ("E(x,y) | x = y", 1),
    ("forall x. (E(x,y) | exists z. E(z,z))", 3),
])
def test_rank(text, expected):
    assert rank(parse_formula(text)) == expected


def test_rank_rejects_fixed_points():
    with pytest.raises(FormulaError):
        rank(parse_formula("gfp R(x). R(x) @ (y)"))


@pytest.mark.parametrize("text, expected", [
    ("E(x,y)", ("x", "y")),
    ("exists y. E(x,y)", ("x",)),
    ("gfp R(x). E(x,x) @ (z)", ("z",)),
    ("(y) <= (x) & forall y. E(y,z)", ("y", "x", "z")),
])
def test_free_vars(text, expected):
    assert free_vars(parse_formula(text)) == expected


def test_nnf_de_morgan():
    assert to_text(to_nnf(parse_formula("!(E(x,y) | x = y)"))) == "!E(x,y) & x != y"


def test_nnf_pushes_through_quantifiers_and_implication():
    f = to_nnf(parse_formula("!(forall x. (E(x,y) -> exists z. E(x,z)))"))
    assert to_text(f) == "exists x. (E(x,y) & forall z. !E(x,z))"


def test_nnf_is_identity_on_nnf_input():
    f = parse_formula("exists x. ((y) <= (x) & !E(x,y))")
    assert to_nnf(f) == f


@pytest.mark.parametrize("text", ["!((x) <= (y))", "!dep(x ; y)",
                                  "!(gfp R(x). R(x) @ (y))"])
def test_nnf_rejects_negated_team_atoms_and_fixed_points(text):
    with pytest.raises(FormulaError):
        to_nnf(parse_formula(text))


def test_fix_arity_invariant():
    with pytest.raises(FormulaError):
        parse_formula("gfp R(x,y). R(x,y) @ (z)")


def test_fresh_names_are_deterministic_and_avoid_taken():
    f = parse_formula("E(_v0, _v2)")
    a = FreshNames.avoiding(f)
    b = FreshNames.avoiding(f)
    names = [a.var() for _ in range(3)]
    assert names == [b.var() for _ in range(3)]
    assert not {"_v0", "_v2"} & set(names)
    assert a.rel() != a.rel()


def test_fresh_prefer():
    fresh = FreshNames.avoiding(parse_formula("R(x)"))
    assert fresh.prefer("x") != "x"
    assert fresh.prefer("w") == "w"
    assert fresh.prefer("R", kind="rel") != "R"


@settings(max_examples=300, deadline=None)
@given(st.one_of(fo_formulas(rels=(("E", 2), ("P", 1))), incl_formulas()))
def test_print_parse_round_trip(f):
    assert parse_formula(to_text(f)) == f


@settings(max_examples=200, deadline=None)
@given(fo_formulas())
def test_nnf_output_is_nnf_and_stable(f):
    g = to_nnf(Not(f))
    assert is_nnf(g)
    assert to_nnf(g) == g
    assert to_nnf(Not(g)) == to_nnf(f)


@settings(max_examples=200, deadline=None)
@given(fo_formulas(rels=(("E", 2), ("R", 1))))
def test_check_positive_matches_negated_subtree(f):
    negative = any(isinstance(g, Rel) and g.name == "R" and g.neg for g in walk(f))
    assert check_positive(f, "R") is not negative


@settings(max_examples=200, deadline=None)
@given(incl_formulas(), incl_formulas(), st.sampled_from(("x", "y")))
def test_rank_monotone(f, g, v):
    assert rank(Or(f, g)) == max(rank(f), rank(g)) + 1
    assert rank(Exists(v, f)) == rank(f) + 1
    assert rank(Forall(v, f)) == rank(f) + 1
    assert rank(And(f, g)) == max(rank(f), rank(g))


@given(literals())
def test_negate_literal_is_involution(lit):
    assert negate(negate(lit)) == lit
