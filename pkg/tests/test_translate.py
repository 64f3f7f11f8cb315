import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from inclogic import corpus
from inclogic.acceptance import digraphs
from inclogic.fixpoint import FixpointContext, FixpointEvaluator
from inclogic.structures import Relation, Structure, Team, all_teams
from inclogic.syntax import (Fix, FormulaError, FreshNames, PositivityError, check_positive,
                             free_vars, is_incl, is_pgfp, parse_formula, to_text, walk)
from inclogic.team_eval import NaiveEvaluator, eval_tarski
from inclogic.translate import (NotMyopic, NotNormalForm, gfp_to_inc_fo, gfp_to_inc_sentence,
                                inc_to_gfp, is_myopic, myopic_to_inc, split_normal_form,
                                wrap_sentence_inc_to_gfp)

from strategies import digraphs as digraph_strategy
from strategies import fo_formulas, incl_formulas, teams

P = parse_formula


def text(f):
    return to_text(f)


# -- inclusion logic to gfp -------------------------------------------------

def test_literal_unchanged():
    assert inc_to_gfp(P("E(x,y)"), ("x", "y")) == P("E(x,y)")


def test_inclusion_atom_case():
    assert text(inc_to_gfp(P("(y) <= (x)"), ("x", "y"))) == \
        "exists z1. exists z2. (R(z1,z2) & y = z1)"


def test_tuple_inclusion_expands_to_component_equalities():
    out = text(inc_to_gfp(P("(x,y) <= (y,x)"), ("x", "y")))
    assert out == "exists z1. exists z2. (R(z1,z2) & x = z2 & y = z1)"


def test_disjunction_case_uses_two_gfps():
    out = inc_to_gfp(P("E(x,y) | (y) <= (x)"), ("x", "y"))
    assert text(out) == ("gfp S1(x,y). (R(x,y) & E(x,y)) @ (x,y) | gfp S2(x,y). "
                         "(R(x,y) & exists z1. exists z2. (S2(z1,z2) & y = z1)) @ (x,y)")


def test_quantifier_rebinding_a_team_variable_is_renamed():
    out = inc_to_gfp(P("exists x. (x) <= (y)"), ("x", "y"))
    assert text(out).startswith("exists z1. gfp S1(x,y,z1).")


def test_inc_to_gfp_errors():
    with pytest.raises(FormulaError):
        inc_to_gfp(P("dep(x ; y)"), ("x", "y"))
    with pytest.raises(FormulaError):
        inc_to_gfp(P("E(x,z)"), ("x", "y"))
    with pytest.raises(FormulaError):
        inc_to_gfp(P("E(x,y)"), ("x", "x"))
    with pytest.raises(FormulaError):
        inc_to_gfp(P("R(x)"), ("x",))


def test_translation_is_deterministic():
    f = corpus.parsed(corpus.AGAP_INCL)
    assert text(wrap_sentence_inc_to_gfp(f)) == text(wrap_sentence_inc_to_gfp(f))
    fresh = FreshNames(var_prefix="w", rel_prefix="T", next_var=1, next_rel=1)
    out = inc_to_gfp(P("(y) <= (x)"), ("x", "y"), fresh=fresh)
    assert text(out) == "exists w1. exists w2. (R(w1,w2) & y = w1)"


def test_empty_team_satisfies_both_sides():
    M = Structure(2, {"E": Relation(2, frozenset())})
    for entry in corpus.INCL_SUITE:
        star = inc_to_gfp(entry.formula, ("x", "y"))
        ctx = FixpointContext(M, {"R": Relation(2, frozenset())})
        assert NaiveEvaluator(M).holds(Team.empty(("x", "y")), entry.formula)
        assert FixpointEvaluator(ctx, star).holds_all(Team.empty(("x", "y")))


def _positive_everywhere(f, r):
    return check_positive(f, r) and all(check_positive(g.body, g.rel)
                                        for g in walk(f) if isinstance(g, Fix))


@settings(max_examples=200, deadline=None)
@given(incl_formulas(names=("x", "y", "z")))
def test_output_is_positive_pgfp(f):
    star = inc_to_gfp(f, ("x", "y", "z"))
    assert is_pgfp(star)
    assert _positive_everywhere(star, "R")
    assert set(free_vars(star)) <= {"x", "y", "z"}


@settings(max_examples=150, deadline=None)
@given(st.data(), incl_formulas(names=("x", "y"), max_leaves=4))
def test_contract_on_random_formulas(data, f):
    M = data.draw(digraph_strategy((1, 2)))
    X = data.draw(teams(M.size))
    star = inc_to_gfp(f, ("x", "y"))
    ctx = FixpointContext(M, {"R": Relation(2, X.rows)})
    left = NaiveEvaluator(M, force=True).holds(X, f)
    assert left == FixpointEvaluator(ctx, star).holds_all(X)


def test_contract_on_cycle_matrix_all_digraphs():
    f = P("(y) <= (x) & E(x,y)")
    star = inc_to_gfp(f, ("x", "y"))
    for n in (1, 2, 3):
        for M in digraphs(n):
            naive = NaiveEvaluator(M)
            ev = FixpointEvaluator(FixpointContext(M, {"R": Relation(2, frozenset())}), star)
            for X in all_teams(("x", "y"), n):
                if n == 3 and len(X) > 3:
                    continue
                ev.rebind(R=Relation(2, X.rows))
                assert naive.holds(X, f) == ev.holds_all(X)


def test_wrap_requires_sentence():
    with pytest.raises(FormulaError):
        wrap_sentence_inc_to_gfp(P("E(x,y)"))


def test_wrap_tautology_true_everywhere():
    wrapped = wrap_sentence_inc_to_gfp(P("exists x. x = x"))
    for n in (1, 2, 3):
        assert FixpointEvaluator(FixpointContext(Structure(n)), wrapped).holds()


def test_wrap_exists_form():
    f = P("exists x. x = x")
    assert text(wrap_sentence_inc_to_gfp(f, "exists")).startswith("exists z1. gfp R(z1).")
    with pytest.raises(ValueError):
        wrap_sentence_inc_to_gfp(f, "most")


# -- gfp to inclusion logic -------------------------------------------------

def test_relation_atom_case():
    assert text(gfp_to_inc_fo(P("R(y)"), "R", ("x",))) == "(y) <= (x)"


def test_cycle_matrix_from_gfp_body():
    out = gfp_to_inc_fo(P("exists y. (R(y) & E(x,y))"), "R", ("x",))
    assert text(out) == "exists y. ((y) <= (x) & E(x,y))"


def test_relation_free_literal_unchanged():
    assert gfp_to_inc_fo(P("x = x"), "R", ("x",)) == P("x = x")


def test_disjunction_introduces_fresh_tuple():
    out = gfp_to_inc_fo(P("R(x) | E(x,y)"), "R", ("x",))
    assert text(out) == "exists u1. ((u1) <= (x) & ((x) <= (u1) | E(x,y)))"


def test_gfp_to_inc_fo_errors():
    with pytest.raises(PositivityError):
        gfp_to_inc_fo(P("!R(x)"), "R", ("x",))
    with pytest.raises(FormulaError):
        gfp_to_inc_fo(P("gfp S(x). S(x) @ (x)"), "R", ("x",))


@settings(max_examples=150, deadline=None)
@given(st.data(), fo_formulas(rels=(("E", 2), ("R", 1)), names=("x", "y"), max_leaves=4)
       .filter(lambda f: check_positive(f, "R")))
def test_dual_contract_on_random_formulas(data, eta):
    M = data.draw(digraph_strategy((1, 2)))
    X = data.draw(teams(M.size))
    plus = gfp_to_inc_fo(eta, "R", ("x",))
    assert is_incl(plus)
    Mr = M.expand(R=Relation(1, frozenset(r[:1] for r in X.rows)))
    right = all(eval_tarski(Mr, s, eta) for s in X.assignments())
    assert NaiveEvaluator(M, force=True).holds(X, plus) == right


# -- normal-form sentences ----------------------------------------------------

def test_normal_form_sentence():
    out = gfp_to_inc_sentence(P(corpus.CYCLE_PGFP))
    assert text(out) == "exists z. exists x. ((z) <= (x) & exists y. (E(x,y) & (y) <= (x)))"


def test_full_gfp_body_true_on_nonempty_models():
    out = gfp_to_inc_sentence(P("exists z. gfp R(x). R(x) @ (z)"))
    for n in (1, 2, 3):
        assert NaiveEvaluator(Structure(n)).holds(Team.unit(), out)


def test_empty_gfp_body_false_everywhere():
    out = gfp_to_inc_sentence(P("exists z. gfp R(x). x != x @ (z)"))
    for n in (0, 1, 2, 3):
        assert not NaiveEvaluator(Structure(n)).holds(Team.unit(), out)


@pytest.mark.parametrize("source, fragment", [
    ("exists z. lfp R(x). R(x) @ (z)", "gfp"),
    ("exists z. exists w. gfp R(x). R(x) @ (z)", "exactly the quantified variables"),
    ("gfp R(x). R(x) @ (z)", "existential prefix"),
    ("forall z. gfp R(x). R(x) @ (z)", "existential prefix"),
    ("exists w. exists z. gfp R(x). (E(x,w) & R(x)) @ (z)", "exactly"),
    ("exists z. gfp R(x). (gfp S(y). S(y) @ (x) & R(x)) @ (z)", "first-order"),
])
def test_not_normal_form_diagnostics(source, fragment):
    with pytest.raises(NotNormalForm) as err:
        gfp_to_inc_sentence(P(source))
    assert fragment in str(err.value)
    assert "expected the shape" in str(err.value)


def test_split_normal_form():
    nf = split_normal_form(P("exists z. gfp R(x). R(x) @ (z)"))
    assert (nf.prefix, nf.rel, nf.vars) == (("z",), "R", ("x",))


ROUND_TRIP = [
    "exists z. gfp R(x). (exists y. (E(x,y) & R(y))) @ (z)",
    "exists z. gfp R(x). (forall y. (!E(x,y) | R(y))) @ (z)",
    "exists z. gfp R(x). (E(x,x) | exists y. (E(y,x) & R(y))) @ (z)",
    "exists z. gfp R(x). (exists y. (E(x,y) & !E(y,x) & R(y))) @ (z)",
    "exists a. exists b. gfp R(x,y). (E(x,y) & R(y,x)) @ (a,b)",
]


@pytest.mark.parametrize("source", ROUND_TRIP)
def test_semantic_round_trip(source):
    psi = P(source)
    back = gfp_to_inc_sentence(psi)
    rewrapped = wrap_sentence_inc_to_gfp(back, "exists")
    arity = len(split_normal_form(psi).vars)
    for n in ((1, 2, 3) if arity == 1 else (1, 2)):
        for M in digraphs(n):
            ctx = FixpointContext(M)
            want = FixpointEvaluator(ctx, psi).holds()
            assert FixpointEvaluator(ctx, rewrapped).holds() == want
            if n <= 2 and arity == 1:
                assert NaiveEvaluator(M).holds(Team.unit(), back) == want


# -- myopic sentences ---------------------------------------------------------

def test_myopic_example():
    out = myopic_to_inc(P("forall x. (R(x) -> exists y. (R(y) & E(x,y)))"))
    assert text(out) == "exists y. ((y) <= (x) & E(x,y))"


def test_myopic_trivial():
    out = myopic_to_inc(P("forall x. (R(x) -> x = x)"))
    assert out == P("x = x")
    for X in all_teams(("x",), 2):
        assert NaiveEvaluator(Structure(2)).holds(X, out)


def test_myopic_negative_rejected():
    with pytest.raises(NotMyopic) as err:
        myopic_to_inc(P("forall x. (R(x) -> !R(x))"))
    assert "negatively" in str(err.value)


@pytest.mark.parametrize("source, ok", [
    ("forall x. (R(x) -> exists y. (R(y) & E(x,y)))", True),
    ("forall x. (R(x) -> x = x)", True),
    ("forall x. (R(x) -> !R(x))", False),
    ("forall x. (!R(x) | E(x,x))", True),
    ("forall x. forall y. (R(x,y) -> R(y,x))", True),
] + [(s, False) for s in corpus.NOT_MYOPIC])
def test_is_myopic(source, ok):
    check = is_myopic(P(source))
    assert bool(check) is ok
    assert bool(check.problems) is not ok


def test_myopic_semantics_successor_example():
    phi = P("forall x. (R(x) -> exists y. (R(y) & E(x,y)))")
    out = myopic_to_inc(phi)
    for n in (1, 2, 3):
        for M in digraphs(n):
            E = M.relations["E"]
            naive = NaiveEvaluator(M)
            for X in all_teams(("x",), n):
                members = {r[0] for r in X.rows}
                expected = all(any((a, b) in E for b in members) for a in members)
                assert naive.holds(X, out) == expected
