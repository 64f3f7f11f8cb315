"""Hypothesis strategies for random formulas, structures and teams."""

from hypothesis import strategies as st

from inclogic.structures import Relation, Structure, Team
from inclogic.syntax import And, Eq, Exists, Forall, Incl, Or, Rel, Var

VARS = ("x", "y", "z")


def variables(names=VARS):
    return st.sampled_from(names).map(Var)


def literals(names=VARS, rels=(("E", 2),), allow_negative=True):
    def rel_lit(spec):
        name, k = spec
        return st.builds(lambda args, neg: Rel(name, tuple(args), neg),
                         st.lists(variables(names), min_size=k, max_size=k),
                         st.booleans() if allow_negative else st.just(False))
    eqs = st.builds(Eq, variables(names), variables(names), st.booleans())
    return st.one_of(eqs, *[rel_lit(spec) for spec in rels])


def inclusion_atoms(names=VARS, max_len=2):
    return st.integers(1, max_len).flatmap(
        lambda k: st.builds(Incl, st.lists(variables(names), min_size=k, max_size=k).map(tuple),
                            st.lists(variables(names), min_size=k, max_size=k).map(tuple)))


def formulas(leaves, names=VARS, max_leaves=6):
    def extend(children):
        return st.one_of(
            st.builds(And, children, children),
            st.builds(Or, children, children),
            st.builds(Exists, st.sampled_from(names), children),
            st.builds(Forall, st.sampled_from(names), children),
        )
    return st.recursive(leaves, extend, max_leaves=max_leaves)


def fo_formulas(rels=(("E", 2),), names=VARS, max_leaves=6):
    return formulas(literals(names, rels), names, max_leaves)


def incl_formulas(names=VARS, max_leaves=5):
    return formulas(st.one_of(literals(names), inclusion_atoms(names)), names, max_leaves)


@st.composite
def relations(draw, n, arity):
    mask = draw(st.integers(0, (1 << (n ** arity)) - 1))
    return Relation.from_mask(n, arity, mask)


@st.composite
def digraphs(draw, sizes=(1, 2, 3)):
    n = draw(st.sampled_from(sizes))
    return Structure(n, {"E": draw(relations(n, 2))})


@st.composite
def teams(draw, n, vars=("x", "y"), max_size=None):
    rows = draw(relations(n, len(vars))).tuples
    rows = sorted(rows)
    if max_size is not None:
        rows = rows[:max_size]
    return Team(tuple(vars), frozenset(rows))
