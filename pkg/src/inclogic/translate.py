"""Translations between inclusion logic and positive greatest fixed point logic.

* :func:`inc_to_gfp` turns an inclusion-logic formula φ with free variables
  among x̄ into a fixed-point formula φ*(R, x̄) such that, for every team X,
  ``M ⊨_X φ`` iff ``(M, R := X(x̄)) ⊨_s φ*`` for every ``s`` in X.
* :func:`gfp_to_inc_fo` goes the other way for a first-order η(R, x̄, ȳ)
  with R positive: ``M ⊨_X η+`` iff ``(M, R := X(x̄)) ⊨_s η`` for every s in X.
* :func:`gfp_to_inc_sentence` and :func:`wrap_sentence_inc_to_gfp` lift these
  to sentences; :func:`myopic_to_inc` compiles myopic sentences.

Every call threads a single :class:`FreshNames`, so outputs are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .syntax import (
    DEP_ATOMS,
    And,
    Eq,
    Exists,
    Fix,
    Forall,
    Formula,
    FormulaError,
    FreshNames,
    Implies,
    Incl,
    Or,
    PositivityError,
    Rel,
    Var,
    check_positive,
    conj,
    exists_all,
    free_vars,
    is_fo,
    is_incl,
    relation_symbols,
    rename_var,
    subst_term,
    to_nnf,
)


class NotNormalForm(FormulaError):
    """Input sentence is not of the shape ``exists z̄. gfp R(x̄). η @ (z̄)``."""


class NotMyopic(FormulaError):
    """Input is not of the shape ``forall x̄. (R(x̄) -> θ)``."""


def _vars(names):
    return tuple(Var(v) for v in names)


def _check_tuple(xs):
    xs = tuple(xs)
    if not xs:
        raise FormulaError("the variable tuple must be nonempty")
    if len(set(xs)) != len(xs):
        raise FormulaError(f"repeated variable in {xs}")
    return xs


# --------------------------------------------------------------------------
# inclusion logic -> fixed points


def inc_to_gfp(f: Formula, xs: Sequence[str], fresh: FreshNames | None = None,
               rel: str = "R") -> Formula:
    """φ*(R, x̄) for an inclusion-logic formula ``f`` with free variables in ``xs``.

    ``rel`` names the relation that stands for the team's x̄-values; it must
    not already occur in ``f``.  Bound relation symbols come from ``fresh``
    (``S1, S2, ...`` by default) and witness variables are ``z1, z2, ...``.
    """
    xs = _check_tuple(xs)
    if not is_incl(f):
        raise FormulaError("input must be an inclusion-logic formula in negation normal form")
    outside = [v for v in free_vars(f) if v not in xs]
    if outside:
        raise FormulaError(f"free variables {outside} are not among {xs}")
    if rel in relation_symbols(f):
        raise FormulaError(f"relation symbol {rel} already occurs in the formula")
    if fresh is None:
        fresh = FreshNames(var_prefix="z", rel_prefix="S", next_var=1, next_rel=1)
    fresh.avoid(f, names=xs + (rel,))
    out = _star(f, rel, xs, fresh)
    if not check_positive(out, rel):  # pragma: no cover - guaranteed by construction
        raise PositivityError(f"{rel} occurs negatively in the translation")
    return out


def _star(f, r, xs, fresh):
    if isinstance(f, (Rel, Eq)):
        return f
    if isinstance(f, Incl):
        zs = fresh.vars(len(xs))
        to_z = dict(zip(xs, _vars(zs)))
        eqs = [Eq(a, subst_term(b, to_z)) for a, b in zip(f.left, f.right)]
        return exists_all(zs, conj(Rel(r, _vars(zs)), *eqs))
    if isinstance(f, And):
        return And(_star(f.left, r, xs, fresh), _star(f.right, r, xs, fresh))
    if isinstance(f, Or):
        left_rel, right_rel = fresh.rel(), fresh.rel()
        guard = Rel(r, _vars(xs))
        left = Fix("gfp", left_rel, xs, And(guard, _star(f.left, left_rel, xs, fresh)), _vars(xs))
        right = Fix("gfp", right_rel, xs, And(guard, _star(f.right, right_rel, xs, fresh)),
                    _vars(xs))
        return Or(left, right)
    if isinstance(f, (Exists, Forall)):
        v, body = f.var, f.body
        if v in xs:
            # the quantifier would overwrite a column of R; rename it away
            new = fresh.var()
            body = rename_var(body, v, new)
            v = new
        inner = fresh.rel()
        ys = xs + (v,)
        fix = Fix("gfp", inner, ys, And(Rel(r, _vars(xs)), _star(body, inner, ys, fresh)),
                  _vars(ys))
        return type(f)(v, fix)
    if isinstance(f, DEP_ATOMS):
        raise FormulaError(f"{type(f).__name__} atoms have no fixed-point translation here; "
                           "only inclusion atoms are supported")
    raise FormulaError(f"unexpected {type(f).__name__} node in an inclusion-logic formula")


def wrap_sentence_inc_to_gfp(f: Formula, quantifier: str = "forall",
                             fresh: FreshNames | None = None) -> Formula:
    """Fixed-point sentence equivalent to the inclusion-logic sentence ``f``.

    The default form is ``forall x. gfp R(x). φ*(R, x) @ (x)`` with a dummy
    variable x.  With ``quantifier="exists"`` the result is
    ``exists x. gfp R(x). φ*(R, x) @ (x)``, which is equivalent on nonempty
    structures and already has the shape accepted by
    :func:`gfp_to_inc_sentence` whenever φ* is first-order.
    """
    if free_vars(f):
        raise FormulaError(f"not a sentence: free variables {list(free_vars(f))}")
    if quantifier not in ("forall", "exists"):
        raise ValueError("quantifier must be 'forall' or 'exists'")
    if fresh is None:
        fresh = FreshNames(var_prefix="z", rel_prefix="S", next_var=1, next_rel=1)
    fresh.avoid(f)
    x = fresh.prefer("x")
    r = fresh.prefer("R", kind="rel")
    body = inc_to_gfp(f, (x,), fresh, rel=r)
    fix = Fix("gfp", r, (x,), body, (Var(x),))
    return Forall(x, fix) if quantifier == "forall" else Exists(x, fix)


# --------------------------------------------------------------------------
# fixed points -> inclusion logic


def gfp_to_inc_fo(eta: Formula, r: str, xs: Sequence[str],
                  fresh: FreshNames | None = None) -> Formula:
    """η+ for a first-order η in which ``r`` occurs only positively.

    ``xs`` are the variables whose team values interpret ``r``.  Other free
    variables of η are allowed and play the role of ordinary parameters.
    """
    xs = _check_tuple(xs)
    eta = to_nnf(eta)
    if not is_fo(eta):
        raise FormulaError("input must be first-order (no dependency atoms or fixed points)")
    if not check_positive(eta, r):
        raise PositivityError(f"{r} occurs negatively")
    if fresh is None:
        fresh = FreshNames(var_prefix="u", next_var=1)
    fresh.avoid(eta, names=xs + (r,))
    return _plus(eta, r, xs, fresh)


def _plus(f, r, cols, fresh):
    if isinstance(f, Rel):
        if f.name != r:
            return f
        if len(f.args) != len(cols):
            raise FormulaError(f"{r} applied to {len(f.args)} terms, expected {len(cols)}")
        return Incl(f.args, _vars(cols))
    if isinstance(f, Eq):
        return f
    if isinstance(f, And):
        return And(_plus(f.left, r, cols, fresh), _plus(f.right, r, cols, fresh))
    if isinstance(f, Or):
        us = fresh.vars(len(cols))
        split = Or(_plus(f.left, r, us, fresh), _plus(f.right, r, us, fresh))
        return exists_all(us, And(Incl(_vars(us), _vars(cols)), split))
    if isinstance(f, (Exists, Forall)):
        v, body = f.var, f.body
        if v in cols:
            new = fresh.var()
            body = rename_var(body, v, new)
            v = new
        return type(f)(v, _plus(body, r, cols, fresh))
    raise FormulaError(f"unexpected {type(f).__name__} node in a first-order formula")


@dataclass(frozen=True)
class NormalForm:
    """Parts of ``exists z̄. gfp R(x̄). η @ (z̄)``."""

    prefix: tuple
    rel: str
    vars: tuple
    body: Formula


def split_normal_form(psi: Formula) -> NormalForm:
    prefix = []
    g = psi
    while isinstance(g, Exists):
        prefix.append(g.var)
        g = g.body
    expected = "expected the shape  exists z1 ... zk. gfp R(x1,...,xk). η @ (z1,...,zk)"
    if not prefix:
        raise NotNormalForm(f"no existential prefix; {expected}")
    if not isinstance(g, Fix) or g.kind != "gfp":
        raise NotNormalForm(f"the existential prefix must be followed by a gfp operator; "
                            f"{expected}")
    if g.args != _vars(prefix):
        raise NotNormalForm(f"the gfp must be applied to exactly the quantified variables "
                            f"{tuple(prefix)} in order; {expected}")
    if free_vars(psi):
        raise NotNormalForm(f"not a sentence: free variables {list(free_vars(psi))}")
    params = [v for v in free_vars(g.body) if v not in g.vars]
    if params:
        raise NotNormalForm(f"the gfp body has first-order parameters {params}; only bodies "
                            f"whose free variables are the bound tuple are supported")
    if not is_fo(g.body):
        raise NotNormalForm(f"the gfp body must be first-order; {expected}")
    if not check_positive(g.body, g.rel):
        raise PositivityError(f"{g.rel} occurs negatively in the gfp body")
    return NormalForm(tuple(prefix), g.rel, g.vars, g.body)


def gfp_to_inc_sentence(psi: Formula, fresh: FreshNames | None = None) -> Formula:
    """``exists z̄ x̄. ((z̄) <= (x̄) & η+(x̄))`` for a normal-form sentence ``psi``."""
    nf = split_normal_form(psi)
    if fresh is None:
        fresh = FreshNames(var_prefix="u", next_var=1)
    fresh.avoid(psi)
    xs, body = nf.vars, nf.body
    if set(xs) & set(nf.prefix):
        renamed = []
        for x in xs:
            if x in nf.prefix:
                new = fresh.var()
                body = rename_var(body, x, new)
                renamed.append(new)
            else:
                renamed.append(x)
        xs = tuple(renamed)
    eta_plus = gfp_to_inc_fo(body, nf.rel, xs, fresh)
    return exists_all(nf.prefix + xs, And(Incl(_vars(nf.prefix), _vars(xs)), eta_plus))


# --------------------------------------------------------------------------
# myopic sentences


@dataclass
class MyopicCheck:
    ok: bool
    problems: list = field(default_factory=list)
    rel: str | None = None
    vars: tuple = ()
    matrix: Formula | None = None

    def __bool__(self):
        return self.ok


def is_myopic(phi: Formula) -> MyopicCheck:
    """Check the shape ``forall x̄. (R(x̄) -> θ)`` with R positive in θ.

    ``!R(x̄) | θ`` is accepted in place of the implication.  The result is
    truthy iff the shape matches; ``problems`` names each failed condition.
    """
    prefix = []
    g = phi
    while isinstance(g, Forall):
        prefix.append(g.var)
        g = g.body
    problems = []
    if not prefix:
        problems.append("no universal quantifier prefix")
    if isinstance(g, Implies) and isinstance(g.left, Rel) and not g.left.neg:
        guard, theta = g.left, g.right
    elif isinstance(g, Or) and isinstance(g.left, Rel) and g.left.neg:
        guard, theta = g.left, g.right
    else:
        problems.append("matrix is not an implication whose antecedent is a relational atom")
        return MyopicCheck(False, problems)
    r = guard.name
    if len(set(prefix)) != len(prefix):
        problems.append("repeated variable in the universal prefix")
    if guard.args != _vars(prefix):
        problems.append(f"antecedent must be {r} applied to exactly the quantified variables "
                        f"{tuple(prefix)}")
    try:
        theta = to_nnf(theta)
    except FormulaError as exc:
        problems.append(f"consequent cannot be put in negation normal form: {exc}")
        return MyopicCheck(False, problems, r, tuple(prefix))
    if not is_fo(theta):
        problems.append("consequent is not first-order")
    elif not check_positive(theta, r):
        problems.append(f"{r} occurs negatively in the consequent")
    outside = [v for v in free_vars(theta) if v not in prefix]
    if outside:
        problems.append(f"consequent has free variables {outside} outside the prefix")
    return MyopicCheck(not problems, problems, r, tuple(prefix), theta)


def myopic_to_inc(phi: Formula, fresh: FreshNames | None = None) -> Formula:
    """θ+(x̄) for a myopic sentence; raises :class:`NotMyopic` otherwise."""
    check = is_myopic(phi)
    if not check:
        raise NotMyopic("not myopic: " + "; ".join(check.problems))
    return gfp_to_inc_fo(check.matrix, check.rel, check.vars, fresh)

