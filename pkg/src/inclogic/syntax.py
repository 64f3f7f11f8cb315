"""Formulas for first-order logic with dependency atoms and fixed-point operators.

One tree type covers both object languages (inclusion logic and fixed-point
logic).  Trees are immutable and compare structurally.  The concrete syntax is::

    exists x. exists y. ((y) <= (x) & E(x,y))
    gfp S(x,y). (R(x) & exists z. (E(y,z) & S(x,z))) @ (x,y)
    dep(x ; y)   excl(x ; y)   indep(x ; y)   cindep(x ; y ; z)

Negation and implication are accepted on input (``!(A | B)``, ``A -> B``) and
removed by :func:`to_nnf`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence, Union


class FormulaError(ValueError):
    """Ill-formed formula or symbol misuse."""


class ParseError(FormulaError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at offset {pos})")
        self.pos = pos


class PositivityError(FormulaError):
    pass


# --------------------------------------------------------------------------
# terms


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Func:
    name: str
    args: tuple

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


Term = Union[Var, Const, Func]


def term_vars(t: Term) -> Iterator[str]:
    if isinstance(t, Var):
        yield t.name
    elif isinstance(t, Func):
        for a in t.args:
            yield from term_vars(a)


def subst_term(t: Term, mapping: Mapping[str, Term]) -> Term:
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    if isinstance(t, Func):
        return Func(t.name, tuple(subst_term(a, mapping) for a in t.args))
    return t


# --------------------------------------------------------------------------
# formulas


class Formula:
    """Base class of all formula nodes."""

    __slots__ = ()

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, repr=False)
class Rel(Formula):
    """Relational literal ``R(t1,...,tk)`` or its negation."""

    name: str
    args: tuple
    neg: bool = False

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))

    def __repr__(self):
        return f"Rel({to_text(self)!r})"


@dataclass(frozen=True, repr=False)
class Eq(Formula):
    left: Term
    right: Term
    neg: bool = False

    def __repr__(self):
        return f"Eq({to_text(self)!r})"


def _tuple_pair(node, a, b):
    a, b = tuple(a), tuple(b)
    if len(a) != len(b):
        raise FormulaError(
            f"{type(node).__name__.lower()} atom needs equal-length tuples, "
            f"got {len(a)} and {len(b)}")
    object.__setattr__(node, "left", a)
    object.__setattr__(node, "right", b)


@dataclass(frozen=True, repr=False)
class Incl(Formula):
    """Inclusion atom ``(t1) <= (t2)``."""

    left: tuple
    right: tuple

    def __post_init__(self):
        _tuple_pair(self, self.left, self.right)

    def __repr__(self):
        return f"Incl({to_text(self)!r})"


@dataclass(frozen=True, repr=False)
class Excl(Formula):
    left: tuple
    right: tuple

    def __post_init__(self):
        _tuple_pair(self, self.left, self.right)

    def __repr__(self):
        return f"Excl({to_text(self)!r})"


@dataclass(frozen=True, repr=False)
class Dep(Formula):
    """Functional dependence: ``left`` determines ``right``."""

    left: tuple
    right: tuple

    def __post_init__(self):
        object.__setattr__(self, "left", tuple(self.left))
        object.__setattr__(self, "right", tuple(self.right))

    def __repr__(self):
        return f"Dep({to_text(self)!r})"


@dataclass(frozen=True, repr=False)
class Indep(Formula):
    left: tuple
    right: tuple

    def __post_init__(self):
        object.__setattr__(self, "left", tuple(self.left))
        object.__setattr__(self, "right", tuple(self.right))

    def __repr__(self):
        return f"Indep({to_text(self)!r})"


@dataclass(frozen=True, repr=False)
class CIndep(Formula):
    """Conditional independence of ``left`` and ``right`` given ``cond``."""

    cond: tuple
    left: tuple
    right: tuple

    def __post_init__(self):
        for name in ("cond", "left", "right"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    def __repr__(self):
        return f"CIndep({to_text(self)!r})"


@dataclass(frozen=True, repr=False)
class And(Formula):
    left: Formula
    right: Formula

    def __repr__(self):
        return f"And({to_text(self)!r})"


@dataclass(frozen=True, repr=False)
class Or(Formula):
    left: Formula
    right: Formula

    def __repr__(self):
        return f"Or({to_text(self)!r})"


@dataclass(frozen=True, repr=False)
class Exists(Formula):
    var: str
    body: Formula

    def __repr__(self):
        return f"Exists({to_text(self)!r})"


@dataclass(frozen=True, repr=False)
class Forall(Formula):
    var: str
    body: Formula

    def __repr__(self):
        return f"Forall({to_text(self)!r})"


@dataclass(frozen=True, repr=False)
class Fix(Formula):
    """``[gfp_{rel, vars} body] args`` (or ``lfp``)."""

    kind: str
    rel: str
    vars: tuple
    body: Formula
    args: tuple

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))
        object.__setattr__(self, "args", tuple(self.args))
        if self.kind not in ("gfp", "lfp"):
            raise FormulaError(f"unknown fixed-point kind {self.kind!r}")
        if len(self.vars) != len(self.args):
            raise FormulaError(
                f"{self.kind} over {self.rel}: {len(self.vars)} bound variables "
                f"but {len(self.args)} applied terms")
        if not self.vars:
            raise FormulaError(f"{self.kind} over {self.rel} binds no variables")
        if len(set(self.vars)) != len(self.vars):
            raise FormulaError(f"{self.kind} over {self.rel}: repeated bound variable")

    def __repr__(self):
        return f"Fix({to_text(self)!r})"


@dataclass(frozen=True, repr=False)
class Not(Formula):
    """Negation of a compound formula; only present before :func:`to_nnf`."""

    body: Formula

    def __repr__(self):
        return f"Not({to_text(self)!r})"


@dataclass(frozen=True, repr=False)
class Implies(Formula):
    left: Formula
    right: Formula

    def __repr__(self):
        return f"Implies({to_text(self)!r})"


LITERALS = (Rel, Eq)
DEP_ATOMS = (Incl, Excl, Dep, Indep, CIndep)
ATOMS = LITERALS + DEP_ATOMS


def conj(*parts: Formula) -> Formula:
    """Left-nested conjunction of one or more formulas."""
    if not parts:
        raise FormulaError("empty conjunction")
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(*parts: Formula) -> Formula:
    if not parts:
        raise FormulaError("empty disjunction")
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def exists_all(names: Sequence[str], body: Formula) -> Formula:
    for v in reversed(names):
        body = Exists(v, body)
    return body


def forall_all(names: Sequence[str], body: Formula) -> Formula:
    for v in reversed(names):
        body = Forall(v, body)
    return body


def negate(f: Formula) -> Formula:
    if isinstance(f, Rel):
        return Rel(f.name, f.args, not f.neg)
    if isinstance(f, Eq):
        return Eq(f.left, f.right, not f.neg)
    return Not(f)


def atom_terms(f: Formula) -> tuple:
    """All terms directly under an atom, in written order."""
    if isinstance(f, Rel):
        return f.args
    if isinstance(f, Eq):
        return (f.left, f.right)
    if isinstance(f, CIndep):
        return f.cond + f.left + f.right
    if isinstance(f, DEP_ATOMS):
        return f.left + f.right
    raise TypeError(f"not an atom: {f!r}")


def children(f: Formula) -> tuple:
    if isinstance(f, (And, Or, Implies)):
        return (f.left, f.right)
    if isinstance(f, (Exists, Forall, Not)):
        return (f.body,)
    if isinstance(f, Fix):
        return (f.body,)
    return ()


def walk(f: Formula) -> Iterator[Formula]:
    """Pre-order traversal."""
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(reversed(children(g)))


# --------------------------------------------------------------------------
# structural analyses


def free_vars(f: Formula) -> tuple:
    """Free first-order variables in order of first occurrence."""
    out: dict = {}

    def add_terms(terms, bound):
        for t in terms:
            for v in term_vars(t):
                if v not in bound:
                    out.setdefault(v, None)

    def go(g, bound):
        if isinstance(g, ATOMS):
            add_terms(atom_terms(g), bound)
        elif isinstance(g, (And, Or, Implies)):
            go(g.left, bound)
            go(g.right, bound)
        elif isinstance(g, Not):
            go(g.body, bound)
        elif isinstance(g, (Exists, Forall)):
            go(g.body, bound | {g.var})
        elif isinstance(g, Fix):
            # the body only sees the operator's own variables plus the outer scope
            go(g.body, bound | set(g.vars))
            add_terms(g.args, bound)
        else:
            raise TypeError(f"unknown node {g!r}")

    go(f, frozenset())
    return tuple(out)


def all_vars(f: Formula) -> set:
    """Every variable name occurring anywhere, bound or free."""
    out = set()
    for g in walk(f):
        if isinstance(g, ATOMS):
            for t in atom_terms(g):
                out.update(term_vars(t))
        elif isinstance(g, (Exists, Forall)):
            out.add(g.var)
        elif isinstance(g, Fix):
            out.update(g.vars)
            for t in g.args:
                out.update(term_vars(t))
    return out


def relation_symbols(f: Formula) -> set:
    """Every relation symbol name occurring anywhere (free or bound)."""
    out = set()
    for g in walk(f):
        if isinstance(g, Rel):
            out.add(g.name)
        elif isinstance(g, Fix):
            out.add(g.rel)
    return out


def free_relations(f: Formula) -> tuple:
    """Relation symbols not bound by an enclosing fixed-point operator."""
    out: dict = {}

    def go(g, bound):
        if isinstance(g, Rel):
            if g.name not in bound:
                out.setdefault(g.name, len(g.args))
        elif isinstance(g, Fix):
            go(g.body, bound | {g.rel})
        else:
            for c in children(g):
                go(c, bound)

    go(f, frozenset())
    return tuple(out)


def check_positive(f: Formula, r: str) -> bool:
    """True iff ``r`` never occurs under an odd number of negations.

    In negation normal form this is exactly: no literal ``!r(...)`` anywhere,
    including inside fixed-point bodies.
    """

    def go(g, positive):
        if isinstance(g, Rel):
            return g.name != r or (positive != g.neg)
        if isinstance(g, Not):
            return go(g.body, not positive)
        if isinstance(g, Implies):
            return go(g.left, not positive) and go(g.right, positive)
        return all(go(c, positive) for c in children(g))

    return go(f, True)


def rank(f: Formula) -> int:
    """Quantifier/disjunction depth of an inclusion-logic formula."""
    if isinstance(f, ATOMS):
        return 0
    if isinstance(f, And):
        return max(rank(f.left), rank(f.right))
    if isinstance(f, Or):
        return max(rank(f.left), rank(f.right)) + 1
    if isinstance(f, (Exists, Forall)):
        return rank(f.body) + 1
    raise FormulaError(f"rank is undefined for {type(f).__name__} nodes")


def is_nnf(f: Formula) -> bool:
    return not any(isinstance(g, (Not, Implies)) for g in walk(f))


def is_fo(f: Formula) -> bool:
    """First-order and in negation normal form."""
    return all(isinstance(g, LITERALS + (And, Or, Exists, Forall)) for g in walk(f))


def is_incl(f: Formula) -> bool:
    return all(isinstance(g, LITERALS + (Incl, And, Or, Exists, Forall)) for g in walk(f))


def is_team_formula(f: Formula) -> bool:
    """Inclusion logic plus the other four dependency atoms."""
    return all(isinstance(g, ATOMS + (And, Or, Exists, Forall)) for g in walk(f))


def is_fixpoint_formula(f: Formula) -> bool:
    """FO plus gfp/lfp operators, NNF, every bound symbol positive in its body."""
    for g in walk(f):
        if not isinstance(g, LITERALS + (And, Or, Exists, Forall, Fix)):
            return False
        if isinstance(g, Fix) and not check_positive(g.body, g.rel):
            return False
    return True


def is_pgfp(f: Formula) -> bool:
    return is_fixpoint_formula(f) and all(
        g.kind == "gfp" for g in walk(f) if isinstance(g, Fix))


def check_fixpoints(f: Formula) -> None:
    """Raise :class:`PositivityError` if a bound symbol occurs negatively."""
    for g in walk(f):
        if isinstance(g, Fix) and not check_positive(g.body, g.rel):
            raise PositivityError(
                f"{g.rel} occurs negatively in the body of its {g.kind} operator")


def to_nnf(f: Formula) -> Formula:
    """Push negations down to literals and eliminate implications."""

    def pos(g):
        if isinstance(g, ATOMS):
            return g
        if isinstance(g, Not):
            return neg(g.body)
        if isinstance(g, Implies):
            return Or(neg(g.left), pos(g.right))
        if isinstance(g, And):
            return And(pos(g.left), pos(g.right))
        if isinstance(g, Or):
            return Or(pos(g.left), pos(g.right))
        if isinstance(g, Exists):
            return Exists(g.var, pos(g.body))
        if isinstance(g, Forall):
            return Forall(g.var, pos(g.body))
        if isinstance(g, Fix):
            return Fix(g.kind, g.rel, g.vars, pos(g.body), g.args)
        raise TypeError(f"unknown node {g!r}")

    def neg(g):
        if isinstance(g, (Rel, Eq)):
            return negate(g)
        if isinstance(g, DEP_ATOMS):
            raise FormulaError(
                f"negated dependency atom {to_text(g)} has no team semantics")
        if isinstance(g, Fix):
            raise FormulaError(f"negated {g.kind} operator is not allowed")
        if isinstance(g, Not):
            return pos(g.body)
        if isinstance(g, Implies):
            return And(pos(g.left), neg(g.right))
        if isinstance(g, And):
            return Or(neg(g.left), neg(g.right))
        if isinstance(g, Or):
            return And(neg(g.left), neg(g.right))
        if isinstance(g, Exists):
            return Forall(g.var, neg(g.body))
        if isinstance(g, Forall):
            return Exists(g.var, neg(g.body))
        raise TypeError(f"unknown node {g!r}")

    if is_nnf(f):
        return f
    return pos(f)


# --------------------------------------------------------------------------
# substitution and renaming


def substitute(f: Formula, mapping: Mapping[str, Term]) -> Formula:
    """Replace free variables by terms.  The caller guarantees no capture."""
    if not mapping:
        return f
    if isinstance(f, Rel):
        return Rel(f.name, tuple(subst_term(t, mapping) for t in f.args), f.neg)
    if isinstance(f, Eq):
        return Eq(subst_term(f.left, mapping), subst_term(f.right, mapping), f.neg)
    if isinstance(f, CIndep):
        s = lambda ts: tuple(subst_term(t, mapping) for t in ts)  # noqa: E731
        return CIndep(s(f.cond), s(f.left), s(f.right))
    if isinstance(f, DEP_ATOMS):
        s = lambda ts: tuple(subst_term(t, mapping) for t in ts)  # noqa: E731
        return type(f)(s(f.left), s(f.right))
    if isinstance(f, (And, Or, Implies)):
        return type(f)(substitute(f.left, mapping), substitute(f.right, mapping))
    if isinstance(f, Not):
        return Not(substitute(f.body, mapping))
    if isinstance(f, (Exists, Forall)):
        inner = {k: v for k, v in mapping.items() if k != f.var}
        return type(f)(f.var, substitute(f.body, inner))
    if isinstance(f, Fix):
        inner = {k: v for k, v in mapping.items() if k not in f.vars}
        return Fix(f.kind, f.rel, f.vars, substitute(f.body, inner),
                   tuple(subst_term(t, mapping) for t in f.args))
    raise TypeError(f"unknown node {f!r}")


def rename_var(f: Formula, old: str, new: str) -> Formula:
    """Rename free occurrences of ``old`` to a variable ``new`` not in ``f``."""
    return substitute(f, {old: Var(new)})


@dataclass
class FreshNames:
    """Deterministic generator of names ``_v0, _v1, ...`` and ``_R0, _R1, ...``.

    Prefixes and starting counters are configurable; names already present in
    ``taken`` are skipped.
    """

    taken: set = field(default_factory=set)
    next_var: int = 0
    next_rel: int = 0
    var_prefix: str = "_v"
    rel_prefix: str = "_R"

    @classmethod
    def avoiding(cls, *formulas: Formula, names: Sequence[str] = (), **options) -> "FreshNames":
        taken = set(names)
        for f in formulas:
            taken |= all_vars(f)
            taken |= relation_symbols(f)
        return cls(taken, **options)

    def avoid(self, *formulas: Formula, names: Sequence[str] = ()) -> None:
        self.taken.update(names)
        for f in formulas:
            self.taken |= all_vars(f)
            self.taken |= relation_symbols(f)

    def var(self) -> str:
        while f"{self.var_prefix}{self.next_var}" in self.taken:
            self.next_var += 1
        name = f"{self.var_prefix}{self.next_var}"
        self.taken.add(name)
        return name

    def vars(self, k: int) -> tuple:
        return tuple(self.var() for _ in range(k))

    def rel(self) -> str:
        while f"{self.rel_prefix}{self.next_rel}" in self.taken:
            self.next_rel += 1
        name = f"{self.rel_prefix}{self.next_rel}"
        self.taken.add(name)
        return name

    def prefer(self, name: str, kind: str = "var") -> str:
        """``name`` itself if still free, else a generated one."""
        if name not in self.taken:
            self.taken.add(name)
            return name
        return self.var() if kind == "var" else self.rel()


# --------------------------------------------------------------------------
# signatures


@dataclass
class Signature:
    relations: dict = field(default_factory=dict)
    functions: dict = field(default_factory=dict)
    constants: set = field(default_factory=set)
    so_vars: dict = field(default_factory=dict)

    def __post_init__(self):
        kinds = [set(self.relations), set(self.functions), set(self.constants),
                 set(self.so_vars)]
        seen = set()
        for k in kinds:
            clash = seen & k
            if clash:
                raise FormulaError(f"symbol declared twice: {sorted(clash)}")
            seen |= k

    def relation_arity(self, name):
        if name in self.relations:
            return self.relations[name]
        return self.so_vars.get(name)


# --------------------------------------------------------------------------
# concrete syntax: printer


def term_text(t: Term) -> str:
    if isinstance(t, Func):
        return f"{t.name}({','.join(term_text(a) for a in t.args)})"
    return t.name


def _terms(ts) -> str:
    return ",".join(term_text(t) for t in ts)


def _is_unit(f):
    return isinstance(f, ATOMS + (Fix, Not))


def to_text(f: Formula) -> str:
    return _pr(f, 0, True)


def _pr(f, level, tail):
    # level: 0 formula, 1 disjunction operand, 2 conjunction operand, 3 unit
    if isinstance(f, Rel):
        return ("!" if f.neg else "") + f"{f.name}({_terms(f.args)})"
    if isinstance(f, Eq):
        op = "!=" if f.neg else "="
        return f"{term_text(f.left)} {op} {term_text(f.right)}"
    if isinstance(f, Incl):
        return f"({_terms(f.left)}) <= ({_terms(f.right)})"
    if isinstance(f, CIndep):
        return f"cindep({_terms(f.cond)} ; {_terms(f.left)} ; {_terms(f.right)})"
    if isinstance(f, (Dep, Excl, Indep)):
        kw = {Dep: "dep", Excl: "excl", Indep: "indep"}[type(f)]
        return f"{kw}({_terms(f.left)} ; {_terms(f.right)})"
    if isinstance(f, Not):
        return f"!({_pr(f.body, 0, True)})"
    if isinstance(f, Fix):
        body = _pr(f.body, 3, False) if _is_unit(f.body) else f"({_pr(f.body, 0, True)})"
        return (f"{f.kind} {f.rel}({','.join(f.vars)}). {body} "
                f"@ ({_terms(f.args)})")
    if isinstance(f, (Exists, Forall)):
        kw = "exists" if isinstance(f, Exists) else "forall"
        wrap = level > 0 and not tail
        inner_tail = True if wrap else tail
        if isinstance(f.body, (And, Or, Implies)):
            body = f"({_pr(f.body, 0, True)})"
        else:
            body = _pr(f.body, 0, inner_tail)
        s = f"{kw} {f.var}. {body}"
        return f"({s})" if wrap else s
    if isinstance(f, (And, Or, Implies)):
        if isinstance(f, And):
            need, sym, lv, rv = 2, "&", 2, 3
        elif isinstance(f, Or):
            need, sym, lv, rv = 1, "|", 1, 2
        else:
            need, sym, lv, rv = 0, "->", 1, 0
        wrap = level > need
        inner_tail = True if wrap else tail
        s = f"{_pr(f.left, lv, False)} {sym} {_pr(f.right, rv, inner_tail)}"
        return f"({s})" if wrap else s
    raise TypeError(f"unknown node {f!r}")


# --------------------------------------------------------------------------
# concrete syntax: parser

_TOKEN = re.compile(r"\s*(?:(?P<id>[A-Za-z_][A-Za-z0-9_]*)|(?P<num>[0-9]+)|"
                    r"(?P<op>->|!=|<=|[()\[\],;.&|!=@]))")
_KEYWORDS = {"exists", "forall", "gfp", "lfp", "dep", "excl", "indep", "cindep"}


def _tokenize(text):
    toks = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        toks.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text, sig):
        self.toks = _tokenize(text)
        self.i = 0
        self.sig = sig
        self.bound_rels = []     # stack of (name, arity) bound by gfp/lfp
        self.seen_rels = {}      # inferred arities when sig is None
        self.seen_funs = {}

    # token helpers
    def peek(self, k=0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, value, k=0):
        kind, val, _ = self.peek(k)
        return kind == "op" and val == value

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, pos = self.take()
        if kind != "op" or val != value:
            raise ParseError(f"expected {value!r}, found {val or 'end of input'!r}", pos)

    def ident(self):
        kind, val, pos = self.take()
        if kind != "id":
            raise ParseError(f"expected identifier, found {val or 'end of input'!r}", pos)
        return val, pos

    # symbol classification
    def is_function(self, name):
        if self.sig is not None:
            return name in self.sig.functions
        return name in self.seen_funs

    def is_constant(self, name):
        return self.sig is not None and name in self.sig.constants

    def rel_arity(self, name, arity, pos):
        for bname, barity in reversed(self.bound_rels):
            if bname == name:
                expected = barity
                break
        else:
            if self.sig is not None:
                expected = self.sig.relation_arity(name)
                if expected is None:
                    raise ParseError(f"unknown relation symbol {name!r}", pos)
            else:
                if name in self.seen_funs:
                    raise ParseError(f"{name!r} used as both function and relation", pos)
                expected = self.seen_rels.setdefault(name, arity)
        if expected != arity:
            raise ParseError(
                f"relation {name!r} has arity {expected}, applied to {arity} terms", pos)

    # grammar
    def formula(self):
        kind, val, pos = self.peek()
        if kind == "id" and val in ("exists", "forall"):
            self.take()
            v, vpos = self.ident()
            if v in _KEYWORDS:
                raise ParseError(f"keyword {v!r} used as variable", vpos)
            self.expect(".")
            body = self.formula()
            return Exists(v, body) if val == "exists" else Forall(v, body)
        left = self.disj()
        if self.at("->"):
            self.take()
            return Implies(left, self.formula())
        return left

    def disj(self):
        f = self.conj()
        while self.at("|"):
            self.take()
            f = Or(f, self.conj())
        return f

    def conj(self):
        f = self.unit()
        while self.at("&"):
            self.take()
            f = And(f, self.unit())
        return f

    def unit(self):
        kind, val, pos = self.peek()
        if kind == "op" and val == "!":
            self.take()
            return negate(self.unit())
        if kind == "op" and val == "(":
            save = self.i, dict(self.seen_funs), dict(self.seen_rels)
            try:
                left = self.paren_terms()
            except ParseError:
                left = None
            if left is not None and self.at("<="):
                _, _, ipos = self.take()
                right = self.paren_terms()
                if len(left) != len(right):
                    raise ParseError(
                        f"inclusion atom needs equal-length tuples, got {len(left)} "
                        f"and {len(right)}", ipos)
                return Incl(left, right)
            self.i, self.seen_funs, self.seen_rels = save
            self.take()
            f = self.formula()
            self.expect(")")
            return f
        if kind == "id":
            if val in ("exists", "forall"):
                return self.formula()
            if val in ("gfp", "lfp"):
                return self.fix()
            if val in ("dep", "excl", "indep", "cindep") and self.at("(", 1):
                return self.genatom()
            if self.at("(", 1) and not self.is_function(val):
                # relational literal, unless followed by = (then it's a function term)
                save = self.i
                name, npos = self.ident()
                args = self.paren_terms()
                if self.at("=") or self.at("!="):
                    if self.sig is not None:
                        raise ParseError(f"unknown function symbol {name!r}", npos)
                    self.i = save
                else:
                    self.rel_arity(name, len(args), npos)
                    return Rel(name, args)
        if kind in ("id", "num"):
            left = self.term()
            kind2, op, opos = self.take()
            if kind2 != "op" or op not in ("=", "!="):
                raise ParseError(f"expected '=' or '!=', found {op or 'end of input'!r}", opos)
            return Eq(left, self.term(), op == "!=")
        raise ParseError(f"unexpected {val or 'end of input'!r}", pos)

    def genatom(self):
        kw, _ = self.ident()
        self.expect("(")
        parts = [self.terms_until((";", ")"))]
        while self.at(";"):
            self.take()
            parts.append(self.terms_until((";", ")")))
        _, _, pos = self.peek()
        self.expect(")")
        want = 3 if kw == "cindep" else 2
        if len(parts) != want:
            raise ParseError(f"{kw} takes {want} term tuples, got {len(parts)}", pos)
        if kw == "cindep":
            return CIndep(*parts)
        if kw == "excl" and len(parts[0]) != len(parts[1]):
            raise ParseError("exclusion atom needs equal-length tuples", pos)
        return {"dep": Dep, "excl": Excl, "indep": Indep}[kw](*parts)

    def fix(self):
        kind, _ = self.ident()
        name, npos = self.ident()
        self.expect("(")
        vs = []
        if not self.at(")"):
            vs.append(self.ident()[0])
            while self.at(","):
                self.take()
                vs.append(self.ident()[0])
        self.expect(")")
        self.expect(".")
        if self.sig is not None and (name in self.sig.relations or name in self.sig.functions
                                     or name in self.sig.constants):
            raise ParseError(f"{kind} binds {name!r}, which is a structure symbol", npos)
        self.bound_rels.append((name, len(vs)))
        body = self.formula()
        self.bound_rels.pop()
        _, _, apos = self.peek()
        self.expect("@")
        args = self.paren_terms()
        if len(args) != len(vs):
            raise ParseError(
                f"{kind} over {name} binds {len(vs)} variables but is applied to "
                f"{len(args)} terms", apos)
        if len(set(vs)) != len(vs):
            raise ParseError(f"{kind} over {name}: repeated bound variable", npos)
        f = Fix(kind, name, vs, body, args)
        if not check_positive(body, name):
            raise ParseError(f"{name} occurs negatively in its {kind} body", npos)
        return f

    def paren_terms(self):
        self.expect("(")
        ts = self.terms_until((")",))
        self.expect(")")
        return ts

    def terms_until(self, stops):
        ts = []
        if any(self.at(s) for s in stops):
            return tuple(ts)
        ts.append(self.term())
        while self.at(","):
            self.take()
            ts.append(self.term())
        return tuple(ts)

    def term(self):
        kind, val, pos = self.take()
        if kind == "num":
            raise ParseError("numerals are not terms; declare a constant", pos)
        if kind != "id":
            raise ParseError(f"expected term, found {val or 'end of input'!r}", pos)
        if val in _KEYWORDS:
            raise ParseError(f"keyword {val!r} used as term", pos)
        if self.at("("):
            self.take()
            args = self.terms_until((")",))
            self.expect(")")
            if self.sig is not None:
                if val not in self.sig.functions:
                    raise ParseError(f"unknown function symbol {val!r}", pos)
                if self.sig.functions[val] != len(args):
                    raise ParseError(
                        f"function {val!r} has arity {self.sig.functions[val]}, "
                        f"applied to {len(args)} terms", pos)
            else:
                if val in self.seen_rels:
                    raise ParseError(f"{val!r} used as both relation and function", pos)
                if self.seen_funs.setdefault(val, len(args)) != len(args):
                    raise ParseError(f"function {val!r} used with two arities", pos)
            return Func(val, args)
        if self.is_constant(val):
            return Const(val)
        return Var(val)


def parse_formula(text: str, sig: Signature | None = None) -> Formula:
    """Parse the concrete syntax.

    With ``sig=None`` symbols are inferred from use: applied identifiers in
    formula position are relations, applied identifiers in term position are
    functions, bare identifiers are variables.  With a signature every symbol
    must be declared and arities are checked.
    """
    p = _Parser(text, sig)
    f = p.formula()
    kind, val, pos = p.peek()
    if kind != "end":
        raise ParseError(f"trailing input {val!r}", pos)
    return f


def parse_terms(text: str, sig: Signature | None = None) -> tuple:
    """Parse a comma separated list of terms, e.g. ``x,y`` or ``(x, f(y))``."""
    text = text.strip()
    if not (text.startswith("(") and text.endswith(")")):
        text = f"({text})"
    p = _Parser(text, sig)
    ts = p.paren_terms()
    kind, val, pos = p.peek()
    if kind != "end":
        raise ParseError(f"trailing input {val!r}", pos)
    return ts
