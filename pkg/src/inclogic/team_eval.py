"""Brute-force lax team semantics, plus Tarski semantics for first-order formulas.

:class:`NaiveEvaluator` follows the satisfaction clauses literally: a
disjunction searches all covers ``X = Y ∪ Z``, an existential quantifier
searches all witness teams ``X[H/v]``.  It is exponential by design and is
the reference every translation is checked against.

Internally a team over variables ``v1..vk`` is a bit mask over the
``n**k`` possible assignments (assignment ``a`` has index
``a1*n**(k-1) + ... + ak``).
"""

from __future__ import annotations

import itertools
from typing import Mapping

import numpy as np

from .structures import (
    Structure,
    Team,
    UnboundVariable,
    eval_term,
    supplement,
    tuple_index,
)
from .syntax import (
    And,
    CIndep,
    Dep,
    Eq,
    Excl,
    Exists,
    Fix,
    Forall,
    Formula,
    FormulaError,
    Implies,
    Incl,
    Indep,
    Not,
    Or,
    Rel,
    free_vars,
)


class GuardError(RuntimeError):
    """Input too large for exhaustive enumeration (pass ``force=True`` to override)."""


DEFAULT_EXISTS_GUARD = 24     # max |X| * n at an existential quantifier
DEFAULT_COVER_GUARD = 20      # max |X| at a disjunction
MAX_SPACE = 1 << 16           # max n**k assignments over the current domain


def _bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _popcount(mask):
    return bin(mask).count("1")


class NaiveEvaluator:
    """Team-semantics evaluator for one structure; caches are per instance."""

    def __init__(self, M: Structure, *, force: bool = False,
                 exists_guard: int = DEFAULT_EXISTS_GUARD,
                 cover_guard: int = DEFAULT_COVER_GUARD,
                 choice_functions: bool = False):
        self.M = M
        self.n = M.size
        self.force = force
        self.exists_guard = exists_guard
        self.cover_guard = cover_guard
        # enumerate choice functions H directly instead of witness teams
        self.choice_functions = choice_functions
        self._memo: dict = {}
        self._tables: dict = {}
        self._spaces: dict = {}

    # -- public ---------------------------------------------------------

    def holds(self, X: Team, f: Formula) -> bool:
        missing = [v for v in free_vars(f) if v not in X.vars]
        if missing:
            raise UnboundVariable(", ".join(missing))
        self._check_fragment(f)
        mask = 0
        for r in X.rows:
            mask |= 1 << tuple_index(r, self.n)
        self._space(len(X.vars))
        return self._sat(f, X.vars, mask)

    # -- helpers --------------------------------------------------------

    @staticmethod
    def _check_fragment(f):
        stack = [f]
        while stack:
            g = stack.pop()
            if isinstance(g, Fix):
                raise FormulaError("fixed-point operators are not team-semantic formulas")
            if isinstance(g, (Not, Implies)):
                raise FormulaError("formula is not in negation normal form; call to_nnf")
            if isinstance(g, (And, Or)):
                stack += [g.left, g.right]
            elif isinstance(g, (Exists, Forall)):
                stack.append(g.body)

    def _space(self, k):
        rows = self._spaces.get(k)
        if rows is None:
            if self.n ** k > MAX_SPACE and not self.force:
                raise GuardError(f"{self.n}**{k} assignments exceed the enumeration guard")
            rows = list(itertools.product(range(self.n), repeat=k))
            self._spaces[k] = rows
        return rows

    def _values(self, f, terms, vars, tag):
        """Per-assignment values of a term tuple, indexed like the space."""
        key = (id(f), vars, tag)
        vals = self._tables.get(key)
        if vals is None:
            M = self.M
            vals = []
            for row in self._space(len(vars)):
                s = dict(zip(vars, row))
                vals.append(tuple(eval_term(M, s, t) for t in terms))
            self._tables[key] = vals
        return vals

    def _good(self, f, vars):
        """Mask of assignments satisfying a first-order literal."""
        key = (id(f), vars)
        good = self._tables.get(key)
        if good is None:
            good = 0
            for i, row in enumerate(self._space(len(vars))):
                if tarski_literal(self.M, dict(zip(vars, row)), f):
                    good |= 1 << i
            self._tables[key] = good
        return good

    # -- clauses --------------------------------------------------------

    def _sat(self, f, vars, mask):
        t = type(f)
        if t is Rel or t is Eq:
            return mask & ~self._good(f, vars) == 0
        key = (id(f), vars, mask)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        if t is And:
            out = self._sat(f.left, vars, mask) and self._sat(f.right, vars, mask)
        elif t is Or:
            out = self._or(f, vars, mask)
        elif t is Exists:
            out = self._exists(f, vars, mask)
        elif t is Forall:
            out = self._forall(f, vars, mask)
        elif t is Incl:
            a = self._values(f, f.left, vars, 0)
            b = self._values(f, f.right, vars, 1)
            idx = list(_bits(mask))
            out = {a[i] for i in idx} <= {b[i] for i in idx}
        elif t is Excl:
            a = self._values(f, f.left, vars, 0)
            b = self._values(f, f.right, vars, 1)
            idx = list(_bits(mask))
            out = not ({a[i] for i in idx} & {b[i] for i in idx})
        elif t is Dep:
            a = self._values(f, f.left, vars, 0)
            b = self._values(f, f.right, vars, 1)
            seen = {}
            out = True
            for i in _bits(mask):
                if seen.setdefault(a[i], b[i]) != b[i]:
                    out = False
                    break
        elif t is Indep:
            a = self._values(f, f.left, vars, 0)
            b = self._values(f, f.right, vars, 1)
            idx = list(_bits(mask))
            pairs = {(a[i], b[i]) for i in idx}
            out = all((a[i], b[j]) in pairs for i in idx for j in idx)
        elif t is CIndep:
            c = self._values(f, f.cond, vars, 2)
            a = self._values(f, f.left, vars, 0)
            b = self._values(f, f.right, vars, 1)
            idx = list(_bits(mask))
            triples = {(c[i], a[i], b[i]) for i in idx}
            out = all((c[i], a[i], b[j]) in triples
                      for i in idx for j in idx if c[i] == c[j])
        else:
            raise FormulaError(f"cannot evaluate {type(f).__name__} node")
        self._memo[key] = out
        return out

    def _or(self, f, vars, mask):
        left, right = f.left, f.right
        # trivial covers first: (X, ∅) and (∅, X)
        if self._sat(left, vars, mask) and self._sat(right, vars, 0):
            return True
        if self._sat(right, vars, mask) and self._sat(left, vars, 0):
            return True
        rows = list(_bits(mask))
        m = len(rows)
        if m > self.cover_guard and not self.force:
            raise GuardError(f"disjunction over a team of {m} assignments "
                             f"(guard {self.cover_guard})")
        size = 1 << m
        sub = [0] * size
        for c in range(1, size):
            low = c & -c
            sub[c] = sub[c ^ low] | (1 << rows[low.bit_length() - 1])
        lhs = np.fromiter((self._sat(left, vars, y) for y in sub), dtype=bool, count=size)
        if not lhs.any():
            return False
        rhs = np.fromiter((self._sat(right, vars, z) for z in sub), dtype=bool, count=size)
        # close rhs downwards: up[c] iff some satisfying Z contains c
        for j in range(m):
            view = rhs.reshape(-1, 2, 1 << j)
            view[:, 0, :] |= view[:, 1, :]
        # X = Y ∪ Z  iff  Z ⊇ X \ Y
        return bool(np.any(lhs & rhs[::-1]))

    def _extensions(self, vars, v, mask):
        """New domain and, per assignment in ``mask``, the index of s[m/v] for each m."""
        n = self.n
        if v in vars:
            new_vars = vars
            pos = vars.index(v)
        else:
            new_vars = vars + (v,)
            pos = len(vars)
        space = self._space(len(vars))
        self._space(len(new_vars))
        ext = []
        for i in _bits(mask):
            row = space[i]
            out = []
            for m in range(n):
                new_row = row[:pos] + (m,) + row[pos + 1:]
                idx = 0
                for a in new_row:
                    idx = idx * n + a
                out.append(idx)
            ext.append(out)
        return new_vars, ext

    def _forall(self, f, vars, mask):
        new_vars, ext = self._extensions(vars, f.var, mask)
        full = 0
        for out in ext:
            for idx in out:
                full |= 1 << idx
        return self._sat(f.body, new_vars, full)

    def _exists(self, f, vars, mask):
        n = self.n
        new_vars, ext = self._extensions(vars, f.var, mask)
        if not ext:
            return self._sat(f.body, new_vars, 0)
        if len(ext) * n > self.exists_guard and not self.force:
            raise GuardError(
                f"existential quantifier over a team of {len(ext)} assignments on a "
                f"universe of {n} elements (guard |X|*n <= {self.exists_guard})")
        if self.choice_functions:
            return self._exists_by_choice(f, vars, mask, new_vars)
        subsets = sorted(range(1, 1 << n), key=lambda s: -_popcount(s))
        options = []
        for out in ext:
            opts = []
            for s in subsets:
                y = 0
                for m in _bits(s):
                    y |= 1 << out[m]
                opts.append(y)
            options.append(opts)
        seen = set()
        body = f.body
        for combo in itertools.product(*options):
            y = 0
            for part in combo:
                y |= part
            if y in seen:
                continue
            seen.add(y)
            if self._sat(body, new_vars, y):
                return True
        return False

    def _exists_by_choice(self, f, vars, mask, new_vars):
        """Quantify over choice functions H: X -> P(M) minus {∅} directly."""
        n = self.n
        space = self._space(len(vars))
        X = Team(vars, frozenset(space[i] for i in _bits(mask)))
        rows = sorted(X.rows)
        nonempty = [frozenset(c) for k in range(1, n + 1)
                    for c in itertools.combinations(range(n), k)]
        for choice in itertools.product(nonempty, repeat=len(rows)):
            Y = supplement(X, dict(zip(rows, choice)), f.var).conform(new_vars)
            y = 0
            for r in Y.rows:
                y |= 1 << tuple_index(r, n)
            if self._sat(f.body, new_vars, y):
                return True
        return False


def eval_naive(M: Structure, X: Team, f: Formula, **options) -> bool:
    """M ⊨_X f under lax team semantics (exhaustive search)."""
    return NaiveEvaluator(M, **options).holds(X, f)


# --------------------------------------------------------------------------
# Tarski semantics


def tarski_literal(M: Structure, s: Mapping[str, int], f: Formula) -> bool:
    if isinstance(f, Rel):
        t = tuple(eval_term(M, s, a) for a in f.args)
        return (t in M.lookup(f.name).tuples) != f.neg
    if isinstance(f, Eq):
        return (eval_term(M, s, f.left) == eval_term(M, s, f.right)) != f.neg
    raise FormulaError(f"not a first-order literal: {f!r}")


def eval_tarski(M: Structure, s: Mapping[str, int], f: Formula) -> bool:
    """Classical satisfaction of a first-order formula at one assignment."""
    if isinstance(f, (Rel, Eq)):
        return tarski_literal(M, s, f)
    if isinstance(f, And):
        return eval_tarski(M, s, f.left) and eval_tarski(M, s, f.right)
    if isinstance(f, Or):
        return eval_tarski(M, s, f.left) or eval_tarski(M, s, f.right)
    if isinstance(f, Not):
        return not eval_tarski(M, s, f.body)
    if isinstance(f, Implies):
        return not eval_tarski(M, s, f.left) or eval_tarski(M, s, f.right)
    if isinstance(f, (Exists, Forall)):
        s = dict(s)
        want = isinstance(f, Exists)
        for m in range(M.size):
            s[f.var] = m
            if eval_tarski(M, s, f.body) == want:
                return want
        return not want
    raise FormulaError(f"{type(f).__name__} is not first-order")


def eval_flat(M: Structure, X: Team, f: Formula) -> bool:
    """Pointwise Tarski satisfaction over every assignment of the team."""
    return all(eval_tarski(M, s, f) for s in X.assignments())
