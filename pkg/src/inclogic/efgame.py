"""Ehrenfeucht-Fraïssé game for inclusion logic.

In ``G_n(A, X, B, Y)`` Spoiler makes ``n`` moves, each one of

* split: Spoiler covers ``X = X1 ∪ X2``, Duplicator covers ``Y = Y1 ∪ Y2``,
  Spoiler picks which pair survives;
* supplement: Spoiler picks ``v`` and ``H``, Duplicator answers with ``K``,
  the game moves to ``(X[H/v], Y[K/v])``;
* duplicate: Spoiler picks ``v``, the game moves to ``(X[A/v], Y[B/v])``.

Spoiler wins the final position when some first-order literal or inclusion
atom holds in ``A`` on ``X`` and fails in ``B`` on ``Y``.

:class:`GameSolver` decides the game by backward induction over every move;
:func:`canonical_duplicator` implements the explicit Duplicator strategy for
the empty signature; :func:`enumerate_formulas` produces the bounded formula
family used to cross-check the solver against actual formulas; and
:class:`GameSession` is a small text front end for playing against the
solver.
"""

from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .structures import Relation, Structure, Team, duplicate, supplement, team_relation
from .syntax import (
    Const,
    Eq,
    Exists,
    Forall,
    Formula,
    Incl,
    Or,
    Rel,
    Signature,
    Var,
    conj,
    to_text,
)
from .team_eval import tarski_literal


class GuardExceeded(RuntimeError):
    """Position too large for exhaustive solving (pass ``force=True``)."""


class InvariantViolation(AssertionError):
    """The image-closure invariant of the canonical strategy does not hold."""


class BudgetExceeded(RuntimeError):
    """The formula enumerator would produce more formulas than allowed."""


SPOILER, DUPLICATOR = "Spoiler", "Duplicator"


# --------------------------------------------------------------------------
# positions and moves


@dataclass(frozen=True)
class GamePosition:
    A: Structure
    X: Team
    B: Structure
    Y: Team
    rounds: int

    def __post_init__(self):
        if self.X.vars != self.Y.vars:
            raise ValueError(f"team domains differ: {self.X.vars} vs {self.Y.vars}")
        if self.rounds < 0:
            raise ValueError("negative round count")

    @property
    def vars(self) -> tuple:
        return self.X.vars


@dataclass(frozen=True)
class Split:
    left: Team
    right: Team


@dataclass(frozen=True)
class Supplement:
    var: str
    choice: tuple     # ((row, frozenset of elements), ...) sorted by row

    def as_dict(self) -> dict:
        return dict(self.choice)


@dataclass(frozen=True)
class Duplicate:
    var: str


def make_choice(H) -> tuple:
    return tuple(sorted((row, frozenset(v)) for row, v in dict(H).items()))


@dataclass(frozen=True)
class AtomBudget:
    """Which atoms the final check may use.

    Literals range over relation symbols applied to variables and constants;
    inclusion atoms over duplicate-free variable tuples of length at most
    ``min(|dom|, max_inclusion_length)``.
    """

    max_inclusion_length: int = 3
    include_constants: bool = True


# --------------------------------------------------------------------------
# atoms and the final check


def _symbols(sig):
    """Relation arities and constant names of a structure or signature."""
    if isinstance(sig, Structure):
        return {k: r.arity for k, r in sig.relations.items()}, sorted(sig.constants)
    return dict(sig.relations), sorted(sig.constants)


def atom_family(sig: Structure | Signature, vars: Sequence[str],
                budget: AtomBudget = AtomBudget()) -> list:
    """All candidate atoms over ``vars``, literals first, in a fixed order."""
    vars = tuple(vars)
    rels, consts = _symbols(sig)
    terms = [Var(v) for v in vars]
    if budget.include_constants:
        terms += [Const(c) for c in consts]
    out = []
    for i, a in enumerate(terms):
        for b in terms[i:]:
            out.append(Eq(a, b))
            out.append(Eq(a, b, neg=True))
    for name in sorted(rels):
        k = rels[name]
        for args in itertools.product(terms, repeat=k):
            out.append(Rel(name, args))
            out.append(Rel(name, args, neg=True))
    top = min(len(vars), budget.max_inclusion_length)
    for length in range(1, top + 1):
        tuples = list(itertools.permutations(vars, length))
        for left in tuples:
            for right in tuples:
                out.append(Incl(tuple(map(Var, left)), tuple(map(Var, right))))
    return out


def atom_holds(M: Structure, X: Team, atom: Formula) -> bool:
    if isinstance(atom, Incl):
        return team_relation(M, X, atom.left) <= team_relation(M, X, atom.right)
    return all(tarski_literal(M, s, atom) for s in X.assignments())


def final_witness(A: Structure, X: Team, B: Structure, Y: Team,
                  budget: AtomBudget = AtomBudget()):
    """First atom true in A on X and false in B on Y, or None."""
    for atom in atom_family(A, X.vars, budget):
        if atom_holds(A, X, atom) and not atom_holds(B, Y, atom):
            return atom
    return None


def spoiler_wins_final(p: GamePosition, budget: AtomBudget = AtomBudget()):
    """``(True, atom)`` if the position is won by Spoiler as a final position."""
    w = final_witness(p.A, p.X, p.B, p.Y, budget)
    return w is not None, w


# --------------------------------------------------------------------------
# move enumeration


def _nonempty_subsets(n):
    return [frozenset(c) for k in range(1, n + 1) for c in itertools.combinations(range(n), k)]


def team_splits(X: Team) -> Iterator[tuple]:
    """Every unordered cover ``X = X1 ∪ X2`` (overlap and trivial covers allowed)."""
    rows = sorted(X.rows)
    seen = set()
    for code in itertools.product((0, 1, 2), repeat=len(rows)):
        left = frozenset(r for r, c in zip(rows, code) if c != 1)
        right = frozenset(r for r, c in zip(rows, code) if c != 0)
        key = frozenset((left, right))
        if key in seen:
            continue
        seen.add(key)
        yield Team(X.vars, left), Team(X.vars, right)


def supplements(X: Team, v: str, n: int) -> Iterator[tuple]:
    """Pairs ``(H, X[H/v])`` with distinct results, H over nonempty subsets of range(n)."""
    rows = sorted(X.rows)
    options = _nonempty_subsets(n)
    seen = set()
    for combo in itertools.product(options, repeat=len(rows)):
        H = dict(zip(rows, combo))
        Z = supplement(X, H, v)
        if Z.rows in seen:
            continue
        seen.add(Z.rows)
        yield make_choice(H), Z


# --------------------------------------------------------------------------
# solver


@dataclass
class Solution:
    winner: str
    move: object = None          # Spoiler's winning first move, if any
    witness: Formula | None = None   # distinguishing atom when rounds == 0


class GameSolver:
    """Exact backward induction for one pair of structures.

    ``pool`` is the set of variables Spoiler may supplement or duplicate;
    by default the team domain plus three fresh names.
    """

    def __init__(self, A: Structure, B: Structure, pool: Sequence[str] | None = None,
                 budget: AtomBudget = AtomBudget(), force: bool = False):
        self.A, self.B = A, B
        self.pool = tuple(pool) if pool is not None else None
        self.budget = budget
        self.force = force
        self.memo: dict = {}
        self._images: dict = {}

    @staticmethod
    def default_pool(vars: Sequence[str], fresh: int = 3) -> tuple:
        vars = tuple(vars)
        extra = []
        i = 1
        while len(extra) < fresh:
            name = f"v{i}"
            if name not in vars:
                extra.append(name)
            i += 1
        return vars + tuple(extra)

    def check_guard(self, p: GamePosition):
        if self.force:
            return
        problems = []
        if len(p.X) > 4 or len(p.Y) > 4:
            problems.append("teams larger than 4")
        if p.A.size > 3 or p.B.size > 3:
            problems.append("universes larger than 3")
        if p.rounds > 2:
            problems.append("more than 2 rounds")
        if problems:
            raise GuardExceeded("position exceeds the solver guard: " + ", ".join(problems))

    def _pool(self, X):
        if self.pool is None:
            self.pool = self.default_pool(X.vars)
        return self.pool

    # -- core -------------------------------------------------------------

    def spoiler_wins(self, X: Team, Y: Team, i: int) -> bool:
        key = (X, Y, i)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        if i == 0:
            out = final_witness(self.A, X, self.B, Y, self.budget) is not None
        else:
            out = any(self.move_wins(X, Y, i, m) for m in self.spoiler_moves(X))
        self.memo[key] = out
        return out

    def spoiler_moves(self, X: Team) -> Iterator:
        pool = self._pool(X)
        for v in pool:
            yield Duplicate(v)
        for left, right in team_splits(X):
            yield Split(left, right)
        for v in pool:
            for H, _ in supplements(X, v, self.A.size):
                yield Supplement(v, H)

    def right_images(self, Y: Team, v: str) -> list:
        """Distinct ``(K, Y[K/v])`` pairs."""
        key = (Y, v)
        hit = self._images.get(key)
        if hit is None:
            hit = list(supplements(Y, v, self.B.size))
            self._images[key] = hit
        return hit

    def _split_tables(self, X1, X2, Y, i):
        rows = sorted(Y.rows)
        m = len(rows)
        subs = []
        for mask in range(1 << m):
            subs.append(Team(Y.vars, frozenset(r for j, r in enumerate(rows) if mask >> j & 1)))
        ok1 = np.array([not self.spoiler_wins(X1, s, i - 1) for s in subs], dtype=bool)
        ok2 = np.array([not self.spoiler_wins(X2, s, i - 1) for s in subs], dtype=bool)
        return subs, ok1, ok2

    @staticmethod
    def _superset_closure(ok):
        up = ok.copy()
        m = int(len(up)).bit_length() - 1
        for j in range(m):
            view = up.reshape(-1, 2, 1 << j)
            view[:, 0, :] |= view[:, 1, :]
        return up

    def move_wins(self, X: Team, Y: Team, i: int, move) -> bool:
        """True iff Spoiler wins by playing ``move`` (then playing on optimally)."""
        if isinstance(move, Duplicate):
            return self.spoiler_wins(duplicate(X, move.var, self.A),
                                     duplicate(Y, move.var, self.B), i - 1)
        if isinstance(move, Split):
            _, ok1, ok2 = self._split_tables(move.left, move.right, Y, i)
            if not ok1.any() or not ok2.any():
                return True
            up2 = self._superset_closure(ok2)
            full = len(ok1) - 1
            masks = np.nonzero(ok1)[0]
            return not bool(up2[full ^ masks].any())
        if isinstance(move, Supplement):
            Xn = supplement(X, move.as_dict(), move.var)
            return all(self.spoiler_wins(Xn, Yn, i - 1) for _, Yn in self.right_images(Y, move.var))
        raise TypeError(f"not a Spoiler move: {move!r}")

    # -- strategies -------------------------------------------------------

    def winning_move(self, X: Team, Y: Team, i: int):
        for m in self.spoiler_moves(X):
            if self.move_wins(X, Y, i, m):
                return m
        return None

    def split_response(self, X: Team, Y: Team, i: int, move: Split) -> tuple:
        """A Duplicator cover of Y that keeps both sides Duplicator-winning if possible."""
        subs, ok1, ok2 = self._split_tables(move.left, move.right, Y, i)
        full = len(subs) - 1
        for m1 in np.nonzero(ok1)[0]:
            for m2 in np.nonzero(ok2)[0]:
                if m1 | m2 == full:
                    return subs[m1], subs[m2]
        return Y, Y

    def supplement_response(self, X: Team, Y: Team, i: int, move: Supplement) -> tuple:
        """``(K, Y[K/v])`` avoiding a Spoiler win if possible."""
        Xn = supplement(X, move.as_dict(), move.var)
        images = self.right_images(Y, move.var)
        for K, Yn in images:
            if not self.spoiler_wins(Xn, Yn, i - 1):
                return K, Yn
        return images[0]

    def pick_side(self, pairs, i: int) -> int:
        """Side (1 or 2) Spoiler should keep after a split."""
        for side, (Xj, Yj) in enumerate(pairs, start=1):
            if self.spoiler_wins(Xj, Yj, i - 1):
                return side
        return 1

    def solve(self, p: GamePosition) -> Solution:
        self.check_guard(p)
        self._pool(p.X)
        if p.rounds == 0:
            won, w = spoiler_wins_final(p, self.budget)
            return Solution(SPOILER if won else DUPLICATOR, None, w)
        if self.spoiler_wins(p.X, p.Y, p.rounds):
            return Solution(SPOILER, self.winning_move(p.X, p.Y, p.rounds))
        return Solution(DUPLICATOR)

    def strategy_tree(self, X: Team, Y: Team, i: int, max_nodes: int = 2000) -> dict:
        """The winner's strategy from ``(X, Y)`` as nested dicts of text."""
        budget = [max_nodes]

        def node(X, Y, i):
            budget[0] -= 1
            if budget[0] < 0:
                raise GuardExceeded(f"strategy tree larger than {max_nodes} nodes")
            pos = {"left": _rows_text(X), "right": _rows_text(Y), "rounds": i}
            if i == 0:
                w = final_witness(self.A, X, self.B, Y, self.budget)
                pos["winner"] = SPOILER if w is not None else DUPLICATOR
                if w is not None:
                    pos["witness"] = to_text(w)
                return pos
            if self.spoiler_wins(X, Y, i):
                pos["winner"] = SPOILER
                move = self.winning_move(X, Y, i)
                pos["move"] = format_move(move, X)
                pos["continuations"] = list(self._spoiler_branches(X, Y, i, move, node))
            else:
                pos["winner"] = DUPLICATOR
                pos["replies"] = [self._duplicator_branch(X, Y, i, m, node)
                                  for m in self.spoiler_moves(X)]
            return pos

        return node(X, Y, i)

    def _spoiler_branches(self, X, Y, i, move, node):
        if isinstance(move, Duplicate):
            yield node(duplicate(X, move.var, self.A), duplicate(Y, move.var, self.B), i - 1)
        elif isinstance(move, Split):
            subs = [Team(Y.vars, frozenset(c)) for k in range(len(Y) + 1)
                    for c in itertools.combinations(sorted(Y.rows), k)]
            for Y1 in subs:
                for Y2 in subs:
                    if (Y1.rows | Y2.rows) != Y.rows or Y1.rows > Y2.rows:
                        continue
                    pairs = [(move.left, Y1), (move.right, Y2)]
                    side = self.pick_side(pairs, i)
                    sub = node(*pairs[side - 1], i - 1)
                    sub["response"] = f"{_rows_text(Y1)} {_rows_text(Y2)}"
                    sub["pick"] = side
                    yield sub
        else:
            Xn = supplement(X, move.as_dict(), move.var)
            for K, Yn in self.right_images(Y, move.var):
                sub = node(Xn, Yn, i - 1)
                sub["response"] = _choice_text(K)
                yield sub

    def _duplicator_branch(self, X, Y, i, move, node):
        if isinstance(move, Duplicate):
            sub = node(duplicate(X, move.var, self.A), duplicate(Y, move.var, self.B), i - 1)
        elif isinstance(move, Split):
            Y1, Y2 = self.split_response(X, Y, i, move)
            pairs = [(move.left, Y1), (move.right, Y2)]
            sub = {"response": f"{_rows_text(Y1)} {_rows_text(Y2)}",
                   "sides": [node(Xj, Yj, i - 1) for Xj, Yj in pairs]}
        else:
            K, Yn = self.supplement_response(X, Y, i, move)
            sub = node(supplement(X, move.as_dict(), move.var), Yn, i - 1)
            sub["response"] = _choice_text(K)
        return {"move": format_move(move, X), "result": sub}


def solve(p: GamePosition, budget: AtomBudget = AtomBudget(),
          pool: Sequence[str] | None = None, force: bool = False) -> Solution:
    return GameSolver(p.A, p.B, pool, budget, force).solve(p)


# --------------------------------------------------------------------------
# the canonical Duplicator for the empty signature


def injections(A: Structure | int, B: Structure | int) -> list:
    """All one-to-one maps range(|A|) -> range(|B|), as tuples of images."""
    a = A if isinstance(A, int) else A.size
    b = B if isinstance(B, int) else B.size
    return list(itertools.permutations(range(b), a))


def _image(pi, row):
    return tuple(pi[x] for x in row)


def image_closure(X: Team, A, B) -> Team:
    """⋃ {π[X] : π one-to-one from A into B}."""
    return Team(X.vars, frozenset(_image(pi, r) for pi in injections(A, B) for r in X.rows))


def _empty_signature(M: Structure) -> bool:
    return not (M.relations or M.functions or M.constants or M.params)


def invariant_holds(p: GamePosition) -> bool:
    return p.Y.rows == image_closure(p.X, p.A, p.B).rows


def canonical_duplicator(p: GamePosition, move):
    """Duplicator's reply keeping ``Y`` equal to the image closure of ``X``.

    Returns ``(Y1, Y2)`` for a split, the choice function ``K`` (as a sorted
    tuple) for a supplement, and ``None`` for a duplication.  The successor
    positions are checked to satisfy the invariant again.
    """
    if not (_empty_signature(p.A) and _empty_signature(p.B)):
        raise ValueError("the canonical strategy needs the empty signature")
    if p.A.size > p.B.size:
        raise ValueError("the canonical strategy needs |A| <= |B|")
    if not invariant_holds(p):
        raise InvariantViolation("position is not image-closed")
    pis = injections(p.A, p.B)
    if isinstance(move, Split):
        Y1 = Team(p.vars, frozenset(_image(pi, r) for pi in pis for r in move.left.rows))
        Y2 = Team(p.vars, frozenset(_image(pi, r) for pi in pis for r in move.right.rows))
        if (Y1.rows | Y2.rows) != p.Y.rows:
            raise InvariantViolation("split response does not cover Y")
        for Xj, Yj in ((move.left, Y1), (move.right, Y2)):
            if Yj.rows != image_closure(Xj, p.A, p.B).rows:
                raise InvariantViolation("split successor not image-closed")
        return Y1, Y2
    if isinstance(move, Supplement):
        H = move.as_dict()
        K = {r: set() for r in p.Y.rows}
        for pi in pis:
            for s in p.X.rows:
                t = _image(pi, s)
                K[t].update(pi[a] for a in H[s])
        Xn = supplement(p.X, H, move.var)
        Yn = supplement(p.Y, K, move.var)
        if Yn.rows != image_closure(Xn, p.A, p.B).rows:
            raise InvariantViolation("supplement successor not image-closed")
        return make_choice(K)
    if isinstance(move, Duplicate):
        Xn = duplicate(p.X, move.var, p.A)
        Yn = duplicate(p.Y, move.var, p.B)
        if Yn.rows != image_closure(Xn, p.A, p.B).rows:
            raise InvariantViolation("duplication successor not image-closed")
        return None
    raise TypeError(f"not a Spoiler move: {move!r}")


def apply_canonical(p: GamePosition, move, side: int = 1) -> GamePosition:
    """Successor position when Duplicator answers ``move`` canonically."""
    reply = canonical_duplicator(p, move)
    if isinstance(move, Split):
        Xj, Yj = (move.left, reply[0]) if side == 1 else (move.right, reply[1])
        return GamePosition(p.A, Xj, p.B, Yj, p.rounds - 1)
    if isinstance(move, Supplement):
        return GamePosition(p.A, supplement(p.X, move.as_dict(), move.var), p.B,
                            supplement(p.Y, dict(reply), move.var), p.rounds - 1)
    return GamePosition(p.A, duplicate(p.X, move.var, p.A), p.B,
                        duplicate(p.Y, move.var, p.B), p.rounds - 1)


def cardinality_preset(n: int) -> GamePosition:
    """``A = {0..n-1}``, ``B = {0..n}`` over the empty signature, teams {∅}, n rounds."""
    return GamePosition(Structure(n), Team.unit(), Structure(n + 1), Team.unit(), n)


def predicate_preset(rounds: int = 1) -> GamePosition:
    """One-element structures differing only in a unary ``P``: P true left, empty right."""
    A = Structure(1, {"P": Relation(1, frozenset({(0,)}))})
    B = Structure(1, {"P": Relation(1, frozenset())})
    return GamePosition(A, Team.unit(), B, Team.unit(), rounds)


PRESETS = {"efex": cardinality_preset, "patom": predicate_preset}


@dataclass
class ReplayReport:
    positions: int = 0
    moves: int = 0
    sampled: bool = False


def replay_canonical(n: int, exhaustive_rounds: int | None = None, samples: int = 200,
                     seed: int = 0, pool_fresh: int = 1) -> ReplayReport:
    """Play every Spoiler move against :func:`canonical_duplicator` on the preset.

    In rounds beyond ``exhaustive_rounds`` only ``samples`` random Spoiler
    moves per position are tried.  Spoiler's variable choice ranges over the
    current domain plus ``pool_fresh`` unused names.  Raises
    :class:`InvariantViolation` on failure, or ``AssertionError`` if Spoiler
    wins a final position.
    """
    if exhaustive_rounds is None:
        exhaustive_rounds = n
    rng = random.Random(seed)
    report = ReplayReport()
    start = cardinality_preset(n)
    A, B = start.A, start.B
    frontier = {(start.X, start.Y)}
    for rnd in range(1, n + 1):
        nxt = set()
        for X, Y in sorted(frontier, key=_pair_key):
            p = GamePosition(A, X, B, Y, n - rnd + 1)
            report.positions += 1
            if not invariant_holds(p):
                raise InvariantViolation(f"round {rnd}: position not image-closed")
            pool = GameSolver.default_pool(p.vars, pool_fresh)
            if rnd <= exhaustive_rounds:
                moves = list(_all_moves(X, pool, A.size))
            else:
                report.sampled = True
                moves = [_random_move(X, pool, A.size, rng) for _ in range(samples)]
            for move in moves:
                report.moves += 1
                sides = (1, 2) if isinstance(move, Split) else (1,)
                for side in sides:
                    q = apply_canonical(p, move, side)
                    nxt.add((q.X, q.Y))
        frontier = nxt
    for X, Y in frontier:
        p = GamePosition(A, X, B, Y, 0)
        report.positions += 1
        if not invariant_holds(p):
            raise InvariantViolation("final position not image-closed")
        won, w = spoiler_wins_final(p)
        if won:
            raise AssertionError(f"Spoiler wins a final position with {to_text(w)}")
    return report


def _pair_key(pair):
    X, Y = pair
    return (X.vars, sorted(X.rows), sorted(Y.rows))


def _all_moves(X, pool, n):
    for v in pool:
        yield Duplicate(v)
    for left, right in team_splits(X):
        yield Split(left, right)
    for v in pool:
        for H, _ in supplements(X, v, n):
            yield Supplement(v, H)


def _random_move(X, pool, n, rng):
    kind = rng.randrange(3)
    rows = sorted(X.rows)
    if kind == 0:
        return Duplicate(rng.choice(pool))
    if kind == 1:
        code = [rng.randrange(3) for _ in rows]
        left = frozenset(r for r, c in zip(rows, code) if c != 1)
        right = frozenset(r for r, c in zip(rows, code) if c != 0)
        return Split(Team(X.vars, left), Team(X.vars, right))
    options = _nonempty_subsets(n)
    return Supplement(rng.choice(pool), make_choice({r: rng.choice(options) for r in rows}))


# --------------------------------------------------------------------------
# bounded formula enumeration


@dataclass(frozen=True)
class FormulaBudget:
    """Bounds for :func:`enumerate_formulas`.

    ``atoms`` bounds the atom family (as in the final check).  At rank 0
    formulas are conjunctions of distinct atoms, at most ``max_conjuncts``
    of them (None: no bound).  At higher ranks ``top_conjuncts`` bounds the
    conjunctions of formulas of that rank (1: no conjunctions).
    ``max_formulas`` caps the total output.
    """

    atoms: AtomBudget = AtomBudget()
    max_conjuncts: int | None = None
    top_conjuncts: int = 1
    max_formulas: int = 200_000


def enumerate_formulas(sig: Signature | Structure, vars: Sequence[str], max_rank: int,
                       budget: FormulaBudget = FormulaBudget(),
                       pool: Sequence[str] | None = None) -> list:
    """Inclusion-logic formulas of rank ``<= max_rank`` with free variables in ``vars``.

    Quantified variables come from ``pool`` (default: ``vars`` itself).
    Conjunctions are sets (so commutative and idempotent duplicates are
    omitted) and disjunctions are unordered pairs.  The result is a list in
    a fixed order; :class:`BudgetExceeded` is raised past ``max_formulas``.
    """
    symbols = sig
    vars = tuple(vars)
    pool = tuple(pool) if pool is not None else vars
    count = [0]
    cache: dict = {}

    def bump(k):
        count[0] += k
        if count[0] > budget.max_formulas:
            raise BudgetExceeded(f"more than {budget.max_formulas} formulas")

    def conjunctions(items, width):
        out = []
        top = len(items) if width is None else min(width, len(items))
        for k in range(1, top + 1):
            for combo in itertools.combinations(items, k):
                out.append(conj(*combo))
        return out

    def level(free, r):
        """Formulas of rank exactly r (r = 0: conjunctions of atoms)."""
        free = tuple(sorted(set(free), key=lambda v: (v not in vars, pool.index(v)
                                                       if v in pool else -1, v)))
        key = (free, r)
        if key in cache:
            return cache[key]
        if r == 0:
            atoms = atom_family(symbols, free, budget.atoms)
            out = conjunctions(atoms, budget.max_conjuncts)
        else:
            below = upto(free, r - 1)
            base = []
            for i, f in enumerate(below):
                for g in below[i:]:
                    base.append(Or(f, g))
            for v in pool:
                inner = upto(free + ((v,) if v not in free else ()), r - 1)
                base.extend(Exists(v, f) for f in inner)
                base.extend(Forall(v, f) for f in inner)
            out = conjunctions(base, budget.top_conjuncts)
        bump(len(out))
        cache[key] = out
        return out

    def upto(free, r):
        out = []
        for k in range(r + 1):
            out.extend(level(free, k))
        return out

    return upto(vars, max_rank)


# --------------------------------------------------------------------------
# text formats for moves and positions


def _rows_text(X: Team) -> str:
    rows = sorted(X.rows)
    return "{" + ", ".join("(" + ",".join(map(str, r)) + ")" for r in rows) + "}"


def _choice_text(K) -> str:
    items = []
    for row, vals in (K if isinstance(K, tuple) else make_choice(K)):
        items.append("(" + ",".join(map(str, row)) + "):{" + ",".join(map(str, sorted(vals))) + "}")
    return "{" + ", ".join(items) + "}"


def _ids(X: Team, Z: Team) -> str:
    rows = sorted(X.rows)
    return "{" + ",".join(str(rows.index(r)) for r in sorted(Z.rows)) + "}"


def format_move(move, X: Team | None = None) -> str:
    if isinstance(move, Duplicate):
        return f"dup {move.var}"
    if isinstance(move, Split):
        if X is not None:
            return f"split {_ids(X, move.left)} {_ids(X, move.right)}"
        return f"split {_rows_text(move.left)} {_rows_text(move.right)}"
    if isinstance(move, Supplement):
        if X is not None:
            rows = sorted(X.rows)
            body = ", ".join(f"{rows.index(r)}:{{{','.join(map(str, sorted(v)))}}}"
                             for r, v in move.choice)
            return f"supp {move.var} {{{body}}}"
        return f"supp {move.var} {_choice_text(move.choice)}"
    return repr(move)


def format_position(p: GamePosition) -> str:
    lines = [f"rounds left: {p.rounds}   variables: ({', '.join(p.vars)})"]
    for label, M, T in (("A", p.A, p.X), ("B", p.B, p.Y)):
        lines.append(f"{label}: universe {{{', '.join(map(str, range(M.size)))}}}")
        rows = sorted(T.rows)
        if not rows:
            lines.append("   (empty team)")
        for i, r in enumerate(rows):
            lines.append(f"  {i}: " + ", ".join(f"{v}={a}" for v, a in zip(T.vars, r))
                         if r else f"  {i}: (empty assignment)")
    return "\n".join(lines)


class MoveSyntaxError(ValueError):
    pass


_SET = r"\{([^{}]*)\}"
_SPLIT = re.compile(r"^split\s*(?:L\s*:)?\s*" + _SET + r"\s*" + _SET + r"\s*$")
_RESP_SPLIT = re.compile(r"^resp\s*:?\s*" + _SET + r"\s*" + _SET + r"\s*$")
_SUPP = re.compile(r"^supp\s+([A-Za-z_]\w*)\s*\{(.*)\}\s*$")
_RESP_SUPP = re.compile(r"^resp\s*:?\s*\{(.*:.*)\}\s*$")
_DUP = re.compile(r"^dup\s+([A-Za-z_]\w*)\s*$")
_PICK = re.compile(r"^pick\s+([12])\s*$")
_ITEM = re.compile(r"\s*(\d+)\s*:\s*\{([^{}]*)\}\s*")


def _int_set(text, limit, what):
    parts = [t.strip() for t in text.split(",") if t.strip()]
    try:
        vals = {int(t) for t in parts}
    except ValueError:
        raise MoveSyntaxError(f"{what}: expected numbers, got {text!r}") from None
    bad = [v for v in vals if not 0 <= v < limit]
    if bad:
        raise MoveSyntaxError(f"{what}: {sorted(bad)} out of range 0..{limit - 1}")
    return vals


def _subteam(T, text):
    rows = sorted(T.rows)
    ids = _int_set(text, len(rows), "assignment ids")
    return Team(T.vars, frozenset(rows[i] for i in ids))


def _choice(T, body, n):
    rows = sorted(T.rows)
    H = {}
    pos = 0
    body = body.strip()
    while pos < len(body):
        m = _ITEM.match(body, pos)
        if not m:
            raise MoveSyntaxError(f"cannot read choice function near {body[pos:]!r}")
        i = int(m.group(1))
        if not 0 <= i < len(rows):
            raise MoveSyntaxError(f"assignment id {i} out of range")
        vals = _int_set(m.group(2), n, "elements")
        if not vals:
            raise MoveSyntaxError("choice sets must be nonempty")
        H[rows[i]] = frozenset(vals)
        pos = m.end()
        if pos < len(body):
            if body[pos] != ",":
                raise MoveSyntaxError(f"expected ',' near {body[pos:]!r}")
            pos += 1
    if set(H) != set(rows):
        raise MoveSyntaxError("the choice function must cover every assignment")
    return make_choice(H)


def parse_spoiler_move(text: str, X: Team, n: int):
    text = text.strip()
    if m := _SPLIT.match(text):
        left, right = _subteam(X, m.group(1)), _subteam(X, m.group(2))
        if (left.rows | right.rows) != X.rows:
            raise MoveSyntaxError("the two parts must cover the team")
        return Split(left, right)
    if m := _SUPP.match(text):
        return Supplement(m.group(1), _choice(X, m.group(2), n))
    if m := _DUP.match(text):
        return Duplicate(m.group(1))
    raise MoveSyntaxError("expected  split {ids} {ids}  |  supp v {id:{elems},...}  |  dup v")


def parse_split_response(text: str, Y: Team) -> tuple:
    m = _RESP_SPLIT.match(text.strip())
    if not m:
        raise MoveSyntaxError("expected  resp {ids} {ids}")
    Y1, Y2 = _subteam(Y, m.group(1)), _subteam(Y, m.group(2))
    if (Y1.rows | Y2.rows) != Y.rows:
        raise MoveSyntaxError("the two parts must cover the team")
    return Y1, Y2


def parse_supplement_response(text: str, Y: Team, n: int) -> tuple:
    m = _RESP_SUPP.match(text.strip())
    if not m:
        raise MoveSyntaxError("expected  resp {id:{elems},...}")
    return _choice(Y, m.group(1), n)


def parse_pick(text: str) -> int:
    m = _PICK.match(text.strip())
    if not m:
        raise MoveSyntaxError("expected  pick 1  or  pick 2")
    return int(m.group(1))


# --------------------------------------------------------------------------
# interactive play


class ReplayExhausted(RuntimeError):
    """A transcript ended before the game did."""


@dataclass
class GameSession:
    """Human against machine.  The machine plays from the solver.

    For the empty signature with an image-closed start the machine
    Duplicator uses :func:`canonical_duplicator` instead.
    """

    position: GamePosition
    human: str = SPOILER
    read: Callable[[str], str] = input
    write: Callable[[str], None] = print
    solver: GameSolver | None = None
    canonical: bool | None = None
    transcript: list = field(default_factory=list)

    def __post_init__(self):
        if self.human not in (SPOILER, DUPLICATOR):
            raise ValueError("human side must be Spoiler or Duplicator")
        if self.solver is None:
            self.solver = GameSolver(self.position.A, self.position.B)
        if self.solver.pool is None:
            self.solver.pool = GameSolver.default_pool(self.position.vars)
        if self.canonical is None:
            p = self.position
            self.canonical = (_empty_signature(p.A) and _empty_signature(p.B)
                              and p.A.size <= p.B.size and invariant_holds(p))

    def _ask(self, prompt, parse):
        while True:
            text = self.read(prompt)
            if text is None:
                raise ReplayExhausted("transcript ended before the game")
            text = text.strip()
            if not text or text.startswith("#"):
                continue
            try:
                out = parse(text)
            except MoveSyntaxError as exc:
                self.write(f"  ? {exc}")
                continue
            self.transcript.append(text)
            return out

    def play(self) -> str:
        p = self.position
        solver = self.solver
        while p.rounds > 0:
            self.write(format_position(p))
            X, Y, i = p.X, p.Y, p.rounds
            if self.human == SPOILER:
                move = self._ask("spoiler> ", lambda t: parse_spoiler_move(t, X, p.A.size))
            else:
                move = solver.winning_move(X, Y, i) or next(solver.spoiler_moves(X))
                self.write(f"Spoiler: {format_move(move, X)}")
            if isinstance(move, Duplicate):
                p = GamePosition(p.A, duplicate(X, move.var, p.A), p.B,
                                 duplicate(Y, move.var, p.B), i - 1)
            elif isinstance(move, Split):
                if self.human == DUPLICATOR:
                    Y1, Y2 = self._ask("duplicator> ", lambda t: parse_split_response(t, Y))
                elif self.canonical:
                    Y1, Y2 = canonical_duplicator(p, move)
                else:
                    Y1, Y2 = solver.split_response(X, Y, i, move)
                if self.human == SPOILER:
                    self.write(f"Duplicator: resp {_ids(Y, Y1)} {_ids(Y, Y2)}")
                pairs = [(move.left, Y1), (move.right, Y2)]
                if self.human == SPOILER:
                    side = self._ask("spoiler> ", parse_pick)
                else:
                    side = solver.pick_side(pairs, i)
                    self.write(f"Spoiler: pick {side}")
                Xj, Yj = pairs[side - 1]
                p = GamePosition(p.A, Xj, p.B, Yj, i - 1)
            else:
                if self.human == DUPLICATOR:
                    K = self._ask("duplicator> ",
                                  lambda t: parse_supplement_response(t, Y, p.B.size))
                elif self.canonical:
                    K = canonical_duplicator(p, move)
                else:
                    K, _ = solver.supplement_response(X, Y, i, move)
                if self.human == SPOILER:
                    self.write(f"Duplicator: resp {_choice_ids(Y, K)}")
                p = GamePosition(p.A, supplement(X, move.as_dict(), move.var), p.B,
                                 supplement(Y, dict(K), move.var), i - 1)
        self.write(format_position(p))
        won, w = spoiler_wins_final(p, solver.budget)
        if won:
            self.write(f"winner: {SPOILER} (witness: {to_text(w)})")
            return SPOILER
        self.write(f"winner: {DUPLICATOR}")
        return DUPLICATOR


def _choice_ids(Y, K):
    rows = sorted(Y.rows)
    return "{" + ", ".join(f"{rows.index(r)}:{{{','.join(map(str, sorted(v)))}}}"
                           for r, v in K) + "}"


def replay_lines(lines: Iterable[str]) -> Callable[[str], str | None]:
    """A ``read`` function for :class:`GameSession` fed from transcript lines."""
    it = iter(list(lines))

    def read(prompt):
        return next(it, None)

    return read
