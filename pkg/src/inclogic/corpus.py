"""Curated formula suites shared by the tests, the acceptance runner and the CLI.

All suites are over a signature with one binary relation ``E`` (and a unary
``P`` for the game sentence).  They are chosen so that the brute-force team
evaluator stays within its guards on universes of size 2 for every team
over (x, y), and on size 3 for the sampled teams.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .syntax import Formula, parse_formula, to_nnf


@dataclass(frozen=True)
class Entry:
    name: str
    text: str
    xs: tuple = ("x", "y")      # variables carrying the relation R
    depth: int = 0              # nesting depth of quantifiers

    @property
    def formula(self) -> Formula:
        return _parse(self.text)


@lru_cache(maxsize=None)
def _parse(text):
    return to_nnf(parse_formula(text))


# inclusion-logic formulas with free variables among (x, y); one per line
# of the translation: literals, inclusion atoms, both connectives, both
# quantifiers, a quantifier rebinding x or y, and nested quantifier pairs
INCL_SUITE = (
    Entry("edge", "E(x,y)"),
    Entry("non-edge", "!E(x,y)"),
    Entry("equal", "x = y"),
    Entry("distinct", "x != y"),
    Entry("inc-y-x", "(y) <= (x)"),
    Entry("inc-x-y", "(x) <= (y)"),
    Entry("inc-swap", "(x,y) <= (y,x)"),
    Entry("inc-self", "(x) <= (x)"),
    Entry("inc-diag", "(x,y) <= (x,x)"),
    Entry("cycle-matrix", "(y) <= (x) & E(x,y)"),
    Entry("inc-both", "(y) <= (x) & (x) <= (y)"),
    Entry("or-literals", "E(x,y) | x = y"),
    Entry("or-inclusions", "(x) <= (y) | (y) <= (x)"),
    Entry("or-mixed", "(y) <= (x) | E(y,x)"),
    Entry("and-or", "E(x,y) & (x != y | (y) <= (x))"),
    Entry("exists-succ", "exists z. (E(x,z) & (z) <= (x))", depth=1),
    Entry("forall-succ", "forall z. (!E(x,z) | (z) <= (x))", depth=1),
    Entry("exists-copy", "exists z. (z) <= (x)", depth=1),
    Entry("exists-eq", "exists z. (z = x & (z) <= (y))", depth=1),
    Entry("rebind-x", "exists x. ((x) <= (y) & E(x,y))", depth=1),
    Entry("rebind-y", "forall y. (x) <= (y)", depth=1),
    Entry("forall-or", "forall z. ((z) <= (x) | (z) <= (y))", depth=1),
    Entry("exists-pair-or", "exists z. ((x,z) <= (y,x) | E(z,z))", depth=1),
    Entry("inc-and-exists", "(x) <= (y) & exists z. (E(x,z) & (z) <= (y))", depth=1),
    Entry("exists-exists", "exists z. exists w. (E(z,w) & (w) <= (x) & (z) <= (y))", depth=2),
    Entry("exists-forall", "exists z. ((z) <= (x) & forall w. (!E(z,w) | (w) <= (y)))", depth=2),
    Entry("forall-exists", "forall z. exists w. ((w) <= (x) & E(z,w))", depth=2),
    Entry("exists-forall-or", "exists z. forall w. ((z) <= (x) & (E(w,z) | (w) <= (y)))",
          depth=2),
)

# first-order formulas with R positive; ``xs`` are the columns of R
FO_R_SUITE = (
    Entry("R-x", "R(x)", ("x",)),
    Entry("R-y", "R(y)", ("x",)),
    Entry("R-free", "E(x,y)", ("x",)),
    Entry("R-pair", "R(y,x) & !E(x,y)", ("x", "y")),
    Entry("R-succ", "exists y. (R(y) & E(x,y))", ("x",), depth=1),
    Entry("R-closed", "forall z. (!E(x,z) | R(z))", ("x",), depth=1),
    Entry("R-or", "R(y) | E(x,y)", ("x",)),
    Entry("R-or-both", "R(x) | R(y)", ("x",)),
    Entry("R-compose", "exists z. (E(x,z) & R(z,y))", ("x", "y"), depth=1),
    Entry("R-loops", "forall z. (R(z) | !E(z,z))", ("x",), depth=1),
    Entry("R-cases", "(R(x) & E(x,y)) | (R(y) & x = y)", ("x",)),
    Entry("R-rebind-y", "forall y. (E(x,y) | R(y))", ("x",), depth=1),
    Entry("R-rebind-x", "exists x. (R(x) & E(x,y))", ("x",), depth=1),
    Entry("R-two-or", "(R(x) | R(y)) & (E(x,y) | E(y,x))", ("x",)),
    Entry("R-exists-or", "exists z. ((R(z) | E(z,x)) & E(x,z))", ("x",), depth=1),
    Entry("R-swap-eq", "R(y,x) & x = x", ("x", "y")),
    Entry("R-pair-exists", "exists z. (R(z,y) & E(z,x))", ("x", "y"), depth=1),
)

# first-order formulas over E for the flatness check
FO_SUITE = (
    Entry("fo-edge", "E(x,y)"),
    Entry("fo-not-edge", "!E(y,x)"),
    Entry("fo-eq", "x = y"),
    Entry("fo-or", "E(x,y) | E(y,x)"),
    Entry("fo-and", "E(x,y) & x != y"),
    Entry("fo-or-and", "(E(x,x) | x = y) & !E(y,y)"),
    Entry("fo-exists", "exists z. (E(x,z) & E(z,y))", depth=1),
    Entry("fo-forall", "forall z. (!E(x,z) | E(z,x))", depth=1),
    Entry("fo-exists-or", "exists z. (E(z,x) | z = y)", depth=1),
    Entry("fo-forall-or", "forall z. (E(x,z) | E(z,y) | z = x)", depth=1),
    Entry("fo-rebind", "exists x. (E(x,y) & !E(y,x))", depth=1),
    Entry("fo-exists-forall", "exists z. forall w. (!E(z,w) | w = x)", depth=2),
    Entry("fo-forall-exists", "forall z. exists w. (E(z,w) & w != x)", depth=2),
    Entry("fo-sentence", "exists z. E(z,z)", depth=1),
    Entry("fo-mixed", "E(x,y) | forall z. (z = x | !E(z,y))", depth=1),
)


@dataclass(frozen=True)
class FixpointBody:
    name: str
    text: str
    xs: tuple
    rel: str = "R"

    @property
    def formula(self) -> Formula:
        return _parse(self.text)


FIXPOINT_BODIES = (
    FixpointBody("identity", "R(x)", ("x",)),
    FixpointBody("infinite-path", "exists y. (E(x,y) & R(y))", ("x",)),
    FixpointBody("empty", "x != x", ("x",)),
    FixpointBody("well-founded", "forall y. (!E(x,y) | R(y))", ("x",)),
    FixpointBody("reach-from-loop", "E(x,x) | exists y. (E(y,x) & R(y))", ("x",)),
    FixpointBody("two-step", "exists y. (E(x,y) & forall z. (!E(y,z) | R(z)))", ("x",)),
    FixpointBody("constant-true", "x = x", ("x",)),
    FixpointBody("transitive-closure", "E(x,y) | exists z. (E(x,z) & R(z,y))", ("x", "y")),
    FixpointBody("symmetric-edge", "R(y,x) & E(x,y)", ("x", "y")),
    FixpointBody("reflexive-closure", "x = y | exists z. (E(x,z) & R(z,y))", ("x", "y")),
    FixpointBody("all-paths", "forall z. (!E(x,z) | z = y | R(z,y))", ("x", "y")),
)

MYOPIC_SUITE = (
    Entry("successor-in-R", "forall x. (R(x) -> exists y. (R(y) & E(x,y)))", ("x",), 1),
    Entry("trivial", "forall x. (R(x) -> x = x)", ("x",)),
    Entry("predecessor-in-R", "forall x. (R(x) -> exists y. (R(y) & E(y,x)))", ("x",), 1),
    Entry("loop-or-R", "forall x. (R(x) -> (E(x,x) | R(x)))", ("x",)),
    Entry("proper-successor", "forall x. (R(x) -> exists y. (R(y) & E(x,y) & !E(y,x)))",
          ("x",), 1),
)

NOT_MYOPIC = (
    "forall x. (R(x) -> !R(x))",
    "forall x. (R(x) & E(x,x))",
    "forall x. (R(x,x) -> x = x)",
    "forall x. (R(x) -> E(x,y))",
)

# the two worked example sentences
CYCLE_INCL = "exists x. exists y. ((y) <= (x) & E(x,y))"
CYCLE_PGFP = "exists z. gfp R(x). (exists y. (E(x,y) & R(y))) @ (z)"
AGAP_INCL = ("exists w. ((exists u. (P(u) & (u) <= (w))) & "
             "forall u. (E(w,u) -> exists v. (E(u,v) & (v) <= (w))))")
AGAP_PGFP = ("exists z. (P(z) & gfp W(a). (forall b. (!E(a,b) | "
             "exists c. (E(b,c) & W(c)))) @ (z))")


def parsed(text: str) -> Formula:
    return _parse(text)
