"""Evaluation of first-order formulas with gfp/lfp operators on finite structures.

A formula is compiled once (:func:`.program.compile_formula`) and run on a
kernel machine.  The compiled extension ``_ckernel`` is used when it was
built; otherwise, or when the environment variable ``INCLOGIC_PURE`` is set
to a non-empty value other than ``0``, the pure-Python ``_pykernel`` runs
instead.  Both give identical results.

Fixed points are computed by iteration from the top (gfp) or the bottom
(lfp).  Inner fixed points are recomputed whenever a relation they read
changes, and cached per assignment of their free first-order variables.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from ..structures import Relation, Structure, StructureError, UnboundVariable
from ..syntax import Fix, Formula, FormulaError, PositivityError, Var, check_positive, free_vars
from . import _pykernel
from .program import Program, compile_formula

try:
    from . import _ckernel
except ImportError:  # extension not built
    _ckernel = None


def _pure_requested() -> bool:
    return os.environ.get("INCLOGIC_PURE", "") not in ("", "0")


def available_backends() -> tuple:
    return ("python",) if _ckernel is None else ("compiled", "python")


def default_backend() -> str:
    if _ckernel is None or _pure_requested():
        return "python"
    return "compiled"


def _machine_class(backend):
    backend = backend or default_backend()
    if backend == "compiled":
        if _ckernel is None:
            raise RuntimeError("compiled kernel is not built; reinstall with Cython available")
        return _ckernel.Machine
    if backend == "python":
        return _pykernel.Machine
    raise ValueError(f"unknown backend {backend!r}")


@dataclass(frozen=True)
class FixpointContext:
    """A structure plus bindings of second-order relation variables.

    Later bindings shadow earlier ones and the structure's own symbols.
    """

    structure: Structure
    bindings: Mapping[str, Relation] = field(default_factory=dict)
    backend: str | None = None

    def bind(self, **rels: Relation) -> "FixpointContext":
        new = dict(self.bindings)
        new.update(rels)
        return FixpointContext(self.structure, new, self.backend)

    def relation(self, name: str) -> Relation:
        if name in self.bindings:
            return self.bindings[name]
        return self.structure.lookup(name)

    def relation_arities(self) -> dict:
        M = self.structure
        out = {k: r.arity for k, r in M.relations.items()}
        out.update({k: r.arity for k, r in M.params.items()})
        out.update({k: r.arity for k, r in self.bindings.items()})
        return out


class FixpointEvaluator:
    """A compiled formula loaded with the relations of one context."""

    def __init__(self, ctx: FixpointContext, f: Formula, extra_vars: Sequence[str] = ()):
        self.ctx = ctx
        self.formula = f
        M = ctx.structure
        fun_arities = {k: M.function_arity(k) for k in M.functions}
        self.program: Program = compile_formula(f, ctx.relation_arities(), fun_arities,
                                                extra_vars)
        self.free = free_vars(f)
        n = M.size
        self.machine = _machine_class(ctx.backend)(self.program, n)
        for name, slot in self.program.rel_slots.items():
            self.machine.set_relation(slot, ctx.relation(name).to_dense(n))
        for name, slot in self.program.fun_slots.items():
            table = M.functions[name]
            k = M.function_arity(name)
            dense = [0] * (n ** k)
            for args, value in table.items():
                idx = 0
                for a in args:
                    idx = idx * n + a
                dense[idx] = value
            self.machine.set_function(slot, dense)
        for name, slot in self.program.const_slots.items():
            if name not in M.constants:
                raise StructureError(f"constant {name!r} is not interpreted")
            self.machine.set_constant(slot, M.constants[name])

    def rebind(self, **rels: Relation) -> None:
        """Replace the value of free relation symbols without recompiling."""
        n = self.ctx.structure.size
        for name, r in rels.items():
            slot = self.program.rel_slots.get(name)
            if slot is None:
                continue
            if r.arity != int(self.program.rel_arity[slot]):
                raise FormulaError(f"{name} has arity {self.program.rel_arity[slot]}, "
                                   f"got a relation of arity {r.arity}")
            self.machine.set_relation(slot, r.to_dense(n))

    def _env(self, s: Mapping[str, int]) -> list:
        missing = [v for v in self.free if v not in s]
        if missing:
            raise UnboundVariable(", ".join(missing))
        env = [0] * max(self.program.nvars, 1)
        for name, slot in self.program.var_slots.items():
            if name in s:
                env[slot] = s[name]
        return env

    def holds(self, s: Mapping[str, int] | None = None) -> bool:
        return self.machine.holds(self._env(s or {}))

    def holds_all(self, team) -> bool:
        """True iff the formula holds at every assignment of ``team``."""
        return all(self.holds(s) for s in team.assignments())

    def satisfying(self, xs: Sequence[str], s: Mapping[str, int] | None = None) -> Relation:
        """{a : the formula holds at s[a/xs]}."""
        s = dict(s or {})
        for x in xs:
            s.setdefault(x, 0)
        slots = [self.program.var_slots[x] for x in xs]
        data = self.machine.satisfying(slots, self._env(s))
        return Relation.from_dense(self.ctx.structure.size, len(xs), data)

    def stats(self) -> dict:
        return self.machine.stats()


def _check_operator(body, r, xs):
    xs = tuple(xs)
    if len(set(xs)) != len(xs) or not xs:
        raise FormulaError("bound variable tuple must be nonempty and duplicate-free")
    if not check_positive(body, r):
        raise PositivityError(f"{r} occurs negatively in the operator body")
    return xs


def gamma(ctx: FixpointContext, body: Formula, r: str, xs: Sequence[str], P: Relation,
          s: Mapping[str, int] | None = None) -> Relation:
    """One application of the operator P ↦ {a : (M, P) ⊨ body at s[a/xs]}."""
    xs = _check_operator(body, r, xs)
    if P.arity != len(xs):
        raise FormulaError(f"relation of arity {P.arity} for a {len(xs)}-tuple of variables")
    ev = FixpointEvaluator(ctx.bind(**{r: P}), body, extra_vars=xs)
    return ev.satisfying(xs, s)


def _fixpoint(kind, ctx, body, r, xs, s):
    xs = _check_operator(body, r, xs)
    node = Fix(kind, r, xs, body, tuple(Var(x) for x in xs))
    ev = FixpointEvaluator(ctx, node)
    env = ev._env({**{x: 0 for x in xs}, **(s or {})})
    data = ev.machine.fixpoint(0, env)
    return Relation.from_dense(ctx.structure.size, len(xs), data)


def gfp(ctx: FixpointContext, body: Formula, r: str, xs: Sequence[str],
        s: Mapping[str, int] | None = None) -> Relation:
    """Greatest fixed point of the operator, by descending iteration."""
    return _fixpoint("gfp", ctx, body, r, xs, s)


def lfp(ctx: FixpointContext, body: Formula, r: str, xs: Sequence[str],
        s: Mapping[str, int] | None = None) -> Relation:
    """Least fixed point of the operator, by ascending iteration."""
    return _fixpoint("lfp", ctx, body, r, xs, s)


def eval_pgfp(ctx: FixpointContext, s: Mapping[str, int], f: Formula) -> bool:
    """Satisfaction of a formula with fixed-point operators at one assignment."""
    return FixpointEvaluator(ctx, f).holds(s)


__all__ = [
    "FixpointContext",
    "FixpointEvaluator",
    "available_backends",
    "default_backend",
    "eval_pgfp",
    "gamma",
    "gfp",
    "lfp",
]
