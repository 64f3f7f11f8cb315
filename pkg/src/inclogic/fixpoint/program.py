"""Flatten a fixed-point formula into integer arrays for the evaluation kernels.

Both kernels (:mod:`._ckernel` and :mod:`._pykernel`) interpret the same
layout.  Formula node ``i`` is ``(op[i], fa[i], fb[i], fc[i])``:

=========  ====================  =====================  ========
op         fa                    fb                     fc
=========  ====================  =====================  ========
REL        relation slot         offset of term ids     negated
EQ         term id               term id                negated
AND, OR    left node             right node             -
EXISTS,    variable slot         body node              -
FORALL
FIX        fixpoint index        -                      -
=========  ====================  =====================  ========

Term ``t`` is ``(tk[t], ta[t], tb[t])``: a variable slot, a constant slot, or
a function slot with its argument term ids at ``extra[tb[t]:]``.

Each fixed-point node owns a relation slot for its bound symbol.  Its cached
value depends on the *params* (free first-order variables of the body other
than the bound tuple) and on the *deps* (free relation slots of the body),
which the kernels track through per-slot version counters.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..syntax import (
    And,
    Const,
    Eq,
    Exists,
    Fix,
    Forall,
    Formula,
    FormulaError,
    Func,
    Or,
    PositivityError,
    Rel,
    Var,
    check_positive,
    free_vars,
)

OP_REL, OP_EQ, OP_AND, OP_OR, OP_EXISTS, OP_FORALL, OP_FIX = range(7)
T_VAR, T_CONST, T_FUN = range(3)


@dataclass
class Program:
    op: np.ndarray
    fa: np.ndarray
    fb: np.ndarray
    fc: np.ndarray
    tk: np.ndarray
    ta: np.ndarray
    tb: np.ndarray
    extra: np.ndarray
    rel_arity: np.ndarray
    fun_arity: np.ndarray
    nconst: int
    nvars: int
    fix_kind: np.ndarray      # 0 gfp, 1 lfp
    fix_rel: np.ndarray
    fix_body: np.ndarray
    fix_k: np.ndarray
    fix_vars: np.ndarray      # offset into extra of k variable slots
    fix_args: np.ndarray      # offset into extra of k term ids
    fix_np: np.ndarray
    fix_params: np.ndarray
    fix_nd: np.ndarray
    fix_deps: np.ndarray
    root: int
    var_slots: dict = field(default_factory=dict)
    rel_slots: dict = field(default_factory=dict)     # free relation symbols only
    fun_slots: dict = field(default_factory=dict)
    const_slots: dict = field(default_factory=dict)
    fix_nodes: list = field(default_factory=list)     # Fix formula per index


class _Builder:
    def __init__(self, rel_arities, fun_arities):
        self.rel_arities = dict(rel_arities)
        self.fun_arities = dict(fun_arities or {})
        self.op, self.fa, self.fb, self.fc = [], [], [], []
        self.tk, self.ta, self.tb = [], [], []
        self.extra = []
        self.rel_arity = []
        self.fun_arity = []
        self.var_slots, self.rel_slots, self.fun_slots, self.const_slots = {}, {}, {}, {}
        self.fix = []            # dicts, one per fixpoint node
        self.fix_nodes = []

    def var(self, name):
        if name not in self.var_slots:
            self.var_slots[name] = len(self.var_slots)
        return self.var_slots[name]

    def new_rel_slot(self, arity):
        self.rel_arity.append(arity)
        return len(self.rel_arity) - 1

    def term(self, t):
        if isinstance(t, Var):
            kind, a, b = T_VAR, self.var(t.name), 0
        elif isinstance(t, Const):
            if t.name not in self.const_slots:
                self.const_slots[t.name] = len(self.const_slots)
            kind, a, b = T_CONST, self.const_slots[t.name], 0
        elif isinstance(t, Func):
            if t.name not in self.fun_slots:
                want = self.fun_arities.get(t.name, len(t.args))
                self.fun_slots[t.name] = len(self.fun_arity)
                self.fun_arity.append(want)
            slot = self.fun_slots[t.name]
            if self.fun_arity[slot] != len(t.args):
                raise FormulaError(f"function {t.name} applied to {len(t.args)} terms")
            ids = [self.term(a) for a in t.args]
            b = len(self.extra)
            self.extra.extend(ids)
            kind, a = T_FUN, slot
        else:
            raise TypeError(f"not a term: {t!r}")
        self.tk.append(kind)
        self.ta.append(a)
        self.tb.append(b)
        return len(self.tk) - 1

    def emit(self, op, a=0, b=0, c=0):
        self.op.append(op)
        self.fa.append(a)
        self.fb.append(b)
        self.fc.append(c)
        return len(self.op) - 1

    def node(self, f, env):
        """Compile ``f``; return (node id, relation slots read, slots bound inside)."""
        if isinstance(f, Rel):
            if f.name in env:
                slot = env[f.name]
            elif f.name in self.rel_slots:
                slot = self.rel_slots[f.name]
            elif f.name in self.rel_arities:
                slot = self.new_rel_slot(self.rel_arities[f.name])
                self.rel_slots[f.name] = slot
            else:
                raise FormulaError(f"relation symbol {f.name!r} is not interpreted")
            if self.rel_arity[slot] != len(f.args):
                raise FormulaError(
                    f"relation {f.name} has arity {self.rel_arity[slot]}, "
                    f"applied to {len(f.args)} terms")
            ids = [self.term(t) for t in f.args]
            off = len(self.extra)
            self.extra.extend(ids)
            return self.emit(OP_REL, slot, off, int(f.neg)), {slot}, set()
        if isinstance(f, Eq):
            return self.emit(OP_EQ, self.term(f.left), self.term(f.right), int(f.neg)), set(), set()
        if isinstance(f, (And, Or)):
            left, ul, bl = self.node(f.left, env)
            right, ur, br = self.node(f.right, env)
            op = OP_AND if isinstance(f, And) else OP_OR
            return self.emit(op, left, right), ul | ur, bl | br
        if isinstance(f, (Exists, Forall)):
            slot = self.var(f.var)
            body, used, bound = self.node(f.body, env)
            op = OP_EXISTS if isinstance(f, Exists) else OP_FORALL
            return self.emit(op, slot, body), used, bound
        if isinstance(f, Fix):
            if not check_positive(f.body, f.rel):
                raise PositivityError(
                    f"{f.rel} occurs negatively in the body of its {f.kind} operator")
            k = len(f.vars)
            slot = self.new_rel_slot(k)
            index = len(self.fix)
            entry = {}
            self.fix.append(entry)
            self.fix_nodes.append(f)
            inner_env = dict(env)
            inner_env[f.rel] = slot
            body, used, bound = self.node(f.body, inner_env)
            bound = bound | {slot}
            var_ids = [self.var(v) for v in f.vars]
            params = [self.var(v) for v in free_vars(f.body) if v not in f.vars]
            deps = sorted(used - bound)
            arg_ids = [self.term(t) for t in f.args]
            entry.update(kind=0 if f.kind == "gfp" else 1, rel=slot, body=body, k=k)
            entry["vars"] = len(self.extra)
            self.extra.extend(var_ids)
            entry["args"] = len(self.extra)
            self.extra.extend(arg_ids)
            entry["np"] = len(params)
            entry["params"] = len(self.extra)
            self.extra.extend(params)
            entry["nd"] = len(deps)
            entry["deps"] = len(self.extra)
            self.extra.extend(deps)
            return self.emit(OP_FIX, index), used - bound, bound
        raise FormulaError(
            f"{type(f).__name__} nodes cannot be evaluated by the fixed-point engine "
            f"(formula must be first-order plus gfp/lfp, in negation normal form)")

    def finish(self, root):
        i32 = lambda xs: np.asarray(xs, dtype=np.int32)  # noqa: E731
        col = lambda key: i32([e[key] for e in self.fix])  # noqa: E731
        return Program(
            op=i32(self.op), fa=i32(self.fa), fb=i32(self.fb), fc=i32(self.fc),
            tk=i32(self.tk), ta=i32(self.ta), tb=i32(self.tb),
            extra=i32(self.extra or [0]),
            rel_arity=i32(self.rel_arity), fun_arity=i32(self.fun_arity),
            nconst=len(self.const_slots), nvars=len(self.var_slots),
            fix_kind=col("kind"), fix_rel=col("rel"), fix_body=col("body"), fix_k=col("k"),
            fix_vars=col("vars"), fix_args=col("args"), fix_np=col("np"),
            fix_params=col("params"), fix_nd=col("nd"), fix_deps=col("deps"),
            root=root,
            var_slots=dict(self.var_slots), rel_slots=dict(self.rel_slots),
            fun_slots=dict(self.fun_slots), const_slots=dict(self.const_slots),
            fix_nodes=list(self.fix_nodes),
        )


def compile_formula(f: Formula, rel_arities, fun_arities=None, extra_vars=()) -> Program:
    """Compile ``f``.  ``rel_arities`` lists every relation symbol that may occur free.

    ``extra_vars`` are given variable slots even if they do not occur in ``f``
    (used when sweeping a tuple of variables with ``satisfying``).
    """
    b = _Builder(rel_arities, fun_arities)
    for v in free_vars(f):
        b.var(v)
    for v in extra_vars:
        b.var(v)
    root, _, _ = b.node(f, {})
    return b.finish(root)
