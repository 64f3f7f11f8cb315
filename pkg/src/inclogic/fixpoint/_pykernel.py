"""Pure-Python interpreter for compiled fixed-point programs.

Mirrors :mod:`._ckernel` line for line; used when the extension is not built
or when ``INCLOGIC_PURE=1`` is set.
"""

from .program import (
    OP_AND,
    OP_EQ,
    OP_EXISTS,
    OP_FIX,
    OP_FORALL,
    OP_OR,
    OP_REL,
    T_CONST,
    T_VAR,
)

POOL_LIMIT = 1 << 28


class Machine:
    def __init__(self, prog, n):
        self.n = n
        self.op = prog.op.tolist()
        self.fa = prog.fa.tolist()
        self.fb = prog.fb.tolist()
        self.fc = prog.fc.tolist()
        self.tk = prog.tk.tolist()
        self.ta = prog.ta.tolist()
        self.tb = prog.tb.tolist()
        self.extra = prog.extra.tolist()
        self.rel_arity = prog.rel_arity.tolist()
        self.fun_arity = prog.fun_arity.tolist()
        self.root = prog.root
        self.env = [0] * max(prog.nvars, 1)
        self.consts = [0] * prog.nconst
        self.funs = [[0] * n ** a for a in self.fun_arity]

        self.rel_off = []
        total = 0
        for a in self.rel_arity:
            self.rel_off.append(total)
            total += n ** a
        nfix = len(prog.fix_kind)
        self.fix_kind = prog.fix_kind.tolist()
        self.fix_rel = prog.fix_rel.tolist()
        self.fix_body = prog.fix_body.tolist()
        self.fix_k = prog.fix_k.tolist()
        self.fix_vars = prog.fix_vars.tolist()
        self.fix_args = prog.fix_args.tolist()
        self.fix_np = prog.fix_np.tolist()
        self.fix_params = prog.fix_params.tolist()
        self.fix_nd = prog.fix_nd.tolist()
        self.fix_deps = prog.fix_deps.tolist()
        if total > POOL_LIMIT:
            raise MemoryError(f"relation storage of {total} bytes exceeds the limit")
        self.pool = bytearray(total)
        self.versions = [0] * len(self.rel_arity)
        self.cache = [dict() for _ in range(nfix)]
        self.cache_deps = [None] * nfix
        self.result = [None] * nfix      # bytes of the fixed point for the current params
        self.result_key = [None] * nfix
        self.computations = 0
        self.iterations = 0

    # -- loading --------------------------------------------------------

    def set_relation(self, slot, data):
        size = self.n ** self.rel_arity[slot]
        if len(data) != size:
            raise ValueError(f"relation slot {slot} expects {size} bytes, got {len(data)}")
        off = self.rel_off[slot]
        self.pool[off:off + size] = bytes(1 if b else 0 for b in data)
        self.versions[slot] += 1

    def set_function(self, slot, table):
        size = self.n ** self.fun_arity[slot]
        table = [int(v) for v in table]
        if len(table) != size:
            raise ValueError(f"function slot {slot} expects {size} values")
        self.funs[slot] = table

    def set_constant(self, slot, value):
        self.consts[slot] = int(value)

    def reset(self):
        for i in range(len(self.cache)):
            self.cache[i].clear()
            self.cache_deps[i] = None
            self.result_key[i] = None

    # -- evaluation -----------------------------------------------------

    def _term(self, t):
        kind = self.tk[t]
        if kind == T_VAR:
            return self.env[self.ta[t]]
        if kind == T_CONST:
            return self.consts[self.ta[t]]
        slot = self.ta[t]
        off = self.tb[t]
        idx = 0
        for j in range(self.fun_arity[slot]):
            idx = idx * self.n + self._term(self.extra[off + j])
        return self.funs[slot][idx]

    def _eval(self, i):
        op = self.op[i]
        if op == OP_REL:
            slot = self.fa[i]
            off = self.fb[i]
            idx = 0
            for j in range(self.rel_arity[slot]):
                idx = idx * self.n + self._term(self.extra[off + j])
            return (self.pool[self.rel_off[slot] + idx] != 0) != (self.fc[i] != 0)
        if op == OP_EQ:
            return (self._term(self.fa[i]) == self._term(self.fb[i])) != (self.fc[i] != 0)
        if op == OP_AND:
            return self._eval(self.fa[i]) and self._eval(self.fb[i])
        if op == OP_OR:
            return self._eval(self.fa[i]) or self._eval(self.fb[i])
        if op == OP_EXISTS or op == OP_FORALL:
            want = op == OP_EXISTS
            v = self.fa[i]
            body = self.fb[i]
            saved = self.env[v]
            out = not want
            for m in range(self.n):
                self.env[v] = m
                if self._eval(body) == want:
                    out = want
                    break
            self.env[v] = saved
            return out
        if op == OP_FIX:
            f = self.fa[i]
            data = self._ensure(f)
            off = self.fix_args[f]
            idx = 0
            for j in range(self.fix_k[f]):
                idx = idx * self.n + self._term(self.extra[off + j])
            return data[idx] != 0
        raise ValueError(f"bad opcode {op}")

    def _ensure(self, f):
        """Fixed point of node ``f`` under the current params, via the cache."""
        deps = tuple(self.versions[self.extra[self.fix_deps[f] + j]]
                     for j in range(self.fix_nd[f]))
        if deps != self.cache_deps[f]:
            self.cache[f].clear()
            self.cache_deps[f] = deps
            self.result_key[f] = None
        po = self.fix_params[f]
        key = tuple(self.env[self.extra[po + j]] for j in range(self.fix_np[f]))
        if self.result_key[f] == key:
            return self.result[f]
        data = self.cache[f].get(key)
        if data is None:
            data = self._compute(f)
            self.cache[f][key] = data
        self.result[f] = data
        self.result_key[f] = key
        return data

    def _compute(self, f):
        n = self.n
        k = self.fix_k[f]
        slot = self.fix_rel[f]
        body = self.fix_body[f]
        size = n ** k
        off = self.rel_off[slot]
        vo = self.fix_vars[f]
        vars_ = [self.extra[vo + j] for j in range(k)]
        saved = [self.env[v] for v in vars_]
        pool = self.pool
        fill = 1 if self.fix_kind[f] == 0 else 0
        pool[off:off + size] = bytes([fill]) * size
        self.versions[slot] += 1
        self.computations += 1
        scratch = bytearray(size)
        while True:
            self.iterations += 1
            for idx in range(size):
                rest = idx
                for j in range(k - 1, -1, -1):
                    self.env[vars_[j]] = rest % n
                    rest //= n
                scratch[idx] = 1 if self._eval(body) else 0
            if scratch == pool[off:off + size]:
                break
            pool[off:off + size] = scratch
            self.versions[slot] += 1
        for v, old in zip(vars_, saved):
            self.env[v] = old
        return bytes(scratch)

    # -- entry points ---------------------------------------------------

    def holds(self, env):
        for j, value in enumerate(env):
            self.env[j] = int(value)
        return bool(self._eval(self.root))

    def satisfying(self, var_slots, env):
        """Dense bytes over all tuples for ``var_slots`` where the root holds."""
        for j, value in enumerate(env):
            self.env[j] = int(value)
        n = self.n
        k = len(var_slots)
        out = bytearray(n ** k)
        for idx in range(n ** k):
            rest = idx
            for j in range(k - 1, -1, -1):
                self.env[var_slots[j]] = rest % n
                rest //= n
            out[idx] = 1 if self._eval(self.root) else 0
        return bytes(out)

    def fixpoint(self, f, env):
        for j, value in enumerate(env):
            self.env[j] = int(value)
        return self._ensure(f)

    def stats(self):
        return {"computations": self.computations, "iterations": self.iterations}
