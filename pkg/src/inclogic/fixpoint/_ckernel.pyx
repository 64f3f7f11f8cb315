# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled interpreter for fixed-point programs (same interface as _pykernel)."""

import numpy as np
cimport numpy as cnp
from libc.string cimport memcmp, memcpy, memset

cnp.import_array()

cdef enum:
    OP_REL = 0
    OP_EQ = 1
    OP_AND = 2
    OP_OR = 3
    OP_EXISTS = 4
    OP_FORALL = 5
    OP_FIX = 6
    T_VAR = 0
    T_CONST = 1
    T_FUN = 2

POOL_LIMIT = 1 << 28


cdef class Machine:
    cdef public int n
    cdef int root
    cdef int[::1] op, fa, fb, fc, tk, ta, tb, extra, rel_arity, fun_arity
    cdef int[::1] fix_kind, fix_rel, fix_body, fix_k, fix_vars, fix_args
    cdef int[::1] fix_np, fix_params, fix_nd, fix_deps
    cdef long[::1] rel_off, fun_off
    cdef int[::1] env, consts, funs
    cdef long[::1] versions
    cdef unsigned char[::1] pool
    cdef unsigned char[::1] scratch
    cdef long[::1] scratch_off
    cdef list cache, cache_deps, result, result_key
    cdef public long computations, iterations

    def __init__(self, prog, int n):
        self.n = n
        i32 = lambda a: np.ascontiguousarray(a, dtype=np.int32)
        self.op = i32(prog.op)
        self.fa = i32(prog.fa)
        self.fb = i32(prog.fb)
        self.fc = i32(prog.fc)
        self.tk = i32(prog.tk) if len(prog.tk) else np.zeros(1, np.int32)
        self.ta = i32(prog.ta) if len(prog.ta) else np.zeros(1, np.int32)
        self.tb = i32(prog.tb) if len(prog.tb) else np.zeros(1, np.int32)
        self.extra = i32(prog.extra)
        self.rel_arity = i32(prog.rel_arity) if len(prog.rel_arity) else np.zeros(1, np.int32)
        self.fun_arity = i32(prog.fun_arity) if len(prog.fun_arity) else np.zeros(1, np.int32)
        self.root = prog.root
        self.env = np.zeros(max(prog.nvars, 1), np.int32)
        self.consts = np.zeros(max(prog.nconst, 1), np.int32)

        nrel = len(prog.rel_arity)
        offs = np.zeros(nrel + 1, np.int64)
        for j in range(nrel):
            offs[j + 1] = offs[j] + n ** int(prog.rel_arity[j])
        if offs[nrel] > POOL_LIMIT:
            raise MemoryError(f"relation storage of {offs[nrel]} bytes exceeds the limit")
        self.rel_off = offs
        self.pool = np.zeros(max(int(offs[nrel]), 1), np.uint8)
        self.versions = np.zeros(max(nrel, 1), np.int64)

        nfun = len(prog.fun_arity)
        foffs = np.zeros(nfun + 1, np.int64)
        for j in range(nfun):
            foffs[j + 1] = foffs[j] + n ** int(prog.fun_arity[j])
        self.fun_off = foffs
        self.funs = np.zeros(max(int(foffs[nfun]), 1), np.int32)

        nfix = len(prog.fix_kind)
        pad = lambda a: i32(a) if len(a) else np.zeros(1, np.int32)
        self.fix_kind = pad(prog.fix_kind)
        self.fix_rel = pad(prog.fix_rel)
        self.fix_body = pad(prog.fix_body)
        self.fix_k = pad(prog.fix_k)
        self.fix_vars = pad(prog.fix_vars)
        self.fix_args = pad(prog.fix_args)
        self.fix_np = pad(prog.fix_np)
        self.fix_params = pad(prog.fix_params)
        self.fix_nd = pad(prog.fix_nd)
        self.fix_deps = pad(prog.fix_deps)
        soffs = np.zeros(nfix + 1, np.int64)
        for j in range(nfix):
            soffs[j + 1] = soffs[j] + n ** int(prog.fix_k[j])
        self.scratch_off = soffs
        self.scratch = np.zeros(max(int(soffs[nfix]), 1), np.uint8)
        self.cache = [dict() for _ in range(nfix)]
        self.cache_deps = [None] * nfix
        self.result = [None] * nfix
        self.result_key = [None] * nfix
        self.computations = 0
        self.iterations = 0

    # -- loading --------------------------------------------------------

    def set_relation(self, int slot, data):
        cdef long size = self.n ** self.rel_arity[slot]
        cdef long off = self.rel_off[slot]
        cdef long j
        if len(data) != size:
            raise ValueError(f"relation slot {slot} expects {size} bytes, got {len(data)}")
        for j in range(size):
            self.pool[off + j] = 1 if data[j] else 0
        self.versions[slot] += 1

    def set_function(self, int slot, table):
        cdef long size = self.n ** self.fun_arity[slot]
        cdef long off = self.fun_off[slot]
        cdef long j
        if len(table) != size:
            raise ValueError(f"function slot {slot} expects {size} values")
        for j in range(size):
            self.funs[off + j] = int(table[j])

    def set_constant(self, int slot, int value):
        self.consts[slot] = value

    def reset(self):
        for i in range(len(self.cache)):
            self.cache[i].clear()
            self.cache_deps[i] = None
            self.result_key[i] = None

    # -- evaluation -----------------------------------------------------

    cdef int _term(self, int t) except -1:
        cdef int kind = self.tk[t]
        cdef int slot, j
        cdef long idx
        if kind == T_VAR:
            return self.env[self.ta[t]]
        if kind == T_CONST:
            return self.consts[self.ta[t]]
        slot = self.ta[t]
        idx = 0
        for j in range(self.fun_arity[slot]):
            idx = idx * self.n + self._term(self.extra[self.tb[t] + j])
        return self.funs[self.fun_off[slot] + idx]

    cdef int _eval(self, int i) except -1:
        cdef int op = self.op[i]
        cdef int slot, j, v, saved, m, want, out, f
        cdef long idx
        cdef const unsigned char[:] data
        if op == OP_REL:
            slot = self.fa[i]
            idx = 0
            for j in range(self.rel_arity[slot]):
                idx = idx * self.n + self._term(self.extra[self.fb[i] + j])
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
            saved = self.env[v]
            out = not want
            for m in range(self.n):
                self.env[v] = m
                if self._eval(self.fb[i]) == want:
                    out = want
                    break
            self.env[v] = saved
            return out
        if op == OP_FIX:
            f = self.fa[i]
            data = self._ensure(f)
            idx = 0
            for j in range(self.fix_k[f]):
                idx = idx * self.n + self._term(self.extra[self.fix_args[f] + j])
            return data[idx] != 0
        raise ValueError(f"bad opcode {op}")

    cdef bytes _ensure(self, int f):
        cdef int j
        cdef int nd = self.fix_nd[f]
        cdef int np_ = self.fix_np[f]
        deps = tuple([self.versions[self.extra[self.fix_deps[f] + j]] for j in range(nd)])
        if deps != self.cache_deps[f]:
            self.cache[f].clear()
            self.cache_deps[f] = deps
            self.result_key[f] = None
        key = tuple([self.env[self.extra[self.fix_params[f] + j]] for j in range(np_)])
        if self.result_key[f] == key:
            return self.result[f]
        data = self.cache[f].get(key)
        if data is None:
            data = self._compute(f)
            self.cache[f][key] = data
        self.result[f] = data
        self.result_key[f] = key
        return data

    cdef bytes _compute(self, int f):
        cdef int n = self.n
        cdef int k = self.fix_k[f]
        cdef int slot = self.fix_rel[f]
        cdef int body = self.fix_body[f]
        cdef long size = n ** k
        cdef long off = self.rel_off[slot]
        cdef long soff = self.scratch_off[f]
        cdef int vo = self.fix_vars[f]
        cdef long idx, rest
        cdef int j
        cdef int saved[64]
        cdef unsigned char *pool = &self.pool[0]
        cdef unsigned char *scratch = &self.scratch[0] + soff
        if k > 64:
            raise ValueError("fixed-point arity above 64")
        for j in range(k):
            saved[j] = self.env[self.extra[vo + j]]
        memset(pool + off, 1 if self.fix_kind[f] == 0 else 0, size)
        self.versions[slot] += 1
        self.computations += 1
        while True:
            self.iterations += 1
            for idx in range(size):
                rest = idx
                for j in range(k - 1, -1, -1):
                    self.env[self.extra[vo + j]] = rest % n
                    rest //= n
                scratch[idx] = 1 if self._eval(body) else 0
            if memcmp(scratch, pool + off, size) == 0:
                break
            memcpy(pool + off, scratch, size)
            self.versions[slot] += 1
        for j in range(k):
            self.env[self.extra[vo + j]] = saved[j]
        return (<char *> scratch)[:size]

    # -- entry points ---------------------------------------------------

    def holds(self, env):
        cdef int j
        for j in range(len(env)):
            self.env[j] = int(env[j])
        return bool(self._eval(self.root))

    def satisfying(self, var_slots, env):
        cdef int j, k = len(var_slots)
        cdef long idx, rest, total = self.n ** k
        for j in range(len(env)):
            self.env[j] = int(env[j])
        slots = [int(v) for v in var_slots]
        out = bytearray(total)
        for idx in range(total):
            rest = idx
            for j in range(k - 1, -1, -1):
                self.env[slots[j]] = rest % self.n
                rest //= self.n
            out[idx] = 1 if self._eval(self.root) else 0
        return bytes(out)

    def fixpoint(self, int f, env):
        cdef int j
        for j in range(len(env)):
            self.env[j] = int(env[j])
        return self._ensure(f)

    def stats(self):
        return {"computations": self.computations, "iterations": self.iterations}
