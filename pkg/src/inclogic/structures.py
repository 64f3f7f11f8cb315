"""Finite structures, teams and relations.

Elements of a structure of size ``n`` are the integers ``0..n-1``.  A team is
a set of assignments over an ordered variable domain, stored as value rows.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .syntax import Const, Func, Signature, Term, Var, term_vars


class StructureError(ValueError):
    pass


class UnboundVariable(KeyError):
    pass


# --------------------------------------------------------------------------
# relations


@dataclass(frozen=True)
class Relation:
    """A set of ``arity``-tuples of elements."""

    arity: int
    tuples: frozenset = frozenset()

    def __post_init__(self):
        ts = frozenset(tuple(t) for t in self.tuples)
        for t in ts:
            if len(t) != self.arity:
                raise StructureError(f"tuple {t} in a relation of arity {self.arity}")
        object.__setattr__(self, "tuples", ts)

    @classmethod
    def full(cls, n: int, arity: int) -> "Relation":
        return cls(arity, frozenset(itertools.product(range(n), repeat=arity)))

    @classmethod
    def from_dense(cls, n: int, arity: int, data) -> "Relation":
        """Inverse of :meth:`to_dense`."""
        tuples = [t for i, t in enumerate(itertools.product(range(n), repeat=arity))
                  if data[i]]
        return cls(arity, frozenset(tuples))

    @classmethod
    def from_mask(cls, n: int, arity: int, mask: int) -> "Relation":
        tuples = [t for i, t in enumerate(itertools.product(range(n), repeat=arity))
                  if mask >> i & 1]
        return cls(arity, frozenset(tuples))

    def to_dense(self, n: int) -> bytes:
        """Byte per tuple of ``range(n)**arity`` in lexicographic order."""
        out = bytearray(n ** self.arity)
        for t in self.tuples:
            out[tuple_index(t, n)] = 1
        return bytes(out)

    def to_mask(self, n: int) -> int:
        m = 0
        for t in self.tuples:
            m |= 1 << tuple_index(t, n)
        return m

    def __contains__(self, t) -> bool:
        return tuple(t) in self.tuples

    def __iter__(self) -> Iterator[tuple]:
        return iter(sorted(self.tuples))

    def __len__(self) -> int:
        return len(self.tuples)

    def __le__(self, other: "Relation") -> bool:
        return self.tuples <= other.tuples

    def __or__(self, other: "Relation") -> "Relation":
        return Relation(self.arity, self.tuples | other.tuples)

    def __and__(self, other: "Relation") -> "Relation":
        return Relation(self.arity, self.tuples & other.tuples)

    def __repr__(self):
        body = " ".join("(" + ",".join(map(str, t)) + ")" for t in self)
        return f"Relation({self.arity}, {{{body}}})"


def tuple_index(t: Sequence[int], n: int) -> int:
    i = 0
    for a in t:
        i = i * n + a
    return i


def rel(arity: int, *tuples) -> Relation:
    """Shorthand: ``rel(2, (0, 1), (1, 0))``; unary tuples may be bare ints."""
    return Relation(arity, frozenset(t if isinstance(t, tuple) else (t,) for t in tuples))


# --------------------------------------------------------------------------
# structures


@dataclass(frozen=True)
class Structure:
    size: int
    relations: Mapping[str, Relation] = field(default_factory=dict)
    functions: Mapping[str, Mapping[tuple, int]] = field(default_factory=dict)
    constants: Mapping[str, int] = field(default_factory=dict)
    params: Mapping[str, Relation] = field(default_factory=dict)

    def __post_init__(self):
        n = self.size
        if n < 0:
            raise StructureError("negative universe size")
        for name, r in list(self.relations.items()) + list(self.params.items()):
            for t in r.tuples:
                if any(not 0 <= a < n for a in t):
                    raise StructureError(f"{name}: tuple {t} outside universe of size {n}")
        for name, table in self.functions.items():
            arities = {len(k) for k in table}
            if len(arities) > 1:
                raise StructureError(f"function {name} has mixed arities")
            k = arities.pop() if arities else 0
            if len(table) != n ** k and n > 0:
                raise StructureError(f"function {name} is not total")
            for args, v in table.items():
                if not 0 <= v < n or any(not 0 <= a < n for a in args):
                    raise StructureError(f"function {name}: value out of range")
        for name, v in self.constants.items():
            if not 0 <= v < n:
                raise StructureError(f"constant {name} = {v} outside universe")
        names = [set(self.relations), set(self.functions), set(self.constants),
                 set(self.params)]
        if sum(map(len, names)) != len(set().union(*names)):
            raise StructureError("symbol interpreted twice")

    @property
    def universe(self) -> range:
        return range(self.size)

    def expand(self, **params: Relation) -> "Structure":
        """The expansion (M, P): add or rebind second-order parameters."""
        new = dict(self.params)
        new.update(params)
        return Structure(self.size, self.relations, self.functions, self.constants, new)

    def lookup(self, name: str) -> Relation:
        if name in self.params:
            return self.params[name]
        try:
            return self.relations[name]
        except KeyError:
            raise StructureError(f"relation symbol {name!r} is not interpreted") from None

    def function_arity(self, name: str) -> int:
        table = self.functions[name]
        return len(next(iter(table))) if table else 0

    def signature(self, so_vars: Mapping[str, int] | None = None) -> Signature:
        so = {k: r.arity for k, r in self.params.items()}
        so.update(so_vars or {})
        return Signature(
            relations={k: r.arity for k, r in self.relations.items()},
            functions={k: self.function_arity(k) for k in self.functions},
            constants=set(self.constants),
            so_vars=so,
        )


def graph(n: int, edges: Iterable[tuple], name: str = "E", **unary) -> Structure:
    """Structure with one binary relation ``name`` and optional unary relations."""
    rels = {name: Relation(2, frozenset(edges))}
    for k, v in unary.items():
        rels[k] = rel(1, *v)
    return Structure(n, rels)


# --------------------------------------------------------------------------
# assignments and terms


def eval_term(M: Structure, s: Mapping[str, int], t: Term) -> int:
    """Value of ``t`` under assignment ``s``."""
    if isinstance(t, Var):
        try:
            return s[t.name]
        except KeyError:
            raise UnboundVariable(t.name) from None
    if isinstance(t, Const):
        try:
            return M.constants[t.name]
        except KeyError:
            raise StructureError(f"constant {t.name!r} is not interpreted") from None
    if isinstance(t, Func):
        args = tuple(eval_term(M, s, a) for a in t.args)
        try:
            return M.functions[t.name][args]
        except KeyError:
            raise StructureError(f"function {t.name!r} is not interpreted") from None
    raise TypeError(f"not a term: {t!r}")


# --------------------------------------------------------------------------
# teams


@dataclass(frozen=True)
class Team:
    """Set of assignments with the common domain ``vars`` (ordered)."""

    vars: tuple
    rows: frozenset = frozenset()

    def __post_init__(self):
        vs = tuple(self.vars)
        if len(set(vs)) != len(vs):
            raise StructureError(f"repeated variable in team domain {vs}")
        rows = frozenset(tuple(r) for r in self.rows)
        for r in rows:
            if len(r) != len(vs):
                raise StructureError(f"row {r} does not match domain {vs}")
        object.__setattr__(self, "vars", vs)
        object.__setattr__(self, "rows", rows)

    @classmethod
    def unit(cls) -> "Team":
        """The team containing only the empty assignment."""
        return cls((), frozenset({()}))

    @classmethod
    def empty(cls, vars: Sequence[str] = ()) -> "Team":
        return cls(tuple(vars), frozenset())

    @classmethod
    def of(cls, vars: Sequence[str] | str, *rows) -> "Team":
        """``Team.of("x y", (0, 1), (1, 0))``; rows of a 1-variable team may be ints."""
        if isinstance(vars, str):
            vars = vars.replace(",", " ").split()
        return cls(tuple(vars), frozenset(r if isinstance(r, tuple) else (r,) for r in rows))

    @classmethod
    def from_assignments(cls, vars: Sequence[str], assignments: Iterable[Mapping]) -> "Team":
        return cls(tuple(vars), frozenset(tuple(s[v] for v in vars) for s in assignments))

    @classmethod
    def full(cls, vars: Sequence[str], n: int) -> "Team":
        return cls(tuple(vars), frozenset(itertools.product(range(n), repeat=len(vars))))

    def assignments(self) -> Iterator[dict]:
        for r in sorted(self.rows):
            yield dict(zip(self.vars, r))

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self) -> Iterator[tuple]:
        return iter(sorted(self.rows))

    def __or__(self, other: "Team") -> "Team":
        other = other.conform(self.vars)
        return Team(self.vars, self.rows | other.rows)

    def __le__(self, other: "Team") -> bool:
        return self.rows <= other.conform(self.vars).rows

    def conform(self, vars: Sequence[str]) -> "Team":
        """Reorder or project onto ``vars`` (which must be in the domain)."""
        vars = tuple(vars)
        if vars == self.vars:
            return self
        missing = [v for v in vars if v not in self.vars]
        if missing:
            raise UnboundVariable(", ".join(missing))
        idx = [self.vars.index(v) for v in vars]
        return Team(vars, frozenset(tuple(r[i] for i in idx) for r in self.rows))

    def subteams(self) -> Iterator["Team"]:
        rows = sorted(self.rows)
        for k in range(len(rows) + 1):
            for sub in itertools.combinations(rows, k):
                yield Team(self.vars, frozenset(sub))

    def __repr__(self):
        body = " ".join("(" + ",".join(map(str, r)) + ")" for r in self)
        return f"Team({' '.join(self.vars) or '-'}: {{{body}}})"


def all_teams(vars: Sequence[str], n: int) -> Iterator[Team]:
    """Every team over ``vars`` on a universe of size ``n`` (2**(n**k) of them)."""
    return Team.full(vars, n).subteams()


def team_relation(M: Structure, X: Team, ts: Sequence[Term]) -> Relation:
    """X(t̄): the set of values of ``ts`` over the team."""
    ts = tuple(ts)
    needed = {v for t in ts for v in term_vars(t)}
    missing = needed - set(X.vars)
    if missing:
        raise UnboundVariable(", ".join(sorted(missing)))
    return Relation(len(ts), frozenset(
        tuple(eval_term(M, s, t) for t in ts) for s in X.assignments()))


def _extend(vars, v):
    vars = tuple(vars)
    if v in vars:
        return vars, vars.index(v)
    return vars + (v,), len(vars)


def _update(row, pos, value):
    if pos == len(row):
        return row + (value,)
    return row[:pos] + (value,) + row[pos + 1:]


def supplement(X: Team, H: Mapping[tuple, Iterable], v: str | Sequence[str]) -> Team:
    """X[H/v] = {s[m/v] : s in X, m in H(s)}.

    ``H`` maps each row of ``X`` to a nonempty set of elements (or of tuples
    when ``v`` is a tuple of variables).  Existing variables are overwritten.
    """
    if set(H) != set(X.rows):
        raise StructureError("choice function must be defined on exactly the team")
    vs = (v,) if isinstance(v, str) else tuple(v)
    if len(set(vs)) != len(vs):
        raise StructureError("repeated variable in supplement")
    vars = X.vars
    positions = []
    for w in vs:
        vars, pos = _extend(vars, w)
        positions.append(pos)
    rows = set()
    for r in X.rows:
        choices = H[r]
        if not choices:
            raise StructureError(f"empty choice set for assignment {r}")
        for m in choices:
            ms = (m,) if isinstance(v, str) else tuple(m)
            row = r
            for pos, value in zip(positions, ms):
                row = _update(row, pos, value)
            rows.add(row)
    return Team(vars, frozenset(rows))


def duplicate(X: Team, v: str, M: Structure | int) -> Team:
    """X[M/v] = {s[m/v] : s in X, m in dom(M)}."""
    n = M if isinstance(M, int) else M.size
    vars, pos = _extend(X.vars, v)
    return Team(vars, frozenset(_update(r, pos, m) for r in X.rows for m in range(n)))


# --------------------------------------------------------------------------
# text formats

_REL_LINE = re.compile(r"^(rel|param)\s+([A-Za-z_]\w*)\s*/\s*(\d+)\s*=\s*\{(.*)\}\s*$")
_FUN_LINE = re.compile(r"^fun\s+([A-Za-z_]\w*)\s*/\s*(\d+)\s*=\s*\{(.*)\}\s*$")
_CONST_LINE = re.compile(r"^const\s+([A-Za-z_]\w*)\s*=\s*(\d+)\s*$")
_TUPLE = re.compile(r"\(([^()]*)\)")


def _ints(text, lineno):
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(x) for x in re.split(r"[,\s]+", text) if x)
    except ValueError:
        raise StructureError(f"line {lineno}: bad tuple {text!r}") from None


def parse_model(text: str) -> Structure:
    """Parse the line-oriented model format.

    ::

        universe 3
        rel E/2 = { (0,1) (1,2) }
        rel P/1 = { (0) }
        fun f/1 = { (0):1, (1):2, (2):0 }
        const c = 2
        param R/1 = { (1) }     # second-order parameter value

    ``#`` starts a comment.  Elements outside the universe are rejected.
    """
    size = None
    relations, functions, constants, params = {}, {}, {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("universe"):
            parts = line.split()
            if len(parts) != 2 or not parts[1].isdigit():
                raise StructureError(f"line {lineno}: expected 'universe N'")
            size = int(parts[1])
            continue
        if size is None:
            raise StructureError(f"line {lineno}: 'universe N' must come first")
        m = _REL_LINE.match(line)
        if m:
            kind, name, k, body = m.group(1), m.group(2), int(m.group(3)), m.group(4)
            tuples = set()
            for tm in _TUPLE.finditer(body):
                t = _ints(tm.group(1), lineno)
                if len(t) != k:
                    raise StructureError(f"line {lineno}: {name}/{k} given tuple {t}")
                if any(not 0 <= a < size for a in t):
                    raise StructureError(f"line {lineno}: tuple {t} outside universe {size}")
                tuples.add(t)
            if _TUPLE.sub("", body).strip(" ,"):
                raise StructureError(f"line {lineno}: junk in relation body")
            (params if kind == "param" else relations)[name] = Relation(k, frozenset(tuples))
            continue
        m = _FUN_LINE.match(line)
        if m:
            name, k, body = m.group(1), int(m.group(2)), m.group(3)
            table = {}
            for entry in re.finditer(r"\(([^()]*)\)\s*:\s*(\d+)", body):
                args = _ints(entry.group(1), lineno)
                if len(args) != k:
                    raise StructureError(f"line {lineno}: {name}/{k} given {args}")
                table[args] = int(entry.group(2))
            functions[name] = table
            continue
        m = _CONST_LINE.match(line)
        if m:
            constants[m.group(1)] = int(m.group(2))
            continue
        raise StructureError(f"line {lineno}: cannot parse {line!r}")
    if size is None:
        raise StructureError("missing 'universe N'")
    return Structure(size, relations, functions, constants, params)


def format_model(M: Structure) -> str:
    lines = [f"universe {M.size}"]
    for kind, table in (("rel", M.relations), ("param", M.params)):
        for name, r in sorted(table.items()):
            body = " ".join("(" + ",".join(map(str, t)) + ")" for t in r)
            lines.append(f"{kind} {name}/{r.arity} = {{ {body} }}")
    for name, table in sorted(M.functions.items()):
        body = ", ".join("(" + ",".join(map(str, a)) + f"):{v}" for a, v in sorted(table.items()))
        lines.append(f"fun {name}/{M.function_arity(name)} = {{ {body} }}")
    for name, v in sorted(M.constants.items()):
        lines.append(f"const {name} = {v}")
    return "\n".join(lines) + "\n"


def parse_team(text: str, n: int | None = None) -> Team:
    """Parse a team file: ``vars x y`` then one row per line.

    Rows are whitespace or comma separated integers, optionally in
    parentheses; ``()`` is the empty assignment.  With ``n`` given, values
    outside the universe are rejected.
    """
    vars = None
    rows = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if vars is None:
            parts = line.split()
            if parts[0] != "vars":
                raise StructureError(f"line {lineno}: team file must start with 'vars'")
            vars = tuple(p for p in re.split(r"[,\s]+", line[4:]) if p)
            continue
        row = _ints(line.strip("()"), lineno)
        if len(row) != len(vars):
            raise StructureError(f"line {lineno}: row {row} does not match vars {vars}")
        if n is not None and any(not 0 <= a < n for a in row):
            raise StructureError(f"line {lineno}: value outside universe {n}")
        rows.add(row)
    if vars is None:
        raise StructureError("missing 'vars' line")
    return Team(vars, frozenset(rows))


def format_team(X: Team) -> str:
    lines = ["vars " + " ".join(X.vars)]
    for r in X:
        lines.append("(" + ",".join(map(str, r)) + ")" if not r else " ".join(map(str, r)))
    return "\n".join(lines) + "\n"
