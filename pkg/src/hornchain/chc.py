"""Core data model for constrained Horn clause programs.

A program is a sequence of clauses ``H :- C, B1, ..., Bk`` where ``H`` and
the ``Bi`` are predicate atoms over variables and ``C`` is a conjunction of
linear constraints over rationals.  The distinguished 0-ary predicate
``false`` may only appear in clause heads; clauses with head ``false`` are
the integrity constraints whose bodies describe unsafe states.

All values here are immutable and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

FALSE_PRED = "false"

ZERO = Fraction(0)
ONE = Fraction(1)


class ChcError(Exception):
    """Base class for errors raised by this package."""


class ArityError(ChcError):
    """A predicate is used with inconsistent arities."""


def canonical_arg_names(n: int) -> tuple[str, ...]:
    """Canonical argument variable names: A, B, ..., Z, V26, V27, ..."""
    names = []
    for i in range(n):
        names.append(chr(ord("A") + i) if i < 26 else f"V{i}")
    return tuple(names)


def fresh_name(taken: Iterable[str], base: str = "V") -> str:
    used = set(taken)
    i = 0
    while f"{base}{i}" in used:
        i += 1
    return f"{base}{i}"


# ---------------------------------------------------------------------------
# Linear expressions and atomic constraints
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LinExpr:
    """Linear expression: sum of coeff*var terms plus a rational constant.

    ``coeffs`` is sorted by variable name and holds no zero coefficients,
    so structural equality coincides with syntactic equality.
    """

    coeffs: tuple[tuple[str, Fraction], ...] = ()
    const: Fraction = ZERO

    @staticmethod
    def build(coeffs: Mapping[str, Fraction], const: Fraction = ZERO) -> "LinExpr":
        items = tuple(sorted((v, Fraction(c)) for v, c in coeffs.items() if c != 0))
        return LinExpr(items, Fraction(const))

    @staticmethod
    def var(name: str) -> "LinExpr":
        return LinExpr(((name, ONE),), ZERO)

    @staticmethod
    def constant(value: Fraction | int) -> "LinExpr":
        return LinExpr((), Fraction(value))

    def coeff(self, var: str) -> Fraction:
        for v, c in self.coeffs:
            if v == var:
                return c
        return ZERO

    def vars(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.coeffs)

    @property
    def is_const(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "LinExpr") -> "LinExpr":
        acc = dict(self.coeffs)
        for v, c in other.coeffs:
            acc[v] = acc.get(v, ZERO) + c
        return LinExpr.build(acc, self.const + other.const)

    def __sub__(self, other: "LinExpr") -> "LinExpr":
        return self + other.scale(Fraction(-1))

    def __neg__(self) -> "LinExpr":
        return self.scale(Fraction(-1))

    def scale(self, k: Fraction) -> "LinExpr":
        if k == 0:
            return LinExpr((), ZERO)
        return LinExpr(tuple((v, c * k) for v, c in self.coeffs), self.const * k)

    def subst(self, mapping: Mapping[str, "LinExpr"]) -> "LinExpr":
        """Simultaneously replace variables by linear expressions."""
        acc: dict[str, Fraction] = {}
        const = self.const
        for v, c in self.coeffs:
            repl = mapping.get(v)
            if repl is None:
                acc[v] = acc.get(v, ZERO) + c
            else:
                for w, d in repl.coeffs:
                    acc[w] = acc.get(w, ZERO) + c * d
                const += c * repl.const
        return LinExpr.build(acc, const)

    def rename(self, mapping: Mapping[str, str]) -> "LinExpr":
        acc: dict[str, Fraction] = {}
        for v, c in self.coeffs:
            w = mapping.get(v, v)
            acc[w] = acc.get(w, ZERO) + c
        return LinExpr.build(acc, self.const)

    def evaluate(self, env: Mapping[str, Fraction]) -> Fraction:
        return sum((c * env[v] for v, c in self.coeffs), self.const)


class Rel(Enum):
    """Relation of a linear expression against zero."""

    GE = ">="
    GT = ">"
    EQ = "="


@dataclass(frozen=True)
class AtomicConstraint:
    """A single linear constraint ``expr REL 0``.

    ``a =< b`` and ``a < b`` are stored as ``b - a >= 0`` / ``b - a > 0``,
    so only the three relations above occur.
    """

    expr: LinExpr
    rel: Rel

    def vars(self) -> tuple[str, ...]:
        return self.expr.vars()

    def subst(self, mapping: Mapping[str, LinExpr]) -> "AtomicConstraint":
        return AtomicConstraint(self.expr.subst(mapping), self.rel)

    def rename(self, mapping: Mapping[str, str]) -> "AtomicConstraint":
        return AtomicConstraint(self.expr.rename(mapping), self.rel)

    def relax(self) -> "AtomicConstraint":
        """Close a strict inequality (> becomes >=)."""
        return AtomicConstraint(self.expr, Rel.GE) if self.rel is Rel.GT else self

    def negate(self) -> tuple["AtomicConstraint", ...]:
        """Negation as a disjunction of atomic constraints."""
        if self.rel is Rel.GE:
            return (AtomicConstraint(-self.expr, Rel.GT),)
        if self.rel is Rel.GT:
            return (AtomicConstraint(-self.expr, Rel.GE),)
        return (
            AtomicConstraint(self.expr, Rel.GT),
            AtomicConstraint(-self.expr, Rel.GT),
        )

    def is_trivially_true(self) -> bool:
        if not self.expr.is_const:
            return False
        k = self.expr.const
        return k > 0 if self.rel is Rel.GT else (k >= 0 if self.rel is Rel.GE else k == 0)

    def is_trivially_false(self) -> bool:
        return self.expr.is_const and not self.is_trivially_true()

    def normalized(self) -> "AtomicConstraint":
        """Scale to coprime integer coefficients with a fixed sign rule.

        Equalities are oriented so the first variable (in name order) has a
        positive coefficient; inequality directions are semantic and kept.
        """
        expr = self.expr
        if expr.is_const:
            return FALSUM if self.is_trivially_false() else VERUM
        denoms = [c.denominator for _, c in expr.coeffs] + [expr.const.denominator]
        nums = [c.numerator for _, c in expr.coeffs] + [expr.const.numerator]
        lcm = 1
        for d in denoms:
            lcm = lcm * d // _gcd(lcm, d)
        ints = [n * lcm // d for n, d in zip(nums, denoms)]
        g = 0
        for n in ints:
            g = _gcd(g, abs(n))
        k = Fraction(lcm, g)
        expr = expr.scale(k)
        rel = self.rel
        if rel is Rel.EQ and expr.coeffs[0][1] < 0:
            expr = -expr
        return AtomicConstraint(expr, rel)

    def sort_key(self) -> tuple:
        e = self.expr
        return (e.vars(), tuple(-c for _, c in e.coeffs), self.rel.value, e.const)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


# Canonical representatives of trivial truth and falsity.
VERUM = AtomicConstraint(LinExpr((), ZERO), Rel.GE)       # 0 >= 0
FALSUM = AtomicConstraint(LinExpr((), Fraction(-1)), Rel.GE)  # -1 >= 0


@dataclass(frozen=True)
class Constraint:
    """Conjunction of atomic constraints; the empty conjunction is true."""

    conjuncts: tuple[AtomicConstraint, ...] = ()

    @staticmethod
    def true() -> "Constraint":
        return Constraint(())

    @staticmethod
    def of(items: Iterable[AtomicConstraint]) -> "Constraint":
        return Constraint(tuple(items))

    @property
    def is_true(self) -> bool:
        return not self.conjuncts

    def vars(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for a in self.conjuncts:
            for v in a.vars():
                seen.setdefault(v)
        return tuple(seen)

    def conjoin(self, other: "Constraint") -> "Constraint":
        return Constraint(self.conjuncts + other.conjuncts)

    def subst(self, mapping: Mapping[str, LinExpr]) -> "Constraint":
        return Constraint(tuple(a.subst(mapping) for a in self.conjuncts))

    def rename(self, mapping: Mapping[str, str]) -> "Constraint":
        return Constraint(tuple(a.rename(mapping) for a in self.conjuncts))

    def relax(self) -> "Constraint":
        return Constraint(tuple(a.relax() for a in self.conjuncts))

    def __iter__(self) -> Iterator[AtomicConstraint]:
        return iter(self.conjuncts)


# ---------------------------------------------------------------------------
# Atoms, clauses, programs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Atom:
    """Predicate atom over variables only."""

    pred: str
    args: tuple[str, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    def rename(self, mapping: Mapping[str, str]) -> "Atom":
        return Atom(self.pred, tuple(mapping.get(v, v) for v in self.args))


@dataclass(frozen=True)
class Clause:
    """``head :- constr, body``; an empty body and true constraint is a fact."""

    head: Atom
    constr: Constraint = Constraint.true()
    body: tuple[Atom, ...] = ()

    def vars(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for v in self.head.args:
            seen.setdefault(v)
        for atom in self.body:
            for v in atom.args:
                seen.setdefault(v)
        for v in self.constr.vars():
            seen.setdefault(v)
        return tuple(seen)

    def rename(self, mapping: Mapping[str, str]) -> "Clause":
        return Clause(
            self.head.rename(mapping),
            self.constr.rename(mapping),
            tuple(a.rename(mapping) for a in self.body),
        )

    def with_canonical_vars(self) -> "Clause":
        """Rename variables to A, B, C, ... by first occurrence."""
        mapping: dict[str, str] = {}
        for v in self.vars():
            if v not in mapping:
                mapping[v] = ""
        names = canonical_arg_names(len(mapping))
        mapping = {v: names[i] for i, v in enumerate(mapping)}
        return self.rename(mapping)


@dataclass(frozen=True)
class Program:
    """Ordered clause list plus the derived predicate arity table."""

    clauses: tuple[Clause, ...]
    arities: dict[str, int] = field(init=False, hash=False, compare=False)

    def __post_init__(self) -> None:
        arities: dict[str, int] = {}
        for c in self.clauses:
            for atom in (c.head, *c.body):
                known = arities.setdefault(atom.pred, atom.arity)
                if known != atom.arity:
                    raise ArityError(
                        f"predicate {atom.pred} used with arities {known} and {atom.arity}"
                    )
            if any(b.pred == FALSE_PRED for b in c.body):
                raise ChcError(f"{FALSE_PRED} must not appear in a clause body")
            if len(set(c.head.args)) != len(c.head.args):
                raise ChcError(f"head arguments of {c.head.pred} are not distinct")
        object.__setattr__(self, "arities", arities)

    def preds(self) -> tuple[str, ...]:
        return tuple(self.arities)

    def clauses_for(self, pred: str) -> tuple[Clause, ...]:
        return tuple(c for c in self.clauses if c.head.pred == pred)

    @property
    def is_empty(self) -> bool:
        return not self.clauses


# ---------------------------------------------------------------------------
# Raw (as-parsed) clauses and normalization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RawAtom:
    """Atom whose arguments are arbitrary linear expressions."""

    pred: str
    args: tuple[LinExpr, ...] = ()


@dataclass(frozen=True)
class RawClause:
    """Clause as parsed: the head may be a constraint, body items interleave."""

    head: RawAtom | AtomicConstraint
    items: tuple[RawAtom | AtomicConstraint, ...] = ()


def normalize_clause(raw: RawClause) -> list[Clause]:
    """Bring a raw clause into normal form.

    Head arguments become distinct variables (with binding equalities added
    to the constraint), body atom arguments become variables, and a clause
    whose head is a constraint turns into integrity constraints by negating
    the head and distributing the resulting disjunction.
    """
    if isinstance(raw.head, AtomicConstraint):
        out: list[Clause] = []
        for disjunct in raw.head.negate():
            flipped = RawClause(RawAtom(FALSE_PRED), (disjunct,) + raw.items)
            out.extend(normalize_clause(flipped))
        return out

    taken = set()
    for item in (raw.head, *raw.items):
        if isinstance(item, RawAtom):
            for e in item.args:
                taken.update(e.vars())
        else:
            taken.update(item.vars())

    def lift(atom: RawAtom, head_args: set[str] | None) -> tuple[Atom, list[AtomicConstraint]]:
        args: list[str] = []
        eqs: list[AtomicConstraint] = []
        for e in atom.args:
            is_bare = len(e.coeffs) == 1 and e.coeffs[0][1] == 1 and e.const == 0
            v = e.coeffs[0][0] if is_bare else None
            if v is not None and (head_args is None or v not in head_args):
                args.append(v)
                if head_args is not None:
                    head_args.add(v)
                continue
            w = fresh_name(taken)
            taken.add(w)
            eqs.append(AtomicConstraint(LinExpr.var(w) - e, Rel.EQ))
            args.append(w)
            if head_args is not None:
                head_args.add(w)
        return Atom(atom.pred, tuple(args)), eqs

    head, conjuncts = lift(raw.head, set())
    body: list[Atom] = []
    for item in raw.items:
        if isinstance(item, AtomicConstraint):
            conjuncts.append(item)
        else:
            atom, eqs = lift(item, None)
            conjuncts.extend(eqs)
            body.append(atom)
    clause = Clause(head, Constraint.of(conjuncts), tuple(body))
    return [clause.with_canonical_vars()]


# ---------------------------------------------------------------------------
# Predicate dependency graph
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PredDepGraph:
    """Head-to-body-call edges with the backward subset marked by DFS."""

    nodes: tuple[str, ...]
    edges: frozenset[tuple[str, str]]
    backward: frozenset[tuple[str, str]]

    def backward_targets(self) -> frozenset[str]:
        return frozenset(q for _, q in self.backward)


def build_pdg(program: Program) -> PredDepGraph:
    """Dependency graph with backward edges from a depth-first search.

    The search starts at ``false`` and then covers remaining predicates in
    first-appearance order, visiting clauses in program order and body atoms
    left to right; an edge (p, q) is backward iff q is on the DFS stack when
    the edge is examined.
    """
    succs: dict[str, list[str]] = {p: [] for p in program.preds()}
    edges: set[tuple[str, str]] = set()
    for c in program.clauses:
        for b in c.body:
            succs[c.head.pred].append(b.pred)
            edges.add((c.head.pred, b.pred))

    backward: set[tuple[str, str]] = set()
    visited: set[str] = set()
    on_stack: set[str] = set()

    def dfs(root: str) -> None:
        # Iterative DFS; each stack entry is (node, iterator over successors).
        stack = [(root, iter(succs[root]))]
        visited.add(root)
        on_stack.add(root)
        while stack:
            node, it = stack[-1]
            advanced = False
            for q in it:
                if q in on_stack:
                    backward.add((node, q))
                elif q not in visited:
                    visited.add(q)
                    on_stack.add(q)
                    stack.append((q, iter(succs[q])))
                    advanced = True
                    break
            if not advanced:
                stack.pop()
                on_stack.discard(node)

    roots = [FALSE_PRED] if FALSE_PRED in succs else []
    roots.extend(p for p in program.preds() if p != FALSE_PRED)
    for r in roots:
        if r not in visited:
            dfs(r)

    nodes = tuple(program.preds())
    return PredDepGraph(nodes, frozenset(edges), frozenset(backward))


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

def _format_coeff_term(c: Fraction, v: str) -> str:
    if c == 1:
        return v
    if c == -1:
        return f"-{v}"
    return f"{c}*{v}"


def _format_side(terms: list[tuple[Fraction, str]], const: Fraction) -> str:
    if not terms and const == 0:
        return "0"
    parts: list[str] = []
    for c, v in terms:
        t = _format_coeff_term(c, v)
        if parts and not t.startswith("-"):
            parts.append("+")
        parts.append(t)
    if const != 0:
        if parts:
            parts.append(f"+{const}" if const > 0 else str(const))
        else:
            parts.append(str(const))
    return "".join(parts)


_FLIP = {Rel.GE: "=<", Rel.GT: "<", Rel.EQ: "="}


def format_atomic(a: AtomicConstraint) -> str:
    """Render ``expr REL 0`` with positive terms on the left.

    Examples: ``A=<99``, ``C=A+1``, ``A+B>=2``.
    """
    pos = [(c, v) for v, c in a.expr.coeffs if c > 0]
    neg = [(-c, v) for v, c in a.expr.coeffs if c < 0]
    k = a.expr.const
    if pos:
        return f"{_format_side(pos, ZERO)}{a.rel.value}{_format_side(neg, -k)}"
    # Only negative terms: present them on the left with a flipped relation.
    return f"{_format_side(neg, ZERO)}{_FLIP[a.rel]}{_format_side([], k)}"


def format_atomic_bracketed(a: AtomicConstraint) -> str:
    """Render with explicit coefficients, e.g. ``1*A+ -1*B>=0``."""
    a = a.normalized()
    if a.expr.is_const:
        return format_atomic(a)
    parts: list[str] = []
    for v, c in a.expr.coeffs:
        t = f"{c}*{v}"
        if parts:
            parts.append("+ " if t.startswith("-") else "+")
        parts.append(t)
    rhs = -a.expr.const
    sep = " " if rhs < 0 else ""
    return f"{''.join(parts)}{a.rel.value}{sep}{rhs}"


def format_atom(atom: Atom) -> str:
    if not atom.args:
        return atom.pred
    return f"{atom.pred}({','.join(atom.args)})"


def format_clause(c: Clause) -> str:
    items = [format_atomic(a) for a in c.constr] + [format_atom(b) for b in c.body]
    if not items:
        return f"{format_atom(c.head)}."
    return f"{format_atom(c.head)} :- {', '.join(items)}."


def print_program(program: Program) -> str:
    """Program text that re-parses to a structurally identical program."""
    return "".join(format_clause(c) + "\n" for c in program.clauses)
