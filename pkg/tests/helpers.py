"""Structural clause comparison helpers shared across test modules."""

from __future__ import annotations

from hornchain import lincon
from hornchain.chc import Clause, Program


def canon(c: Clause):
    """A clause key invariant under variable renaming and constraint order."""
    c = c.with_canonical_vars()
    return (
        c.head.pred,
        c.head.args,
        tuple((b.pred, b.args) for b in c.body),
        lincon.normalize(c.constr.conjuncts),
    )


def clause_multiset(p: Program) -> dict:
    out: dict = {}
    for c in p.clauses:
        k = canon(c)
        out[k] = out.get(k, 0) + 1
    return out


def same_program(p: Program, q: Program) -> bool:
    """Equality modulo clause order, variable names, constraint normalization."""
    return clause_multiset(p) == clause_multiset(q)
