"""Threshold constraints for bounded widening.

Thresholds are candidate bounds that the widening operator is allowed to
keep when both of its operands satisfy them.  They are harvested from a
short concrete prefix of the program's immediate-consequence iteration:
three steps starting from the top interpretation (every predicate holds of
every tuple), each fact projected onto the predicate's canonical argument
variables.  Every atomic conjunct appearing in those facts becomes a
threshold for its predicate.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping

from . import lincon
from .chc import (
    Atom,
    AtomicConstraint,
    Constraint,
    Program,
    canonical_arg_names,
    format_atom,
    format_atomic_bracketed,
)

# Facts of an interpretation are constraints over the canonical argument
# names of their predicate (A, B, C, ... for positions 0, 1, 2, ...).
Interpretation = dict[str, tuple[Constraint, ...]]


def top_interpretation(program: Program) -> Interpretation:
    """Every predicate holds of every argument tuple."""
    return {p: (Constraint.true(),) for p in program.arities}


def bottom_interpretation(program: Program) -> Interpretation:
    return {p: () for p in program.arities}


def _equivalent(f: Constraint, g: Constraint) -> bool:
    return lincon.entails_all(f.conjuncts, g.conjuncts) and lincon.entails_all(
        g.conjuncts, f.conjuncts
    )


# Bounds on the work a single consequence step may do.  Thresholds are
# candidate widening bounds, so skipping body-fact combinations, stopping a
# flooded predicate early, or falling back to syntactic duplicate detection
# loses candidates at worst; it never affects soundness.
_COMBO_BUDGET = 512
_SEMANTIC_DEDUP_LIMIT = 24


def tp_step(program: Program, interp: Interpretation, cap: int | None = None) -> Interpretation:
    """One immediate-consequence step: facts derivable in a single round.

    For each clause, every combination of body facts is conjoined with the
    clause constraint; satisfiable combinations are projected onto the head
    arguments and recorded (renamed to canonical names) as facts of the head
    predicate.  Facts equivalent to an already recorded one are skipped.
    With ``cap`` set, a predicate exceeding it first sheds facts subsumed by
    another fact and is then truncated to the first ``cap``.
    """
    new: dict[str, list[Constraint]] = {p: [] for p in program.arities}
    seen: dict[str, set[Constraint]] = {p: set() for p in program.arities}
    for clause in program.clauses:
        bucket = new[clause.head.pred]
        if cap is not None and len(bucket) >= 2 * cap:
            continue
        fact_lists: list[list[Constraint]] = []
        for atom in clause.body:
            facts = interp.get(atom.pred, ())
            if not facts:
                fact_lists = []
                break
            renamed = []
            names = canonical_arg_names(len(atom.args))
            mapping = dict(zip(names, atom.args))
            for f in facts:
                renamed.append(f.rename(mapping))
            fact_lists.append(renamed)
        if clause.body and not fact_lists:
            continue
        head_names = canonical_arg_names(clause.head.arity)
        head_map = dict(zip(clause.head.args, head_names))
        combos = itertools.islice(itertools.product(*fact_lists), _COMBO_BUDGET)
        for combo in combos:
            if cap is not None and len(bucket) >= 2 * cap:
                break
            conjuncts = list(clause.constr.conjuncts)
            for f in combo:
                conjuncts.extend(f.conjuncts)
            if not lincon.is_satisfiable(conjuncts):
                continue
            # Capped growth: threshold facts are candidate bounds, so an
            # over-approximate projection only makes candidates weaker.
            proj = lincon.project(conjuncts, clause.head.args, max_rows=400)
            fact = Constraint(lincon.normalize(a.rename(head_map) for a in proj))
            if fact in seen[clause.head.pred]:
                continue
            seen[clause.head.pred].add(fact)
            if len(bucket) <= _SEMANTIC_DEDUP_LIMIT and any(
                _equivalent(fact, g) for g in bucket
            ):
                continue
            bucket.append(fact)
    if cap is not None:
        for p, facts in new.items():
            if len(facts) > cap:
                slim = [
                    f
                    for i, f in enumerate(facts)
                    if not any(
                        j != i and lincon.entails_all(f.conjuncts, g.conjuncts)
                        for j, g in enumerate(facts)
                    )
                ]
                new[p] = slim[:cap]
    return {p: tuple(facts) for p, facts in new.items()}


@dataclass(frozen=True)
class ThresholdSet:
    """Per-predicate candidate bounds over canonical argument names."""

    entries: Mapping[str, tuple[AtomicConstraint, ...]] = field(default_factory=dict)

    @staticmethod
    def empty() -> "ThresholdSet":
        return ThresholdSet({})

    def get(self, pred: str) -> tuple[AtomicConstraint, ...]:
        return self.entries.get(pred, ())

    def __len__(self) -> int:
        return sum(len(v) for v in self.entries.values())


def atomconstraints(interp: Interpretation) -> ThresholdSet:
    """All atomic conjuncts of an interpretation's facts, per predicate."""
    entries: dict[str, tuple[AtomicConstraint, ...]] = {}
    for p, facts in interp.items():
        acc: set[AtomicConstraint] = set()
        for f in facts:
            for a in f:
                na = a.normalized()
                if not (na.is_trivially_true() or na.is_trivially_false()):
                    acc.add(na)
        entries[p] = tuple(sorted(acc, key=AtomicConstraint.sort_key))
    return ThresholdSet(entries)


def compute_thresholds(program: Program, cap: int = 200) -> ThresholdSet:
    """Thresholds from three concrete steps down from the top interpretation."""
    interp = top_interpretation(program)
    for _ in range(3):
        interp = tp_step(program, interp, cap=cap)
    return atomconstraints(interp)


def format_thresholds(
    ts: ThresholdSet, arities: Mapping[str, int] | None = None
) -> str:
    """One constrained-fact line per predicate, in name order."""
    lines = []
    for p in sorted(ts.entries):
        arity = (arities or {}).get(p, 0)
        atom = Atom(p, canonical_arg_names(arity))
        body = ",".join(format_atomic_bracketed(a) for a in ts.entries[p])
        lines.append(f"{format_atom(atom)} :- [{body}]")
    return "".join(line + "\n" for line in lines)
