"""Polyhedral abstract interpretation of CHC programs.

``analyze`` computes, per predicate, a convex polyhedron over-approximating
the set of argument tuples in the program's least model.  Evaluation runs
one strongly connected component of the predicate dependency graph at a
time, callees first.  Inside a cyclic component, round-robin passes update
each predicate with the convex hull of its old value and its clause
contributions; after ``widen_delay`` strict updates the hull is replaced by
threshold-bounded widening, which forces termination.

``check_safety`` reads the verdict off the model: if the goal predicate's
polyhedron is empty, no derivation of the goal exists, so the program is
safe.  A non-empty goal polyhedron proves nothing (the model
over-approximates), hence the other verdict is Unknown, never Unsafe.

``bounded_concrete_eval`` is an exact bottom-up evaluation cut off at a
fixed depth, used as an oracle when testing that transformations preserve
derivability of the goal.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence

from . import lincon
from .chc import (
    FALSE_PRED,
    Atom,
    ChcError,
    Program,
    build_pdg,
    canonical_arg_names,
    format_atom,
)
from .polydom import Polyhedron, format_polyhedron
from .thresholds import (
    Interpretation,
    ThresholdSet,
    bottom_interpretation,
    tp_step,
)


class Verdict(Enum):
    SAFE = "safe"
    UNKNOWN = "unknown"


# Growth cap for clause-body projections.  Hitting it loses constraints,
# which only coarsens the over-approximation; verdict soundness is kept.
_PROJECT_CAP = 400


@dataclass(frozen=True)
class AbstractModel:
    """Map from predicate to polyhedron over its canonical argument names."""

    polys: Mapping[str, Polyhedron]

    def poly(self, pred: str) -> Polyhedron | None:
        return self.polys.get(pred)

    def nonempty_preds(self) -> tuple[str, ...]:
        return tuple(
            sorted(p for p, poly in self.polys.items() if not poly.is_empty)
        )


@dataclass(frozen=True)
class AnalysisStats:
    """Counters describing the fixpoint iteration, independent of timing."""

    passes: int      # total round-robin passes over components
    updates: int     # predicate value updates that strictly grew a value
    widenings: int   # updates that went through the widening operator


def _sccs(nodes: Sequence[str], succs: Mapping[str, Sequence[str]]) -> list[tuple[str, ...]]:
    """Tarjan's algorithm, iterative; components come out callees-first."""
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    out: list[tuple[str, ...]] = []
    counter = 0

    for root in nodes:
        if root in index:
            continue
        work: list[tuple[str, int]] = [(root, 0)]
        while work:
            node, next_child = work[-1]
            if next_child == 0:
                index[node] = low[node] = counter
                counter += 1
                stack.append(node)
                on_stack.add(node)
            adj = succs[node]
            descended = False
            for k in range(next_child, len(adj)):
                child = adj[k]
                if child not in index:
                    work[-1] = (node, k + 1)
                    work.append((child, 0))
                    descended = True
                    break
                if child in on_stack:
                    low[node] = min(low[node], index[child])
            if descended:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == node:
                        break
                out.append(tuple(comp))
    return out


def analyze(
    program: Program,
    thresholds: ThresholdSet | None = None,
    widen_delay: int = 2,
    max_passes: int = 10_000,
) -> tuple[AbstractModel, AnalysisStats]:
    """Compute an over-approximating polyhedral model of the program."""
    ts = thresholds if thresholds is not None else ThresholdSet.empty()
    preds = list(program.arities)
    order = {p: i for i, p in enumerate(preds)}
    dims = {p: canonical_arg_names(n) for p, n in program.arities.items()}
    clauses_of = {p: program.clauses_for(p) for p in preds}

    pdg = build_pdg(program)
    succs: dict[str, list[str]] = {p: [] for p in preds}
    for c in program.clauses:
        for b in c.body:
            if b.pred not in succs[c.head.pred]:
                succs[c.head.pred].append(b.pred)

    values: dict[str, Polyhedron] = {p: Polyhedron.empty(dims[p]) for p in preds}
    update_count = {p: 0 for p in preds}
    passes = updates = widenings = 0

    def contributions(pred: str) -> Polyhedron:
        acc = Polyhedron.empty(dims[pred])
        for clause in clauses_of[pred]:
            conjuncts = list(clause.constr.conjuncts)
            feasible = True
            for atom in clause.body:
                poly = values[atom.pred]
                if poly.is_empty:
                    feasible = False
                    break
                mapping = dict(zip(poly.dims, atom.args))
                conjuncts.extend(a.rename(mapping) for a in poly.conjuncts())
            if not feasible:
                continue
            proj = lincon.project(conjuncts, clause.head.args, max_rows=_PROJECT_CAP)
            head_map = dict(zip(clause.head.args, dims[pred]))
            contrib = Polyhedron.of(dims[pred], (a.rename(head_map) for a in proj))
            acc = acc.hull(contrib)
        return acc

    for comp in _sccs(preds, succs):
        members = sorted(comp, key=order.__getitem__)
        cyclic = len(members) > 1 or any(
            (p, p) in pdg.edges for p in members
        )
        while True:
            passes += 1
            changed = False
            for p in members:
                grown = values[p].hull(contributions(p))
                if values[p].includes(grown):
                    continue
                update_count[p] += 1
                if cyclic and update_count[p] > widen_delay:
                    relaxed = tuple(t.relax() for t in ts.get(p))
                    values[p] = values[p].widen_upto(grown, relaxed)
                    widenings += 1
                else:
                    values[p] = grown
                updates += 1
                changed = True
            if not changed or not cyclic:
                break
            if passes > max_passes:
                raise ChcError("abstract iteration exceeded its pass budget")

    model = AbstractModel(dict(values))
    return model, AnalysisStats(passes, updates, widenings)


def check_safety(model: AbstractModel, goal_pred: str = FALSE_PRED) -> Verdict:
    """Safe iff the model assigns the goal predicate the empty polyhedron."""
    poly = model.poly(goal_pred)
    if poly is None or poly.is_empty:
        return Verdict.SAFE
    return Verdict.UNKNOWN


def format_model(model: AbstractModel) -> str:
    """Constrained-fact lines for the non-empty predicates, in name order."""
    lines = []
    for p in model.nonempty_preds():
        poly = model.polys[p]
        atom = Atom(p, poly.dims)
        lines.append(f"{format_atom(atom)} :- {format_polyhedron(poly)}")
    return "".join(line + "\n" for line in lines)


@dataclass(frozen=True)
class BoundedResult:
    derived: bool     # the goal was derived within the depth bound
    saturated: bool   # a fixpoint was reached before the bound
    rounds: int       # immediate-consequence rounds actually executed


class BudgetExceeded(ChcError):
    """Concrete evaluation grew past its fact budget."""


def _compress(interp: Interpretation) -> Interpretation:
    """Drop facts whose tuples are covered by another single fact."""
    out: Interpretation = {}
    for p, facts in interp.items():
        kept: list = []
        for i, f in enumerate(facts):
            subsumed = False
            for j, g in enumerate(facts):
                if i == j:
                    continue
                if lincon.entails_all(f.conjuncts, g.conjuncts):
                    # Break ties (mutual entailment) by keeping the earlier.
                    if j < i or not lincon.entails_all(g.conjuncts, f.conjuncts):
                        subsumed = True
                        break
            if not subsumed:
                kept.append(f)
        out[p] = tuple(kept)
    return out


def _covered(new: Interpretation, old: Interpretation) -> bool:
    for p, facts in new.items():
        for f in facts:
            if not any(
                lincon.entails_all(f.conjuncts, g.conjuncts) for g in old.get(p, ())
            ):
                return False
    return True


def bounded_concrete_eval(
    program: Program,
    goal_pred: str = FALSE_PRED,
    depth: int = 6,
    max_facts: int | None = None,
) -> BoundedResult:
    """Exact bottom-up evaluation, cut off after ``depth`` rounds.

    Returns whether the goal predicate became derivable, and whether the
    iteration provably saturated (the last round added nothing new), in
    which case the derivability answer is exact rather than bounded.
    Subsumed facts are dropped between rounds; that preserves the set of
    derivable tuples, so exactness is unaffected.
    """
    interp = bottom_interpretation(program)
    for round_no in range(1, depth + 1):
        nxt = _compress(tp_step(program, interp))
        if nxt.get(goal_pred):
            return BoundedResult(True, False, round_no)
        if max_facts is not None:
            total = sum(len(v) for v in nxt.values())
            if total > max_facts:
                raise BudgetExceeded(
                    f"round {round_no} holds {total} facts (budget {max_facts})"
                )
        if _covered(nxt, interp):
            return BoundedResult(False, True, round_no)
        interp = nxt
    return BoundedResult(False, False, depth)
