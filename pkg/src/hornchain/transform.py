"""Semantics-preserving program transformations.

Four rewrites, each preserving whether ``false`` (or its image under the
rewrite) is derivable:

* ``raf_filter``      removes argument positions that never influence a
                      derivation, shrinking predicates.
* ``unfold_forward``  inlines calls along non-recursive edges until only
                      calls to recursion targets remain, then discards
                      unreachable definitions.
* ``query_answer``    specializes the program to the goal: every predicate
                      ``p`` splits into ``p_query`` (may be demanded by the
                      goal) and ``p_ans`` (derivable and demanded).
* ``split_predicates`` case-splits each predicate into variants with
                      mutually unsatisfiable clause groups, so the later
                      polyhedral analysis does not have to join them.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Sequence

from . import lincon
from .chc import (
    FALSE_PRED,
    FALSUM,
    Atom,
    AtomicConstraint,
    ChcError,
    Clause,
    Constraint,
    LinExpr,
    Program,
    Rel,
    build_pdg,
    canonical_arg_names,
    fresh_name,
)

_UNFOLD_BUDGET = 100_000


# ---------------------------------------------------------------------------
# Unfolding
# ---------------------------------------------------------------------------

def _standardize_apart(clause: Clause, taken: set[str]) -> Clause:
    mapping = {}
    used = set(taken)
    for v in clause.vars():
        if v in used:
            w = fresh_name(used)
            mapping[v] = w
            used.add(w)
        else:
            used.add(v)
    return clause.rename(mapping) if mapping else clause


def _unfold_with_defs(clause: Clause, at: int, defs: Sequence[Clause]) -> list[Clause]:
    """Replace the body atom at position ``at`` by each of its definitions."""
    call = clause.body[at]
    out: list[Clause] = []
    for d in defs:
        d2 = _standardize_apart(d, set(clause.vars()))
        # Bind fresh head parameters to the call's arguments; parameters are
        # fresh and pairwise distinct, so substitution removes them all.
        binding = {z: LinExpr.var(y) for z, y in zip(d2.head.args, call.args)}
        body = (
            clause.body[:at]
            + tuple(b.rename({z: y for z, y in zip(d2.head.args, call.args)}) for b in d2.body)
            + clause.body[at + 1 :]
        )
        constr = clause.constr.conjoin(d2.constr.subst(binding))
        if not lincon.is_satisfiable(constr):
            continue
        out.append(Clause(clause.head, constr, body).with_canonical_vars())
    return out


def unfold_clause(program: Program, clause: Clause, at: int) -> Program:
    """Unfold one body atom of one clause, replacing the clause in place.

    ``clause`` is located by structural equality (first occurrence).  The
    replacement clauses take its position; those with unsatisfiable
    constraints are dropped.
    """
    try:
        idx = program.clauses.index(clause)
    except ValueError:
        raise ChcError("clause to unfold is not part of the program") from None
    if not 0 <= at < len(clause.body):
        raise ChcError(f"clause has no body atom at position {at}")
    defs = program.clauses_for(clause.body[at].pred)
    reps = _unfold_with_defs(clause, at, defs)
    return Program(program.clauses[:idx] + tuple(reps) + program.clauses[idx + 1 :])


def _reachable_preds(program: Program, root: str) -> set[str]:
    succs: dict[str, set[str]] = {}
    for c in program.clauses:
        succs.setdefault(c.head.pred, set()).update(b.pred for b in c.body)
    seen: set[str] = set()
    work = [root]
    while work:
        p = work.pop()
        if p in seen:
            continue
        seen.add(p)
        work.extend(succs.get(p, ()))
    return seen


def _drop_unreachable(program: Program, root: str) -> Program:
    keep = _reachable_preds(program, root)
    return Program(tuple(c for c in program.clauses if c.head.pred in keep))


def unfold_forward(program: Program, goal_pred: str = FALSE_PRED) -> Program:
    """Inline every call that is not a target of a backward edge.

    Backward edges are determined once, on the input program's dependency
    graph; the unfolding then repeatedly rewrites the first offending call
    (scanning clauses top to bottom, body atoms left to right) with the
    current definitions of its predicate.  Definitions unreachable from the
    goal are discarded before and after.
    """
    program = _drop_unreachable(program, goal_pred)
    targets = build_pdg(program).backward_targets()
    clauses = list(program.clauses)
    steps = 0
    i = 0
    while i < len(clauses):
        c = clauses[i]
        at = next((k for k, b in enumerate(c.body) if b.pred not in targets), None)
        if at is None:
            i += 1
            continue
        defs = [d for d in clauses if d.head.pred == c.body[at].pred]
        clauses[i : i + 1] = _unfold_with_defs(c, at, defs)
        steps += 1
        if steps > _UNFOLD_BUDGET:
            raise ChcError("unfolding exceeded its rewrite budget")
    return _drop_unreachable(Program(tuple(clauses)), goal_pred)


# ---------------------------------------------------------------------------
# Redundant argument filtering
# ---------------------------------------------------------------------------

def raf_filter(program: Program, goal_pred: str = FALSE_PRED) -> Program:
    """Drop argument positions that cannot influence any derivation.

    A position (p, i) is erasable when, in every clause defining p, the
    i-th head argument variable occurs neither in the constraint nor at any
    non-erasable body position.  The set of erasable positions is the
    greatest fixpoint of that condition; goal positions are never erased.
    """
    erasable = {
        (p, i)
        for p, n in program.arities.items()
        if p != goal_pred
        for i in range(n)
    }
    changed = True
    while changed:
        changed = False
        for c in program.clauses:
            constr_vars = set(c.constr.vars())
            for i, v in enumerate(c.head.args):
                if (c.head.pred, i) not in erasable:
                    continue
                used = v in constr_vars or any(
                    w == v and (b.pred, j) not in erasable
                    for b in c.body
                    for j, w in enumerate(b.args)
                )
                if used:
                    erasable.discard((c.head.pred, i))
                    changed = True

    if not erasable:
        return program

    def filt(atom: Atom) -> Atom:
        args = tuple(
            a for i, a in enumerate(atom.args) if (atom.pred, i) not in erasable
        )
        return Atom(atom.pred, args)

    return Program(
        tuple(
            Clause(filt(c.head), c.constr, tuple(filt(b) for b in c.body))
            for c in program.clauses
        )
    )


# ---------------------------------------------------------------------------
# Query-answer transformation
# ---------------------------------------------------------------------------

def query_pred(pred: str, program: Program | None = None) -> str:
    return _qa_name(pred, "_query", program)


def answer_pred(pred: str, program: Program | None = None) -> str:
    return _qa_name(pred, "_ans", program)


def _qa_name(pred: str, suffix: str, program: Program | None) -> str:
    name = pred + suffix
    if program is not None:
        while name in program.arities:
            name += "_"
    return name


def _distinct_head(atom: Atom, taken: set[str]) -> tuple[Atom, list[AtomicConstraint]]:
    """Make head argument variables distinct, adding binding equalities."""
    seen: set[str] = set()
    args: list[str] = []
    eqs: list[AtomicConstraint] = []
    for v in atom.args:
        if v not in seen:
            seen.add(v)
            args.append(v)
            continue
        w = fresh_name(taken)
        taken.add(w)
        seen.add(w)
        args.append(w)
        eqs.append(AtomicConstraint(LinExpr.var(w) - LinExpr.var(v), Rel.EQ))
    return Atom(atom.pred, tuple(args)), eqs


def query_answer(program: Program, goal_pred: str = FALSE_PRED) -> Program:
    """Specialize the program with respect to the goal.

    For every clause ``H :- C, B1, ..., Bk`` the result contains the answer
    clause ``H_ans :- C, H_query, B1_ans, ..., Bk_ans`` and, for each i, the
    query clause ``Bi_query :- C, H_query, B1_ans, ..., B(i-1)_ans``.  The
    goal's query is seeded unconditionally.  Derivability of the goal is
    preserved: ``goal_ans`` is derivable iff the goal was.
    """
    q = {p: query_pred(p, program) for p in program.arities}
    a = {p: answer_pred(p, program) for p in program.arities}
    goal_arity = program.arities.get(goal_pred, 0)
    q.setdefault(goal_pred, query_pred(goal_pred, program))

    out: list[Clause] = []
    for c in program.clauses:
        head = Atom(a[c.head.pred], c.head.args)
        body = (Atom(q[c.head.pred], c.head.args),) + tuple(
            Atom(a[b.pred], b.args) for b in c.body
        )
        out.append(Clause(head, c.constr, body).with_canonical_vars())
    for c in program.clauses:
        for i, b in enumerate(c.body):
            taken = set(c.vars())
            head, eqs = _distinct_head(Atom(q[b.pred], b.args), taken)
            body = (Atom(q[c.head.pred], c.head.args),) + tuple(
                Atom(a[c.body[j].pred], c.body[j].args) for j in range(i)
            )
            constr = Constraint(c.constr.conjuncts + tuple(eqs))
            out.append(Clause(head, constr, body).with_canonical_vars())
    seed_args = canonical_arg_names(goal_arity)
    out.append(Clause(Atom(q[goal_pred], seed_args)))
    return Program(tuple(out))


# ---------------------------------------------------------------------------
# Predicate splitting
# ---------------------------------------------------------------------------

def _clause_projection(c: Clause) -> tuple[AtomicConstraint, ...]:
    """The clause constraint projected onto canonical head argument names."""
    proj = lincon.project(c.constr, c.head.args)
    names = dict(zip(c.head.args, canonical_arg_names(len(c.head.args))))
    return lincon.normalize(a.rename(names) for a in proj)


def split_predicates(
    program: Program, protected: Iterable[str] = (FALSE_PRED,)
) -> Program:
    """Split each predicate into variants with disjoint clause groups.

    Clauses of a predicate are partitioned into the finest blocks such that
    clauses whose head-projected constraints overlap land in the same block
    (transitively).  Block j of predicate p defines ``p___j`` (1-based, in
    order of first clause appearance), and every call site is expanded to
    the disjunction over the variants, i.e. one clause per combination.
    Protected predicates (the goal) keep their name and single variant.
    """
    protected = set(protected) | {FALSE_PRED}

    variants: dict[str, list[str]] = {}
    block_of: dict[int, str] = {}  # clause index -> variant name
    for pred in program.arities:
        idxs = [i for i, c in enumerate(program.clauses) if c.head.pred == pred]
        if pred in protected:
            for i in idxs:
                block_of[i] = pred
            variants[pred] = [pred] if idxs else [pred]
            continue
        projs = {i: _clause_projection(program.clauses[i]) for i in idxs}
        parent = {i: i for i in idxs}

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i, j in itertools.combinations(idxs, 2):
            if find(i) != find(j) and lincon.is_satisfiable(projs[i] + projs[j]):
                parent[find(i)] = find(j)
        blocks: dict[int, list[int]] = {}
        for i in idxs:
            blocks.setdefault(find(i), []).append(i)
        ordered = sorted(blocks.values(), key=min)
        names = [f"{pred}___{k + 1}" for k in range(len(ordered))]
        for name, members in zip(names, ordered):
            for i in members:
                block_of[i] = name
        variants[pred] = names

    out: list[Clause] = []
    for i, c in enumerate(program.clauses):
        head = Atom(block_of[i], c.head.args)
        choice_lists = [
            [Atom(v, b.args) for v in variants.get(b.pred, [])] for b in c.body
        ]
        for combo in itertools.product(*choice_lists):
            out.append(Clause(head, c.constr, tuple(combo)))
    return Program(tuple(out))
