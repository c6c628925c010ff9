"""Independent oracles and random-instance suites for the polyhedra domain.

Everything here avoids the package's own decision procedures: membership is
decided by direct evaluation, sets of integer points are enumerated with
exact int64 arithmetic, and convex hulls of integer point sets are computed
by brute-force facet enumeration (exact integer cross products and one-sided
tests).  The suites return ``(instances, failures)`` so both the unit tests
and the acceptance gate can share one run.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction
from itertools import combinations

import numpy as np

from hornchain.chc import (
    FALSUM,
    AtomicConstraint,
    Constraint,
    LinExpr,
    Rel,
    canonical_arg_names,
)
from hornchain.polydom import Polyhedron

GRID_BOUND = 12  # oracle box is [-GRID_BOUND, GRID_BOUND]^d
POINT_RANGE = 10  # random vertices are drawn from [-POINT_RANGE, POINT_RANGE]^d


# ---------------------------------------------------------------------------
# Point membership and integer-grid enumeration
# ---------------------------------------------------------------------------

def satisfies_point(conjuncts, point, names) -> bool:
    """Evaluate each atomic at an integer/rational point, exactly."""
    env = {n: Fraction(x) for n, x in zip(names, point)}
    for a in conjuncts:
        v = a.expr.evaluate(env)
        ok = v > 0 if a.rel is Rel.GT else (v >= 0 if a.rel is Rel.GE else v == 0)
        if not ok:
            return False
    return True


def grid_points(conjuncts, d: int, bound: int = GRID_BOUND) -> frozenset:
    """All integer points of [-bound, bound]^d satisfying the conjunction.

    Constraints are scaled to integer coefficient rows, so the int64
    evaluation is exact for the magnitudes used here.
    """
    names = canonical_arg_names(d)
    axes = np.arange(-bound, bound + 1, dtype=np.int64)
    mesh = np.meshgrid(*([axes] * d), indexing="ij")
    pts = np.stack([g.ravel() for g in mesh], axis=1)
    mask = np.ones(len(pts), dtype=bool)
    for a in conjuncts:
        na = a.normalized()
        if na.is_trivially_true():
            continue
        if na.is_trivially_false():
            return frozenset()
        den = na.expr.const.denominator
        row = np.zeros(d, dtype=np.int64)
        for v, c in na.expr.coeffs:
            assert v in names, f"constraint variable {v} outside dimensions"
            assert c.denominator == 1
            row[names.index(v)] = int(c) * den
        cval = int(na.expr.const * den)
        vals = pts @ row + cval
        if na.rel is Rel.EQ:
            mask &= vals == 0
        elif na.rel is Rel.GT:
            mask &= vals > 0
        else:
            mask &= vals >= 0
    return frozenset(map(tuple, pts[mask].tolist()))


def poly_grid(p: Polyhedron, bound: int = GRID_BOUND) -> frozenset:
    if p.is_empty:
        return frozenset()
    return grid_points(p.conjuncts(), len(p.dims), bound)


# ---------------------------------------------------------------------------
# Exact convex hull of an integer point set (dimensions 1..3)
# ---------------------------------------------------------------------------

def _sub(p, q):
    return tuple(a - b for a, b in zip(p, q))


def _dot(p, q):
    return sum(a * b for a, b in zip(p, q))


def _scale_vec(v, k):
    return tuple(a * k for a in v)


def _vec_sub(p, q):
    return tuple(a - b for a, b in zip(p, q))


def _independent_basis(diffs):
    """Subset of the difference vectors that is linearly independent."""
    rows: list[tuple[Fraction, ...]] = []
    basis = []
    for v in diffs:
        work = tuple(Fraction(x) for x in v)
        for r in rows:
            lead = next(i for i, x in enumerate(r) if x != 0)
            if work[lead] != 0:
                f = work[lead] / r[lead]
                work = tuple(w - f * x for w, x in zip(work, r))
        if any(x != 0 for x in work):
            rows.append(work)
            basis.append(v)
    return basis


def _nullspace(basis, d):
    """Integer basis of the space orthogonal to all given vectors."""
    rows = [tuple(Fraction(x) for x in v) for v in basis]
    # Reduced row echelon form.
    reduced: list[tuple[Fraction, ...]] = []
    pivots: list[int] = []
    for r in rows:
        for pr, pc in zip(reduced, pivots):
            if r[pc] != 0:
                f = r[pc] / pr[pc]
                r = tuple(a - f * b for a, b in zip(r, pr))
        lead = next((i for i, x in enumerate(r) if x != 0), None)
        if lead is None:
            continue
        reduced = [
            tuple(a - (pr[lead] / r[lead]) * b for a, b in zip(pr, r))
            if pr[lead] != 0
            else pr
            for pr in reduced
        ]
        reduced.append(r)
        pivots.append(lead)
    free = [i for i in range(d) if i not in pivots]
    out = []
    for f in free:
        vec = [Fraction(0)] * d
        vec[f] = Fraction(1)
        for pr, pc in zip(reduced, pivots):
            vec[pc] = -pr[f] / pr[pc]
        lcm = 1
        for x in vec:
            lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
        out.append(tuple(int(x * lcm) for x in vec))
    return out


def _normal_in_span(basis, edge):
    """Nonzero vector in span(basis) orthogonal to ``edge`` (2-dim span)."""
    ee = _dot(edge, edge)
    for b in basis:
        n = _vec_sub(_scale_vec(b, ee), _scale_vec(edge, _dot(b, edge)))
        if any(x != 0 for x in n):
            return n
    return None


def _cross(u, v):
    return (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )


def _facet_from_normal(n, anchor, pts, names):
    """One-sided test: normal*(p - anchor) keeps one sign -> facet, else None."""
    sides = [_dot(n, _sub(p, anchor)) for p in pts]
    if all(s >= 0 for s in sides):
        expr = LinExpr.build(
            {names[i]: Fraction(c) for i, c in enumerate(n)},
            Fraction(-_dot(n, anchor)),
        )
        return AtomicConstraint(expr, Rel.GE).normalized()
    if all(s <= 0 for s in sides):
        expr = LinExpr.build(
            {names[i]: Fraction(-c) for i, c in enumerate(n)},
            Fraction(_dot(n, anchor)),
        )
        return AtomicConstraint(expr, Rel.GE).normalized()
    return None


def hull_from_points(points) -> list[AtomicConstraint]:
    """Exact constraint representation of conv(points) for dimension 1..3.

    Equalities describe the affine hull (nullspace of the difference
    vectors); inequalities are facets found by one-sided tests over all
    point subsets that can span a facet.  Every facet of the hull of a
    finite point set contains enough of the generating points, so the
    enumeration is complete.
    """
    pts = sorted(set(map(tuple, points)))
    if not pts:
        return [FALSUM]
    d = len(pts[0])
    names = canonical_arg_names(d)
    p0 = pts[0]
    basis = _independent_basis([_sub(p, p0) for p in pts[1:]])
    k = len(basis)

    out: list[AtomicConstraint] = []
    for n in _nullspace(basis, d):
        expr = LinExpr.build(
            {names[i]: Fraction(c) for i, c in enumerate(n)},
            Fraction(-_dot(n, p0)),
        )
        out.append(AtomicConstraint(expr, Rel.EQ).normalized())

    facets: set[AtomicConstraint] = set()
    if k == 1:
        t = basis[0]
        vals = [_dot(t, p) for p in pts]
        lo, hi = min(vals), max(vals)
        for n, b in (((t), -lo), (_scale_vec(t, -1), hi)):
            expr = LinExpr.build(
                {names[i]: Fraction(c) for i, c in enumerate(n)}, Fraction(b)
            )
            facets.add(AtomicConstraint(expr, Rel.GE).normalized())
    elif k == 2:
        for a, b in combinations(pts, 2):
            edge = _sub(b, a)
            n = _normal_in_span(basis, edge)
            if n is None:
                continue
            f = _facet_from_normal(n, a, pts, names)
            if f is not None:
                facets.add(f)
    elif k == 3:
        for a, b, c in combinations(pts, 3):
            n = _cross(_sub(b, a), _sub(c, a))
            if all(x == 0 for x in n):
                continue
            f = _facet_from_normal(n, a, pts, names)
            if f is not None:
                facets.add(f)

    out.extend(sorted(facets, key=AtomicConstraint.sort_key))
    return out


# ---------------------------------------------------------------------------
# Random instances
# ---------------------------------------------------------------------------

def random_point_set(rng: random.Random, d: int, max_points: int = 5):
    n = rng.randint(1, max_points)
    return [
        tuple(rng.randint(-POINT_RANGE, POINT_RANGE) for _ in range(d))
        for _ in range(n)
    ]


def random_system(rng: random.Random, d: int, max_atoms: int = 6):
    """A random conjunction of small-coefficient constraints."""
    names = canonical_arg_names(d)
    atoms = []
    for _ in range(rng.randint(1, max_atoms)):
        nvars = rng.randint(1, d)
        chosen = rng.sample(names, nvars)
        coeffs = {}
        for v in chosen:
            c = rng.choice((-3, -2, -1, 1, 2, 3))
            coeffs[v] = Fraction(c)
        const = Fraction(rng.randint(-POINT_RANGE, POINT_RANGE))
        rel = rng.choice((Rel.GE, Rel.GE, Rel.GE, Rel.EQ, Rel.GT))
        atoms.append(AtomicConstraint(LinExpr.build(coeffs, const), rel))
    return atoms


def relax_all(atomics):
    """Close a system the way the polyhedra domain does on entry."""
    return [a.relax() for a in atomics]


def point_polyhedron(z) -> Polyhedron:
    d = len(z)
    names = canonical_arg_names(d)
    atoms = [
        AtomicConstraint(LinExpr.build({names[i]: Fraction(1)}, Fraction(-v)), Rel.EQ)
        for i, v in enumerate(z)
    ]
    return Polyhedron.of(names, atoms)


def _measure(p: Polyhedron) -> int:
    """Conjunct count with equalities counted twice (their split size)."""
    return sum(2 if a.rel is Rel.EQ else 1 for a in p.conjuncts())


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------

def run_hull_suite(seed: int = 20260815, per_dim: int = 60):
    """Computed hulls must match the facet oracle on the integer grid."""
    rng = random.Random(seed)
    failures: list[str] = []
    instances = 0
    for d in (1, 2, 3):
        names = canonical_arg_names(d)
        for i in range(per_dim):
            s1 = random_point_set(rng, d)
            s2 = random_point_set(rng, d)
            p = Polyhedron.of(names, hull_from_points(s1))
            q = Polyhedron.of(names, hull_from_points(s2))
            h = p.hull(q)
            truth = hull_from_points(s1 + s2)
            instances += 1
            tag = f"hull d={d} #{i}: {s1} | {s2}"
            if poly_grid(h) != grid_points(truth, d):
                failures.append(f"{tag}: grid mismatch with facet oracle")
                continue
            if not (h.includes(p) and h.includes(q)):
                failures.append(f"{tag}: hull does not include an operand")
    return instances, failures


def run_meet_suite(seed: int = 20260815, count: int = 120):
    """Canonicalization and meet must agree with the raw-grid oracle."""
    rng = random.Random(seed)
    failures: list[str] = []
    instances = 0
    for i in range(count):
        d = rng.randint(1, 3)
        names = canonical_arg_names(d)
        raw1 = random_system(rng, d)
        raw2 = random_system(rng, d)
        p = Polyhedron.of(names, raw1)
        q = Polyhedron.of(names, raw2)
        instances += 1
        tag = f"meet d={d} #{i}"
        # The domain closes strict constraints on entry, so the oracle
        # compares against the relaxed systems.
        g1 = grid_points(relax_all(raw1), d)
        g2 = grid_points(relax_all(raw2), d)
        if poly_grid(p) != g1:
            failures.append(f"{tag}: canonicalization changed the grid")
            continue
        m = p.meet(q)
        if poly_grid(m) != g1 & g2:
            failures.append(f"{tag}: meet grid differs from intersection")
    return instances, failures


def run_includes_suite(seed: int = 20260815, per_kind: int = 40):
    """Inclusion agrees with construction, point evaluation, and the grid."""
    rng = random.Random(seed)
    failures: list[str] = []
    instances = 0
    for i in range(per_kind):
        d = rng.randint(1, 3)
        names = canonical_arg_names(d)

        # (a) a meet is included in both operands, by construction
        p = Polyhedron.of(names, random_system(rng, d))
        r = Polyhedron.of(names, random_system(rng, d))
        sub = p.meet(r)
        instances += 1
        if not p.includes(sub):
            failures.append(f"includes (meet) d={d} #{i}: refused its own meet")

        # (b) point membership agrees with direct evaluation (of the
        # relaxed system, which is what the domain represents)
        z = tuple(rng.randint(-GRID_BOUND + 1, GRID_BOUND - 1) for _ in range(d))
        raw = random_system(rng, d)
        q = Polyhedron.of(names, raw)
        expected = satisfies_point(relax_all(raw), z, names)
        instances += 1
        if q.includes(point_polyhedron(z)) != expected:
            failures.append(f"includes (point) d={d} #{i}: z={z}")
        if q.contains_point(z) != expected:
            failures.append(f"contains_point d={d} #{i}: z={z}")

        # (c) a positive inclusion implies grid containment; reflexivity
        a = Polyhedron.of(names, random_system(rng, d))
        b = Polyhedron.of(names, random_system(rng, d))
        instances += 1
        if a.includes(b) and not poly_grid(b) <= poly_grid(a):
            failures.append(f"includes (grid) d={d} #{i}: claimed but refuted")
        if not a.includes(a):
            failures.append(f"includes (reflexive) d={d} #{i}")
    return instances, failures


def run_widen_suite(seed: int = 20260815, count: int = 60):
    """Both widenings must include both operands; thresholds only tighten."""
    rng = random.Random(seed)
    failures: list[str] = []
    instances = 0
    for i in range(count):
        d = rng.randint(1, 3)
        names = canonical_arg_names(d)
        x = Polyhedron.of(names, random_system(rng, d))
        grow = Polyhedron.of(names, hull_from_points(random_point_set(rng, d)))
        y = x.hull(grow)
        w = x.widen(y)
        instances += 1
        tag = f"widen d={d} #{i}"
        if not (w.includes(x) and w.includes(y)):
            failures.append(f"{tag}: result excludes an operand")
            continue
        if not (poly_grid(x) | poly_grid(y)) <= poly_grid(w):
            failures.append(f"{tag}: grid point escaped the widening")
        ts = random_system(rng, d)
        wu = x.widen_upto(y, ts)
        if not (wu.includes(x) and wu.includes(y)):
            failures.append(f"{tag}: threshold widening excludes an operand")
        if not w.includes(wu):
            failures.append(f"{tag}: thresholds failed to tighten plain widening")
    return instances, failures


def run_chain_suite(seed: int = 20260815, count: int = 30):
    """Widening chains stabilize within the starting conjunct measure."""
    rng = random.Random(seed)
    failures: list[str] = []
    instances = 0
    for i in range(count):
        d = rng.randint(1, 3)
        names = canonical_arg_names(d)
        x = Polyhedron.of(names, hull_from_points(random_point_set(rng, d)))
        for _ in range(2):  # growth phase, as before a widening delay
            x = x.hull(Polyhedron.of(names, hull_from_points(random_point_set(rng, d))))
        m = _measure(x)
        changes = 0
        for _ in range(m + 5):
            t = x.hull(Polyhedron.of(names, hull_from_points(random_point_set(rng, d))))
            w = x.widen(t)
            if w.includes(x) and x.includes(w):
                continue
            changes += 1
            x = w
        instances += 1
        if changes > m:
            failures.append(
                f"chain d={d} #{i}: {changes} strict widenings for measure {m}"
            )
    return instances, failures


def run_polyhedra_suites(seed: int = 20260815):
    """All domain suites; at least 500 instances in total."""
    results = {
        "hull": run_hull_suite(seed),
        "meet": run_meet_suite(seed + 1),
        "includes": run_includes_suite(seed + 2),
        "widen": run_widen_suite(seed + 3),
        "chain": run_chain_suite(seed + 4),
    }
    return results
