"""Acceptance criteria 1-8.

Each test times itself, records a pass/fail line in ``conftest.ACCEPTANCE``
(printed in the terminal summary) and then asserts.
"""

from __future__ import annotations

import time
from dataclasses import replace
from fractions import Fraction

import pytest
from conftest import ACCEPTANCE, B_shape, NxN

from padictri.cells import (
    MonomialCell,
    MonomialFn,
    cell_member,
    check_bounded,
    fitting_oracle,
    is_fitting,
    mu_v,
    sample_cell,
)
from padictri.dispatch import (
    build_lift,
    check_dispatch,
    dispatch,
    phi_continuity,
    phi_roundtrip,
)
from padictri.errors import PreconditionViolation
from padictri.generators import random_monoplex, random_polytope, random_socle_tree, socle_complex
from padictri.good_direction import certify_direction, find_direction, shear
from padictri.lp import integer_point
from padictri.oracle import SplitMix64, classify_extension, grid_members, sample_padic
from padictri.padic import INF, SubgroupSpec, as_padic, in_subgroup, nth_root, valuation, vp
from padictri.polynomial import Polynomial
from padictri.polytope import (
    AffineMap,
    Extension,
    _relaxation,
    all_faces,
    contains_exact,
    extend_to_face,
    face,
    is_simplex,
    optimize,
    point_polytope,
    same_set,
)
from padictri.simplex import approach_point, build_retraction, faces_of, make_simplex, member, retraction_certificate


def record(k: int, ok: bool, detail: str) -> None:
    prev = ACCEPTANCE.get(k)
    if prev is not None:
        ok = ok and prev[0]
        detail = f"{prev[1]}; {detail}"
    ACCEPTANCE[k] = (ok, detail)


class Timer:
    def __init__(self, limit: float):
        self.limit = limit

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start

    @property
    def ok(self) -> bool:
        return self.elapsed < self.limit

    def __str__(self) -> str:
        return f"{self.elapsed:.2f}s/{self.limit:g}s"


# ---------------------------------------------------------------------------
# 1. paper examples


def test_criterion_1_paper_examples():
    problems = []
    with Timer(1.0) as t:
        A, B = NxN(), B_shape()
        rep = is_simplex(A)
        if rep.is_simplex or set(rep.incomparable) != {frozenset({0}), frozenset({1})}:
            problems.append("NxN")
        facets = [J for J in all_faces(A) if len(J) == 1]
        if sorted(map(sorted, facets)) != [[0], [1]]:
            problems.append("NxN facets")
        rep = is_simplex(B)
        if not rep.is_simplex or rep.chain[:-1] != [frozenset(), frozenset({1})]:
            problems.append("B faces")
        f = AffineMap.make(0, {1: 2, 0: -2})
        if extend_to_face(f, B, set()).kind != Extension.NOT_EXTENDABLE:
            problems.append("2y-2x")
        S = make_simplex(B, 1)
        chain = faces_of(S).chain
        if len(chain) != 3 or not (member(S, (9, 3), 3) and not member(S, (3, 9), 3)):
            problems.append("S")
    ok = not problems and t.ok
    record(1, ok, f"{t} {problems or 'all examples reproduced'}")
    assert ok, problems


# ---------------------------------------------------------------------------
# 2. Hensel roots


def _random_unit_rational(rng: SplitMix64, p: int) -> Fraction:
    while True:
        a, b = rng.between(1, 10**6), rng.between(1, 10**4)
        if a % p and b % p:
            return Fraction(a if rng.chance(1, 2) else -a, b)


def test_criterion_2_hensel():
    problems = []
    checked = 0
    with Timer(5.0) as t:
        for p, e in [(3, 2), (2, 3), (5, 4), (7, 6)]:
            rng = SplitMix64(p * 100 + e)
            ve = int(vp(e, p))
            m = 2 * ve + 1
            for _ in range(200):
                k = rng.between(-3, 3)
                x = as_padic(Fraction(p) ** (e * k) * (1 + p**m * _random_unit_rational(rng, p)), p, 30)
                y = nth_root(x, e)
                ye = y**e
                if ye.valuation != x.valuation or ye.precision < 20 or ye.unit_mod(20) != x.unit_mod(20):
                    problems.append(f"root^e != x ({p},{e})")
                if not in_subgroup(y, SubgroupSpec.Q(1, ve + 1)):
                    problems.append(f"root not in Q_1,v+1 ({p},{e})")
                # image law: Q_{N,M} -> Q_{eN, v(e)+M} under y -> y^e
                N, M = rng.between(1, 3), ve + rng.between(1, 3)
                z = as_padic(Fraction(p) ** (N * rng.between(-2, 2)) * (1 + p**M * _random_unit_rational(rng, p)), p, 30)
                if not in_subgroup(z, SubgroupSpec.Q(N, M)) or not in_subgroup(z**e, SubgroupSpec.Q(e * N, ve + M)):
                    problems.append(f"image law ({p},{e})")
                checked += 1
    ok = not problems and t.ok
    record(2, ok, f"{t} {checked} roots and images checked, {len(problems)} failures")
    assert ok, problems[:5]


# ---------------------------------------------------------------------------
# 3. dispatch


def _swap_same_socle_pair(mono):
    """Put a type-1 cell below the type-0 cell over the same socle."""
    for a, b in enumerate(mono.parent):
        if b is None:
            continue
        A, B = mono.cells[a], mono.cells[b]
        if A.type == 1 and B.type == 0 and A.socle.support == B.socle.support:
            cells = list(mono.cells)
            cells[a], cells[b] = B, A
            return type(mono)(cells, list(mono.parent))
    return None


def _drop_inner_cell(mono):
    """Remove a non-root, non-leaf cell whose socle no other cell carries."""
    for b, B in enumerate(mono.cells):
        if mono.parent[b] is None or not mono.children(b):
            continue
        if any(c != b and C.socle.support == B.socle.support for c, C in enumerate(mono.cells)):
            continue
        keep = [i for i in range(len(mono.cells)) if i != b]
        pos = {i: k for k, i in enumerate(keep)}
        up = mono.parent[b]
        parent = []
        for i in keep:
            par = mono.parent[i]
            par = up if par == b else par
            parent.append(None if par is None else pos[par])
        return type(mono)([mono.cells[i] for i in keep], parent)
    return None


def test_criterion_3_dispatch():
    problems = []
    injected = {"face-stricte": 0, "faces-UA": 0}
    with Timer(10.0) as t:
        for seed in range(25):
            mono, _ = random_monoplex(seed)
            if len(mono.cells) > 10 or mono.depth() > 4:
                problems.append(f"seed {seed}: generator out of range")
            res = dispatch(mono)
            check_dispatch(mono, res)
            for b, a in mono.edges():
                if not res.H[b] < res.H[a]:
                    problems.append(f"seed {seed}: H not strictly increasing on {b}<{a}")
            for claim, mutate in (("face-stricte", _swap_same_socle_pair), ("faces-UA", _drop_inner_cell)):
                bad = mutate(mono)
                if bad is None:
                    continue
                injected[claim] += 1
                try:
                    dispatch(bad)
                    problems.append(f"seed {seed}: {claim} injection accepted")
                except PreconditionViolation as exc:
                    if exc.claim != claim:
                        problems.append(f"seed {seed}: {claim} injection reported as {exc.claim}")
    if min(injected.values()) < 3:
        problems.append(f"too few injections: {injected}")
    ok = not problems and t.ok
    record(3, ok, f"{t} 25 monoplexes, injections {injected}, {len(problems)} failures")
    assert ok, problems


# ---------------------------------------------------------------------------
# 4. lift


def _image_is_socle(lift, a) -> bool:
    """Phi(vS_A) = vU_A on a window: every socle point has a fibre, every lifted point projects in."""
    res = lift.dispatch
    A = lift.mono.cells[a]
    S = lift.simplexes[a].shape
    U = A.socle.shape
    sigma = res.sigma[a]
    sup_S, G, h = _relaxation(S)
    for row in grid_members(S, 6):
        pt = [INF] * U.q
        for i, s in sigma.items():
            pt[i - 1] = int(row[sup_S.index(s - 1)])
        if not contains_exact(U, tuple(pt)):
            return False
    sup_U = sorted(U.support)
    for row in grid_members(U, 6):
        E, e = [], []
        for k, i in enumerate(sup_U):
            r = [0] * len(sup_S)
            r[sup_S.index(sigma[i + 1] - 1)] = 1
            E.append(r)
            e.append(int(row[k]))
        if integer_point([list(g) for g in G], list(h), E, e) is None:
            return False
    return True


def test_criterion_4_lift():
    problems = []
    sampled = []
    with Timer(30.0) as t:
        for seed in range(25):
            mono, _ = random_monoplex(seed)
            lift = build_lift(mono)
            bad = {k: v for k, v in lift.certificates.items() if v and k != "muAv-pos"}
            if bad:
                problems.append(f"seed {seed}: {bad}")
            n = len(mono.cells)
            for a, S in enumerate(lift.simplexes):
                if not is_simplex(S.shape).is_simplex:
                    problems.append(f"seed {seed}: S_{a} not a simplex")
                faces = all_faces(S.shape)
                below = [b for b in range(n) if mono.leq(b, a)]
                if len(faces) != len(below) or any(
                        not same_set(face(S.shape, lift.simplexes[b].support), lift.simplexes[b].shape) for b in below):
                    problems.append(f"seed {seed}: face set of S_{a}")
                for b in range(n):
                    if (lift.simplexes[b].support <= S.support) != mono.leq(b, a):
                        problems.append(f"seed {seed}: supp order {b},{a}")
                if not _image_is_socle(lift, a):
                    problems.append(f"seed {seed}: Phi(S_{a}) != U_{a}")
            per = -(-100 // n)
            problems += [f"seed {seed}: {m}" for m in phi_roundtrip(lift, count=per, depth=3, seed=seed)]
            sampled.append(per * n)
            problems += [f"seed {seed}: {m}" for m in phi_continuity(lift, depths=(2, 4, 8), count=2, seed=seed)]
    ok = not problems and t.ok and min(sampled) >= 100
    record(4, ok, f"{t} 25 lifts, >= {min(sampled)} sampled points each, {len(problems)} failures")
    assert ok, problems[:5]


# ---------------------------------------------------------------------------
# 5. fitting and mu^v


def _random_cell(rng: SplitMix64, p: int = 3) -> MonomialCell:
    N = rng.between(1, 3)
    M = int(vp(N, p)) + rng.between(1, 2)
    Mp = M + int(vp(N, p))
    q = rng.between(1, 2)
    nodes = random_socle_tree(rng, q, M, 4, q)
    U = nodes[-1].simplex
    sup = sorted(U.support)
    vl = rng.below(N)
    lam = as_padic(Fraction(p) ** vl * (1 + p * rng.below(3)), p)
    # exponents and valuations are multiples of N most of the time, so both outcomes occur
    def exps():
        return {i: (N if rng.chance(3, 4) else 1) * rng.below(3) for i in sup}

    vmu = vl + (N if rng.chance(3, 4) else 1) * rng.between(0, 2)
    mu = MonomialFn.mono(Fraction(p) ** vmu, exps(), p=p)
    nu = MonomialFn.zero()
    if rng.chance(1, 2):
        ex = exps()
        ex = {i: ex[i] + mu.exponent(i) for i in sup}
        nu = MonomialFn.mono(Fraction(p) ** (vmu + N * rng.below(3)), ex, p=p)
    return MonomialCell(U, MonomialFn.zero(), nu, mu, lam, N, Mp, 1, p)


def _literal_bound_cells():
    """Cells on which the uncorrected bound min mu^v >= (N-1)(M'-1) is evaluated."""
    point = make_simplex(point_polytope(1), 3)
    xi = Fraction(1, 8)
    # fitting, bounded, inside R: t = -1/8 + (1/8) u with u = 1 mod 8
    counter = MonomialCell(point, MonomialFn.mono(-xi, {}, p=2), MonomialFn.mono(xi, {}, p=2),
                           MonomialFn.mono(xi, {}, p=2), as_padic(1, 2), 3, 3, 1, 2)
    return [counter]


def _min_muv(A) -> Fraction:
    status, lo = optimize(A.socle.shape, mu_v(A))
    return lo


def test_criterion_5_fitting_and_mu_v():
    problems = []
    rng = SplitMix64(55)
    fitting = 0
    with Timer(5.0) as t:
        for k in range(100):
            A = _random_cell(rng)
            fit = is_fitting(A)
            if fit != fitting_oracle(A, depth=6, count=24, seed=k):
                problems.append(f"cell {k}: is_fitting disagrees with the oracle")
            if not fit:
                continue
            fitting += 1
            muv = mu_v(A)
            for x in sample_padic(A.socle, 4, 6, k, A.p):
                u = [as_padic(c, A.p) for c in x]
                a = {i: valuation(u[i]) for i in A.socle.support}
                if valuation(A.mu(u)) != A.lam.valuation + A.N * muv(a) - A.N * A.Mp:
                    problems.append(f"cell {k}: def-muA-v identity")
            if check_bounded(A) and A.N * _min_muv(A) < (A.N - 1) * (A.Mp - 1):
                problems.append(f"cell {k}: N min mu^v < (N-1)(M'-1)")
        # the equality case of the boundedness bound: v(mu) = -M' exactly
        point = make_simplex(point_polytope(1), 2)
        xi = Fraction(1, 9)
        eq = MonomialCell(point, MonomialFn.mono(-xi, {}, p=3), MonomialFn.mono(xi, {}, p=3),
                          MonomialFn.mono(xi, {}, p=3), as_padic(1, 3), 2, 2, 1, 3)
        if not (check_bounded(eq) and valuation(eq.mu([as_padic(0, 3)])) == -eq.Mp):
            problems.append("equality cell")
        if not all(valuation(tt) >= 0 and cell_member(eq, x, tt) for x, tt in sample_cell(eq, 2, 10, 1)):
            problems.append("equality cell leaves R")
        if check_bounded(replace(eq, mu=MonomialFn.mono(Fraction(1, 27), {}, p=3))):
            problems.append("v(mu) = -M'-1 accepted as bounded")
    ok = not problems and t.ok and fitting >= 20
    record(5, ok, f"{t} 100 cells ({fitting} fitting), corrected bound N*mu^v >= (N-1)(M'-1) and "
                  f"equality case: {len(problems)} failures")
    assert ok, problems[:5]


@pytest.mark.xfail(strict=True, reason="the literal bound min mu^v >= (N-1)(M'-1) fails on a fitting bounded cell in R")
def test_criterion_5_literal_mu_v_bound():
    rng = SplitMix64(55)
    cells = _literal_bound_cells() + [A for A in (_random_cell(rng) for _ in range(100))
                                      if is_fitting(A) and check_bounded(A)]
    bad = []
    for A in cells:
        lo = _min_muv(A)
        if lo < (A.N - 1) * (A.Mp - 1):
            bad.append((A.p, A.N, A.Mp, lo))
    record(5, not bad, f"literal bound min mu^v >= (N-1)(M'-1): {len(bad)} counterexamples, "
                       f"first (p,N,M',min mu^v) = {bad[0] if bad else None}")
    assert not bad


# ---------------------------------------------------------------------------
# 6. retraction


def _sigma_dist(r, y, z, p) -> float:
    (by, py), (bz, pz) = r(0, y), r(0, z)
    if by != bz:
        return -INF
    return min((valuation(as_padic(a, p) - as_padic(b, p)) for a, b in zip(py, pz)), default=INF)


def test_criterion_6_retraction():
    p = 3
    problems = []
    with Timer(5.0) as t:
        for k in range(10):
            rng = SplitMix64(600 + k)
            q = rng.between(2, 3)
            nodes = random_socle_tree(rng, q, 1, rng.between(3, 7), q)
            c = socle_complex(nodes)
            chosen = {0}
            for i in range(1, len(nodes)):
                if rng.chance(1, 2):
                    j = i
                    while j is not None:
                        chosen.add(j)
                        j = nodes[j].parent
            target = [(0, i) for i in sorted(chosen)]
            r = build_retraction(c, target, p)
            problems += [f"complex {k}: {m}" for m in retraction_certificate(r)]
            for i, node in enumerate(nodes):
                for x in sample_padic(node.simplex, 4, 4, k * 31 + i, p):
                    y = r(0, x)
                    if r.locate(*y) not in r.target:
                        problems.append(f"complex {k}: image outside target")
                    if r(*y) != y:
                        problems.append(f"complex {k}: not idempotent")
                    if (0, i) in r.target and y != (0, tuple(x)):
                        problems.append(f"complex {k}: not identity on target")
                # continuity across each face j < i
                j = node.parent
                while j is not None:
                    for z in sample_padic(nodes[j].simplex, 3, 2, k + i + j, p):
                        for depth in (2, 4, 8):
                            y = approach_point(node.simplex, z, nodes[j].simplex.support, depth, p)
                            if y is None or _sigma_dist(r, y, z, p) < depth:
                                problems.append(f"complex {k}: continuity {j}<{i} at depth {depth}")
                    j = nodes[j].parent
    ok = not problems and t.ok
    record(6, ok, f"{t} 10 complexes, {len(problems)} failures")
    assert ok, problems[:5]


# ---------------------------------------------------------------------------
# 7. good direction


def _random_poly(rng: SplitMix64, nvars: int) -> Polynomial:
    while True:
        terms = {}
        for _ in range(rng.between(1, 4)):
            e = tuple(rng.below(3) for _ in range(nvars))
            terms[e] = rng.between(-3, 3)
        f = Polynomial.make(nvars, terms)
        if not f.is_zero:
            return f


def test_criterion_7_good_direction():
    problems = []
    with Timer(5.0) as t:
        X, T = Polynomial.variable(2, 0), Polynomial.variable(2, 1)
        F = [X * T - Polynomial.constant(2, 1)]
        eta = find_direction(F, 1, 3)
        if eta != (3,) or shear(F[0], eta).coefficient((0, 2)) != 3:
            problems.append(f"XT-1 gave {eta}")
        certify_direction(F, eta)
        rng = SplitMix64(77)
        for _ in range(30):
            nvars = rng.between(2, 3)
            fam = [_random_poly(rng, nvars) for _ in range(rng.between(1, 3))]
            eta = find_direction(fam, rng.below(4), rng.choice([2, 3, 5]))
            certify_direction(fam, eta, samples=3)
        for _ in range(100):
            nvars = rng.between(2, 3)
            f = _random_poly(rng, nvars)
            eta = tuple(rng.between(-3, 3) for _ in range(nvars - 1))
            if shear(shear(f, eta), tuple(-x for x in eta)) != f:
                problems.append("shear round trip")
    ok = not problems and t.ok
    record(7, ok, f"{t} XT-1 -> eta=3, 30 families certified, 100 shear round trips, {len(problems)} failures")
    assert ok, problems


# ---------------------------------------------------------------------------
# 8. LP versus window oracle


KIND = {Extension.FINITE: "finite", Extension.INFINITE: "infinite", Extension.NOT_EXTENDABLE: "not_extendable"}


def test_criterion_8_lp_vs_oracle():
    problems = []
    conclusive = tried = 0
    rng = SplitMix64(88)
    with Timer(60.0) as t:
        while conclusive < 100 and tried < 1000:
            tried += 1
            A = random_polytope(rng, rng.between(1, 3))
            sup = sorted(A.support)
            f = AffineMap.make(rng.between(-4, 4), {i: rng.between(-4, 4) for i in sup})
            faces = sorted(all_faces(A), key=sorted)
            J = faces[rng.below(len(faces))]
            got = classify_extension(f, A, J, bounds=(8, 16, 32))
            if got.kind == "inconclusive":
                continue
            conclusive += 1
            ext = extend_to_face(f, A, J)
            if KIND[ext.kind] != got.kind:
                problems.append(f"{A} f={f} J={sorted(J)}: LP {KIND[ext.kind]}, oracle {got.kind}")
            elif ext.is_finite:
                js = sorted(J)
                for key, v in got.values.items():
                    if ext.g(dict(zip(js, key))) != v:
                        problems.append(f"{A} f={f} J={js}: value at {key}")
    ok = not problems and t.ok and conclusive >= 100
    record(8, ok, f"{t} {conclusive} conclusive triples of {tried}, {len(problems)} disagreements")
    assert ok, problems[:5]
