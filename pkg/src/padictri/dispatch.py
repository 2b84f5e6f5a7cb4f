"""Dispatching a rooted cellular monoplex and lifting it to a simplicial complex.

Given a rooted monoplex ``A`` of presented cells over a complex ``U`` in
``D^M R^{q1}``, :func:`dispatch` assigns to every cell two index sets
``P(A) <= H(A)`` of ``N* = {1, 2, ...}`` and an increasing bijection
``sigma_A : Supp U_A -> P(A)``.  :func:`build_lift` turns these into the
simplexes ``S_A`` of ``D^M R^{q2}`` together with the homeomorphisms
``phi_A : S_A -> A``.

Index sets in this module use 1-based coordinate numbers (the construction
relies on multiples of k inside N*); :meth:`DispatchResult.coords` converts
to 0-based positions.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .cells import (
    CellularMonoplex,
    MonomialCell,
    cell_member,
    check_bounded,
    mu_v,
    nu_v,
    sample_cell,
    validate_monoplex,
)
from .errors import (
    CertificationFailure,
    NotInCell,
    NotInComplex,
    PostconditionViolation,
    PreconditionViolation,
    ValidationError,
)
from .lp import OPTIMAL
from .oracle import sample_padic
from .padic import PadicNumber, as_padic, nth_root, valuation, vp
from .polytope import (
    INF,
    AffineMap,
    DiscretePolytope,
    Level,
    all_faces,
    face,
    is_simplex,
    optimize,
    same_set,
    validate,
)
from .simplex import Block, PadicSimplex, SimplicialComplex, approach_point, faces_of, member, validate_complex


# ---------------------------------------------------------------------------
# preconditions


def _same_socle(A: MonomialCell, B: MonomialCell) -> bool:
    return A.socle.support == B.socle.support and same_set(A.socle.shape, B.socle.shape)


def check_claims(mono: CellularMonoplex) -> None:
    """Re-verify the structural claims the dispatch relies on.

    Raises PreconditionViolation whose ``claim`` is one of ``"rooted"``,
    ``"faces-UA"``, ``"face-stricte"``, ``"index"``, ``"mu-bounded"`` or
    ``"cellular-monoplex"``.
    """
    cells = mono.cells
    if not cells:
        raise PreconditionViolation("rooted", "empty monoplex")
    try:
        roots = mono.roots()
        for i in range(len(cells)):
            mono.ancestors(i)
    except ValidationError as exc:
        raise PreconditionViolation("rooted", str(exc)) from exc
    if len(roots) != 1:
        raise PreconditionViolation("rooted", f"{len(roots)} minimal cells")
    # faces of U_A are exactly the U_B with B <= A
    for a, A in enumerate(cells):
        faces = list(all_faces(A.socle.shape).values())
        below = [cells[b].socle.shape for b in [a] + mono.ancestors(a)]
        for F in faces:
            if not any(F.support == S.support and same_set(F, S) for S in below):
                raise PreconditionViolation("faces-UA", f"cell {a}: a face of U_A is not U_B for any B <= A")
        for S in below:
            if not any(F.support == S.support and same_set(F, S) for F in faces):
                raise PreconditionViolation("faces-UA", f"cell {a}: some U_B with B <= A is not a face of U_A")
    # the predecessor sits over the facet, or over U_A itself with a smaller type
    for a, A in enumerate(cells):
        b = mono.parent[a]
        if b is None:
            continue
        B = cells[b]
        if _same_socle(A, B):
            if not (B.type == 0 and A.type == 1):
                raise PreconditionViolation("face-stricte", f"cell {b} < {a} over the same socle with types {B.type}, {A.type}")
            continue
        facet = faces_of(A.socle).facet
        if facet is None or facet.support != B.socle.support or not same_set(facet.shape, B.socle.shape):
            raise PreconditionViolation("face-stricte", f"U of cell {b} is not the facet of U of cell {a}")
        if B.type > A.type:
            raise PreconditionViolation("face-stricte", f"type-1 cell {b} below type-0 cell {a}")
    N, Mp, p = cells[0].N, cells[0].Mp, cells[0].p
    M = cells[0].socle.M
    vN = int(vp(N, p))
    if any((C.N, C.Mp, C.p, C.socle.M) != (N, Mp, p, M) for C in cells):
        raise PreconditionViolation("index", "cells use different N, M' or M")
    if not (M > vN and Mp == M + vN):
        raise PreconditionViolation("index", f"need M > v_p(N) and M' = M + v_p(N), got M={M}, M'={Mp}")
    for a, A in enumerate(cells):
        if A.type == 1 and not check_bounded(A):
            raise PreconditionViolation("mu-bounded", f"cell {a}: v(mu) < -M' somewhere")
    rep = validate_monoplex(mono)
    if not rep.valid:
        raise PreconditionViolation("cellular-monoplex", "; ".join(rep.violations))


# ---------------------------------------------------------------------------
# the dispatching construction


@dataclass
class DispatchResult:
    H: list[frozenset[int]]
    P: list[frozenset[int]]
    sigma: list[dict[int, int]]  # socle coordinate -> position, both 1-based
    r: list[int | None]
    q1: int
    q2: int
    order: list[int]

    def coords(self, a: int) -> frozenset[int]:
        return frozenset(h - 1 for h in self.H[a])

    def to_json(self) -> dict:
        return {
            "q1": self.q1,
            "q2": self.q2,
            "H": [sorted(h) for h in self.H],
            "P": [sorted(s) for s in self.P],
            "sigma": [{str(i): s for i, s in sorted(sg.items())} for sg in self.sigma],
            "r": self.r,
            "order": self.order,
        }


def _insertion_order(mono: CellularMonoplex) -> list[int]:
    root = mono.roots()[0]
    out, todo = [], deque([root])
    while todo:
        a = todo.popleft()
        out.append(a)
        todo.extend(sorted(mono.children(a)))
    return out


def _interleave(supp_A: list[int], supp_B: list[int], sigma_B: dict[int, int]) -> dict[int, int]:
    """sigma_A on Supp U_A extending sigma_B.

    An index i with j_l <= i < j_{l+1} goes to sigma_B(j_l) plus its rank
    among the indices of Supp U_A in (j_l, i]; this keeps sigma_A below
    sigma_B(j_{l+1}) and off the multiples of k even when Supp U_A has gaps.
    """
    js = [0] + sorted(supp_B)
    base = {0: 0, **sigma_B}
    out = {}
    for i in sorted(supp_A):
        jl = max(j for j in js if j <= i)
        rank = sum(1 for i2 in supp_A if jl < i2 <= i)
        out[i] = base[jl] + rank
    return out


def dispatch(mono: CellularMonoplex, check: bool = True) -> DispatchResult:
    if check:
        check_claims(mono)
    cells = mono.cells
    n = len(cells)
    q1 = cells[0].socle.q
    H: list[frozenset[int] | None] = [None] * n
    P: list[frozenset[int] | None] = [None] * n
    sigma: list[dict[int, int] | None] = [None] * n
    r: list[int | None] = [None] * n
    supp = [sorted(i + 1 for i in C.socle.support) for C in cells]
    order = _insertion_order(mono)
    root = order[0]
    sigma[root] = {i: i for i in supp[root]}
    P[root] = frozenset(supp[root])
    H[root] = P[root] | ({q1 + 1} if cells[root].type == 1 else frozenset())
    r[root] = q1 + 1 if cells[root].type == 1 else None
    done = [root]
    for a in order[1:]:
        b = mono.parent[a]
        k = len(set(supp[a]) - set(supp[b])) + 1
        if k > 1:
            for c in done:
                H[c] = frozenset(k * h for h in H[c])
                P[c] = frozenset(k * h for h in P[c])
                sigma[c] = {i: k * s for i, s in sigma[c].items()}
                r[c] = k * r[c] if r[c] is not None else None
        qp = max((max(H[c]) for c in done if H[c]), default=0)
        sigma[a] = _interleave(supp[a], supp[b], sigma[b])
        P[a] = frozenset(sigma[a].values())
        A, B = cells[a], cells[b]
        if A.type == 0:
            H[a] = P[a]  # Case 1
        elif B.type == 1:
            H[a] = P[a] | H[b]  # Case 4
            r[a] = r[b]
        else:
            # Case 2 (same socle) and Case 3 (facet): a fresh index q' + k
            base = H[b] if _same_socle(A, B) else P[a]
            H[a] = base | {qp + k}
            r[a] = qp + k
        done.append(a)
    q2 = max((max(h) for h in H if h), default=0)
    res = DispatchResult(list(H), list(P), list(sigma), list(r), q1, q2, order)
    check_dispatch(mono, res)
    return res


def check_dispatch(mono: CellularMonoplex, res: DispatchResult) -> None:
    """Assert (C0)-(C5) and strict monotonicity of H; raise PostconditionViolation."""
    cells = mono.cells
    n = len(cells)
    for a, A in enumerate(cells):
        if A.type == 0 and res.H[a] != res.P[a]:
            raise PostconditionViolation("C0", f"cell {a}: H != P for a type-0 cell")
        if A.type == 1:
            extra = res.H[a] - res.P[a]
            if len(extra) != 1 or not res.P[a] <= res.H[a] or (res.P[a] and min(extra) <= max(res.P[a])):
                raise PostconditionViolation("C1", f"cell {a}: H is not P plus one index above max P")
            if res.r[a] != min(extra):
                raise PostconditionViolation("C1", f"cell {a}: r_A mismatch")
        if len(res.P[a]) != len(A.socle.support):
            raise PostconditionViolation("C2", f"cell {a}: Card P != Card Supp U")
        sg = res.sigma[a]
        keys = sorted(sg)
        if keys != sorted(i + 1 for i in A.socle.support) or any(sg[x] >= sg[y] for x, y in zip(keys, keys[1:])):
            raise PostconditionViolation("C2", f"cell {a}: sigma is not an increasing bijection onto P")
    for a in range(n):
        for b in [a] + mono.ancestors(a):
            if res.P[b] != res.H[b] & res.P[a]:
                raise PostconditionViolation("C3", f"P({b}) != H({b}) n P({a})")
            image = {res.sigma[a][i + 1] for i in cells[b].socle.support}
            if image != res.P[b]:
                raise PostconditionViolation("C4", f"sigma_{a}(Supp U_{b}) != P({b})")
            if b != a and not res.H[b] < res.H[a]:
                raise PostconditionViolation("strict", f"H({b}) is not strictly inside H({a})")
        for c in range(n):
            if res.P[c] <= res.P[a]:
                Uc, Ua = cells[c].socle.shape, cells[a].socle.shape
                F = face(Ua, Uc.support) if Uc.support <= Ua.support else None
                if F is None or not same_set(F, Uc):
                    raise PostconditionViolation("C5", f"P({c}) <= P({a}) but U_{c} is not a face of U_{a}")


# ---------------------------------------------------------------------------
# the lifted complex


def _lift_shape(res: DispatchResult, A: MonomialCell, a: int) -> DiscretePolytope:
    sg = res.sigma[a]
    remap = {i - 1: s - 1 for i, s in sg.items()}
    inv = {s - 1: i - 1 for i, s in sg.items()}
    levels = []
    for j in range(res.q2):
        if j in inv:
            lv = A.socle.shape.levels[inv[j]]
            levels.append(Level(True, lv.mu.reindex(remap), lv.nu.reindex(remap)))
        elif A.type == 1 and j == res.r[a] - 1:
            levels.append(Level(True, mu_v(A).reindex(remap), nu_v(A).reindex(remap)))
        else:
            levels.append(Level.out())
    return DiscretePolytope(tuple(levels))


@dataclass
class LiftedComplex:
    mono: CellularMonoplex
    dispatch: DispatchResult
    simplexes: list[PadicSimplex]
    certificates: dict[str, list[str]] = field(default_factory=dict)

    @property
    def p(self) -> int:
        return self.mono.cells[0].p

    @property
    def complex(self) -> SimplicialComplex:
        return SimplicialComplex(self.simplexes[0].M, (Block(self.dispatch.q2, tuple(self.simplexes), True),))

    @property
    def ok(self) -> bool:
        return not any(self.certificates.values())

    def locate(self, y: Sequence) -> int:
        for a, S in enumerate(self.simplexes):
            if member(S, y, self.p):
                return a
        raise NotInComplex("point lies in no lifted simplex")

    def to_json(self) -> dict:
        return {
            "dispatch": self.dispatch.to_json(),
            "complex": self.complex.to_json(),
            "certificates": {k: sorted(v) for k, v in sorted(self.certificates.items())},
            "ok": self.ok,
        }


def build_lift(mono: CellularMonoplex, res: DispatchResult | None = None, certify: bool = True) -> LiftedComplex:
    res = res or dispatch(mono)
    shapes = []
    for a, A in enumerate(mono.cells):
        S = _lift_shape(res, A, a)
        try:
            validate(S)
        except ValidationError as exc:
            raise CertificationFailure("SA-simplex", f"cell {a}: vS_A is not a valid polytope: {exc}") from exc
        shapes.append(PadicSimplex(A.socle.M, S))
    lift = LiftedComplex(mono, res, shapes)
    if certify:
        lift.certificates = certify_lift(lift)
    return lift


def certify_lift(lift: LiftedComplex) -> dict[str, list[str]]:
    mono, res = lift.mono, lift.dispatch
    shapes = [S.shape for S in lift.simplexes]
    n = len(shapes)
    cert: dict[str, list[str]] = {k: [] for k in ("SA-simplex", "face-law", "supp-order", "complex", "image-SA", "muAv-pos")}
    for a, S in enumerate(shapes):
        if S.support != res.coords(a):
            cert["SA-simplex"].append(f"cell {a}: Supp S_A != H(A)")
        rep = is_simplex(S)
        if not rep.is_simplex:
            cert["SA-simplex"].append(f"cell {a}: vS_A is not a simplex")
        faces = list(all_faces(S).values())
        below = [b for b in range(n) if mono.leq(b, a)]
        for b in below:
            F = face(S, shapes[b].support)
            if F is None or not same_set(F, shapes[b]):
                cert["face-law"].append(f"vS_{b} != F_H({b})(vS_{a})")
        if len(faces) != len(below):
            cert["face-law"].append(f"cell {a}: {len(faces)} faces for {len(below)} cells below")
    for a in range(n):
        for b in range(n):
            if (res.H[b] <= res.H[a]) != mono.leq(b, a):
                cert["supp-order"].append(f"H({b}) <= H({a}) disagrees with the tree order")
    crep = validate_complex(lift.complex)
    if not crep.ok:
        cert["complex"].extend(crep.violations or ["lifted family is not a closed rooted complex"])
    for a, A in enumerate(mono.cells):
        if A.type == 0:
            continue
        muv = mu_v(A)
        # N mu^v = v(mu) + N M' - v(lambda) >= (N-1)(M'-1) for cells inside R
        bound = Fraction((A.N - 1) * (A.Mp - 1), A.N)
        status, lo = optimize(A.socle.shape, muv)
        if status != OPTIMAL or lo < bound:
            cert["muAv-pos"].append(f"cell {a}: min mu^v = {lo} < {bound}")
        nuv = nu_v(A)
        if not nuv.infinite:
            gap = AffineMap.make(nuv.const - muv.const, {i: nuv.coeff(i) - muv.coeff(i) for i in nuv.variables | muv.variables})
            status, lo = optimize(A.socle.shape, gap)
            if status != OPTIMAL or lo < 0:
                cert["image-SA"].append(f"cell {a}: empty fibre in vS_A over vU_A")
    return cert


# ---------------------------------------------------------------------------
# evaluation


def eval_Phi(lift: LiftedComplex, y: Sequence, a: int | None = None) -> tuple:
    """The Cartesian map Phi: u_i = y_{sigma_A(i)} on Supp U_A, 0 elsewhere."""
    a = lift.locate(y) if a is None else a
    res = lift.dispatch
    zero = as_padic(0, lift.p)
    u = [zero] * res.q1
    for i, s in res.sigma[a].items():
        u[i - 1] = as_padic(y[s - 1], lift.p)
    return tuple(u)


def eval_phi(lift: LiftedComplex, y: Sequence, a: int | None = None) -> tuple[tuple, PadicNumber]:
    """phi_A(y) = (Phi(y), c_A(Phi(y)) + p^(-N M') lambda y_r^N)."""
    a = lift.locate(y) if a is None else a
    A = lift.mono.cells[a]
    u = eval_Phi(lift, y, a)
    t = A.c(u) if not A.c.is_zero else as_padic(0, A.p)
    if A.type == 1:
        yr = as_padic(y[lift.dispatch.r[a] - 1], A.p)
        t = t + A.lam * yr ** A.N * as_padic(Fraction(A.p) ** (-A.N * A.Mp), A.p)
    return u, t


def invert_phi(lift: LiftedComplex, a: int, x: Sequence, t) -> tuple:
    A = lift.mono.cells[a]
    if not cell_member(A, x, t):
        raise NotInCell(f"point is not in cell {a}")
    p = A.p
    res = lift.dispatch
    u = [as_padic(c, p) for c in x]
    y = [as_padic(0, p)] * res.q2
    for i, s in res.sigma[a].items():
        y[s - 1] = u[i - 1]
    if A.type == 1:
        t = as_padic(t, p)
        delta = t - A.c(u) if not A.c.is_zero else t
        w = delta * as_padic(Fraction(p) ** (A.N * A.Mp), p) / A.lam
        y[res.r[a] - 1] = nth_root(w, A.N)
    return tuple(y)


# ---------------------------------------------------------------------------
# forests and sampled checks


def split_forest(mono: CellularMonoplex) -> list[tuple[CellularMonoplex, list[int]]]:
    """Rooted components, each with the list of original cell indices."""
    out = []
    for root in mono.roots():
        idx = mono.component(root)
        pos = {c: k for k, c in enumerate(idx)}
        parent = [None if mono.parent[c] is None else pos[mono.parent[c]] for c in idx]
        out.append((CellularMonoplex([mono.cells[c] for c in idx], parent), idx))
    return out


def sample_lift(lift: LiftedComplex, a: int, depth: int, count: int, seed: int) -> list[tuple]:
    return sample_padic(lift.simplexes[a], depth, count, seed, lift.p)


def _dist(u: Sequence[PadicNumber], v: Sequence[PadicNumber]) -> float:
    """Valuation of the sup-norm difference (+inf when equal)."""
    return min((valuation(x - y) for x, y in zip(u, v)), default=INF)


def _approach(lift: LiftedComplex, a: int, b: int, z: Sequence, k: int) -> tuple | None:
    """A point of S_a agreeing with z on H(b), with valuation >= k elsewhere."""
    return approach_point(lift.simplexes[a], z, lift.dispatch.coords(b), k, lift.p)


def phi_continuity(lift: LiftedComplex, depths: Sequence[int] = (2, 4, 8), count: int = 3,
                   seed: int = 11) -> list[str]:
    """Sampled continuity of phi across every tree edge B < A.

    For z in S_B and y_k in S_A agreeing with z on H(B) and of valuation at
    least k elsewhere, v(phi(y_k) - phi(z)) must be at least k - c0 with
    c0 = max(N M', -min v(xi_c), 0), and nondecreasing in k.
    """
    mono = lift.mono
    c0 = 0
    for C in mono.cells:
        c0 = max(c0, C.N * C.Mp)
        if C.c.xi is not None:
            c0 = max(c0, -C.c.xi.valuation)
    problems = []
    for b, a in mono.edges():
        for z in sample_lift(lift, b, 3, count, seed + 7 * a):
            uz, tz = eval_phi(lift, z, b)
            last = -INF
            for k in depths:
                y = _approach(lift, a, b, z, k)
                if y is None:
                    problems.append(f"no point of S_{a} near S_{b} at depth {k}")
                    break
                uy, ty = eval_phi(lift, y, a)
                d = min(_dist(uy, uz), valuation(ty - tz))
                if d < k - c0 or d < last:
                    problems.append(f"edge {b}<{a}: v(phi(y)-phi(z)) = {d} at depth {k}")
                last = d
    return problems


def phi_roundtrip(lift: LiftedComplex, count: int = 4, depth: int = 3, seed: int = 5) -> list[str]:
    """invert_phi(phi(y)) == y on sampled points of every S_A."""
    problems = []
    for a in range(len(lift.simplexes)):
        for y in sample_lift(lift, a, depth, count, seed + a):
            x, t = eval_phi(lift, y, a)
            A = lift.mono.cells[a]
            if not cell_member(A, x, t):
                problems.append(f"phi(y) not in cell {a}")
                continue
            back = invert_phi(lift, a, x, t)
            if any(as_padic(c, lift.p) != d for c, d in zip(y, back)):
                problems.append(f"round trip failed in cell {a}")
    return problems


def cell_roundtrip(lift: LiftedComplex, count: int = 4, depth: int = 3, seed: int = 9) -> list[str]:
    """phi(invert_phi(x, t)) == (x, t) on sampled cell points."""
    problems = []
    for a, A in enumerate(lift.mono.cells):
        for x, t in sample_cell(A, depth, count, seed + a):
            y = invert_phi(lift, a, x, t)
            if not member(lift.simplexes[a], y, lift.p):
                problems.append(f"preimage outside S_{a}")
                continue
            u, t2 = eval_phi(lift, y, a)
            if any(as_padic(c, A.p) != d for c, d in zip(x, u)) or not as_padic(t, A.p) == t2:
                problems.append(f"phi(invert_phi) differs in cell {a}")
    return problems
