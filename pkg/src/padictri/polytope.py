"""Discrete polytopes in Gamma^q = (Z u {+inf})^q and their face calculus.

A polytope is stored as a level-by-level presentation: level ``j`` is either
out of support (the coordinate is always +inf) or carries a pair of affine
bounds ``mu_j <= a_j <= nu_j`` depending on earlier supported coordinates.

Coordinates are 0-based in the Python API.  JSON documents and DOT labels use
1-based indices, matching the usual mathematical notation.

Support of a point means the set of FINITE coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import lcm
from typing import Iterable, Mapping, Sequence, Union

from .errors import EmptyFace, NotLargelyContinuous, ValidationError
from .lp import OPTIMAL, UNBOUNDED, integer_point, linprog, solve_linear
from .padic import parse_rational

INF = math.inf
GammaValue = Union[int, float]
GammaPoint = tuple


def is_inf(x) -> bool:
    return isinstance(x, float) and x == INF


def point_support(a: Sequence[GammaValue]) -> frozenset[int]:
    return frozenset(i for i, x in enumerate(a) if not is_inf(x))


def project(a: Sequence[GammaValue], J: Iterable[int]) -> GammaPoint:
    """The point agreeing with ``a`` on ``J`` and equal to +inf elsewhere."""
    J = set(J)
    return tuple(x if i in J else INF for i, x in enumerate(a))


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else parse_rational(x)


@dataclass(frozen=True)
class AffineMap:
    """``const + sum coeffs[i] * x_i``, or the constant +inf map."""

    const: Fraction = Fraction(0)
    coeffs: tuple[tuple[int, Fraction], ...] = ()
    infinite: bool = False

    @classmethod
    def make(cls, const=0, coeffs: Mapping[int, object] | None = None) -> AffineMap:
        items = sorted((int(i), _frac(c)) for i, c in (coeffs or {}).items())
        return cls(_frac(const), tuple((i, c) for i, c in items if c != 0))

    @classmethod
    def infinity(cls) -> AffineMap:
        return cls(Fraction(0), (), True)

    @property
    def variables(self) -> frozenset[int]:
        return frozenset(i for i, _ in self.coeffs)

    def coeff(self, i: int) -> Fraction:
        for k, c in self.coeffs:
            if k == i:
                return c
        return Fraction(0)

    def __call__(self, x: Sequence[GammaValue]) -> Fraction | float:
        if self.infinite:
            return INF
        total = self.const
        for i, c in self.coeffs:
            xi = x[i]
            if is_inf(xi):
                raise ValueError(f"affine map needs finite coordinate {i}")
            total += c * xi
        return total

    def linear_part(self) -> AffineMap:
        return AffineMap(Fraction(0), self.coeffs)

    def reindex(self, mapping: Mapping[int, int]) -> AffineMap:
        if self.infinite:
            return self
        return AffineMap(self.const, tuple(sorted((mapping[i], c) for i, c in self.coeffs)))

    def __str__(self) -> str:
        if self.infinite:
            return "+inf"
        parts = [str(self.const)] if self.const or not self.coeffs else []
        parts += [f"{c}*x{i + 1}" for i, c in self.coeffs]
        return " + ".join(parts)

    def to_json(self):
        if self.infinite:
            return "+inf"
        return {"const": str(self.const), "coeffs": {str(i + 1): str(c) for i, c in self.coeffs}}

    @classmethod
    def from_json(cls, data) -> AffineMap:
        if data in ("+inf", "inf", "+oo"):
            return cls.infinity()
        if isinstance(data, (int, str)):
            return cls.make(data)
        coeffs = {int(k) - 1: v for k, v in data.get("coeffs", {}).items()}
        return cls.make(data.get("const", 0), coeffs)


@dataclass(frozen=True)
class Level:
    supported: bool
    mu: AffineMap | None = None
    nu: AffineMap | None = None

    @classmethod
    def out(cls) -> Level:
        return cls(False)

    @classmethod
    def between(cls, mu: AffineMap, nu: AffineMap | None = None) -> Level:
        return cls(True, mu, nu if nu is not None else AffineMap.infinity())


@dataclass(frozen=True)
class DiscretePolytope:
    levels: tuple[Level, ...]
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    @property
    def q(self) -> int:
        return len(self.levels)

    @property
    def support(self) -> frozenset[int]:
        return frozenset(j for j, lv in enumerate(self.levels) if lv.supported)

    def prefix(self, j: int) -> DiscretePolytope:
        """The polytope formed by levels ``0..j-1`` (the socle of level ``j``)."""
        return DiscretePolytope(self.levels[:j])

    @property
    def socle(self) -> DiscretePolytope:
        return self.prefix(self.q - 1)

    def is_point(self) -> bool:
        return not self.support

    def __str__(self) -> str:
        out = []
        for j, lv in enumerate(self.levels):
            out.append(f"x{j + 1} in [{lv.mu}, {lv.nu}]" if lv.supported else f"x{j + 1} = +inf")
        return "{" + "; ".join(out) + "}"

    # JSON ---------------------------------------------------------------
    def to_json(self) -> dict:
        levels = []
        for lv in self.levels:
            if lv.supported:
                levels.append({"support": True, "mu": lv.mu.to_json(), "nu": lv.nu.to_json()})
            else:
                levels.append({"support": False})
        return {"q": self.q, "levels": levels}

    @classmethod
    def from_json(cls, data) -> DiscretePolytope:
        try:
            levels = []
            for lv in data["levels"]:
                if lv.get("support", True):
                    mu = AffineMap.from_json(lv.get("mu", 0))
                    nu = AffineMap.from_json(lv.get("nu", "+inf"))
                    levels.append(Level.between(mu, nu))
                else:
                    levels.append(Level.out())
        except (KeyError, TypeError, AttributeError, ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"malformed polytope: {exc}") from exc
        if "q" in data and data["q"] != len(levels):
            raise ValidationError("q does not match number of levels")
        return cls(tuple(levels))


def point_polytope(q: int) -> DiscretePolytope:
    return DiscretePolytope(tuple(Level.out() for _ in range(q)))


def from_bounds(*levels) -> DiscretePolytope:
    """Convenience builder: each level is None (out of support) or (mu, nu).

    ``mu``/``nu`` may be numbers, dicts ``{"const": c, i: coef}``, AffineMaps,
    or None/"+inf" for nu.
    """

    def conv(m):
        if isinstance(m, AffineMap):
            return m
        if m is None or m == "+inf":
            return AffineMap.infinity()
        if isinstance(m, dict):
            d = dict(m)
            return AffineMap.make(d.pop("const", 0), d)
        return AffineMap.make(m)

    out = []
    for lv in levels:
        if lv is None:
            out.append(Level.out())
        else:
            mu, nu = lv
            out.append(Level.between(conv(mu), conv(nu)))
    return DiscretePolytope(tuple(out))


# ---------------------------------------------------------------------------
# membership


def contains_exact(A: DiscretePolytope, a: Sequence[GammaValue]) -> bool:
    """Membership in A itself, straight from the presentation."""
    if len(a) != A.q:
        raise ValueError("dimension mismatch")
    for j, lv in enumerate(A.levels):
        x = a[j]
        if not lv.supported:
            if not is_inf(x):
                return False
            continue
        if is_inf(x) or x != int(x):
            return False
        if not lv.mu(a) <= x:
            return False
        if not lv.nu.infinite and not x <= lv.nu(a):
            return False
    return True


def contains(A: DiscretePolytope, a: Sequence[GammaValue]) -> bool:
    """Membership in the closure of A.

    The closure of a polytope is the disjoint union of its faces, and the face
    containing ``a`` is the one indexed by the support of ``a``.
    """
    if len(a) != A.q:
        raise ValueError("dimension mismatch")
    J = point_support(a)
    if not J <= A.support:
        return False
    F = face(A, J)
    return F is not None and contains_exact(F, a)


# ---------------------------------------------------------------------------
# polyhedral relaxation


def _relaxation(A: DiscretePolytope) -> tuple[list[int], list[list[Fraction]], list[Fraction]]:
    """Supported coordinates and rows ``G x <= h`` of the rational relaxation."""
    sup = sorted(A.support)
    pos = {i: k for k, i in enumerate(sup)}
    n = len(sup)
    G: list[list[Fraction]] = []
    h: list[Fraction] = []
    for j, lv in enumerate(A.levels):
        if not lv.supported:
            continue
        row = [Fraction(0)] * n
        for i, c in lv.mu.coeffs:
            row[pos[i]] += c
        row[pos[j]] -= 1
        G.append(row)
        h.append(-lv.mu.const)
        if not lv.nu.infinite:
            row = [Fraction(0)] * n
            for i, c in lv.nu.coeffs:
                row[pos[i]] -= c
            row[pos[j]] += 1
            G.append(row)
            h.append(lv.nu.const)
    return sup, G, h


def _vector(f: AffineMap, pos: Mapping[int, int], n: int) -> list[Fraction]:
    v = [Fraction(0)] * n
    for i, c in f.coeffs:
        if i not in pos:
            raise ValidationError(f"affine map uses coordinate {i + 1} outside the support")
        v[pos[i]] += c
    return v


def relaxation_is_empty(A: DiscretePolytope) -> bool:
    sup, G, h = _relaxation(A)
    return linprog([0] * len(sup), G, h).status != OPTIMAL


def optimize(A: DiscretePolytope, f: AffineMap, maximize: bool = False):
    """Optimum of ``f`` over the relaxation of A: (status, value)."""
    sup, G, h = _relaxation(A)
    pos = {i: k for k, i in enumerate(sup)}
    res = linprog(_vector(f, pos, len(sup)), G, h, maximize=maximize)
    if res.status != OPTIMAL:
        return res.status, None
    return OPTIMAL, res.value + f.const


def _implicit_equalities(A: DiscretePolytope) -> list[tuple[list[Fraction], Fraction]]:
    """Rows ``(g, h)`` with ``g.x == h`` on the whole relaxation of A."""
    key = "implicit"
    if key in A._cache:
        return A._cache[key]
    sup, G, h = _relaxation(A)
    n = len(sup)
    rows = [(g, b) for g, b in zip(G, h)]
    for k in range(n):
        e = [Fraction(0)] * n
        e[k] = Fraction(-1)
        rows.append((e, Fraction(0)))
    eqs = []
    for g, b in rows:
        # slack b - g.x >= 0; it is an implicit equality iff its max is 0
        res = linprog([-c for c in g], G, h, maximize=True)
        if res.status == OPTIMAL and res.value + b == 0:
            eqs.append((g, b))
    A._cache[key] = eqs
    return eqs


# ---------------------------------------------------------------------------
# extension to faces


@dataclass(frozen=True)
class Extension:
    kind: str  # "finite" | "infinite" | "not_extendable"
    g: AffineMap | None = None

    FINITE = "finite"
    INFINITE = "infinite"
    NOT_EXTENDABLE = "not_extendable"

    @property
    def is_finite(self) -> bool:
        return self.kind == self.FINITE

    @property
    def is_infinite(self) -> bool:
        return self.kind == self.INFINITE

    def as_map(self) -> AffineMap:
        if self.kind == self.FINITE:
            return self.g
        if self.kind == self.INFINITE:
            return AffineMap.infinity()
        raise NotLargelyContinuous("map does not extend continuously")


def _factor_through(f: AffineMap, A: DiscretePolytope, J: frozenset[int]) -> AffineMap | None:
    """Affine g on J-coordinates with f == g o pi_J on relax(A), if one exists."""
    if f.variables <= J:
        return f
    sup = sorted(A.support)
    pos = {i: k for k, i in enumerate(sup)}
    Js = sorted(J)
    eqs = _implicit_equalities(A)
    # unknowns: g0, g_j (j in J), lambda_r ; identity f - g o pi_J == sum lambda_r (g_r.x - h_r)
    n_unk = 1 + len(Js) + len(eqs)
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    fv = _vector(f, pos, len(sup))
    for i in sup:
        row = [Fraction(0)] * n_unk
        if i in J:
            row[1 + Js.index(i)] = Fraction(1)
        for r, (g, _) in enumerate(eqs):
            row[1 + len(Js) + r] = g[pos[i]]
        rows.append(row)
        rhs.append(fv[pos[i]])
    row = [Fraction(0)] * n_unk
    row[0] = Fraction(1)
    for r, (_, h) in enumerate(eqs):
        row[1 + len(Js) + r] = -h
    rows.append(row)
    rhs.append(f.const)
    sol = solve_linear(rows, rhs)
    if sol is None:
        return None
    return AffineMap.make(sol[0], {j: sol[1 + k] for k, j in enumerate(Js)})


def _fibers_constant(f: AffineMap, A: DiscretePolytope, J: frozenset[int]) -> bool:
    """LP test: max{f(x) - f(x') : x, x' in relax(A), pi_J x == pi_J x'} == 0."""
    if f.variables <= J:
        return True
    sup, G, h = _relaxation(A)
    n = len(sup)
    pos = {i: k for k, i in enumerate(sup)}
    fv = _vector(f, pos, n)
    G2 = [row + [Fraction(0)] * n for row in G] + [[Fraction(0)] * n + row for row in G]
    h2 = list(h) + list(h)
    E = []
    for j in J:
        row = [Fraction(0)] * (2 * n)
        row[pos[j]] = Fraction(1)
        row[n + pos[j]] = Fraction(-1)
        E.append(row)
    res = linprog(fv + [-c for c in fv], G2, h2, E, [0] * len(E), maximize=True)
    return res.status == OPTIMAL and res.value == 0


def _recession_slope(f: AffineMap, A: DiscretePolytope, J: frozenset[int]):
    """min f_lin(d) over recession directions d with d_J = 0 and d_k >= 1 off J."""
    sup, G, _ = _relaxation(A)
    n = len(sup)
    pos = {i: k for k, i in enumerate(sup)}
    fv = _vector(f, pos, n)
    G2 = list(G)
    h2 = [Fraction(0)] * len(G)
    E, hE = [], []
    for i in sup:
        row = [Fraction(0)] * n
        if i in J:
            row[pos[i]] = Fraction(1)
            E.append(row)
            hE.append(Fraction(0))
        else:
            row[pos[i]] = Fraction(-1)
            G2.append(row)
            h2.append(Fraction(-1))
    res = linprog(fv, G2, h2, E, hE)
    if res.status == UNBOUNDED:
        return -INF
    if res.status != OPTIMAL:
        return None
    return res.value


@lru_cache(maxsize=65536)
def _extend(f: AffineMap, A: DiscretePolytope, J: frozenset[int]) -> Extension:
    if face(A, J) is None:
        raise EmptyFace(f"F_{_fmt(J)} is empty")
    if f.infinite:
        return Extension(Extension.INFINITE)
    if _fibers_constant(f, A, J):
        g = _factor_through(f, A, J)
        if g is None:  # pragma: no cover - the LP and the linear algebra agree
            raise AssertionError("fiber-constant map failed to factor through pi_J")
        return Extension(Extension.FINITE, g)
    slope = _recession_slope(f, A, J)
    if slope is not None and slope > 0:
        return Extension(Extension.INFINITE)
    return Extension(Extension.NOT_EXTENDABLE)


def extend_to_face(f: AffineMap, A: DiscretePolytope, J: Iterable[int]) -> Extension:
    """Classify the continuous extension of ``f`` from A to its face ``F_J(A)``.

    Finite: f factors as g o pi_J on A (then g is the extension).
    Infinite: f tends to +inf along every fiber of pi_J toward the face.
    Otherwise the map is not largely continuous at the face.
    """
    J = frozenset(J)
    if not J <= A.support:
        raise ValueError("J must be a subset of the support")
    if not f.infinite and not f.variables <= A.support:
        raise ValidationError("affine map uses coordinates outside the support")
    return _extend(f, A, J)


# ---------------------------------------------------------------------------
# faces


def _fmt(J: Iterable[int]) -> str:
    return "{" + ",".join(str(j + 1) for j in sorted(J)) + "}"


@lru_cache(maxsize=65536)
def _face(A: DiscretePolytope, J: frozenset[int]) -> DiscretePolytope | None:
    if A.q == 0:
        return A
    top = A.q - 1
    Ahat = A.socle
    Jhat = J - {top}
    Y = _face(Ahat, Jhat)
    if Y is None:
        return None
    lv = A.levels[top]
    if not lv.supported:
        return DiscretePolytope(Y.levels + (Level.out(),))
    mu_bar = _extend(lv.mu, Ahat, Jhat)
    nu_bar = _extend(lv.nu, Ahat, Jhat)
    for name, ext in (("mu", mu_bar), ("nu", nu_bar)):
        if ext.kind == Extension.NOT_EXTENDABLE:
            raise NotLargelyContinuous(f"{name} at level {top + 1} does not extend to face {_fmt(Jhat)}")
    if top in J:
        if mu_bar.is_infinite:
            return None
        return DiscretePolytope(Y.levels + (Level.between(mu_bar.g, nu_bar.as_map()),))
    if nu_bar.is_infinite:
        return DiscretePolytope(Y.levels + (Level.out(),))
    return None


def face(A: DiscretePolytope, J: Iterable[int]) -> DiscretePolytope | None:
    """The face F_J(A) with its induced presentation, or None when empty."""
    J = frozenset(J)
    if not J <= A.support:
        raise ValueError("J must be a subset of the support")
    return _face(A, J)


def all_faces(A: DiscretePolytope) -> dict[frozenset[int], DiscretePolytope]:
    """Every nonempty face of A keyed by its support (A itself included)."""
    sup = sorted(A.support)
    out = {}
    for r in range(len(sup) + 1):
        for J in combinations(sup, r):
            F = face(A, J)
            if F is not None:
                out[frozenset(J)] = F
    return out


def same_set(A: DiscretePolytope, B: DiscretePolytope) -> bool:
    """Set equality of two presentations (exact on the relaxations)."""
    if A.q != B.q or A.support != B.support:
        return False
    if A == B:
        return True
    for j in range(A.q):
        la, lb = A.levels[j], B.levels[j]
        if not la.supported:
            continue
        soc = A.prefix(j)
        for fa, fb in ((la.mu, lb.mu), (la.nu, lb.nu)):
            if fa.infinite or fb.infinite:
                if fa.infinite != fb.infinite:
                    return False
                continue
            diff = AffineMap.make(fa.const - fb.const,
                                  {i: fa.coeff(i) - fb.coeff(i) for i in fa.variables | fb.variables})
            for sense in (False, True):
                status, val = optimize(soc, diff, maximize=sense)
                if status != OPTIMAL or val != 0:
                    return False
    return True


def is_face_of(A: DiscretePolytope, F: DiscretePolytope) -> bool:
    """Whether F is a (nonempty) face of A."""
    if not F.support <= A.support or F.q != A.q:
        return False
    G = face(A, F.support)
    return G is not None and same_set(G, F)


@dataclass
class SimplexReport:
    is_simplex: bool
    chain: list[frozenset[int]]
    faces: dict[frozenset[int], DiscretePolytope]
    incomparable: tuple[frozenset[int], frozenset[int]] | None = None

    def to_json(self) -> dict:
        out = {
            "is_simplex": self.is_simplex,
            "faces": [sorted(j + 1 for j in J) for J in sorted(self.faces, key=_jkey)],
        }
        if self.is_simplex:
            out["chain"] = [sorted(j + 1 for j in J) for J in self.chain]
        else:
            out["incomparable"] = [sorted(j + 1 for j in J) for J in self.incomparable]
        return out


def _jkey(J: frozenset[int]):
    return (len(J), sorted(J))


def is_simplex(A: DiscretePolytope) -> SimplexReport:
    """Check that the nonempty faces of A form a chain under the face-of relation."""
    faces = all_faces(A)
    keys = sorted(faces, key=_jkey)
    for a, b in combinations(keys, 2):
        # keys sorted by size so only b can contain a
        if not (a <= b and is_face_of(faces[b], faces[a])):
            return SimplexReport(False, [], faces, (a, b))
    return SimplexReport(True, keys, faces)


# ---------------------------------------------------------------------------
# validation


def validate(A: DiscretePolytope) -> None:
    """Raise ValidationError unless A is a well-formed largely continuous presentation."""
    for j, lv in enumerate(A.levels):
        if not lv.supported:
            if lv.mu is not None or (lv.nu is not None and not lv.nu.infinite):
                raise ValidationError(f"level {j + 1} is out of support but carries bounds")
            continue
        if lv.mu is None or lv.mu.infinite:
            raise ValidationError(f"level {j + 1}: mu must be a finite affine map")
        soc = A.prefix(j)
        for name, f in (("mu", lv.mu), ("nu", lv.nu)):
            if not f.infinite and not f.variables <= soc.support:
                raise ValidationError(f"level {j + 1}: {name} depends on unsupported or later coordinates")
        status, lo = optimize(soc, lv.mu)
        if status != OPTIMAL or lo < 0:
            raise ValidationError(f"level {j + 1}: mu is not >= 0 on the socle")
        if not lv.nu.infinite:
            gap = AffineMap.make(lv.nu.const - lv.mu.const,
                                 {i: lv.nu.coeff(i) - lv.mu.coeff(i) for i in lv.nu.variables | lv.mu.variables})
            status, lo = optimize(soc, gap)
            if status != OPTIMAL or lo < 0:
                raise ValidationError(f"level {j + 1}: mu <= nu fails on the socle")
        for J in all_faces(soc):
            for name, f in (("mu", lv.mu), ("nu", lv.nu)):
                if extend_to_face(f, soc, J).kind == Extension.NOT_EXTENDABLE:
                    raise NotLargelyContinuous(
                        f"level {j + 1}: {name} is not largely continuous at face {_fmt(J)}")


# ---------------------------------------------------------------------------
# integer-level set relations (exact on Gamma points)


def _integral_rows(G, h):
    out_G, out_h = [], []
    for row, b in zip(G, h):
        den = lcm(b.denominator, *(c.denominator for c in row))
        out_G.append([c * den for c in row])
        out_h.append(b * den)
    return out_G, out_h


def intersects(A: DiscretePolytope, B: DiscretePolytope) -> bool:
    """Whether A and B share a point of Gamma^q."""
    if A.q != B.q or A.support != B.support:
        return False
    sup, GA, hA = _relaxation(A)
    _, GB, hB = _relaxation(B)
    if not sup:
        return True
    return integer_point(GA + GB, hA + hB) is not None


def is_subset(A: DiscretePolytope, B: DiscretePolytope) -> bool:
    """Whether every point of A lies in B."""
    if A.q != B.q:
        return False
    sup, GA, hA = _relaxation(A)
    if not sup:
        return not B.support
    if A.support != B.support:
        return integer_point(GA, hA) is None
    _, GB, hB = _relaxation(B)
    for row, b in zip(*_integral_rows(GB, hB)):
        # an integer point violating row.x <= b satisfies row.x >= b + 1
        if integer_point(GA + [[-c for c in row]], hA + [-b - 1]) is not None:
            return False
    return True


def lex_min_point(A: DiscretePolytope) -> GammaPoint | None:
    """The lexicographically smallest point of A (+inf counts as largest)."""
    sup, G, h = _relaxation(A)
    if not sup:
        return tuple(INF for _ in range(A.q))
    G, h = _integral_rows(G, h)
    fixed_rows, fixed_rhs = [], []
    values = []
    for k in range(len(sup)):
        cost = [0] * len(sup)
        cost[k] = 1
        res = linprog(cost, G + fixed_rows, h + fixed_rhs)
        if res.status != OPTIMAL:
            return None
        v = -((-res.value.numerator) // res.value.denominator)  # ceil
        # the LP minimum may be fractional; walk up to the first integer-feasible value
        while True:
            e = [0] * len(sup)
            e[k] = 1
            if integer_point(G + fixed_rows, h + fixed_rhs, [e], [v]) is not None:
                break
            v += 1
        row = [0] * len(sup)
        row[k] = 1
        fixed_rows += [row, [-c for c in row]]
        fixed_rhs += [v, -v]
        values.append(v)
    pt = [INF] * A.q
    for i, v in zip(sup, values):
        pt[i] = int(v)
    return tuple(pt)
