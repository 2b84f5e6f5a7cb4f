"""Presented cells mod Q_{N,M'} with monomial center and bounds.

A cell is ``{(x, t) : x in U, |nu(x)| <= |t - c(x)| <= |mu(x)|, t - c(x) in G}``
over a p-adic simplex ``U`` (its socle), where ``G`` is ``{0}`` (type 0) or
the coset ``lambda * Q_{N,M'}`` (type 1).  Center and bounds are exact
monomials ``xi * prod u_i^beta_i``; bounds may also be the constants 0 and inf.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    DivisionByZeroAtSample,
    InsufficientPrecision,
    NotFitting,
    NotLargelyContinuous,
    ValidationError,
)
from .lp import OPTIMAL, integer_point
from .oracle import SplitMix64, sample_padic
from .padic import DEFAULT_PRECISION, PadicNumber, SubgroupSpec, as_padic, in_subgroup, valuation
from .polytope import INF, AffineMap, _relaxation, all_faces, optimize
from .simplex import PadicSimplex, fmt_support, member

ZERO, INFTY, MONO = "zero", "inf", "mono"


@dataclass(frozen=True)
class MonomialFn:
    """``xi * prod u_i^beta_i`` over socle coordinates, or the constant 0 / inf."""

    kind: str
    xi: PadicNumber | None = None
    exps: tuple[tuple[int, int], ...] = ()

    @classmethod
    def zero(cls) -> MonomialFn:
        return cls(ZERO)

    @classmethod
    def infinity(cls) -> MonomialFn:
        return cls(INFTY)

    @classmethod
    def mono(cls, xi, exps: dict[int, int] | None = None, p: int | None = None) -> MonomialFn:
        if not isinstance(xi, PadicNumber):
            if p is None:
                raise ValueError("p is required for a rational coefficient")
            xi = as_padic(xi, p)
        if xi.is_zero:
            return cls.zero()
        return cls(MONO, xi, tuple(sorted((int(i), int(b)) for i, b in (exps or {}).items() if b)))

    @property
    def is_zero(self) -> bool:
        return self.kind == ZERO

    @property
    def is_inf(self) -> bool:
        return self.kind == INFTY

    def exponent(self, i: int) -> int:
        return dict(self.exps).get(i, 0)

    def __call__(self, u: Sequence[PadicNumber]) -> PadicNumber | float:
        if self.kind == INFTY:
            return INF
        if self.kind == ZERO:
            return PadicNumber.zero(u[0].prime) if u else 0
        out = self.xi
        for i, b in self.exps:
            ui = u[i]
            if ui.is_zero:
                if b < 0:
                    raise DivisionByZeroAtSample(f"coordinate {i + 1} is 0 with negative exponent")
                return PadicNumber.zero(self.xi.prime, self.xi.precision)
            out = out * ui ** b
        return out

    def vmap(self) -> AffineMap:
        """Valuation as an affine map of the socle's valuation vector."""
        if self.kind == ZERO:
            return AffineMap.infinity()
        if self.kind == INFTY:
            raise ValueError("valuation of the constant inf is -inf")
        return AffineMap.make(self.xi.valuation, {i: b for i, b in self.exps})

    def restrict(self, dropped: Iterable[int]) -> MonomialFn:
        """Continuous extension to the face where the ``dropped`` coordinates vanish.

        Conservative rule: a negative exponent on a dropped coordinate is
        rejected; any positive one sends the extension to 0.
        """
        if self.kind != MONO:
            return self
        dropped = set(dropped)
        on = [b for i, b in self.exps if i in dropped]
        if any(b < 0 for b in on):
            raise NotLargelyContinuous("negative exponent on a vanishing coordinate")
        if any(b > 0 for b in on):
            return MonomialFn.zero()
        return self

    def same(self, other: MonomialFn) -> bool:
        if self.kind != other.kind:
            return False
        if self.kind != MONO:
            return True
        return self.exps == other.exps and self.xi == other.xi

    def to_json(self):
        if self.kind == ZERO:
            return "0"
        if self.kind == INFTY:
            return "inf"
        xi = str(self.xi.as_rational()) if self.xi.is_exact else self.xi.to_json()
        return {"xi": xi, "exp": {str(i + 1): b for i, b in self.exps}}

    @classmethod
    def from_json(cls, data, p: int, precision: int = DEFAULT_PRECISION) -> MonomialFn:
        if data in ("0", 0):
            return cls.zero()
        if data in ("inf", "+inf", "oo"):
            return cls.infinity()
        if isinstance(data, (str, int)):
            return cls.mono(PadicNumber.from_json(str(data), p, precision))
        xi = PadicNumber.from_json(data["xi"], p, precision)
        exps = {int(k) - 1: int(v) for k, v in data.get("exp", {}).items()}
        return cls.mono(xi, exps)

    def __str__(self) -> str:
        if self.kind != MONO:
            return self.kind
        return f"{self.xi}" + "".join(f"*u{i + 1}^{b}" for i, b in self.exps)


@dataclass(frozen=True)
class MonomialCell:
    socle: PadicSimplex
    c: MonomialFn
    nu: MonomialFn
    mu: MonomialFn
    lam: PadicNumber | None
    N: int
    Mp: int
    type: int
    p: int
    socle_ref: tuple[int, int] | None = field(default=None, compare=False)

    @property
    def G(self) -> SubgroupSpec:
        return SubgroupSpec.Q(self.N, self.Mp)

    def to_json(self) -> dict:
        out = {
            "c": self.c.to_json(),
            "nu": self.nu.to_json(),
            "mu": self.mu.to_json(),
            "N": self.N,
            "Mp": self.Mp,
            "type": self.type,
            "lambda": "0" if self.type == 0 else (
                str(self.lam.as_rational()) if self.lam.is_exact else self.lam.to_json()),
        }
        if self.socle_ref is not None:
            out["socle"] = list(self.socle_ref)
        return out


def graph_cell(socle: PadicSimplex, c: MonomialFn, N: int, Mp: int, p: int, socle_ref=None) -> MonomialCell:
    return MonomialCell(socle, c, MonomialFn.zero(), MonomialFn.zero(), None, N, Mp, 0, p, socle_ref)


def check_cell(A: MonomialCell) -> list[str]:
    """Structural problems of a presented cell (empty list when sound)."""
    out = []
    sup = A.socle.support
    for name, f in (("c", A.c), ("nu", A.nu), ("mu", A.mu)):
        if f.kind == MONO and not {i for i, _ in f.exps} <= sup:
            out.append(f"{name} has exponents outside Supp U={fmt_support(sup)}")
    if A.c.is_inf:
        out.append("center cannot be inf")
    if A.nu.is_inf:
        out.append("lower bound nu cannot be inf")
    if A.type == 0:
        if not (A.nu.is_zero and A.mu.is_zero):
            out.append("type-0 cell needs nu = mu = 0")
    elif A.type == 1:
        if A.lam is None or A.lam.is_zero:
            out.append("type-1 cell needs a nonzero lambda")
        elif not 0 <= A.lam.valuation < A.N:
            out.append("lambda must satisfy 0 <= v(lambda) < N")
        if A.mu.is_zero:
            out.append("type-1 cell with mu = 0 is empty")
        if not A.mu.is_inf and not A.nu.is_zero and not out:
            # nonempty fibers need v(nu) >= v(mu) on vU
            gap = _diff(A.nu.vmap(), A.mu.vmap())
            status, lo = optimize(A.socle.shape, gap)
            if status != OPTIMAL or lo < 0:
                out.append("|nu| <= |mu| fails on the socle")
    else:
        out.append("type must be 0 or 1")
    if A.N < 1 or A.Mp < 1:
        out.append("N and M' must be positive")
    return out


def _diff(f: AffineMap, g: AffineMap) -> AffineMap:
    return AffineMap.make(f.const - g.const, {i: f.coeff(i) - g.coeff(i) for i in f.variables | g.variables})


# ---------------------------------------------------------------------------
# membership and sampling


def cell_member(A: MonomialCell, x: Sequence, t, precision: int = DEFAULT_PRECISION) -> bool:
    if not member(A.socle, x, A.p, precision):
        return False
    u = [as_padic(c, A.p, precision) for c in x]
    t = as_padic(t, A.p, precision)
    delta = t - A.c(u) if not A.c.is_zero else t
    if A.type == 0:
        return delta.is_zero
    if delta.is_zero:
        return False
    vd = delta.valuation
    if not A.mu.is_inf and vd < valuation(A.mu(u)):
        return False
    if not A.nu.is_zero and vd > valuation(A.nu(u)):
        return False
    return in_subgroup(delta / A.lam, A.G)


def coset_element(A: MonomialCell, w: int, s: int) -> PadicNumber:
    """``lambda * p^(w - v(lambda)) * (1 + p^M' s)``: an element of G_A of valuation w."""
    k = w - A.lam.valuation
    if k % A.N:
        raise ValueError("valuation outside v(G_A)")
    return A.lam * as_padic(Fraction(A.p) ** k * (1 + A.p ** A.Mp * s), A.p, A.lam.precision)


def sample_cell(A: MonomialCell, depth: int, count: int, seed: int, spread: int = 3) -> list[tuple]:
    """Deterministic sample points ``(x, t)`` of a cell (t as PadicNumber)."""
    rng = SplitMix64(seed ^ 0x5A5A)
    out = []
    for x in sample_padic(A.socle, depth, count, seed, A.p):
        u = [as_padic(c, A.p) for c in x]
        cx = A.c(u) if not A.c.is_zero else PadicNumber.zero(A.p)
        if A.type == 0:
            out.append((x, cx))
            continue
        lo = -10**9 if A.mu.is_inf else valuation(A.mu(u))
        hi = 10**9 if A.nu.is_zero else valuation(A.nu(u))
        if A.mu.is_inf and A.nu.is_zero:
            lo, hi = 0, spread * A.N
        elif A.mu.is_inf:
            lo = hi - spread * A.N
        elif A.nu.is_zero:
            hi = lo + spread * A.N
        vl = A.lam.valuation
        first = lo + (vl - lo) % A.N
        choices = list(range(first, hi + 1, A.N))
        if not choices:
            continue
        w = choices[rng.below(len(choices))]
        out.append((x, cx + coset_element(A, w, rng.below(A.p ** 3))))
    return out


# ---------------------------------------------------------------------------
# fitting, boundedness, mu^v


def _congruent(f: MonomialFn, A: MonomialCell) -> bool:
    if any(b % A.N for _, b in f.exps):
        return False
    return (f.xi.valuation - A.lam.valuation) % A.N == 0


def is_fitting(A: MonomialCell) -> bool:
    if A.type == 0:
        return True
    mu_ok = A.mu.is_inf or _congruent(A.mu, A)
    nu_ok = A.nu.is_zero or _congruent(A.nu, A)
    return mu_ok and nu_ok


def check_bounded(A: MonomialCell) -> bool:
    """Whether v(mu) >= -M' on the socle (decided on integer valuation vectors)."""
    if A.mu.is_zero:
        return True
    if A.mu.is_inf:
        return False
    f = A.mu.vmap()
    sup, G, h = _relaxation(A.socle.shape)
    if not sup:
        return f.const >= -A.Mp
    row = [f.coeff(i) for i in sup]
    # look for an integer valuation vector with f(a) <= -M' - 1
    return integer_point(G + [row], h + [-A.Mp - 1 - f.const]) is None


def _lift_map(f: MonomialFn, A: MonomialCell) -> AffineMap:
    if f.is_zero:
        return AffineMap.infinity()
    if f.is_inf:
        raise NotFitting("mu^v is undefined for an unbounded cell")
    if not _congruent(f, A):
        raise NotFitting(f"v(xi) - v(lambda) is not divisible by N for {f}")
    beta0 = (f.xi.valuation - A.lam.valuation) // A.N
    return AffineMap.make(A.Mp + beta0, {i: Fraction(b, A.N) for i, b in f.exps})


def mu_v(A: MonomialCell) -> AffineMap:
    """mu^v(a) = M' + beta_0 + sum beta_i a_i with v(xi_mu) = v(lambda) + N beta_0."""
    if A.type == 0:
        return AffineMap.infinity()
    return _lift_map(A.mu, A)


def nu_v(A: MonomialCell) -> AffineMap:
    if A.type == 0:
        return AffineMap.infinity()
    return _lift_map(A.nu, A)


# ---------------------------------------------------------------------------
# boundary cells


def boundary_cell(A: MonomialCell, Y: PadicSimplex, i: int, socle_ref=None) -> MonomialCell | None:
    """The boundary cell d^i_Y A over a face Y of the socle, or None when empty."""
    if i not in (0, 1):
        raise ValueError("i must be 0 or 1")
    dropped = A.socle.support - Y.support
    if not Y.support <= A.socle.support:
        raise ValidationError("Y is not a face of the socle")
    c = A.c.restrict(dropped)
    nu = A.nu.restrict(dropped)
    mu = A.mu.restrict(dropped)
    if i == 0:
        if not nu.is_zero:
            return None
        return graph_cell(Y, c, A.N, A.Mp, A.p, socle_ref)
    if mu.is_zero:
        return None
    return MonomialCell(Y, c, nu, mu, A.lam, A.N, A.Mp, A.type, A.p, socle_ref)


def same_cell(A: MonomialCell, B: MonomialCell) -> bool:
    if A.type != B.type or A.socle.shape != B.socle.shape and not _same_shape(A, B):
        return False
    if not (A.c.same(B.c) and A.nu.same(B.nu) and A.mu.same(B.mu)):
        return False
    if A.type == 1 and not A.lam == B.lam:
        return False
    return (A.N, A.Mp) == (B.N, B.Mp)


def _same_shape(A: MonomialCell, B: MonomialCell) -> bool:
    from .polytope import same_set

    return same_set(A.socle.shape, B.socle.shape)


# ---------------------------------------------------------------------------
# transitions


def check_transition(B: MonomialCell, A: MonomialCell, h: MonomialFn, alpha: int, n: int,
                     samples: Sequence[tuple]) -> bool:
    """Check ``t - c_A(x) = U_n(x,t) h(x)^alpha (t - c_B(x))^(1-alpha)`` on samples."""
    if alpha not in (0, 1):
        raise ValueError("alpha must be 0 or 1")
    for x, t in samples:
        u = [as_padic(c, A.p) for c in x]
        t = as_padic(t, A.p)
        num = t - A.c(u) if not A.c.is_zero else t
        if alpha:
            den = h(u)
            if isinstance(den, float):
                raise DivisionByZeroAtSample("h is inf")
        else:
            den = t - B.c(u) if not B.c.is_zero else t
        if den.is_zero:
            raise DivisionByZeroAtSample(f"zero denominator at x={x}")
        if num.is_zero:
            return False
        ratio = num / den
        if ratio.valuation != 0:
            return False
        if ratio.precision < n:
            raise InsufficientPrecision(f"need {n} digits, have {ratio.precision}")
        if ratio.unit_mod(n) != 1 % ratio.prime ** n:
            return False
    return True


# ---------------------------------------------------------------------------
# cellular monoplexes


@dataclass
class CellularMonoplex:
    cells: list[MonomialCell]
    parent: list[int | None]

    def __post_init__(self):
        n = len(self.cells)
        if len(self.parent) != n:
            raise ValidationError("parent list length differs from cell count")
        self._anc = None

    @classmethod
    def from_edges(cls, cells: list[MonomialCell], edges: Iterable[tuple[int, int]]) -> CellularMonoplex:
        parent: list[int | None] = [None] * len(cells)
        for a, b in edges:
            if not (0 <= a < len(cells) and 0 <= b < len(cells)):
                raise ValidationError(f"tree edge {a}->{b} out of range")
            if parent[b] is not None:
                raise ValidationError(f"cell {b} has two parents")
            parent[b] = a
        return cls(cells, parent)

    def ancestors(self, i: int) -> list[int]:
        """Strict ancestors of ``i``, nearest first (raises on cycles)."""
        out, seen = [], {i}
        j = self.parent[i]
        while j is not None:
            if j in seen:
                raise ValidationError("tree has a cycle")
            out.append(j)
            seen.add(j)
            j = self.parent[j]
        return out

    def leq(self, b: int, a: int) -> bool:
        return b == a or b in self.ancestors(a)

    def roots(self) -> list[int]:
        return [i for i, p in enumerate(self.parent) if p is None]

    def children(self, i: int) -> list[int]:
        return [j for j, p in enumerate(self.parent) if p == i]

    def depth(self) -> int:
        return max((len(self.ancestors(i)) + 1 for i in range(len(self.cells))), default=0)

    def edges(self) -> list[tuple[int, int]]:
        return sorted((p, i) for i, p in enumerate(self.parent) if p is not None)

    def component(self, root: int) -> list[int]:
        return [i for i in range(len(self.cells)) if self.leq(root, i)]


@dataclass
class MonoplexReport:
    valid: bool = True
    violations: list[str] = field(default_factory=list)

    def add(self, msg: str) -> None:
        self.valid = False
        self.violations.append(msg)

    def to_json(self) -> dict:
        return {"valid": self.valid, "violations": sorted(set(self.violations))}


def validate_monoplex(mono: CellularMonoplex, closed: bool = True) -> MonoplexReport:
    rep = MonoplexReport()
    cells = mono.cells
    try:
        for i in range(len(cells)):
            mono.ancestors(i)
    except ValidationError as exc:
        rep.add(str(exc))
        return rep
    if not cells:
        return rep
    params = {(A.N, A.Mp, A.p) for A in cells}
    if len(params) > 1:
        rep.add("cells use different groups Q_{N,M'}")
    for i, A in enumerate(cells):
        for msg in check_cell(A):
            rep.add(f"cell {i}: {msg}")
        if not is_fitting(A):
            rep.add(f"cell {i}: not fitting")
    if not rep.valid:
        return rep
    for i, j in ((i, j) for i in range(len(cells)) for j in range(i + 1, len(cells))):
        if same_cell(cells[i], cells[j]):
            rep.add(f"cells {i} and {j} coincide")
    # tree order must be the boundary relation
    for a, A in enumerate(cells):
        for b in mono.ancestors(a):
            B = cells[b]
            if not B.socle.support <= A.socle.support:
                rep.add(f"cell {b} < {a} but its socle is not a face")
                continue
            try:
                D = boundary_cell(A, B.socle, B.type)
            except NotLargelyContinuous as exc:
                rep.add(f"cell {a}: {exc}")
                continue
            if D is None:
                rep.add(f"cell {b} < {a} but the boundary cell of type {B.type} is empty")
            elif not same_cell(D, B):
                if B.type == 1 and D.c.same(B.c) and D.mu.same(B.mu) and D.nu.same(B.nu):
                    rep.add(f"cell {b} < {a}: coset mismatch")
                else:
                    rep.add(f"cell {b} < {a}: boundary law fails")
    if closed:
        roots = mono.roots()
        for r in roots:
            if len(all_faces(cells[r].socle.shape)) > 1 or (cells[r].type == 1 and cells[r].nu.is_zero):
                rep.add(f"not rooted: cell {r} is minimal but has boundary cells")
        if len(roots) != 1:
            rep.add(f"not rooted: {len(roots)} minimal cells")
        for a, A in enumerate(cells):
            for Jface in all_faces(A.socle.shape).values():
                Y = PadicSimplex(A.socle.M, Jface)
                for i in (0, 1):
                    try:
                        D = boundary_cell(A, Y, i)
                    except NotLargelyContinuous as exc:
                        rep.add(f"cell {a}: {exc}")
                        continue
                    if D is None or (i == A.type and Y.support == A.socle.support):
                        continue
                    hit = [b for b, B in enumerate(cells) if same_cell(D, B)]
                    if not hit:
                        rep.add(f"cell {a}: boundary d^{i} over Supp={fmt_support(Y.support)} missing")
                    elif not mono.leq(hit[0], a):
                        rep.add(f"cell {a}: boundary cell {hit[0]} is not below it in the tree")
    return rep


# ---------------------------------------------------------------------------
# oracles


def fitting_oracle(A: MonomialCell, depth: int = 2, count: int = 6, seed: int = 1) -> bool:
    """Sampled sup/inf test of the fitting property.

    At each sampled socle point, candidate differences ``t - c`` are built at
    every valuation within N of the bounds and filtered through cell_member;
    the bounds are fitting when the extreme norms of members equal |mu|, |nu|.
    """
    if A.type == 0:
        return True
    seen = set()
    for x in sample_padic(A.socle, depth, count, seed, A.p):
        u = [as_padic(c, A.p) for c in x]
        # the bounds' valuations depend only on the valuation vector
        key = tuple(valuation(c) for c in u)
        if key in seen:
            continue
        seen.add(key)
        cx = A.c(u) if not A.c.is_zero else PadicNumber.zero(A.p)
        vmu = None if A.mu.is_inf else valuation(A.mu(u))
        vnu = None if A.nu.is_zero else valuation(A.nu(u))
        lo = (vmu if vmu is not None else vnu - 3 * A.N) - A.N
        hi = (vnu if vnu is not None else vmu + 3 * A.N) + A.N
        found = []
        for w in range(lo, hi + 1):
            if (w - A.lam.valuation) % A.N:
                continue
            t = cx + coset_element(A, w, 1)
            if cell_member(A, x, t):
                found.append(w)
        if not found:
            return False
        if vmu is not None and min(found) != vmu:
            return False
        if vnu is not None and max(found) != vnu:
            return False
    return True
