"""p-adic simplexes of index M, simplicial complexes and retractions.

A simplex of index M is ``v^{-1}(shape) n (D^M R)^q`` for a discrete simplex
``shape``.  All structural questions (disjointness, faces, specialization)
are settled on the Gamma-level shapes, where they are exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .lp import integer_point
from .errors import EmptyTarget, NotInComplex, NotLowerSubset, ValidationError
from .padic import DEFAULT_PRECISION, PadicNumber, SubgroupSpec, as_padic, in_subgroup, valuation
from .polytope import (
    INF,
    _relaxation,
    DiscretePolytope,
    all_faces,
    contains_exact,
    face,
    intersects,
    is_simplex,
    is_subset,
    lex_min_point,
    same_set,
    validate,
)


def fmt_support(J: Iterable[int]) -> str:
    return "{" + ",".join(str(j + 1) for j in sorted(J)) + "}"


@dataclass(frozen=True)
class PadicSimplex:
    M: int
    shape: DiscretePolytope

    @property
    def q(self) -> int:
        return self.shape.q

    @property
    def support(self) -> frozenset[int]:
        return self.shape.support

    def label(self) -> str:
        return f"Supp={fmt_support(self.support)}"


def make_simplex(shape: DiscretePolytope, M: int, check: bool = True) -> PadicSimplex:
    if M < 1:
        raise ValidationError("index M must be positive")
    if check:
        validate(shape)
        rep = is_simplex(shape)
        if not rep.is_simplex:
            a, b = rep.incomparable
            raise ValidationError(f"faces {fmt_support(a)} and {fmt_support(b)} are incomparable")
    return PadicSimplex(M, shape)


def in_DMR(x: PadicNumber, M: int) -> bool:
    """Membership in D^M R = R n Q_{1,M}."""
    if x.is_zero:
        return True
    return x.valuation >= 0 and in_subgroup(x, SubgroupSpec.Q(1, M))


def member(s: PadicSimplex, x: Sequence, p: int, precision: int = DEFAULT_PRECISION) -> bool:
    if len(x) != s.q:
        raise ValueError("dimension mismatch")
    xs = [as_padic(c, p, precision) for c in x]
    if not all(in_DMR(c, s.M) for c in xs):
        return False
    return contains_exact(s.shape, tuple(valuation(c) for c in xs))


@dataclass
class FaceChain:
    chain: list[PadicSimplex]  # ascending, the simplex itself last

    @property
    def proper(self) -> list[PadicSimplex]:
        return self.chain[:-1]

    @property
    def facet(self) -> PadicSimplex | None:
        return self.chain[-2] if len(self.chain) > 1 else None


def faces_of(s: PadicSimplex) -> FaceChain:
    faces = all_faces(s.shape)
    keys = sorted(faces, key=lambda J: (len(J), sorted(J)))
    return FaceChain([PadicSimplex(s.M, faces[J]) for J in keys])


def has_proper_face(s: PadicSimplex) -> bool:
    return len(all_faces(s.shape)) > 1


def coordinate_projection(x: Sequence, J: Iterable[int]) -> tuple:
    """pi_J on K^q: keep coordinates in J, set the others to 0."""
    J = set(J)
    return tuple(c if i in J else c * 0 for i, c in enumerate(x))


# ---------------------------------------------------------------------------
# complexes


@dataclass(frozen=True)
class Block:
    q: int
    simplexes: tuple[PadicSimplex, ...]
    rooted: bool = True


@dataclass(frozen=True)
class SimplicialComplex:
    M: int
    blocks: tuple[Block, ...]

    def simplex(self, ref: tuple[int, int]) -> PadicSimplex:
        b, i = ref
        return self.blocks[b].simplexes[i]

    def refs(self) -> list[tuple[int, int]]:
        return [(b, i) for b, blk in enumerate(self.blocks) for i in range(len(blk.simplexes))]

    def to_json(self) -> dict:
        return {
            "M": self.M,
            "blocks": [
                {"q": blk.q, "rooted": blk.rooted, "simplexes": [s.shape.to_json() for s in blk.simplexes]}
                for blk in self.blocks
            ],
        }

    @classmethod
    def from_json(cls, data) -> SimplicialComplex:
        try:
            M = int(data["M"])
            blocks = []
            for blk in data["blocks"]:
                q = int(blk["q"])
                simps = tuple(PadicSimplex(M, DiscretePolytope.from_json(s)) for s in blk["simplexes"])
                if any(s.q != q for s in simps):
                    raise ValidationError("simplex dimension differs from its block")
                blocks.append(Block(q, simps, bool(blk.get("rooted", True))))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed complex: {exc}") from exc
        return cls(M, tuple(blocks))


def specializes(t: DiscretePolytope, s: DiscretePolytope) -> bool:
    """t <= s in the specialization order: t is contained in the closure of s."""
    if not t.support <= s.support:
        return False
    F = face(s, t.support)
    return F is not None and is_subset(t, F)


def closure_family(shapes: Sequence[DiscretePolytope]) -> list[DiscretePolytope]:
    """All faces of the given shapes, deduplicated as sets, sorted by support."""
    out: list[DiscretePolytope] = []
    for S in shapes:
        for F in all_faces(S).values():
            if not any(same_set(F, G) for G in out):
                out.append(F)
    out.sort(key=lambda F: (len(F.support), sorted(F.support), str(F)))
    return out


@dataclass
class ComplexReport:
    is_complex: bool = True
    is_monoplex: bool = True
    is_closed: bool = True
    is_well_dispatched: bool = True
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.is_complex and self.is_monoplex

    def to_json(self) -> dict:
        return {
            "is_complex": self.is_complex,
            "is_monoplex": self.is_monoplex,
            "is_closed": self.is_closed,
            "is_well_dispatched": self.is_well_dispatched,
            "violations": sorted(self.violations),
        }


def _is_tree(nodes: Sequence, leq) -> tuple[bool, bool]:
    """(is a tree, has a smallest element) for the order ``leq`` on nodes."""
    tree = True
    for a in nodes:
        below = [b for b in nodes if b is not a and leq(b, a)]
        for x, y in combinations(below, 2):
            if not (leq(x, y) or leq(y, x)):
                tree = False
    rooted = any(all(leq(r, b) for b in nodes) for r in nodes) if nodes else True
    return tree, rooted


def validate_block(blk: Block, b: int = 0, rep: ComplexReport | None = None) -> ComplexReport:
    rep = rep or ComplexReport()
    tag = f"block {b}"
    shapes = [s.shape for s in blk.simplexes]
    for i, S in enumerate(shapes):
        try:
            validate(S)
            r = is_simplex(S)
        except ValidationError as exc:
            rep.is_complex = False
            rep.violations.append(f"{tag}: simplex {i} invalid: {exc}")
            continue
        if not r.is_simplex:
            rep.is_complex = False
            rep.violations.append(f"{tag}: simplex {i} is not a simplex")
    if not rep.is_complex:
        rep.is_monoplex = rep.is_closed = rep.is_well_dispatched = False
        return rep
    for i, j in combinations(range(len(shapes)), 2):
        if intersects(shapes[i], shapes[j]):
            rep.is_complex = False
            rep.violations.append(f"{tag}: simplexes {i} and {j} are not disjoint")
    # closure(S) n closure(T) must be the union of common faces
    faces = [all_faces(S) for S in shapes]
    for i, j in combinations(range(len(shapes)), 2):
        for J, F in faces[i].items():
            G = faces[j].get(J)
            if G is not None and intersects(F, G) and not same_set(F, G):
                rep.is_complex = False
                rep.violations.append(
                    f"{tag}: closures of {i} and {j} meet outside common faces at Supp={fmt_support(J)}")
    closure = closure_family(shapes)
    for S in closure:
        if not any(same_set(S, T) for T in shapes):
            rep.is_closed = False
            rep.violations.append(f"{tag}: face Supp={fmt_support(S.support)} missing (not closed)")
            break
    tree, rooted = _is_tree(shapes, specializes)
    if not tree:
        rep.is_monoplex = False
        rep.violations.append(f"{tag}: specialization order is not a tree")
    if blk.rooted and not rooted:
        rep.is_monoplex = False
        rep.violations.append(f"{tag}: not rooted")
    for S, T in combinations(closure, 2):
        for X, Y in ((S, T), (T, S)):
            if specializes(X, Y) != (X.support <= Y.support):
                rep.is_well_dispatched = False
                rep.violations.append(
                    f"{tag}: order and support inclusion disagree for "
                    f"Supp={fmt_support(X.support)} vs Supp={fmt_support(Y.support)}")
    return rep


def validate_complex(c: SimplicialComplex) -> ComplexReport:
    rep = ComplexReport()
    for b, blk in enumerate(c.blocks):
        if any(s.M != c.M for s in blk.simplexes):
            rep.is_complex = False
            rep.violations.append(f"block {b}: index mismatch")
        validate_block(blk, b, rep)
    rep.violations = sorted(set(rep.violations))
    return rep


def hasse_edges(shapes: Sequence[DiscretePolytope]) -> list[tuple[int, int]]:
    """Covering pairs (face, simplex) of the specialization order."""
    n = len(shapes)
    leq = [[i != j and specializes(shapes[i], shapes[j]) for j in range(n)] for i in range(n)]
    edges = []
    for i in range(n):
        for j in range(n):
            if leq[i][j] and not any(leq[i][k] and leq[k][j] for k in range(n)):
                edges.append((i, j))
    return edges


def complex_dot(c: SimplicialComplex, name: str = "specialization") -> str:
    lines = [f"digraph {name} {{", "  rankdir=BT;"]
    for b, blk in enumerate(c.blocks):
        shapes = [s.shape for s in blk.simplexes]
        lines.append(f"  subgraph cluster_{b} {{")
        lines.append(f'    label="block {b}";')
        for i, s in enumerate(blk.simplexes):
            lines.append(f'    n{b}_{i} [label="{s.label()}"];')
        for i, j in hasse_edges(shapes):
            lines.append(f"    n{b}_{i} -> n{b}_{j};")
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# retraction


@dataclass
class Retraction:
    """Evaluable retraction of the union of a closed complex onto a lower subset."""

    complex: SimplicialComplex
    target: frozenset[tuple[int, int]]
    route: dict[tuple[int, int], tuple[int, int] | None]  # next simplex down, None = base point
    base: tuple[int, tuple]  # (block, point) of the designated base point
    p: int

    def locate(self, block: int, x: Sequence) -> tuple[int, int]:
        for i, s in enumerate(self.complex.blocks[block].simplexes):
            if member(s, x, self.p):
                return (block, i)
        raise NotInComplex(f"point {tuple(str(c) for c in x)} lies in no simplex of block {block}")

    def final(self, ref: tuple[int, int]) -> tuple[int, int] | None:
        """Target simplex reached from ``ref`` (None when routed to the base point)."""
        while ref not in self.target:
            ref = self.route[ref]
            if ref is None:
                return None
        return ref

    def __call__(self, block: int, x: Sequence) -> tuple[int, tuple]:
        ref = self.locate(block, x)
        pt = tuple(x)
        while ref not in self.target:
            nxt = self.route[ref]
            if nxt is None:
                return self.base
            pt = coordinate_projection(pt, self.complex.simplex(nxt).support)
            ref = nxt
        return (ref[0], pt)


def _lower_closed(c: SimplicialComplex, refs: frozenset[tuple[int, int]]) -> bool:
    for b, i in refs:
        S = c.blocks[b].simplexes[i].shape
        for k, T in enumerate(c.blocks[b].simplexes):
            if (b, k) not in refs and specializes(T.shape, S):
                return False
    return True


def build_retraction(c: SimplicialComplex, target: Iterable[tuple[int, int]], p: int) -> Retraction:
    """Retraction of the union of the closed complex ``c`` onto ``target``.

    Simplexes outside the target are processed minimal-first: one with a
    proper face maps through the coordinate projection onto its facet, one
    without maps to the base point, i.e. the lexicographically minimal vertex
    of the first minimal target simplex lifted with unit parts 1.
    """
    target = frozenset(tuple(t) for t in target)
    refs = c.refs()
    if not target:
        if refs:
            raise EmptyTarget("target is empty but the complex is not")
    if not target <= set(refs):
        raise NotLowerSubset("target references simplexes outside the complex")
    if not _lower_closed(c, target):
        raise NotLowerSubset("target is not a lower subset")
    rep = validate_complex(c)
    if not rep.is_closed or not rep.is_complex:
        raise ValidationError("build_retraction needs a closed complex: " + "; ".join(rep.violations))
    route: dict[tuple[int, int], tuple[int, int] | None] = {}
    for b, i in refs:
        if (b, i) in target:
            continue
        s = c.blocks[b].simplexes[i]
        chain = faces_of(s)
        if chain.facet is None:
            route[(b, i)] = None
            continue
        facet = chain.facet.shape
        route[(b, i)] = next((b, k) for k, T in enumerate(c.blocks[b].simplexes) if same_set(T.shape, facet))
    base = _base_point(c, target, p) if target else (0, ())
    return Retraction(c, target, route, base, p)


def _base_point(c: SimplicialComplex, target, p: int) -> tuple[int, tuple]:
    b0 = min(b for b, _ in target)
    shapes = [(i, c.blocks[b0].simplexes[i].shape) for bb, i in target if bb == b0]
    minimal = [(i, S) for i, S in shapes if not any(j != i and specializes(T, S) for j, T in shapes)]
    i, S = min(minimal, key=lambda t: (len(t[1].support), t[0]))
    v = lex_min_point(S)
    pt = tuple(Fraction(0) if a == INF else Fraction(p) ** a for a in v)
    return (b0, pt)


def retraction_certificate(r: Retraction) -> list[str]:
    """Gamma-level checks: every route ends in the target and each simplex maps
    onto the face of itself with the target's support."""
    problems = []
    for ref, _ in r.route.items():
        end = r.final(ref)
        if end is None:
            continue
        S = r.complex.simplex(ref).shape
        T = r.complex.simplex(end).shape
        F = face(S, T.support)
        if F is None or not same_set(F, T):
            problems.append(f"simplex {ref} does not project onto target simplex {end}")
    return problems


def approach_point(s: PadicSimplex, z: Sequence, J: Iterable[int], k: int, p: int) -> tuple | None:
    """A point of ``s`` equal to ``z`` on the coordinates J, of valuation >= k elsewhere.

    Used to sample points converging to ``z`` in a face of ``s``; the
    valuation vector comes from an integer point of the presentation, the new
    unit parts are ``1 + p^M``.
    """
    sup, G, h = _relaxation(s.shape)
    J = frozenset(J)
    G, h = [list(r) for r in G], list(h)
    E, e = [], []
    for col, i in enumerate(sup):
        row = [0] * len(sup)
        if i in J:
            row[col] = 1
            E.append(row)
            e.append(valuation(as_padic(z[i], p)))
        else:
            row[col] = -1
            G.append(row)
            h.append(-k)
    pt = integer_point(G, h, E, e)
    if pt is None:
        return None
    y = list(z)
    for col, i in enumerate(sup):
        if i not in J:
            y[i] = Fraction(p) ** pt[col] * (1 + p ** s.M)
    return tuple(y)

