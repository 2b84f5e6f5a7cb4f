"""Deterministic generators of test objects: chain simplexes, complexes, monoplexes.

A *chain simplex* is determined by an ordering ``e_1, ..., e_d`` of its
support and offsets ``c_1, ..., c_d >= 0``; its valuation vectors satisfy
``a_{e_1} >= c_1`` and ``a_{e_k} >= a_{e_{k-1}} + c_k``.  Its faces are the
prefixes of the ordering, so it is a simplex whose facet drops ``e_d``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cells import CellularMonoplex, MonomialCell, MonomialFn, graph_cell
from .oracle import SplitMix64
from .padic import as_padic, vp
from .polytope import AffineMap, DiscretePolytope, Level
from .simplex import Block, PadicSimplex, SimplicialComplex


def chain_shape(q: int, order: tuple[int, ...], offsets: tuple[int, ...]) -> DiscretePolytope:
    pos = {e: k for k, e in enumerate(order)}
    prefix = [sum(offsets[: k + 1]) for k in range(len(order))]
    levels = []
    for j in range(q):
        if j not in pos:
            levels.append(Level.out())
            continue
        k = pos[j]
        earlier = [pos[i] for i in order if i < j]
        below = [m for m in earlier if m < k]
        above = [m for m in earlier if m > k]
        if below:
            m = max(below)
            mu = AffineMap.make(prefix[k] - prefix[m], {order[m]: 1})
        else:
            mu = AffineMap.make(prefix[k])
        if above:
            m = min(above)
            nu = AffineMap.make(prefix[k] - prefix[m], {order[m]: 1})
        else:
            nu = AffineMap.infinity()
        levels.append(Level(True, mu, nu))
    return DiscretePolytope(tuple(levels))


def random_polytope(rng: SplitMix64, q: int, coef: int = 4, tries: int = 200) -> DiscretePolytope:
    """A valid presentation with coefficients in [-coef, coef] (rejection sampling)."""
    from .errors import ValidationError
    from .polytope import validate

    for _ in range(tries):
        levels, sup = [], []
        for j in range(q):
            if rng.chance(1, 5):
                levels.append(Level.out())
                continue
            mu = AffineMap.make(rng.between(0, coef), {i: rng.between(-coef, coef) for i in sup if rng.chance(1, 2)})
            if rng.chance(1, 2):
                nu = AffineMap.infinity()
            else:
                nu = AffineMap.make(rng.between(0, coef), {i: rng.between(-coef, coef) for i in sup if rng.chance(1, 2)})
            levels.append(Level(True, mu, nu))
            sup.append(j)
        A = DiscretePolytope(tuple(levels))
        try:
            validate(A)
        except ValidationError:
            continue
        return A
    raise RuntimeError("no valid polytope found")


@dataclass
class SocleNode:
    order: tuple[int, ...]
    offsets: tuple[int, ...]
    parent: int | None
    simplex: PadicSimplex


def random_socle_tree(rng: SplitMix64, q: int, M: int, max_nodes: int, max_depth: int) -> list[SocleNode]:
    """A rooted tree of chain simplexes in D^M R^q; each child adds one coordinate."""
    root = SocleNode((), (), None, PadicSimplex(M, chain_shape(q, (), ())))
    nodes = [root]
    used = {frozenset()}
    frontier = [0]
    while frontier and len(nodes) < max_nodes:
        i = frontier.pop(rng.below(len(frontier)))
        node = nodes[i]
        if len(node.order) >= min(q, max_depth):
            continue
        free = [e for e in range(q) if e not in node.order]
        for _ in range(rng.between(1, 2)):
            if not free or len(nodes) >= max_nodes:
                break
            e = free.pop(rng.below(len(free)))
            order = node.order + (e,)
            if frozenset(order) in used:
                continue
            used.add(frozenset(order))
            offs = node.offsets + (rng.between(0, 2),)
            nodes.append(SocleNode(order, offs, i, PadicSimplex(M, chain_shape(q, order, offs))))
            frontier.append(len(nodes) - 1)
    return nodes


def socle_complex(nodes: list[SocleNode]) -> SimplicialComplex:
    M = nodes[0].simplex.M
    return SimplicialComplex(M, (Block(nodes[0].simplex.q, tuple(n.simplex for n in nodes), True),))


def _mono(rng: SplitMix64, p: int, v: int, exps: dict[int, int]) -> MonomialFn:
    unit = rng.choice([1, 2, 4, 5, 7, 8]) if p != 2 else rng.choice([1, 3, 5])
    while unit % p == 0:
        unit += 1
    return MonomialFn.mono(Fraction(p) ** v * unit, exps, p=p)


def random_monoplex(seed: int, q: int = 3, p: int = 3, N: int = 2, M: int = 2,
                    max_nodes: int = 10, max_depth: int = 4) -> tuple[CellularMonoplex, SimplicialComplex]:
    """A closed rooted cellular monoplex with monomial data over a chain-simplex tree.

    Each socle carries a type-0 cell, a type-1 cell, or both (type 0 below
    type 1); once type 1 appears along a branch it persists, so the cell tree
    is consistent with the boundary laws.  All cells lie in R^{q+1}.
    """
    rng = SplitMix64(seed)
    Mp = M + int(vp(N, p))
    vl = rng.below(N)
    lam = as_padic(Fraction(p) ** vl * (1 + p * rng.below(3)), p)
    socles = random_socle_tree(rng, q, M, max(2, max_nodes // 2 + 1), min(q, max_depth - 2))
    cells: list[MonomialCell] = []
    parent: list[int | None] = []
    # per socle node: (status, c, nu, mu, index of type-0 cell, index of type-1 cell)
    state: dict[int, tuple] = {}

    def add(cell, par):
        if len(cells) >= max_nodes:
            return None
        cells.append(cell)
        parent.append(par)
        return len(cells) - 1

    zero = MonomialFn.zero()
    for k, node in enumerate(socles):
        U = node.simplex
        supp = sorted(U.support)
        if node.parent is None:
            c = zero if rng.chance(1, 3) else _mono(rng, p, rng.below(2), {})
            status = rng.choice(["0", "0", "01", "1"])
            vmu = vl + N * rng.below(2)
            mu = _mono(rng, p, vmu, {}) if status != "0" else zero
            nu = _mono(rng, p, vmu + N * rng.between(0, 2), {}) if status == "1" else zero
            i0 = add(graph_cell(U, c, N, Mp, p, (0, k)), None) if status in ("0", "01") else None
            i1 = None
            if status != "0":
                i1 = add(MonomialCell(U, c, nu, mu, lam, N, Mp, 1, p, (0, k)), i0)
            state[k] = (status, c, nu, mu, i0, i1)
            continue
        if node.parent not in state:
            continue
        ps, pc, pnu, pmu, p0, p1 = state[node.parent]
        e = node.order[-1]
        if pc.is_zero and rng.chance(1, 2):
            ex = {e: rng.between(1, 2)}
            ex.update({i: 1 for i in supp if i != e and rng.chance(1, 3)})
            c = _mono(rng, p, rng.below(2), ex)
        else:
            c = pc
        if p1 is not None and ps in ("01", "1"):
            status = "1"
            mu = pmu
            if pnu.is_zero:
                ex = dict(mu.exps)
                ex[e] = ex.get(e, 0) + N * rng.between(1, 2)
                nu = MonomialFn.mono(mu.xi * Fraction(p) ** (N * rng.below(2)), ex)
            else:
                nu = pnu
            i1 = add(MonomialCell(U, c, nu, mu, lam, N, Mp, 1, p, (0, k)), p1)
            if i1 is None:
                continue
            state[k] = (status, c, nu, mu, None, i1)
            continue
        if p0 is None:
            continue
        status = rng.choice(["0", "0", "01", "1"])
        if status == "0":
            i0 = add(graph_cell(U, c, N, Mp, p, (0, k)), p0)
            if i0 is not None:
                state[k] = ("0", c, zero, zero, i0, None)
            continue
        ex = {e: N * rng.between(1, 2)}
        ex.update({i: N for i in supp if i != e and rng.chance(1, 4)})
        mu = _mono(rng, p, vl + N * rng.below(2), ex)
        if status == "01":
            i0 = add(graph_cell(U, c, N, Mp, p, (0, k)), p0)
            if i0 is None:
                continue
            i1 = add(MonomialCell(U, c, zero, mu, lam, N, Mp, 1, p, (0, k)), i0)
            if i1 is None:
                # drop the lone type-0 cell's partner: it stays a valid type-0 leaf
                state[k] = ("0", c, zero, zero, i0, None)
                continue
            state[k] = ("01", c, zero, mu, i0, i1)
        else:
            ex2 = dict(mu.exps)
            ex2[e] += N * rng.between(0, 1)
            nu = MonomialFn.mono(mu.xi * Fraction(p) ** (N * rng.below(2)), ex2)
            i1 = add(MonomialCell(U, c, nu, mu, lam, N, Mp, 1, p, (0, k)), p0)
            if i1 is not None:
                state[k] = ("1", c, nu, mu, None, i1)
    return CellularMonoplex(cells, parent), socle_complex(socles)
