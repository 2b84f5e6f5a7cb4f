"""Exact rational linear programming.

Dense two-phase tableau simplex over ``Fraction`` with Bland's rule, so it
terminates on degenerate problems.  Problems here are tiny (a few dozen
variables at most), which is why no sparse structure is attempted.

All variables are constrained to be nonnegative:

    minimize    c . x
    subject to  A_ub x <= b_ub,  A_eq x == b_eq,  x >= 0
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class LPResult:
    status: str
    value: Fraction | None = None
    x: list[Fraction] | None = None

    @property
    def ok(self) -> bool:
        return self.status == OPTIMAL


class _Tableau:
    def __init__(self, rows: list[list[Fraction]], rhs: list[Fraction], basis: list[int]):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis

    def pivot(self, r: int, col: int) -> None:
        row = self.rows[r]
        piv = row[col]
        if piv != 1:
            inv = 1 / piv
            self.rows[r] = row = [a * inv for a in row]
            self.rhs[r] *= inv
        for i, other in enumerate(self.rows):
            if i == r:
                continue
            f = other[col]
            if f:
                self.rows[i] = [a - f * b for a, b in zip(other, row)]
                self.rhs[i] -= f * self.rhs[r]
        self.basis[r] = col

    def reduced_costs(self, cost: list[Fraction]) -> list[Fraction]:
        red = list(cost)
        for i, b in enumerate(self.basis):
            cb = cost[b]
            if cb:
                row = self.rows[i]
                for j in range(len(red)):
                    if row[j]:
                        red[j] -= cb * row[j]
        return red

    def run(self, cost: list[Fraction], allowed: int) -> str:
        """Minimise ``cost`` using columns ``< allowed`` as entering candidates."""
        while True:
            red = self.reduced_costs(cost)
            col = next((j for j in range(allowed) if red[j] < 0), None)
            if col is None:
                return OPTIMAL
            best = None
            for i, row in enumerate(self.rows):
                a = row[col]
                if a > 0:
                    ratio = self.rhs[i] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return UNBOUNDED
            self.pivot(best[1], col)


def _frac_rows(rows) -> list[list[Fraction]]:
    return [[Fraction(a) for a in row] for row in rows]


def linprog(
    c: Sequence,
    A_ub: Sequence[Sequence] = (),
    b_ub: Sequence = (),
    A_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
    maximize: bool = False,
) -> LPResult:
    n = len(c)
    cost = [Fraction(a) for a in c]
    if maximize:
        cost = [-a for a in cost]
    ub = _frac_rows(A_ub)
    eq = _frac_rows(A_eq)
    n_slack = len(ub)
    m = len(ub) + len(eq)
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for i, row in enumerate(ub):
        slack = [Fraction(0)] * n_slack
        slack[i] = Fraction(1)
        rows.append(row + slack)
        rhs.append(Fraction(b_ub[i]))
    for i, row in enumerate(eq):
        rows.append(row + [Fraction(0)] * n_slack)
        rhs.append(Fraction(b_eq[i]))
    for i in range(m):
        if rhs[i] < 0:
            rows[i] = [-a for a in rows[i]]
            rhs[i] = -rhs[i]
    width = n + n_slack
    # one artificial per row keeps the phase-one basis trivial
    for i in range(m):
        art = [Fraction(0)] * m
        art[i] = Fraction(1)
        rows[i] = rows[i] + art
    tab = _Tableau(rows, rhs, [width + i for i in range(m)])
    phase1 = [Fraction(0)] * width + [Fraction(1)] * m
    tab.run(phase1, width)
    if sum(tab.rhs[i] for i, b in enumerate(tab.basis) if b >= width) != 0:
        return LPResult(INFEASIBLE)
    # drive remaining (zero-level) artificials out of the basis
    for i in range(m):
        if tab.basis[i] >= width:
            col = next((j for j in range(width) if tab.rows[i][j] != 0), None)
            if col is not None:
                tab.pivot(i, col)
    keep = [i for i in range(m) if tab.basis[i] < width]
    tab = _Tableau([tab.rows[i][:width] for i in keep], [tab.rhs[i] for i in keep], [tab.basis[i] for i in keep])
    full_cost = cost + [Fraction(0)] * n_slack
    status = tab.run(full_cost, width)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED)
    x = [Fraction(0)] * width
    for i, b in enumerate(tab.basis):
        x[b] = tab.rhs[i]
    value = sum((a * b for a, b in zip(cost, x[:n])), Fraction(0))
    return LPResult(OPTIMAL, -value if maximize else value, x[:n])


def solve_linear(rows: Sequence[Sequence], rhs: Sequence) -> list[Fraction] | None:
    """One exact solution of ``rows @ x == rhs`` (free variables set to 0), or None."""
    m = len(rows)
    n = len(rows[0]) if m else 0
    aug = [[Fraction(a) for a in row] + [Fraction(b)] for row, b in zip(rows, rhs)]
    pivots: list[int] = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, m) if aug[i][col] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = 1 / aug[r][col]
        aug[r] = [a * inv for a in aug[r]]
        for i in range(m):
            if i != r and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[r])]
        pivots.append(col)
        r += 1
        if r == m:
            break
    if any(all(a == 0 for a in row[:n]) and row[n] != 0 for row in aug):
        return None
    x = [Fraction(0)] * n
    for i, col in enumerate(pivots):
        x[col] = aug[i][n]
    return x


def integer_point(G: Sequence[Sequence], h: Sequence, E: Sequence[Sequence] = (), e: Sequence = (),
                  max_nodes: int = 5000) -> list[int] | None:
    """A nonnegative integer solution of ``G x <= h, E x == e`` or None.

    Depth-first branch and bound on the LP relaxation, minimising ``sum(x)``
    so every node LP is bounded.  Raises RuntimeError when the node budget is
    exhausted (never observed on presentations with small coefficients).
    """
    n = len(G[0]) if G else (len(E[0]) if E else 0)
    G = _frac_rows(G)
    h = [Fraction(b) for b in h]
    stack: list[tuple[list, list]] = [([], [])]
    nodes = 0
    while stack:
        rows, rhs = stack.pop()
        nodes += 1
        if nodes > max_nodes:
            raise RuntimeError("integer feasibility search exceeded its node budget")
        res = linprog([1] * n, G + rows, h + rhs, E, e)
        if res.status != OPTIMAL:
            continue
        k = next((i for i, v in enumerate(res.x) if v.denominator != 1), None)
        if k is None:
            return [int(v) for v in res.x]
        v = res.x[k]
        lo = [Fraction(0)] * n
        lo[k] = Fraction(1)
        hi = [Fraction(0)] * n
        hi[k] = Fraction(-1)
        floor = v.numerator // v.denominator
        stack.append((rows + [hi], rhs + [Fraction(-(floor + 1))]))
        stack.append((rows + [lo], rhs + [Fraction(floor)]))
    return None
