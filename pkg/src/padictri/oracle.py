"""Brute-force ground truth over finite windows of Gamma^q.

Nothing here reuses the LP machinery: membership is evaluated directly from a
presentation over a grid, closures are decided from the growth of fibres
between two window scales, and extension
classifications are read off sampled fibers.  These routines exist to
corroborate the exact decisions, never to replace them.

The pseudo-random generator is splitmix64::

    state += 0x9E3779B97F4A7C15            (mod 2**64)
    z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    return z ^ (z >> 31)

``below(n)`` returns ``next() % n``.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import lcm
from typing import Iterable, Sequence

import numpy as np

from . import _accel
from .errors import WindowTooLarge
from .polytope import INF, AffineMap, DiscretePolytope

MAX_WINDOW_POINTS = 10**7
_MASK64 = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        return self.next() % n

    def between(self, lo: int, hi: int) -> int:
        """Uniform-ish integer in the closed range [lo, hi]."""
        return lo + self.below(hi - lo + 1)

    def choice(self, seq):
        return seq[self.below(len(seq))]

    def chance(self, num: int, den: int) -> bool:
        return self.below(den) < num


@dataclass(frozen=True)
class Window:
    bound: int
    q: int

    @property
    def size(self) -> int:
        return (self.bound + 2) ** self.q


# ---------------------------------------------------------------------------
# presentation encoding


@dataclass
class _Encoded:
    sup: list[int]
    mu_c: np.ndarray
    mu_a: np.ndarray
    mu_d: np.ndarray
    nu_c: np.ndarray
    nu_a: np.ndarray
    nu_d: np.ndarray
    nu_inf: np.ndarray


def _scale(f: AffineMap, pos: dict[int, int], s: int):
    den = lcm(f.const.denominator, *(c.denominator for _, c in f.coeffs))
    row = np.zeros(s, dtype=np.int64)
    for i, c in f.coeffs:
        row[pos[i]] = int(c * den)
    return int(f.const * den), row, den


def _encode(A: DiscretePolytope) -> _Encoded:
    sup = sorted(A.support)
    pos = {i: k for k, i in enumerate(sup)}
    s = len(sup)
    enc = _Encoded(sup, np.zeros(s, np.int64), np.zeros((s, s), np.int64), np.ones(s, np.int64),
                   np.zeros(s, np.int64), np.zeros((s, s), np.int64), np.ones(s, np.int64),
                   np.zeros(s, np.bool_))
    for k, j in enumerate(sup):
        lv = A.levels[j]
        enc.mu_c[k], enc.mu_a[k], enc.mu_d[k] = _scale(lv.mu, pos, s)
        if lv.nu.infinite:
            enc.nu_inf[k] = True
        else:
            enc.nu_c[k], enc.nu_a[k], enc.nu_d[k] = _scale(lv.nu, pos, s)
    return enc


def grid_members(A: DiscretePolytope, bound: int, backend: str | None = None) -> np.ndarray:
    """Members of A with every supported coordinate in [0, bound].

    Returns an integer array of shape (n, s) over the supported coordinates,
    in lexicographic order.
    """
    enc = _encode(A)
    s = len(enc.sup)
    if (bound + 1) ** s > 10 * MAX_WINDOW_POINTS:
        raise WindowTooLarge(f"grid of {(bound + 1) ** s} points")
    kernel = {"numba": _accel.members_mask_numba, "numpy": _accel.members_mask_numpy}.get(
        backend or _accel.BACKEND)
    if kernel is None:
        raise ValueError(f"backend {backend!r} unavailable")
    mask = kernel(bound, enc.mu_c, enc.mu_a, enc.mu_d, enc.nu_c, enc.nu_a, enc.nu_d, enc.nu_inf)
    idx = np.nonzero(mask)[0]
    if s == 0:
        return np.zeros((len(idx), 0), dtype=np.int64)
    digits = np.empty((len(idx), s), dtype=np.int64)
    rem = idx.astype(np.int64)
    for k in range(s - 1, -1, -1):
        digits[:, k] = rem % (bound + 1)
        rem //= bound + 1
    return digits


def _lift(A: DiscretePolytope, sup: Sequence[int], rows: Iterable[Sequence[int]]) -> list[tuple]:
    out = []
    for r in rows:
        pt = [INF] * A.q
        for k, i in enumerate(sup):
            pt[i] = int(r[k])
        out.append(tuple(pt))
    return out


def _gamma_key(pt):
    return tuple((1, 0) if x == INF else (0, x) for x in pt)


def _presentation_bounds(A: DiscretePolytope) -> tuple[int, int]:
    K = C = 0
    for lv in A.levels:
        for f in (lv.mu, lv.nu):
            if f is None or f.infinite:
                continue
            K = max(K, abs(f.const))
            C = max([C] + [abs(c) for _, c in f.coeffs])
    return int(K) + 1, int(C) + 1


def closure_status(A: DiscretePolytope, w: Window) -> dict[tuple, bool]:
    """Decide closure membership of window points by brute force, where possible.

    A window point with support S lies in the closure when members of A agree
    with it on S while every other supported coordinate tends to +inf, i.e.
    when the smallest off-S coordinate is unbounded on that fibre.  Two facts
    about triangular presentations make a finite search conclusive:

    * a coordinate that is bounded on the fibre is bounded by its nu at the
      fixed coordinates, hence by cap = K + C * B * q (K, C bound the
      constants and coefficients), so a member whose smallest off-S
      coordinate exceeds cap proves the point is in the closure;
    * an unbounded fibre has an integral escape direction with entries at
      most C^q, so if the best smallest off-S coordinate among members up to
      R does not improve up to 2R (R >= C^q), the fibre is bounded.

    Points where neither certificate is found within 2R are omitted.
    """
    if w.q != A.q:
        raise ValueError("dimension mismatch")
    if w.size > MAX_WINDOW_POINTS:
        raise WindowTooLarge(f"(B+2)^q = {w.size} exceeds {MAX_WINDOW_POINTS}")
    K, C = _presentation_bounds(A)
    cap = K + C * w.bound * A.q
    R = max(cap + 1, C ** A.q)
    sup = sorted(A.support)
    s = len(sup)
    pts = grid_members(A, 2 * R)
    near = (pts <= R).all(axis=1) if s else np.ones(len(pts), dtype=np.bool_)
    out: dict[tuple, bool] = {}
    for r in range(s + 1):
        for S in combinations(range(s), r):
            S = list(S)
            off = [k for k in range(s) if k not in S]
            sel = (pts[:, S] <= w.bound).all(axis=1) if S else np.ones(len(pts), dtype=np.bool_)
            keys = pts[sel][:, S].tolist()
            minoff = pts[sel][:, off].min(axis=1).tolist() if off else [0] * len(keys)
            far: dict[tuple, int] = {}
            close: dict[tuple, int] = {}
            for key, m, n in zip(map(tuple, keys), minoff, near[sel].tolist()):
                far[key] = max(far.get(key, -1), m)
                if n:
                    close[key] = max(close.get(key, -1), m)
            for key, best in far.items():
                pt = [INF] * A.q
                for k, val in zip(S, key):
                    pt[sup[k]] = int(val)
                if not off or best > cap:
                    out[tuple(pt)] = True
                elif key in close and close[key] == best:
                    out[tuple(pt)] = False
    return out


def enumerate_members(A: DiscretePolytope, w: Window, closure: bool = False) -> list[tuple]:
    """Points of the window ({0..B} u {+inf})^q lying in A, or decided to lie in its closure."""
    if w.q != A.q:
        raise ValueError("dimension mismatch")
    if w.size > MAX_WINDOW_POINTS:
        raise WindowTooLarge(f"(B+2)^q = {w.size} exceeds {MAX_WINDOW_POINTS}")
    if not closure:
        return sorted(_lift(A, sorted(A.support), grid_members(A, w.bound)), key=_gamma_key)
    status = closure_status(A, w)
    return sorted((pt for pt, ok in status.items() if ok), key=_gamma_key)


# ---------------------------------------------------------------------------
# extension behaviour from samples


@dataclass
class OracleExtension:
    kind: str  # finite | infinite | not_extendable | inconclusive
    values: dict

    def agrees_with(self, kind: str) -> bool:
        return self.kind == kind


def classify_extension(f: AffineMap, A: DiscretePolytope, J: Iterable[int],
                       bounds: Sequence[int] = (8, 16, 32), key_bound: int = 3) -> OracleExtension:
    """Sampled behaviour of ``f`` toward the face F_J(A).

    For each window bound B, the points of A whose J-coordinates are at most
    ``key_bound`` and whose other supported coordinates are at least B/2 are
    grouped by their J-coordinates.  ``f`` is judged finite when it is
    constant on every group and consistent across windows, infinite when the
    per-group minimum grows between the last two windows for every group, and
    not extendable otherwise.
    """
    J = frozenset(J)
    sup = sorted(A.support)
    jpos = [k for k, i in enumerate(sup) if i in J]
    opos = [k for k, i in enumerate(sup) if i not in J]
    if f.infinite:
        return OracleExtension("infinite", {})
    den = lcm(f.const.denominator, *(c.denominator for _, c in f.coeffs))
    coef = np.zeros(len(sup), dtype=np.int64)
    for i, c in f.coeffs:
        coef[sup.index(i)] = int(c * den)
    c0 = int(f.const * den)
    per_bound = []
    for B in bounds:
        pts = grid_members(A, B)
        sel = np.ones(len(pts), dtype=np.bool_)
        if jpos:
            sel &= (pts[:, jpos] <= key_bound).all(axis=1)
        if opos:
            sel &= (pts[:, opos] * 2 >= B).all(axis=1)
        pts = pts[sel]
        vals = pts @ coef + c0
        groups: dict[tuple, list[int]] = defaultdict(list)
        for row, v in zip(pts[:, jpos], vals):
            groups[tuple(int(x) for x in row)].append(int(v))
        per_bound.append(groups)
    common = set(per_bound[0])
    for g in per_bound[1:]:
        common &= set(g)
    if not common:
        return OracleExtension("inconclusive", {})
    constant = all(len(set(g[k])) == 1 for g in per_bound for k in g)
    consistent = all(len({g[k][0] for g in per_bound}) == 1 for k in common)
    sizes = max(len(g[k]) for g in per_bound for k in g)
    if constant and consistent:
        if sizes < 2 and opos:
            return OracleExtension("inconclusive", {})
        return OracleExtension("finite", {k: Fraction(per_bound[-1][k][0], den) for k in sorted(common)})
    if len(bounds) >= 2 and all(min(per_bound[-1][k]) > min(per_bound[-2][k]) for k in common):
        return OracleExtension("infinite", {})
    return OracleExtension("not_extendable", {})


# ---------------------------------------------------------------------------
# p-adic sampling


def sample_padic(s, depth: int, count: int, seed: int, p: int, unit_digits: int = 4) -> list[tuple]:
    """Deterministic rational points of a p-adic simplex ``s``.

    Each point has valuation vector in ``s.shape`` with finite entries at most
    ``depth`` (doubled until the window meets the shape); a finite coordinate k becomes ``p^k (1 + p^M t)`` with
    ``0 <= t < p^unit_digits``, an infinite one becomes 0.
    """
    sup = sorted(s.shape.support)
    vals: list[tuple] = []
    bound = depth
    while not vals and (bound + 1) ** len(sup) <= MAX_WINDOW_POINTS:
        vals = sorted(_lift(s.shape, sup, grid_members(s.shape, bound)), key=_gamma_key)
        bound *= 2
    if not vals:
        return []
    rng = SplitMix64(seed)
    out = []
    for _ in range(count):
        v = vals[rng.below(len(vals))]
        pt = []
        for a in v:
            if a == INF:
                pt.append(Fraction(0))
            else:
                t = rng.below(p ** unit_digits)
                pt.append(Fraction(p) ** a * (1 + p ** s.M * t))
        out.append(tuple(pt))
    return out
