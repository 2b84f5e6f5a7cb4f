"""Good directions for a finite family of polynomials in (X_1..X_m, T).

For the family F let p = prod F and p° its top homogeneous component.  A
direction eta with p°(eta, 1) != 0 makes every sheared polynomial
f(X + T eta, T) monic-up-to-a-constant in T, so its fibers over K^m are
finite.  Directions are searched on the grid p^s * {0..d}^m in
lexicographic order; the search always succeeds because a nonzero
polynomial of degree d cannot vanish on a (d+1)-point grid per variable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

from .errors import BadDirection, ZeroPolynomial
from .oracle import SplitMix64
from .polynomial import Polynomial


def leading_form(family: Sequence[Polynomial]) -> Polynomial:
    if not family:
        raise ZeroPolynomial("empty family")
    prod_ = Polynomial.constant(family[0].nvars, 1)
    for f in family:
        if f.is_zero:
            raise ZeroPolynomial("family contains the zero polynomial")
        prod_ = prod_ * f
    return prod_.top_form()


def find_direction(family: Sequence[Polynomial], s: int, p: int) -> tuple[Fraction, ...]:
    if s < 0:
        raise ValueError("s must be nonnegative")
    lead = leading_form(family)
    m = lead.nvars - 1
    d = lead.degree
    scale = Fraction(p) ** s
    for grid in product(range(d + 1), repeat=m):
        eta = tuple(scale * a for a in grid)
        if lead(eta + (1,)) != 0:
            return eta
    raise AssertionError("a nonzero form vanished on the whole grid")  # pragma: no cover


def shear(f: Polynomial, eta: Sequence) -> Polynomial:
    """f(X + T eta, T)."""
    m = f.nvars - 1
    if len(eta) != m:
        raise ValueError("eta has the wrong length")
    T = Polynomial.variable(f.nvars, m)
    subs = [Polynomial.variable(f.nvars, i) + T * Fraction(eta[i]) for i in range(m)]
    out = Polynomial.zero(f.nvars)
    for e, c in f.terms:
        term = Polynomial.constant(f.nvars, c) * T ** e[m]
        for i in range(m):
            if e[i]:
                term = term * subs[i] ** e[i]
        out = out + term
    return out


@dataclass
class DirectionReport:
    eta: tuple[Fraction, ...]
    leading_value: Fraction
    t_coefficients: list[Fraction] = field(default_factory=list)
    samples: int = 0

    def to_json(self) -> dict:
        return {
            "eta": [str(x) for x in self.eta],
            "leading_value": str(self.leading_value),
            "t_coefficients": [str(c) for c in self.t_coefficients],
            "samples_checked": self.samples,
            "certified": True,
        }


def certify_direction(family: Sequence[Polynomial], eta: Sequence, samples: int = 50,
                      seed: int = 2024) -> DirectionReport:
    eta = tuple(Fraction(x) for x in eta)
    lead = leading_form(family)
    val = lead(eta + (1,))
    if val == 0:
        raise BadDirection("leading form vanishes at (eta, 1)", {"eta": [str(x) for x in eta]})
    m = lead.nvars - 1
    report = DirectionReport(eta, val)
    for k, f in enumerate(family):
        d = f.degree
        g = shear(f, eta)
        top = (0,) * m + (d,)
        coef = g.coefficient(top)
        expected = f.top_form()(eta + (1,))
        if coef == 0 or coef != expected:
            raise BadDirection(f"polynomial {k}: T^{d} coefficient {coef} != f°(eta,1) = {expected}",
                               {"index": k, "coefficient": str(coef)})
        report.t_coefficients.append(coef)
    rng = SplitMix64(seed)
    for _ in range(samples):
        a = tuple(Fraction(rng.between(-20, 20), rng.between(1, 7)) for _ in range(m))
        for k, f in enumerate(family):
            if not shear(f, eta).partial_eval(a):
                raise BadDirection(f"polynomial {k} vanishes identically on the fiber over {a}",
                                   {"index": k, "point": [str(x) for x in a]})
        report.samples += 1
    return report
