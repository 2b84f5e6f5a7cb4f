"""Sparse multivariate polynomials over Q in variables X_1..X_m, T."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import ValidationError
from .padic import parse_rational

Exponent = tuple[int, ...]


@dataclass(frozen=True)
class Polynomial:
    """Exponent tuples (e_1..e_m, e_T) mapped to nonzero rational coefficients."""

    nvars: int
    terms: tuple[tuple[Exponent, Fraction], ...]

    @classmethod
    def make(cls, nvars: int, terms: Mapping[Exponent, object] | Sequence[tuple[Exponent, object]]) -> Polynomial:
        acc: dict[Exponent, Fraction] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for e, c in items:
            e = tuple(int(x) for x in e)
            if len(e) != nvars or any(x < 0 for x in e):
                raise ValidationError(f"bad exponent {e} for {nvars} variables")
            acc[e] = acc.get(e, Fraction(0)) + parse_rational(c)
        return cls(nvars, tuple(sorted((e, c) for e, c in acc.items() if c)))

    @classmethod
    def zero(cls, nvars: int) -> Polynomial:
        return cls(nvars, ())

    @classmethod
    def constant(cls, nvars: int, c) -> Polynomial:
        return cls.make(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars: int, i: int) -> Polynomial:
        e = [0] * nvars
        e[i] = 1
        return cls.make(nvars, {tuple(e): 1})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return max((sum(e) for e, _ in self.terms), default=-1)

    def as_dict(self) -> dict[Exponent, Fraction]:
        return dict(self.terms)

    def coefficient(self, e: Exponent) -> Fraction:
        return self.as_dict().get(tuple(e), Fraction(0))

    def homogeneous_part(self, d: int) -> Polynomial:
        return Polynomial(self.nvars, tuple(t for t in self.terms if sum(t[0]) == d))

    def top_form(self) -> Polynomial:
        return self.homogeneous_part(self.degree)

    def __add__(self, other: Polynomial) -> Polynomial:
        return Polynomial.make(self.nvars, list(self.terms) + list(other.terms))

    def __neg__(self) -> Polynomial:
        return Polynomial(self.nvars, tuple((e, -c) for e, c in self.terms))

    def __sub__(self, other: Polynomial) -> Polynomial:
        return self + (-other)

    def __mul__(self, other) -> Polynomial:
        if not isinstance(other, Polynomial):
            c = Fraction(other)
            return Polynomial.make(self.nvars, [(e, a * c) for e, a in self.terms])
        out: dict[Exponent, Fraction] = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return Polynomial.make(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> Polynomial:
        out = Polynomial.constant(self.nvars, 1)
        for _ in range(n):
            out = out * self
        return out

    def __call__(self, point: Sequence) -> Fraction:
        total = Fraction(0)
        for e, c in self.terms:
            term = c
            for x, k in zip(point, e):
                if k:
                    term *= Fraction(x) ** k
            total += term
        return total

    def partial_eval(self, point: Sequence) -> dict[int, Fraction]:
        """Fix X = point; return the univariate polynomial in T as {degree: coef}."""
        out: dict[int, Fraction] = {}
        for e, c in self.terms:
            term = c
            for x, k in zip(point, e[:-1]):
                if k:
                    term *= Fraction(x) ** k
            if term:
                out[e[-1]] = out.get(e[-1], Fraction(0)) + term
        return {k: v for k, v in out.items() if v}

    def to_json(self) -> dict:
        return {"nvars": self.nvars,
                "terms": [{"exp": list(e), "coef": str(c)} for e, c in self.terms]}

    @classmethod
    def from_json(cls, data) -> Polynomial:
        try:
            terms = [(tuple(t["exp"]), t["coef"]) for t in data["terms"]]
            nvars = int(data["nvars"]) if "nvars" in data else len(terms[0][0])
        except (KeyError, TypeError, IndexError, ValueError) as exc:
            raise ValidationError(f"malformed polynomial: {exc}") from exc
        return cls.make(nvars, terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        names = [f"X{i + 1}" for i in range(self.nvars - 1)] + ["T"]
        if self.nvars == 2:
            names = ["X", "T"]
        parts = []
        for e, c in sorted(self.terms, key=lambda t: (-sum(t[0]), t[0])):
            mono = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k)
            parts.append(str(c) if not mono else (mono if c == 1 else f"{c}*{mono}"))
        return " + ".join(parts)

