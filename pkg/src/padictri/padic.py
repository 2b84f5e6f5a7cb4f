"""Exact arithmetic in Q_p with tracked precision.

A nonzero element is stored as ``p**valuation * unit`` where ``unit`` is known
modulo ``p**precision``.  Numbers built from rationals additionally keep their
exact value, so every operation on them is exact and their unit part can be
re-materialised to any number of digits.  Only Hensel roots are inexact.

The uniformizer is ``p`` itself, so the angular component ``ac_M`` is simply
the unit residue modulo ``p**M``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import InsufficientPrecision, NotInDomain, ZeroArgument

DEFAULT_PRECISION = 24
INF = math.inf

Rational = Union[int, Fraction]


def vp(n: int, p: int) -> int | float:
    """Valuation of a nonzero integer; ``INF`` for 0."""
    if n == 0:
        return INF
    n = abs(n)
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def vp_rational(q: Rational, p: int) -> int | float:
    q = Fraction(q)
    if q == 0:
        return INF
    return vp(q.numerator, p) - vp(q.denominator, p)


def parse_rational(text: str | int | Fraction) -> Fraction:
    """Parse ``"a/b"`` or ``"a"`` (ints and Fractions pass through)."""
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    text = str(text).strip()
    if "/" in text:
        a, b = text.split("/", 1)
        return Fraction(int(a), int(b))
    return Fraction(int(text))


def _unit_of(q: Fraction, p: int, k: int) -> int:
    """Unit part of a nonzero rational modulo p**k."""
    v = vp_rational(q, p)
    num, den = q.numerator, q.denominator
    if v > 0:
        num //= p**v
    elif v < 0:
        den //= p ** (-v)
    mod = p**k
    return (num * pow(den, -1, mod)) % mod


@dataclass(frozen=True, eq=False)
class PadicNumber:
    prime: int
    is_zero: bool
    valuation: int | None
    unit_residue: int
    precision: int
    exact: Fraction | None = None

    def __post_init__(self):
        if self.precision < 1:
            raise InsufficientPrecision("precision must be at least 1")
        if not self.is_zero and self.unit_residue % self.prime == 0:
            raise ValueError("unit residue must be coprime to p")

    # construction ---------------------------------------------------------

    @classmethod
    def from_rational(cls, q: Rational | str, p: int, precision: int = DEFAULT_PRECISION) -> PadicNumber:
        q = parse_rational(q)
        if q == 0:
            return cls(p, True, None, 0, precision, Fraction(0))
        v = vp_rational(q, p)
        return cls(p, False, int(v), _unit_of(q, p, precision), precision, q)

    @classmethod
    def zero(cls, p: int, precision: int = DEFAULT_PRECISION) -> PadicNumber:
        return cls(p, True, None, 0, precision, Fraction(0))

    @classmethod
    def from_parts(cls, valuation: int, unit: int, precision: int, p: int) -> PadicNumber:
        """An inexact number ``p**valuation * unit`` with ``unit`` known mod p**precision."""
        return cls(p, False, valuation, unit % p**precision, precision, None)

    def coerce(self, other) -> PadicNumber:
        if isinstance(other, PadicNumber):
            if other.prime != self.prime:
                raise ValueError("mixing different primes")
            return other
        return PadicNumber.from_rational(other, self.prime, self.precision)

    # accessors ------------------------------------------------------------

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    @property
    def abs_precision(self) -> int | float:
        """Absolute precision: the number is known modulo p**abs_precision."""
        if self.is_exact:
            return INF
        return self.valuation + self.precision

    def unit_mod(self, k: int) -> int:
        """Unit part modulo p**k."""
        if self.is_zero:
            raise ZeroArgument("zero has no unit part")
        if self.is_exact:
            return _unit_of(self.exact, self.prime, k)
        if k > self.precision:
            raise InsufficientPrecision(f"need {k} unit digits, have {self.precision}")
        return self.unit_residue % self.prime**k

    def with_precision(self, k: int) -> PadicNumber:
        if self.is_exact:
            return PadicNumber.from_rational(self.exact, self.prime, k)
        if k > self.precision:
            raise InsufficientPrecision(f"need {k} unit digits, have {self.precision}")
        return PadicNumber.from_parts(self.valuation, self.unit_residue, k, self.prime)

    def as_rational(self) -> Fraction:
        """Exact value, or the canonical rational approximation for inexact numbers."""
        if self.is_exact:
            return self.exact
        return Fraction(self.unit_residue) * Fraction(self.prime) ** self.valuation

    # arithmetic -----------------------------------------------------------

    def __neg__(self) -> PadicNumber:
        if self.is_exact:
            return PadicNumber.from_rational(-self.exact, self.prime, self.precision)
        return PadicNumber.from_parts(self.valuation, -self.unit_residue, self.precision, self.prime)

    def __mul__(self, other) -> PadicNumber:
        other = self.coerce(other)
        p = self.prime
        if self.is_exact and other.is_exact:
            return PadicNumber.from_rational(self.exact * other.exact, p, min(self.precision, other.precision))
        if (self.is_zero and self.is_exact) or (other.is_zero and other.is_exact):
            return PadicNumber.zero(p, min(self.precision, other.precision))
        k = min(x.precision for x in (self, other) if not x.is_exact)
        unit = self.unit_mod(k) * other.unit_mod(k)
        return PadicNumber.from_parts(self.valuation + other.valuation, unit, k, p)

    __rmul__ = __mul__

    def inverse(self) -> PadicNumber:
        if self.is_zero:
            raise ZeroArgument("division by zero")
        if self.is_exact:
            return PadicNumber.from_rational(1 / self.exact, self.prime, self.precision)
        mod = self.prime**self.precision
        return PadicNumber.from_parts(-self.valuation, pow(self.unit_residue, -1, mod), self.precision, self.prime)

    def __truediv__(self, other) -> PadicNumber:
        return self * self.coerce(other).inverse()

    def __rtruediv__(self, other) -> PadicNumber:
        return self.coerce(other) * self.inverse()

    def __pow__(self, n: int) -> PadicNumber:
        if self.is_exact:
            if self.is_zero and n < 0:
                raise ZeroArgument("0 to a negative power")
            return PadicNumber.from_rational(self.exact**n, self.prime, self.precision)
        if n < 0:
            return self.inverse() ** (-n)
        mod = self.prime**self.precision
        return PadicNumber.from_parts(self.valuation * n, pow(self.unit_residue, n, mod), self.precision, self.prime)

    def __add__(self, other) -> PadicNumber:
        other = self.coerce(other)
        p = self.prime
        if self.is_exact and other.is_exact:
            return PadicNumber.from_rational(self.exact + other.exact, p, min(self.precision, other.precision))
        if self.is_zero and self.is_exact:
            return other
        if other.is_zero and other.is_exact:
            return self
        w = min(self.valuation, other.valuation)
        a = min(self.abs_precision, other.abs_precision)
        span = int(a - w)
        if span < 1:
            raise InsufficientPrecision("sum has no known digits")
        mod = p**span
        total = 0
        for x in (self, other):
            shift = x.valuation - w
            if shift < span:
                total += p**shift * x.unit_mod(span - shift)
        total %= mod
        if total == 0:
            raise InsufficientPrecision("cancellation beyond tracked precision")
        k = vp(total, p)
        return PadicNumber.from_parts(w + k, total // p**k, span - k, p)

    __radd__ = __add__

    def __sub__(self, other) -> PadicNumber:
        return self + (-self.coerce(other))

    def __rsub__(self, other) -> PadicNumber:
        return self.coerce(other) + (-self)

    # comparisons ----------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, PadicNumber):
            try:
                other = self.coerce(other)
            except (TypeError, ValueError):
                return NotImplemented
        if self.prime != other.prime:
            return False
        if self.is_exact and other.is_exact:
            return self.exact == other.exact
        if self.is_zero or other.is_zero:
            return False
        if self.valuation != other.valuation:
            return False
        k = min(self.precision, other.precision)
        return self.unit_mod(k) == other.unit_mod(k)

    def __hash__(self) -> int:
        return hash((self.prime, self.valuation))

    def __repr__(self) -> str:
        if self.is_exact:
            return f"PadicNumber({self.exact}, p={self.prime})"
        return f"PadicNumber(p^{self.valuation}*{self.unit_residue} + O(p^{self.abs_precision}), p={self.prime})"

    # serialisation --------------------------------------------------------

    def to_json(self) -> dict:
        if self.is_zero:
            return {"zero": True}
        return {"v": self.valuation, "unit": str(self.unit_residue), "prec": self.precision}

    @classmethod
    def from_json(cls, data, p: int, precision: int = DEFAULT_PRECISION) -> PadicNumber:
        """Accepts the object form or a rational string/int."""
        if isinstance(data, dict):
            if data.get("zero"):
                return cls.zero(p, precision)
            unit = int(data["unit"])
            prec = int(data["prec"])
            if unit % p == 0 or not 1 <= unit < p**prec:
                raise ValueError("unit must lie in [1, p^prec) and be coprime to p")
            return cls.from_parts(int(data["v"]), unit, prec, p)
        return cls.from_rational(parse_rational(data), p, precision)


def as_padic(x, p: int, precision: int = DEFAULT_PRECISION) -> PadicNumber:
    if isinstance(x, PadicNumber):
        return x
    return PadicNumber.from_rational(x, p, precision)


# --------------------------------------------------------------------------
# valuation, angular component, norm comparison


def valuation(x: PadicNumber) -> int | float:
    return INF if x.is_zero else x.valuation


def ac(x: PadicNumber, M: int) -> int:
    """Angular component modulo p**M (uniformizer p, so ac(p) = 1)."""
    if x.is_zero:
        raise ZeroArgument("ac of zero")
    return x.unit_mod(M)


def norm_compare(x: PadicNumber, y: PadicNumber) -> int:
    """-1, 0, 1 according as |x| <, =, > |y|."""
    vx, vy = valuation(x), valuation(y)
    if vx == vy:
        return 0
    return -1 if vx > vy else 1


# --------------------------------------------------------------------------
# subgroups


@dataclass(frozen=True)
class SubgroupSpec:
    kind: str
    N: int = 1
    M: int | None = None

    KINDS = ("P_N", "Q_NM", "U_en", "D_MR")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown subgroup kind {self.kind!r}")
        if self.N <= 0:
            raise ValueError("N must be positive")
        if self.kind != "P_N" and (self.M is None or self.M <= 0):
            raise ValueError("M must be positive")

    @classmethod
    def P(cls, N: int) -> SubgroupSpec:
        return cls("P_N", N)

    @classmethod
    def Q(cls, N: int, M: int) -> SubgroupSpec:
        return cls("Q_NM", N, M)

    @classmethod
    def U(cls, e: int, n: int) -> SubgroupSpec:
        return cls("U_en", e, n)

    @classmethod
    def D(cls, M: int) -> SubgroupSpec:
        return cls("D_MR", 1, M)


def teichmuller(a: int, p: int, k: int) -> int:
    """Teichmuller lift of ``a mod p`` to Z/p^k (fixed point of x -> x^p)."""
    mod = p**k
    x = a % mod
    while True:
        y = pow(x, p, mod)
        if y == x:
            return x
        x = y


def roots_of_unity(e: int, p: int, k: int) -> list[int]:
    """The e-th roots of unity of Q_p, reduced modulo p**k."""
    if p == 2:
        return [1, (-1) % 2**k] if e % 2 == 0 else [1]
    g = math.gcd(e, p - 1)
    residues = [a for a in range(1, p) if pow(a, g, p) == 1]
    return sorted(teichmuller(a, p, k) for a in residues)


def _is_nth_power_unit(u: int, N: int, p: int) -> bool:
    """Whether a p-adic unit is an N-th power, decided mod p^(2 v_p(N) + 1)."""
    k = 2 * vp(N, p) + 1
    mod = p**k
    u %= mod
    if p != 2:
        phi = p ** (k - 1) * (p - 1)
        return pow(u, phi // math.gcd(N, phi), mod) == 1
    # (Z/2^k)^x is not cyclic; k is small for any sane N
    target = vp(N, p)
    for w in range(1, mod, 2):
        if pow(w, N, mod) == u:
            # Hensel: v(w^N - u) >= k > 2 v(N w^(N-1)) = 2 v(N)
            assert k > 2 * target
            return True
    return False


def in_subgroup(x: PadicNumber, g: SubgroupSpec) -> bool:
    p = x.prime
    if g.kind == "U_en":
        if x.is_zero or x.valuation != 0:
            return False
        n = g.M
        u = x.unit_mod(n)
        return any((u * pow(z, -1, p**n)) % p**n == 1 % p**n for z in roots_of_unity(g.N, p, n))
    if x.is_zero:
        return True
    if g.kind == "Q_NM":
        return x.valuation % g.N == 0 and x.unit_mod(g.M) == 1 % p**g.M
    if g.kind == "D_MR":
        return x.valuation >= 0 and x.unit_mod(g.M) == 1 % p**g.M
    # P_N
    if x.valuation % g.N != 0:
        return False
    k = 2 * vp(g.N, p) + 1
    return _is_nth_power_unit(x.unit_mod(k), g.N, p)


# --------------------------------------------------------------------------
# Hensel roots


def nth_root(x: PadicNumber, e: int) -> PadicNumber:
    """The unique y in Q_{1, v_p(e)+1} with y**e == x, for x in Q_{e, 2 v_p(e)+1}.

    The unit part is found by Newton iteration started at 1; the result carries
    ``precision(x) - v_p(e)`` unit digits (all digits for exact perfect powers).
    """
    if e <= 0:
        raise ValueError("e must be positive")
    p = x.prime
    ve = int(vp(e, p))
    need = 2 * ve + 1
    if x.is_zero:
        return x
    if not x.is_exact and x.precision < need:
        raise InsufficientPrecision(f"root extraction needs {need} digits")
    if not in_subgroup(x, SubgroupSpec.Q(e, need)):
        raise NotInDomain(f"{x!r} is not in Q_{{{e},{need}}}")
    if x.is_exact:
        exact = _exact_root(x.exact, e, p, ve)
        if exact is not None:
            return PadicNumber.from_rational(exact, p, x.precision)
    K = x.precision
    out_prec = K - ve
    u = x.unit_mod(K)
    mod_in = p**K
    mod_out = p**out_prec
    cofactor = e // p**ve
    w = 1
    for _ in range(4 * K.bit_length() + 8):
        num = (pow(w, e, mod_in) - u) % mod_in
        step = (num // p**ve) * pow(cofactor * pow(w, e - 1, mod_out), -1, mod_out)
        w_next = (w - step) % mod_out
        if w_next == w:
            break
        w = w_next
    if (pow(w, e, mod_in) - u) % mod_in != 0 or w % p**(ve + 1) != 1 % p**(ve + 1):
        raise InsufficientPrecision("Newton iteration did not converge")
    return PadicNumber.from_parts(x.valuation // e, w, out_prec, p)


def _exact_root(q: Fraction, e: int, p: int, ve: int) -> Fraction | None:
    """Rational e-th root lying in Q_{1, v_p(e)+1}, if one exists."""
    if q < 0 and e % 2 == 0:
        return None
    num = _int_root(abs(q.numerator), e)
    den = _int_root(q.denominator, e)
    if num is None or den is None:
        return None
    base = Fraction(num, den) if q > 0 else Fraction(-num, den)
    candidates = (base, -base) if e % 2 == 0 else (base,)
    for cand in candidates:
        if _unit_of(cand, p, ve + 1) == 1 % p ** (ve + 1):
            return cand
    return None


def _int_root(n: int, e: int) -> int | None:
    if n < 0:
        return None
    r = round(n ** (1.0 / e)) if n < 2**1000 else _int_root_newton(n, e)
    for c in (r - 1, r, r + 1):
        if c >= 0 and c**e == n:
            return c
    r = _int_root_newton(n, e)
    return r if r**e == n else None


def _int_root_newton(n: int, e: int) -> int:
    if n < 2:
        return n
    x = 1 << ((n.bit_length() + e - 1) // e)
    while True:
        y = ((e - 1) * x + n // x ** (e - 1)) // e
        if y >= x:
            return x
        x = y
