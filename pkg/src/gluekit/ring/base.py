"""Base pairs (R, pi) and exact coefficient arithmetic.

Two profiles are supported:

* arithmetic: R = Z localized at a prime p, pi = p.  Coefficients are
  ``gmpy2.mpq`` rationals; an element of R is a rational whose reduced
  denominator is prime to p.
* geometric: R = Q[t] localized at (t), pi = t.  Coefficients are elements
  of the rational function field Q(t).

All ring-level algorithms only talk to coefficients through the methods of
:class:`BasePair`, so they work unchanged in both profiles.
"""

from __future__ import annotations

import math
import re
from functools import cached_property

import gmpy2
from gmpy2 import mpq, mpz
from sympy import QQ
from sympy.polys.fields import field as _frac_field

#: Valuation of zero.
INF = math.inf

ARITHMETIC = "arithmetic"
GEOMETRIC = "geometric"

_QT_FIELD, _QT_T = _frac_field("t", QQ)


class BasePair:
    """The ambient pair (R, pi).

    Use :meth:`arithmetic` or :meth:`geometric` (or :meth:`parse`) rather
    than the constructor.
    """

    __slots__ = ("profile", "prime", "pi_name", "description", "__dict__")

    def __init__(self, profile: str, prime: int | None, pi_name: str, description: str):
        if profile == ARITHMETIC:
            if prime is None or prime < 2 or not gmpy2.is_prime(prime):
                raise ValueError(f"arithmetic profile needs a prime, got {prime!r}")
        elif profile != GEOMETRIC:
            raise ValueError(f"unknown profile {profile!r}")
        self.profile = profile
        self.prime = prime
        self.pi_name = pi_name
        self.description = description

    @classmethod
    def arithmetic(cls, p: int) -> BasePair:
        return cls(ARITHMETIC, int(p), "p", f"Z localized at ({p})")

    @classmethod
    def geometric(cls) -> BasePair:
        return cls(GEOMETRIC, None, "t", "Q[t] localized at (t)")

    @classmethod
    def parse(cls, text: str) -> BasePair:
        """Parse ``Zp(5)`` / ``Z(5)`` / ``Qt`` style base names."""
        s = text.strip()
        m = re.fullmatch(r"Z(?:p|_\(p\))?\(\s*(\d+)\s*\)", s)
        if m:
            return cls.arithmetic(int(m.group(1)))
        if s in ("Qt", "Q[t]", "Q(t)"):
            return cls.geometric()
        raise ValueError(f"unrecognized base {text!r} (expected Zp(p) or Qt)")

    # identity ------------------------------------------------------------

    @property
    def name(self) -> str:
        return f"Zp({self.prime})" if self.profile == ARITHMETIC else "Qt"

    def __eq__(self, other):
        return (
            isinstance(other, BasePair)
            and self.profile == other.profile
            and self.prime == other.prime
        )

    def __hash__(self):
        return hash((self.profile, self.prime))

    def __repr__(self):
        return f"BasePair({self.name})"

    # coefficients --------------------------------------------------------

    @cached_property
    def zero(self):
        return self.coerce(0)

    @cached_property
    def one(self):
        return self.coerce(1)

    @cached_property
    def pi(self):
        if self.profile == ARITHMETIC:
            return mpq(self.prime)
        return _QT_T

    def pi_power(self, k: int):
        """pi**k for any integer k."""
        if self.profile == ARITHMETIC:
            return mpq(self.prime) ** k
        return _QT_T**k

    def coerce(self, value):
        """Convert an int, rational or coefficient into this base's type."""
        if self.profile == ARITHMETIC:
            if isinstance(value, str):
                return mpq(value)
            if hasattr(value, "numerator") and not isinstance(value, (int, type(mpz(0)))):
                return mpq(int(value.numerator), int(value.denominator))
            return mpq(value)
        if isinstance(value, type(_QT_T)):
            return value
        if isinstance(value, str):
            value = mpq(value)
        if hasattr(value, "numerator") and not isinstance(value, (int, type(mpz(0)))):
            return _QT_FIELD(QQ(int(value.numerator), int(value.denominator)))
        return _QT_FIELD(int(value))

    def valuation(self, c):
        """pi-adic valuation of a coefficient; ``INF`` for zero."""
        if not c:
            return INF
        if self.profile == ARITHMETIC:
            p = self.prime
            num, den = c.numerator, c.denominator
            v = 0
            if num % p == 0:
                v = gmpy2.remove(num, p)[1]
            if den % p == 0:
                v -= gmpy2.remove(den, p)[1]
            return int(v)
        return _tv(c.numer) - _tv(c.denom)

    def is_integral(self, c) -> bool:
        return self.valuation(c) >= 0

    def is_unit(self, c) -> bool:
        return self.valuation(c) == 0

    def unit_part(self, c):
        """c / pi**v(c) for nonzero c."""
        return c / self.pi_power(self.valuation(c))

    def residue(self, c, k: int):
        """Canonical representative of an integral ``c`` modulo pi**k.

        Arithmetic profile: the integer in ``[0, p**k)``.  Geometric profile:
        the polynomial in t of degree < k.  Congruent inputs give identical
        outputs.
        """
        if k <= 0 or not c:
            return self.zero
        if self.profile == ARITHMETIC:
            m = mpz(self.prime) ** k
            den = mpz(c.denominator)
            if den % self.prime == 0:
                raise ValueError(f"{c} is not integral at {self.prime}")
            return mpq((mpz(c.numerator) * gmpy2.invert(den, m)) % m)
        return _qt_residue(c, k)

    def is_zero_mod(self, c, k: int) -> bool:
        return self.valuation(c) >= k

    # display -------------------------------------------------------------

    def format_coeff(self, c) -> str:
        if self.profile == ARITHMETIC:
            return str(c)
        return str(c.as_expr())

    def is_simple_coeff(self, c) -> bool:
        """True when ``format_coeff`` yields a bare rational (no parentheses needed)."""
        if self.profile == ARITHMETIC:
            return True
        return c.denom == 1 and c.numer.is_ground


def _tv(poly) -> int:
    """t-adic valuation of a nonzero polynomial in Q[t]."""
    return min(m[0] for m, _ in poly.terms())


def _qt_residue(c, k: int):
    dv = _tv(c.denom)
    num = _series(c.numer, k + dv)
    den = _series(c.denom, k + dv)
    if any(num[:dv]):
        raise ValueError(f"{c} is not integral at t")
    num, den = num[dv:], den[dv:]
    out = [mpq(0)] * k
    inv0 = 1 / den[0]
    for i in range(k):
        s = num[i] - sum(out[j] * den[i - j] for j in range(i))
        out[i] = s * inv0
    acc = _QT_FIELD(0)
    for i, a in enumerate(out):
        if a:
            acc += _QT_FIELD(QQ(int(a.numerator), int(a.denominator))) * _QT_T**i
    return acc


def _series(poly, k: int) -> list:
    out = [mpq(0)] * max(k, 1)
    for (e,), a in poly.terms():
        if e < len(out):
            out[e] = mpq(int(a.numerator), int(a.denominator))
    return out
