"""Exact multivariate polynomials over R, R[1/pi] or R/pi^N."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from ..errors import NotIntegral, RegimeMismatch
from .base import INF, BasePair
from .orders import monomial_key


@dataclass(frozen=True)
class Regime:
    """Coefficient regime: ``R``, ``K`` (= R[1/pi]) or ``mod`` (= R/pi^N)."""

    kind: str
    N: int | None = None

    def __post_init__(self):
        if self.kind not in ("R", "K", "mod"):
            raise ValueError(f"unknown regime {self.kind!r}")
        if self.kind == "mod" and (self.N is None or self.N < 0):
            raise ValueError("mod regime needs N >= 0")

    @property
    def is_field(self) -> bool:
        return self.kind == "K"

    def __str__(self):
        return {"R": "over_R", "K": "over_R_inv_pi"}.get(self.kind, f"over_R_mod_piN({self.N})")


OVER_R = Regime("R")
OVER_K = Regime("K")


def MOD(N: int) -> Regime:
    return Regime("mod", N)


@dataclass(frozen=True)
class PolyRing:
    """Polynomial ring in named variables over a coefficient regime."""

    base: BasePair
    variables: tuple[str, ...]
    regime: Regime = OVER_K

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        if len(set(self.variables)) != len(self.variables):
            raise ValueError(f"duplicate variable names in {self.variables}")
        if self.base.pi_name in self.variables and self.base.profile == "geometric":
            raise ValueError("'t' is reserved for the uniformizer in the geometric profile")

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def with_regime(self, regime: Regime) -> PolyRing:
        return PolyRing(self.base, self.variables, regime)

    def with_variables(self, variables) -> PolyRing:
        return PolyRing(self.base, tuple(variables), self.regime)

    # constructors --------------------------------------------------------

    def __call__(self, value) -> Polynomial:
        if isinstance(value, Polynomial):
            return value.change_ring(self)
        if isinstance(value, str):
            from .parse import parse_polynomial

            return parse_polynomial(value, self)
        return self.const(value)

    def const(self, c) -> Polynomial:
        c = self.base.coerce(c)
        return Polynomial(self, {(0,) * self.nvars: c} if c else {})

    @cached_property
    def zero(self) -> Polynomial:
        return Polynomial(self, {})

    @cached_property
    def one(self) -> Polynomial:
        return self.const(1)

    def var(self, name: str) -> Polynomial:
        i = self.variables.index(name)
        e = [0] * self.nvars
        e[i] = 1
        return Polynomial(self, {tuple(e): self.base.one})

    def gens(self) -> tuple[Polynomial, ...]:
        return tuple(self.var(v) for v in self.variables)

    def monomial(self, exps, coeff=1) -> Polynomial:
        return Polynomial(self, {tuple(exps): self.base.coerce(coeff)})

    def canonical_coeff(self, c):
        """Bring a coefficient into canonical form for this regime."""
        base = self.base
        if self.regime.kind == "K":
            return c
        if self.regime.kind == "R":
            if c and base.valuation(c) < 0:
                raise NotIntegral(f"coefficient {base.format_coeff(c)} is not in R")
            return c
        return base.residue(c, self.regime.N)

    def __str__(self):
        return f"{self.base.name}[{','.join(self.variables)}] {self.regime}"


class Polynomial:
    """Immutable sparse polynomial; terms map exponent tuples to coefficients."""

    __slots__ = ("ring", "_terms", "_hash")

    def __init__(self, ring: PolyRing, terms: dict, *, _trusted: bool = False):
        self.ring = ring
        if _trusted:
            self._terms = terms
        else:
            n = ring.nvars
            clean = {}
            for m, c in terms.items():
                m = tuple(m)
                if len(m) != n:
                    raise ValueError(f"exponent {m} does not match {n} variables")
                c = ring.canonical_coeff(ring.base.coerce(c))
                if c:
                    clean[m] = c
            self._terms = clean
        self._hash = None

    # basic protocol ------------------------------------------------------

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ring == other.ring and self._terms == other._terms
        try:
            return self == self.ring.const(other)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self._terms.items())))
        return self._hash

    def _coerce_other(self, other) -> Polynomial:
        if isinstance(other, Polynomial):
            if other.ring != self.ring:
                raise RegimeMismatch(f"cannot combine {self.ring} with {other.ring}")
            return other
        return self.ring.const(other)

    # arithmetic ----------------------------------------------------------

    def __add__(self, other):
        other = self._coerce_other(other)
        t = dict(self._terms)
        for m, c in other._terms.items():
            t[m] = t.get(m, 0) + c
        return Polynomial(self.ring, t)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.ring, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce_other(other))

    def __rsub__(self, other):
        return self._coerce_other(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            c = self.ring.base.coerce(other)
            return Polynomial(self.ring, {m: a * c for m, a in self._terms.items()})
        other = self._coerce_other(other)
        t: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                t[m] = t.get(m, 0) + c1 * c2
        return Polynomial(self.ring, t)

    __rmul__ = __mul__

    def __truediv__(self, other):
        """Division by a nonzero constant (must stay in the regime)."""
        c = self.ring.base.coerce(other)
        if not c:
            raise ZeroDivisionError("division by zero")
        if self.ring.regime.kind != "K" and self.ring.base.valuation(c) != 0:
            raise NotIntegral("division by a non-unit outside R[1/pi]")
        return Polynomial(self.ring, {m: a / c for m, a in self._terms.items()})

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        result = self.ring.one
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # inspection ----------------------------------------------------------

    def coefficient(self, exps):
        return self._terms.get(tuple(exps), self.ring.base.zero)

    def constant_coefficient(self):
        return self.coefficient((0,) * self.ring.nvars)

    def total_degree(self) -> int:
        return max((sum(m) for m in self._terms), default=-1)

    def degree(self, var: str) -> int:
        i = self.ring.variables.index(var)
        return max((m[i] for m in self._terms), default=-1)

    def is_constant(self) -> bool:
        return all(not any(m) for m in self._terms)

    def sorted_terms(self, order: str = "deglex"):
        key = monomial_key(order)
        return sorted(self._terms.items(), key=lambda t: key(t[0]), reverse=True)

    def leading_term(self, order: str = "deglex"):
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        key = monomial_key(order)
        m = max(self._terms, key=key)
        return m, self._terms[m]

    def variables_used(self) -> tuple[str, ...]:
        used = set()
        for m in self._terms:
            used.update(i for i, e in enumerate(m) if e)
        return tuple(v for i, v in enumerate(self.ring.variables) if i in used)

    def valuation(self):
        """Gauss valuation: min over coefficients; ``INF`` for zero."""
        v = self.ring.base.valuation
        return min((v(c) for c in self._terms.values()), default=INF)

    # ring changes ----------------------------------------------------------

    def change_ring(self, ring: PolyRing) -> Polynomial:
        """Reinterpret in ``ring`` (same variable names, possibly a different
        regime or a superset/permutation of variables)."""
        if ring == self.ring:
            return self
        if ring.base != self.ring.base:
            raise RegimeMismatch("different base pairs")
        idx = []
        for v in self.ring.variables:
            if v in ring.variables:
                idx.append(ring.variables.index(v))
            else:
                idx.append(None)
        t = {}
        for m, c in self._terms.items():
            e = [0] * ring.nvars
            for i, k in enumerate(m):
                if k:
                    if idx[i] is None:
                        raise RegimeMismatch(f"variable {self.ring.variables[i]} not in {ring.variables}")
                    e[idx[i]] = k
            t[tuple(e)] = c
        return Polynomial(ring, t)

    def substitute(self, values: dict, target: PolyRing | None = None) -> Polynomial:
        """Substitute polynomials (in ``target``) for variables."""
        if target is None:
            target = next(iter(values.values())).ring if values else self.ring
        imgs = []
        for v in self.ring.variables:
            if v in values:
                val = values[v]
                imgs.append(val if isinstance(val, Polynomial) else target.const(val))
            else:
                imgs.append(target.var(v))
        cache: dict = {}

        def power(i, k):
            key = (i, k)
            if key not in cache:
                cache[key] = imgs[i] ** k
            return cache[key]

        acc = dict()
        for m, c in self._terms.items():
            term = target.const(c)
            for i, k in enumerate(m):
                if k:
                    term = term * power(i, k)
            for mm, cc in term._terms.items():
                acc[mm] = acc.get(mm, 0) + cc
        return Polynomial(target, acc)

    def map_coefficients(self, fn, ring: PolyRing | None = None) -> Polynomial:
        ring = ring or self.ring
        return Polynomial(ring, {m: fn(c) for m, c in self._terms.items()})

    # display -------------------------------------------------------------

    def __str__(self):
        return format_polynomial(self)

    def __repr__(self):
        return f"Polynomial({format_polynomial(self)!r})"


def format_monomial(variables, m) -> str:
    parts = []
    for v, e in zip(variables, m):
        if e == 1:
            parts.append(v)
        elif e > 1:
            parts.append(f"{v}^{e}")
    return "*".join(parts)


def format_polynomial(f: Polynomial, order: str = "deglex") -> str:
    if not f._terms:
        return "0"
    base = f.ring.base
    out = []
    for m, c in f.sorted_terms(order):
        mono = format_monomial(f.ring.variables, m)
        simple = base.is_simple_coeff(c)
        if simple:
            neg = c < 0 if base.profile == "arithmetic" else c.numer.LC < 0
            a = -c if neg else c
            cs = base.format_coeff(a)
        else:
            neg = False
            cs = f"({base.format_coeff(c)})"
        if mono:
            body = mono if cs == "1" else f"{cs}*{mono}"
        else:
            body = cs
        if not out:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)
