"""Elements of completed algebras known modulo pi^N.

A :class:`TruncatedAlgebra` is a finite product of factors, each a
polynomial quotient R[v]/J standing for the restricted power series
algebra R<v>/J; at level N it is (R/pi^N)[v]/J.  A
:class:`PrecisionElement` stores one normal-form polynomial per factor
together with the precision it is asserted at.  Precision only ever goes
down under arithmetic (the min rule); it goes up only through
:func:`refine`, which re-evaluates an exact source expression.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import AlgebraMismatch, NoExactSource, NotAUnit
from .ring.base import BasePair
from .ring.ideal import IdealPresentation
from .ring.polynomial import MOD, OVER_R, PolyRing, Polynomial


@dataclass(frozen=True)
class Factor:
    """One direct factor R<v>/J given by variables and polynomial relations over R."""

    name: str
    variables: tuple
    relations: tuple = ()

    def ring(self, base: BasePair, regime=OVER_R) -> PolyRing:
        return PolyRing(base, self.variables, regime)


class TruncatedAlgebra:
    """B/pi^N for B a finite product of factors in standard form."""

    def __init__(self, base: BasePair, N: int, factors, name: str = "B"):
        if N < 0:
            raise ValueError("precision must be >= 0")
        self.base = base
        self.N = int(N)
        self.name = name
        facs = []
        for f in factors:
            ring = f.ring(base)
            rels = tuple(ring(r) if isinstance(r, str) else r.change_ring(ring) for r in f.relations)
            facs.append(Factor(f.name, tuple(f.variables), rels))
        self.factors = tuple(facs)
        self._levels: dict = {}

    @property
    def component_count(self) -> int:
        return len(self.factors)

    @property
    def tag(self):
        return (self.base, tuple((f.name, f.variables, f.relations) for f in self.factors))

    def at(self, N: int) -> TruncatedAlgebra:
        """The same algebra truncated at another level."""
        out = TruncatedAlgebra(self.base, N, self.factors, self.name)
        out._levels = self._levels
        return out

    def factor_index(self, name: str) -> int:
        for i, f in enumerate(self.factors):
            if f.name == name:
                return i
        raise KeyError(name)

    # per-level presentations -------------------------------------------

    def level_ideal(self, i: int, n: int) -> IdealPresentation:
        key = (i, n)
        ideal = self._levels.get(key)
        if ideal is None:
            f = self.factors[i]
            ring = f.ring(self.base, MOD(n))
            ideal = IdealPresentation(ring, [r.change_ring(ring) for r in f.relations])
            self._levels[key] = ideal
        return ideal

    def exact_ideal(self, i: int) -> IdealPresentation:
        key = (i, "R")
        ideal = self._levels.get(key)
        if ideal is None:
            f = self.factors[i]
            ideal = IdealPresentation(f.ring(self.base), f.relations)
            self._levels[key] = ideal
        return ideal

    def presentation(self, n: int | None = None):
        """Per-factor ideals at level n (default: this algebra's N)."""
        n = self.N if n is None else n
        return [self.level_ideal(i, n) for i in range(len(self.factors))]

    # element construction ------------------------------------------------

    def reduce(self, values, n: int) -> tuple:
        out = []
        for i, v in enumerate(values):
            ideal = self.level_ideal(i, n)
            if isinstance(v, str):
                v = _exact_parse(self, i, v)
            out.append(ideal.normal_form(_to_level(v, ideal.ring)))
        return tuple(out)

    def element(self, values, precision: int | None = None, source=None, exact: bool = True):
        """Element from one value per factor (strings, polynomials or constants).

        With ``exact=True`` the inputs are recorded as an exact source so the
        element can later be refined.
        """
        if not isinstance(values, (list, tuple)):
            values = [values] * len(self.factors)
        if len(values) != len(self.factors):
            raise ValueError(f"expected {len(self.factors)} factor values, got {len(values)}")
        n = self.N if precision is None else precision
        if source is None and exact:
            source = Leaf(tuple(_exact_value(self, i, v) for i, v in enumerate(values)))
        return PrecisionElement(self, self.reduce(values, n), n, source)

    def one(self, precision: int | None = None):
        return self.element([1] * len(self.factors), precision)

    def zero(self, precision: int | None = None):
        return self.element([0] * len(self.factors), precision)

    def __str__(self):
        parts = []
        for f in self.factors:
            rels = ", ".join(str(r) for r in f.relations)
            parts.append(f"factor {f.name}: vars {', '.join(f.variables)}; rels {rels};")
        return f"algebra {self.name} over {self.base.name} prec {self.N} {{ {' '.join(parts)} }}"


def _to_level(v, ring: PolyRing) -> Polynomial:
    if isinstance(v, Polynomial):
        return Polynomial(ring, v.terms)
    return ring.const(v)


def _exact_parse(alg: TruncatedAlgebra, i: int, text: str) -> Polynomial:
    return alg.factors[i].ring(alg.base)(text)


def _exact_value(alg: TruncatedAlgebra, i: int, v) -> Polynomial:
    ring = alg.factors[i].ring(alg.base)
    if isinstance(v, str):
        return ring(v)
    if isinstance(v, Polynomial):
        if v.ring.regime.kind == "mod":
            return Polynomial(ring, v.terms)
        return v.change_ring(ring)
    return ring.const(v)


# exact expression trees ------------------------------------------------------

@dataclass(frozen=True)
class Leaf:
    values: tuple


@dataclass(frozen=True)
class Node:
    op: str
    args: tuple = field(default_factory=tuple)


def evaluate(alg: TruncatedAlgebra, expr, n: int) -> tuple:
    if isinstance(expr, Leaf):
        return alg.reduce(expr.values, n)
    vals = [evaluate(alg, a, n) for a in expr.args]
    if expr.op == "add":
        return alg.reduce([x + y for x, y in zip(*vals)], n)
    if expr.op == "mul":
        return alg.reduce([x * y for x, y in zip(*vals)], n)
    if expr.op == "neg":
        return tuple(-x for x in vals[0])
    if expr.op == "inv":
        return _invert_values(alg, vals[0], n)
    raise ValueError(f"unknown node {expr.op}")


# the element type --------------------------------------------------------------

class PrecisionElement:
    __slots__ = ("algebra", "value", "precision", "source")

    def __init__(self, algebra: TruncatedAlgebra, value: tuple, precision: int, source=None):
        self.algebra = algebra
        self.value = tuple(value)
        self.precision = int(precision)
        self.source = source

    def _check(self, other: PrecisionElement):
        if not isinstance(other, PrecisionElement) or other.algebra.tag != self.algebra.tag:
            raise AlgebraMismatch("elements belong to different truncated algebras")

    def __add__(self, other):
        return prec_add(self, other)

    def __mul__(self, other):
        return prec_mul(self, other)

    def __neg__(self):
        src = Node("neg", (self.source,)) if self.source is not None else None
        return PrecisionElement(self.algebra, tuple(-v for v in self.value), self.precision, src)

    def __sub__(self, other):
        return prec_add(self, -other)

    def is_zero(self) -> bool:
        return all(not v for v in self.value)

    def reduce_to(self, n: int) -> PrecisionElement:
        """Forget precision down to ``n`` (no-op when n >= precision)."""
        if n >= self.precision:
            return self
        return PrecisionElement(self.algebra, self.algebra.reduce(self.value, n), n, self.source)

    def equal_at(self, other: PrecisionElement, M: int) -> bool:
        self._check(other)
        if M > self.precision or M > other.precision:
            raise ValueError(f"cannot compare at precision {M}: elements known to "
                             f"{self.precision} and {other.precision}")
        return (self - other).reduce_to(M).is_zero()

    def __eq__(self, other):
        if not isinstance(other, PrecisionElement):
            return NotImplemented
        return (self.algebra.tag == other.algebra.tag and self.precision == other.precision
                and self.value == other.value)

    def __hash__(self):
        return hash((self.precision, self.value))

    def __str__(self):
        base = self.algebra.base
        vals = " | ".join(str(v) for v in self.value) if self.value else "0"
        return f"({vals}) mod {base.pi_name}^{self.precision}"

    __repr__ = __str__


def prec_add(a: PrecisionElement, b: PrecisionElement) -> PrecisionElement:
    a._check(b)
    n = min(a.precision, b.precision)
    a, b = a.reduce_to(n), b.reduce_to(n)
    vals = a.algebra.reduce([x + y for x, y in zip(a.value, b.value)], n)
    src = Node("add", (a.source, b.source)) if a.source is not None and b.source is not None else None
    return PrecisionElement(a.algebra, vals, n, src)


def prec_mul(a: PrecisionElement, b: PrecisionElement) -> PrecisionElement:
    """Product at the smaller precision; valuation gain is not exploited."""
    a._check(b)
    n = min(a.precision, b.precision)
    a, b = a.reduce_to(n), b.reduce_to(n)
    vals = a.algebra.reduce([x * y for x, y in zip(a.value, b.value)], n)
    src = Node("mul", (a.source, b.source)) if a.source is not None and b.source is not None else None
    return PrecisionElement(a.algebra, vals, n, src)


def _residue_inverse(alg: TruncatedAlgebra, i: int, a: Polynomial) -> Polynomial:
    """Inverse of ``a`` modulo pi in factor i, by elimination of s in s*a - 1."""
    f = alg.factors[i]
    ring1 = f.ring(alg.base, MOD(1))
    s = "_s"
    big = PolyRing(alg.base, (s,) + f.variables, MOD(1))
    gens = [r.change_ring(big) for r in alg.level_ideal(i, 1).generators]
    gens.append(big.var(s) * _lift(a, big) - 1)
    ideal = IdealPresentation(big, gens, "elim:1")
    if ideal.is_unit_ideal():
        return ring1.zero
    r = ideal.normal_form(big.var(s))
    if r.degree(s) > 0:
        raise NotAUnit(f"{a} is not invertible modulo {alg.base.pi_name} in factor {f.name}")
    return Polynomial(ring1, {m[1:]: c for m, c in r.items()})


def _lift(a: Polynomial, big: PolyRing) -> Polynomial:
    return Polynomial(big, {(0,) + m: c for m, c in a.items()})


def _invert_values(alg: TruncatedAlgebra, value: tuple, n: int) -> tuple:
    out = []
    for i, a in enumerate(value):
        b = _residue_inverse(alg, i, a)
        k = 1
        ring_n = alg.level_ideal(i, n).ring
        a_n = Polynomial(ring_n, a.terms)
        b = Polynomial(ring_n, b.terms)
        ideal = alg.level_ideal(i, n)
        while k < n:
            k = min(2 * k, n)
            b = ideal.normal_form(b * (2 - a_n * b))
        out.append(ideal.normal_form(b))
    return tuple(out)


def prec_invert(a: PrecisionElement) -> PrecisionElement:
    """Newton-Hensel inverse at the precision of ``a``."""
    vals = _invert_values(a.algebra, a.value, a.precision)
    src = Node("inv", (a.source,)) if a.source is not None else None
    return PrecisionElement(a.algebra, vals, a.precision, src)


def refine(a: PrecisionElement, new_precision: int, lift_source=None) -> PrecisionElement:
    """Recompute ``a`` at a higher precision from an exact source."""
    src = a.source if lift_source is None else lift_source
    if src is None:
        raise NoExactSource("element was built from approximate data and has no exact source")
    if isinstance(src, (str, Polynomial)) or (isinstance(src, (list, tuple)) and not isinstance(src, Leaf)):
        vals = src if isinstance(src, (list, tuple)) else [src] * len(a.algebra.factors)
        src = Leaf(tuple(_exact_value(a.algebra, i, v) for i, v in enumerate(vals)))
    if new_precision <= a.precision:
        raise ValueError("refine needs a strictly larger precision")
    alg = a.algebra if a.algebra.N >= new_precision else a.algebra.at(new_precision)
    out = PrecisionElement(alg, evaluate(alg, src, new_precision), new_precision, src)
    if not out.reduce_to(a.precision).value == a.value:
        raise ValueError("lift source does not agree with the element at its precision")
    return out
