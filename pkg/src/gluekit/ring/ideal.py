"""Ideals with cached Groebner data, quotient algebras and elimination helpers."""

from __future__ import annotations

import threading

from ..errors import RegimeMismatch
from .base import INF
from .groebner import GBContext, buchberger, make_reducer
from .orders import SUPPORTED_ORDERS, monomial_key
from .polynomial import OVER_K, OVER_R, PolyRing, Polynomial, Regime


def _context(ring: PolyRing, order: str) -> GBContext:
    return GBContext(ring.base, ring.regime.is_field, monomial_key(order))


def _raw_generators(ring: PolyRing, gens) -> list[dict]:
    raw = [dict(g.items()) for g in gens if g]
    if ring.regime.kind == "mod":
        raw.append({(0,) * ring.nvars: ring.base.pi_power(ring.regime.N)})
    return raw


class IdealPresentation:
    """An ideal of a polynomial ring given by generators.

    The reduced Groebner basis for each monomial order is computed at most
    once.  Over R the basis is a strong Groebner basis; over R/pi^N it is
    the strong basis over R of the generators together with pi^N.
    """

    def __init__(self, ring: PolyRing, generators=(), order: str = "deglex"):
        if order not in SUPPORTED_ORDERS and not order.startswith("elim:"):
            raise ValueError(f"unsupported monomial order {order!r}")
        self.ring = ring
        gens = []
        for g in generators:
            g = ring(g) if not isinstance(g, Polynomial) else g
            if g.ring != ring:
                raise RegimeMismatch(f"generator {g} lives in {g.ring}, not {ring}")
            gens.append(g)
        self.generators = tuple(gens)
        self.order = order
        self._gb: dict[str, list[dict]] = {}
        self._reducers: dict = {}
        self._lock = threading.Lock()

    # Groebner data -------------------------------------------------------

    def raw_basis(self, order: str | None = None) -> list[dict]:
        order = order or self.order
        gb = self._gb.get(order)
        if gb is None:
            ctx = _context(self.ring, order)
            gb = buchberger(_raw_generators(self.ring, self.generators), ctx)
            with self._lock:
                gb = self._gb.setdefault(order, gb)
        return gb

    def basis(self, order: str | None = None) -> list[Polynomial]:
        """Reduced Groebner basis as polynomials (pi^N itself is dropped in
        the truncated regime since it is zero there)."""
        out = (Polynomial(self.ring, g) for g in self.raw_basis(order))
        return [p for p in out if p]

    def reducer(self, order: str | None = None):
        order = order or self.order
        red = self._reducers.get(order)
        if red is None:
            red = make_reducer(self.raw_basis(order), _context(self.ring, order))
            self._reducers[order] = red
        return red

    def normal_form(self, f: Polynomial, order: str | None = None) -> Polynomial:
        if f.ring != self.ring:
            raise RegimeMismatch(f"{f} lives in {f.ring}, ideal in {self.ring}")
        if not f:
            return f
        r = self.reducer(order)(dict(f.items()))
        return Polynomial(self.ring, r, _trusted=self.ring.regime.kind != "mod") if r else self.ring.zero

    def contains(self, f: Polynomial) -> bool:
        return not self.normal_form(f)

    def is_unit_ideal(self) -> bool:
        return self.contains(self.ring.one)

    def is_zero_ideal(self) -> bool:
        return all(not g for g in self.basis())

    def contains_ideal(self, other: IdealPresentation) -> bool:
        return all(self.contains(g) for g in other.generators)

    def same_ideal(self, other: IdealPresentation) -> bool:
        return self.contains_ideal(other) and other.contains_ideal(self)

    # constructors ------------------------------------------------------------

    def with_generators(self, extra) -> IdealPresentation:
        return IdealPresentation(self.ring, list(self.generators) + list(extra), self.order)

    def change_ring(self, ring: PolyRing) -> IdealPresentation:
        return IdealPresentation(ring, [g.change_ring(ring) for g in self.generators], self.order)

    def __str__(self):
        gens = ", ".join(str(g) for g in self.generators)
        return f"({gens})"

    def __repr__(self):
        return f"IdealPresentation({self.ring}, {self})"


# public operations -----------------------------------------------------------

def groebner_basis(ideal: IdealPresentation, order: str = "deglex") -> IdealPresentation:
    """The same ideal presented by its reduced Groebner basis (cached)."""
    out = IdealPresentation(ideal.ring, ideal.basis(order), order)
    out._gb[order] = ideal.raw_basis(order)
    return out


def normal_form(f: Polynomial, ideal: IdealPresentation) -> Polynomial:
    return ideal.normal_form(f)


def ideal_membership(f: Polynomial, ideal: IdealPresentation) -> bool:
    return ideal.contains(f)


def gauss_valuation(f: Polynomial):
    """Minimum pi-adic valuation of the coefficients; ``INF`` for 0."""
    return f.valuation()


def pi_saturation(ideal: IdealPresentation) -> IdealPresentation:
    """(I : pi^infinity) for an ideal over R."""
    ring = ideal.ring
    if ring.regime.kind != "R":
        raise RegimeMismatch("pi-saturation needs an ideal over R")
    s = _fresh_name("s", ring.variables)
    big = PolyRing(ring.base, (s,) + ring.variables, OVER_R)
    gens = [g.change_ring(big) for g in ideal.generators]
    gens.append(big.var(s) * ring.base.pi - 1)
    kept = eliminate(gens, [s], ring)
    return IdealPresentation(ring, kept, ideal.order)


def _fresh_name(stem: str, taken) -> str:
    name, k = stem, 0
    while name in taken:
        k += 1
        name = f"{stem}{k}"
    return name


def fresh_names(stem: str, count: int, taken) -> list[str]:
    out, taken = [], set(taken)
    k = 0
    while len(out) < count:
        name = f"{stem}{k}"
        if name not in taken:
            out.append(name)
            taken.add(name)
        k += 1
    return out


def eliminate(gens, elim_vars, target: PolyRing) -> list[Polynomial]:
    """Generators of (gens) intersected with the polynomial ring ``target``.

    ``gens`` live in a ring containing ``elim_vars`` and the variables of
    ``target``; coefficients follow the regime of ``target`` (over R this
    is elimination with strong Groebner bases).
    """
    elim_vars = list(elim_vars)
    rest = [v for v in target.variables]
    big = PolyRing(target.base, tuple(elim_vars) + tuple(rest), target.regime)
    raw = _raw_generators(big, [g.change_ring(big) for g in gens])
    ctx = _context(big, f"elim:{len(elim_vars)}")
    gb = buchberger(raw, ctx)
    k = len(elim_vars)
    out = []
    for g in gb:
        if all(not any(m[:k]) for m in g):
            p = Polynomial(target, {m[k:]: c for m, c in g.items()})
            if p:
                out.append(p)
    return out


def intersect(I: IdealPresentation, J: IdealPresentation) -> IdealPresentation:
    ring = I.ring
    w = _fresh_name("w", ring.variables)
    big = PolyRing(ring.base, (w,) + ring.variables, ring.regime)
    wv = big.var(w)
    gens = [wv * g.change_ring(big) for g in I.generators]
    gens += [(1 - wv) * g.change_ring(big) for g in J.generators]
    return IdealPresentation(ring, eliminate(gens, [w], ring), I.order)


def colon_pi(I: IdealPresentation) -> IdealPresentation:
    """(I : pi) over R, through (I intersect (pi)) / pi."""
    ring = I.ring
    pi = ring.base.pi
    meet = intersect(I, IdealPresentation(ring, [ring.const(pi)]))
    return IdealPresentation(ring, [g * (1 / pi) for g in meet.generators], I.order)


def saturation_by_colon(I: IdealPresentation, cap: int = 64) -> tuple[IdealPresentation, int]:
    """Iterate ``I : pi`` until stable; returns the saturation and the number
    of steps needed (the exponent N0 with I : pi^N0 = I : pi^infinity)."""
    cur = I
    for steps in range(cap + 1):
        nxt = colon_pi(cur)
        if cur.contains_ideal(nxt):
            return cur, steps
        cur = nxt
    raise RuntimeError("colon iteration did not stabilize")


def map_kernel(images, source: PolyRing, target_ideal: IdealPresentation) -> list[Polynomial]:
    """Kernel of source -> target/J sending the i-th variable to images[i].

    The source ring must have the same regime as the target ideal.
    """
    tgt = target_ideal.ring
    clash = set(source.variables) & set(tgt.variables)
    if clash:
        raise ValueError(f"source and target share variables {sorted(clash)}")
    big = PolyRing(tgt.base, tgt.variables + source.variables, tgt.regime)
    gens = [g.change_ring(big) for g in target_ideal.generators]
    for v, img in zip(source.variables, images):
        gens.append(big.var(v) - img.change_ring(big))
    return eliminate(gens, tgt.variables, source)


class AffineAlgebra:
    """A quotient ring (coefficient regime)[vars] / relations."""

    def __init__(self, base, variables, relations=(), regime: Regime = OVER_R, order: str = "deglex",
                 name: str = ""):
        self.ring = PolyRing(base, tuple(variables), regime)
        if isinstance(relations, IdealPresentation):
            relations = relations.change_ring(self.ring).generators
        self.relations = IdealPresentation(self.ring, [self._coerce(r) for r in relations], order)
        self.name = name

    def _coerce(self, r):
        if isinstance(r, str):
            return self.ring(r)
        return r.change_ring(self.ring)

    @property
    def base(self):
        return self.ring.base

    @property
    def regime(self) -> Regime:
        return self.ring.regime

    @property
    def variables(self):
        return self.ring.variables

    def element(self, value) -> Polynomial:
        """Normal form of a polynomial, literal or constant."""
        if isinstance(value, Polynomial):
            value = value.change_ring(self.ring)
        else:
            value = self.ring(value)
        return self.relations.normal_form(value)

    def reduce(self, f: Polynomial) -> Polynomial:
        return self.relations.normal_form(f)

    def equal(self, f, g) -> bool:
        return self.is_zero(self.element(f) - self.element(g))

    def is_zero(self, f) -> bool:
        return not self.element(f)

    def is_zero_ring(self) -> bool:
        return self.relations.is_unit_ideal()

    def with_regime(self, regime: Regime) -> AffineAlgebra:
        rels = [_recoef(g, regime, self.ring) for g in self.relations.generators]
        return AffineAlgebra(self.base, self.variables, rels, regime, self.relations.order, self.name)

    def localize(self) -> AffineAlgebra:
        """The same presentation over R[1/pi]."""
        return self.with_regime(OVER_K)

    def truncate(self, N: int) -> AffineAlgebra:
        from .polynomial import MOD

        return self.with_regime(MOD(N))

    def __str__(self):
        rels = ", ".join(str(g) for g in self.relations.generators) or "0"
        return f"{self.base.name}[{', '.join(self.variables)}]/({rels}) {self.regime}"


def _recoef(g: Polynomial, regime: Regime, ring: PolyRing) -> Polynomial:
    """Move g into ``regime``; R[1/pi] polynomials are scaled to be integral
    when the target is R or R/pi^N."""
    target = ring.with_regime(regime)
    if regime.kind != "K" and g.ring.regime.kind == "K":
        v = g.valuation()
        if v < 0 and v != INF:
            g = g * ring.base.pi_power(-v)
    return Polynomial(target, g.terms)


def clear_denominators(g: Polynomial) -> Polynomial:
    """pi^k * g with the smallest k >= 0 making g integral (g over K)."""
    v = g.valuation()
    if v == INF or v >= 0:
        return g
    return g * g.ring.base.pi_power(-v)


def primitive(g: Polynomial) -> Polynomial:
    """pi^(-v(g)) * g: Gauss valuation exactly 0 (g != 0)."""
    v = g.valuation()
    if v == INF or v == 0:
        return g
    return g * g.ring.base.pi_power(-v)
