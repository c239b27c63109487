"""Affine gluing triples (A, B, j*) and the pullback ring D = A x_C B.

A is a finitely generated R[1/pi]-algebra, B a finite product of factors
R<v>/J in standard form and C = B[1/pi].  The pullback D consists of pairs
(a, b) with j*(a) = b in C.  Elements of C are handled exactly: j*(a) is a
polynomial with pi-power denominators, reduced by the monic integral
Groebner basis of J over K.  Such a normal form lies in B exactly when all
its coefficients are integral.

The construction follows four stages.  Generators of D are searched
degreewise in A (scaled A-generators, lifts of B-generators modulo pi,
torsion of B, and a closure step comparing with the exact degreewise
lattices of D).  Relations are the exact kernel of R[z] -> A x B.  The
result is then certified: D[1/pi] -> A and D/pi^N -> B/pi^N are checked to
be isomorphisms.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .completion import CompletionModel
from .errors import (
    DegreeBoundInconclusive,
    IncompatibleDatum,
    NotIntegral,
    SearchExhausted,
    UnsupportedRegime,
    VerificationFailed,
)
from .lattice import echelon, integral_preimage, residue_rank_solve
from .precision import Factor, TruncatedAlgebra
from .ring.base import INF
from .ring.ideal import (
    AffineAlgebra,
    IdealPresentation,
    clear_denominators,
    eliminate,
    fresh_names,
    colon_pi,
    intersect,
    map_kernel,
    pi_saturation,
)
from .ring.orders import monomial_key
from .ring.polynomial import MOD, OVER_K, OVER_R, PolyRing, Polynomial

_deglex = monomial_key("deglex")


@dataclass(frozen=True)
class DomainCondition:
    """Declared inequality |g| <= 1 on one factor of B."""

    expr: Polynomial
    factor: str

    def __str__(self):
        return f"|{self.expr}| <= 1 on {self.factor}"


@dataclass(frozen=True)
class BTarget:
    """A topological generator of B: the idempotent of a factor or a variable on it."""

    factor: int
    factor_name: str
    poly: str

    def __str__(self):
        return f"{self.poly} on {self.factor_name}"


class AffineGluingTriple:
    """The data (A, B, j*) plus a declared description of the analytic domain."""

    def __init__(self, A: AffineAlgebra, B: TruncatedAlgebra, jstar: dict, subdomain=(), name: str = "T"):
        if A.regime.kind != "K":
            A = A.localize()
        if A.base != B.base:
            raise ValueError("A and B must share the base pair")
        self.A = A
        self.B = B
        self.name = name
        self.base = A.base
        self._kfactor_rings = [f.ring(self.base, OVER_K) for f in B.factors]
        self.jstar = {}
        for v in A.variables:
            if v not in jstar:
                raise ValueError(f"no image given for generator {v}")
            imgs = jstar[v]
            if not isinstance(imgs, (list, tuple)):
                imgs = [imgs]
            if len(imgs) != len(B.factors):
                raise ValueError(f"image of {v} needs {len(B.factors)} factor components")
            self.jstar[v] = tuple(kr(i) if isinstance(i, (str, int)) else i.change_ring(kr)
                                  for kr, i in zip(self._kfactor_rings, imgs))
        conds = []
        for c in subdomain:
            if isinstance(c, DomainCondition):
                conds.append(c)
            else:
                expr, fac = c
                conds.append(DomainCondition(A.ring(expr) if isinstance(expr, str) else expr, fac))
        self.subdomain = tuple(conds)
        self._kideals: list | None = None
        self._filtration = None
        self._models: dict = {}

    # structure of B -------------------------------------------------------

    @property
    def nfactors(self) -> int:
        return len(self.B.factors)

    def factor_ideal_K(self, i: int) -> IdealPresentation:
        """Relations of factor i over K; its monic basis must be integral."""
        if self._kideals is None:
            ideals = []
            for k, f in enumerate(self.B.factors):
                ring = self._kfactor_rings[k]
                ideal = IdealPresentation(ring, [r.change_ring(ring) for r in f.relations])
                for g in ideal.basis():
                    if g.valuation() < 0:
                        raise UnsupportedRegime(
                            f"factor {f.name} is not in standard form: the monic basis element {g} "
                            "of its relations over R[1/pi] has non-integral coefficients")
                ideals.append(ideal)
            self._kideals = ideals
        return self._kideals[i]

    def torsion_model(self, i: int) -> CompletionModel:
        m = self._models.get(i)
        if m is None:
            m = self._models[i] = CompletionModel.from_factor(self.base, self.B.factors[i])
        return m

    def has_torsion(self) -> bool:
        return any(self.torsion_generators(i) for i in range(self.nfactors))

    def torsion_generators(self, i: int) -> list[Polynomial]:
        m = self.torsion_model(i)
        J = m.ideal
        return [g for g in m.saturation().generators if not J.contains(g)]

    # the map j* -------------------------------------------------------------

    def image(self, a: Polynomial) -> tuple:
        """Exact normal forms of j*(a) in each factor of C."""
        a = a.change_ring(self.A.ring) if a.ring != self.A.ring else a
        out = []
        for i, kr in enumerate(self._kfactor_rings):
            vals = {v: self.jstar[v][i] for v in self.A.variables}
            img = a.substitute(vals, kr) if self.A.variables else kr.const(a.constant_coefficient())
            out.append(self.factor_ideal_K(i).normal_form(img))
        return tuple(out)

    def integral_lift(self, images: tuple) -> tuple:
        """Per-factor images as polynomials over R (raises NotIntegral)."""
        out = []
        for f, img in zip(self.B.factors, images):
            out.append(Polynomial(f.ring(self.base), img.terms))
        return tuple(out)

    def validate(self) -> list[str]:
        """Problems with the datum: relations of A not killed by j*, or
        declared domain inequalities that j* does not satisfy."""
        problems = []
        for r in self.A.relations.generators:
            img = self.image(r)
            for f, v in zip(self.B.factors, img):
                if v:
                    problems.append(f"relation {r} maps to {v} on {f.name}")
        names = [f.name for f in self.B.factors]
        for c in self.subdomain:
            if c.factor not in names:
                problems.append(f"domain condition names unknown factor {c.factor}")
                continue
            i = names.index(c.factor)
            v = self.image(c.expr)[i]
            if v.valuation() < 0:
                problems.append(f"domain condition {c} fails: j*({c.expr}) = {v} is not integral")
        return problems

    def targets(self) -> list[BTarget]:
        out = []
        for i, f in enumerate(self.B.factors):
            out.append(BTarget(i, f.name, "1"))
            for v in f.variables:
                out.append(BTarget(i, f.name, v))
        return out

    def filtration(self) -> _Filtration:
        if self._filtration is None:
            self._filtration = _Filtration(self)
        return self._filtration

    def __str__(self):
        return f"triple {self.name} over {self.base.name}: A = {self.A}, B = {self.B}"


# pairs -------------------------------------------------------------------------

@dataclass(frozen=True)
class Pair:
    """An element (a, b) of A x B; ``b`` holds exact per-factor polynomials over R."""

    a: Polynomial
    b: tuple

    def __str__(self):
        bs = " | ".join(str(x) for x in self.b) if self.b else ""
        return f"({self.a}; {bs})"


def _pair_add(T: AffineGluingTriple, x: Pair, y: Pair, cx=1, cy=1) -> Pair:
    a = T.A.reduce(x.a * cx + y.a * cy)
    b = tuple(T.B.exact_ideal(i).normal_form(p * cx + q * cy) for i, (p, q) in enumerate(zip(x.b, y.b)))
    return Pair(a, b)


def _pair_mul(T: AffineGluingTriple, x: Pair, y: Pair) -> Pair:
    a = T.A.reduce(x.a * y.a)
    b = tuple(T.B.exact_ideal(i).normal_form(p * q) for i, (p, q) in enumerate(zip(x.b, y.b)))
    return Pair(a, b)


def _pair_scale(T: AffineGluingTriple, x: Pair, c) -> Pair:
    return Pair(x.a * c, tuple(T.B.exact_ideal(i).normal_form(p * c) for i, p in enumerate(x.b)))


def pair_from_a(T: AffineGluingTriple, a: Polynomial) -> Pair:
    a = T.A.reduce(a)
    return Pair(a, T.integral_lift(T.image(a)))


def one_pair(T: AffineGluingTriple) -> Pair:
    return Pair(T.A.ring.one, tuple(f.ring(T.base).one for f in T.B.factors))


# degree filtration on A ------------------------------------------------------------

class _Filtration:
    """Standard monomials of A by degree and the exact lattices D_d."""

    def __init__(self, T: AffineGluingTriple):
        self.T = T
        A = T.A
        self.lms = [max(g.items(), key=lambda t: _deglex(t[0]))[0] for g in A.relations.basis()]
        self._images: dict = {}
        self._lattices: dict = {}

    def standard(self, d: int) -> list:
        n = self.T.A.ring.nvars
        out = []
        for deg in range(d + 1):
            for m in _monomials_of_degree(n, deg):
                if not any(all(a <= b for a, b in zip(lm, m)) for lm in self.lms):
                    out.append(m)
        return out

    def image_of(self, m) -> tuple:
        img = self._images.get(m)
        if img is None:
            img = self._images[m] = self.T.image(self.T.A.ring.monomial(m))
        return img

    def lattice(self, d: int) -> tuple[list[Polynomial], list[Polynomial]]:
        """R-basis of D_d (as elements of A) and a K-basis of the kernel of
        A_d -> C.  D_d is their sum (lattice + K-span)."""
        cached = self._lattices.get(d)
        if cached is not None:
            return cached
        T = self.T
        cols = self.standard(d)
        rows: dict = {}
        for j, m in enumerate(cols):
            for i, img in enumerate(self.image_of(m)):
                for mm, c in img.items():
                    rows.setdefault((i, mm), {})[j] = c
        zero = T.base.zero
        M = [[r.get(j, zero) for j in range(len(cols))] for _, r in sorted(rows.items())]
        lat, ker = integral_preimage(M, T.base, len(cols)) if M else ([], _unit_vectors(len(cols), T.base))
        # canonical echelon basis, highest-degree coordinates first
        order = sorted(range(len(cols)), key=lambda j: _deglex(cols[j]), reverse=True)
        lat = [v for _, v in echelon(lat, order, T.base)]
        ker = [v for _, v in _field_echelon(ker, order, T.base)]
        ring = T.A.ring
        to_poly = lambda v: Polynomial(ring, {cols[j]: c for j, c in enumerate(v) if c})
        out = ([to_poly(v) for v in lat], [to_poly(v) for v in ker])
        self._lattices[d] = out
        return out


def _unit_vectors(n, base):
    return [[base.one if i == j else base.zero for j in range(n)] for i in range(n)]


def _field_echelon(vectors, order, base):
    out = []
    pool = [list(v) for v in vectors if any(v)]
    for coord in order:
        idx = next((k for k, v in enumerate(pool) if v[coord]), None)
        if idx is None:
            continue
        piv = pool.pop(idx)
        piv = [x / piv[coord] for x in piv]
        for v in pool:
            if v[coord]:
                q = v[coord]
                for i, x in enumerate(piv):
                    if x:
                        v[i] = v[i] - q * x
        pool = [v for v in pool if any(v)]
        out.append((coord, piv))
    return out


def _monomials_of_degree(n: int, d: int):
    if n == 0:
        if d == 0:
            yield ()
        return
    for c in itertools.combinations_with_replacement(range(n), d):
        e = [0] * n
        for i in c:
            e[i] += 1
        yield tuple(e)


# membership and density -------------------------------------------------------------

def membership(f, T: AffineGluingTriple) -> bool:
    """Whether f in A lies in D, i.e. j*(f) has only integral coefficients."""
    return membership_witness(f, T) is None


def membership_witness(f, T: AffineGluingTriple):
    """None if f is in D, else (factor name, monomial, coefficient) with
    negative valuation."""
    a = T.A.element(f)
    for fac, img in zip(T.B.factors, T.image(a)):
        for m, c in img.sorted_terms():
            if T.base.valuation(c) < 0:
                return fac.name, m, c
    return None


def _residue_vector(T: AffineGluingTriple, p: Pair) -> dict:
    out = {}
    for i, b in enumerate(p.b):
        ideal = T.B.level_ideal(i, 1)
        r = ideal.normal_form(Polynomial(ideal.ring, b.terms))
        for m, c in r.items():
            out[(i, m)] = c
    return out


def _target_vector(T: AffineGluingTriple, t: BTarget) -> dict:
    ideal = T.B.level_ideal(t.factor, 1)
    r = ideal.normal_form(ideal.ring(t.poly))
    return {(t.factor, m): c for m, c in r.items()}


def _solve_residue(T, pairs: list[Pair], target: dict):
    vecs = [_residue_vector(T, p) for p in pairs]
    coords = sorted(set(target).union(*[set(v) for v in vecs]) if vecs else set(target), key=repr)
    zero = T.base.zero
    cols = [[v.get(c, zero) for c in coords] for v in vecs]
    tgt = [target.get(c, zero) for c in coords]
    return residue_rank_solve(cols, tgt, T.base)


def _combine(T, pairs: list[Pair], coeffs) -> Pair:
    acc = Pair(T.A.ring.zero, tuple(f.ring(T.base).zero for f in T.B.factors))
    for p, c in zip(pairs, coeffs):
        if c:
            acc = _pair_add(T, acc, p, 1, c)
    return acc


def _torsion_pairs(T: AffineGluingTriple) -> list[Pair]:
    out = []
    for i, f in enumerate(T.B.factors):
        for t in T.torsion_generators(i):
            b = [g.ring(T.base).zero for g in T.B.factors]
            b[i] = T.B.exact_ideal(i).normal_form(t)
            out.append(Pair(T.A.ring.zero, tuple(b)))
    return out


@dataclass
class DenseResult:
    dense: bool
    witness: BTarget | None
    degree: int
    levels: list = field(default_factory=list)
    lifts: dict = field(default_factory=dict)

    def __bool__(self):
        return self.dense


def _lift_targets(T: AffineGluingTriple, max_degree: int, extra: list[Pair]):
    """Find, for each B-target, an element of D congruent to it mod pi.

    Returns (lifts, unresolved, degree reached)."""
    targets = T.targets()
    lifts: dict = {}
    base_cols = [one_pair(T)] + list(extra)
    filt = T.filtration()
    pending = list(targets)
    reached = 0
    for d in range(0, max_degree + 1):
        reached = d
        lat, _ = filt.lattice(d)
        cols = base_cols + [pair_from_a(T, a) for a in lat]
        still = []
        for t in pending:
            sol = _solve_residue(T, cols, _target_vector(T, t))
            if sol is None:
                still.append(t)
            else:
                lifts[t] = _combine(T, cols, sol)
        pending = still
        if not pending:
            break
    return lifts, pending, reached


def dense_image_check(T: AffineGluingTriple, prec: int = 1, degree_bound: int = 6, retry: int = 2) -> DenseResult:
    """Whether D -> B/pi is onto, tested on the topological generators of B.

    Since D is a ring and pi^k D lies in D, surjectivity modulo pi gives
    surjectivity modulo every pi^N, which is what density means.  A
    negative answer is certified up to ``degree_bound + retry``; a target
    first reached during the retry raises DegreeBoundInconclusive.
    """
    extra = _torsion_pairs(T)
    lifts, pending, reached = _lift_targets(T, degree_bound, extra)
    if not pending:
        return DenseResult(True, None, reached, list(range(1, prec + 1)), lifts)
    more, still, _ = _lift_targets(T, degree_bound + retry, extra)
    if len(still) < len(pending):
        hit = [t for t in pending if t not in still]
        raise DegreeBoundInconclusive(
            f"target {hit[0]} is reached only above degree bound {degree_bound}; raise the bound")
    return DenseResult(False, pending[0], degree_bound + retry, [], lifts)


# generated subalgebras, degreewise -----------------------------------------------------

class GeneratedLattice:
    """R-span of monomials in given elements of A, filtered by degree.

    ``level(e)`` is an echelon basis of the span of all monomials of
    weighted degree <= e (weights are the degrees of the generators); each
    basis vector carries an expression as a polynomial in the generators.
    """

    def __init__(self, T: AffineGluingTriple, gens: list[Polynomial], names=None):
        self.T = T
        self.gens = [T.A.reduce(g) for g in gens]
        self.weights = [max(g.total_degree(), 1) for g in self.gens]
        names = names or [f"g{k}" for k in range(len(gens))]
        self.zring = PolyRing(T.base, tuple(names), OVER_R)
        self._levels: list = []

    def _echelon(self, items):
        """items: (poly in A, expression); echelon with highest monomials first."""
        base = self.T.base
        pool = [(dict(p.items()), e) for p, e in items if p]
        out = []
        while pool:
            coord = max((m for v, _ in pool for m in v), key=_deglex)
            best = min((k for k, (v, _) in enumerate(pool) if coord in v),
                       key=lambda k: base.valuation(pool[k][0][coord]))
            pv, pe = pool.pop(best)
            u = base.unit_part(pv[coord])
            pv = {m: c / u for m, c in pv.items()}
            pe = pe * (1 / u)
            pc = pv[coord]
            nxt = []
            for v, e in pool:
                c = v.get(coord)
                if c:
                    q = c / pc
                    v = dict(v)
                    for m, x in pv.items():
                        y = v.get(m, 0) - q * x
                        if y:
                            v[m] = y
                        else:
                            v.pop(m, None)
                    e = e - pe * q
                if v:
                    nxt.append((v, e))
            pool = nxt
            out.append((Polynomial(self.T.A.ring, pv, _trusted=True), pe))
        return out

    def level(self, e: int):
        while len(self._levels) <= e:
            k = len(self._levels)
            items = [(self.T.A.ring.one, self.zring.one)]
            if k > 0:
                items += self._levels[k - 1]
                for idx, (g, w) in enumerate(zip(self.gens, self.weights)):
                    if w <= k:
                        zv = self.zring.gens()[idx]
                        for p, ex in self._levels[k - w]:
                            items.append((self.T.A.reduce(p * g), ex * zv))
            self._levels.append(self._echelon(items))
        return self._levels[e]

    def degree_part(self, d: int, e: int) -> list:
        """Basis of (span of monomials of weight <= e) intersected with A_d."""
        return [(p, ex) for p, ex in self.level(e) if p.total_degree() <= d]

    def express(self, a: Polynomial, max_weight: int):
        """A polynomial over R in the generators mapping to ``a``, or None."""
        a = self.T.A.reduce(a)
        if not a:
            return self.zring.zero
        for e in range(max(a.total_degree(), 0), max_weight + 1):
            ex = _express_in(self.T, self.level(e), a)
            if ex is not None:
                return ex
        return None


def _express_in(T, basis, a: Polynomial):
    base = T.base
    rem = dict(a.items())
    expr = None
    for p, ex in basis:
        lm = max(p.items(), key=lambda t: _deglex(t[0]))[0]
        c = rem.get(lm)
        if not c:
            continue
        q = c / p.coefficient(lm)
        if base.valuation(q) < 0:
            return None
        for m, x in p.items():
            y = rem.get(m, 0) - q * x
            if y:
                rem[m] = y
            else:
                rem.pop(m, None)
        expr = ex * q if expr is None else expr + ex * q
    if rem:
        return None
    return expr


def lattice_equal(T: AffineGluingTriple, first: list[Polynomial], second: list[Polynomial]) -> bool:
    """Equality of the R-spans of two lists of elements of A."""
    from .lattice import same_lattice

    coords = sorted({m for p in first + second for m in p.terms}, key=_deglex)
    vec = lambda p: [p.coefficient(m) for m in coords]
    return same_lattice([vec(p) for p in first], [vec(p) for p in second], T.base)


def degreewise_compare(T: AffineGluingTriple, gens: list[Polynomial], degree: int,
                       extra_weight: int | None = None) -> dict:
    """Compare the subalgebra generated by ``gens`` with the exact D_d, for
    every d <= degree.  Returns {d: True/False}; True certifies equality."""
    gl = GeneratedLattice(T, gens)
    extra_weight = degree if extra_weight is None else extra_weight
    out = {}
    filt = T.filtration()
    for d in range(0, degree + 1):
        exact, ker = filt.lattice(d)
        ok = False
        for e in range(d, d + extra_weight + 1):
            part = [p for p, _ in gl.degree_part(d, e)]
            if lattice_equal(T, part, exact):
                ok = True
                break
        out[d] = ok and not ker
    return out


def subalgebras_equal(T: AffineGluingTriple, first: list[Polynomial], second: list[Polynomial],
                      degree: int, extra_weight: int | None = None) -> dict:
    """Degreewise comparison of two generated subalgebras (both against each
    other, at the largest weight examined)."""
    extra_weight = degree if extra_weight is None else extra_weight
    g1, g2 = GeneratedLattice(T, first), GeneratedLattice(T, second)
    out = {}
    for d in range(0, degree + 1):
        e = d + extra_weight
        out[d] = lattice_equal(T, [p for p, _ in g1.degree_part(d, e)], [p for p, _ in g2.degree_part(d, e)])
    return out


# generator search -------------------------------------------------------------------

@dataclass
class GluedGenerator:
    name: str
    pair: Pair
    origin: str

    @property
    def a(self):
        return self.pair.a

    @property
    def b(self):
        return self.pair.b

    def __str__(self):
        return f"{self.name} = {self.pair}  [{self.origin}]"


def _priority(T, p: Pair):
    deg = p.a.total_degree()
    v = p.a.valuation()
    return (deg, -v if v != INF else INF, str(p.a), tuple(str(x) for x in p.b))


def generator_search(T: AffineGluingTriple, degree_bound: int = 6, prec: int = 8) -> list[GluedGenerator]:
    """Elements of D generating it: scaled A-generators, lifts of the
    topological generators of B, torsion of B, and degreewise closure."""
    base = T.base
    candidates: list[tuple[Pair, str]] = []
    seen = set()

    def add(p: Pair, origin: str):
        if not p.a and all(not x for x in p.b):
            return
        key = (p.a, p.b)
        if key in seen:
            return
        seen.add(key)
        candidates.append((p, origin))

    if T.nfactors == 0:
        # C = 0: D is A itself, generated by the generators of A and 1/pi
        for v in T.A.variables:
            add(Pair(T.A.element(v), ()), "A-generator")
        add(Pair(T.A.ring.const(base.pi_power(-1)), ()), "inverse-pi")
        return _name(T, [(p, o) for p, o in candidates])

    # (1) pi^N * x_i in D with N minimal
    for v in T.A.variables:
        a = T.A.element(v)
        if not a:
            continue
        for N in range(0, prec + 1):
            scaled = a * base.pi_power(N)
            if membership(scaled, T):
                add(pair_from_a(T, scaled), "scaled")
                break
        else:
            raise SearchExhausted(f"no pi^N * {v} with N <= {prec} lies in D", [v])

    # (4) torsion of B, mapping to 0 in A
    torsion = _torsion_pairs(T)
    for p in torsion:
        add(p, "torsion")

    # (2) lifts of the topological generators of B
    lifts, pending, _ = _lift_targets(T, degree_bound, torsion)
    if pending:
        raise SearchExhausted(
            f"no element of degree <= {degree_bound} reduces to {pending[0]} modulo {base.pi_name}",
            [str(t) for t in pending])
    for t, p in lifts.items():
        if not _is_scalar(p):
            add(p, "lift")

    # kernel of A -> C: those elements lie in D with any pi-power denominator
    filt = T.filtration()
    for d in range(0, degree_bound + 1):
        _, ker = filt.lattice(d)
        for k in ker:
            add(pair_from_a(T, k * base.pi_power(-1)), "kernel")

    # closure: add exact D_d basis elements missing from the generated span
    for d in range(1, degree_bound + 1):
        gens = [p.a for p, _ in candidates if p.a]
        gl = GeneratedLattice(T, gens)
        exact, _ = filt.lattice(d)
        missing = list(exact)
        for e in range(d, d + degree_bound + 1):
            part = [p for p, _ in gl.degree_part(d, e)]
            missing = [a for a in exact if not _in_span(T, part, a)]
            if not missing:
                break
        for a in missing:
            add(pair_from_a(T, a), "closure")

    ordered = sorted(candidates, key=lambda t: _priority(T, t[0]))
    kept = _drop_redundant(T, ordered, degree_bound)
    return _name(T, kept)


def _is_scalar(p: Pair) -> bool:
    if not p.a.is_constant() or any(not x.is_constant() for x in p.b):
        return False
    c = p.a.constant_coefficient()
    return all(x.constant_coefficient() == c for x in p.b)


def _in_span(T, basis: list[Polynomial], a: Polynomial) -> bool:
    if not a:
        return True
    tag = PolyRing(T.base, ("_",), OVER_R).one
    return _express_in(T, [(p, tag) for p in basis], a) is not None


def _drop_redundant(T, ordered, degree_bound):
    """Greedy removal of generators lying in the algebra generated by the
    others (A-side; torsion generators are always kept)."""
    kept = list(ordered)
    changed = True
    while changed:
        changed = False
        for idx in range(len(kept) - 1, -1, -1):
            p, origin = kept[idx]
            if not p.a:
                continue
            others = [q.a for j, (q, _) in enumerate(kept) if j != idx and q.a]
            gl = GeneratedLattice(T, others)
            if gl.express(p.a, p.a.total_degree() + degree_bound) is not None and _b_side_ok(T, kept, idx):
                del kept[idx]
                changed = True
                break
    return kept


def _b_side_ok(T, kept, idx) -> bool:
    # with torsion in B, the A-part does not determine the pair; keep such generators
    return not T.has_torsion()


def _name(T, items) -> list[GluedGenerator]:
    taken = set(T.A.variables)
    for f in T.B.factors:
        taken.update(f.variables)
    names = fresh_names("z", len(items), taken) if any(n.startswith("z") for n in taken) else \
        [f"z{k + 1}" for k in range(len(items))]
    return [GluedGenerator(n, p, o) for n, (p, o) in zip(names, items)]


# relations and the result ---------------------------------------------------------------

class EncodedB:
    """B = prod R[v_i]/J_i as one quotient ring with idempotent variables."""

    def __init__(self, T: AffineGluingTriple, avoid=()):
        self.T = T
        base = T.base
        taken = set(avoid)
        self.var_names = []
        for i, f in enumerate(T.B.factors):
            self.var_names.append({v: f"b{i}_{v}" for v in f.variables})
        self.idem = [f"e{i}" for i in range(1, T.nfactors)]
        names = [n for d in self.var_names for n in d.values()] + self.idem
        clash = taken.intersection(names)
        if clash:
            raise ValueError(f"internal name clash {clash}")
        self.ring = PolyRing(base, tuple(names), OVER_R)
        self.generator_names = names
        rels = []
        R = self.ring
        if T.nfactors == 0:
            rels.append(R.one)
        E = [None] + [R.var(e) for e in self.idem]
        e0 = R.one - sum((e for e in E[1:]), R.zero)
        E[0] = e0
        for a in range(1, len(E)):
            rels.append(E[a] * E[a] - E[a])
            for b in range(a + 1, len(E)):
                rels.append(E[a] * E[b])
        for i, f in enumerate(T.B.factors):
            for v in f.variables:
                w = R.var(self.var_names[i][v])
                for k in range(1, len(E)):
                    rels.append(w * E[k] - w if k == i else w * E[k])
            for r in f.relations:
                rels.append(self.encode_factor(i, r) * E[i])
        self.E = E
        self.relations = rels

    def encode_factor(self, i: int, p: Polynomial) -> Polynomial:
        names = self.var_names[i]
        terms = {}
        idx = [self.ring.variables.index(names[v]) for v in p.ring.variables]
        for m, c in p.items():
            e = [0] * self.ring.nvars
            for k, x in zip(idx, m):
                e[k] = x
            terms[tuple(e)] = c
        return Polynomial(self.ring, terms)

    def encode(self, b: tuple) -> Polynomial:
        acc = self.ring.zero
        for i, p in enumerate(b):
            if p:
                acc = acc + self.encode_factor(i, p) * self.E[i]
        return acc

    def generator_labels(self) -> list[tuple[str, Polynomial]]:
        out = []
        for i, f in enumerate(self.T.B.factors):
            for v in f.variables:
                out.append((f"{v} on {f.name}", self.ring.var(self.var_names[i][v])))
        for k, e in enumerate(self.idem, start=1):
            out.append((f"1 on {self.T.B.factors[k].name}", self.ring.var(e)))
        return out


@dataclass
class GluedRingResult:
    triple: AffineGluingTriple
    generators: list
    ring: PolyRing
    relations: IdealPresentation
    kernel_K: list
    certificates: dict = field(default_factory=dict)
    degree_bound: int = 6
    prec: int = 8

    def to_A(self, f: Polynomial) -> Polynomial:
        vals = {g.name: g.a for g in self.generators}
        return self.triple.A.reduce(f.substitute(vals, self.triple.A.ring))

    def to_B(self, f: Polynomial, N: int | None = None) -> tuple:
        """Image in B, exact (N=None) or reduced modulo pi^N."""
        T = self.triple
        out = []
        for i, fac in enumerate(T.B.factors):
            ring = fac.ring(T.base)
            vals = {g.name: g.b[i] for g in self.generators}
            img = T.B.exact_ideal(i).normal_form(f.substitute(vals, ring))
            if N is not None:
                ideal = T.B.level_ideal(i, N)
                img = ideal.normal_form(Polynomial(ideal.ring, img.terms))
            out.append(img)
        return tuple(out)

    def relation_list(self) -> list[Polynomial]:
        return self.relations.basis()

    def subalgebra(self) -> GeneratedLattice:
        return GeneratedLattice(self.triple, [g.a for g in self.generators], [g.name for g in self.generators])


def _kernel_over_K(T: AffineGluingTriple, zring_K: PolyRing, gens) -> list[Polynomial]:
    return map_kernel([g.a for g in gens], zring_K, T.A.relations)


def pullback_ring(T: AffineGluingTriple, degree_bound: int = 6, prec: int = 8,
                  verify: bool = True) -> GluedRingResult:
    """Generators and exact relations of D, followed by verification."""
    problems = T.validate()
    if problems:
        raise IncompatibleDatum("; ".join(problems))
    gens = generator_search(T, degree_bound, prec)
    zring = PolyRing(T.base, tuple(g.name for g in gens), OVER_R)
    kerK = _kernel_over_K(T, zring.with_regime(OVER_K), gens)
    cleared = [Polynomial(zring, clear_denominators(g).terms) for g in kerK]
    relA = pi_saturation(IdealPresentation(zring, cleared))
    rel = relA
    if T.has_torsion():
        enc = EncodedB(T, avoid=zring.variables)
        Bideal = IdealPresentation(enc.ring, enc.relations)
        kerB = map_kernel([enc.encode(g.b) for g in gens], zring, Bideal)
        rel = intersect(relA, IdealPresentation(zring, kerB))
    relations = IdealPresentation(zring, rel.basis())
    result = GluedRingResult(T, gens, zring, relations, kerK, degree_bound=degree_bound, prec=prec)
    if verify:
        result.certificates["verify"] = verify_glued(result, T, prec)
    return result


# verification ------------------------------------------------------------------------------

@dataclass
class Certificate:
    generic_surjective: bool = False
    generic_injective: bool = False
    levels: list = field(default_factory=list)
    expressions: dict = field(default_factory=dict)
    # level -> how it was certified: "elimination", "inverse maps" and/or "induction"
    methods: dict = field(default_factory=dict)
    torsion_free: bool | None = None

    @property
    def passed(self) -> bool:
        return self.generic_surjective and self.generic_injective

    def _mark(self, N: int, how: str):
        self.methods.setdefault(N, [])
        if how not in self.methods[N]:
            self.methods[N].append(how)
        if N not in self.levels:
            self.levels.append(N)
            self.levels.sort()

    def __str__(self):
        lv = ",".join(str(n) for n in self.levels) or "none"
        return (f"D[1/pi]->A surjective={self.generic_surjective} injective={self.generic_injective}; "
                f"D/pi^N->B/pi^N iso for N in {{{lv}}}")


EXPLICIT_LEVELS = 4


def verify_glued(result: GluedRingResult, T: AffineGluingTriple, prec: int,
                 explicit_levels: int = EXPLICIT_LEVELS) -> Certificate:
    """Check that D[1/pi] -> A and D/pi^N -> B/pi^N (N <= prec) are isomorphisms.

    Level 1 is checked by an elimination basis.  When B is pi-torsion free,
    D is checked to be pi-torsion free (Rel : pi = Rel); then a pair (a, b)
    of D with b in pi^N B is pi^N times the pair (a/pi^N, b/pi^N), which
    together with level 1 gives every level N.  Levels up to
    ``explicit_levels`` are in addition checked directly by explicit
    mutually inverse maps.  With torsion in B every level is checked by its
    own elimination basis.

    Raises VerificationFailed with the first failing witness.
    """
    cert = Certificate()
    gens = result.generators
    zK = result.ring.with_regime(OVER_K)
    Aring = T.A.ring
    # (i) generic fibre: each generator of A is a K-polynomial in the images
    if Aring.nvars:
        big = PolyRing(T.base, Aring.variables + zK.variables, OVER_K)
        eqs = [r.change_ring(big) for r in T.A.relations.generators]
        eqs += [big.var(g.name) - g.a.change_ring(big) for g in gens]
        ideal = IdealPresentation(big, eqs, f"elim:{Aring.nvars}")
        for v in Aring.variables:
            nf = ideal.normal_form(big.var(v))
            if any(any(m[:Aring.nvars]) for m in nf.terms):
                raise VerificationFailed(f"{v} is not in the image of D[1/pi] -> A", v)
            cert.expressions[v] = str(Polynomial(zK, {m[Aring.nvars:]: c for m, c in nf.items()}))
    cert.generic_surjective = True
    relK = IdealPresentation(zK, [r.change_ring(zK) for r in result.relations.generators])
    for g in result.kernel_K:
        if not relK.contains(g):
            raise VerificationFailed(f"kernel element {g} of D[1/pi] -> A is not a relation", g)
    for r in result.relations.generators:
        if result.to_A(r):
            raise VerificationFailed(f"relation {r} does not vanish in A", r)
    cert.generic_injective = True
    # (ii) each truncation level
    if T.has_torsion():
        cert.torsion_free = False
        _levels_by_elimination(result, T, 1, prec, cert)
        return cert
    _levels_by_elimination(result, T, 1, min(prec, 1), cert)
    rel = result.relations
    cert.torsion_free = rel.contains_ideal(colon_pi(rel))
    if not cert.torsion_free:
        raise VerificationFailed("the glued ring has pi-torsion although B has none", "pi-torsion")
    _levels_by_inverse(result, T, min(prec, explicit_levels), cert)
    for N in range(2, prec + 1):
        cert._mark(N, "induction")
    return cert


def _level_one_ideal(result, T, enc, N: int = 1) -> IdealPresentation:
    big = PolyRing(T.base, enc.ring.variables + result.ring.variables, OVER_R)
    eqs = [r.change_ring(big) for r in enc.relations]
    eqs += [big.var(g.name) - enc.encode(g.b).change_ring(big) for g in result.generators]
    eqs.append(big.const(T.base.pi_power(N)))
    return IdealPresentation(big, eqs, f"elim:{enc.ring.nvars}")


def _levels_by_elimination(result, T, first, last, cert):
    """Kernel and image of R[z] -> B/pi^N by one elimination basis per level."""
    enc = EncodedB(T, avoid=result.ring.variables)
    nb = enc.ring.nvars
    for N in range(first, last + 1):
        ideal = _level_one_ideal(result, T, enc, N)
        big = ideal.ring
        for label, w in enc.generator_labels():
            nf = ideal.normal_form(w.change_ring(big))
            if any(any(m[:nb]) for m in nf.terms):
                raise VerificationFailed(
                    f"D/pi^{N} -> B/pi^{N} is not surjective: {label} is not hit", (N, label))
        kernel = [Polynomial(result.ring, {m[nb:]: c for m, c in g.items()})
                  for g in ideal.raw_basis() if not any(any(m[:nb]) for m in g)]
        target = result.relations.with_generators([result.ring.const(T.base.pi_power(N))])
        for k in kernel:
            if not target.contains(k):
                raise VerificationFailed(
                    f"D/pi^{N} -> B/pi^{N} is not injective: {k} maps to 0", (N, k))
        cert._mark(N, "elimination")


class _ReducedSubstitution:
    """f(values) modulo an ideal, reducing after every product; powers of
    the values are cached."""

    def __init__(self, values: list, ideal: IdealPresentation):
        self.values = values
        self.ideal = ideal
        self._powers = [[ideal.ring.one] for _ in values]

    def power(self, i: int, e: int) -> Polynomial:
        pw = self._powers[i]
        while len(pw) <= e:
            pw.append(self.ideal.normal_form(pw[-1] * self.values[i]))
        return pw[e]

    def __call__(self, f: Polynomial) -> Polynomial:
        ring = self.ideal.ring
        acc = ring.zero
        for m, c in f.items():
            t = ring.const(c)
            for i, e in enumerate(m):
                if e:
                    t = self.ideal.normal_form(t * self.power(i, e))
            acc = acc + t
        return self.ideal.normal_form(acc)


def _levels_by_inverse(result, T, prec, cert):
    """Mutually inverse maps between D/pi^N and B/pi^N, level by level.

    phi sends z_k to b_k.  The inverse psi sends each generator w of B to a
    polynomial P_w in z with phi(P_w) = w mod pi^N; P_w is refined one
    power of pi at a time from preimages modulo pi (B is pi-torsion free,
    so w - phi(P_w) in pi^k B can be divided by pi^k).  At each level the
    certificate checks that phi kills the relations of D, that psi kills
    the relations of B, and that both composites are the identity.
    """
    base = T.base
    zring = result.ring
    enc = EncodedB(T, avoid=zring.variables)
    nb = enc.ring.nvars
    level1 = _level_one_ideal(result, T, enc, 1)
    big = level1.ring
    # B modulo pi^prec is all that the comparison up to level prec can see
    btrunc = enc.ring.with_regime(MOD(prec))
    Bmod = IdealPresentation(btrunc, [Polynomial(btrunc, r.terms) for r in enc.relations])
    images = [Polynomial(btrunc, enc.encode(g.b).terms) for g in result.generators]
    phi_sub = _ReducedSubstitution(images, Bmod)

    def phi(f: Polynomial) -> Polynomial:
        return Polynomial(enc.ring, phi_sub(f).terms)

    def preimage_mod_pi(x: Polynomial, label: str):
        nf = level1.normal_form(x.change_ring(big))
        if any(any(m[:nb]) for m in nf.terms):
            raise VerificationFailed(f"D/pi -> B/pi is not surjective: {label} is not hit", (1, label))
        return Polynomial(zring, {m[nb:]: c for m, c in nf.items()})

    labels = enc.generator_labels()
    phi_w = lambda w: Polynomial(enc.ring, Bmod.normal_form(Polynomial(btrunc, w.terms)).terms)
    P, resid = {}, {}
    for label, w in labels:
        q = preimage_mod_pi(w, label)
        P[label], resid[label] = q, phi_w(w) - phi(q)
    for N in range(1, prec + 1):
        if N > 1:
            k = N - 1
            scale = base.pi_power(k)
            for label, _ in labels:
                r = resid[label]
                if r.valuation() < k:
                    raise VerificationFailed(f"approximation of {label} lost precision at level {N}", (N, label))
                q = preimage_mod_pi(r * base.pi_power(-k), label)
                P[label] = P[label] + q * scale
                resid[label] = phi_w(r - phi(q) * scale)
        target = IdealPresentation(zring.with_regime(MOD(N)),
                                   [Polynomial(zring.with_regime(MOD(N)), g.terms) for g in result.relations.generators])
        mod = lambda f: Polynomial(target.ring, f.terms)
        order = [enc.generator_names.index(w.variables_used()[0]) for _, w in labels]
        psi_sub = _ReducedSubstitution([mod(P[labels[order.index(i)][0]]) for i in range(nb)], target)
        for rel in result.relations.generators:
            if phi(rel).valuation() < N:
                raise VerificationFailed(f"relation {rel} does not vanish in B/pi^{N}", (N, rel))
        for r in enc.relations:
            if psi_sub(r):
                raise VerificationFailed(
                    f"D/pi^{N} -> B/pi^{N} is not injective: relation {r} of B has no preimage relation", (N, r))
        for g in result.generators:
            back = psi_sub(enc.encode(g.b))
            if not target.contains(back - mod(zring.var(g.name))):
                raise VerificationFailed(
                    f"D/pi^{N} -> B/pi^{N} is not injective: {g.name} is not recovered", (N, g.name))
        for label, _ in labels:
            if resid[label].valuation() < N:
                raise VerificationFailed(f"D/pi^{N} -> B/pi^{N} is not surjective: {label}", (N, label))
        cert._mark(N, "inverse maps")


# classification and reconstruction -------------------------------------------------------------

@dataclass
class Classification:
    kind: str
    reason: str = ""
    witness: object = None

    def __str__(self):
        if self.kind == "not_affine":
            return f"not_affine({self.reason})"
        return self.kind


def classify_triple(T: AffineGluingTriple, prec: int = 1, degree_bound: int = 6) -> Classification:
    try:
        problems = T.validate()
    except UnsupportedRegime as exc:
        return Classification("inconclusive", "b", str(exc))
    if problems:
        return Classification("not_affine", "c-data", problems[0])
    try:
        res = dense_image_check(T, prec, degree_bound)
    except DegreeBoundInconclusive as exc:
        return Classification("inconclusive", "d", str(exc))
    if not res.dense:
        return Classification("not_affine", "d", res.witness)
    return Classification("affine")


def canonical_triple(X: AffineAlgebra, prec: int = 8) -> AffineGluingTriple:
    """t(X): A = X[1/pi], B = completion of X, j* the identity on variables."""
    if X.regime.kind != "R":
        raise ValueError("expected an algebra over R")
    fac = Factor(X.name or "X", X.variables, X.relations.generators)
    B = TruncatedAlgebra(X.base, prec, [fac], name="B")
    jstar = {v: [v] for v in X.variables}
    return AffineGluingTriple(X.localize(), B, jstar, name=f"t({X.name or 'X'})")


@dataclass
class ReconstructionCertificate:
    result: GluedRingResult
    verify: Certificate
    generators_from_X: dict

    @property
    def passed(self) -> bool:
        return self.verify.passed and all(v is not None for v in self.generators_from_X.values())


def reconstruct_global_sections(X: AffineAlgebra, prec: int = 4, degree_bound: int = 6) -> ReconstructionCertificate:
    """Certify X -> A x_C B is an isomorphism for the canonical triple of X.

    The map is injective because X -> B is the identity of presentations; it
    is surjective once every generator of the glued ring comes from X.
    """
    T = canonical_triple(X, prec)
    res = pullback_ring(T, degree_bound, prec)
    cert = res.certificates["verify"]
    from_x = {}
    for g in res.generators:
        pre = Polynomial(X.ring, g.b[0].terms)
        ok = T.A.reduce(Polynomial(T.A.ring, pre.terms)) == g.a
        from_x[g.name] = X.reduce(pre) if ok else None
        if not ok:
            raise VerificationFailed(f"generator {g.name} does not come from X", g.name)
    return ReconstructionCertificate(res, cert, from_x)


def express_in_generators(result: GluedRingResult, a, extra_weight: int = 6):
    """A polynomial over R in the generators of ``result`` whose image in A is ``a``."""
    T = result.triple
    a = T.A.element(a)
    return result.subalgebra().express(a, a.total_degree() + extra_weight)
