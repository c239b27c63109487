"""Finitely presented modules and the affine gluing functor.

A module over A = (coefficients)[x]/I is presented as A^n / (column span of
the relation matrix).  Submodules of A^n are handled through module
Groebner bases over the polynomial ring: the relation columns together with
g*e_i for every generator g of I.

Gluing works in the polynomial model: B = the completion of A is represented
by A itself with exact coefficients, and C = B[1/pi] by A[1/pi].  All
truncations B/pi^N coincide with those of the true completion, which is
what the precision-level checks see.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import CapExceeded, IncompatibleDatum, PrecisionLoss, RegimeMismatch
from .lattice import smith_invariants
from .ring.base import INF
from .ring.groebner import GBContext, buchberger, make_reducer
from .ring.ideal import AffineAlgebra, IdealPresentation, _raw_generators
from .ring.orders import module_key, monomial_key
from .ring.polynomial import MOD, OVER_K, OVER_R, Polynomial

INCONCLUSIVE = "inconclusive"

# Groebner pair budget for the vector-bundle test
VB_PAIR_BUDGET = 20000


# raw module vectors ---------------------------------------------------------------

def _to_raw(vec, offset: int = 0, shift=0) -> dict:
    out = {}
    for pos, p in enumerate(vec):
        for m, c in p.items():
            out[(pos + offset,) + (0,) * shift + m] = c
    return out


def _from_raw(raw: dict, ring, n: int, offset: int = 0, shift: int = 0) -> tuple:
    parts = [dict() for _ in range(n)]
    for m, c in raw.items():
        parts[m[0] - offset][m[1 + shift:]] = c
    return tuple(Polynomial(ring, t) for t in parts)


def _ring_generators(ring_alg: AffineAlgebra) -> list[Polynomial]:
    gens = [g for g in ring_alg.relations.basis()]
    if ring_alg.regime.kind == "mod":
        gens.append(ring_alg.ring.const(ring_alg.base.pi_power(ring_alg.regime.N)))
    return gens


def _ctx(alg: AffineAlgebra, key) -> GBContext:
    return GBContext(alg.base, alg.regime.is_field, key, module=True)


def _elim_key(k: int):
    dl = monomial_key("deglex")

    def key(m, k=k):
        return (sum(m[1:1 + k]), -m[0], dl(m[1 + k:]))

    return key


def _unit(n: int, i: int, ring) -> tuple:
    return tuple(ring.one if j == i else ring.zero for j in range(n))


# presentations ------------------------------------------------------------------------

class ModulePresentation:
    """A^n_gens modulo the span of ``relations`` (a list of columns)."""

    def __init__(self, ring: AffineAlgebra, n_gens: int, relations=(), prec: int | None = None,
                 name: str = "M"):
        self.ring = ring
        self.n_gens = int(n_gens)
        self.prec = prec
        self.name = name
        cols = []
        for col in relations:
            if len(col) != self.n_gens:
                raise ValueError(f"relation {list(map(str, col))} has {len(col)} entries, expected {self.n_gens}")
            cols.append(tuple(ring.element(e) for e in col))
        self.relations = tuple(c for c in cols if any(c))
        self._gb = None
        self._reducer = None
        self._sat = None

    @property
    def base(self):
        return self.ring.base

    @property
    def poly_ring(self):
        return self.ring.ring

    def vector(self, entries) -> tuple:
        if len(entries) != self.n_gens:
            raise ValueError("wrong vector length")
        return tuple(self.ring.element(e) for e in entries)

    def unit(self, i: int) -> tuple:
        return _unit(self.n_gens, i, self.poly_ring)

    def zero_vector(self) -> tuple:
        return tuple(self.poly_ring.zero for _ in range(self.n_gens))

    # submodule data -------------------------------------------------------

    def submodule_raw(self, offset: int = 0) -> list[dict]:
        """The relation submodule of the free polynomial module, as raw vectors."""
        raw = [_to_raw(c, offset) for c in self.relations]
        for g in _ring_generators(self.ring):
            for i in range(self.n_gens):
                raw.append({(i + offset,) + m: c for m, c in g.items()})
        return [r for r in raw if r]

    def groebner(self) -> list[dict]:
        if self._gb is None:
            ctx = _ctx(self.ring, module_key("deglex"))
            self._gb = buchberger(self.submodule_raw(), ctx)
            self._reducer = make_reducer(self._gb, ctx)
        return self._gb

    def normal_form(self, vec) -> tuple:
        self.groebner()
        raw = self._reducer(_to_raw(vec))
        return _from_raw(raw, self.poly_ring, self.n_gens)

    def contains(self, vec) -> bool:
        """Whether the vector lies in the relation submodule (is zero in M)."""
        return not any(self.normal_form(vec))

    def is_zero_module(self) -> bool:
        return all(self.contains(self.unit(i)) for i in range(self.n_gens))

    # regime changes ---------------------------------------------------------

    def in_regime(self, regime) -> ModulePresentation:
        alg = self.ring.with_regime(regime)
        rels = []
        for col in self.relations:
            if regime.kind != "K" and self.ring.regime.kind == "K":
                v = min((e.valuation() for e in col), default=INF)
                scale = self.base.pi_power(-v) if v != INF and v < 0 else 1
                col = tuple(e * scale for e in col)
            rels.append(tuple(Polynomial(alg.ring, e.terms) for e in col))
        return ModulePresentation(alg, self.n_gens, rels, self.prec, self.name)

    def localize(self) -> ModulePresentation:
        return self.in_regime(OVER_K)

    def truncate(self, N: int) -> ModulePresentation:
        out = self.in_regime(MOD(N))
        out.prec = N
        return out

    def with_relations(self, extra) -> ModulePresentation:
        return ModulePresentation(self.ring, self.n_gens, list(self.relations) + list(extra), self.prec, self.name)

    def direct_sum(self, other: ModulePresentation) -> ModulePresentation:
        if other.ring.ring != self.ring.ring:
            raise RegimeMismatch("direct sum of modules over different rings")
        z = self.poly_ring.zero
        rels = [tuple(c) + (z,) * other.n_gens for c in self.relations]
        rels += [(z,) * self.n_gens + tuple(c) for c in other.relations]
        prec = _min_prec(self.prec, other.prec)
        return ModulePresentation(self.ring, self.n_gens + other.n_gens, rels, prec, f"{self.name}+{other.name}")

    # torsion ------------------------------------------------------------------

    def saturation(self) -> list[tuple]:
        """Generators of (P : pi^infinity), with P the relation submodule."""
        if self._sat is None:
            if self.ring.regime.kind != "R":
                raise RegimeMismatch("pi-torsion is defined over R")
            self._sat = saturate_submodule(self.ring, self.n_gens, self.submodule_raw())
        return self._sat

    def torsion_generators(self) -> list[tuple]:
        """Elements generating the pi-power torsion submodule of M."""
        return [v for v in self.saturation() if not self.contains(v)]

    def is_torsion_free(self) -> bool:
        return not self.torsion_generators()

    def __str__(self):
        rels = " ".join("rel [" + ", ".join(str(e) for e in c) + "];" for c in self.relations)
        return f"module {self.name} over A {{ gens {self.n_gens}; {rels} }}"


def _min_prec(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def saturate_submodule(alg: AffineAlgebra, n: int, raw: list[dict]) -> list[tuple]:
    """(U : pi^infinity) for a submodule U of R[x]^n given by raw vectors.

    Module version of the s*pi - 1 trick: add (s*pi - 1) e_i and eliminate s.
    """
    base = alg.base
    shifted = [{(m[0], 0) + m[1:]: c for m, c in r.items()} for r in raw]
    nv = alg.ring.nvars
    for i in range(n):
        shifted.append({(i, 1) + (0,) * nv: base.pi, (i, 0) + (0,) * nv: -base.one})
    gb = buchberger(shifted, _ctx(alg, _elim_key(1)))
    out = []
    for g in gb:
        if all(m[1] == 0 for m in g):
            out.append(_from_raw({(m[0],) + m[2:]: c for m, c in g.items()}, alg.ring, n))
    return out


def submodule_contains(alg: AffineAlgebra, n: int, gens: list[tuple], vec) -> bool:
    """Membership of ``vec`` in the span of ``gens`` inside the free module A^n."""
    pres = ModulePresentation(alg, n, gens)
    return pres.contains(vec)


def intersect_submodules(alg: AffineAlgebra, n: int, U: list[tuple], V: list[tuple]) -> list[tuple]:
    """Generators of the intersection of two submodules of A^n (polynomial level)."""
    raw = []
    for u in U:
        r = _to_raw(u, shift=1)
        raw.append({(m[0], 1) + m[2:]: c for m, c in r.items()})
    for v in V:
        r = _to_raw(v, shift=1)
        d = {}
        for m, c in r.items():
            d[m] = d.get(m, 0) + c
            mm = (m[0], 1) + m[2:]
            d[mm] = d.get(mm, 0) - c
        raw.append({m: c for m, c in d.items() if c})
    for g in _ring_generators(alg):
        for i in range(n):
            raw.append({(i, 0) + m: c for m, c in g.items()})
            raw.append({(i, 1) + m: c for m, c in g.items()})
    gb = buchberger(raw, _ctx(alg, _elim_key(1)))
    return [_from_raw({(m[0],) + m[2:]: c for m, c in g.items()}, alg.ring, n)
            for g in gb if all(m[1] == 0 for m in g)]


def kernel_of_map(alg: AffineAlgebra, images: list[list[tuple]], targets: list[list[dict]],
                  target_sizes: list[int]) -> list[tuple]:
    """Kernel of A^g -> Q_1 (+) ... (+) Q_r, where Q_s = A^{n_s}/U_s.

    ``images[k][s]`` is the image of the k-th basis vector in the s-th free
    module; ``targets[s]`` are raw generators of U_s (positions from 0).
    """
    offs, total = [], 0
    for n in target_sizes:
        offs.append(total)
        total += n
    g = len(images)
    raw = []
    for k, parts in enumerate(images):
        r = {(total + k,) + (0,) * alg.ring.nvars: alg.base.one}
        for s, vec in enumerate(parts):
            for m, c in _to_raw(vec, offs[s]).items():
                r[m] = r.get(m, 0) - c
        raw.append({m: c for m, c in r.items() if c})
    for s, gens in enumerate(targets):
        for gg in gens:
            raw.append({(m[0] + offs[s],) + m[1:]: c for m, c in gg.items()})
    for gg in _ring_generators(alg):
        for i in range(total + g):
            raw.append({(i,) + m: c for m, c in gg.items()})
    gb = buchberger(raw, _ctx(alg, module_key("deglex", total)))
    out = []
    for v in gb:
        if all(m[0] >= total for m in v):
            col = _from_raw(v, alg.ring, g, offset=total)
            if any(col):
                out.append(col)
    return out


# maps and isomorphism certificates --------------------------------------------------------

def apply_matrix(mat: list[list[Polynomial]], vec, ring) -> tuple:
    """mat (rows x cols) times vec (length cols)."""
    out = []
    for row in mat:
        acc = ring.zero
        for a, b in zip(row, vec):
            if a and b:
                acc = acc + a * b
        out.append(acc)
    return tuple(out)


@dataclass
class ModuleMap:
    """A-linear map given by the images of the source generators (columns)."""

    source: ModulePresentation
    target: ModulePresentation
    columns: list

    def matrix(self):
        return [[self.columns[j][i] for j in range(len(self.columns))] for i in range(self.target.n_gens)]

    def __call__(self, vec) -> tuple:
        ring = self.target.poly_ring
        vec = tuple(Polynomial(ring, v.terms) for v in vec)
        cols = self.columns
        acc = [ring.zero] * self.target.n_gens
        for j, c in enumerate(vec):
            if c:
                for i in range(self.target.n_gens):
                    if cols[j][i]:
                        acc[i] = acc[i] + c * cols[j][i]
        return self.target.normal_form(acc)

    def well_defined(self) -> bool:
        return all(self.target.contains(self(r)) for r in self.source.relations)


@dataclass
class IsomorphismCertificate:
    forward: ModuleMap
    backward: ModuleMap
    checks: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(self.checks.values())


def certify_isomorphism(M1: ModulePresentation, M2: ModulePresentation, phi_cols, psi_cols) -> IsomorphismCertificate:
    """Check that phi: M1 -> M2 and psi: M2 -> M1 are well defined and mutually inverse."""
    phi = ModuleMap(M1, M2, [tuple(M2.ring.element(e) for e in c) for c in phi_cols])
    psi = ModuleMap(M2, M1, [tuple(M1.ring.element(e) for e in c) for c in psi_cols])
    cert = IsomorphismCertificate(phi, psi)
    cert.checks["phi well defined"] = phi.well_defined()
    cert.checks["psi well defined"] = psi.well_defined()
    cert.checks["psi.phi = id"] = all(
        M1.contains(tuple(a - b for a, b in zip(psi(phi(M1.unit(i))), M1.unit(i)))) for i in range(M1.n_gens))
    cert.checks["phi.psi = id"] = all(
        M2.contains(tuple(a - b for a, b in zip(phi(psi(M2.unit(i))), M2.unit(i)))) for i in range(M2.n_gens))
    return cert


def principal_invariants(M: ModulePresentation) -> tuple[int, list]:
    """(free rank, sorted torsion exponents) of a module over R itself."""
    if M.ring.ring.nvars or M.ring.relations.generators:
        raise ValueError("principal invariants need a module over the base ring itself")
    if not M.relations:
        return M.n_gens, []
    mat = [[M.relations[j][i].constant_coefficient() for j in range(len(M.relations))] for i in range(M.n_gens)]
    vals = smith_invariants(mat, M.base, len(M.relations))
    if M.ring.regime.kind == "K":
        return M.n_gens - len(vals), []
    return M.n_gens - len(vals), [v for v in vals if v > 0]


def principal_isomorphic(M1: ModulePresentation, M2: ModulePresentation) -> bool:
    return principal_invariants(M1) == principal_invariants(M2)


def _normalize(M: ModulePresentation, col: tuple) -> tuple:
    """Divide a relation by the unit part of its first leading coefficient."""
    for e in col:
        if e:
            c = e.leading_term()[1]
            u = c if M.ring.regime.is_field else M.base.unit_part(c)
            return tuple(x * (1 / u) for x in col)
    return col


def _unit_entry(M: ModulePresentation, c: Polynomial):
    if not c or not c.is_constant():
        return None
    k = c.constant_coefficient()
    return k if M.ring.regime.is_field or M.base.is_unit(k) else None


def prune(M: ModulePresentation) -> tuple[ModulePresentation, IsomorphismCertificate]:
    """Remove generators that some relation expresses through the others.

    A relation with a unit constant entry at generator k lets e_k be
    rewritten in terms of the remaining generators; the relation and the
    generator are dropped together.  Relations implied by the remaining
    ones are dropped afterwards.  Returns the smaller presentation with a
    certificate of isomorphism from M to it.
    """
    n = M.n_gens
    z = M.poly_ring.zero
    rels = [list(c) for c in M.relations]
    keep = list(range(n))
    subst: dict = {}
    changed = True
    while changed:
        changed = False
        for r in rels:
            for k in keep:
                u = _unit_entry(M, r[k])
                if u is None:
                    continue
                expr = {j: -(r[j] * (1 / u)) for j in keep if j != k and r[j]}
                out = []
                for s in rels:
                    if s is r:
                        continue
                    a = s[k]
                    if a:
                        s = [s[j] + a * expr[j] if j in expr else s[j] for j in range(n)]
                        s[k] = z
                    out.append(s)
                rels = out
                keep.remove(k)
                subst[k] = expr
                changed = True
                break
            if changed:
                break
    cols = [_normalize(M, tuple(r[j] for j in keep)) for r in rels]
    cols = [c for c in cols if any(c)]
    small = ModulePresentation(M.ring, len(keep), cols, M.prec, M.name)
    for i in range(len(cols) - 1, -1, -1):
        rest = ModulePresentation(M.ring, len(keep), cols[:i] + cols[i + 1:], M.prec, M.name)
        if rest.contains(cols[i]):
            cols = cols[:i] + cols[i + 1:]
            small = rest
    pos = {j: i for i, j in enumerate(keep)}
    memo: dict = {}

    def image(k):
        # e_k written in the kept generators
        if k in pos:
            return tuple(M.poly_ring.one if i == pos[k] else z for i in range(len(keep)))
        if k not in memo:
            acc = [z] * len(keep)
            for j, c in subst[k].items():
                for i, e in enumerate(image(j)):
                    if e:
                        acc[i] = acc[i] + c * e
            memo[k] = tuple(acc)
        return memo[k]

    phi = [image(k) for k in range(n)]
    psi = [M.unit(j) for j in keep]
    return small, certify_isomorphism(M, small, phi, psi)


def format_presentation(M: ModulePresentation) -> str:
    """``gens n; rels none`` or ``gens n; rel [..]; rel [..]``."""
    if not M.relations:
        return f"gens {M.n_gens}; rels none"
    rels = "; ".join("rel [" + ", ".join(str(e) for e in c) + "]" for c in M.relations)
    return f"gens {M.n_gens}; {rels}"


# the gluing datum ------------------------------------------------------------------------------

@dataclass
class ModuleGluingDatum:
    """(F, N, iota): F over A[1/pi], N over the completion, iota: F (x) C -> N[1/pi].

    ``iota`` is an n_N x n_F matrix over C (images of the F generators in
    terms of the N generators) and ``iota_inv`` an n_F x n_N matrix.
    """

    F: ModulePresentation
    Nmod: ModulePresentation
    iota: list
    iota_inv: list | None
    prec: int = 8

    def __post_init__(self):
        K = self.F.ring
        if K.regime.kind != "K":
            raise RegimeMismatch("F must be a module over A[1/pi]")
        if self.Nmod.ring.regime.kind != "R":
            raise RegimeMismatch("N must be presented over R (the completion model)")
        self.iota = [[K.element(e) for e in row] for row in self.iota]
        if self.iota_inv is not None:
            self.iota_inv = [[K.element(e) for e in row] for row in self.iota_inv]

    @property
    def algebra(self) -> AffineAlgebra:
        return self.Nmod.ring

    def N_generic(self) -> ModulePresentation:
        return self.Nmod.localize()

    def check(self) -> list[str]:
        """Violations of the datum invariants (empty when valid)."""
        problems = []
        F, NK = self.F, self.N_generic()
        nF, nN = F.n_gens, NK.n_gens
        if len(self.iota) != nN or any(len(r) != nF for r in self.iota):
            return [f"iota must be a {nN} x {nF} matrix"]
        if self.iota_inv is None:
            return ["no inverse of iota supplied"]
        if len(self.iota_inv) != nF or any(len(r) != nN for r in self.iota_inv):
            return [f"iota inverse must be a {nF} x {nN} matrix"]
        ring = F.poly_ring
        for r in F.relations:
            if not NK.contains(apply_matrix(self.iota, r, ring)):
                problems.append(f"iota does not carry the relation {list(map(str, r))} of F to a relation of N")
        for r in NK.relations:
            if not F.contains(apply_matrix(self.iota_inv, r, ring)):
                problems.append(f"iota inverse does not carry the relation {list(map(str, r))} of N to F")
        for i in range(nF):
            e = F.unit(i)
            back = apply_matrix(self.iota_inv, apply_matrix(self.iota, e, ring), ring)
            if not F.contains(tuple(a - b for a, b in zip(back, e))):
                problems.append(f"iota^-1 iota differs from the identity on generator {i} of F")
        for i in range(nN):
            e = NK.unit(i)
            back = apply_matrix(self.iota, apply_matrix(self.iota_inv, e, ring), ring)
            if not NK.contains(tuple(a - b for a, b in zip(back, e))):
                problems.append(f"iota iota^-1 differs from the identity on generator {i} of N")
        return problems

    def direct_sum(self, other: ModuleGluingDatum) -> ModuleGluingDatum:
        return ModuleGluingDatum(self.F.direct_sum(other.F), self.Nmod.direct_sum(other.Nmod),
                                 _block_diag(self.iota, other.iota, self.F.poly_ring),
                                 _block_diag(self.iota_inv, other.iota_inv, self.F.poly_ring),
                                 min(self.prec, other.prec))


def _block_diag(a, b, ring):
    if a is None or b is None:
        return None
    ca = len(a[0]) if a else 0
    cb = len(b[0]) if b else 0
    z = ring.zero
    return [list(r) + [z] * cb for r in a] + [[z] * ca + list(r) for r in b]


def triple_of_module(M: ModulePresentation, prec: int = 8) -> ModuleGluingDatum:
    """(M[1/pi], completion of M, canonical identification)."""
    if M.ring.regime.kind != "R":
        raise RegimeMismatch("triple_of_module expects a module over A finite type over R")
    F = M.localize()
    N = ModulePresentation(M.ring, M.n_gens, M.relations, prec, M.name)
    ident = [list(F.unit(i)) for i in range(M.n_gens)]
    return ModuleGluingDatum(F, N, ident, [list(r) for r in ident], prec)


@dataclass
class GluedModule:
    module: ModulePresentation
    # generator k as a pair (F-vector over K, N-vector over R) and its origin
    pairs: list
    origins: list
    generic: IsomorphismCertificate
    completed: IsomorphismCertificate
    # common scaling of the F-coordinates used in the relation computation
    F_scale: int = 0


def _integral_scale(vec, base) -> int:
    v = min((e.valuation() for e in vec), default=INF)
    return 0 if v == INF or v >= 0 else -v


def glue_module(d: ModuleGluingDatum) -> GluedModule:
    """The fibre product F x_{N[1/pi]} N as a finitely presented A-module."""
    problems = d.check()
    if problems and problems[0] == "no inverse of iota supplied":
        raise PrecisionLoss("iota has no stored inverse; cannot produce the correction generators")
    if problems:
        raise IncompatibleDatum("; ".join(problems))
    A = d.algebra
    base = A.base
    R = A.ring
    F, N = d.F, d.Nmod
    nF, nN = F.n_gens, N.n_gens
    K = F.poly_ring
    pairs, origins = [], []
    # scaled F generators paired with their images
    for j in range(nF):
        img = apply_matrix(d.iota, F.unit(j), K)
        k = _integral_scale(img, base)
        s = base.pi_power(k)
        f = tuple(e * s for e in F.unit(j))
        pairs.append((f, tuple(Polynomial(R, (e * s).terms) for e in img)))
        origins.append(("scaled", j, k))
    # correction generators: preimages of the N generators
    for i in range(nN):
        f = apply_matrix(d.iota_inv, _unit(nN, i, K), K)
        pairs.append((f, N.unit(i)))
        origins.append(("correction", i, 0))
    # torsion of N, invisible on the generic fibre
    for t in N.torsion_generators():
        pairs.append((tuple(K.zero for _ in range(nF)), t))
        origins.append(("torsion", None, 0))
    # relations: kernel of A^g -> (R^nF / saturated F-lattice) (+) N
    scale = max((_integral_scale(f, base) for f, _ in pairs), default=0)
    sc = base.pi_power(scale)
    lattice = F.in_regime(OVER_R)
    sat = saturate_submodule(A, nF, lattice.submodule_raw()) if nF else []
    images = [[tuple(Polynomial(R, (e * sc).terms) for e in f), n] for f, n in pairs]
    rels = kernel_of_map(A, images, [[_to_raw(v) for v in sat], N.submodule_raw()], [nF, nN])
    M = ModulePresentation(A, len(pairs), rels, d.prec, "M")
    # certificates: M[1/pi] ~ F and M ~ N (exactly, in the polynomial model)
    MK = M.localize()
    phi_F = []
    for j in range(nF):
        k = origins[j][2]
        phi_F.append(tuple(K.const(base.pi_power(-k)) if i == j else K.zero for i in range(len(pairs))))
    psi_F = [f for f, _ in pairs]
    generic = certify_isomorphism(F, MK, phi_F, psi_F)
    phi_N = [M.unit(nF + i) for i in range(nN)]
    psi_N = [n for _, n in pairs]
    completed = certify_isomorphism(N, M, phi_N, psi_N)
    if not (generic.passed and completed.passed):
        failed = [k for c in (generic, completed) for k, v in c.checks.items() if not v]
        raise PrecisionLoss(f"glued presentation could not be certified: {', '.join(failed)}")
    return GluedModule(M, pairs, origins, generic, completed, scale)


# completion properties -----------------------------------------------------------------------

@dataclass
class GlueabilityReport:
    tower_levels: list = field(default_factory=list)
    torsion_bound: int = 0
    torsion_generators: list = field(default_factory=list)
    torsion_levels: list = field(default_factory=list)

    def passed(self, prec: int) -> bool:
        want = list(range(1, prec + 1))
        return self.tower_levels == want and self.torsion_levels == [n for n in want if n >= self.torsion_bound]


def module_torsion_bound(M: ModulePresentation, cap: int = 8) -> int:
    """Smallest N0 with pi^N0 * (P : pi^inf) inside P."""
    pending = M.torsion_generators()
    if not pending:
        return 0
    for n in range(1, cap + 1):
        s = M.base.pi_power(n)
        pending = [t for t in pending if not M.contains(tuple(e * s for e in t))]
        if not pending:
            return n
    raise CapExceeded(f"pi-torsion of {M.name} did not stabilize by {M.base.pi_name}^{cap}")


def check_glueable(M: ModulePresentation, prec: int = 4, cap: int = 8) -> GlueabilityReport:
    """Levelwise checks of M (x) completion = completion of M, and of the torsion map.

    Tower: the presentation reduced modulo pi^n (a module over A/pi^n) and
    the quotient of M by pi^n M (computed over R) have the same elements,
    tested by comparing normal forms of both relation sets.  Torsion: the
    pi-power torsion of M injects into M/pi^n M for n >= N0, i.e. the
    saturation meets P + pi^n A^m exactly in P.
    """
    rep = GlueabilityReport()
    base = M.base
    for n in range(1, prec + 1):
        piN = M.poly_ring.const(base.pi_power(n))
        over_R = M.with_relations([tuple(piN if i == j else M.poly_ring.zero for j in range(M.n_gens))
                                   for i in range(M.n_gens)])
        trunc = M.truncate(n)
        ok = all(trunc.contains(tuple(Polynomial(trunc.poly_ring, e.terms) for e in r)) for r in over_R.relations)
        ok = ok and all(over_R.contains(tuple(Polynomial(M.poly_ring, e.terms) for e in r)) for r in trunc.relations)
        if ok:
            rep.tower_levels.append(n)
    rep.torsion_bound = module_torsion_bound(M, cap)
    rep.torsion_generators = M.torsion_generators()
    sat = M.saturation()
    for n in range(max(rep.torsion_bound, 1), prec + 1):
        piN = M.poly_ring.const(base.pi_power(n))
        extra = [tuple(piN if i == j else M.poly_ring.zero for j in range(M.n_gens)) for i in range(M.n_gens)]
        meet = intersect_submodules(M.ring, M.n_gens, sat, list(M.relations) + extra)
        if all(M.contains(v) for v in meet):
            rep.torsion_levels.append(n)
    return rep


# vector bundles ---------------------------------------------------------------------------------

def _det(mat: list[list[Polynomial]], ring) -> Polynomial:
    n = len(mat)
    if n == 0:
        return ring.one
    if n == 1:
        return mat[0][0]
    acc = ring.zero
    for j in range(n):
        if mat[0][j]:
            minor = [row[:j] + row[j + 1:] for row in mat[1:]]
            term = mat[0][j] * _det(minor, ring)
            acc = acc + term if j % 2 == 0 else acc - term
    return acc


def fitting_ideal(M: ModulePresentation, k: int) -> IdealPresentation:
    """Fitt_k(M): the (n - k)-minors of the relation matrix, plus the ring relations."""
    ring = M.poly_ring
    n = M.n_gens
    size = n - k
    extra = list(_ring_generators(M.ring))
    if M.ring.regime.kind == "mod":
        extra = extra[:-1]
    if size <= 0:
        return IdealPresentation(ring, [ring.one])
    cols = list(M.relations)
    gens = []
    if size <= len(cols):
        for rows in itertools.combinations(range(n), size):
            for cs in itertools.combinations(range(len(cols)), size):
                gens.append(_det([[cols[c][r] for c in cs] for r in rows], ring))
    return IdealPresentation(ring, [g for g in gens if g] + extra)


def _idempotent(I: IdealPresentation) -> bool:
    """A finitely generated ideal with I = I^2 is generated by an idempotent."""
    gens = [g for g in I.generators if g]
    sq = [a * b for a, b in itertools.combinations_with_replacement(gens, 2)]
    ctx = GBContext(I.ring.base, I.ring.regime.is_field, monomial_key("deglex"))
    raw = _raw_generators(I.ring, sq)
    reducer = make_reducer(buchberger(raw, ctx, max_pairs=VB_PAIR_BUDGET), ctx)
    return all(not reducer(dict(g.items())) for g in gens)


def is_projective(M: ModulePresentation):
    """All Fitting ideals generated by idempotents; INCONCLUSIVE if the
    Groebner budget runs out."""
    try:
        return all(_idempotent(fitting_ideal(M, k)) for k in range(M.n_gens))
    except RuntimeError:
        return INCONCLUSIVE


def is_vector_bundle_glued(d: ModuleGluingDatum):
    """True iff F is projective over A[1/pi] and N is projective over the completion.

    N is tested as pi-torsion free with N/pi projective over A/pi, which for
    a finitely presented module over a pi-adically complete ring is
    equivalent to projectivity.  Returns INCONCLUSIVE rather than guessing.
    """
    problems = d.check()
    if problems:
        raise IncompatibleDatum("; ".join(problems))
    f = is_projective(d.F)
    if f is INCONCLUSIVE:
        return INCONCLUSIVE
    if not f:
        return False
    try:
        if not d.Nmod.is_torsion_free():
            return False
    except RuntimeError:
        return INCONCLUSIVE
    n = is_projective(d.Nmod.truncate(1))
    return n
