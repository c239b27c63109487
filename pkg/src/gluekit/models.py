"""Worked examples as constructors, Neron component triples and point reduction."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import NotIntegral
from .precision import Factor, TruncatedAlgebra
from .ring.base import BasePair
from .ring.ideal import AffineAlgebra
from .ring.polynomial import OVER_K, OVER_R, Polynomial
from .triple import AffineGluingTriple


def _base(p) -> BasePair:
    return p if isinstance(p, BasePair) else BasePair.arithmetic(int(p))


def two_disks_triple(p, prec: int = 4) -> AffineGluingTriple:
    """The affine line over R glued from the disks |x| <= 1 and |x - 1/p| <= 1.

    A = K[x]; the second disk is centred at 1/p, so x restricts to v + 1/p.
    """
    base = _base(p)
    A = AffineAlgebra(base, ("x",), [], OVER_K, name="A")
    B = TruncatedAlgebra(base, prec, [Factor("d0", ("u",)), Factor("d1", ("v",))])
    pi = base.pi_name
    return AffineGluingTriple(A, B, {"x": ["u", f"v + 1/{pi}"]},
                              [(f"{pi}*x", "d0"), (f"{pi}*x - 1", "d1")], name="two-disks")


def two_disks_generators(T: AffineGluingTriple) -> dict:
    """The generators gamma = pi*x, alpha = x(1 - pi*x)^2, beta = pi*x^2(1 - pi*x) of D."""
    x = T.A.ring.var("x")
    pi = T.base.pi
    return {"alpha": x * (1 - x * pi) ** 2, "beta": x * x * pi * (1 - x * pi), "gamma": x * pi}


def two_disks_relations(zring, names=("alpha", "beta", "gamma")):
    """The three relations among alpha, beta, gamma, as polynomials over R."""
    a, b, g = (zring.var(n) for n in names)
    pi = zring.base.pi
    return [a * pi - g * (1 - g) ** 2, b * pi - g * g * (1 - g), g * a - (1 - g) * b]


def unit_circle_triple(p, prec: int = 4, degenerate: bool = False) -> AffineGluingTriple:
    """K[x] against the unit circle R<x, xb>/(x*xb - 1); with ``degenerate``
    the closed unit disk R<x> instead (the affine control)."""
    base = _base(p)
    A = AffineAlgebra(base, ("x",), [], OVER_K, name="A")
    if degenerate:
        B = TruncatedAlgebra(base, prec, [Factor("c", ("x",))])
    else:
        B = TruncatedAlgebra(base, prec, [Factor("c", ("x", "xb"), ("x*xb - 1",))])
    return AffineGluingTriple(A, B, {"x": ["x"]}, [("x", "c")],
                              name="unit-disk" if degenerate else "unit-circle")


def identity_triple(p, prec: int = 4) -> AffineGluingTriple:
    return unit_circle_triple(p, prec, degenerate=True)


def small_disks_triple(p, prec: int = 4) -> AffineGluingTriple:
    """Two disjoint small disks |x| <= |p| and |x - 1| <= |p| inside the unit disk.

    The inequality |x| <= 1 alone cuts out the whole unit disk, strictly
    more than the union of the two disks, so the idempotents separating them
    have to be found among elements with pi-power denominators.
    """
    base = _base(p)
    A = AffineAlgebra(base, ("x",), [], OVER_K, name="A")
    B = TruncatedAlgebra(base, prec, [Factor("s0", ("u",)), Factor("s1", ("v",))])
    pi = base.pi_name
    return AffineGluingTriple(A, B, {"x": [f"{pi}*u", f"1 + {pi}*v"]},
                              [(f"x/{pi}", "s0"), (f"(x - 1)/{pi}", "s1")], name="small-disks")


def torsion_triple(p, prec: int = 4) -> AffineGluingTriple:
    """The canonical triple of R[x]/(pi*x): B has pi-torsion x, invisible in A = K."""
    from .triple import canonical_triple

    base = _base(p)
    X = AffineAlgebra(base, ("x",), [f"{base.pi_name}*x"], OVER_R, name="X")
    return canonical_triple(X, prec)


# Neron model of G_m --------------------------------------------------------------

@dataclass(frozen=True)
class ComponentTriple:
    """Component data of the Neron model of G_m over a base where v(pi) = 1.

    Only the discrete invariant is kept: the valuation v(omega) of the
    parameter cutting out the annuli |omega|^(n+1) <= |x| <= |omega|^n, one
    per integer n.
    """

    base_valuation: Fraction
    index_description: str = "Z"
    label: str = ""

    def __post_init__(self):
        v = Fraction(self.base_valuation)
        if v <= 0:
            raise ValueError("base valuation must be a positive rational")
        object.__setattr__(self, "base_valuation", v)

    def component(self, n: int) -> tuple[Fraction, Fraction]:
        """Valuation range [n*v, (n+1)*v] of x on the n-th component."""
        return n * self.base_valuation, (n + 1) * self.base_valuation


def neron_gm_triple(v) -> ComponentTriple:
    v = Fraction(v)
    return ComponentTriple(v, "Z", f"Gm components, v(omega) = {v}")


def neron_iso_test(T1: ComponentTriple, T2: ComponentTriple) -> bool:
    """Isomorphic exactly when the defining parameters have the same absolute value."""
    return T1.base_valuation == T2.base_valuation


# points and reduction -----------------------------------------------------------

@dataclass
class IntegralPoint:
    coordinates: tuple
    model: AffineAlgebra

    def __post_init__(self):
        base = self.model.base
        self.coordinates = tuple(base.coerce(c) for c in self.coordinates)
        if len(self.coordinates) != len(self.model.variables):
            raise ValueError("point needs one coordinate per model variable")
        for c in self.coordinates:
            if not base.is_integral(c):
                raise NotIntegral(f"coordinate {c} has negative valuation")
        vals = dict(zip(self.model.variables, self.coordinates))
        for r in self.model.relations.generators:
            if evaluate(r, vals):
                raise ValueError(f"point does not satisfy relation {r}")


def evaluate(f: Polynomial, values: dict):
    base = f.ring.base
    acc = base.zero
    xs = [values[v] for v in f.ring.variables]
    for m, c in f.items():
        t = c
        for x, e in zip(xs, m):
            if e:
                t = t * x ** e
        acc = acc + t
    return acc


def specialize_point(pt: IntegralPoint) -> tuple:
    """Coordinates reduced modulo pi (canonical residues)."""
    base = pt.model.base
    out = []
    for c in pt.coordinates:
        if not base.is_integral(c):
            raise NotIntegral(f"coordinate {c} has negative valuation")
        out.append(base.residue(c, 1))
    return tuple(out)


@dataclass
class ModelMap:
    """A morphism of models given by polynomial images of the target coordinates."""

    source: AffineAlgebra
    target: AffineAlgebra
    images: tuple

    def __call__(self, pt: IntegralPoint) -> IntegralPoint:
        vals = dict(zip(self.source.variables, pt.coordinates))
        return IntegralPoint(tuple(evaluate(f, vals) for f in self.images), self.target)

    def reduced(self, residues: tuple) -> tuple:
        """The reduction of the map applied to a residue point."""
        base = self.source.base
        vals = dict(zip(self.source.variables, residues))
        return tuple(base.residue(evaluate(f, vals), 1) for f in self.images)


def gl_model(base: BasePair, n: int) -> AffineAlgebra:
    """GL_n over R: entries a_ij and d with d * det - 1."""
    names = [f"a{i}{j}" for i in range(1, n + 1) for j in range(1, n + 1)]
    ring_names = tuple(names) + ("d",)
    alg = AffineAlgebra(base, ring_names, [], OVER_R, name=f"GL{n}")
    R = alg.ring
    mat = [[R.var(f"a{i}{j}") for j in range(1, n + 1)] for i in range(1, n + 1)]
    det = _det(mat, R)
    return AffineAlgebra(base, ring_names, [R.var("d") * det - 1], OVER_R, name=f"GL{n}")


def _det(mat, ring):
    if not mat:
        return ring.one
    acc = ring.zero
    for j, a in enumerate(mat[0]):
        if a:
            minor = [row[:j] + row[j + 1:] for row in mat[1:]]
            term = a * _det(minor, ring)
            acc = acc + term if j % 2 == 0 else acc - term
    return acc


def _det_values(mat):
    if not mat:
        return 1
    acc = 0
    for j, a in enumerate(mat[0]):
        if a:
            minor = [row[:j] + row[j + 1:] for row in mat[1:]]
            acc += (-1) ** j * a * _det_values(minor)
    return acc


def matrix_point(base: BasePair, m) -> IntegralPoint:
    """The GL_n(R)-point of a square matrix (raises NotIntegral when not integral
    or when the determinant is not a unit)."""
    n = len(m)
    entries = [base.coerce(c) for row in m for c in row]
    det = _det_values([[base.coerce(c) for c in row] for row in m])
    if not det or not base.is_unit(det):
        raise NotIntegral(f"determinant {det} is not a unit")
    return IntegralPoint(tuple(entries) + (1 / det,), gl_model(base, n))


def reduce_matrix(base: BasePair, m) -> list[list]:
    pt = matrix_point(base, m)
    res = specialize_point(pt)
    n = len(m)
    return [list(res[i * n:(i + 1) * n]) for i in range(n)]


def left_multiplication(base: BasePair, g) -> ModelMap:
    """The model map m -> g*m of GL_n for an integral g with unit determinant."""
    n = len(g)
    G = gl_model(base, n)
    R = G.ring
    a = [[R.var(f"a{i}{j}") for j in range(1, n + 1)] for i in range(1, n + 1)]
    gg = [[base.coerce(c) for c in row] for row in g]
    dg = _det_values(gg)
    imgs = []
    for i in range(n):
        for j in range(n):
            acc = R.zero
            for k in range(n):
                if gg[i][k]:
                    acc = acc + a[k][j] * gg[i][k]
            imgs.append(acc)
    imgs.append(R.var("d") * (1 / dg))
    return ModelMap(G, G, tuple(imgs))


def iwahori_membership(m, p) -> bool:
    """Integral entries, entries above the diagonal in (pi), unit determinant."""
    base = _base(p)
    mat = [[base.coerce(c) for c in row] for row in m]
    n = len(mat)
    if any(len(r) != n for r in mat):
        raise ValueError("matrix must be square")
    for i in range(n):
        for j in range(n):
            v = base.valuation(mat[i][j])
            if v < 0 or (i < j and v < 1):
                return False
    det = _det_values(mat)
    return bool(det) and base.is_unit(det)
