import itertools

import pytest

from gluekit.completion import CompletionModel, complete, split_holds, torsion_bound, torsion_split
from gluekit.errors import CapExceeded
from gluekit.models import two_disks_triple
from gluekit.ring.base import BasePair
from gluekit.ring.ideal import AffineAlgebra, IdealPresentation
from gluekit.ring.polynomial import MOD, OVER_R, Polynomial
from gluekit.triple import pullback_ring

from oracles import fibre_product_count


def alg(base, names, rels):
    return AffineAlgebra(base, names, rels, OVER_R, name="X")


def test_complete_examples(prime):
    base = BasePair.arithmetic(prime)
    T = complete(alg(base, ("x",), []), 2)
    assert T.N == 2 and T.factors[0].relations == ()
    Q = complete(alg(base, ("x",), ["x^2 - p"]), 3)
    I = Q.level_ideal(0, 3)
    assert I.contains(I.ring("x^2 - p")) and I.contains(I.ring(f"{prime}^3"))


@pytest.mark.parametrize("rels", [[], ["x^2 - p"], ["p*x*y - 1 + x"], ["p^2*x", "y^2 - x"]])
def test_tower_compatibility(rels):
    base = BasePair.arithmetic(3)
    X = alg(base, ("x", "y"), rels)
    big = complete(X, 5)
    for N in range(1, 5):
        small = complete(X, N)
        for f in ["x^3*y + 2*x", "p*y^2 - x", "x*y + p^3", "1 + p + p^2 + p^3 + p^4"]:
            a = big.reduce([f], 5)[0]
            # reading the level-5 normal form at level N gives the level-N normal form
            assert big.reduce([Polynomial(big.level_ideal(0, N).ring, a.terms)], N) == small.reduce([f], N)


def test_flat_base_no_spurious_relations():
    # torsion free: a relation holding mod pi^N lifts to one mod pi^(N+1)
    base = BasePair.arithmetic(5)
    X = alg(base, ("x", "y"), ["x*y - p"])
    B = complete(X, 6)
    for N in range(1, 5):
        I_N, I_N1 = B.level_ideal(0, N), B.level_ideal(0, N + 1)
        for g in I_N1.basis():
            assert I_N.contains(Polynomial(I_N.ring, g.terms))
        # the relation module does not grow beyond pi-multiples: pi * (I_{N+1} : pi) lies in I_{N+1}
        assert I_N.contains(I_N.ring("x*y - p"))


@pytest.mark.parametrize("rels, N0", [([], 0), (["p*y"], 1), (["p^2*y"], 2), (["p^2*y", "p*y^2"], 2)])
def test_torsion_bound(rels, N0):
    base = BasePair.arithmetic(5)
    assert torsion_bound(CompletionModel(alg(base, ("y",), rels)), cap=6) == N0


def test_torsion_bound_cap():
    base = BasePair.arithmetic(5)
    with pytest.raises(CapExceeded):
        torsion_bound(CompletionModel(alg(base, ("y",), ["p^4*y"])), cap=2)


@pytest.mark.parametrize("N0", [0, 1, 2])
def test_split_levels(N0):
    base = BasePair.arithmetic(3)
    rels = [f"p^{N0}*y"] if N0 else []
    split = torsion_split(CompletionModel(alg(base, ("y",), rels)), 2 * N0 + 4)
    assert split.N0 == N0
    assert split_holds(split, 2 * N0 + 4)


def test_split_pure_torsion():
    base = BasePair.arithmetic(5)
    model = CompletionModel(alg(base, (), ["p^2"]))
    split = torsion_split(model, 4)
    assert split.B1.is_zero_ring() and split.B3.is_zero_ring()
    assert split.B2.relations.same_ideal(model.ideal.with_generators([model.source.ring.const(25)]))
    assert split_holds(split, 4)


def _elements(ideal, n, d, p):
    """All normal forms of c0 + c1 y + ... + cd y^d in (R/p^n)[y]/I."""
    ring = ideal.ring
    out = set()
    for cs in itertools.product(range(p ** n), repeat=d + 1):
        out.add(ideal.normal_form(ring.monomial((0,), cs[0]) + sum(
            (ring.monomial((i,), c) for i, c in enumerate(cs) if i and c), ring.zero)))
    return out


@pytest.mark.parametrize("p, N0, n", [(2, 1, 3), (2, 2, 4), (3, 1, 2), (2, 2, 5)])
def test_split_by_enumerating_fibre_product(p, N0, n):
    base = BasePair.arithmetic(p)
    X = alg(base, ("y",), [f"p^{N0}*y"])
    split = torsion_split(CompletionModel(X), n)
    d = 2

    def level(a, N):
        return IdealPresentation(a.ring.with_regime(MOD(N)), [Polynomial(a.ring.with_regime(MOD(N)), g.terms)
                                                              for g in a.relations.generators])

    IB, I1, I2, I3 = (level(a, n) for a in (X, split.B1, split.B2, split.B3))
    elems_B = _elements(IB, n, d, p)
    left = _elements(I1, n, d, p)
    right = _elements(I2, n, d, p)

    def to3(f):
        return I3.normal_form(Polynomial(I3.ring, f.terms))

    count = fibre_product_count(left, right, to3, to3)
    pairs = {(I1.normal_form(Polynomial(I1.ring, f.terms)), I2.normal_form(Polynomial(I2.ring, f.terms)))
             for f in elems_B}
    # B -> B' x_{B'''} B'' is injective on the enumerated part and hits every pair
    assert len(pairs) == len(elems_B) == count


def test_two_disks_special_fibre_splits(prime):
    # D/p is a product of two copies of F_p[t]: gamma = p*x is idempotent mod p
    T = two_disks_triple(prime, 2)
    res = pullback_ring(T, 6, 2)
    z = res.ring
    g = next(x for x in res.generators if str(x.a) == f"{prime}*x")
    rel = res.relations.with_generators([z.const(prime)])
    gv = z.var(g.name)
    assert rel.contains(gv * gv - gv)
    assert not rel.contains(gv) and not rel.contains(1 - gv)
