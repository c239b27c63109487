import pytest
from hypothesis import given, strategies as st

from gluekit.errors import IncompatibleDatum, SearchExhausted, VerificationFailed
from gluekit.models import (
    identity_triple,
    small_disks_triple,
    torsion_triple,
    two_disks_generators,
    two_disks_relations,
    two_disks_triple,
    unit_circle_triple,
)
from gluekit.precision import Factor, TruncatedAlgebra
from gluekit.ring.base import BasePair
from gluekit.ring.ideal import AffineAlgebra, IdealPresentation
from gluekit.ring.polynomial import OVER_K, OVER_R, PolyRing
from gluekit.triple import (
    AffineGluingTriple,
    Certificate,
    GluedGenerator,
    GluedRingResult,
    classify_triple,
    degreewise_compare,
    dense_image_check,
    express_in_generators,
    membership,
    membership_witness,
    pair_from_a,
    pullback_ring,
    reconstruct_global_sections,
    subalgebras_equal,
    verify_glued,
)
from gluekit.triple import _levels_by_elimination

from strategies import seeded

T5 = two_disks_triple(5, 4)
GEN5 = two_disks_generators(T5)


@pytest.fixture(scope="module")
def two_disks_result():
    return pullback_ring(T5, 6, 4)


def hand_result(T, names=("alpha", "beta", "gamma"), with_relations=True):
    G = two_disks_generators(T)
    gens = [GluedGenerator(n, pair_from_a(T, G[n]), "hand") for n in names]
    z = PolyRing(T.base, names, OVER_R)
    rels = two_disks_relations(z) if with_relations else []
    return GluedRingResult(T, gens, z, IdealPresentation(z, rels), [r.change_ring(z.with_regime(OVER_K)) for r in rels])


# membership ---------------------------------------------------------------------

def test_membership_examples():
    assert membership("p*x", T5)
    assert not membership("x", T5)
    assert membership("x*(1 - p*x)^2", T5)
    fac, _, c = membership_witness("x", T5)
    assert fac == "d1" and T5.base.valuation(c) == -1


def test_membership_soundness_on_samples():
    for f in ["x", "p*x^2", "x^2*(1 - p*x)", "p^2*x^3", "1/p", "x - p*x^2"]:
        w = membership_witness(f, T5)
        imgs = T5.image(T5.A.element(f))
        vals = [T5.base.valuation(c) for img in imgs for _, c in img.sorted_terms()]
        assert (w is None) == all(v >= 0 for v in vals)


_members = st.sampled_from(["alpha", "beta", "gamma", "1", "p"])


@seeded
@given(st.lists(_members, min_size=1, max_size=3), st.lists(_members, min_size=1, max_size=3),
       st.integers(-3, 3), st.integers(0, 2))
def test_subring_closure(ms1, ms2, c, k):
    vals = dict(GEN5, p=T5.A.ring.const(5)) | {"1": T5.A.ring.one}
    f = T5.A.ring.one * c
    for m in ms1:
        f = f * vals[m]
    g = T5.A.ring.one
    for m in ms2:
        g = g * vals[m]
    g = g + T5.A.ring("x") * 5 ** (k + 1)
    assert membership(f, T5) and membership(g, T5)
    assert membership(f + g, T5) and membership(f * g, T5)
    # x itself is never reached
    assert not membership(f * 5 + T5.A.ring("x"), T5)


# dense image ----------------------------------------------------------------------

def test_dense_image_examples():
    assert dense_image_check(T5).dense
    res = dense_image_check(unit_circle_triple(5))
    assert not res.dense and str(res.witness) == "xb on c"
    assert dense_image_check(identity_triple(5)).dense


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_dense_image_failure_persists_at_higher_levels(N):
    # the unit circle is missed at every precision level
    assert not dense_image_check(unit_circle_triple(5, 4), prec=N).dense
    assert dense_image_check(T5, prec=N).levels == list(range(1, N + 1))


# pullback -------------------------------------------------------------------------

def test_two_disks_generators_match_hand_generators(two_disks_result):
    res = two_disks_result
    found = [g.a for g in res.generators]
    hand = [GEN5["alpha"], GEN5["beta"], GEN5["gamma"]]
    assert all(subalgebras_equal(T5, found, hand, 4).values())
    assert all(degreewise_compare(T5, found, 4).values())


def test_two_disks_relations_contain_hand_relations(two_disks_result):
    res = two_disks_result
    z = res.ring
    # express alpha, beta, gamma in the found generators and push the hand relations through
    exprs = {n: express_in_generators(res, GEN5[n]) for n in ("alpha", "beta", "gamma")}
    hz = PolyRing(T5.base, ("alpha", "beta", "gamma"), OVER_R)
    for rel in two_disks_relations(hz):
        assert res.relations.contains(rel.substitute(exprs, z))


def test_two_disks_certified(two_disks_result):
    cert = two_disks_result.certificates["verify"]
    assert cert.passed and cert.levels == [1, 2, 3, 4]


def test_hand_presentation_verifies():
    cert = verify_glued(hand_result(T5), T5, 4)
    assert cert.passed and cert.levels == [1, 2, 3, 4]


def test_negative_control_drop_gamma():
    bad = hand_result(T5, ("alpha", "beta"), with_relations=False)
    with pytest.raises(VerificationFailed):
        verify_glued(bad, T5, 4)
    # the completed side alone: mod p, alpha and beta hit u and -v but not the idempotent
    with pytest.raises(VerificationFailed) as e:
        _levels_by_elimination(bad, T5, 1, 1, Certificate())
    assert e.value.args[0].endswith("1 on d1 is not hit")


def test_identity_triple():
    res = pullback_ring(identity_triple(5, 4), 4, 4)
    assert [str(g.a) for g in res.generators] == ["x"]
    assert not res.relation_list()


def test_split_triple_with_zero_B():
    base = BasePair.arithmetic(5)
    A = AffineAlgebra(base, ("x",), [], OVER_K)
    T = AffineGluingTriple(A, TruncatedAlgebra(base, 3, []), {"x": []})
    res = pullback_ring(T, 3, 3)
    # C = 0, so D = A = K[x]: generated by x and 1/p with the single relation p*z2 - 1
    assert sorted(str(g.a) for g in res.generators) == ["1/5", "x"]
    inv = next(g.name for g in res.generators if str(g.a) == "1/5")
    assert res.relations.same_ideal(IdealPresentation(res.ring, [res.ring(f"p*{inv} - 1")]))
    assert membership("1/p", T) and membership("x/p^3", T)


def test_torsion_generator_included():
    T = torsion_triple(5, 4)
    res = pullback_ring(T, 4, 4)
    torsion = [g for g in res.generators if not g.a]
    assert torsion and str(torsion[0].b[0]) == "x"


def test_classify_examples():
    assert str(classify_triple(T5)) == "affine"
    assert str(classify_triple(unit_circle_triple(5))) == "not_affine(d)"
    base = BasePair.arithmetic(5)
    A = AffineAlgebra(base, ("x", "y"), ["x*y - 1"], OVER_K)
    B = TruncatedAlgebra(base, 3, [Factor("c", ("u",))])
    # x*y - 1 maps to u*p - 1, which is not zero in B
    bad = AffineGluingTriple(A, B, {"x": ["u"], "y": ["p"]})
    c = classify_triple(bad)
    assert c.kind == "not_affine" and c.reason == "c-data"
    with pytest.raises(IncompatibleDatum):
        pullback_ring(bad)


def test_small_disks():
    # constructed fixture: the disks sit strictly inside |x| <= 1, so separating them needs pi denominators
    T = small_disks_triple(5, 4)
    # x maps to (p*u, 1 + p*v); dividing by p breaks integrality on one disk
    assert membership("x", T)
    assert not membership("x/p", T) and not membership("(x - 1)/p", T)
    res = pullback_ring(T, 6, 4)
    assert res.certificates["verify"].levels == [1, 2, 3, 4]


def test_search_exhausted_at_tiny_degree_bound():
    with pytest.raises(SearchExhausted):
        pullback_ring(T5, 1, 4)


# reconstruction -------------------------------------------------------------------

def test_reconstruct_polynomial_ring():
    base = BasePair.arithmetic(5)
    cert = reconstruct_global_sections(AffineAlgebra(base, ("x",), [], OVER_R), 4)
    assert cert.passed


def test_reconstruct_xy_minus_p_spot_checks():
    base = BasePair.arithmetic(5)
    X = AffineAlgebra(base, ("x", "y"), ["x*y - p"], OVER_R, name="X")
    cert = reconstruct_global_sections(X, 4)
    assert cert.passed
    T = cert.result.triple
    assert membership("x", T) and membership("y", T)
    assert not membership("x/p", T)
    assert T.A.reduce(T.A.ring("x*y - p")) == T.A.ring.zero


def test_reconstruct_with_torsion():
    base = BasePair.arithmetic(5)
    X = AffineAlgebra(base, ("x",), ["p*x"], OVER_R, name="X")
    cert = reconstruct_global_sections(X, 4)
    assert cert.passed
    assert any(not g.a for g in cert.result.generators)
