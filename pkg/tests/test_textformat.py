import pytest

from gluekit.errors import ParseError
from gluekit.fixtures import TRIPLE_TEXT, fill, triple_fixture
from gluekit.ring.base import BasePair
from gluekit.textformat import format_triple, parse_algebra, parse_datum, parse_document, parse_module, parse_triple
from gluekit.triple import membership

Z5 = BasePair.arithmetic(5)

TWO_DISKS = ("triple T { base Zp(5); A vars x rels ; B { factor d0: vars u; factor d1: vars v; }; "
             "j x -> (u | v + 1/p); domain |p*x| <= 1 on d0, |p*x - 1| <= 1 on d1; }")


def test_algebra_block():
    B = parse_algebra("algebra B over Zp(5) prec 8 { factor disk0: vars u; rels ; factor disk1: vars v; rels ; }")
    assert B.N == 8 and [f.name for f in B.factors] == ["disk0", "disk1"]
    assert B.base == Z5


def test_triple_block():
    T = parse_triple(TWO_DISKS)
    assert T.nfactors == 2 and T.validate() == []
    assert membership("p*x", T) and not membership("x", T)
    assert [str(c) for c in T.subdomain] == ["|5*x| <= 1 on d0", "|5*x - 1| <= 1 on d1"]


@pytest.mark.parametrize("name", sorted(TRIPLE_TEXT))
@pytest.mark.parametrize("base", [Z5, BasePair.arithmetic(2), BasePair.geometric()], ids=str)
def test_triple_round_trip(name, base):
    T = triple_fixture(name, base)
    again = parse_triple(format_triple(T))
    assert format_triple(again) == format_triple(T)
    for f in ["x", "p*x", "x^2 - 1"]:
        f = f.replace("p", base.pi_name)
        assert membership(f, again) == membership(f, T)


def test_module_block():
    doc = parse_document("ring A over Zp(5) { vars x; } module M over A { gens 2; rel [x, -1]; rel [0, p^2]; }")
    M = doc.only("module")
    assert M.n_gens == 2 and len(M.relations) == 2
    assert M.contains((M.ring.ring("x"), M.ring.ring("-1")))


def test_module_over_base_directly():
    M = parse_module("module M over Zp(7) { gens 1; rel [p^2]; }")
    assert M.base == BasePair.arithmetic(7)


def test_datum_block():
    d = parse_datum("datum D over Zp(5) { F { gens 1; } N { gens 1; rel [p^2]; } iota [[1]]; inverse [[1]]; prec 6; }")
    assert d.prec == 6 and d.F.n_gens == 1
    # N has torsion while F does not see it
    assert d.check()


def test_hyphenated_names():
    T = parse_triple(fill(TRIPLE_TEXT["two-disks"], Z5))
    assert T.name == "two-disks"


@pytest.mark.parametrize("text, line, col", [
    ("triple T {\n  base Zp(5);\n  A vars x rels ;\n  B { factor d0 vars u; };\n}", 4, 17),
    ("triple T { base Zp(6); }", 1, 17),
    ("module M over Zp(5) { gens 2; rel [1]; }", 1, 31),
    ("triple T {\n base Zp(5);\n A vars x rels ;\n B { factor d0: vars u; };\n j y -> (u);\n}", 5, 4),
])
def test_parse_error_positions(text, line, col):
    with pytest.raises(ParseError) as e:
        parse_document(text)
    assert (e.value.line, e.value.col) == (line, col), str(e.value)


def test_parse_error_unknown_ring():
    with pytest.raises(ParseError) as e:
        parse_document("module M over Nowhere { gens 1; }")
    assert "unknown ring" in str(e.value)


def test_document_only_requires_single_block():
    doc = parse_document(TWO_DISKS + "\n" + TWO_DISKS.replace("triple T", "triple U"))
    with pytest.raises(ParseError):
        doc.only("triple")
    assert doc.last("triple").name == "U"
