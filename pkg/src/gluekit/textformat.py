"""Structured text blocks read by the command line tool.

A file holds any number of blocks; later blocks may refer to earlier ones
by name.  Polynomials use the literal syntax of :mod:`gluekit.ring.parse`,
and ``#`` starts a comment.  The blocks are::

    ring A over Zp(5) { vars x, y; rels x*y - p; }

    algebra B over Zp(5) prec 8 { factor disk0: vars u; rels ; factor disk1: vars v; rels ; }

    triple T {
        base Zp(5);
        A vars x rels ;
        B { factor d0: vars u; factor d1: vars v; };
        j x -> (u | v + 1/p);
        domain |p*x| <= 1 on d0, |p*x - 1| <= 1 on d1;
    }

    module M over A { gens 2; rel [x, -1]; rel [0, p^2]; }

    datum D over A {
        F { gens 1; }
        N { gens 1; rel [p^2]; }
        iota [[1]];
        inverse [[1]];
    }

In ``module`` and ``datum`` blocks the ring may also be a base name such
as ``Zp(5)``, meaning the base ring itself.  ``rels`` lists are comma
separated and may be empty.  A ``j`` clause gives one image per factor of
B, separated by ``|``; several generators can be listed in one clause
separated by commas, or in repeated clauses.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ParseError
from .modules import ModuleGluingDatum, ModulePresentation
from .precision import Factor, TruncatedAlgebra
from .ring.base import BasePair
from .ring.ideal import AffineAlgebra
from .ring.parse import Token, TokenStream, parse_poly_tokens, tokenize
from .ring.polynomial import OVER_K, OVER_R, PolyRing
from .triple import AffineGluingTriple, DomainCondition

_KEYWORDS = ("ring", "algebra", "triple", "module", "datum")


@dataclass
class Document:
    """Everything declared in one input, in order of appearance."""

    rings: dict = field(default_factory=dict)
    algebras: dict = field(default_factory=dict)
    triples: dict = field(default_factory=dict)
    modules: dict = field(default_factory=dict)
    data: dict = field(default_factory=dict)
    order: list = field(default_factory=list)

    def last(self, kind: str):
        for k, name in reversed(self.order):
            if k == kind:
                return getattr(self, _STORE[kind])[name]
        raise KeyError(kind)

    def only(self, kind: str):
        """The single block of a kind; ParseError when there is none or several."""
        names = [name for k, name in self.order if k == kind]
        if not names:
            raise ParseError(f"input declares no {kind} block", 1, 1)
        if len(names) > 1:
            raise ParseError(f"input declares {len(names)} {kind} blocks ({', '.join(names)}); expected one", 1, 1)
        return getattr(self, _STORE[kind])[names[0]]


_STORE = {"ring": "rings", "algebra": "algebras", "triple": "triples", "module": "modules", "datum": "data"}


def parse_document(text: str, default_base: BasePair | None = None) -> Document:
    ts = TokenStream(tokenize(text))
    doc = Document()
    if ts.peek.kind == "eof":
        raise ParseError("empty input", 1, 1)
    while ts.peek.kind != "eof":
        t = ts.peek
        if t.kind != "name" or t.text not in _KEYWORDS:
            ts.error(f"expected one of {', '.join(_KEYWORDS)}, found {t.text!r}")
        ts.next()
        name = _block_name(ts, f"a {t.text} name")
        obj = _BLOCKS[t.text](ts, doc, name, default_base)
        store = getattr(doc, _STORE[t.text])
        if name in store:
            raise ParseError(f"{t.text} {name!r} declared twice", t.line, t.col)
        store[name] = obj
        doc.order.append((t.text, name))
    return doc


def parse_triple(text: str, default_base: BasePair | None = None) -> AffineGluingTriple:
    return parse_document(text, default_base).only("triple")


def parse_module(text: str, default_base: BasePair | None = None) -> ModulePresentation:
    return parse_document(text, default_base).only("module")


def parse_datum(text: str, default_base: BasePair | None = None) -> ModuleGluingDatum:
    return parse_document(text, default_base).only("datum")


def parse_algebra(text: str, default_base: BasePair | None = None) -> TruncatedAlgebra:
    return parse_document(text, default_base).only("algebra")


# pieces --------------------------------------------------------------------------

def _name(ts: TokenStream, what: str) -> str:
    return ts.expect_kind("name", what).text


def _block_name(ts: TokenStream, what: str) -> str:
    """Block names may contain hyphens: ``two-disks``."""
    parts = [_name(ts, what)]
    while ts.at("-") and ts.tokens[ts.i + 1].kind in ("name", "num"):
        ts.next()
        parts.append(ts.next().text)
    return "-".join(parts)


def _base(ts: TokenStream) -> BasePair:
    t = ts.expect_kind("name", "a base (Zp(p) or Qt)")
    text = t.text
    if ts.at("("):
        ts.next()
        num = ts.expect_kind("num", "a prime")
        ts.expect(")")
        text = f"{text}({num.text})"
    try:
        return BasePair.parse(text)
    except ValueError as exc:
        raise ParseError(str(exc), t.line, t.col) from None


def _name_list(ts: TokenStream, what: str) -> tuple:
    names = []
    if ts.peek.kind != "name" or ts.peek.text == "rels":
        return ()
    names.append(_name(ts, what))
    while ts.accept(","):
        names.append(_name(ts, what))
    return tuple(names)


def _poly_list(ts: TokenStream, ring: PolyRing, stop=(";",)) -> list:
    out = []
    if any(ts.at(s) for s in stop):
        return out
    out.append(parse_poly_tokens(ts, ring))
    while ts.accept(","):
        out.append(parse_poly_tokens(ts, ring))
    return out


def _check_vars(tok: Token, names) -> None:
    if len(set(names)) != len(names):
        raise ParseError(f"repeated variable in {', '.join(names)}", tok.line, tok.col)


def _vars_rels(ts: TokenStream, base: BasePair, regime, sep_rels: bool):
    """``vars a, b; rels f, g;`` (``sep_rels``) or ``vars a, b rels f, g``."""
    tok = ts.expect("vars")
    names = _name_list(ts, "a variable")
    _check_vars(tok, names)
    ring = PolyRing(base, names, regime)
    if sep_rels:
        ts.expect(";")
        if not ts.accept("rels"):
            return names, []
    else:
        ts.expect("rels")
    rels = _poly_list(ts, ring)
    if sep_rels:
        ts.expect(";")
    return names, rels


def _factor_list(ts: TokenStream, base: BasePair) -> list[Factor]:
    facs = []
    while ts.accept("factor"):
        name = _name(ts, "a factor name")
        ts.expect(":")
        names, rels = _vars_rels(ts, base, OVER_R, sep_rels=True)
        facs.append(Factor(name, names, tuple(rels)))
    if not facs:
        ts.error("expected at least one factor")
    return facs


# blocks -------------------------------------------------------------------------

def _ring_block(ts: TokenStream, doc: Document, name: str, default_base) -> AffineAlgebra:
    ts.expect("over")
    base = _base(ts)
    ts.expect("{")
    names, rels = _vars_rels(ts, base, OVER_R, sep_rels=True)
    ts.expect("}")
    return AffineAlgebra(base, names, rels, OVER_R, name=name)


def _algebra_block(ts: TokenStream, doc: Document, name: str, default_base) -> TruncatedAlgebra:
    ts.expect("over")
    base = _base(ts)
    ts.expect("prec")
    N = int(ts.expect_kind("num", "a precision").text)
    ts.expect("{")
    facs = _factor_list(ts, base)
    ts.expect("}")
    return TruncatedAlgebra(base, N, facs, name=name)


def _triple_block(ts: TokenStream, doc: Document, name: str, default_base) -> AffineGluingTriple:
    start = ts.peek
    ts.expect("{")
    base = default_base
    if ts.accept("base"):
        base = _base(ts)
        ts.expect(";")
    if base is None:
        ts.error("triple needs a 'base' clause")
    ts.expect("A")
    avars, arels = _vars_rels(ts, base, OVER_K, sep_rels=False)
    ts.expect(";")
    A = AffineAlgebra(base, avars, arels, OVER_K, name="A")
    ts.expect("B")
    ts.expect("{")
    facs = _factor_list(ts, base)
    ts.expect("}")
    ts.expect(";")
    B = TruncatedAlgebra(base, 1, facs, name="B")
    kr = [f.ring(base, OVER_K) for f in B.factors]
    jstar = {}
    while ts.at("j"):
        ts.next()
        while True:
            vt = ts.expect_kind("name", "a generator of A")
            if vt.text not in avars:
                raise ParseError(f"{vt.text!r} is not a variable of A", vt.line, vt.col)
            if vt.text in jstar:
                raise ParseError(f"image of {vt.text!r} given twice", vt.line, vt.col)
            ts.expect("->")
            ts.expect("(")
            imgs = [parse_poly_tokens(ts, kr[0])]
            while ts.accept("|"):
                k = len(imgs)
                if k >= len(kr):
                    ts.error(f"B has only {len(kr)} factors")
                imgs.append(parse_poly_tokens(ts, kr[k]))
            if len(imgs) != len(kr):
                ts.error(f"expected {len(kr)} factor images, found {len(imgs)}")
            ts.expect(")")
            jstar[vt.text] = imgs
            if not ts.accept(","):
                break
        ts.expect(";")
    missing = [v for v in avars if v not in jstar]
    if missing:
        ts.error(f"no 'j' image for {', '.join(missing)}")
    conds = []
    if ts.accept("domain"):
        fac_names = [f.name for f in B.factors]
        while True:
            ts.expect("|")
            expr = parse_poly_tokens(ts, A.ring)
            ts.expect("|")
            ts.expect("<=")
            one = ts.expect_kind("num", "1")
            if one.text != "1":
                raise ParseError("domain conditions have the form |f| <= 1", one.line, one.col)
            ts.expect("on")
            ft = ts.expect_kind("name", "a factor name")
            if ft.text not in fac_names:
                raise ParseError(f"unknown factor {ft.text!r}", ft.line, ft.col)
            conds.append(DomainCondition(expr, ft.text))
            if not ts.accept(","):
                break
        ts.expect(";")
    ts.expect("}")
    try:
        return AffineGluingTriple(A, B, jstar, conds, name=name)
    except ValueError as exc:
        raise ParseError(str(exc), start.line, start.col) from None


def _over(ts: TokenStream, doc: Document) -> AffineAlgebra:
    ts.expect("over")
    t = ts.peek
    if t.kind == "name" and t.text in doc.rings:
        ts.next()
        return doc.rings[t.text]
    try:
        base = _base(ts)
    except ParseError:
        raise ParseError(f"unknown ring {t.text!r}", t.line, t.col) from None
    return AffineAlgebra(base, (), (), OVER_R, name=base.name)


def _module_body(ts: TokenStream, ring: AffineAlgebra, name: str) -> ModulePresentation:
    ts.expect("{")
    ts.expect("gens")
    n = int(ts.expect_kind("num", "a generator count").text)
    ts.expect(";")
    rels = []
    while ts.at("rel"):
        tok = ts.next()
        ts.expect("[")
        col = _poly_list(ts, ring.ring, stop=("]",))
        ts.expect("]")
        ts.expect(";")
        if len(col) != n:
            raise ParseError(f"relation has {len(col)} entries, expected {n}", tok.line, tok.col)
        rels.append(col)
    ts.expect("}")
    return ModulePresentation(ring, n, rels, name=name)


def _module_block(ts: TokenStream, doc: Document, name: str, default_base) -> ModulePresentation:
    ring = _over(ts, doc)
    return _module_body(ts, ring, name)


def _matrix(ts: TokenStream, ring: PolyRing) -> tuple[Token, list]:
    tok = ts.expect("[")
    rows = []
    if not ts.at("]"):
        while True:
            ts.expect("[")
            rows.append(_poly_list(ts, ring, stop=("]",)))
            ts.expect("]")
            if not ts.accept(","):
                break
    ts.expect("]")
    return tok, rows


def _datum_block(ts: TokenStream, doc: Document, name: str, default_base) -> ModuleGluingDatum:
    ring = _over(ts, doc)
    ts.expect("{")
    ts.expect("F")
    F = _module_body(ts, ring.localize(), "F")
    ts.expect("N")
    N = _module_body(ts, ring, "N")
    kring = ring.ring.with_regime(OVER_K)
    ts.expect("iota")
    tok, iota = _matrix(ts, kring)
    ts.expect(";")
    inverse = None
    if ts.accept("inverse"):
        _, inverse = _matrix(ts, kring)
        ts.expect(";")
    prec = 8
    if ts.accept("prec"):
        prec = int(ts.expect_kind("num", "a precision").text)
        ts.expect(";")
    ts.expect("}")
    if len(iota) != N.n_gens or any(len(r) != F.n_gens for r in iota):
        raise ParseError(f"iota must be a {N.n_gens} x {F.n_gens} matrix", tok.line, tok.col)
    return ModuleGluingDatum(F, N, iota, inverse, prec)


_BLOCKS = {
    "ring": _ring_block,
    "algebra": _algebra_block,
    "triple": _triple_block,
    "module": _module_block,
    "datum": _datum_block,
}


# writing ----------------------------------------------------------------------------

def format_triple(T: AffineGluingTriple) -> str:
    """A triple block that parses back to ``T``."""
    facs = []
    for f in T.B.factors:
        rels = ", ".join(str(r) for r in f.relations)
        facs.append(f"factor {f.name}: vars {', '.join(f.variables)}; rels {rels};")
    arels = ", ".join(str(r) for r in T.A.relations.generators)
    lines = [f"triple {T.name} {{",
             f"    base {T.base.name};",
             f"    A vars {', '.join(T.A.variables)} rels {arels};",
             f"    B {{ {' '.join(facs)} }};"]
    for v, imgs in T.jstar.items():
        lines.append(f"    j {v} -> ({' | '.join(str(i) for i in imgs)});")
    if T.subdomain:
        lines.append("    domain " + ", ".join(str(c) for c in T.subdomain) + ";")
    lines.append("}")
    return "\n".join(lines) + "\n"
