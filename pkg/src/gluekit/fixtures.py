"""Named fixtures and the pipelines run on them.

Each pipeline returns a :class:`Outcome` whose ``values`` are the reported
quantities.  Exact values are stored as strings; values known only modulo
pi^N are stored as :class:`Approx` so that runs at different precisions
can be compared with :func:`agree_modulo`.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction

from .completion import CompletionModel, split_holds, torsion_split
from .errors import (
    DegreeBoundInconclusive,
    GluekitError,
    IncompatibleDatum,
    PrecisionLoss,
    SearchExhausted,
    VerificationFailed,
)
from .models import (
    iwahori_membership,
    left_multiplication,
    matrix_point,
    neron_gm_triple,
    neron_iso_test,
    reduce_matrix,
    specialize_point,
)
from .modules import glue_module, triple_of_module
from .ring.base import BasePair
from .ring.ideal import AffineAlgebra
from .ring.polynomial import MOD, OVER_R, Polynomial
from .sampling import random_module, rng
from .textformat import parse_datum, parse_triple
from .triple import classify_triple, pullback_ring, reconstruct_global_sections

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"

TRIPLE_TEXT = {
    "two-disks": """
        triple two-disks {{
            base {base};
            A vars x rels ;
            B {{ factor d0: vars u; factor d1: vars v; }};
            j x -> (u | v + 1/{pi});
            domain |{pi}*x| <= 1 on d0, |{pi}*x - 1| <= 1 on d1;
        }}""",
    "unit-circle": """
        triple unit-circle {{
            base {base};
            A vars x rels ;
            B {{ factor c: vars x, xb; rels x*xb - 1; }};
            j x -> (x);
            domain |x| <= 1 on c;
        }}""",
    "unit-disk": """
        triple unit-disk {{
            base {base};
            A vars x rels ;
            B {{ factor c: vars x; }};
            j x -> (x);
            domain |x| <= 1 on c;
        }}""",
    "small-disks": """
        triple small-disks {{
            base {base};
            A vars x rels ;
            B {{ factor s0: vars u; factor s1: vars v; }};
            j x -> ({pi}*u | 1 + {pi}*v);
            domain |x/{pi}| <= 1 on s0, |(x - 1)/{pi}| <= 1 on s1;
        }}""",
}

DATUM_TEXT = {
    "free-rank-1": "datum free-rank-1 over {base} {{ F {{ gens 1; }} N {{ gens 1; }} iota [[1]]; inverse [[1]]; }}",
    "torsion-p2": "datum torsion-p2 over {base} {{ F {{ gens 0; }} N {{ gens 1; rel [{pi}^2]; }} "
                  "iota [[]]; inverse []; }}",
    "incompatible": "datum incompatible over {base} {{ F {{ gens 1; }} N {{ gens 1; }} iota [[{pi}]]; "
                    "inverse [[1]]; }}",
}

# Neron equivalence table: pairs of valuations v(omega), v(omega') and whether
# the component triples are isomorphic.
NERON_TABLE = [
    ((1, 1), True), ((1, Fraction(1, 2)), False), ((2, 2), True), ((2, 1), False),
    ((Fraction(1, 2), Fraction(1, 2)), True), ((Fraction(1, 3), Fraction(2, 6)), True),
    ((Fraction(2, 3), Fraction(3, 2)), False), ((3, 3), True), ((3, Fraction(9, 3)), True),
    ((Fraction(5, 7), Fraction(10, 14)), True), ((Fraction(5, 7), Fraction(7, 5)), False),
    ((1, 2), False), ((4, Fraction(8, 2)), True), ((Fraction(1, 4), Fraction(1, 5)), False),
    ((7, 7), True), ((Fraction(7, 2), Fraction(14, 4)), True), ((Fraction(3, 4), Fraction(4, 3)), False),
    ((10, 1), False), ((Fraction(6, 5), Fraction(12, 10)), True), ((Fraction(1, 100), Fraction(1, 99)), False),
]

RECONSTRUCTION_CASES = [
    ("Zp[x]", ("x",), ()),
    ("Zp[x,y]/(xy - p)", ("x", "y"), ("x*y - {pi}",)),
    ("Zp[x]/(p*x)", ("x",), ("{pi}*x",)),
]


def fill(text: str, base: BasePair) -> str:
    return text.format(base=base.name, pi=base.pi_name)


def triple_fixture(name: str, base: BasePair):
    return parse_triple(fill(TRIPLE_TEXT[name], base))


def datum_fixture(name: str, base: BasePair, prec: int = 8):
    d = parse_datum(fill(DATUM_TEXT[name], base))
    d.prec = prec
    return d


def torsion_algebra(base: BasePair, N0: int) -> AffineAlgebra:
    """R[x]/(pi^N0 * x); its pi-torsion is killed exactly by pi^N0."""
    rels = [f"{base.pi_name}^{N0}*x"] if N0 else []
    return AffineAlgebra(base, ("x",), rels, OVER_R, name=f"X{N0}")


def iwahori_samples(base: BasePair) -> list:
    p = base.pi
    return [
        [[1, p], [p, 1]],
        [[1 + p, p * p], [3, 2]],
        [[2, 0], [p + 1, 1]],
        [[1, 1], [0, 1]],
        [[p, 1], [1, 0]],
        [[1, p, 0], [0, 1, p], [1, 0, 1]],
    ]


# comparison of runs --------------------------------------------------------------

@dataclass(frozen=True)
class Approx:
    """Per-factor polynomials known modulo pi^N."""

    values: tuple
    N: int
    # truncated algebra the values live in; normal forms at a lower level
    # are taken with respect to its factor relations
    algebra: object = field(default=None, compare=False)

    def reduce(self, M: int) -> tuple:
        out = []
        for i, v in enumerate(self.values):
            if self.algebra is None:
                out.append(Polynomial(v.ring.with_regime(MOD(M)), v.terms))
            else:
                ideal = self.algebra.level_ideal(i, M)
                out.append(ideal.normal_form(Polynomial(ideal.ring, v.terms)))
        return tuple(out)

    def __str__(self):
        return "(" + " | ".join(str(v) for v in self.values) + f") mod pi^{self.N}"


@dataclass(frozen=True)
class Levels:
    """Levels 1..N at which a statement was certified."""

    levels: tuple

    def __str__(self):
        return ",".join(map(str, self.levels)) or "none"


def agree_modulo(high: dict, low: dict, M: int) -> list[str]:
    """Keys on which two runs disagree once the higher one is read modulo pi^M."""
    bad = []
    for key in sorted(set(high) | set(low)):
        if key not in high or key not in low:
            bad.append(key)
            continue
        a, b = high[key], low[key]
        if isinstance(a, Approx) and isinstance(b, Approx):
            ok = a.reduce(M) == b.reduce(M)
        elif isinstance(a, Levels) and isinstance(b, Levels):
            ok = tuple(n for n in a.levels if n <= M) == tuple(n for n in b.levels if n <= M)
        else:
            ok = a == b
        if not ok:
            bad.append(key)
    return bad


# pipelines -----------------------------------------------------------------------

@dataclass
class Outcome:
    name: str
    status: str
    detail: str = ""
    values: dict = field(default_factory=dict)
    seconds: float = 0.0
    result: object = None

    @property
    def passed(self) -> bool:
        return self.status == PASS


def _glue_values(res, prec: int) -> dict:
    vals = {}
    T = res.triple
    for g in res.generators:
        vals[f"generator.{g.name}.A"] = str(g.a)
        b = []
        for i, fac in enumerate(T.B.factors):
            ideal = T.B.level_ideal(i, prec)
            b.append(ideal.normal_form(Polynomial(ideal.ring, g.b[i].terms)))
        vals[f"generator.{g.name}.B"] = Approx(tuple(b), prec, T.B)
    for k, r in enumerate(res.relation_list(), 1):
        vals[f"relation.{k}"] = str(r)
    cert = res.certificates.get("verify")
    if cert is not None:
        vals["certificate.levels"] = Levels(tuple(cert.levels))
        vals["certificate.generic"] = f"{cert.generic_surjective},{cert.generic_injective}"
    return vals


def run_glue(name: str, base: BasePair, prec: int, degree_bound: int) -> Outcome:
    T = triple_fixture(name, base)
    T.B = T.B.at(prec)
    try:
        res = pullback_ring(T, degree_bound, prec)
    except SearchExhausted as exc:
        frontier = ", ".join(str(f) for f in exc.frontier)
        return Outcome(name, INCONCLUSIVE, f"SearchExhausted: {exc}; frontier {frontier}",
                       {"status": "SearchExhausted", "frontier": frontier})
    except VerificationFailed as exc:
        return Outcome(name, FAIL, f"VerificationFailed: {exc}", {"status": "VerificationFailed"})
    cert = res.certificates["verify"]
    ok = cert.passed and cert.levels == list(range(1, prec + 1))
    return Outcome(name, PASS if ok else FAIL, str(cert), _glue_values(res, prec), result=res)


def run_classify(name: str, base: BasePair, prec: int, degree_bound: int, expect: str) -> Outcome:
    T = triple_fixture(name, base)
    c = classify_triple(T, 1, degree_bound)
    vals = {"classification": str(c), "witness": str(c.witness) if c.witness is not None else ""}
    if c.kind == "inconclusive":
        return Outcome(name, INCONCLUSIVE, f"{c} {c.witness}", vals)
    ok = vals["classification"] == expect
    if expect.startswith("not_affine"):
        ok = ok and vals["witness"] == "xb on c"
    return Outcome(name, PASS if ok else FAIL, f"{c} witness {c.witness}", vals)


def run_neron(base: BasePair, prec: int, degree_bound: int) -> Outcome:
    vals, wrong = {}, []
    for k, ((v1, v2), expected) in enumerate(NERON_TABLE, 1):
        got = neron_iso_test(neron_gm_triple(v1), neron_gm_triple(v2))
        vals[f"case.{k}"] = f"({v1}, {v2}) -> {got}"
        if got != expected:
            wrong.append(k)
    status = FAIL if wrong else PASS
    return Outcome("neron-gm", status, f"{len(NERON_TABLE) - len(wrong)}/{len(NERON_TABLE)} cases", vals)


def run_iwahori(base: BasePair, prec: int, degree_bound: int) -> Outcome:
    vals, problems = {}, []
    samples = iwahori_samples(base)
    for k, m in enumerate(samples, 1):
        n = len(m)
        red = reduce_matrix(base, m)
        member = iwahori_membership(m, base)
        vals[f"sample.{k}.reduction"] = "[" + "; ".join(
            " ".join(base.format_coeff(c) for c in row) for row in red) + "]"
        vals[f"sample.{k}.iwahori"] = str(member)
        if member and any(red[i][j] for i in range(n) for j in range(n) if i < j):
            problems.append(f"sample {k}: Iwahori matrix with nonzero reduction above the diagonal")
        # functoriality of reduction under left multiplication
        for g in samples:
            if len(g) != n:
                continue
            f = left_multiplication(base, g)
            pt = matrix_point(base, m)
            if specialize_point(f(pt)) != f.reduced(specialize_point(pt)):
                problems.append(f"sample {k}: reduction does not commute with left multiplication")
    return Outcome("iwahori-demo", FAIL if problems else PASS,
                   problems[0] if problems else f"{len(samples)} samples", vals)


def run_torsion_split(N0: int, base: BasePair, prec: int, degree_bound: int) -> Outcome:
    name = f"torsion-split-{N0}"
    model = CompletionModel(torsion_algebra(base, N0))
    level = 2 * N0 + 4
    split = torsion_split(model, level)
    vals = {"N0": split.N0, "levels": Levels(tuple(split.levels_checked)), "exact": split.exact_check}
    ok = split.N0 == N0 and split_holds(split, level)
    return Outcome(name, PASS if ok else FAIL, f"N0={split.N0} levels {Levels(tuple(split.levels_checked))}", vals)


def run_reconstruction(case: int, base: BasePair, prec: int, degree_bound: int) -> Outcome:
    label, names, rels = RECONSTRUCTION_CASES[case]
    X = AffineAlgebra(base, names, [fill(r, base) for r in rels], OVER_R, name="X")
    name = f"reconstruct {label}"
    try:
        cert = reconstruct_global_sections(X, prec, degree_bound)
    except (SearchExhausted, DegreeBoundInconclusive) as exc:
        return Outcome(name, INCONCLUSIVE, str(exc))
    except VerificationFailed as exc:
        return Outcome(name, FAIL, str(exc))
    vals = _glue_values(cert.result, prec)
    for g, pre in cert.generators_from_X.items():
        vals[f"from_X.{g}"] = str(pre)
    ok = cert.passed and cert.verify.levels == list(range(1, prec + 1))
    return Outcome(name, PASS if ok else FAIL, str(cert.verify), vals)


def run_modules(base: BasePair, prec: int, degree_bound: int, count: int = 20) -> Outcome:
    r = rng(17)
    vals, failed = {}, []
    for k in range(count):
        M = random_module(r, base, k % 2)
        try:
            g = glue_module(triple_of_module(M, prec))
            ok = g.completed.passed and g.generic.passed
        except (IncompatibleDatum, PrecisionLoss) as exc:
            ok = False
            vals[f"module.{k}.error"] = str(exc)
        vals[f"module.{k}"] = f"{M} -> {ok}"
        if not ok:
            failed.append(k)
    return Outcome("module-round-trip", FAIL if failed else PASS,
                   f"{count - len(failed)}/{count} certified", vals)


def catalog(base: BasePair) -> dict:
    """Fixture name -> pipeline(prec, degree_bound)."""
    cat = {
        "two-disks": lambda N, D: run_glue("two-disks", base, N, D),
        "small-disks": lambda N, D: run_glue("small-disks", base, N, D),
        "unit-circle": lambda N, D: run_classify("unit-circle", base, N, D, "not_affine(d)"),
        "unit-disk": lambda N, D: run_classify("unit-disk", base, N, D, "affine"),
        "neron-gm": lambda N, D: run_neron(base, N, D),
        "module-round-trip": lambda N, D: run_modules(base, N, D),
    }
    if base.prime:
        cat["iwahori-demo"] = lambda N, D: run_iwahori(base, N, D)
    for N0 in (0, 1, 2):
        cat[f"torsion-split-{N0}"] = lambda N, D, N0=N0: run_torsion_split(N0, base, N, D)
    for i, (label, _, _) in enumerate(RECONSTRUCTION_CASES):
        cat[f"reconstruct {label}"] = lambda N, D, i=i: run_reconstruction(i, base, N, D)
    return dict(sorted(cat.items()))


def run_catalog(base: BasePair, prec: int, degree_bound: int, names=None) -> list[Outcome]:
    out = []
    for name, fn in catalog(base).items():
        if names is not None and name not in names:
            continue
        t = time.perf_counter()
        try:
            o = fn(prec, degree_bound)
        except GluekitError as exc:
            o = Outcome(name, FAIL, f"{type(exc).__name__}: {exc}")
        o.seconds = time.perf_counter() - t
        out.append(o)
    return out
