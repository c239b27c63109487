"""Command line front end.

Usage: ``gluekit COMMAND INPUT [options]`` where INPUT is a file holding
text blocks (see :mod:`gluekit.textformat`) or a fixture name.

Exit codes: 0 success, 2 certified negative answer (including an
incompatible datum), 3 inconclusive, 64 parse error, 1 anything else.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass

from . import fixtures
from .errors import (
    DegreeBoundInconclusive,
    GluekitError,
    IncompatibleDatum,
    NotIntegral,
    ParseError,
    PrecisionLoss,
    SearchExhausted,
    VerificationFailed,
)
from .models import IntegralPoint, specialize_point
from .modules import format_presentation, glue_module, prune, triple_of_module
from .report import Report
from .ring.base import BasePair
from .ring.ideal import IdealPresentation
from .ring.polynomial import OVER_K, OVER_R, PolyRing
from .sampling import seed_from_env
from .textformat import parse_document
from .triple import classify_triple, dense_image_check, pullback_ring

EXIT_OK, EXIT_ERROR, EXIT_NEGATIVE, EXIT_INCONCLUSIVE, EXIT_PARSE = 0, 1, 2, 3, 64


@dataclass
class RunConfig:
    prec: int = 8
    degree_bound: int = 6
    profile: BasePair = None
    output: str = "text"

    def __post_init__(self):
        if self.prec < 1:
            raise ValueError("--prec must be >= 1")
        if self.degree_bound < 1:
            raise ValueError("--degree-bound must be >= 1")
        if self.profile is None:
            self.profile = BasePair.arithmetic(5)


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise GluekitError(f"cannot read {path}: {exc.strerror}") from None


def _load_triple(source: str, cfg: RunConfig):
    if source in fixtures.TRIPLE_TEXT:
        T = fixtures.triple_fixture(source, cfg.profile)
    else:
        T = parse_document(_read(source), cfg.profile).only("triple")
    T.B = T.B.at(cfg.prec)
    return T


# commands ------------------------------------------------------------------------

def cmd_glue_ring(source: str, cfg: RunConfig) -> tuple[int, Report]:
    T = _load_triple(source, cfg)
    rep = Report("glue-ring")
    rep.add("triple", T.name)
    rep.add("base", T.base.name)
    rep.add("prec", cfg.prec)
    rep.add("degree_bound", cfg.degree_bound)
    try:
        res = pullback_ring(T, cfg.degree_bound, cfg.prec)
    except SearchExhausted as exc:
        c = classify_triple(T, 1, cfg.degree_bound)
        if c.kind == "not_affine":
            rep.add("status", "not_affine")
            rep.add("reason", "dense-image" if c.reason == "d" else c.reason)
            rep.add("witness", c.witness)
            return EXIT_NEGATIVE, rep
        rep.add("status", "inconclusive")
        rep.add("reason", f"SearchExhausted: {exc}")
        rep.add("frontier", ", ".join(str(f) for f in exc.frontier))
        return EXIT_INCONCLUSIVE, rep
    except VerificationFailed as exc:
        rep.add("status", "verification-failed")
        rep.add("reason", str(exc))
        rep.add("witness", exc.witness)
        return EXIT_ERROR, rep
    rep.add("status", "glued")
    for g in res.generators:
        rep.add(f"generator.{g.name}", g.a)
        rep.add(f"generator.{g.name}.on_B", "(" + " | ".join(str(b) for b in g.b) + ")")
        rep.add(f"generator.{g.name}.origin", g.origin)
    rep.add_list("relation", res.relation_list())
    cert = res.certificates["verify"]
    rep.add("certificate.generic_surjective", cert.generic_surjective)
    rep.add("certificate.generic_injective", cert.generic_injective)
    rep.add("certificate.torsion_free", cert.torsion_free)
    for v, e in sorted(cert.expressions.items()):
        rep.add(f"certificate.expression.{v}", e)
    for N in cert.levels:
        rep.add(f"certificate.level.{N}", "+".join(cert.methods.get(N, [])))
    ok = cert.passed and cert.levels == list(range(1, cfg.prec + 1))
    rep.add("certified", ok)
    return (EXIT_OK if ok else EXIT_ERROR), rep


def cmd_check_dense(source: str, cfg: RunConfig) -> tuple[int, Report]:
    T = _load_triple(source, cfg)
    rep = Report("check-dense")
    rep.add("triple", T.name)
    try:
        res = dense_image_check(T, cfg.prec, cfg.degree_bound)
    except DegreeBoundInconclusive as exc:
        rep.add("dense", "inconclusive")
        rep.add("reason", str(exc))
        return EXIT_INCONCLUSIVE, rep
    rep.add("dense", res.dense)
    rep.add("degree", res.degree)
    if not res.dense:
        rep.add("witness", res.witness)
        return EXIT_NEGATIVE, rep
    for t, lift in sorted(res.lifts.items(), key=lambda kv: str(kv[0])):
        rep.add(f"lift.{t}", lift)
    return EXIT_OK, rep


def cmd_classify(source: str, cfg: RunConfig) -> tuple[int, Report]:
    rep = Report("classify")
    if source == "neron-gm":
        o = fixtures.run_neron(cfg.profile, cfg.prec, cfg.degree_bound)
        rep.add("fixture", "neron-gm")
        rep.add("invariant", "valuation of the gluing parameter")
        for k, v in o.values.items():
            rep.add(k, v)
        rep.add("status", o.status)
        return (EXIT_OK if o.passed else EXIT_ERROR), rep
    T = _load_triple(source, cfg)
    c = classify_triple(T, 1, cfg.degree_bound)
    rep.add("triple", T.name)
    rep.add("classification", c)
    if c.witness is not None:
        rep.add("witness", c.witness)
    if c.kind == "affine":
        return EXIT_OK, rep
    return (EXIT_NEGATIVE if c.kind == "not_affine" else EXIT_INCONCLUSIVE), rep


def cmd_glue_module(source: str, cfg: RunConfig, round_trip: bool = False) -> tuple[int, Report]:
    rep = Report("glue-module")
    original = None
    if source in fixtures.DATUM_TEXT:
        d = fixtures.datum_fixture(source, cfg.profile, cfg.prec)
    else:
        doc = parse_document(_read(source), cfg.profile)
        if doc.data:
            d = doc.last("datum")
            d.prec = cfg.prec
        else:
            original = doc.only("module")
            d = triple_of_module(original, cfg.prec)
    try:
        g = glue_module(d)
    except IncompatibleDatum as exc:
        rep.add("status", "IncompatibleDatum")
        rep.add("reason", str(exc))
        return EXIT_NEGATIVE, rep
    except PrecisionLoss as exc:
        rep.add("status", "PrecisionLoss")
        rep.add("reason", str(exc))
        return EXIT_INCONCLUSIVE, rep
    small, pcert = prune(g.module)
    rep.add("status", "glued")
    rep.add("presentation", format_presentation(small))
    rep.add("raw_presentation", format_presentation(g.module))
    for k, (o, (f, n)) in enumerate(zip(g.origins, g.pairs), 1):
        rep.add(f"generator.{k}", f"{o[0]} F={[str(e) for e in f]} N={[str(e) for e in n]}")
    rep.add("certificate.generic", g.generic.passed)
    rep.add("certificate.completed", g.completed.passed)
    rep.add("certificate.pruning", pcert.passed)
    ok = g.generic.passed and g.completed.passed and pcert.passed
    if round_trip:
        if original is None:
            rep.add("round_trip", "not applicable (input is a datum)")
        else:
            # the completed side of the datum is the input module itself
            rep.add("round_trip", g.completed.passed)
    return (EXIT_OK if ok else EXIT_ERROR), rep


def _parse_point(text: str, base: BasePair) -> tuple:
    out = []
    for part in text.split(","):
        ring = PolyRing(base, (), OVER_K)
        c = ring(part)
        out.append(c.constant_coefficient() if c else base.zero)
    return tuple(out)


def cmd_specialize(source: str, cfg: RunConfig, point: str | None = None) -> tuple[int, Report]:
    rep = Report("specialize")
    if source == "iwahori-demo":
        if not cfg.profile.prime:
            raise GluekitError("iwahori-demo needs an arithmetic profile")
        o = fixtures.run_iwahori(cfg.profile, cfg.prec, cfg.degree_bound)
        rep.add("fixture", "iwahori-demo")
        for k, v in o.values.items():
            rep.add(k, v)
        rep.add("functorial", o.passed)
        return (EXIT_OK if o.passed else EXIT_ERROR), rep
    X = parse_document(_read(source), cfg.profile).only("ring")
    if point is None:
        raise GluekitError("specialize needs --point for a ring input")
    try:
        pt = IntegralPoint(_parse_point(point, X.base), X)
    except NotIntegral as exc:
        rep.add("status", "not integral")
        rep.add("reason", str(exc))
        return EXIT_NEGATIVE, rep
    except ValueError as exc:
        raise GluekitError(str(exc)) from None
    red = specialize_point(pt)
    rep.add("ring", X.name)
    rep.add("point", ", ".join(X.base.format_coeff(c) for c in pt.coordinates))
    rep.add("reduction", ", ".join(X.base.format_coeff(c) for c in red))
    return EXIT_OK, rep


def cmd_groebner(polys: list[str], cfg: RunConfig, variables: str | None, order: str,
                 over: str) -> tuple[int, Report]:
    rep = Report("groebner")
    if len(polys) == 1 and os.path.exists(polys[0]):
        X = parse_document(_read(polys[0]), cfg.profile).only("ring")
        ring = X.ring if over == "R" else X.ring.with_regime(OVER_K)
        gens = [g.change_ring(ring) for g in X.relations.generators]
    else:
        names = tuple(v.strip() for v in (variables or "").split(",") if v.strip())
        ring = PolyRing(cfg.profile, names, OVER_R if over == "R" else OVER_K)
        gens = [ring(p) for p in polys]
    I = IdealPresentation(ring, gens, order)
    rep.add("base", ring.base.name)
    rep.add("coefficients", "R" if over == "R" else "K")
    rep.add("order", order)
    rep.add_list("basis", I.basis())
    return EXIT_OK, rep


def cmd_verify_examples(cfg: RunConfig, names=None) -> tuple[int, Report]:
    rep = Report("verify-examples")
    rep.add("base", cfg.profile.name)
    rep.add("prec", cfg.prec)
    rep.add("degree_bound", cfg.degree_bound)
    rep.add("seed", seed_from_env())
    outs = fixtures.run_catalog(cfg.profile, cfg.prec, cfg.degree_bound, names)
    width = max((len(o.name) for o in outs), default=7)
    rep.note("")
    rep.note(f"{'fixture'.ljust(width)}  {'result'.ljust(12)}  {'seconds':>8}  detail")
    for o in outs:
        rep.add(f"fixture.{o.name}", o.status)
        rep.add(f"fixture.{o.name}.detail", o.detail)
        rep.note(f"{o.name.ljust(width)}  {o.status.ljust(12)}  {o.seconds:8.2f}  {o.detail}")
    failed = [o for o in outs if o.status == fixtures.FAIL]
    unsure = [o for o in outs if o.status == fixtures.INCONCLUSIVE]
    rep.add("failed", len(failed))
    rep.add("inconclusive", len(unsure))
    if failed:
        return EXIT_ERROR, rep
    return (EXIT_INCONCLUSIVE if unsure else EXIT_OK), rep


# argument handling -----------------------------------------------------------------

def _profile(text: str) -> BasePair:
    try:
        return BasePair.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prec", type=int, default=8, help="pi-adic precision N (default 8)")
    common.add_argument("--degree-bound", type=int, default=6, help="degree bound of searches (default 6)")
    common.add_argument("--profile", type=_profile, default=None,
                        help="base pair when the input does not name one: Zp(p) or Qt (default Zp(5))")
    common.add_argument("--format", choices=("text", "report"), default="text", dest="output")

    ap = argparse.ArgumentParser(prog="gluekit", description="Affine gluing of generic fibres and formal completions.")
    sub = ap.add_subparsers(dest="command", required=True)
    inp = "input file or fixture name"
    p = sub.add_parser("glue-ring", parents=[common], help="generators, relations and certificate of a glued ring")
    p.add_argument("input", help=inp + " (two-disks, unit-circle, unit-disk, small-disks)")
    p = sub.add_parser("glue-module", parents=[common], help="glue a module datum, or round-trip a module")
    p.add_argument("input", help=inp + " (free-rank-1, torsion-p2, incompatible)")
    p.add_argument("--round-trip", action="store_true", help="certify glue(triple(M)) ~ M for a module input")
    p = sub.add_parser("check-dense", parents=[common], help="dense image condition of a triple")
    p.add_argument("input", help=inp)
    p = sub.add_parser("classify", parents=[common], help="affine / not affine / inconclusive")
    p.add_argument("input", help=inp + " (also neron-gm)")
    p = sub.add_parser("specialize", parents=[common], help="reduce an integral point modulo pi")
    p.add_argument("input", help="ring file or iwahori-demo")
    p.add_argument("--point", help="comma separated coordinates")
    sub.add_parser("verify-examples", parents=[common], help="run the fixture catalog")
    p = sub.add_parser("groebner", parents=[common], help="reduced Groebner basis of an ideal")
    p.add_argument("polys", nargs="+", help="polynomials, or a single ring file")
    p.add_argument("--vars", dest="variables", help="comma separated variables")
    p.add_argument("--order", default="deglex", choices=("deglex", "lex"))
    p.add_argument("--over", default="R", choices=("R", "K"), help="coefficients in R or in R[1/pi]")
    return ap


def run(argv=None) -> tuple[int, Report | None, str]:
    """Parse ``argv`` and run; returns (exit code, report, rendered output)."""
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(args.prec, args.degree_bound, args.profile, args.output)
        seed_from_env()
    except ValueError as exc:
        return EXIT_ERROR, None, f"error: {exc}\n"
    try:
        if args.command == "glue-ring":
            code, rep = cmd_glue_ring(args.input, cfg)
        elif args.command == "glue-module":
            code, rep = cmd_glue_module(args.input, cfg, args.round_trip)
        elif args.command == "check-dense":
            code, rep = cmd_check_dense(args.input, cfg)
        elif args.command == "classify":
            code, rep = cmd_classify(args.input, cfg)
        elif args.command == "specialize":
            code, rep = cmd_specialize(args.input, cfg, args.point)
        elif args.command == "groebner":
            code, rep = cmd_groebner(args.polys, cfg, args.variables, args.order, args.over)
        else:
            code, rep = cmd_verify_examples(cfg)
    except ParseError as exc:
        return EXIT_PARSE, None, f"ParseError: {exc}\n"
    except IncompatibleDatum as exc:
        return EXIT_NEGATIVE, None, f"IncompatibleDatum: {exc}\n"
    except GluekitError as exc:
        return EXIT_ERROR, None, f"{type(exc).__name__}: {exc}\n"
    return code, rep, rep.render(cfg.output)


def main(argv=None) -> int:
    code, rep, text = run(argv)
    stream = sys.stdout if rep is not None else sys.stderr
    stream.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
