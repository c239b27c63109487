"""Truncated completions and pi-power torsion analysis."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import CapExceeded, RegimeMismatch
from .precision import Factor, TruncatedAlgebra
from .ring.ideal import AffineAlgebra, IdealPresentation, intersect, pi_saturation
from .ring.polynomial import OVER_R


def complete(algebra: AffineAlgebra, N: int) -> TruncatedAlgebra:
    """The quotient of the presentation modulo pi^N."""
    if algebra.regime.kind != "R":
        raise RegimeMismatch("completion needs an algebra over R")
    fac = Factor(algebra.name or "X", algebra.variables, algebra.relations.generators)
    return TruncatedAlgebra(algebra.base, N, [fac], name=algebra.name or "X")


@dataclass
class TorsionCertificate:
    N0: int
    saturation: list
    # generator of the saturation with pi^(N0-1) * g not in J (absent when N0 == 0)
    witness: object = None


class CompletionModel:
    """Completion of a finite-type R-algebra, with lazily built truncations."""

    def __init__(self, source: AffineAlgebra):
        if source.regime.kind != "R":
            raise RegimeMismatch("completion model needs an algebra over R")
        self.source = source
        self._truncations: dict[int, TruncatedAlgebra] = {}
        self._saturation: IdealPresentation | None = None
        self.torsion_certificate: TorsionCertificate | None = None

    @classmethod
    def from_factor(cls, base, factor: Factor) -> CompletionModel:
        return cls(AffineAlgebra(base, factor.variables, factor.relations, OVER_R, name=factor.name))

    @property
    def base(self):
        return self.source.base

    @property
    def ideal(self) -> IdealPresentation:
        return self.source.relations

    @property
    def torsion_bound(self) -> int | None:
        return None if self.torsion_certificate is None else self.torsion_certificate.N0

    def truncation(self, N: int) -> TruncatedAlgebra:
        t = self._truncations.get(N)
        if t is None:
            t = self._truncations.setdefault(N, complete(self.source, N))
        return t

    def saturation(self) -> IdealPresentation:
        if self._saturation is None:
            self._saturation = pi_saturation(self.ideal)
        return self._saturation


def torsion_bound(model: CompletionModel, cap: int = 8) -> int:
    """Smallest N0 with pi^N0 * (J : pi^inf) inside J, i.e. B[pi^inf] = B[pi^N0]."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    J = model.ideal
    sat = model.saturation()
    pi = model.base.pi
    extra = [g for g in sat.generators if not J.contains(g)]
    if not extra:
        model.torsion_certificate = TorsionCertificate(0, list(sat.generators))
        return 0
    pending = extra
    for n in range(1, cap + 1):
        scale = model.base.pi_power(n)
        failing = [g for g in pending if not J.contains(g * scale)]
        if not failing:
            witness = pending[0]
            model.torsion_certificate = TorsionCertificate(n, list(sat.generators), witness)
            return n
        pending = failing
    raise CapExceeded(f"pi-torsion did not stabilize by {model.base.pi_name}^{cap}; "
                      f"raise the cap (e.g. generator {pending[0]} still fails, pi={pi})")


@dataclass
class TorsionSplit:
    """B = B' x_{B'''} B'' with B' = B/B[pi^inf], B'' = B/pi^N0, B''' = B'/pi^N0."""

    N0: int
    B1: AffineAlgebra
    B2: AffineAlgebra
    B3: AffineAlgebra
    # levels n at which (J^sat + pi^n) meet (J + pi^N0 + pi^n) == J + pi^n was checked
    levels_checked: list = field(default_factory=list)
    exact_check: bool = False

    def to_B3(self, f):
        """Reduce a representative into B'''; both structure surjections
        are the identity on variables."""
        return self.B3.element(f)


def _with(ideal: IdealPresentation, extra) -> IdealPresentation:
    return ideal.with_generators(extra)


def torsion_split(model: CompletionModel, prec: int, cap: int | None = None) -> TorsionSplit:
    """Split off the pi-power torsion and check the reconstruction levelwise."""
    N0 = model.torsion_bound
    if N0 is None:
        N0 = torsion_bound(model, cap if cap is not None else max(prec, 1))
    base = model.base
    ring = model.source.ring
    J = model.ideal
    sat = model.saturation()
    piN0 = ring.const(base.pi_power(N0))
    B1 = AffineAlgebra(base, ring.variables, sat.generators, OVER_R, name="B'")
    B2 = AffineAlgebra(base, ring.variables, list(J.generators) + [piN0], OVER_R, name="B''")
    B3 = AffineAlgebra(base, ring.variables, list(sat.generators) + [piN0], OVER_R, name="B'''")
    split = TorsionSplit(N0, B1, B2, B3)
    meet = intersect(sat, _with(J, [piN0]))
    split.exact_check = meet.same_ideal(J)
    for n in range(1, prec + 1):
        pin = ring.const(base.pi_power(n))
        lhs = intersect(_with(sat, [pin]), _with(J, [piN0, pin]))
        if not lhs.same_ideal(_with(J, [pin])):
            break
        split.levels_checked.append(n)
    return split


def split_holds(split: TorsionSplit, prec: int) -> bool:
    return split.exact_check and split.levels_checked == list(range(1, prec + 1))
