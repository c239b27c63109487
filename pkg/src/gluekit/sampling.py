"""Seeded random inputs for property suites."""

from __future__ import annotations

import os
import random

from .modules import ModulePresentation
from .ring.base import BasePair
from .ring.ideal import AffineAlgebra
from .ring.polynomial import OVER_R


def seed_from_env(default: int = 0) -> int:
    """The decimal integer in GLUEKIT_SEED, or ``default``."""
    raw = os.environ.get("GLUEKIT_SEED", "").strip()
    if not raw:
        return default
    try:
        return int(raw, 10)
    except ValueError:
        raise ValueError(f"GLUEKIT_SEED must be a decimal integer, got {raw!r}") from None


def rng(offset: int = 0) -> random.Random:
    return random.Random(seed_from_env() + offset)


def base_ring(base: BasePair, nvars: int) -> AffineAlgebra:
    names = ("x", "y", "z")[:nvars]
    return AffineAlgebra(base, names, (), OVER_R, name="R" if not nvars else "R[" + ",".join(names) + "]")


def random_poly(r: random.Random, ring: AffineAlgebra, max_degree: int, height: int, density: float = 0.5):
    R = ring.ring
    acc = R.zero
    if not R.nvars:
        return R.const(r.randint(-height, height))
    for d in range(max_degree + 1):
        for m in _monomials(R.nvars, d):
            if r.random() < density:
                acc = acc + R.monomial(m, r.randint(-height, height))
    return acc


def _monomials(n: int, d: int):
    if n == 1:
        yield (d,)
        return
    for i in range(d, -1, -1):
        for rest in _monomials(n - 1, d - i):
            yield (i,) + rest


def random_module(r: random.Random, base: BasePair, nvars: int = 0, max_rank: int = 3,
                  max_degree: int = 2, height: int | None = None) -> ModulePresentation:
    """A finitely presented module with up to ``max_rank`` generators and
    relation entries of degree <= ``max_degree`` and height <= ``height``
    (default pi^2 in the arithmetic profile)."""
    if height is None:
        height = base.prime ** 2 if base.prime else 4
    ring = base_ring(base, nvars)
    n = r.randint(1, max_rank)
    rels = []
    for _ in range(r.randint(0, n)):
        # some columns get a pi-power factor so that torsion shows up often;
        # entries stay within the height bound either way
        k = r.choice((0, 0, 1, 2)) if base.prime else 0
        scale = base.prime ** k if k else 1
        col = [random_poly(r, ring, max_degree, max(height // scale, 1), 0.4) for _ in range(n)]
        if k:
            col = [e * base.pi_power(k) for e in col]
        rels.append(col)
    return ModulePresentation(ring, n, rels, name="M")
