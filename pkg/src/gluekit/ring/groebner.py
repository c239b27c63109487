"""Buchberger's algorithm on raw sparse polynomials.

Polynomials here are plain dicts ``{monomial: coefficient}``.  A monomial is
an exponent tuple, or for module elements a tuple ``(position, *exponents)``.

Two coefficient modes:

* field mode: coefficients live in K = R[1/pi]; reduced bases are monic.
* DVR mode: coefficients live in R.  Since R is a discrete valuation ring,
  for any two coefficients one divides the other, so strong Groebner bases
  are computed from S-polynomials alone.  A term ``c*m`` is reducible by
  ``g`` iff ``LM(g) | m`` and ``v(LC(g)) <= v(c)``; otherwise its
  coefficient is replaced by the canonical residue modulo the smallest
  admissible ``LC(g)``, which makes normal forms unique.

Truncations R/pi^N are handled by adding the constant pi^N to the input.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from operator import add, le, sub
from typing import Callable

from .base import INF, BasePair


@dataclass(frozen=True)
class GBContext:
    base: BasePair
    field: bool
    key: Callable
    module: bool = False

    # monomial helpers ----------------------------------------------------

    def divides(self, a, b) -> bool:
        if self.module and a[0] != b[0]:
            return False
        return all(map(le, a, b))

    def quotient(self, b, a):
        """b / a as a shift applied to every monomial (position kept)."""
        if self.module:
            return (0,) + tuple(map(sub, b[1:], a[1:]))
        return tuple(map(sub, b, a))

    def lcm(self, a, b):
        if self.module:
            return (a[0],) + tuple(max(x, y) for x, y in zip(a[1:], b[1:]))
        return tuple(max(x, y) for x, y in zip(a, b))

    def coprime(self, a, b) -> bool:
        s = 1 if self.module else 0
        return all(x == 0 or y == 0 for x, y in zip(a[s:], b[s:]))

    # polynomial helpers --------------------------------------------------

    def leading(self, f):
        m = max(f, key=self.key)
        return m, f[m]

    def val(self, c):
        if self.field:
            return 0 if c else INF
        return self.base.valuation(c)


def _axpy(f: dict, q, shift, g: dict) -> None:
    """f -= q * shift * g in place."""
    for m, c in g.items():
        mm = tuple(map(add, m, shift))
        v = f.get(mm)
        if v is None:
            f[mm] = -q * c
        else:
            v = v - q * c
            if v:
                f[mm] = v
            else:
                del f[mm]


class _Basis:
    """Reducer list with cached leading data."""

    def __init__(self, ctx: GBContext):
        self.ctx = ctx
        self.polys: list[dict] = []
        self.lms: list = []
        self.lcs: list = []
        self.vals: list = []

    def add(self, f: dict):
        m, c = self.ctx.leading(f)
        self.polys.append(f)
        self.lms.append(m)
        self.lcs.append(c)
        self.vals.append(self.ctx.val(c))

    def reducer(self, m):
        """Index of the admissible reducer of ``m`` with smallest valuation."""
        best, bv = None, INF
        module = self.ctx.module
        vals = self.vals
        for i, lm in enumerate(self.lms):
            if module and lm[0] != m[0]:
                continue
            if all(map(le, lm, m)):
                v = vals[i]
                if v < bv:
                    best, bv = i, v
                    if v == 0:
                        break
        return best


def reduce_full(f: dict, basis: _Basis) -> dict:
    """Fully reduce ``f``; returns the canonical remainder."""
    ctx = basis.ctx
    key = ctx.key
    base = ctx.base
    f = dict(f)
    rem = {}
    while f:
        m = max(f, key=key)
        c = f[m]
        i = basis.reducer(m)
        if i is None:
            rem[m] = f.pop(m)
            continue
        g, lm, lc, vg = basis.polys[i], basis.lms[i], basis.lcs[i], basis.vals[i]
        shift = ctx.quotient(m, lm)
        if ctx.field or base.valuation(c) >= vg:
            _axpy(f, c / lc, shift, g)
            f.pop(m, None)
            continue
        r = base.residue(c, vg)
        if r != c:
            _axpy(f, (c - r) / lc, shift, g)
        v = f.pop(m, None)
        if v:
            rem[m] = v
    return rem


def _spoly(ctx: GBContext, f, lmf, lcf, g, lmg, lcg):
    L = ctx.lcm(lmf, lmg)
    sf, sg = ctx.quotient(L, lmf), ctx.quotient(L, lmg)
    out: dict = {}
    if ctx.field or ctx.val(lcf) <= ctx.val(lcg):
        a, b = lcg / lcf, ctx.base.one
    else:
        a, b = ctx.base.one, lcf / lcg
    _axpy(out, -a, sf, f)
    _axpy(out, b, sg, g)
    return out


def buchberger(polys, ctx: GBContext, max_pairs: int | None = None) -> list[dict]:
    """Reduced (strong) Groebner basis of the given generators."""
    basis = _Basis(ctx)
    key = ctx.key
    pairs: list = []
    counter = 0

    def push_pairs(j):
        nonlocal counter
        lmj = basis.lms[j]
        for i in range(j):
            lmi = basis.lms[i]
            if ctx.module and lmi[0] != lmj[0]:
                continue
            if (not ctx.module and ctx.coprime(lmi, lmj)
                    and (basis.vals[i] == 0 or basis.vals[j] == 0)):
                continue
            L = ctx.lcm(lmi, lmj)
            counter += 1
            heapq.heappush(pairs, (key(L), counter, i, j))

    # inter-reduce inputs first so the basis starts small
    for f in sorted((dict(p) for p in polys if p), key=lambda p: key(ctx.leading(p)[0])):
        r = reduce_full(f, basis)
        if r:
            basis.add(r)
            push_pairs(len(basis.polys) - 1)

    processed = 0
    while pairs:
        _, _, i, j = heapq.heappop(pairs)
        if basis.polys[i] is None or basis.polys[j] is None:
            continue
        s = _spoly(ctx, basis.polys[i], basis.lms[i], basis.lcs[i],
                   basis.polys[j], basis.lms[j], basis.lcs[j])
        processed += 1
        if max_pairs is not None and processed > max_pairs:
            raise RuntimeError("Groebner pair budget exhausted")
        if not s:
            continue
        r = reduce_full(s, basis)
        if r:
            basis.add(r)
            push_pairs(len(basis.polys) - 1)

    return _interreduce(basis, ctx)


def _dominated(ctx, lm_a, v_a, lm_b, v_b) -> bool:
    """True when term (lm_a, v_a) divides term (lm_b, v_b)."""
    return ctx.divides(lm_a, lm_b) and v_a <= v_b


def _interreduce(basis: _Basis, ctx: GBContext) -> list[dict]:
    items = [(p, m, c, v) for p, m, c, v in zip(basis.polys, basis.lms, basis.lcs, basis.vals) if p]
    # minimalize
    keep = []
    for idx, (p, m, c, v) in enumerate(items):
        dominated = False
        for jdx, (_, m2, _, v2) in enumerate(items):
            if jdx == idx:
                continue
            if _dominated(ctx, m2, v2, m, v) and (
                (m2, v2) != (m, v) or jdx < idx
            ):
                dominated = True
                break
        if not dominated:
            keep.append(p)
    # normalize leading coefficients
    normed = []
    for p in keep:
        m, c = ctx.leading(p)
        if ctx.field:
            u = c
        else:
            u = ctx.base.unit_part(c)
        normed.append({mm: cc / u for mm, cc in p.items()})
    # reduce tails
    out = []
    for i, p in enumerate(normed):
        others = _Basis(ctx)
        for j, q in enumerate(normed):
            if j != i:
                others.add(q)
        m, c = ctx.leading(p)
        tail = dict(p)
        del tail[m]
        r = reduce_full(tail, others) if tail else {}
        r[m] = c
        out.append(r)
    out.sort(key=lambda p: (ctx.key(ctx.leading(p)[0]), ctx.val(ctx.leading(p)[1])))
    return out


def normal_form_raw(f: dict, gb: list[dict], ctx: GBContext) -> dict:
    basis = _Basis(ctx)
    for g in gb:
        basis.add(g)
    return reduce_full(f, basis)


def make_reducer(gb: list[dict], ctx: GBContext) -> Callable[[dict], dict]:
    basis = _Basis(ctx)
    for g in gb:
        basis.add(g)
    return lambda f: reduce_full(f, basis)
