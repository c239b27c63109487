"""Independent reference computations used by the tests.

Nothing here imports the algorithms under test: the Buchberger run is a
plain textbook implementation over Fractions, ideal membership over Q and
F_p goes through sympy, and finite fibre products are enumerated.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import sympy


# textbook Buchberger over Q -------------------------------------------------------

def _key(order):
    if order == "lex":
        return lambda m: m
    return lambda m: (sum(m), m)


def _lt(f, key):
    m = max(f, key=key)
    return m, f[m]


def _sub_mul(f, g, c, shift):
    out = dict(f)
    for m, a in g.items():
        mm = tuple(x + y for x, y in zip(m, shift))
        v = out.get(mm, 0) - c * a
        if v:
            out[mm] = v
        else:
            out.pop(mm, None)
    return out


def _reduce(f, G, key):
    f = dict(f)
    rem = {}
    while f:
        m, c = _lt(f, key)
        for g in G:
            gm, gc = _lt(g, key)
            if all(a >= b for a, b in zip(m, gm)):
                f = _sub_mul(f, g, c / gc, tuple(a - b for a, b in zip(m, gm)))
                break
        else:
            rem[m] = c
            del f[m]
    return rem


def textbook_groebner(polys: list[dict], order: str = "deglex") -> list[dict]:
    """Reduced Groebner basis over Q of polynomials given as {exps: Fraction}."""
    key = _key(order)
    G = [dict(p) for p in polys if p]
    pairs = list(itertools.combinations(range(len(G)), 2))
    while pairs:
        i, j = pairs.pop()
        (mi, ci), (mj, cj) = _lt(G[i], key), _lt(G[j], key)
        lcm = tuple(max(a, b) for a, b in zip(mi, mj))
        s = _sub_mul({}, G[i], -1 / ci, tuple(a - b for a, b in zip(lcm, mi)))
        s = _sub_mul(s, G[j], 1 / cj, tuple(a - b for a, b in zip(lcm, mj)))
        r = _reduce(s, G, key)
        if r:
            G.append(r)
            pairs.extend((k, len(G) - 1) for k in range(len(G) - 1))
    # minimal, monic, reduced
    G = [g for i, g in enumerate(G)
         if not any(k != i and all(a >= b for a, b in zip(_lt(g, key)[0], _lt(h, key)[0]))
                    and (_lt(g, key)[0] != _lt(h, key)[0] or k < i) for k, h in enumerate(G))]
    G = [{m: c / _lt(g, key)[1] for m, c in g.items()} for g in G]
    out = []
    for i, g in enumerate(G):
        out.append(_reduce(g, G[:i] + G[i + 1:], key) if len(G) > 1 else g)
    # reducing the tail does not touch the leading term
    return sorted(out, key=lambda g: key(_lt(g, key)[0]))


# polynomials to sympy ---------------------------------------------------------------

def q(c) -> Fraction:
    return Fraction(int(c.numerator), int(c.denominator))


def as_fraction_dict(f) -> dict:
    return {m: q(c) for m, c in f.items()}


def to_sympy(f, symbols, modulus: int | None = None):
    expr = sympy.Integer(0)
    for m, c in f.items():
        c = q(c)
        if modulus is None:
            term = sympy.Rational(c.numerator, c.denominator)
        else:
            term = sympy.Integer(c.numerator * pow(c.denominator, -1, modulus) % modulus)
        for s, e in zip(symbols, m):
            term *= s ** e
        expr += term
    return expr


def member_over_Q(f, gens, variables) -> bool:
    """f in the ideal generated over Q[variables] (sympy Groebner basis)."""
    syms = sympy.symbols(variables) if len(variables) > 1 else (sympy.Symbol(variables[0]),)
    exprs = [to_sympy(g, syms) for g in gens if g]
    if not exprs:
        return not f
    G = sympy.groebner(exprs, *syms, order="grlex", domain="QQ")
    return G.contains(to_sympy(f, syms))


def member_mod_p(f, gens, variables, p: int) -> bool:
    """Membership of the reductions modulo p in F_p[variables] (sympy)."""
    syms = sympy.symbols(variables) if len(variables) > 1 else (sympy.Symbol(variables[0]),)
    exprs = [e for e in (to_sympy(g, syms, p) for g in gens) if e != 0]
    e = to_sympy(f, syms, p)
    if e == 0:
        return True
    if not exprs:
        return False
    G = sympy.groebner(exprs, *syms, order="grlex", modulus=p)
    return G.contains(e)


# geometric series -------------------------------------------------------------------

def geometric_inverse_mod(u: int, p: int, N: int) -> int:
    """Inverse of a unit u modulo p^N through 1/(1 - t) = sum t^k with t = 1 - u/u0."""
    mod = p ** N
    u0 = u % p
    inv0 = pow(u0, -1, p)
    # u = u0 * (1 - t) with t divisible by p after rescaling by a Teichmuller-free lift
    lift = inv0
    t = (1 - u * lift) % mod
    acc, power = 0, 1
    for _ in range(N):
        acc = (acc + power) % mod
        power = (power * t) % mod
    return (lift * acc) % mod


# finite fibre products ----------------------------------------------------------------

def fibre_product_count(left, right, to_common_left, to_common_right) -> int:
    """Number of pairs (a, b) with equal images, by enumeration."""
    from collections import Counter

    counts = Counter(to_common_right(b) for b in right)
    return sum(counts[to_common_left(a)] for a in left)
