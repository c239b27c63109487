"""Monomial orders as sort keys on exponent tuples.

Larger key means larger monomial; the first declared variable is the
largest.  Public orders are ``lex`` and ``deglex``; ``elim:k`` is used
internally to eliminate the first ``k`` variables.
"""

from __future__ import annotations

from functools import lru_cache

SUPPORTED_ORDERS = ("deglex", "lex")


def _lex(m):
    return m


def _deglex(m):
    return (sum(m), m)


@lru_cache(maxsize=None)
def monomial_key(order: str):
    if order == "lex":
        return _lex
    if order == "deglex":
        return _deglex
    if order.startswith("elim:"):
        k = int(order[5:])

        def _elim(m, k=k):
            return (sum(m[:k]), sum(m), m)

        return _elim
    raise ValueError(f"unsupported monomial order {order!r}; use one of {SUPPORTED_ORDERS}")


@lru_cache(maxsize=None)
def module_key(order: str, npos_block: int = 0):
    """Position-over-term key for module monomials ``(pos, *exps)``.

    Lower positions are larger.  With ``npos_block > 0`` only the split
    between positions ``< npos_block`` and the rest dominates, followed by
    the term order, then the position.
    """
    base = monomial_key(order)
    if npos_block:

        def _block(m, base=base, b=npos_block):
            return (m[0] < b, base(m[1:]), -m[0])

        return _block

    def _pot(m, base=base):
        return (-m[0], base(m[1:]))

    return _pot
