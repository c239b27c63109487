"""Hypothesis strategies for polynomials, seeded through GLUEKIT_SEED."""

from hypothesis import seed, strategies as st

from gluekit.sampling import seed_from_env

seeded = seed(seed_from_env())


def coefficients(base, integral: bool = True, height: int = 30):
    p = base.prime or 2
    if integral:
        # denominators prime to p
        den = st.integers(1, 6).filter(lambda d: d % p != 0)
        return st.builds(lambda a, b: base.coerce(a) / base.coerce(b), st.integers(-height, height), den)
    return st.builds(lambda a, b, k: base.coerce(a) / base.coerce(b) * base.pi_power(-k),
                     st.integers(-height, height), st.integers(1, 6), st.integers(0, 2))


def polynomials(ring, max_terms: int = 4, max_deg: int = 2, integral: bool = True):
    n = ring.nvars
    mono = st.tuples(*[st.integers(0, max_deg)] * n) if n else st.just(())
    coeff = coefficients(ring.base, integral and ring.regime.kind != "K")
    return st.lists(st.tuples(mono, coeff), max_size=max_terms).map(
        lambda ts: sum((ring.monomial(m, c) for m, c in ts), ring.zero))
