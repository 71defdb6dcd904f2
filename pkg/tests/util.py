"""Deterministic generators shared across the test modules.

All randomness flows through explicitly seeded random.Random instances;
the library itself never draws random numbers.
"""

from hardymono import functions


def random_sum(ctx, rng, max_terms=6, re_range=(-0.45, 3.0),
               im_range=(-2.0, 2.0), max_logpow=3):
    """Random log-monomial sum with every exponent inside the half plane."""
    n = rng.randint(1, max_terms)
    terms = []
    for _ in range(n):
        coeff = ctx.comp(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0))
        s = ctx.comp(rng.uniform(*re_range), rng.uniform(*im_range))
        terms.append((coeff, s, rng.randint(0, max_logpow)))
    return functions.LogMonomialSum.from_terms(ctx, terms)


def random_real_exponents(rng, count, lo=-0.4, hi=3.0, min_sep=0.3):
    """Well-separated real exponents drawn by deterministic rejection."""
    out = []
    guard = 0
    while len(out) < count:
        guard += 1
        if guard > 10000:
            raise RuntimeError("separation constraint too tight")
        cand = rng.uniform(lo + 0.02, hi - 0.02)
        if all(abs(cand - prev) >= min_sep for prev in out):
            out.append(cand)
    return out


def max_abs(ctx, f):
    """Largest coefficient modulus of a log-monomial sum."""
    worst = 0.0
    for term in f.terms:
        worst = max(worst, ctx.absf(term.coeff))
    return worst
