"""Monomial spaces: Gram matrices, projections, distances, rate experiments."""

import math
import random
from fractions import Fraction

import pytest

from hardymono.context import Context
from hardymono.errors import BackendError, DomainError
from hardymono import functions, geometry

from util import random_real_exponents


def test_gram_of_constants_and_x():
    ctx = Context.rational()
    space = geometry.ExponentMultiset.from_pairs(ctx, [(0, 1), (1, 1)])
    g = geometry.gram(ctx, space)
    assert Fraction(g[0][0].re) == 1
    assert Fraction(g[0][1].re) == Fraction(1, 2)
    assert Fraction(g[1][0].re) == Fraction(1, 2)
    assert Fraction(g[1][1].re) == Fraction(1, 3)


def test_gram_orientation_complex_exponents():
    # G[i][j] = <b_j, b_i>: row i varies the conjugated slot.
    ctx = Context.double()
    s0 = ctx.comp(0.5, 1.0)
    s1 = ctx.comp(1.0, -2.0)
    space = geometry.ExponentMultiset.from_pairs(ctx, [(s0, 1), (s1, 1)])
    g = geometry.gram(ctx, space)
    b = space.basis(ctx)
    want01 = functions.inner_product(ctx, b[1], b[0])
    assert ctx.absf(g[0][1] - want01) == 0.0
    assert ctx.absf(g[1][0] - ctx.conj(want01)) == 0.0


def test_gram_multiplicity_includes_log_terms():
    ctx = Context.rational()
    space = geometry.ExponentMultiset.from_pairs(ctx, [(0, 2)])
    g = geometry.gram(ctx, space)
    # basis is (1, log x): <log x, 1> = -1, <log x, log x> = 2
    assert Fraction(g[0][1].re) == -1
    assert Fraction(g[1][1].re) == 2


def test_exponent_merging_accumulates_multiplicity():
    ctx = Context.double()
    space = geometry.ExponentMultiset.from_pairs(
        ctx, [(1.0, 1), (1.0 + 1e-12, 2)])
    assert len(space.entries) == 1
    assert space.entries[0][1] == 3
    assert space.dimension == 3


def test_projection_distance_exact_fraction():
    # dist^2(x^2, span{1, x}) = 1/180, the classic least-squares value.
    ctx = Context.rational()
    f = functions.monomial(ctx, 2)
    space = geometry.ExponentMultiset.from_pairs(ctx, [(0, 1), (1, 1)])
    d_sq = geometry.dist_sq_to_space(ctx, f, space)
    assert Fraction(d_sq) == Fraction(1, 180)
    # the projection itself is x - 1/6
    proj = geometry.project(ctx, f, space)
    coeffs = {t.logpow: t for t in proj.terms}
    vals = {int(t.s.re): t.coeff.re for t in proj.terms}
    assert vals == {0: Fraction(-1, 6), 1: 1}


def test_member_function_has_zero_distance():
    ctx = Context.double()
    space = geometry.ExponentMultiset.from_pairs(ctx, [(0.5, 1), (2.0, 1)])
    f = functions.LogMonomialSum.from_terms(
        ctx, [(ctx.comp(2.0), ctx.comp(0.5), 0),
              (ctx.comp(-1.0, 1.0), ctx.comp(2.0), 0)])
    d_sq = geometry.dist_sq_to_space(ctx, f, space)
    assert float(d_sq) < 1e-14


def test_residual_and_detratio_agree():
    ctx = Context.double()
    rng = random.Random(2718)
    for _ in range(15):
        exps = random_real_exponents(rng, rng.randint(1, 3))
        space = geometry.ExponentMultiset.from_pairs(
            ctx, [(e, 1) for e in exps])
        f = functions.monomial(ctx, ctx.comp(rng.uniform(0.0, 2.5)))
        a = float(geometry.dist_sq_to_space(ctx, f, space, method="residual"))
        b = float(geometry.dist_sq_to_space(ctx, f, space, method="detratio"))
        assert abs(a - b) < 1e-8 * max(1.0, a)


def test_distance_monotone_under_inclusion():
    ctx = Context.double()
    f = functions.monomial(ctx, ctx.comp(2.5))
    small = geometry.ExponentMultiset.from_pairs(ctx, [(0, 1)])
    large = geometry.ExponentMultiset.from_pairs(ctx, [(0, 1), (1, 1)])
    d_small = float(geometry.dist_sq_to_space(ctx, f, small))
    d_large = float(geometry.dist_sq_to_space(ctx, f, large))
    assert d_large <= d_small + 1e-15


def test_cauchy_det_closed_form_vs_factorization():
    # Gram determinants of 5-point Cauchy systems sit near 1e-20, far
    # below what double LU resolves relatively, so the factorization side
    # runs at 128 bits while the closed form stays in double.
    from hardymono import linalg
    ctx = Context.double()
    hi = Context.bigfloat(128)
    rng = random.Random(31415)
    for _ in range(25):
        exps = random_real_exponents(rng, 5, min_sep=0.2)
        space = geometry.ExponentMultiset.from_pairs(
            ctx, [(e, 1) for e in exps])
        closed = float(geometry.cauchy_det(ctx, space))
        space_hi = geometry.ExponentMultiset.from_pairs(
            hi, [(e, 1) for e in exps])
        lu = float(linalg.det_hermitian(hi, geometry.gram(hi, space_hi)))
        assert abs(closed - lu) < 1e-10 * max(abs(lu), 1e-300)


def test_cauchy_det_rejects_multiplicity():
    ctx = Context.double()
    space = geometry.ExponentMultiset.from_pairs(ctx, [(0, 2)])
    with pytest.raises(DomainError):
        geometry.cauchy_det(ctx, space)


def test_muntz_integer_exponents_diverge_past_ten():
    # sum_k (2k+1)/(k+1)^2 ~ 2 log K grows without bound; criterion proxy.
    ctx = Context.double()
    sums = geometry.muntz_partial_sums(ctx, (float(k) for k in range(1, 400)))
    assert float(sums[-1]) > 10.0
    # partial sums are nondecreasing for positive exponents
    assert all(float(a) <= float(b) + 1e-15 for a, b in zip(sums, sums[1:]))


def test_muntz_squared_exponents_level_off():
    ctx = Context.double()
    sums = geometry.muntz_partial_sums(
        ctx, (float(k * k) for k in range(1, 1200)))
    increments = [float(b) - float(a) for a, b in zip(sums[1000:], sums[1001:])]
    assert all(inc < 1e-3 for inc in increments)


def test_truncated_indicator_moments():
    # <chi_[a,1], x^n> = (1 - a^(n+1))/(n+1)
    ctx = Context.double()
    chi = geometry.TruncatedIndicator(0.25)
    for n in range(4):
        val = chi.inner_with(ctx, functions.monomial(ctx, n))
        want = (1.0 - 0.25 ** (n + 1)) / (n + 1)
        assert ctx.absf(val - ctx.comp(want)) < 1e-14
    assert float(chi.norm_sq(ctx)) == 0.75
    with pytest.raises(DomainError):
        geometry.TruncatedIndicator(1.5)


def test_indicator_distance_decreases_with_space():
    ctx = Context.double()
    chi = geometry.TruncatedIndicator(0.25)
    d_prev = None
    for top in (1, 3, 5):
        space = geometry.ExponentMultiset.from_pairs(
            ctx, [(k, 1) for k in range(top + 1)])
        d = float(geometry.dist_to_space(ctx, chi, space))
        if d_prev is not None:
            assert d <= d_prev + 1e-12
        d_prev = d
    assert d_prev < 0.3


def test_roots_of_unity_space_shape():
    ctx = Context.double()
    space = geometry.roots_of_unity_space(ctx, ctx.comp(0.0), 3, 0.1)
    assert space.dimension == 3
    for s, mult in space.entries:
        assert mult == 1
        assert abs(ctx.absf(s) - 0.1) < 1e-12


def test_roots_of_unity_half_plane_guard():
    ctx = Context.double()
    with pytest.raises(DomainError):
        geometry.roots_of_unity_space(ctx, ctx.comp(-0.45), 2, 0.2)
    with pytest.raises(BackendError):
        geometry.roots_of_unity_space(Context.rational(), 0, 3, Fraction(1, 10))


def test_rate_slope_reflects_log_multiplicity():
    # dist((log x)^n, Mult(roots-of-unity)) ~ C h^m for n < m.
    ctx = Context.double()
    for m, n in ((2, 1), (3, 2)):
        f = functions.log_power(ctx, n)
        dists = []
        hs = (0.1, 0.05)
        for h in hs:
            space = geometry.roots_of_unity_space(ctx, ctx.comp(0.0), m, h)
            dists.append(float(geometry.dist_to_space(ctx, f, space)))
        slope = math.log(dists[1] / dists[0]) / math.log(hs[1] / hs[0])
        assert slope >= m - 0.2


def test_space_json_roundtrip():
    ctx = Context.double()
    space = geometry.ExponentMultiset.from_pairs(
        ctx, [(ctx.comp(0.5, 1.5), 2), (ctx.comp(2.0), 1)])
    back = geometry.ExponentMultiset.from_json(ctx, space.to_json(ctx))
    assert len(back.entries) == len(space.entries)
    for (s1, m1), (s2, m2) in zip(space.entries, back.entries):
        assert m1 == m2 and ctx.absf(s1 - s2) == 0.0
    # string form for s is also accepted
    alt = geometry.ExponentMultiset.from_json(
        ctx, {"exponents": [{"s": "1", "mult": 1}]})
    assert alt.dimension == 1
