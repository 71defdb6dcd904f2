"""Log-monomial algebra: inner products, H, H*, identities, serialization."""

import math
import random
from fractions import Fraction

import pytest

from hardymono.context import Context
from hardymono.errors import BackendError, DomainError, HalfPlaneError
from hardymono import functions
from hardymono import quadrature

from util import random_sum, max_abs


def _coeff(ctx, f, logpow, s):
    for term in f.terms:
        if term.logpow == logpow and ctx.absf(term.s - ctx.as_comp(s)) < 1e-12:
            return term.coeff
    return ctx.zero


def test_inner_product_unit_constant():
    ctx = Context.double()
    e = functions.one(ctx)
    assert functions.inner_product(ctx, e, e) == 1.0


def test_inner_product_x_with_x():
    ctx = Context.rational()
    x = functions.monomial(ctx, 1)
    val = functions.inner_product(ctx, x, x)
    assert val.re == Fraction(1, 3) and val.im == 0


def test_inner_product_log_with_log():
    ctx = Context.double()
    lg = functions.log_power(ctx, 1)
    val = functions.inner_product(ctx, lg, lg)
    assert abs(val - 2.0) < 1e-14
    # independent quadrature check of the same value
    num, err = quadrature.integrate(
        quadrature.Integrand(lambda x: math.log(x) ** 2, 0.0, 2))
    assert abs(num - 2.0) < 1e-9


def test_inner_product_conjugates_second_argument():
    ctx = Context.double()
    f = functions.monomial(ctx, ctx.comp(0.5, 1.0))
    g = functions.monomial(ctx, ctx.comp(0.25, -0.5))
    lhs = functions.inner_product(ctx, f, g)
    rhs = ctx.conj(functions.inner_product(ctx, g, f))
    assert ctx.absf(lhs - rhs) < 1e-15
    # <x^t, x^s> = 1/(1 + t + conj(s))
    expect = 1.0 / (1.0 + complex(0.5, 1.0) + complex(0.25, -0.5).conjugate())
    assert ctx.absf(lhs - ctx.comp(expect.real, expect.imag)) < 1e-15


def test_half_plane_enforced():
    ctx = Context.double()
    with pytest.raises(HalfPlaneError):
        functions.monomial(ctx, -0.75)


def test_apply_hardy_on_x_halves_it():
    ctx = Context.rational()
    x = functions.monomial(ctx, 1)
    hx = functions.apply_hardy(ctx, x)
    assert len(hx.terms) == 1
    assert hx.terms[0].coeff.re == Fraction(1, 2)
    assert hx.terms[0].logpow == 0


def test_apply_hardy_adjoint_on_x():
    ctx = Context.rational()
    x = functions.monomial(ctx, 1)
    out = functions.apply_hardy_adjoint(ctx, x)
    # H* x = integral_x^1 dt = 1 - x
    assert _coeff(ctx, out, 0, 0).re == 1
    assert _coeff(ctx, out, 0, 1).re == -1


def test_apply_hardy_log_power():
    # H(log x) = log x - 1 by the Leibniz closed form at s = 0, m = 1.
    ctx = Context.rational()
    lg = functions.log_power(ctx, 1)
    out = functions.apply_hardy(ctx, lg)
    assert _coeff(ctx, out, 1, 0).re == 1
    assert _coeff(ctx, out, 0, 0).re == -1


def test_adjointness_random():
    ctx = Context.double()
    rng = random.Random(20260817)
    for _ in range(40):
        f = random_sum(ctx, rng, max_terms=4)
        g = random_sum(ctx, rng, max_terms=4)
        lhs = functions.inner_product(ctx, functions.apply_hardy(ctx, f), g)
        rhs = functions.inner_product(ctx, f,
                                      functions.apply_hardy_adjoint(ctx, g))
        scale = max(1.0, ctx.absf(lhs))
        assert ctx.absf(lhs - rhs) / scale < 1e-10


def test_norm_identity_under_one_minus_hardy():
    # ||f||^2 = ||(1 - H) f||^2 + |integral_0^1 f|^2: the defect of the
    # co-isometry 1 - H is the rank-one functional f -> integral f.
    ctx = Context.double()
    rng = random.Random(77)
    for _ in range(60):
        f = random_sum(ctx, rng)
        g = functions.subtract(ctx, f, functions.apply_hardy(ctx, f))
        mean = functions.inner_product(ctx, f, functions.one(ctx))
        a = float(functions.norm_sq(ctx, f))
        b = float(functions.norm_sq(ctx, g)) + ctx.abs2(mean)
        assert abs(a - b) / max(1.0, a) < 1e-10


def test_resolvent_identity():
    # (1 + s H*) x^s = 1 for every half-plane exponent s.
    ctx = Context.double()
    rng = random.Random(5)
    for _ in range(20):
        s = ctx.comp(rng.uniform(-0.45, 3.0), rng.uniform(-2.0, 2.0))
        xs = functions.monomial(ctx, s)
        out = functions.add(ctx, xs,
                            functions.scale(ctx, s,
                                            functions.apply_hardy_adjoint(ctx, xs)))
        diff = functions.subtract(ctx, out, functions.one(ctx))
        assert max_abs(ctx, diff) < 1e-12


def test_closed_forms_match_quadrature_pointwise():
    ctx = Context.double()
    rng = random.Random(404)
    xs = [0.08, 0.2, 0.35, 0.5, 0.65, 0.8, 0.93]
    for _ in range(10):
        f = random_sum(ctx, rng, max_terms=3, re_range=(-0.3, 2.0),
                       max_logpow=2)
        hf = functions.apply_hardy(ctx, f)
        hsf = functions.apply_hardy_adjoint(ctx, f)
        min_re = min(float(ctx.re(t.s)) for t in f.terms)
        m_ord = max(t.logpow for t in f.terms)
        for x in xs:
            # (Hf)(x) = (1/x) integral_0^x f
            val, err = quadrature.integrate_prefix(
                quadrature.Integrand(lambda u: complex(functions.evaluate(ctx, f, u)),
                                     min_re, m_ord), x)
            want = val / x
            have = complex(functions.evaluate(ctx, hf, x))
            assert abs(have - want) <= 1e-8 * max(1.0, abs(want)) + 10 * err


def test_evaluate_matches_direct_formula():
    ctx = Context.double()
    f = functions.LogMonomialSum.from_terms(
        ctx, [(ctx.comp(2.0), ctx.comp(0.5), 1), (ctx.comp(-1.0), ctx.comp(0.0), 0)])
    x = 0.37
    want = 2.0 * math.log(x) * math.sqrt(x) - 1.0
    assert abs(complex(functions.evaluate(ctx, f, x)) - want) < 1e-14


def test_canonicalization_merges_terms():
    ctx = Context.double()
    f = functions.LogMonomialSum.from_terms(
        ctx, [(ctx.one, ctx.comp(1.0), 0), (ctx.one, ctx.comp(1.0), 0)])
    assert len(f.terms) == 1
    assert ctx.absf(f.terms[0].coeff - ctx.comp(2.0)) == 0.0
    g = functions.LogMonomialSum.from_terms(
        ctx, [(ctx.one, ctx.comp(1.0), 0), (-ctx.one, ctx.comp(1.0), 0)])
    assert len(g.terms) == 0


def test_truncated_inner_product_against_closed_form():
    ctx = Context.double()
    # integral_a^1 x dx = (1 - a^2)/2 with g = 1
    x = functions.monomial(ctx, 1)
    e = functions.one(ctx)
    a = 0.25
    val = functions.truncated_inner_product(ctx, x, e, a)
    assert abs(float(ctx.re(val)) - (1 - a * a) / 2) < 1e-14
    with pytest.raises(BackendError):
        functions.truncated_inner_product(Context.rational(),
                                          functions.one(Context.rational()),
                                          functions.one(Context.rational()),
                                          Fraction(1, 4))


def test_truncated_inner_product_log_term_vs_quadrature():
    ctx = Context.double()
    f = functions.log_power(ctx, 2, s=ctx.comp(0.5))
    g = functions.monomial(ctx, ctx.comp(0.0, 1.0))
    a = 0.3

    def fn(x):
        fx = math.log(x) ** 2 * (x ** 0.5)
        gx = complex(functions.evaluate(ctx, g, x))
        return fx * gx.conjugate()

    whole, e1 = quadrature.integrate(quadrature.Integrand(fn, 0.5, 2))
    head, e2 = quadrature.integrate_prefix(quadrature.Integrand(fn, 0.5, 2), a)
    want = whole - head
    have = functions.truncated_inner_product(ctx, f, g, a)
    assert ctx.absf(have - ctx.comp(want.real, want.imag)) < 1e-8 + 10 * (e1 + e2)


def test_json_roundtrip_double_and_rational():
    d = Context.double()
    rng = random.Random(99)
    f = random_sum(d, rng)
    data = functions.sum_to_json(d, f)
    back = functions.sum_from_json(d, data)
    diff = functions.subtract(d, f, back)
    assert max_abs(d, diff) == 0.0

    q = Context.rational()
    g = functions.LogMonomialSum.from_terms(
        q, [(q.comp(Fraction(2, 3)), q.comp(Fraction(1, 2)), 1)])
    back = functions.sum_from_json(q, functions.sum_to_json(q, g))
    assert len(functions.subtract(q, g, back).terms) == 0


def test_sum_json_rejects_unknown_term_keys():
    ctx = Context.double()
    with pytest.raises(DomainError):
        functions.sum_from_json(
            ctx, {"terms": [{"coeff": "1", "s": "0", "logpow": 0}]})
    with pytest.raises(DomainError):
        functions.sum_from_json(ctx, {"coeffs": [1.0]})
