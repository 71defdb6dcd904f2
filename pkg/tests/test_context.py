"""Backend contexts: arithmetic determinism, formatting, half-plane guard."""

from fractions import Fraction

import pytest

from hardymono.context import Context, QComplex
from hardymono.errors import BackendError, DomainError, HalfPlaneError


def test_modes_and_eps():
    d = Context.double()
    b = Context.bigfloat(256)
    q = Context.rational()
    assert d.mode == "double" and d.bits == 53
    assert b.mode == "bigfloat" and b.bits == 256
    assert q.mode == "rational" and q.bits is None
    assert d.eps == 2.0 ** -52
    assert q.eps == 0.0
    assert b.eps == 2.0 ** -255


def test_for_bits_maps_53_to_double():
    assert Context.for_bits(53).mode == "double"
    assert Context.for_bits(128).mode == "bigfloat"
    with pytest.raises(DomainError):
        Context.bigfloat(32)


def test_unknown_tolerance_rejected():
    with pytest.raises(DomainError):
        Context.double(no_such_tol=1.0)


def test_replace_overrides_one_tolerance():
    ctx = Context.double()
    ctx2 = ctx.replace(membership_tol=1e-6)
    assert ctx2.membership_tol == 1e-6
    assert ctx2.root_cluster_tol == ctx.root_cluster_tol
    assert ctx.membership_tol == 1e-9


def test_half_plane_guard():
    ctx = Context.double()
    ctx.require_exponent(ctx.comp(0.0))
    ctx.require_exponent(ctx.comp(-0.45, 5.0))
    with pytest.raises(HalfPlaneError):
        ctx.require_exponent(ctx.comp(-0.5))
    with pytest.raises(HalfPlaneError):
        ctx.require_exponent(ctx.comp(-2.0, 1.0))


def test_rational_arithmetic_is_exact():
    ctx = Context.rational()
    third = ctx.comp(Fraction(1, 3))
    with ctx.guard():
        val = third * 3 - ctx.one
    assert ctx.is_zero_scalar(val)


def test_qcomplex_basic_ops():
    a = QComplex(Fraction(1, 2), Fraction(1, 3))
    b = QComplex(2, -1)
    assert (a + b).re == Fraction(5, 2)
    assert (a * b).im == Fraction(1, 6)  # (1/2)(-1) + (1/3)(2)
    assert a.conjugate().im == Fraction(-1, 3)
    assert (a / a - 1).abs2() == 0


def test_fmt_parse_real_roundtrip_double():
    ctx = Context.double()
    for x in (0.0, -0.0, 1.0, 1 / 3, -2.7182818284590455e-12):
        text = ctx.fmt_real(x)
        assert ctx.parse_real(text) == (x + 0.0)
    assert ctx.fmt_real(-0.0) == "0.0"


def test_fmt_parse_real_roundtrip_bigfloat():
    import mpmath
    ctx = Context.bigfloat(128)
    with ctx.guard():
        x = mpmath.mpf(1) / 7
    text = ctx.fmt_real(x)
    with ctx.guard():
        back = ctx.parse_real(text)
        err = abs(back - x)
    assert float(err) < 1e-38  # 128/3 = 42 digits carried


def test_fmt_parse_rational_exact():
    ctx = Context.rational()
    assert ctx.fmt_real(Fraction(-7, 3)) == "-7/3"
    assert ctx.parse_real("-7/3") == Fraction(-7, 3)
    z = ctx.comp(Fraction(1, 3), Fraction(-2, 5))
    pair = ctx.fmt_complex_pair(z)
    assert ctx.is_zero_scalar(ctx.parse_complex_pair(pair) - z)


def test_from_text_complex_forms():
    ctx = Context.double()
    assert ctx.from_text("0.5") == 0.5
    z = ctx.from_text("-0.25+1.5i")
    assert ctx.re(z) == -0.25 and ctx.im(z) == 1.5
    z = ctx.from_text("2-0.5i")
    assert ctx.re(z) == 2.0 and ctx.im(z) == -0.5


def test_exact_lift_and_back():
    ctx = Context.double()
    q = ctx.to_exact(ctx.comp(0.5, -0.25))
    assert isinstance(q, QComplex)
    assert ctx.from_exact(q) == complex(0.5, -0.25)
    with pytest.raises(BackendError):
        Context.rational().sqrt_real(Fraction(2))


def test_sqrt_real_fallback_handles_huge_fractions():
    ctx = Context.rational()
    huge = Fraction(10 ** 400 + 1, 3)
    val = ctx.sqrt_real(huge, allow_float_fallback=True)
    assert isinstance(val, float)
    assert val > 0.0


def test_digit_budget_tracks_bits():
    assert Context.double().digits == 17
    assert Context.bigfloat(256).digits == 85
