"""Laguerre orthonormal basis of L^2(0,1) and the shift picture of 1 - H*.

The basis elements are e_n = sum_j C(n,j) (log x)^j / j!.  In the e_n
coordinates the operator 1 - H* acts as the unilateral shift, and the
operator family (H* - z)[(zbar - 1)H* - zbar]^{-1} for |z - 1| < 1 acts as
the Blaschke factor (S - a)(1 - abar S)^{-1} with a = 1 - z, which is an
isometry.  blaschke_shift_apply realizes that factor on finite coefficient
sequences with a certified truncation tail.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import NamedTuple

from .context import QComplex
from .errors import DomainError, IllConditioningError
from . import functions

DEFAULT_TRUNC = 256
TRUNC_CAP = 2_000_000


def laguerre_fn(ctx, n):
    """The basis element e_n as a LogMonomialSum (exponent 0 only)."""
    n = int(n)
    if n < 0:
        raise DomainError("basis index must be nonnegative")
    terms = []
    for j in range(n + 1):
        coeff = Fraction(math.comb(n, j), math.factorial(j))
        terms.append((ctx.comp(coeff), ctx.zero, j))
    return functions.LogMonomialSum.from_terms(ctx, terms)


def _phi_exact(n, m, s_exact):
    # d^m/ds^m of s^n/(s+1)^(n+1), written with powers of s/(s+1) so that
    # every factor is bounded on the half plane (|s/(s+1)| < 1 there).
    w = s_exact / (QComplex(1) + s_exact)
    inv = QComplex(1) / (QComplex(1) + s_exact)
    total = QComplex(0)
    for k in range(min(m, n) + 1):
        coeff = (math.comb(m, k) * _falling(n, k) * _rising(n + 1, m - k)
                 * (-1) ** (m - k))
        total = total + Fraction(coeff) * w ** (n - k) * inv ** (m + 1)
    return total


def _falling(n, k):
    out = 1
    for t in range(k):
        out *= n - t
    return out


def _rising(a, k):
    out = 1
    for t in range(k):
        out *= a + t
    return out


def phi_derivative(ctx, n, m, s):
    """<(log x)^m x^s, e_n>, i.e. the m-th s-derivative of s^n/(s+1)^(n+1)."""
    if s == ctx.zero:
        if n > m:
            return ctx.zero
        return ctx.comp(math.comb(m, n) * math.factorial(m) * (-1) ** (m - n))
    if ctx.supports_exact:
        return ctx.from_exact(_phi_exact(n, m, ctx.to_exact(s)))
    with ctx.guard():
        w = s / (1 + s)
        inv = 1 / (1 + s)
        total = ctx.zero
        for k in range(min(m, n) + 1):
            coeff = (math.comb(m, k) * _falling(n, k) * _rising(n + 1, m - k)
                     * (-1) ** (m - k))
            total = total + coeff * w ** (n - k) * inv ** (m + 1)
        return total


def laguerre_coeffs(ctx, f, nmax):
    """Expansion coefficients <f, e_n> for n = 0..nmax.

    Computed termwise from phi_derivative rather than by materializing e_n,
    so the rational backend stays exact and the float backends avoid the
    binomial blowup of the raw basis coefficients.
    """
    nmax = int(nmax)
    if nmax < 0:
        raise DomainError("nmax must be nonnegative")
    coeffs = []
    for n in range(nmax + 1):
        with ctx.guard():
            total = ctx.zero
            for term in f.terms:
                total = total + term.coeff * phi_derivative(ctx, n, term.logpow, term.s)
        coeffs.append(total)
    return coeffs


class ShiftResult(NamedTuple):
    coeffs: list
    tail_bound: float
    trunc: int


def blaschke_shift_apply(ctx, z, v, trunc=None, tail_tol=None):
    """Apply (S - a)(1 - abar S)^{-1}, a = 1 - z, to coefficients v.

    Returns the first ``trunc`` output coefficients plus a certified bound on
    the l2 mass of everything discarded.  For n >= L = len(v) the resolvent
    part satisfies w_n = abar w_{n-1} exactly, so the discarded mass is
    exactly |w_{L-1}| sqrt(1-q^2) q^{T-L} with q = |a|; that expression is
    the reported tail_bound.  When trunc is omitted it is chosen so the
    bound falls below tail_tol (default 1e-12, or 2^-bits/2 in big-float).
    """
    z = ctx.as_comp(z)
    v = list(v)
    if not v:
        raise DomainError("empty coefficient sequence")
    with ctx.guard():
        a = ctx.one - z
        abar = ctx.conj(a)
    q = ctx.absf(a)
    if q >= 1.0:
        raise DomainError(f"z = {z} lies outside the disc |z - 1| < 1")
    length = len(v)
    norm_v = math.sqrt(max(float(coeff_norm_sq(ctx, v)), 0.0))
    if tail_tol is None:
        tail_tol = 1e-12 if ctx.mode != "bigfloat" else 2.0 ** (-(ctx.bits // 2))
    if trunc is None:
        trunc = max(DEFAULT_TRUNC, length + 1)
        if q > 0.0 and norm_v > 0.0:
            w_cap = norm_v / math.sqrt(1.0 - q * q)
            scale = w_cap * math.sqrt(1.0 - q * q)
            if scale > tail_tol:
                needed = length + int(math.ceil(
                    math.log(tail_tol / scale) / math.log(q))) + 2
                trunc = max(trunc, needed)
        if trunc > TRUNC_CAP:
            raise IllConditioningError(
                f"|z - 1| = {q} needs more than {TRUNC_CAP} coefficients for "
                f"tail {tail_tol}", required_trunc=trunc)
    trunc = int(trunc)
    if trunc < length:
        raise DomainError("truncation length below the input length")
    with ctx.guard():
        w = []
        prev = ctx.zero
        for n in range(trunc):
            vn = v[n] if n < length else ctx.zero
            prev = abar * prev + vn
            w.append(prev)
        out = [-(a * w[0])]
        for n in range(1, trunc):
            out.append(w[n - 1] - a * w[n])
    w_last = ctx.absf(w[length - 1])
    tail = w_last * math.sqrt(max(1.0 - q * q, 0.0)) * q ** (trunc - length)
    return ShiftResult(out, tail, trunc)


def coeff_norm_sq(ctx, v):
    with ctx.guard():
        return sum((ctx.abs2(x) for x in v), ctx.real(0))
