"""Generalized finite monomial spaces and distances to them.

An ExponentMultiset {(s_j, m_j)} defines the space spanned by
(log x)^r x^{s_j} for 0 <= r < m_j.  This module builds Gram matrices over
that raw spanning set, solves the normal equations for projections, and
computes subspace distances two ways (residual norm, Gram determinant
ratio), plus the Cauchy determinant closed form, the Muntz partial sums,
and the roots-of-unity spaces used in the h -> 0 rate experiments.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import mpmath

from .errors import BackendError, DomainError
from . import functions, linalg


@dataclass(frozen=True)
class ExponentMultiset:
    """Exponents with multiplicities, tolerance-merged and sorted.

    entries is a tuple of (exponent scalar, multiplicity).  Order is by
    (Re s, Im s); within one exponent the induced basis runs over log powers
    0..mult-1.  Build through from_pairs so merging stays canonical.
    """

    entries: tuple

    @classmethod
    def from_pairs(cls, ctx, pairs):
        tol = ctx.exponent_merge_tol
        merged = []  # [exponent, mult]
        for s, mult in pairs:
            s = ctx.as_comp(s)
            ctx.require_exponent(s)
            mult = int(mult)
            if mult <= 0:
                raise DomainError("multiplicity must be a positive integer")
            hit = None
            for slot in merged:
                if ctx.absf(s - slot[0]) <= tol:
                    hit = slot
                    break
            if hit is None:
                merged.append([s, mult])
            else:
                hit[1] += mult
        merged.sort(key=lambda slot: (float(ctx.re(slot[0])), float(ctx.im(slot[0]))))
        return cls(tuple((s, m) for s, m in merged))

    @classmethod
    def from_text_list(cls, ctx, text):
        """Comma-separated exponent list; repeats accumulate multiplicity."""
        pairs = [(token.strip(), 1) for token in str(text).split(",") if token.strip()]
        if not pairs:
            raise DomainError("empty exponent list")
        return cls.from_pairs(ctx, pairs)

    @property
    def dimension(self):
        return sum(m for _, m in self.entries)

    def basis(self, ctx):
        """Spanning functions (log x)^r x^s in the canonical order."""
        out = []
        for s, mult in self.entries:
            for r in range(mult):
                out.append(functions.log_power(ctx, r, s=s))
        return out

    def labels(self, ctx):
        out = []
        for s, mult in self.entries:
            s_txt = "+".join(ctx.fmt_complex_pair(s))
            for r in range(mult):
                out.append(f"logpow={r};s={s_txt}")
        return out

    def to_json(self, ctx):
        return {"exponents": [{"s": ctx.fmt_complex_pair(s), "mult": m}
                              for s, m in self.entries]}

    @classmethod
    def from_json(cls, ctx, data):
        pairs = []
        for item in data["exponents"]:
            raw = item["s"]
            s = ctx.from_text(raw) if isinstance(raw, str) else ctx.parse_complex_pair(raw)
            pairs.append((s, item.get("mult", 1)))
        return cls.from_pairs(ctx, pairs)


class TruncatedIndicator:
    """The indicator of [a, 1] as a test function for distance diagnostics.

    Not a LogMonomialSum; it participates in distance computations through
    the two methods below, which is all the geometry routines need.
    """

    def __init__(self, a):
        self.a = float(a)
        if not 0.0 < self.a < 1.0:
            raise DomainError("indicator cutoff must lie in (0, 1)")

    def inner_with(self, ctx, g):
        """<chi_[a,1], g> = conj(integral_a^1 g)."""
        value = functions.truncated_inner_product(ctx, g, functions.one(ctx), self.a)
        return ctx.conj(value)

    def norm_sq(self, ctx):
        return ctx.real(1) - ctx.real(self.a)

    def __repr__(self):
        return f"TruncatedIndicator(a={self.a})"


def _fn_inner(ctx, f, g):
    """<f, g> where f is a LogMonomialSum or a duck-typed test function."""
    if isinstance(f, functions.LogMonomialSum):
        return functions.inner_product(ctx, f, g)
    return f.inner_with(ctx, g)


def _fn_norm_sq(ctx, f):
    if isinstance(f, functions.LogMonomialSum):
        return functions.norm_sq(ctx, f)
    return f.norm_sq(ctx)


def gram(ctx, space):
    """G[i][j] = <b_j, b_i> over the canonical basis; Hermitian PSD."""
    basis = space.basis(ctx)
    d = len(basis)
    g = [[None] * d for _ in range(d)]
    for i in range(d):
        for j in range(i + 1):
            val = functions.inner_product(ctx, basis[j], basis[i])
            g[i][j] = val
            g[j][i] = ctx.conj(val)
    return g


def project_coeffs(ctx, f, space, min_pivot_rel=None):
    """Normal-equation coefficients of the projection onto the space."""
    basis = space.basis(ctx)
    g = gram(ctx, space)
    rhs = [_fn_inner(ctx, f, b) for b in basis]
    if min_pivot_rel is None:
        min_pivot_rel = 4.0 * len(basis) ** 2 * ctx.eps
    coeffs = linalg.solve_hermitian(ctx, g, rhs, min_pivot_rel=min_pivot_rel)
    return coeffs, rhs, basis


def project(ctx, f, space, min_pivot_rel=None):
    """Orthogonal projection of f onto the space, as a LogMonomialSum."""
    coeffs, _, basis = project_coeffs(ctx, f, space, min_pivot_rel)
    out = functions.zero_sum()
    for c, b in zip(coeffs, basis):
        out = functions.add(ctx, out, functions.scale(ctx, c, b))
    return out


def dist_sq_to_space(ctx, f, space, method="residual"):
    """Squared distance from f to the space.

    'residual' solves the normal equations (primary path); 'detratio' uses
    the bordered-Gram determinant ratio (cross-check; Cauchy/Hilbert
    determinants underflow quickly as the dimension grows).
    """
    if method == "residual":
        coeffs, rhs, _ = project_coeffs(ctx, f, space)
        with ctx.guard():
            inner = sum((coeffs[i] * ctx.conj(rhs[i]) for i in range(len(rhs))),
                        ctx.zero)
            val = _fn_norm_sq(ctx, f) - ctx.re(inner)
            return val if val > ctx.real(0) else ctx.real(0)
    if method == "detratio":
        basis = space.basis(ctx)
        d = len(basis)
        g = gram(ctx, space)
        bordered = [[None] * (d + 1) for _ in range(d + 1)]
        for i in range(d):
            for j in range(d):
                bordered[i][j] = g[i][j]
        rhs = [_fn_inner(ctx, f, b) for b in basis]
        for i in range(d):
            bordered[i][d] = rhs[i]
            bordered[d][i] = ctx.conj(rhs[i])
        bordered[d][d] = ctx.comp(_fn_norm_sq(ctx, f))
        num = linalg.det_hermitian(ctx, bordered)
        den = linalg.det_hermitian(ctx, g)
        if not float(den) > 0.0:
            raise BackendError("Gram determinant vanished; use residual method")
        with ctx.guard():
            val = num / den
            return val if val > ctx.real(0) else ctx.real(0)
    raise DomainError(f"unknown distance method {method!r}")


def dist_to_space(ctx, f, space, method="residual"):
    return ctx.sqrt_real(dist_sq_to_space(ctx, f, space, method),
                         allow_float_fallback=True)


def cauchy_det(ctx, space):
    """det gram(space) in closed form for simple (multiplicity-1) exponents.

    prod_{j<i} |s_i - s_j|^2 / prod_{i,j} (1 + s_i + conj(s_j)).
    """
    for _, mult in space.entries:
        if mult != 1:
            raise DomainError("closed-form determinant needs simple exponents; "
                              "use the factorization determinant instead")
    points = [s for s, _ in space.entries]
    n = len(points)
    with ctx.guard():
        num = ctx.real(1)
        for i in range(n):
            for j in range(i):
                num = num * ctx.abs2(points[i] - points[j])
        den = ctx.one
        for i in range(n):
            for j in range(n):
                den = den * (ctx.one + points[i] + ctx.conj(points[j]))
        return num / ctx.re(den)


def muntz_partial_sums(ctx, exponents, terms=None):
    """Partial sums of sum_k (2 Re s_k + 1)/|s_k + 1|^2.

    Divergence of the series is equivalent to density of the monomial span;
    only the raw partial-sum data is reported (no verdict is decidable from
    finitely many terms).
    """
    out = []
    with ctx.guard():
        total = ctx.real(0)
        for k, s in enumerate(exponents):
            if terms is not None and k >= terms:
                break
            s = ctx.as_comp(s)
            ctx.require_exponent(s)
            term = (2 * ctx.re(s) + 1) / ctx.abs2(s + ctx.one)
            total = total + term
            out.append(total)
    return out


def roots_of_unity_space(ctx, s, m, h):
    """The m simple exponents s + h*omega^j, omega = exp(2 pi i/m).

    Requires Re(s) - h > -1/2 so every rotated exponent stays inside the
    half plane.
    """
    m = int(m)
    if m < 2:
        raise DomainError("need at least two roots of unity")
    s = ctx.as_comp(s)
    h_f = float(h)
    if not h_f > 0.0:
        raise DomainError("h must be positive")
    if not float(ctx.re(s)) - h_f > -0.5:
        raise DomainError(f"h = {h_f} too large: need Re(s) - h > -1/2")
    with ctx.guard():
        h_b = ctx.real(h)
        points = []
        for j in range(m):
            if ctx.mode == "rational":
                if m != 2:
                    raise BackendError("roots of unity are irrational for m > 2")
                omega = ctx.comp(1) if j == 0 else ctx.comp(-1)
            elif ctx.mode == "bigfloat":
                omega = mpmath.expjpi(mpmath.mpf(2 * j) / m)
            else:
                omega = cmath.exp(2j * math.pi * j / m)
            points.append((s + h_b * omega, 1))
    return ExponentMultiset.from_pairs(ctx, points)
