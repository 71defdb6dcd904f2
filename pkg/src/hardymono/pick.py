"""Pick matrices for the commutant of the averaging operator, and the
maximal scaling constant C_N with its kernel vector.

A diagonal symbol alpha acting by x^s -> alpha(s) x^s has norm at most M
exactly when the Pick matrix ((M^2 - conj(alpha_i) alpha_j)/(1 + conj(s_i)
+ s_j)) is PSD for every finite point set.  The scaling stage applies this
with points 0..N and values C (i+1) m_i: C_N is the largest C keeping
K - C^2 B PSD, where K is the Hilbert matrix and B the moment-scaled one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (DegenerateKernelError, DomainError, IllConditioningError,
                     UnboundedScalingError)
from . import linalg

# Bisection upper-bound search gives up past this C^2; if K - c B is still
# PSD here the moments are effectively null and no finite C exists.
C_SQUARED_CAP = 2.0 ** 120

DOUBLE_MODE_MAX_N = 10


@dataclass(frozen=True)
class PickSystem:
    """Interpolation data: points s_i, target values alpha(s_i), bound M."""

    points: tuple
    values: tuple
    bound: object

    @classmethod
    def build(cls, ctx, points, values, bound=1):
        pts = [ctx.as_comp(p) for p in points]
        vals = [ctx.as_comp(v) for v in values]
        if len(pts) != len(vals):
            raise DomainError("points and values differ in length")
        if not pts:
            raise DomainError("empty interpolation system")
        for p in pts:
            ctx.require_exponent(p)
        for i in range(len(pts)):
            for j in range(i):
                if ctx.absf(pts[i] - pts[j]) <= ctx.exponent_merge_tol:
                    raise DomainError("interpolation points must be distinct")
        m = ctx.real(bound)
        if not float(m) > 0.0:
            raise DomainError("norm bound must be positive")
        return cls(tuple(pts), tuple(vals), m)


def pick_matrix(ctx, system):
    """A[i][j] = (M^2 - conj(alpha_i) alpha_j)/(1 + conj(s_i) + s_j)."""
    pts, vals, m = system.points, system.values, system.bound
    n = len(pts)
    with ctx.guard():
        m2 = m * m
        return [[(m2 - ctx.conj(vals[i]) * vals[j])
                 / (ctx.one + ctx.conj(pts[i]) + pts[j])
                 for j in range(n)] for i in range(n)]


@dataclass
class PsdReport:
    verdict: bool
    min_eig: object
    rank: int
    min_pivot: float


def is_psd(ctx, matrix, tol=None):
    """PSD verdict plus a bisection estimate of the smallest eigenvalue."""
    verdict, pivot, rank = linalg.psd_verdict(ctx, matrix, tol)
    min_eig = linalg.min_eig_bisect(ctx, matrix, psd_tol=tol)
    return PsdReport(verdict, min_eig, rank, pivot)


@dataclass(frozen=True)
class MomentSequence:
    """m[i] = <x^i, u> for i = 0..N against a unit wandering vector u."""

    values: tuple

    @classmethod
    def build(cls, ctx, values):
        vals = tuple(ctx.as_comp(v) for v in values)
        if not vals:
            raise DomainError("empty moment sequence")
        return cls(vals)

    def truncated(self, ctx, count):
        if count > len(self.values):
            raise DomainError(
                f"moment sequence has {len(self.values)} entries, need {count}")
        return MomentSequence(self.values[:count])

    def to_json(self, ctx):
        return {"m": [ctx.fmt_complex_pair(v) for v in self.values]}

    @classmethod
    def from_json(cls, ctx, data):
        return cls(tuple(ctx.parse_complex_pair(v) for v in data["m"]))


@dataclass
class ScalingResult:
    c_value: object            # C_N, backend real
    gamma: list                # unit kernel vector, first significant entry > 0
    min_eig_trace: list = field(default_factory=list)
    degenerate: bool = False
    bisection_tol: float = 0.0
    kernel_residual: float = 0.0
    kernel_rayleigh: float = 0.0


def moment_scaled_matrix(ctx, moments, c_squared):
    """K - c B at the given c = C^2; entry (K - cB)[i][j] =
    (1 - c (i+1)(j+1) conj(m_i) m_j)/(1+i+j)."""
    m = moments.values
    n = len(m)
    with ctx.guard():
        beta = [(i + 1) * m[i] for i in range(n)]
        c_b = ctx.real(c_squared)
        return [[(ctx.one - c_b * ctx.conj(beta[i]) * beta[j])
                 / ctx.comp(1 + i + j) for j in range(n)] for i in range(n)]


def max_scaling_constant(ctx, moments, bisection_tol=None):
    """Largest C with K - C^2 B PSD, plus a kernel vector of the critical
    matrix.

    Bisection runs on c = C^2 with pivoted-LDL PSD tests, which works
    uniformly in all backends.  The kernel vector comes from inverse
    iteration on the PSD side of the bracket; for the degenerate case
    (K - c B identically ~0, kernel is everything) the first basis vector
    is returned and the result flagged.
    """
    n1 = len(moments.values)
    if ctx.mode == "double" and n1 - 1 > DOUBLE_MODE_MAX_N:
        raise IllConditioningError(
            f"double precision refused for N = {n1 - 1} > {DOUBLE_MODE_MAX_N}: "
            f"the moment matrix conditioning needs more bits", required_bits=128)
    if all(ctx.absf(v) <= 1e-300 for v in moments.values):
        raise UnboundedScalingError(
            "all moments vanish; the scaling problem has no finite optimum")
    if bisection_tol is None:
        bisection_tol = ctx.bisection_tol
    k_matrix = linalg.hilbert_matrix(ctx, n1)
    psd_tol = linalg.default_psd_tol(ctx, k_matrix)
    trace = []

    def psd_at(c):
        a = moment_scaled_matrix(ctx, moments, c)
        ok, pivot, _ = linalg.psd_verdict(ctx, a, psd_tol)
        trace.append((float(c), bool(ok), float(pivot)))
        return ok

    with ctx.guard():
        lo = ctx.real(0)
        hi = ctx.real(2)
    if not psd_at(lo):
        raise DegenerateKernelError("moment matrix not PSD even at C = 0")
    while psd_at(hi):
        with ctx.guard():
            lo = hi
            hi = hi * ctx.real(2)
        if float(hi) > C_SQUARED_CAP:
            raise UnboundedScalingError(
                "no finite scaling constant below the search cap; moments are "
                "numerically null")
    with ctx.guard():
        tol_b = ctx.real(bisection_tol)
        two = ctx.real(2)
    while True:
        with ctx.guard():
            width = hi - lo
            done = not width > tol_b * (ctx.real(1) if float(lo) < 1 else lo)
            mid = (lo + hi) / two
        if done:
            break
        if psd_at(mid):
            lo = mid
        else:
            hi = mid

    critical = moment_scaled_matrix(ctx, moments, lo)
    degenerate = linalg.mat_max_abs(ctx, critical) <= max(psd_tol, bisection_tol)
    if degenerate:
        gamma = [ctx.one] + [ctx.zero] * (n1 - 1)
        rayleigh, resid = 0.0, 0.0
    else:
        ridge = max(psd_tol, linalg.mat_max_abs(ctx, critical) * ctx.eps * n1, 1e-305)
        gamma, rayleigh_b, resid = linalg.inverse_iteration(ctx, critical, ridge)
        rayleigh = float(rayleigh_b)
        gamma = _canonical_phase(ctx, gamma)
    with ctx.guard():
        c_final = ctx.sqrt_real(lo, allow_float_fallback=True)
        if ctx.mode == "rational" and not isinstance(c_final, type(ctx.real(0))):
            c_final = ctx.real(c_final)
    return ScalingResult(c_final, gamma, trace, degenerate,
                         float(bisection_tol), resid, rayleigh)


def _canonical_phase(ctx, gamma):
    """Rotate so the first significant entry is positive real; unit norm."""
    peak = max(ctx.absf(g) for g in gamma)
    first = next(g for g in gamma if ctx.absf(g) > 0.01 * peak)
    mag = ctx.absf(first)
    with ctx.guard():
        if ctx.mode == "rational":
            phase = ctx.conj(first) / ctx.real(Fraction(mag))
        else:
            phase = ctx.conj(first) / ctx.real(mag)
        rotated = [phase * g for g in gamma]
    return linalg.normalize_vector(ctx, rotated)
