"""Dense Hermitian linear algebra over a scalar context.

Only ring operations, conjugation, and ordered comparisons of real parts are
used (no square roots inside factorizations), so everything here runs on all
three backends; the exact rational backend yields certified PSD verdicts and
exact determinants.  Matrices are lists of lists of backend scalars, vectors
are lists.  Sizes in this package stay tiny (d <= 17), so O(n^3) with pure
Python scalars is fine even at 512 bits.

Every function wraps its arithmetic in ctx.guard() so big-float operations
run at the context's precision regardless of ambient mpmath state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import BackendError, DomainError, IllConditioningError

NEXT_BITS = (53, 128, 256, 512, 1024)


def identity(ctx, n):
    return [[ctx.one if i == j else ctx.zero for j in range(n)] for i in range(n)]


def mat_sub(ctx, a, b):
    with ctx.guard():
        return [[a[i][j] - b[i][j] for j in range(len(a))] for i in range(len(a))]


def mat_scale(ctx, a, c):
    with ctx.guard():
        return [[c * a[i][j] for j in range(len(a))] for i in range(len(a))]


def mat_vec(ctx, a, x):
    with ctx.guard():
        return [sum((a[i][j] * x[j] for j in range(len(x))), ctx.zero)
                for i in range(len(a))]


def vec_dot(ctx, x, y):
    """<x, y> = sum x_i conj(y_i)."""
    with ctx.guard():
        return sum((x[i] * ctx.conj(y[i]) for i in range(len(x))), ctx.zero)


def vec_norm_sq(ctx, x):
    with ctx.guard():
        return sum((ctx.abs2(x[i]) for i in range(len(x))), ctx.real(0))


def mat_max_abs(ctx, a):
    return max((ctx.absf(entry) for row in a for entry in row), default=0.0)


def hilbert_matrix(ctx, n):
    """K[i][j] = 1/(1+i+j), the moment matrix of the monomials 1..x^{n-1}."""
    with ctx.guard():
        return [[ctx.one / ctx.comp(1 + i + j) for j in range(n)] for i in range(n)]


def hilbert_inverse_exact(n):
    """Exact integer inverse of the n x n Hilbert matrix (math.comb formula)."""
    inv = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            inv[i][j] = ((-1) ** (i + j) * (i + j + 1)
                         * math.comb(n + i, n - j - 1) * math.comb(n + j, n - i - 1)
                         * math.comb(i + j, i) ** 2)
    return inv


@dataclass
class LdlResult:
    """Diagonal-pivoted A = P L D L^H P^T of a Hermitian matrix.

    perm[k] is the original index processed at elimination step k.  status is
    'pd' (all pivots above tol), 'psd' (stopped early: remaining block within
    tol of zero), or 'indefinite' (a Schur-complement diagonal certifiably
    negative, or a zero diagonal coupled to the rest).  D holds backend reals
    for the completed steps.
    """

    perm: list
    lower: list
    diag: list
    rank: int
    status: str
    min_diag: float
    fail_value: float


def ldl_decompose(ctx, a, psd_tol=0.0):
    with ctx.guard():
        return _ldl_decompose(ctx, a, psd_tol)


def _ldl_decompose(ctx, a, psd_tol):
    n = len(a)
    m = [list(row) for row in a]
    lower = identity(ctx, n)
    perm = list(range(n))
    diag = []
    tolb = ctx.real(psd_tol)
    min_diag = math.inf
    for k in range(n):
        p = k
        best = ctx.re(m[k][k])
        for i in range(k + 1, n):
            cand = ctx.re(m[i][i])
            if cand > best:
                best, p = cand, i
        if best < -tolb:
            return LdlResult(perm, lower, diag, k, "indefinite",
                             min(min_diag, float(best)), float(best))
        if not best > tolb:
            # Largest remaining diagonal is within tolerance of zero.  A PSD
            # matrix then has |off-diagonal| <= sqrt(d_i d_j) <= tol as well.
            off = 0.0
            for i in range(k, n):
                for j in range(k, n):
                    if i != j:
                        off = max(off, float(abs(ctx.re(m[i][j]))),
                                  float(abs(ctx.im(m[i][j]))))
            if off > float(tolb) * (10 + n):
                return LdlResult(perm, lower, diag, k, "indefinite",
                                 min(min_diag, float(best)), -off)
            return LdlResult(perm, lower, diag, k, "psd",
                             min(min_diag, float(best)), float(best))
        if p != k:
            perm[k], perm[p] = perm[p], perm[k]
            m[k], m[p] = m[p], m[k]
            for row in m:
                row[k], row[p] = row[p], row[k]
            for row in lower:
                row[k], row[p] = row[p], row[k]
            lower[k], lower[p] = lower[p], lower[k]
        d = best
        diag.append(d)
        min_diag = min(min_diag, float(d))
        for i in range(k + 1, n):
            lik = m[i][k] / d
            lower[i][k] = lik
            for j in range(k + 1, i + 1):
                m[i][j] = m[i][j] - lik * d * ctx.conj(lower[j][k])
                if j != i:
                    m[j][i] = ctx.conj(m[i][j])
    return LdlResult(perm, lower, diag, n, "pd", min_diag, min_diag)


def psd_verdict(ctx, a, psd_tol=None):
    """(is_psd, min_pivot_or_violation, rank) via pivoted LDL^H."""
    if psd_tol is None:
        psd_tol = default_psd_tol(ctx, a)
    res = ldl_decompose(ctx, a, psd_tol)
    return res.status != "indefinite", res.fail_value, res.rank


def default_psd_tol(ctx, a):
    return len(a) * ctx.eps * max(mat_max_abs(ctx, a), 1.0)


def det_hermitian(ctx, a, psd_tol=0.0):
    """Determinant of a Hermitian matrix via the pivoted factorization.

    Exact in rational mode.  Raises BackendError if diagonal pivoting breaks
    down (possible only for indefinite input), which no caller here feeds it.
    """
    res = ldl_decompose(ctx, a, psd_tol)
    if res.status == "indefinite" and res.rank < len(a):
        raise BackendError("diagonal pivoting broke down; matrix is indefinite")
    with ctx.guard():
        det = ctx.real(1)
        for d in res.diag:
            det = det * d
        if res.rank < len(a):
            det = det * ctx.real(0)
        return det


def solve_hermitian(ctx, a, b, min_pivot_rel=None):
    """Solve A x = b for Hermitian positive definite A.

    Raises IllConditioningError naming an estimated sufficient bit count when
    a pivot falls below min_pivot_rel times the largest pivot.
    """
    n = len(a)
    res = ldl_decompose(ctx, a, 0.0)
    if res.rank < n:
        raise IllConditioningError(
            "matrix is numerically singular at this precision",
            required_bits=_suggest_bits(ctx, math.inf))
    pivots = [float(d) for d in res.diag]
    ratio = max(pivots) / min(pivots)
    if min_pivot_rel is not None and min(pivots) < min_pivot_rel * max(pivots):
        raise IllConditioningError(
            f"pivot ratio {ratio:.3e} exceeds the working precision",
            required_bits=_suggest_bits(ctx, ratio))
    with ctx.guard():
        # A = P L D L^H P^T with perm[k] = original index at step k.
        y = [b[res.perm[k]] for k in range(n)]
        for k in range(n):
            for j in range(k):
                y[k] = y[k] - res.lower[k][j] * y[j]
        for k in range(n):
            y[k] = y[k] / res.diag[k]
        for k in range(n - 1, -1, -1):
            for j in range(k + 1, n):
                y[k] = y[k] - ctx.conj(res.lower[j][k]) * y[j]
        x = [ctx.zero] * n
        for k in range(n):
            x[res.perm[k]] = y[k]
        return x


def _suggest_bits(ctx, cond_ratio):
    have = ctx.bits if ctx.bits is not None else 4096
    need = have + 64
    if math.isfinite(cond_ratio) and cond_ratio > 0:
        need = int(math.ceil(math.log2(max(cond_ratio, 2.0)))) + 64
    for b in NEXT_BITS:
        if b >= max(need, have + 1):
            return b
    return max(need, 2 * have)


def gershgorin_interval(ctx, a):
    """Backend-real [lo, hi] containing all eigenvalues of Hermitian a.

    Disc radii use |re| + |im| per entry, an upper bound for the modulus that
    stays exact in rational mode.
    """
    with ctx.guard():
        lo = hi = None
        for i in range(len(a)):
            radius = ctx.real(0)
            for j in range(len(a)):
                if j != i:
                    radius = radius + abs(ctx.re(a[i][j])) + abs(ctx.im(a[i][j]))
            center = ctx.re(a[i][i])
            low, high = center - radius, center + radius
            lo = low if lo is None or low < lo else lo
            hi = high if hi is None or high > hi else hi
        return lo, hi


def min_eig_bisect(ctx, a, iters=None, psd_tol=None):
    """Smallest eigenvalue of Hermitian a by bisection on PSD(A - lambda I).

    Deterministic; resolution is (hi-lo)/2^iters from the Gershgorin interval.
    """
    n = len(a)
    if n == 0:
        raise DomainError("empty matrix")
    if psd_tol is None:
        psd_tol = default_psd_tol(ctx, a)
    if iters is None:
        iters = 70 if ctx.mode == "double" else min(2 * (ctx.bits or 256), 700)
    lo, hi = gershgorin_interval(ctx, a)
    if not float(hi - lo) > 0:
        return ctx.re(a[0][0])

    def shifted_psd(lam):
        with ctx.guard():
            shifted = [[a[i][j] - (lam if i == j else ctx.real(0))
                        for j in range(n)] for i in range(n)]
        return ldl_decompose(ctx, shifted, psd_tol).status != "indefinite"

    if shifted_psd(hi):
        return hi
    with ctx.guard():
        two = ctx.real(2)
    for _ in range(iters):
        with ctx.guard():
            mid = (lo + hi) / two
        if shifted_psd(mid):
            lo = mid
        else:
            hi = mid
        with ctx.guard():
            done = ctx.mode != "rational" and not float(hi - lo) > 0
        if done:
            break
    with ctx.guard():
        return (lo + hi) / two


def inverse_iteration(ctx, a, ridge, iters=3, start=None):
    """Dominant kernel-direction vector of Hermitian PSD a.

    Repeatedly solves (A + ridge I) y = x from a deterministic start vector;
    returns (unit vector, Rayleigh quotient, residual norm as float).  The
    ridge keeps the factorization well defined when A is numerically
    singular, which is exactly the intended use.
    """
    n = len(a)
    with ctx.guard():
        shifted = [[a[i][j] + (ctx.real(ridge) if i == j else ctx.real(0))
                    for j in range(n)] for i in range(n)]
    x = list(start) if start is not None else [ctx.one for _ in range(n)]
    for _ in range(iters):
        x = _rescale_by_peak(ctx, solve_hermitian(ctx, shifted, x))
    x = normalize_vector(ctx, x)
    ax = mat_vec(ctx, a, x)
    with ctx.guard():
        rayleigh = ctx.re(vec_dot(ctx, ax, x))
        resid = [ax[i] - rayleigh * x[i] for i in range(n)]
    return x, rayleigh, math.sqrt(max(float(vec_norm_sq(ctx, resid)), 0.0))


def _rescale_by_peak(ctx, x):
    """Divide x by its largest-modulus entry, exactly in every backend.

    Near-singular solves return iterates whose raw magnitude scales like
    1/ridge; dividing by the peak entry caps all entries at modulus 1
    without needing a square root, so rational mode stays exact and no
    float conversion can overflow.
    """
    with ctx.guard():
        peak_idx = max(range(len(x)), key=lambda i: ctx.abs2(x[i]))
        peak = x[peak_idx]
        if not ctx.abs2(peak) > 0:
            raise DomainError("cannot rescale the zero vector")
        return [xi / peak for xi in x]


def normalize_vector(ctx, x):
    with ctx.guard():
        nrm = ctx.sqrt_real(vec_norm_sq(ctx, x), allow_float_fallback=True)
        if not float(nrm) > 0:
            raise DomainError("cannot normalize the zero vector")
        scale = ctx.real(nrm) if ctx.mode == "rational" else nrm
        return [xi / scale for xi in x]
