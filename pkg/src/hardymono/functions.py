"""The log-monomial algebra on L^2[0,1] and the Hardy operator on it.

Functions here are finite sums  f(x) = sum_k  c_k (log x)^{m_k} x^{s_k}  with
Re(s_k) > -1/2, the exact domain on which x^s lies in L^2[0,1].  The algebra
is closed under the Hardy averaging operator

    (H f)(x)  = (1/x) * integral_0^x f(t) dt,

its adjoint  (H* f)(x) = integral_x^1 f(t)/t dt,  and the L^2 inner product,
all of which have closed forms used below:

    <(log x)^a x^t, (log x)^b x^s> = (-1)^{a+b} (a+b)! / (1+t+conj(s))^{a+b+1}

    H ((log x)^m x^s)  = sum_{k=0}^m  C(m,k) (-1)^{m-k} (m-k)!
                         / (s+1)^{m-k+1} * (log x)^k x^s

    H*((log x)^m)      = -(log x)^{m+1} / (m+1)
    H*((log x)^m x^s)  = (-1)^m m! / s^{m+1}
                         - sum_{k=0}^m (-1)^{m-k} (m!/k!) / s^{m-k+1}
                           * (log x)^k x^s          (s != 0)

On the double backend the bilinear forms are accumulated exactly over the
dyadic rationals represented by the floats and rounded once at the end; the
alternating (a+b)!-sized terms otherwise wipe out up to twelve digits for
high log powers.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import NamedTuple

from .context import Context, QComplex
from .errors import BackendError, DomainError


class LogTerm(NamedTuple):
    """One summand  coeff * (log x)^logpow * x^s."""

    coeff: object
    s: object
    logpow: int


def _sign(k):
    return -1 if k % 2 else 1


class LogMonomialSum:
    """Canonical finite sum of log-monomial terms.

    Canonical means: exponents validated against the half plane, exponents
    merged when within the context's merge tolerance (greedy scan over the
    sorted term list), log powers grouped, zero coefficients dropped, terms
    ordered by (Re s, Im s, logpow).  Instances are immutable.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=()):
        object.__setattr__(self, "terms", tuple(terms))

    def __setattr__(self, name, value):
        raise AttributeError("LogMonomialSum is immutable")

    @classmethod
    def from_terms(cls, ctx, raw_terms):
        """Build a canonical sum from (coeff, s, logpow) triples."""
        with ctx.guard():
            tol = ctx.exponent_merge_tol
            prepared = []
            for coeff, s, logpow in raw_terms:
                logpow = int(logpow)
                if logpow < 0:
                    raise DomainError("log power must be a nonnegative integer")
                ctx.require_exponent(s)
                prepared.append((float(ctx.re(s)), float(ctx.im(s)), logpow, coeff, s))
            prepared.sort(key=lambda item: (item[0], item[1], item[2]))

            groups = []  # [representative exponent, {logpow: coeff}]
            for re_f, im_f, logpow, coeff, s in prepared:
                target = None
                for group in groups:
                    if ctx.absf(s - group[0]) <= tol:
                        target = group
                        break
                if target is None:
                    target = [s, {}]
                    groups.append(target)
                bucket = target[1]
                bucket[logpow] = bucket[logpow] + coeff if logpow in bucket else coeff

            terms = []
            groups.sort(key=lambda g: (float(ctx.re(g[0])), float(ctx.im(g[0]))))
            for rep, bucket in groups:
                for logpow in sorted(bucket):
                    coeff = bucket[logpow]
                    if coeff == ctx.zero:
                        continue
                    terms.append(LogTerm(coeff, rep, logpow))
            return cls(terms)

    @property
    def is_zero(self):
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __repr__(self):
        if not self.terms:
            return "LogMonomialSum(0)"
        bits = [f"({t.coeff})*(log x)^{t.logpow}*x^({t.s})" for t in self.terms]
        return "LogMonomialSum(" + " + ".join(bits) + ")"


# ----------------------------------------------------------------- builders

def zero_sum():
    return LogMonomialSum(())


def monomial(ctx, s, coeff=None):
    """coeff * x^s (coeff defaults to 1)."""
    return LogMonomialSum.from_terms(
        ctx, [(ctx.one if coeff is None else coeff, ctx.as_comp(s), 0)])


def one(ctx):
    return monomial(ctx, ctx.zero)


def log_power(ctx, m, s=None, coeff=None):
    """coeff * (log x)^m * x^s (s defaults to 0, coeff to 1)."""
    expo = ctx.zero if s is None else ctx.as_comp(s)
    return LogMonomialSum.from_terms(
        ctx, [(ctx.one if coeff is None else coeff, expo, m)])


def add(ctx, f, g):
    return LogMonomialSum.from_terms(ctx, list(f.terms) + list(g.terms))


def subtract(ctx, f, g):
    return add(ctx, f, scale(ctx, ctx.comp(-1), g))


def scale(ctx, a, f):
    with ctx.guard():
        scaled = [(a * t.coeff, t.s, t.logpow) for t in f.terms]
    return LogMonomialSum.from_terms(ctx, scaled)


# ------------------------------------------------------------ inner product

def kernel_integral(ctx, t, a, s, b):
    """<(log x)^a x^t, (log x)^b x^s> for single monomials."""
    total = a + b
    if ctx.supports_exact:
        w = QComplex(1) + ctx.to_exact(t) + ctx.to_exact(s).conjugate()
        value = Fraction(_sign(total) * math.factorial(total)) / w ** (total + 1)
        return ctx.from_exact(value)
    with ctx.guard():
        w = 1 + t + ctx.conj(s)
        return (_sign(total) * math.factorial(total)) / w ** (total + 1)


def inner_product(ctx, f, g):
    """L^2[0,1] inner product <f, g> (conjugate-linear in g)."""
    if ctx.supports_exact:
        # Group terms by exponent: the kernel factor
        # (-1)^l l!/(1+t+conj(s))^{l+1} depends only on the exponent pair
        # and the total log power, so each block shares one base w and a
        # small per-l factor table.  Exact arithmetic makes the regrouping
        # lossless.
        one = QComplex(1)
        f_groups = {}
        for tf in f.terms:
            sf = ctx.to_exact(tf.s)
            slot = f_groups.setdefault((sf.re, sf.im), (sf, []))
            slot[1].append((ctx.to_exact(tf.coeff), tf.logpow))
        g_groups = {}
        for tg in g.terms:
            sg_conj = ctx.to_exact(tg.s).conjugate()
            slot = g_groups.setdefault((sg_conj.re, sg_conj.im), (sg_conj, []))
            slot[1].append((ctx.to_exact(tg.coeff).conjugate(), tg.logpow))
        total = QComplex(0)
        for sf, f_list in f_groups.values():
            for sg_conj, g_list in g_groups.values():
                w = one + sf + sg_conj
                factors = {}
                for cf, lf in f_list:
                    sub = QComplex(0)
                    for cg_conj, lg in g_list:
                        l_sum = lf + lg
                        factor = factors.get(l_sum)
                        if factor is None:
                            weight = Fraction(
                                _sign(l_sum) * math.factorial(l_sum))
                            factor = factors[l_sum] = \
                                weight / w ** (l_sum + 1)
                        sub = sub + cg_conj * factor
                    total = total + cf * sub
        return ctx.from_exact(total)
    with ctx.guard():
        total = ctx.zero
        g_data = [(ctx.conj(tg.coeff), ctx.conj(tg.s), tg.logpow)
                  for tg in g.terms]
        for tf in f.terms:
            for cg_conj, sg_conj, g_logpow in g_data:
                l_sum = tf.logpow + g_logpow
                w = 1 + tf.s + sg_conj
                total = total + tf.coeff * cg_conj \
                    * ((_sign(l_sum) * math.factorial(l_sum)) / w ** (l_sum + 1))
        return total


def norm_sq(ctx, f):
    """||f||^2 as a backend real scalar."""
    return ctx.re(inner_product(ctx, f, f))


def norm(ctx, f):
    """||f||; in rational mode falls back to float when irrational."""
    return ctx.sqrt_real(norm_sq(ctx, f), allow_float_fallback=True)


# -------------------------------------------------------------- the operator

def apply_hardy(ctx, f):
    """Hardy operator H f, computed term by term in closed form."""
    out = []
    with ctx.guard():
        for term in f.terms:
            inv = ctx.one / (term.s + 1)
            m = term.logpow
            for k in range(m + 1):
                j = m - k
                factor = math.comb(m, k) * math.factorial(j) * _sign(j)
                out.append((term.coeff * factor * inv ** (j + 1), term.s, k))
    return LogMonomialSum.from_terms(ctx, out)


def apply_hardy_adjoint(ctx, f):
    """Adjoint H* f = integral_x^1 f(t)/t dt, term by term in closed form.

    The s = 0 branch is exact; for s != 0 the closed form carries 1/s^{m+1}
    factors, so double precision loses accuracy when |s| is tiny but nonzero
    (the function itself stays tame; the representation does not).
    """
    out = []
    with ctx.guard():
        for term in f.terms:
            m = term.logpow
            if ctx.is_zero_scalar(term.s):
                out.append((term.coeff * _rat(ctx, -1, m + 1), ctx.zero, m + 1))
                continue
            inv = ctx.one / term.s
            boundary = term.coeff * (_sign(m) * math.factorial(m)) * inv ** (m + 1)
            out.append((boundary, ctx.zero, 0))
            for k in range(m + 1):
                j = m - k
                factor = _sign(j) * (math.factorial(m) // math.factorial(k))
                out.append((-term.coeff * factor * inv ** (j + 1), term.s, k))
    return LogMonomialSum.from_terms(ctx, out)


def _rat(ctx, num, den):
    if ctx.mode == "rational":
        return Fraction(num, den)
    if ctx.mode == "double":
        return num / den
    with ctx.guard():
        import mpmath
        return mpmath.mpf(num) / den


# ---------------------------------------------------------------- evaluation

def evaluate(ctx, f, x):
    """Pointwise value f(x) for 0 < x <= 1 (floating backends only)."""
    if ctx.mode == "rational":
        raise BackendError("pointwise evaluation needs a floating backend")
    xf = float(x)
    if not 0.0 < xf <= 1.0:
        raise DomainError(f"evaluation point {xf!r} outside (0, 1]")
    with ctx.guard():
        lx = ctx.log_real(ctx.real(x))
        total = ctx.zero
        for term in f.terms:
            total = total + term.coeff * lx ** term.logpow * ctx.exp(term.s * lx)
        return total


def truncated_inner_product(ctx, f, g, a):
    """integral_a^1 f(x) conj(g(x)) dx for 0 < a < 1.

    Used for distances to truncated functions; leaves the rational algebra
    (a^{s} is transcendental), so floating backends only.
    """
    if ctx.mode == "rational":
        raise BackendError("truncated integrals need a floating backend")
    af = float(a)
    if not 0.0 < af < 1.0:
        raise DomainError(f"truncation point {af!r} outside (0, 1)")
    with ctx.guard():
        la = ctx.log_real(ctx.real(a))
        total = ctx.zero
        for tf in f.terms:
            for tg in g.terms:
                p1 = 1 + tf.s + ctx.conj(tg.s)   # exponent of x plus one
                k_tot = tf.logpow + tg.logpow
                coeff = tf.coeff * ctx.conj(tg.coeff)
                upper = (_sign(k_tot) * math.factorial(k_tot)) / p1 ** (k_tot + 1)
                apow = ctx.exp(p1 * la)
                lower = ctx.zero
                for k in range(k_tot + 1):
                    j = k_tot - k
                    factor = _sign(j) * (math.factorial(k_tot) // math.factorial(k))
                    lower = lower + factor * la ** k * apow / p1 ** (j + 1)
                total = total + coeff * (upper - lower)
        return total


# -------------------------------------------------------------------- JSON

def sum_to_json(ctx, f):
    """JSON-ready dict; numbers are decimal strings at the context's digits."""
    return {
        "terms": [
            {
                "re": ctx.fmt_real(ctx.re(t.coeff)),
                "im": ctx.fmt_real(ctx.im(t.coeff)),
                "s_re": ctx.fmt_real(ctx.re(t.s)),
                "s_im": ctx.fmt_real(ctx.im(t.s)),
                "logpow": t.logpow,
            }
            for t in f.terms
        ]
    }


_TERM_KEYS = frozenset(("re", "im", "s_re", "s_im", "logpow"))


def sum_from_json(ctx, data):
    if not isinstance(data, dict) or "terms" not in data:
        raise DomainError("log-monomial JSON must be an object with a 'terms' list")
    raw = []
    for entry in data["terms"]:
        unknown = set(entry) - _TERM_KEYS
        if unknown:
            raise DomainError(
                f"unknown term keys {sorted(unknown)}; expected "
                f"re/im/s_re/s_im/logpow")
        coeff = ctx.comp(ctx.parse_real(entry.get("re", 0)),
                         ctx.parse_real(entry.get("im", 0)))
        s = ctx.comp(ctx.parse_real(entry.get("s_re", 0)),
                     ctx.parse_real(entry.get("s_im", 0)))
        raw.append((coeff, s, int(entry.get("logpow", 0))))
    return LogMonomialSum.from_terms(ctx, raw)
