"""Rational symbol reconstruction and termwise Laplace inversion.

The kernel direction gamma of the scaled moment matrix determines a rational
function alpha through the interpolation identity

    sum_i conj(alpha(i)) gamma_i / (1+i+s) * alpha(s) = sum_i gamma_i / (1+i+s),

so alpha = R/L where both sides are written over the common denominator
prod_{i in supp gamma} (1+i+s).  Expanding alpha(s)/(s+1) in partial
fractions and inverting the Laplace transform termwise produces the
log-monomial sum u_N whose exponents (with one copy at 0 removed) span the
reconstructed subspace.

Polynomials are plain coefficient lists, low degree first, over the active
backend's complex scalar.
"""

import math

from .context import HALF_PLANE_EDGE, HALF_PLANE_MARGIN
from .errors import (
    BackendError,
    CaseTwoAnomalyError,
    DegenerateKernelError,
    DegenerateSubspaceError,
    DomainError,
    PrecisionEscalationError,
    ReconstructionDomainError,
)
from . import functions
from .geometry import ExponentMultiset

ROOT_MAX_ITERS = 500


# ------------------------------------------------------------ polynomials


def poly_trim(ctx, p, rel=0.0):
    """Drop high-order coefficients of magnitude <= rel * max |coeff|.

    With rel = 0 only exact zeros go, which keeps the rational backend
    exact.  Always leaves at least the constant coefficient.
    """
    p = list(p)
    if not p:
        return [ctx.zero]
    cut = rel * max(ctx.absf(c) for c in p) if rel else 0.0
    while len(p) > 1 and ctx.absf(p[-1]) <= cut:
        p.pop()
    return p


def poly_degree(p):
    return len(p) - 1


def poly_eval(ctx, p, s):
    with ctx.guard():
        acc = ctx.zero
        for c in reversed(p):
            acc = acc * s + c
    return acc


def poly_add(ctx, a, b):
    with ctx.guard():
        n = max(len(a), len(b))
        return [(a[i] if i < len(a) else ctx.zero) +
                (b[i] if i < len(b) else ctx.zero) for i in range(n)]


def poly_scale(ctx, c, p):
    with ctx.guard():
        return [c * pi for pi in p]


def poly_mul(ctx, a, b):
    with ctx.guard():
        out = [ctx.zero] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            for j, bj in enumerate(b):
                out[i + j] = out[i + j] + ai * bj
    return out


def poly_deriv(ctx, p):
    if len(p) <= 1:
        return [ctx.zero]
    with ctx.guard():
        return [ctx.comp(k) * p[k] for k in range(1, len(p))]


def poly_monic(ctx, p):
    p = poly_trim(ctx, p)
    with ctx.guard():
        lead = p[-1]
        if ctx.absf(lead) == 0.0:
            raise DomainError("cannot normalize the zero polynomial")
        return [c / lead for c in p]


def poly_deflate(ctx, p, root):
    """Synthetic division by (s - root); returns (quotient, remainder)."""
    if len(p) < 2:
        raise DomainError("cannot deflate a constant polynomial")
    with ctx.guard():
        quot = [ctx.zero] * (len(p) - 1)
        carry = p[-1]
        for i in range(len(p) - 2, -1, -1):
            quot[i] = carry
            carry = p[i] + root * carry
    return quot, carry


def taylor_shift(ctx, p, c):
    """Coefficients of w -> p(c + w), by repeated synthetic division."""
    out = []
    cur = list(p)
    while len(cur) > 1:
        cur, rem = poly_deflate(ctx, cur, c)
        out.append(rem)
    out.append(cur[0])
    return out


def series_div(ctx, num, den, nterms):
    """First nterms coefficients of num/den as a power series; den[0] != 0."""
    with ctx.guard():
        out = []
        for k in range(nterms):
            acc = num[k] if k < len(num) else ctx.zero
            for j in range(1, min(k, len(den) - 1) + 1):
                acc = acc - den[j] * out[k - j]
            out.append(acc / den[0])
    return out


def poly_divmod(ctx, a, b):
    b = poly_trim(ctx, b)
    if len(b) == 1 and ctx.absf(b[0]) == 0.0:
        raise DomainError("polynomial division by zero")
    with ctx.guard():
        rem = list(a)
        if len(rem) < len(b):
            return [ctx.zero], poly_trim(ctx, rem)
        quot = [ctx.zero] * (len(rem) - len(b) + 1)
        for k in range(len(rem) - len(b), -1, -1):
            coef = rem[k + len(b) - 1] / b[-1]
            quot[k] = coef
            for j in range(len(b)):
                rem[k + j] = rem[k + j] - coef * b[j]
        rem = rem[:len(b) - 1] or [ctx.zero]
    return quot, poly_trim(ctx, rem)


def _poly_gcd_exact(ctx, a, b):
    # Euclid on exact rationals; monic result.
    a, b = poly_trim(ctx, a), poly_trim(ctx, b)
    while len(b) > 1 or ctx.absf(b[0]) != 0.0:
        _, r = poly_divmod(ctx, a, b)
        a, b = b, r
    return poly_monic(ctx, a)


# ------------------------------------------------------------ root finding


def _initial_ring(ctx, monic):
    n = len(monic) - 1
    radius = 1.0 + max(ctx.absf(c) for c in monic[:-1])
    pts = []
    for k in range(n):
        theta = 2.0 * math.pi * k / n + 0.4
        pts.append(ctx.comp(0.7 * radius * math.cos(theta),
                            0.7 * radius * math.sin(theta)))
    return pts


def _aberth(ctx, monic):
    """Simultaneous root iteration on a monic polynomial, all roots at once."""
    n = len(monic) - 1
    deriv = poly_deriv(ctx, monic)
    z = _initial_ring(ctx, monic)
    mags = [ctx.absf(c) for c in monic]
    eps = ctx.eps if ctx.eps > 0 else 2.0 ** -1022
    with ctx.guard():
        for _ in range(ROOT_MAX_ITERS):
            done = True
            for k in range(n):
                pz = poly_eval(ctx, monic, z[k])
                zmag = ctx.absf(z[k])
                # Certified residual bound: n * eps * sum |a_i| |z|^i.
                bound = n * eps * sum(m * zmag ** i for i, m in enumerate(mags))
                if ctx.absf(pz) <= bound:
                    continue
                done = False
                dz = poly_eval(ctx, deriv, z[k])
                if ctx.absf(dz) == 0.0:
                    z[k] = z[k] + ctx.comp(eps * (1.0 + zmag), eps)
                    continue
                newton = pz / dz
                repel = ctx.zero
                for j in range(n):
                    if j == k:
                        continue
                    diff = z[k] - z[j]
                    if ctx.absf(diff) == 0.0:
                        diff = ctx.comp(eps * (1.0 + zmag), 0)
                    repel = repel + ctx.one / diff
                denom = ctx.one - newton * repel
                if ctx.absf(denom) == 0.0:
                    z[k] = z[k] - newton
                else:
                    z[k] = z[k] - newton / denom
            if done:
                return z
    raise PrecisionEscalationError(
        "root iteration did not converge within the step budget",
        required_bits=2 * (ctx.bits or 53))


def _cluster_roots(ctx, raw):
    # Union-find within root_cluster_tol; cluster center is the mean.
    tol = ctx.root_cluster_tol
    parent = list(range(len(raw)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    with ctx.guard():
        for i in range(len(raw)):
            for j in range(i + 1, len(raw)):
                if ctx.absf(raw[i] - raw[j]) <= tol:
                    parent[find(i)] = find(j)
        groups = {}
        for i in range(len(raw)):
            groups.setdefault(find(i), []).append(raw[i])
        out = []
        for members in groups.values():
            center = members[0]
            for m in members[1:]:
                center = center + m
            out.append((center / ctx.comp(len(members)), len(members)))
    return out


def _polish_multiple(ctx, monic, center, mult):
    # A root of multiplicity m of p is a simple root of p^(m-1); a few
    # Newton steps there recover it to full precision.
    target = monic
    for _ in range(mult - 1):
        target = poly_deriv(ctx, target)
    dtarget = poly_deriv(ctx, target)
    with ctx.guard():
        z = center
        for _ in range(60):
            fz = poly_eval(ctx, target, z)
            dz = poly_eval(ctx, dtarget, z)
            if ctx.absf(dz) == 0.0:
                break
            step = fz / dz
            z = z - step
            if ctx.absf(step) <= ctx.eps * (1.0 + ctx.absf(z)):
                break
    return z


def find_roots(ctx, poly):
    """All roots of poly with multiplicities, [(root, mult), ...].

    Exact zeros of the constant end are split off first, the rest go
    through simultaneous iteration followed by clustering within
    root_cluster_tol and a Newton polish of every multiple root.
    """
    if ctx.mode == "rational":
        raise BackendError("root finding needs a floating backend")
    p = poly_trim(ctx, [ctx.as_comp(c) for c in poly])
    if len(p) < 2:
        raise DomainError("root finding needs degree >= 1")
    zero_mult = 0
    while len(p) > 1 and ctx.absf(p[0]) == 0.0:
        zero_mult += 1
        p = p[1:]
    clusters = []
    if zero_mult:
        clusters.append((ctx.zero, zero_mult))
    if len(p) == 2:
        with ctx.guard():
            clusters.append((-p[0] / p[1], 1))
    elif len(p) > 2:
        monic = poly_monic(ctx, p)
        for center, mult in _cluster_roots(ctx, _aberth(ctx, monic)):
            if mult > 1:
                center = _polish_multiple(ctx, monic, center, mult)
            clusters.append((center, mult))
    clusters.sort(key=lambda rm: (float(ctx.re(rm[0])), float(ctx.im(rm[0]))))
    return clusters


# --------------------------------------------------------- rational symbol


class RationalFn:
    """num(s)/den(s) with low-to-high coefficient lists and monic den."""

    def __init__(self, num, den):
        self.num = list(num)
        self.den = list(den)
        self.support = None
        self.interp_residual = None

    @property
    def degree(self):
        return max(len(self.num), len(self.den)) - 1

    def evaluate(self, ctx, s):
        with ctx.guard():
            s = ctx.as_comp(s)
            return poly_eval(ctx, self.num, s) / poly_eval(ctx, self.den, s)

    def to_json(self, ctx):
        return {
            "num": [ctx.fmt_complex_pair(c) for c in self.num],
            "den": [ctx.fmt_complex_pair(c) for c in self.den],
        }

    @classmethod
    def from_json(cls, ctx, data):
        return cls([ctx.parse_complex_pair(p) for p in data["num"]],
                   [ctx.parse_complex_pair(p) for p in data["den"]])

    def __repr__(self):
        return f"RationalFn(num={self.num!r}, den={self.den!r})"


def _reduce_common_roots(ctx, num, den):
    """Cancel shared roots (exact gcd when exact, clustered pairs when not)."""
    if len(num) < 2 or len(den) < 2:
        return num, den
    if ctx.mode == "rational":
        common = _poly_gcd_exact(ctx, num, den)
        if len(common) > 1:
            num = poly_divmod(ctx, num, common)[0]
            den = poly_divmod(ctx, den, common)[0]
        return num, den
    nroots = [r for r, m in find_roots(ctx, num) for _ in range(m)]
    droots = [r for r, m in find_roots(ctx, den) for _ in range(m)]
    used = [False] * len(droots)
    with ctx.guard():
        for rn in nroots:
            for i, rd in enumerate(droots):
                if not used[i] and ctx.absf(rn - rd) <= ctx.root_cluster_tol:
                    used[i] = True
                    num, _ = poly_deflate(ctx, num, rn)
                    den, _ = poly_deflate(ctx, den, rd)
                    break
    return num, den


def build_alpha(ctx, gamma, alpha_values):
    """Rational symbol interpolating alpha_values on the support of gamma.

    Writes both sides of the defining identity over the common denominator
    prod_{i in supp}(1+i+s) and reduces; the support keeps the original
    moment indices, so the factors (1+i+s) use the caller's labeling.
    """
    if not gamma or len(gamma) != len(alpha_values):
        raise DomainError("gamma and alpha_values must be equal-length, nonempty")
    gam = [ctx.as_comp(g) for g in gamma]
    val = [ctx.as_comp(v) for v in alpha_values]
    mags = [ctx.absf(g) for g in gam]
    peak = max(mags)
    if peak == 0.0:
        raise DomainError("gamma must be nonzero")
    support_tol = 0.0 if ctx.mode == "rational" else 2.0 ** (-(ctx.bits or 53) / 2)
    supp = [i for i, m in enumerate(mags) if m > support_tol * peak]
    r_num = [ctx.zero]
    l_num = [ctx.zero]
    with ctx.guard():
        for i in supp:
            prod = [ctx.one]
            for j in supp:
                if j != i:
                    prod = poly_mul(ctx, prod, [ctx.comp(1 + j), ctx.one])
            r_num = poly_add(ctx, r_num, poly_scale(ctx, gam[i], prod))
            l_num = poly_add(ctx, l_num,
                             poly_scale(ctx, ctx.conj(val[i]) * gam[i], prod))
    trim_tol = 0.0 if ctx.mode == "rational" else 2.0 ** (-(ctx.bits or 53) / 2)
    r_num = poly_trim(ctx, r_num, rel=trim_tol)
    l_num = poly_trim(ctx, l_num, rel=trim_tol)
    r_peak = max(ctx.absf(c) for c in r_num)
    l_peak = max(ctx.absf(c) for c in l_num)
    if l_peak <= trim_tol * max(r_peak, peak) or l_peak == 0.0:
        raise DegenerateKernelError(
            "interpolation denominator L vanishes identically")
    num, den = _reduce_common_roots(ctx, r_num, l_num)
    with ctx.guard():
        lead = den[-1]
        den = [c / lead for c in den]
        num = [c / lead for c in num]
    alpha = RationalFn(num, den)
    alpha.support = tuple(supp)
    with ctx.guard():
        resid = 0.0
        for i in supp:
            have = alpha.evaluate(ctx, ctx.comp(i))
            resid = max(resid, ctx.absf(have - val[i]))
    alpha.interp_residual = resid
    return alpha


# -------------------------------------------------------- partial fractions


class PartialFractionForm:
    """Expansion sum_j sum_r (r-1)! c_j^r / (s - lam_j)^r of alpha(s)/(s+1).

    poles is a list of (lam, mult, coeffs) with coeffs = (c^1, ..., c^mult).
    The pole at -1 is produced symbolically from the explicit 1/(s+1)
    factor, never hunted numerically, so the exponent-0 bookkeeping
    downstream stays exact.
    """

    def __init__(self, poles, warnings=(), residual=0.0):
        self.poles = [(lam, int(mult), tuple(coeffs))
                      for lam, mult, coeffs in poles]
        self.warnings = tuple(warnings)
        self.residual = float(residual)

    def evaluate(self, ctx, s):
        with ctx.guard():
            s = ctx.as_comp(s)
            acc = ctx.zero
            for lam, mult, coeffs in self.poles:
                base = s - lam
                power = ctx.one
                for r in range(1, mult + 1):
                    power = power * base
                    acc = acc + ctx.comp(math.factorial(r - 1)) * coeffs[r - 1] / power
        return acc

    def to_json(self, ctx):
        return {
            "poles": [
                {"lambda": ctx.fmt_complex_pair(lam), "mult": mult,
                 "coeffs": [ctx.fmt_complex_pair(c) for c in coeffs]}
                for lam, mult, coeffs in self.poles],
            "warnings": list(self.warnings),
            "residual": repr(self.residual),
        }

    @classmethod
    def from_json(cls, ctx, data):
        poles = [(ctx.parse_complex_pair(entry["lambda"]), int(entry["mult"]),
                  tuple(ctx.parse_complex_pair(c) for c in entry["coeffs"]))
                 for entry in data["poles"]]
        return cls(poles, tuple(data.get("warnings", ())),
                   float(data.get("residual", "0")))

    def __repr__(self):
        parts = ", ".join(f"({lam!r}, {m})" for lam, m, _ in self.poles)
        return f"PartialFractionForm([{parts}])"


def _laurent_coeffs(ctx, num, den, lam, mult, warnings_list):
    """c^1..c^mult at a pole of den of order mult, by local Taylor data."""
    bits = ctx.bits or 53
    n_shift = taylor_shift(ctx, num, lam)
    d_shift = taylor_shift(ctx, den, lam)
    d_scale = max(ctx.absf(c) for c in d_shift)
    drop_tol = ctx.root_cluster_tol if ctx.mode != "rational" else 0.0
    for k in range(mult):
        low = ctx.absf(d_shift[k]) if k < len(d_shift) else 0.0
        if low > drop_tol * d_scale:
            warnings_list.append(
                f"pole of order {mult}: denominator Taylor coefficient {k} "
                f"is not negligible (|.| = {low:.3e})")
            break
    tail = d_shift[mult:]
    lead_tol = 0.0 if ctx.mode == "rational" else 2.0 ** (-bits / 2)
    if not tail or ctx.absf(tail[0]) <= lead_tol * d_scale:
        raise PrecisionEscalationError(
            "pole multiplicity unresolved at the current precision",
            required_bits=2 * bits)
    with ctx.guard():
        padded = list(n_shift) + [ctx.zero] * max(0, mult - len(n_shift))
        g = series_div(ctx, padded, tail, mult)
        coeffs = tuple(g[mult - r] / ctx.comp(math.factorial(r - 1))
                       for r in range(1, mult + 1))
    top = ctx.absf(coeffs[-1])
    coeff_scale = max(max(ctx.absf(c) for c in coeffs), 1.0)
    if top <= lead_tol * coeff_scale:
        warnings_list.append(
            f"leading coefficient at pole order {mult} is numerically zero")
    return coeffs


def _sample_points(ctx, poles):
    # Deterministic arc in the right half plane, pushed right until it
    # clears every pole by 0.3; pipeline poles sit in Re < -1/2 anyway.
    pts = []
    for t in range(12):
        base = complex(0.4 + 0.45 * t, 1.3 - 0.35 * t)
        shift = 0.0
        while any(abs(base + shift - complex(float(ctx.re(lam)), float(ctx.im(lam)))) < 0.3
                  for lam, _, _ in poles):
            shift += 1.0
        pts.append(ctx.comp(base.real + shift, base.imag))
    return pts


def partial_fractions_over_splus1(ctx, alpha, allow_case_ii=False):
    """Partial fraction form of alpha(s)/(s+1).

    The factor 1/(s+1) contributes a symbolic pole at exactly -1;
    denominator roots that land within root_cluster_tol of -1 merge into
    it.  A symbol with alpha(-1) = 0 has no pole at -1 at all ("case
    (ii)"), which is refused unless allow_case_ii is set because the
    pipeline can never produce it.
    """
    num = poly_trim(ctx, [ctx.as_comp(c) for c in alpha.num])
    den = poly_trim(ctx, [ctx.as_comp(c) for c in alpha.den])
    if poly_degree(num) > poly_degree(den):
        raise DomainError(
            "numerator degree exceeds denominator degree; the expansion "
            "would carry a polynomial part")
    warnings_list = []
    minus_one = ctx.comp(-1)
    num_scale = max(ctx.absf(c) for c in num)
    if num_scale == 0.0:
        raise DegenerateKernelError("zero symbol has no partial fraction form")
    at_minus_one = ctx.absf(poly_eval(ctx, num, minus_one))
    case_tol = 0.0 if ctx.mode == "rational" else ctx.root_cluster_tol
    case_ii = at_minus_one <= case_tol * num_scale
    if case_ii:
        if not allow_case_ii:
            raise CaseTwoAnomalyError(
                "symbol vanishes at s = -1, so the expansion has no pole "
                "there; pass allow_case_ii to expand anyway",
                value_at_minus_one=at_minus_one)
        warnings_list.append(
            "case (ii): symbol vanishes at s = -1; no pole at -1 produced")
        num, _ = poly_deflate(ctx, num, minus_one)
        big_den = den
        sym_mult = 0
    else:
        big_den = poly_mul(ctx, [ctx.one, ctx.one], den)
        sym_mult = 1
    pole_sites = []
    if len(den) > 1:
        for root, mult in find_roots(ctx, den):
            if ctx.absf(root - minus_one) <= ctx.root_cluster_tol:
                sym_mult += mult
                warnings_list.append(
                    "denominator root merged into the pole at -1")
            else:
                pole_sites.append((root, mult))
    if sym_mult:
        pole_sites.insert(0, (minus_one, sym_mult))
    if not pole_sites:
        raise DegenerateKernelError("the expansion has no poles")
    poles = []
    for lam, mult in pole_sites:
        coeffs = _laurent_coeffs(ctx, num, big_den, lam, mult, warnings_list)
        poles.append((lam, mult, coeffs))
    form = PartialFractionForm(poles, warnings_list, 0.0)
    resid = 0.0
    with ctx.guard():
        for s in _sample_points(ctx, poles):
            truth = poly_eval(ctx, num, s) / poly_eval(ctx, big_den, s)
            got = form.evaluate(ctx, s)
            resid = max(resid, ctx.absf(got - truth) / max(1.0, ctx.absf(truth)))
    form.residual = resid
    resid_tol = 1e-12 if ctx.mode == "rational" else (
        1e-6 if ctx.mode == "double" else 2.0 ** (-(ctx.bits) / 4))
    if resid > resid_tol:
        raise PrecisionEscalationError(
            f"partial fraction residual {resid:.3e} exceeds {resid_tol:.3e}",
            required_bits=2 * (ctx.bits or 53))
    return form


# --------------------------------------------------------- inverse Laplace


def inverse_laplace_uN(ctx, pf):
    """Log-monomial sum whose transform reproduces the expansion.

    Each term (r-1)! c^r / (s - lam)^r pulls back to
    conj(c^r) (log 1/x)^{r-1} x^{-conj(lam)-1}, written here on the
    (log x)^k basis, hence the alternating sign.
    """
    terms = []
    with ctx.guard():
        for lam, mult, coeffs in pf.poles:
            s_exp = -ctx.conj(lam) - ctx.one
            if float(ctx.re(s_exp)) <= HALF_PLANE_EDGE + HALF_PLANE_MARGIN:
                raise ReconstructionDomainError(
                    f"pole at {lam!r} maps to an exponent with "
                    f"Re = {float(ctx.re(s_exp))!r} outside the half plane")
            for r in range(1, mult + 1):
                sign = ctx.comp(-1 if (r - 1) % 2 else 1)
                terms.append((ctx.conj(coeffs[r - 1]) * sign, s_exp, r - 1))
    return functions.LogMonomialSum.from_terms(ctx, terms)


def exponent_multiset_from_poles(ctx, pf, reduce=True):
    """Exponent multiset {-conj(lam_j) - 1 : mult m_j} of the expansion.

    With reduce set (the default) one copy of the exponent 0 coming from
    the pole at -1 is removed; its absence means the symbol had no pole at
    -1, which is the case-(ii) anomaly.
    """
    pairs = []
    with ctx.guard():
        for lam, mult, _ in pf.poles:
            pairs.append((-ctx.conj(lam) - ctx.one, mult))
    if not reduce:
        return ExponentMultiset.from_pairs(ctx, pairs)
    removed = False
    reduced = []
    for s_exp, mult in pairs:
        if not removed and ctx.absf(s_exp) <= ctx.exponent_merge_tol:
            removed = True
            if mult > 1:
                reduced.append((s_exp, mult - 1))
        else:
            reduced.append((s_exp, mult))
    if not removed:
        raise CaseTwoAnomalyError(
            "no pole at -1: the multiset carries no exponent 0 to remove")
    if not reduced:
        raise DegenerateSubspaceError(
            "exponent multiset is empty after removing the copy at 0")
    return ExponentMultiset.from_pairs(ctx, reduced)
