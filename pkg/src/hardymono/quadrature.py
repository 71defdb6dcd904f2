"""Independent numerical integration over (0, 1).

This module exists so the closed forms elsewhere in the package can be
checked against something that knows nothing about them.  It is used by the
test suite only and deliberately stays in plain double precision.

Integrands may blow up like x^p (log x)^M near 0 (p > -1).  The substitution
x = e^{-t} turns the integral into

    integral_0^oo  f(e^{-t}) e^{-t} dt,

whose integrand decays like t^M e^{-(1+p) t}: smooth, semi-infinite, and
safe for adaptive Simpson once truncated where the analytic tail bound drops
below tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, QuadratureError


@dataclass(frozen=True)
class Integrand:
    """Pointwise evaluator on (0, 1) plus growth hints for the x -> 0 end.

    ``min_power_re`` is (a lower bound for) the smallest Re(s) among the
    x^s factors; ``max_log_order`` bounds the power of log x.  The hints
    only steer truncation, never the values.
    """

    fn: object
    min_power_re: float = 0.0
    max_log_order: int = 0

    def __post_init__(self):
        if self.min_power_re <= -1.0:
            raise DomainError("integrand must be integrable: need min power > -1")


def adaptive_simpson(fn, a, b, tol=1e-10, max_depth=48):
    """Adaptive Simpson on [a, b] for a smooth complex-valued fn.

    Returns (value, error_estimate).  Raises QuadratureError if the depth
    cap is hit while the local error estimate still exceeds its share of
    the tolerance.
    """
    if not b > a:
        raise DomainError("adaptive_simpson needs b > a")

    def simpson(x0, x2, f0, f1, f2):
        return (x2 - x0) * (f0 + 4.0 * f1 + f2) / 6.0

    total = 0.0 + 0.0j
    err_total = 0.0
    mid = 0.5 * (a + b)
    stack = [(a, b, fn(a), fn(mid), fn(b), tol, 0)]
    while stack:
        x0, x2, f0, f1, f2, loc_tol, depth = stack.pop()
        xm = 0.5 * (x0 + x2)
        xl = 0.5 * (x0 + xm)
        xr = 0.5 * (xm + x2)
        fl = fn(xl)
        fr = fn(xr)
        whole = simpson(x0, x2, f0, f1, f2)
        left = simpson(x0, xm, f0, fl, f1)
        right = simpson(xm, x2, f1, fr, f2)
        delta = left + right - whole
        if abs(delta) <= 15.0 * loc_tol or depth >= max_depth:
            if depth >= max_depth and abs(delta) > 15.0 * loc_tol:
                raise QuadratureError(
                    f"adaptive Simpson hit depth {max_depth} with local error "
                    f"{abs(delta) / 15.0:.3e} > {loc_tol:.3e}",
                    best_estimate=complex(total + left + right + delta / 15.0))
            total += left + right + delta / 15.0  # Richardson correction
            err_total += abs(delta) / 15.0
        else:
            half = 0.5 * loc_tol
            stack.append((x0, xm, f0, fl, f1, half, depth + 1))
            stack.append((xm, x2, f1, fr, f2, half, depth + 1))
    return total, err_total


def integrate(integrand, tol=1e-10):
    """integral_0^1 of the integrand, via the x = e^{-t} substitution.

    Returns (value, error_estimate) where the estimate combines the Simpson
    error and the analytic truncation bound.
    """
    if not isinstance(integrand, Integrand):
        integrand = Integrand(integrand)
    decay = 1.0 + integrand.min_power_re      # e^{-decay * t} envelope
    m_ord = integrand.max_log_order

    def transformed(t):
        x = math.exp(-t)
        return integrand.fn(x) * x

    # Amplitude estimate for |g(t)| <= amp * t^M e^{-decay t} from samples.
    probe = [0.5, 1.0, 2.0, 4.0, 8.0]
    amp = 1e-300
    for t in probe:
        envelope = (t ** m_ord) * math.exp(-decay * t)
        if envelope > 0.0:
            amp = max(amp, abs(transformed(t)) / envelope)
    amp = max(amp, 1.0)

    def tail_bound(t_cut):
        # integral_T^oo t^M e^{-qt} dt <= 2 T^M e^{-qT} / q  once qT >= 2M
        if decay * t_cut < 2.0 * m_ord + 2.0:
            return math.inf
        return 2.0 * amp * (t_cut ** m_ord) * math.exp(-decay * t_cut) / decay

    t_cut = max(8.0, (2.0 * m_ord + 2.0) / decay)
    while tail_bound(t_cut) > tol / 2.0:
        t_cut *= 1.5
        if t_cut > 1e5:
            raise QuadratureError("cannot truncate the transformed integral")

    value, simp_err = adaptive_simpson(transformed, 0.0, t_cut, tol=tol / 2.0)
    return value, simp_err + tail_bound(t_cut)


def integrate_prefix(integrand, b, tol=1e-10):
    """integral_0^b for 0 < b <= 1, reusing the substitution machinery.

    Uses integral_0^b f = b * integral_0^1 f(b v) dv; the v -> 0 behaviour
    matches the original hints.
    """
    bf = float(b)
    if not 0.0 < bf <= 1.0:
        raise DomainError("prefix endpoint must lie in (0, 1]")
    inner = Integrand(lambda v: integrand.fn(bf * v),
                      integrand.min_power_re, integrand.max_log_order)
    value, err = integrate(inner, tol=tol / max(bf, 1e-12))
    return bf * value, bf * err
