"""Scalar backends and the computation context.

Every numerical routine in this package takes an explicit :class:`Context`
as its first argument.  The context fixes the scalar backend:

* ``double``   -- IEEE binary64 via Python ``float`` / ``complex``.  Bilinear
  forms are still accumulated exactly over the dyadic rationals the floats
  represent and rounded once at the end (see :mod:`hardymono.functions`), so
  heavy cancellation does not poison results.
* ``bigfloat`` -- mpmath ``mpf`` / ``mpc`` at a fixed bit count.  Precision is
  applied through :meth:`Context.guard`, which scopes mpmath's working
  precision to the current operation; no precision state leaks out.
* ``rational`` -- exact complex rationals (:class:`QComplex`).  Available
  wherever no roots or transcendentals are needed; operations that genuinely
  need them raise :class:`~hardymono.errors.BackendError`.

Default tolerances derive from the bit count and can be overridden per
context.
"""

from __future__ import annotations

import cmath
import math
import re as _re
from contextlib import contextmanager
from fractions import Fraction

import mpmath

from .errors import BackendError, DomainError, HalfPlaneError

# Exponents s of x^s must satisfy Re(s) > -1/2 (membership in L^2[0,1]).
# Values within this margin of the boundary line are rejected outright.
HALF_PLANE_EDGE = -0.5
HALF_PLANE_MARGIN = 1e-12

ALLOWED_CONFIG_BITS = (53, 128, 256, 512)


class QComplex:
    """Complex number with exact rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def _coerce(value):
        if isinstance(value, QComplex):
            return value
        if isinstance(value, (int, Fraction)):
            return QComplex(value)
        if isinstance(value, float):
            return QComplex(Fraction(value))
        if isinstance(value, complex):
            return QComplex(Fraction(value.real), Fraction(value.imag))
        return None

    def conjugate(self):
        return QComplex(self.re, -self.im)

    def abs2(self):
        return self.re * self.re + self.im * self.im

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QComplex(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QComplex(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QComplex(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QComplex(self.re * o.re - self.im * o.im,
                        self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        d = o.abs2()
        if d == 0:
            raise ZeroDivisionError("division by zero QComplex")
        return QComplex((self.re * o.re + self.im * o.im) / d,
                        (self.im * o.re - self.re * o.im) / d)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o.__truediv__(self)

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return QComplex(1) / self ** (-k)
        result = QComplex(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __neg__(self):
        return QComplex(-self.re, -self.im)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"QComplex({self.re!r}, {self.im!r})"


def _fraction_from_text(text):
    """Parse '3', '-0.25', or 'p/q' into an exact Fraction."""
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        return Fraction(int(num), int(den))
    return Fraction(text)


_COMPLEX_SPLIT = _re.compile(
    r"^\s*(?P<re>[+-]?[0-9./]+)?\s*(?P<im>[+-]\s*[0-9./]*|[0-9./]*)i\s*$"
)


def parse_complex_text(text):
    """Parse '0.5', '-0.25+1.5i', '1/3', '2i', '-i' into (re, im) Fractions.

    Scientific notation is deliberately not accepted here; this syntax is for
    human-entered exponents where exact decimal/fraction forms are expected.
    """
    text = text.strip()
    if not text:
        raise DomainError("empty scalar string")
    if "i" not in text:
        return _fraction_from_text(text), Fraction(0)
    match = _COMPLEX_SPLIT.match(text)
    if not match:
        raise DomainError(f"cannot parse complex scalar {text!r}")
    re_part = match.group("re")
    im_part = match.group("im").replace(" ", "")
    if im_part in ("", "+"):
        im_val = Fraction(1)
    elif im_part == "-":
        im_val = Fraction(-1)
    else:
        im_val = _fraction_from_text(im_part)
    re_val = _fraction_from_text(re_part) if re_part else Fraction(0)
    return re_val, im_val


class Context:
    """Scalar backend plus the tolerance bundle derived from its precision.

    Construct through :meth:`double`, :meth:`bigfloat`, or :meth:`rational`.
    Tolerance attributes may be overridden by keyword; everything else is
    immutable by convention.
    """

    def __init__(self, mode, bits, **tolerances):
        if mode not in ("double", "bigfloat", "rational"):
            raise DomainError(f"unknown backend mode {mode!r}")
        self.mode = mode
        self.bits = bits
        eff = bits if bits is not None else 4096  # rational: nominal, exact ops
        self.eps = 0.0 if mode == "rational" else 2.0 ** (1 - eff)
        self.digits = max(17, eff // 3)
        # Tolerance defaults, all overridable.
        self.exponent_merge_tol = tolerances.pop(
            "exponent_merge_tol",
            0.0 if mode == "rational" else (1e-9 if mode == "double" else 2.0 ** (-eff / 2)))
        self.root_cluster_tol = tolerances.pop(
            "root_cluster_tol",
            1e-6 if mode == "double" else
            (2.0 ** (-80) if mode == "rational" else 2.0 ** (-eff / 4)))
        # Rational mode caps the bisection target: the arithmetic is exact, so
        # chasing 2^(-eff/3) would loop for thousands of steps on fractions of
        # exploding height.
        self.bisection_tol = tolerances.pop(
            "bisection_tol",
            2.0 ** (-80) if mode == "rational" else 2.0 ** (-eff / 3))
        self.membership_tol = tolerances.pop("membership_tol", 1e-9)
        if tolerances:
            raise DomainError(f"unknown tolerance overrides: {sorted(tolerances)}")

    # ---------------------------------------------------------------- setup

    @classmethod
    def double(cls, **tol):
        return cls("double", 53, **tol)

    @classmethod
    def bigfloat(cls, bits, **tol):
        if bits < 64:
            raise DomainError("bigfloat context needs at least 64 bits; use double()")
        return cls("bigfloat", int(bits), **tol)

    @classmethod
    def rational(cls, **tol):
        return cls("rational", None, **tol)

    @classmethod
    def for_bits(cls, bits, **tol):
        """Map a config bit count onto a backend (53 means double)."""
        if bits == 53:
            return cls.double(**tol)
        return cls.bigfloat(bits, **tol)

    def replace(self, **tol):
        """New context of the same mode with some tolerances overridden."""
        merged = {
            "exponent_merge_tol": self.exponent_merge_tol,
            "root_cluster_tol": self.root_cluster_tol,
            "bisection_tol": self.bisection_tol,
            "membership_tol": self.membership_tol,
        }
        merged.update(tol)
        return Context(self.mode, self.bits, **merged)

    @contextmanager
    def guard(self):
        """Scope mpmath working precision to this context's bit count.

        No-op for the double and rational backends.  All public operations
        wrap their arithmetic in this guard, so callers never need to touch
        mpmath state.
        """
        if self.mode == "bigfloat":
            with mpmath.workprec(self.bits):
                yield
        else:
            yield

    # -------------------------------------------------------- construction

    def real(self, value):
        """Backend real scalar from int, float, Fraction, or string."""
        if self.mode == "rational":
            if isinstance(value, str):
                return _fraction_from_text(value)
            if isinstance(value, (int, Fraction)):
                return Fraction(value)
            if isinstance(value, float):
                return Fraction(value)
            if isinstance(value, QComplex):
                if value.im != 0:
                    raise DomainError("complex value where a real was expected")
                return value.re
            raise BackendError(f"cannot coerce {type(value).__name__} to exact rational")
        if self.mode == "bigfloat":
            with self.guard():
                return mpmath.mpf(value.strip()) if isinstance(value, str) else mpmath.mpf(
                    mpmath.mpmathify(value))
        if isinstance(value, str):
            return float(Fraction(value) if "/" in value else value)
        return float(value)

    def comp(self, re_value, im_value=0):
        """Backend complex scalar from real/imag parts."""
        if self.mode == "rational":
            return QComplex(self.real(re_value), self.real(im_value))
        if self.mode == "bigfloat":
            with self.guard():
                return mpmath.mpc(self.real(re_value), self.real(im_value))
        return complex(self.real(re_value), self.real(im_value))

    def from_text(self, text):
        """Backend complex scalar from '0.5', '-0.25+1.5i', '1/3' syntax."""
        re_val, im_val = parse_complex_text(str(text))
        if self.mode == "rational":
            return QComplex(re_val, im_val)
        return self.comp(re_val, im_val)

    def as_comp(self, value):
        """Coerce a number or string into this backend's complex scalar."""
        if isinstance(value, str):
            return self.from_text(value)
        if self.mode == "rational":
            coerced = QComplex._coerce(value)
            if coerced is None:
                raise BackendError(
                    f"cannot coerce {type(value).__name__} to exact rational")
            return coerced
        if self.mode == "bigfloat":
            with self.guard():
                return mpmath.mpc(value)
        if isinstance(value, QComplex):
            return complex(value)
        return complex(value)

    @property
    def zero(self):
        return self.comp(0)

    @property
    def one(self):
        return self.comp(1)

    # ------------------------------------------------------------- algebra

    def conj(self, z):
        if self.mode == "bigfloat":
            return mpmath.conj(z)
        if isinstance(z, QComplex):
            return z.conjugate()
        return z.conjugate() if isinstance(z, complex) else z

    def re(self, z):
        if self.mode == "bigfloat":
            return mpmath.re(z)
        if isinstance(z, QComplex):
            return z.re
        return z.real if isinstance(z, complex) else z

    def im(self, z):
        if self.mode == "bigfloat":
            return mpmath.im(z)
        if isinstance(z, QComplex):
            return z.im
        return z.imag if isinstance(z, complex) else type(z)(0)

    def abs2(self, z):
        """|z|^2 as a backend real scalar (exact in rational mode)."""
        r, i = self.re(z), self.im(z)
        return r * r + i * i

    def absf(self, z):
        """|z| as a plain float; for thresholds and diagnostics only."""
        if isinstance(z, QComplex):
            try:
                return math.hypot(float(z.re), float(z.im))
            except OverflowError:
                return math.inf
        if self.mode == "bigfloat":
            return float(mpmath.fabs(z))
        return abs(complex(z))

    def sqrt_real(self, x, allow_float_fallback=False):
        """Square root of a nonnegative backend real.

        Rational mode returns an exact Fraction when x is a perfect square of
        rationals, otherwise raises unless ``allow_float_fallback`` converts
        through float (used only at reporting boundaries).
        """
        if self.mode == "rational":
            frac = Fraction(x)
            if frac < 0:
                raise DomainError("sqrt of negative value")
            num, den = frac.numerator, frac.denominator
            rn, rd = math.isqrt(num), math.isqrt(den)
            if rn * rn == num and rd * rd == den:
                return Fraction(rn, rd)
            if allow_float_fallback:
                # mpf holds huge integers exactly, so this survives fractions
                # whose numerator and denominator overflow float separately.
                with mpmath.workprec(64):
                    return float(mpmath.sqrt(mpmath.mpf(num) / mpmath.mpf(den)))
            raise BackendError("irrational square root in rational mode")
        if self.mode == "bigfloat":
            with self.guard():
                return mpmath.sqrt(mpmath.mpf(x))
        return math.sqrt(x)

    def exp(self, z):
        if self.mode == "rational":
            raise BackendError("exp needs a floating backend")
        if self.mode == "bigfloat":
            with self.guard():
                return mpmath.exp(z)
        return cmath.exp(z) if isinstance(z, complex) else math.exp(z)

    def log_real(self, x):
        if self.mode == "rational":
            raise BackendError("log needs a floating backend")
        if self.mode == "bigfloat":
            with self.guard():
                return mpmath.log(mpmath.mpf(x))
        return math.log(x)

    def power(self, base_real, z):
        """base^z for real base > 0 and complex z."""
        return self.exp(z * self.log_real(base_real))

    # ------------------------------------------------------------ exponents

    def require_exponent(self, s):
        """Validate Re(s) > -1/2 + margin; return s unchanged."""
        if float(self.re(s)) <= HALF_PLANE_EDGE + HALF_PLANE_MARGIN:
            raise HalfPlaneError(
                f"exponent with Re(s) = {float(self.re(s))!r} is outside the "
                f"half plane Re(s) > -1/2")
        return s

    def is_zero_scalar(self, z):
        return z == self.zero

    # ---------------------------------------------------------- exact path

    @property
    def supports_exact(self):
        """True when scalars are exactly representable as QComplex."""
        return self.mode in ("double", "rational")

    def to_exact(self, z):
        """Lossless lift of a double/rational scalar into QComplex."""
        q = QComplex._coerce(z)
        if q is None:
            raise BackendError(f"cannot lift {type(z).__name__} exactly")
        return q

    def from_exact(self, q):
        """Round a QComplex back into the backend representation."""
        if self.mode == "rational":
            return q
        if self.mode == "double":
            return complex(float(q.re), float(q.im))
        with self.guard():
            return mpmath.mpc(mpmath.mpf(q.re), mpmath.mpf(q.im))

    def real_from_exact(self, x):
        if self.mode == "rational":
            return Fraction(x)
        if self.mode == "double":
            return float(x)
        with self.guard():
            return mpmath.mpf(x)

    # ------------------------------------------------------- serialization

    def fmt_real(self, x):
        """Deterministic decimal (or p/q) string for a backend real."""
        if self.mode == "rational":
            frac = Fraction(x)
            return f"{frac.numerator}/{frac.denominator}" if frac.denominator != 1 \
                else str(frac.numerator)
        if self.mode == "bigfloat":
            with self.guard():
                return mpmath.nstr(mpmath.mpf(x) + mpmath.mpf(0), self.digits,
                                   strip_zeros=True, min_fixed=-4, max_fixed=12)
        return repr(float(x) + 0.0)  # + 0.0 flushes the sign off -0.0

    def fmt_complex_pair(self, z):
        return [self.fmt_real(self.re(z)), self.fmt_real(self.im(z))]

    def parse_real(self, value):
        """Inverse of fmt_real; also accepts plain JSON numbers."""
        if isinstance(value, str):
            if self.mode == "rational":
                return _fraction_from_text(value)
            if self.mode == "bigfloat":
                with self.guard():
                    return mpmath.mpf(value)
            return float(Fraction(value)) if "/" in value else float(value)
        return self.real(value)

    def parse_complex_pair(self, pair):
        if isinstance(pair, (list, tuple)):
            if len(pair) != 2:
                raise DomainError("complex pair must have exactly two entries")
            return self.comp(self.parse_real(pair[0]), self.parse_real(pair[1]))
        return self.comp(self.parse_real(pair))

    def __repr__(self):
        return f"Context(mode={self.mode!r}, bits={self.bits!r})"
