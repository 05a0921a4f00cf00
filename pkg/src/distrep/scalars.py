"""Exact scalar arithmetic.

Three scalar kinds, all immutable and totally ordered:

* ``Rational`` -- arbitrary-precision rationals (an alias of
  :class:`fractions.Fraction`, which already keeps lowest terms and a
  positive denominator).
* :class:`QuadScalar` -- elements ``a + b*sqrt(m)`` of a real quadratic
  field, with rational ``a``, ``b`` and a fixed nonnegative rational
  radicand ``m``.  Signs are decided exactly by integer arithmetic,
  never by floating point.
* :class:`DualScalar` -- first-order infinitesimal duals
  ``value + eps * E`` for an infinitesimal ``E > 0``, ordered
  lexicographically.  These drive symbolic perturbation: evaluating a
  predicate on duals yields its truth value infinitesimally to the
  right (or left) of a parameter value.

No operation in this module touches floating point except the explicit
approximation helpers, which are for display only.
"""
from __future__ import annotations

import decimal
import math
from fractions import Fraction
from typing import Union

Rational = Fraction

BaseScalar = Union[int, Fraction, "QuadScalar"]
Scalar = Union[int, Fraction, "QuadScalar", "DualScalar"]

_ZERO = Fraction(0)


def isqrt(m: int) -> int:
    """Largest integer s with s*s <= m.  Negative input is rejected."""
    if m < 0:
        raise ValueError(f"isqrt of negative integer {m}")
    return math.isqrt(m)


def rational_sqrt(f: Fraction):
    """Exact square root of a nonnegative rational, or None if irrational."""
    if f < 0:
        raise ValueError(f"square root of negative rational {f}")
    p, q = f.numerator, f.denominator
    sp, sq = math.isqrt(p), math.isqrt(q)
    if sp * sp == p and sq * sq == q:
        return Fraction(sp, sq)
    return None


def floor_sqrt_fraction(f: Fraction) -> int:
    """floor(sqrt(f)) for a nonnegative rational f, exactly."""
    if f < 0:
        raise ValueError("floor_sqrt_fraction of negative value")
    return math.isqrt(f.numerator // f.denominator)


class QuadScalar:
    """a + b*sqrt(m) with rational a, b and rational radicand m >= 0.

    Normalization: b == 0 forces m == 0, and a perfect-square radicand is
    folded into the rational part, so purely rational values have a single
    representation.  Mixing two values with different nonzero radicands in
    one operation is a bug in the caller and raises ``ValueError``.
    """

    __slots__ = ("a", "b", "m")

    def __init__(self, a, b=0, m=0):
        a = Fraction(a)
        b = Fraction(b)
        m = Fraction(m)
        if m < 0:
            raise ValueError(f"negative radicand {m}")
        if b == 0:
            m = _ZERO
        elif m == 0:
            b = _ZERO
        else:
            root = rational_sqrt(m)
            if root is not None:
                a += b * root
                b = _ZERO
                m = _ZERO
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "m", m)

    def __setattr__(self, name, value):
        raise AttributeError("QuadScalar is immutable")

    @staticmethod
    def sqrt_of(m) -> "QuadScalar":
        """The value sqrt(m) for rational m >= 0."""
        return QuadScalar(0, 1, m)

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    # -- radicand compatibility ------------------------------------------
    def _coerce(self, other):
        if isinstance(other, (int, Fraction)):
            return Fraction(other), _ZERO, self.m
        if isinstance(other, QuadScalar):
            if other.b == 0:
                return other.a, _ZERO, self.m
            if self.b == 0 or self.m == other.m:
                return other.a, other.b, other.m
            raise ValueError(
                f"mixed radicands {self.m} and {other.m} in QuadScalar operation"
            )
        return None

    # -- ring / field operations -----------------------------------------
    def __add__(self, other):
        co = self._coerce(other)
        if co is None:
            return NotImplemented
        oa, ob, m = co
        return QuadScalar(self.a + oa, self.b + ob, m)

    __radd__ = __add__

    def __neg__(self):
        return QuadScalar(-self.a, -self.b, self.m)

    def __sub__(self, other):
        co = self._coerce(other)
        if co is None:
            return NotImplemented
        oa, ob, m = co
        return QuadScalar(self.a - oa, self.b - ob, m)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        co = self._coerce(other)
        if co is None:
            return NotImplemented
        oa, ob, m = co
        return QuadScalar(
            self.a * oa + self.b * ob * m, self.a * ob + self.b * oa, m
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        co = self._coerce(other)
        if co is None:
            return NotImplemented
        oa, ob, m = co
        norm = oa * oa - ob * ob * m
        if norm == 0:
            raise ZeroDivisionError("division by zero QuadScalar")
        # multiply by the conjugate (oa - ob*sqrt(m)) / norm
        na = (self.a * oa - self.b * ob * m) / norm
        nb = (self.b * oa - self.a * ob) / norm
        return QuadScalar(na, nb, m)

    def __rtruediv__(self, other):
        return QuadScalar(other, 0, self.m) / self

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # -- exact sign and order --------------------------------------------
    def sign(self) -> int:
        """Exact sign of a + b*sqrt(m), by comparing a^2 against b^2*m."""
        a, b = self.a, self.b
        if b == 0:
            return -1 if a < 0 else (1 if a > 0 else 0)
        if b > 0:
            if a >= 0:
                return 1
            # a < 0 < b: positive iff b^2 m > a^2
            return 1 if b * b * self.m > a * a else -1
        if a <= 0:
            return -1
        # b < 0 < a: positive iff a^2 > b^2 m
        return 1 if a * a > b * b * self.m else -1

    def _cmp(self, other):
        co = self._coerce(other)
        if co is None:
            return None
        oa, ob, m = co
        return QuadScalar(self.a - oa, self.b - ob, m).sign()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, QuadScalar)):
            c = self._cmp(other)
            return c == 0
        return NotImplemented

    def __ne__(self, other):
        r = self.__eq__(other)
        return NotImplemented if r is NotImplemented else not r

    def __lt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c >= 0

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.m))

    def __bool__(self):
        return self.sign() != 0

    # -- display -----------------------------------------------------------
    def __float__(self):
        return float(approx_decimal(self, 28))

    def __repr__(self):
        if self.b == 0:
            return f"QuadScalar({self.a})"
        return f"QuadScalar({self.a} + {self.b}*sqrt({self.m}))"


class DualScalar:
    """value + eps * E for an infinitesimal E > 0, truncated at first order.

    ``value`` and ``eps`` are base scalars from the same field.  Comparison
    is lexicographic (value part first), so predicates evaluated on duals
    report their outcome in the right (eps > 0) or left (eps < 0) limit.
    """

    __slots__ = ("value", "eps")

    def __init__(self, value, eps=0):
        if isinstance(value, int):
            value = Fraction(value)
        if isinstance(eps, int):
            eps = Fraction(eps)
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "eps", eps)

    def __setattr__(self, name, value):
        raise AttributeError("DualScalar is immutable")

    @staticmethod
    def lift(x) -> "DualScalar":
        return x if isinstance(x, DualScalar) else DualScalar(x, 0)

    def __add__(self, other):
        o = DualScalar.lift(other)
        return DualScalar(self.value + o.value, self.eps + o.eps)

    __radd__ = __add__

    def __neg__(self):
        return DualScalar(-self.value, -self.eps)

    def __sub__(self, other):
        return self + (-DualScalar.lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = DualScalar.lift(other)
        return DualScalar(
            self.value * o.value, self.value * o.eps + self.eps * o.value
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = DualScalar.lift(other)
        v = self.value / o.value
        e = (self.eps * o.value - self.value * o.eps) / (o.value * o.value)
        return DualScalar(v, e)

    def __rtruediv__(self, other):
        return DualScalar.lift(other) / self

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def sign(self) -> int:
        s = sign(self.value)
        return s if s != 0 else sign(self.eps)

    def _cmp(self, other):
        return (self - DualScalar.lift(other)).sign()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, QuadScalar, DualScalar)):
            return self._cmp(other) == 0
        return NotImplemented

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __hash__(self):
        return hash((self.value, self.eps))

    def __repr__(self):
        return f"DualScalar({self.value!r} + {self.eps!r}*E)"


def sign(x) -> int:
    """Exact sign of any supported scalar."""
    if isinstance(x, (QuadScalar, DualScalar)):
        return x.sign()
    return -1 if x < 0 else (1 if x > 0 else 0)


def quad_sign(x) -> int:
    """Exact sign of a quadratic-field element (or plain rational)."""
    if isinstance(x, QuadScalar):
        return x.sign()
    return sign(x)


def scalar_min(a, b):
    return a if sign_of_diff(a, b) <= 0 else b


def scalar_max(a, b):
    return a if sign_of_diff(a, b) >= 0 else b


def sign_of_diff(a, b) -> int:
    if isinstance(a, DualScalar) or isinstance(b, DualScalar):
        return (DualScalar.lift(a) - DualScalar.lift(b)).sign()
    if isinstance(a, QuadScalar) or isinstance(b, QuadScalar):
        d = a - b
        return d.sign() if isinstance(d, QuadScalar) else sign(d)
    return sign(a - b)


def scalar_floor(x) -> int:
    """floor of a Rational or QuadScalar, exactly."""
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator // x.denominator
    if isinstance(x, QuadScalar):
        if x.b == 0:
            return x.a.numerator // x.a.denominator
        t = x.b * x.b * x.m  # (b*sqrt(m))^2
        root_floor = floor_sqrt_fraction(t)
        if x.b > 0:
            irr = root_floor
        else:
            exact = root_floor * root_floor * t.denominator == t.numerator
            irr = -root_floor if exact else -(root_floor + 1)
        k = (x.a.numerator // x.a.denominator) + irr
        # the estimate is off by at most one in either direction
        while x >= k + 1:
            k += 1
        while x < k:
            k -= 1
        return k
    raise TypeError(f"scalar_floor of {type(x).__name__}")


def dual_floor_index(x, unit) -> int:
    """Largest integer i with i*unit <= x under the lexicographic dual order.

    ``unit`` is a positive base scalar; ``x`` may be dual.  Equals
    floor(x/unit) except when x.value is exactly on a grid multiple, where
    the eps part decides whether the boundary index is kept.
    """
    if sign(unit) <= 0:
        raise ValueError("unit must be positive")
    xd = DualScalar.lift(x)
    if sign(xd.value) < 0:
        raise ValueError("dual_floor_index requires x.value >= 0")
    i = scalar_floor(xd.value / unit)
    if sign_of_diff(xd.value, i * unit) == 0 and sign(xd.eps) < 0:
        i -= 1
    return i


# -- parsing and display ---------------------------------------------------

def parse_rational(text: str) -> Fraction:
    """Parse "p/q" or "p" into an exact rational."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"cannot parse rational from {text!r}: {exc}") from None


def format_rational(x) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def approx_decimal(x, digits: int = 30) -> decimal.Decimal:
    """Decimal approximation of a base scalar, good to ~``digits`` digits."""
    with decimal.localcontext() as ctx:
        ctx.prec = digits + 10
        if isinstance(x, DualScalar):
            x = x.value
        if isinstance(x, QuadScalar):
            a = decimal.Decimal(x.a.numerator) / decimal.Decimal(x.a.denominator)
            if x.b == 0:
                return +a
            b = decimal.Decimal(x.b.numerator) / decimal.Decimal(x.b.denominator)
            m = decimal.Decimal(x.m.numerator) / decimal.Decimal(x.m.denominator)
            return +(a + b * m.sqrt())
        x = Fraction(x)
        return +(decimal.Decimal(x.numerator) / decimal.Decimal(x.denominator))


def approx_float(x) -> float:
    """float approximation for display; never used in decision predicates."""
    if isinstance(x, (int, Fraction)):
        return float(x)
    return float(approx_decimal(x, 25))
