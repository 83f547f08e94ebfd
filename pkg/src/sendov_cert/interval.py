"""Outward-rounded interval arithmetic on binary64 endpoints.

Every operation returns an interval guaranteed to contain the exact real image
of its operands.  Endpoint rounding uses error-free transformations (TwoSum,
Dekker products) to decide the direction of the rounding error; the result is
then moved by one ulp only on the side where the exact value may lie.  When
the error term cannot be computed exactly (overflow, underflow, NaN) both
sides are nudged unconditionally.

Exact numbers (``int`` and ``fractions.Fraction``) are accepted everywhere and
are converted to their tightest enclosing interval.  Multiplying by an exact
zero yields exact zero, which lets the same formula code run on rational
points (see :mod:`sendov_cert.exact`).
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

__all__ = [
    "Interval",
    "DomainError",
    "sqrt",
    "root",
    "pow_int",
    "pow_rat",
    "exp",
    "ln",
    "sin_enclosure",
    "as_interval",
    "PI",
    "LN2",
]

_INF = math.inf
_SPLIT = 134217729.0  # 2**27 + 1
_SAFE_LO = 1e-290
_SAFE_HI = 1e290
_nextafter = math.nextafter


class DomainError(ValueError):
    """Operand outside the domain of an operation."""


def _down(x: float) -> float:
    return _nextafter(x, -_INF)


def _up(x: float) -> float:
    return _nextafter(x, _INF)


# -- directed endpoint primitives ---------------------------------------------
#
# NaN error terms fall through to the nudging branch on purpose.


def _add_down(a: float, b: float) -> float:
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    if err >= 0.0:
        return s
    return _down(s)


def _add_up(a: float, b: float) -> float:
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    if err <= 0.0:
        return s
    return _up(s)


def _prod_err(a: float, b: float, p: float) -> float:
    c = _SPLIT * a
    ah = c - (c - a)
    al = a - ah
    c = _SPLIT * b
    bh = c - (c - b)
    bl = b - bh
    return ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _mul_down(a: float, b: float) -> float:
    p = a * b
    if p == 0.0:
        if a == 0.0 or b == 0.0:
            return 0.0
        return _down(p)
    ap = abs(p)
    if ap < _SAFE_LO or ap > _SAFE_HI:
        return _down(p)
    if _prod_err(a, b, p) >= 0.0:
        return p
    return _down(p)


def _mul_up(a: float, b: float) -> float:
    p = a * b
    if p == 0.0:
        if a == 0.0 or b == 0.0:
            return 0.0
        return _up(p)
    ap = abs(p)
    if ap < _SAFE_LO or ap > _SAFE_HI:
        return _up(p)
    if _prod_err(a, b, p) <= 0.0:
        return p
    return _up(p)


def _div_resid_sign(a: float, b: float, q: float) -> float:
    """Sign of (a/b - q) expressed as a float with that sign, NaN if unknown."""
    if not (_SAFE_LO < abs(q) < _SAFE_HI) or abs(a) > _SAFE_HI or abs(b) > _SAFE_HI:
        return math.nan
    p = q * b
    r = (a - p) - _prod_err(q, b, p)
    return r if b > 0.0 else -r


def _div_down(a: float, b: float) -> float:
    q = a / b
    if a == 0.0:
        return 0.0
    if _div_resid_sign(a, b, q) >= 0.0:
        return q
    return _down(q)


def _div_up(a: float, b: float) -> float:
    q = a / b
    if a == 0.0:
        return 0.0
    if _div_resid_sign(a, b, q) <= 0.0:
        return q
    return _up(q)


def _sqrt_pair(a: float) -> tuple[float, float]:
    if a == 0.0:
        return 0.0, 0.0
    y = math.sqrt(a)
    if a < _SAFE_LO or a > _SAFE_HI or y == _INF:
        return _down(y), _up(y)
    p = y * y
    d = (p - a) + _prod_err(y, y, p)
    if d == 0.0:
        return y, y
    if d > 0.0:
        return _down(y), y
    if d < 0.0:
        return y, _up(y)
    return _down(y), _up(y)


def _pow_down(x: float, k: int) -> float:
    """Lower bound of x**k for x >= 0, k >= 0."""
    result = 1.0
    base = x
    while k:
        if k & 1:
            result = _mul_down(result, base)
        k >>= 1
        if k:
            base = _mul_down(base, base)
    return result


def _pow_up(x: float, k: int) -> float:
    result = 1.0
    base = x
    while k:
        if k & 1:
            result = _mul_up(result, base)
        k >>= 1
        if k:
            base = _mul_up(base, base)
    return result


# -- exact conversions ----------------------------------------------------------


@lru_cache(maxsize=4096)
def _enclose_fraction(fr: Fraction) -> tuple[float, float]:
    f = float(fr)  # correctly rounded
    if math.isinf(f):
        return (_down(f), f) if f > 0 else (f, _up(f))
    back = Fraction(f)
    if back == fr:
        return f, f
    if back < fr:
        return f, _up(f)
    return _down(f), f


def _coerce(x) -> "Interval":
    t = type(x)
    if t is Interval:
        return x
    if t is float:
        return Interval(x, x)
    if t is int:
        if -(2**53) <= x <= 2**53:
            f = float(x)
            return Interval(f, f)
        return Interval(*_enclose_fraction(Fraction(x)))
    if t is Fraction:
        return Interval(*_enclose_fraction(x))
    if isinstance(x, Interval):
        return x
    if isinstance(x, (int, Fraction)):
        return _coerce(Fraction(x))
    if isinstance(x, float):
        return Interval(x, x)
    raise TypeError(f"cannot convert {type(x).__name__} to Interval")


def _is_exact_zero(x) -> bool:
    return type(x) in (int, Fraction) and x == 0


class Interval:
    """Closed real interval ``[lo, hi]`` with binary64 endpoints."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        if hi is None:
            hi = lo
        lo = float(lo)
        hi = float(hi)
        if lo != lo or hi != hi:
            raise ValueError("interval endpoint is NaN")
        if lo > hi:
            raise ValueError(f"empty interval [{lo!r}, {hi!r}]")
        self.lo = lo
        self.hi = hi

    # construction --------------------------------------------------------

    @classmethod
    def enclose(cls, value) -> "Interval":
        """Tightest interval containing an exact value (int, Fraction, decimal str)."""
        if isinstance(value, str):
            value = Fraction(value)
        return _coerce(value)

    @classmethod
    def hull_of(cls, items) -> "Interval":
        items = [_coerce(i) for i in items]
        return cls(min(i.lo for i in items), max(i.hi for i in items))

    # inspection ----------------------------------------------------------

    @property
    def width(self) -> float:
        return _sub_up(self.hi, self.lo)

    @property
    def mid(self) -> float:
        m = self.lo + (self.hi - self.lo) / 2
        if not (self.lo <= m <= self.hi):
            m = 0.5 * self.lo + 0.5 * self.hi
        return m

    @property
    def is_bounded(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, x) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        if isinstance(x, float):
            return self.lo <= x <= self.hi
        fx = Fraction(x)
        return Fraction(self.lo) <= fx <= Fraction(self.hi)

    def __contains__(self, x) -> bool:
        return self.contains(x)

    def overlaps(self, other) -> bool:
        o = _coerce(other)
        return self.lo <= o.hi and o.lo <= self.hi

    def hull(self, other) -> "Interval":
        o = _coerce(other)
        return Interval(min(self.lo, o.lo), max(self.hi, o.hi))

    def intersect(self, other) -> "Interval":
        o = _coerce(other)
        lo, hi = max(self.lo, o.lo), min(self.hi, o.hi)
        if lo > hi:
            raise ValueError("intervals are disjoint")
        return Interval(lo, hi)

    def __eq__(self, other):
        if not isinstance(other, Interval):
            return NotImplemented
        return self.lo == other.lo and self.hi == other.hi

    def __hash__(self):
        return hash((self.lo, self.hi))

    def __repr__(self):
        return f"Interval({self.lo!r}, {self.hi!r})"

    def __iter__(self):
        yield self.lo
        yield self.hi

    def to_json(self) -> list:
        return [self.lo, self.hi]

    # arithmetic ----------------------------------------------------------

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __pos__(self):
        return self

    def __abs__(self):
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return Interval(0.0, max(-self.lo, self.hi))

    def __add__(self, other):
        try:
            o = _coerce(other)
        except TypeError:
            return NotImplemented
        return Interval(_add_down(self.lo, o.lo), _add_up(self.hi, o.hi))

    __radd__ = __add__

    def __sub__(self, other):
        try:
            o = _coerce(other)
        except TypeError:
            return NotImplemented
        return Interval(_add_down(self.lo, -o.hi), _add_up(self.hi, -o.lo))

    def __rsub__(self, other):
        try:
            o = _coerce(other)
        except TypeError:
            return NotImplemented
        return Interval(_add_down(o.lo, -self.hi), _add_up(o.hi, -self.lo))

    def __mul__(self, other):
        if _is_exact_zero(other):
            return Fraction(0)
        try:
            o = _coerce(other)
        except TypeError:
            return NotImplemented
        a, b, c, d = self.lo, self.hi, o.lo, o.hi
        if a >= 0.0:
            if c >= 0.0:
                return Interval(_mul_down(a, c), _mul_up(b, d))
            if d <= 0.0:
                return Interval(_mul_down(b, c), _mul_up(a, d))
            return Interval(_mul_down(b, c), _mul_up(b, d))
        if b <= 0.0:
            if c >= 0.0:
                return Interval(_mul_down(a, d), _mul_up(b, c))
            if d <= 0.0:
                return Interval(_mul_down(b, d), _mul_up(a, c))
            return Interval(_mul_down(a, d), _mul_up(a, c))
        if c >= 0.0:
            return Interval(_mul_down(a, d), _mul_up(b, d))
        if d <= 0.0:
            return Interval(_mul_down(b, c), _mul_up(a, c))
        return Interval(
            min(_mul_down(a, d), _mul_down(b, c)),
            max(_mul_up(a, c), _mul_up(b, d)),
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            o = _coerce(other)
        except TypeError:
            return NotImplemented
        return _div(self, o)

    def __rtruediv__(self, other):
        if _is_exact_zero(other):
            if self.lo <= 0.0 <= self.hi:
                raise DomainError(f"division by interval containing zero: {self!r}")
            return Fraction(0)
        try:
            o = _coerce(other)
        except TypeError:
            return NotImplemented
        return _div(o, self)

    def __pow__(self, k):
        if isinstance(k, int):
            return self.pow_int(k)
        if isinstance(k, Fraction):
            return self.pow_rat(k)
        return NotImplemented

    # elementary functions -----------------------------------------------

    def sqrt(self) -> "Interval":
        if self.lo < 0.0:
            raise DomainError(f"sqrt of interval with negative part: {self!r}")
        return Interval(_sqrt_pair(self.lo)[0], _sqrt_pair(self.hi)[1])

    def root(self, n: int) -> "Interval":
        if n < 1:
            raise ValueError("root index must be a positive integer")
        if n == 1:
            return self
        if n == 2:
            return self.sqrt()
        if self.lo < 0.0:
            raise DomainError(f"real root of interval with negative part: {self!r}")
        return Interval(_root_down(self.lo, n), _root_up(self.hi, n))

    def pow_int(self, k: int) -> "Interval":
        if k == 0:
            return Interval(1.0, 1.0)
        if k < 0:
            if self.lo <= 0.0 <= self.hi:
                raise DomainError(f"negative power of interval containing zero: {self!r}")
            return _div(Interval(1.0, 1.0), self.pow_int(-k))
        a, b = self.lo, self.hi
        if a >= 0.0:
            return Interval(_pow_down(a, k), _pow_up(b, k))
        if b <= 0.0:
            if k % 2 == 0:
                return Interval(_pow_down(-b, k), _pow_up(-a, k))
            return Interval(-_pow_up(-a, k), -_pow_down(-b, k))
        if k % 2 == 0:
            return Interval(0.0, max(_pow_up(-a, k), _pow_up(b, k)))
        return Interval(-_pow_up(-a, k), _pow_up(b, k))

    def pow_rat(self, r) -> "Interval":
        """``x**r`` for rational ``r`` via ``root(x**p, q)``; requires ``x > 0``."""
        r = Fraction(r)
        if r.denominator == 1:
            return self.pow_int(r.numerator)
        if self.lo <= 0.0:
            raise DomainError(f"rational power of nonpositive interval: {self!r}")
        p, q = r.numerator, r.denominator
        if p < 0:
            return _div(Interval(1.0, 1.0), self.pow_int(-p).root(q))
        return self.pow_int(p).root(q)

    def exp(self) -> "Interval":
        return Interval(_exp_point(self.lo)[0], _exp_point(self.hi)[1])

    def ln(self) -> "Interval":
        if self.lo <= 0.0:
            raise DomainError(f"log of nonpositive interval: {self!r}")
        return Interval(_ln_point(self.lo)[0], _ln_point(self.hi)[1])

    def sin(self) -> "Interval":
        return sin_enclosure(self)


def _sub_up(a: float, b: float) -> float:
    return _add_up(a, -b)


def _div(x: Interval, y: Interval) -> Interval:
    a, b, c, d = x.lo, x.hi, y.lo, y.hi
    if c > 0.0:
        if a >= 0.0:
            return Interval(_div_down(a, d), _div_up(b, c))
        if b <= 0.0:
            return Interval(_div_down(a, c), _div_up(b, d))
        return Interval(_div_down(a, c), _div_up(b, c))
    if d < 0.0:
        if a >= 0.0:
            return Interval(_div_down(b, d), _div_up(a, c))
        if b <= 0.0:
            return Interval(_div_down(b, c), _div_up(a, d))
        return Interval(_div_down(b, d), _div_up(a, d))
    raise DomainError(f"division by interval containing zero: {y!r}")


# -- roots: libm candidate, rigorously verified ---------------------------------


def _root_down(x: float, n: int) -> float:
    if x == 0.0:
        return 0.0
    y = x ** (1.0 / n)
    step = 0.0
    # largest verified y with y**n <= x; widen geometrically if the candidate is off
    for _ in range(200):
        if _pow_up(y, n) <= x:
            nxt = _up(y)
            if step == 0.0 and _pow_up(nxt, n) <= x:
                y = nxt
                continue
            return y
        step = max(step * 2.0, abs(y - _down(y)))
        y = y - step if y - step > 0.0 else y / 2.0
    raise ArithmeticError(f"root lower bound failed for {x!r}")


def _root_up(x: float, n: int) -> float:
    if x == 0.0:
        return 0.0
    y = x ** (1.0 / n)
    step = 0.0
    for _ in range(200):
        if _pow_down(y, n) >= x:
            nxt = _down(y)
            if step == 0.0 and _pow_down(nxt, n) >= x:
                y = nxt
                continue
            return y
        step = max(step * 2.0, abs(_up(y) - y))
        y = y + step
    raise ArithmeticError(f"root upper bound failed for {x!r}")


# -- constants from exact rational series ----------------------------------------


def _atan_inv_bounds(k: int, terms: int) -> tuple[Fraction, Fraction]:
    """Bounds on atan(1/k) from consecutive partial sums of the alternating series."""
    s = Fraction(0)
    partial = []
    for n in range(terms + 1):
        s += Fraction((-1) ** n, (2 * n + 1) * k ** (2 * n + 1))
        partial.append(s)
    return min(partial[-2:]), max(partial[-2:])


def pi_bounds_rational() -> tuple[Fraction, Fraction]:
    lo5, hi5 = _atan_inv_bounds(5, 30)
    lo239, hi239 = _atan_inv_bounds(239, 10)
    return 16 * lo5 - 4 * hi239, 16 * hi5 - 4 * lo239


def _pi_enclosure() -> tuple[float, float]:
    lo, hi = pi_bounds_rational()
    return _enclose_fraction(lo)[0], _enclose_fraction(hi)[1]


def _ln2_enclosure() -> tuple[float, float]:
    # ln 2 = 2 atanh(1/3); tail after K terms is below next term / (1 - 1/9)
    t = Fraction(1, 3)
    s = Fraction(0)
    K = 40
    for k in range(K):
        s += t ** (2 * k + 1) / (2 * k + 1)
    tail = t ** (2 * K + 1) / (2 * K + 1) / (1 - t * t)
    return _enclose_fraction(2 * s)[0], _enclose_fraction(2 * (s + tail))[1]


PI = Interval(*_pi_enclosure())
LN2 = Interval(*_ln2_enclosure())
_HALF_PI = PI * Fraction(1, 2)


# -- exp: argument reduction by ln 2, Taylor with explicit remainder -------------

_EXP_TERMS = 16
# |r| <= 0.3467 after reduction: |r|**17/17! * e**|r| < 1e-22
_EXP_REM = Interval(-1e-22, 1e-22)


def _exp_point(x: float) -> tuple[float, float]:
    if x == 0.0:
        return 1.0, 1.0
    if x > 709.0:
        return (_SAFE_HI if x < 710.0 else 1.7e308), _INF
    if x < -744.0:
        return 0.0, 5e-324 if x < -745.2 else 1e-300
    k = round(x / 0.6931471805599453)
    r = Interval(x, x) - LN2 * k
    s = Interval(1.0, 1.0)
    for i in range(_EXP_TERMS, 0, -1):
        s = 1 + r * s / i
    s = s + _EXP_REM
    lo, hi = math.ldexp(s.lo, k), math.ldexp(s.hi, k)
    if lo < 1e-300 or hi == _INF:
        return max(0.0, _down(lo)), _up(hi)
    return lo, hi


# -- ln: reduction to [1/sqrt2, sqrt2), atanh series with explicit remainder ------

_LN_TERMS = 12
_INV_SQRT2 = 0.7071067811865476


def _ln_series(t: Interval) -> Interval:
    t2 = t * t
    s = Interval(1.0, 1.0) / (2 * _LN_TERMS + 1)
    for k in range(_LN_TERMS - 1, -1, -1):
        s = Interval(1.0, 1.0) / (2 * k + 1) + t2 * s
    body = 2 * t * s
    ta = max(-t.lo, t.hi)
    if ta == 0.0:
        return body
    # tail sum_{k>K} |t|^(2k+1)/(2k+1) <= |t|^(2K+3) / ((2K+3)(1-t^2))
    n = 2 * _LN_TERMS + 3
    tail = _pow_up(ta, n) / (n * (1.0 - 1.01 * ta * ta))
    tail = _up(_up(2.0 * tail))
    return body + Interval(-tail, tail)


def _ln_point(x: float) -> tuple[float, float]:
    if x == 1.0:
        return 0.0, 0.0
    if x == _INF:
        return 709.0, _INF
    m, e = math.frexp(x)
    if m < _INV_SQRT2:
        m *= 2.0
        e -= 1
    mi = Interval(m, m)
    t = (mi - 1) / (mi + 1)
    res = _ln_series(t)
    if e:
        res = res + LN2 * e
    return res.lo, res.hi


# -- sin on [0, pi]: fixed-point Taylor with directed integer rounding ------------

_SIN_PREC = 160


def _sin_fixed(X: int, P: int) -> tuple[int, int]:
    """Integer bounds (scaled by 2**-P) on sin(X / 2**P) for 0 <= X / 2**P <= 3.2.

    Terms of the Taylor series are carried once rounded down and once rounded
    up; the tail is bounded by the next term (Lagrange form, all derivatives of
    sin are bounded by 1).
    """
    sq = X * X
    x2_lo = sq >> P
    x2_hi = -((-sq) >> P)
    t_lo = t_hi = X
    s_lo = s_hi = X
    k = 0
    while True:
        k += 1
        d = (2 * k) * (2 * k + 1) << P
        t_lo = t_lo * x2_lo // d
        t_hi = -((-t_hi * x2_hi) // d)
        if k % 2:
            s_lo -= t_hi
            s_hi -= t_lo
        else:
            s_lo += t_lo
            s_hi += t_hi
        if k >= 4 and t_hi < (1 << (P - 90)):
            break
    d = (2 * k + 2) * (2 * k + 3) << P
    rem = -((-t_hi * x2_hi) // d) + 1
    return s_lo - rem, s_hi + rem


def _sin_point(x: float) -> tuple[float, float]:
    """Bounds on sin(x) for a float ``0 <= x <= 3.2``."""
    if x == 0.0:
        return 0.0, 0.0
    if x < 2.0**-30:
        # x - x**3/6 < sin x < x, and x**2/6 is below half an ulp
        return _down(x), x
    P = _SIN_PREC
    lo, hi = _sin_fixed(int(math.ldexp(x, P)), P)
    scale = 1 << P
    return _enclose_fraction(Fraction(lo, scale))[0], _enclose_fraction(Fraction(hi, scale))[1]


def sin_bounds_rational(lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    """Rational bounds on sin over [lo, hi], for 0 < lo <= hi < 1.5 (increasing branch)."""
    if not (0 < lo <= hi < Fraction(3, 2)):
        raise DomainError("sin_bounds_rational works on (0, 1.5) only")
    P = _SIN_PREC
    X_lo = math.floor(lo * (1 << P))
    X_hi = math.ceil(hi * (1 << P))
    s_lo, _ = _sin_fixed(X_lo, P)
    _, s_hi = _sin_fixed(X_hi, P)
    scale = 1 << P
    return Fraction(s_lo, scale), Fraction(s_hi, scale)


def sin_enclosure(x) -> Interval:
    """Enclosure of sin(x) for ``x`` inside [0, pi].

    sin is increasing below pi/2 and decreasing above, so endpoint bounds
    suffice; an argument straddling pi/2 gets the upper bound 1.
    """
    x = _coerce(x)
    if x.lo < 0.0 or x.hi > PI.hi:
        raise DomainError(f"sin_enclosure expects an argument inside [0, pi], got {x!r}")
    lo_l, lo_h = _sin_point(x.lo)
    hi_l, hi_h = _sin_point(x.hi)
    if x.hi <= _HALF_PI.lo:
        return Interval(lo_l, hi_h)
    if x.lo >= _HALF_PI.hi:
        return Interval(hi_l, lo_h)
    return Interval(min(lo_l, hi_l), 1.0)


# -- exact rational helpers ------------------------------------------------------


def _iroot(k: int, n: int) -> int:
    """Floor of the n-th root of a nonnegative integer."""
    if k < 2:
        return k
    x = 1 << ((k.bit_length() + n - 1) // n)
    while True:
        y = ((n - 1) * x + k // x ** (n - 1)) // n
        if y >= x:
            return x
        x = y


def _exact_root(x: Fraction, n: int):
    if x < 0:
        raise DomainError(f"real root of negative number {x}")
    num, den = x.numerator, x.denominator
    rn, rd = _iroot(num, n), _iroot(den, n)
    if rn**n == num and rd**n == den:
        return Fraction(rn, rd)
    return _coerce(x).root(n)


def _is_exact(x) -> bool:
    return type(x) in (int, Fraction)


# -- dispatch (Interval, autodiff Dual, or exact rationals) ----------------------


def sqrt(x):
    if _is_exact(x):
        return _exact_root(Fraction(x), 2)
    return x.sqrt()


def root(x, n: int):
    if _is_exact(x):
        return _exact_root(Fraction(x), n)
    return x.root(n)


def pow_int(x, k: int):
    if _is_exact(x):
        x = Fraction(x)
        if k < 0 and x == 0:
            raise DomainError("negative power of zero")
        return x**k
    if k == 0:
        return 1
    return x.pow_int(k)


def pow_rat(x, r):
    r = Fraction(r)
    if _is_exact(x):
        x = Fraction(x)
        if r.denominator == 1:
            return pow_int(x, r.numerator)
        if x <= 0:
            raise DomainError(f"rational power of nonpositive number {x}")
        p, q = r.numerator, r.denominator
        if p < 0:
            base = _exact_root(x ** (-p), q)
            return 1 / base
        return _exact_root(x**p, q)
    if r == 0:
        return 1
    return x.pow_rat(r)


def exp(x):
    if _is_exact(x):
        if x == 0:
            return Fraction(1)
        return _coerce(x).exp()
    return x.exp()


def ln(x):
    if _is_exact(x):
        if x <= 0:
            raise DomainError(f"log of nonpositive number {x}")
        if x == 1:
            return Fraction(0)
        return _coerce(x).ln()
    return x.ln()


def as_interval(x) -> Interval:
    """Coerce an exact number or Interval to an Interval."""
    return _coerce(x)
