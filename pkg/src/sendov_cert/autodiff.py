"""Forward-mode differentiation over intervals.

A :class:`Dual` carries an interval value and an interval gradient with
respect to a fixed tuple of variables.  Evaluating a formula on Duals built
from a box yields enclosures of the function and of all partial derivatives
over that box, which the prover uses for mean-value forms and for one-sided
monotonicity arguments at equality endpoints.
"""

from __future__ import annotations

from fractions import Fraction

from .interval import DomainError, Interval, as_interval

_ONE = Interval(1.0, 1.0)


def _lift(x, n):
    if isinstance(x, Dual):
        return x
    return Dual(as_interval(x), (Interval(0.0, 0.0),) * n)


class Dual:
    __slots__ = ("val", "grad")

    def __init__(self, val: Interval, grad):
        self.val = val
        self.grad = tuple(grad)

    @classmethod
    def variables(cls, intervals) -> list["Dual"]:
        n = len(intervals)
        zero = Interval(0.0, 0.0)
        out = []
        for i, iv in enumerate(intervals):
            g = [zero] * n
            g[i] = _ONE
            out.append(cls(as_interval(iv), g))
        return out

    def __repr__(self):
        return f"Dual({self.val!r}, {self.grad!r})"

    def _n(self):
        return len(self.grad)

    def __neg__(self):
        return Dual(-self.val, [-g for g in self.grad])

    def __add__(self, other):
        if not isinstance(other, Dual):
            return Dual(self.val + other, self.grad)
        return Dual(self.val + other.val, [a + b for a, b in zip(self.grad, other.grad)])

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, Dual):
            return Dual(self.val - other, self.grad)
        return Dual(self.val - other.val, [a - b for a, b in zip(self.grad, other.grad)])

    def __rsub__(self, other):
        return Dual(other - self.val, [-g for g in self.grad])

    def __mul__(self, other):
        if not isinstance(other, Dual):
            if type(other) in (int, Fraction) and other == 0:
                return Fraction(0)
            o = as_interval(other)
            return Dual(self.val * o, [g * o for g in self.grad])
        u, v = self.val, other.val
        return Dual(u * v, [a * v + u * b for a, b in zip(self.grad, other.grad)])

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Dual):
            o = as_interval(other)
            return Dual(self.val / o, [g / o for g in self.grad])
        q = self.val / other.val
        return Dual(q, [(a - q * b) / other.val for a, b in zip(self.grad, other.grad)])

    def __rtruediv__(self, other):
        return _lift(other, self._n()) / self

    def __pow__(self, k):
        if isinstance(k, int):
            return self.pow_int(k)
        return self.pow_rat(k)

    def _chain(self, val: Interval, dval: Interval) -> "Dual":
        return Dual(val, [dval * g for g in self.grad])

    def sqrt(self):
        v = self.val.sqrt()
        if v.lo <= 0.0:
            raise DomainError("derivative of sqrt unbounded at 0")
        return self._chain(v, 1 / (2 * v))

    def root(self, n: int):
        if self.val.lo <= 0.0:
            raise DomainError("derivative of root unbounded at 0")
        v = self.val.root(n)
        return self._chain(v, v / (n * self.val))

    def pow_int(self, k: int):
        if k == 0:
            return _lift(1, self._n())
        v = self.val.pow_int(k)
        return self._chain(v, k * self.val.pow_int(k - 1))

    def pow_rat(self, r):
        r = Fraction(r)
        if r.denominator == 1:
            return self.pow_int(r.numerator)
        v = self.val.pow_rat(r)
        return self._chain(v, r * self.val.pow_rat(r - 1))

    def exp(self):
        v = self.val.exp()
        return self._chain(v, v)

    def ln(self):
        return self._chain(self.val.ln(), 1 / self.val)


def lift(x, n: int) -> Dual:
    """Promote an exact number or Interval to a constant Dual with ``n`` variables."""
    return _lift(x, n)
