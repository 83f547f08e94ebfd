"""Exact rational evaluation of formulas at rational points.

Formulas in :mod:`sendov_cert.formulas` are written against a small numeric
protocol, so they also run on ``Fraction`` inputs.  Irrational subterms
(e.g. a ninth root of 27/50) come back as :class:`Interval` enclosures; they
disappear when multiplied by an exact zero or raised to the power zero.  If
one survives to the final result the value is not provably rational.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Mapping

from .interval import Interval


class NonRationalResidue(ArithmeticError):
    """An irrational subterm survived exact evaluation."""

    def __init__(self, enclosure: Interval):
        super().__init__(f"result is not provably rational; enclosure {enclosure!r}")
        self.enclosure = enclosure


def to_rational(x) -> Fraction:
    """Parse an exact value: int, Fraction, decimal string or 'p/q' string, or float."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str)):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    raise TypeError(f"cannot read {x!r} as a rational")


def exact_eval(expr: Callable, point: Mapping[str, object]) -> Fraction:
    """Evaluate ``expr(**point)`` in exact rational arithmetic.

    Returns the exact rational value; a zero result is a proof that the
    expression vanishes at ``point``.
    """
    args = {k: to_rational(v) for k, v in point.items()}
    result = expr(**args)
    if isinstance(result, Interval):
        raise NonRationalResidue(result)
    if not isinstance(result, (int, Fraction)):
        raise TypeError(f"unexpected result type {type(result).__name__}")
    return Fraction(result)
