import math
import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sendov_cert import formulas as F
from sendov_cert.constants import CONSTANTS, critical_factor_indices
from sendov_cert.exact import NonRationalResidue, exact_eval, to_rational
from sendov_cert.interval import Interval

# -- exact evaluation -------------------------------------------------------------------


def test_f22_vanishes_exactly_at_one():
    assert exact_eval(F.F22, {"a": 1, "R": "23/50"}) == 0
    assert exact_eval(F.F22, {"a": 1, "R": "0.46"}) == 0


def test_f22_is_irrational_inside():
    with pytest.raises(NonRationalResidue) as exc:
        exact_eval(F.F22, {"a": "0.9", "R": "0.46"})
    assert exc.value.enclosure.lo > 0


def test_const21_at_one():
    assert exact_eval(F.const_2_1, {"a": 1}) == 1  # 9 - 2 - 6


@given(st.fractions(min_value=Fraction(1, 100), max_value=1, max_denominator=10**6))
def test_Y_vanishes_on_the_edge(a):
    assert exact_eval(F.Y_of, {"x": 1, "a": a}) == 0


def test_Y_edge_with_other_exponent():
    # the x = 1 degeneracy does not depend on m
    assert exact_eval(lambda x, a: F.Y_of(x, a, Fraction(1, 2)), {"x": 1, "a": "0.9"}) == 0


def test_to_rational_forms():
    assert to_rational("0.46") == Fraction(23, 50)
    assert to_rational("23/50") == Fraction(23, 50)
    assert to_rational(3) == 3
    assert to_rational(0.5) == Fraction(1, 2)
    with pytest.raises(TypeError):
        to_rational([1])


RATIONAL_FORMULAS = [
    ("const_2_1", lambda a, b: F.const_2_1(a)),
    ("lemma_2_6_threshold", lambda a, b: F.lemma_2_6_threshold(a)),
    ("lemma_2_8_bound", lambda a, b: F.lemma_2_8_bound(a, 4 + b)),
    ("sigma_bound_value", lambda a, b: F.sigma_bound_value(5, a, 1 + a, 1 + b, 3)),
    # x = b^4 keeps the fourth root rational
    ("Y_at_fourth_powers", lambda a, b: F.Y_of(b**4, a)),
]


@pytest.mark.parametrize("name,expr", RATIONAL_FORMULAS)
def test_exact_agrees_with_interval(name, expr):
    """The exact rational value lies in the interval enclosure at the same point."""
    rng = random.Random(name)
    for _ in range(1000):
        a = Fraction(rng.randint(1, 10**6), 10**6)
        b = Fraction(rng.randint(1, 10**6), 10**6)
        exact = exact_eval(expr, {"a": a, "b": b})
        enc = expr(Interval.enclose(a), Interval.enclose(b))
        assert Fraction(enc.lo) <= exact <= Fraction(enc.hi), (name, a, b)


# -- constant table ------------------------------------------------------------------


def test_constant_widths():
    assert CONSTANTS.pi.width <= 2.0**-50
    for s in CONSTANTS.sin_pi_k_9:
        assert s.width <= 2.0**-50
    assert CONSTANTS.two_sin_pi_9_sq.width <= 2.0**-50
    # about 19.23, where one binary64 ulp is 2^-48; the bound holds relatively
    prod = CONSTANTS.crit_product
    assert prod.width <= math.ulp(prod.hi)
    assert prod.width / prod.lo <= 2.0**-50


def test_constant_values_against_oracle():
    with mpmath.workdps(40):
        for k in range(1, 9):
            v = mpmath.sin(k * mpmath.pi / 9)
            s = CONSTANTS.sin_k(k)
            assert s.lo <= v <= s.hi
        prod = mpmath.fprod(2 * mpmath.sin(k * mpmath.pi / 9) for k in range(2, 8))
        assert CONSTANTS.crit_product.lo <= prod <= CONSTANTS.crit_product.hi


def test_critical_indices_decided_exactly():
    assert critical_factor_indices(9) == [2, 3, 4, 5, 6, 7]
    # n = 6: 2 sin(pi/6) = 1 exactly, so k = 1 belongs to the product
    assert critical_factor_indices(6) == [1, 2, 3, 4, 5]
    assert CONSTANTS.crit_indices == (2, 3, 4, 5, 6, 7)


def test_constant_cross_identity():
    rep = CONSTANTS.identity_check()
    assert rep["overlap"]
    assert rep["lhs_width"] <= 2.0**-40 and rep["rhs_width"] <= 2.0**-40
    lhs = Interval(*rep["lhs"])
    rhs = Interval(*rep["rhs"])
    assert lhs.hull(rhs).width <= 2.0**-40
