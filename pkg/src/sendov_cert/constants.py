"""Certified enclosures of the trigonometric constants for degree nine."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .interval import PI, Interval, _enclose_fraction, pi_bounds_rational, sin_bounds_rational

N = 9


def critical_factor_indices(n: int = N) -> list[int]:
    """Indices k in 1..n-1 with 2 sin(pi k/n) >= 1, decided exactly.

    2 sin(pi k/n) >= 1 iff pi k/n lies in [pi/6, 5pi/6], i.e. 1/6 <= k/n <= 5/6.
    """
    return [k for k in range(1, n) if Fraction(1, 6) <= Fraction(k, n) <= Fraction(5, 6)]


@dataclass(frozen=True)
class ConstantTable:
    pi: Interval
    sin_pi_k_9: tuple  # index 0 holds k = 1
    two_sin_pi_9: Interval
    two_sin_pi_9_sq: Interval
    crit_product: Interval
    crit_indices: tuple

    def sin_k(self, k: int) -> Interval:
        return self.sin_pi_k_9[k - 1]

    def identity_check(self) -> dict:
        """Compare 9 / crit_product with (2 sin(pi/9))**2."""
        lhs = 9 / self.crit_product
        rhs = self.two_sin_pi_9_sq
        return {
            "lhs": lhs.to_json(),
            "rhs": rhs.to_json(),
            "lhs_width": lhs.width,
            "rhs_width": rhs.width,
            "overlap": lhs.overlaps(rhs),
        }


def _round_out(lo: Fraction, hi: Fraction) -> Interval:
    return Interval(_enclose_fraction(lo)[0], _enclose_fraction(hi)[1])


def build_constant_table() -> ConstantTable:
    """Everything is computed with rational bounds and rounded outward once."""
    pi_lo, pi_hi = pi_bounds_rational()
    # sin(pi k/9) = sin(pi (9-k)/9); arguments up to 4 pi/9 stay on the increasing branch
    bounds = []
    for k in range(1, N):
        j = min(k, N - k)
        bounds.append(sin_bounds_rational(pi_lo * j / N, pi_hi * j / N))
    idx = critical_factor_indices(N)
    prod_lo = prod_hi = Fraction(1)
    for k in idx:
        lo, hi = bounds[k - 1]
        prod_lo *= 2 * lo
        prod_hi *= 2 * hi
    s_lo, s_hi = bounds[0]
    return ConstantTable(
        pi=PI,
        sin_pi_k_9=tuple(_round_out(lo, hi) for lo, hi in bounds),
        two_sin_pi_9=_round_out(2 * s_lo, 2 * s_hi),
        two_sin_pi_9_sq=_round_out(4 * s_lo * s_lo, 4 * s_hi * s_hi),
        crit_product=_round_out(prod_lo, prod_hi),
        crit_indices=tuple(idx),
    )


CONSTANTS = build_constant_table()
