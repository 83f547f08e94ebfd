"""Closed-form expressions of the degree-nine argument, evaluable on intervals.

Each function accepts :class:`~sendov_cert.interval.Interval` arguments and
returns an enclosure.  Most also accept ``Fraction`` (exact evaluation) and
:class:`~sendov_cert.autodiff.Dual` (derivative enclosures) because they only
use arithmetic and the dispatch helpers of :mod:`sendov_cert.interval`.

Integer step functions (the thresholds ``v`` of the sigma bound and ``v*``)
are never rounded silently: when the defining comparison is not decided on
the whole argument box the candidates are reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from .autodiff import Dual
from .constants import CONSTANTS
from .interval import DomainError, Interval, as_interval, ln, pow_int, pow_rat, root, sqrt

S = CONSTANTS.two_sin_pi_9  # 2 sin(pi/9)
S2 = CONSTANTS.two_sin_pi_9_sq
SIN_PI_9 = CONSTANTS.sin_k(1)
NINE_POW_8TH = Interval(9.0).pow_rat(Fraction(1, 8))
R_DEFAULT = Fraction(23, 50)
M_DEFAULT = Fraction(1, 4)
A_MIN = Fraction(169, 200)
# domain boxes start at the outward-rounded float below 0.845
A_LO = Interval.enclose(A_MIN).lo
U_CAP = Fraction(64, 9)


class InfeasibleBound(ValueError):
    """The product floor is incompatible with the box constraints (m**N > C or C > M**N)."""


class InfeasibleRegion(ValueError):
    """No point of the box satisfies q (1+a)**n2 >= 9."""


class AmbiguityError(ValueError):
    def __init__(self, candidates):
        super().__init__(f"threshold index not decided: candidates {list(candidates)}")
        self.candidates = tuple(candidates)


@dataclass(frozen=True)
class AmbiguousInteger:
    candidates: tuple


# -- helpers for mixed Interval / Dual / Fraction values ----------------------


def _bounds(x):
    if isinstance(x, Dual):
        x = x.val
    if isinstance(x, Interval):
        return x.lo, x.hi
    return x, x


def _lo(x):
    return _bounds(x)[0]


def _hi(x):
    return _bounds(x)[1]


def _require(cond: bool, msg: str):
    if not cond:
        raise DomainError(msg)


def _iv(x) -> Interval:
    if isinstance(x, Dual):
        return x.val
    return as_interval(x)


# -- Blaschke product bound and F22 -------------------------------------------


def const_2_1(a):
    """9 - 4a^2/(1+a^2) - 6a, the denominator of the Blaschke product bound."""
    _require(_lo(a) > 0 and _hi(a) <= 1, f"const_2_1 needs a in (0, 1], got {a!r}")
    return 9 - 4 * a * a / (1 + a * a) - 6 * a


class LambdaResult(NamedTuple):
    value: object
    lambda_ok: bool | None  # lambda <= sin(pi/9); None when undecided
    radius_ok: bool | None  # R <= (1 - (1 - sin(pi/9))**9) / a


def _tri(certain_true: bool, certain_false: bool) -> bool | None:
    if certain_true:
        return True
    if certain_false:
        return False
    return None


def lambda_value(a, R):
    _require(_lo(a) * _lo(R) >= 0 and _hi(a) * _hi(R) < 1, "lambda needs 0 <= aR < 1")
    return 1 - root(1 - a * R, 9)


def lambda_of(a, R) -> LambdaResult:
    lam = lambda_value(a, R)
    s = SIN_PI_9
    bound = (1 - pow_int(1 - s, 9)) / _iv(a)
    lam_iv = _iv(lam)
    R_iv = _iv(R)
    return LambdaResult(
        lam,
        _tri(lam_iv.hi <= s.lo, lam_iv.lo > s.hi),
        _tri(R_iv.hi <= bound.lo, R_iv.lo > bound.hi),
    )


def F22(a, R=R_DEFAULT, exponent: int = 7):
    """Left side of the zero-modulus condition; nonnegative on [0.845, 1]."""
    lam = lambda_value(a, R)
    blaschke = const_2_1(a) * (a * R + 1) / (R + a)
    growth = sqrt(1 + (1 - a * a) * lam * (lam + 2)) * pow_int(1 + a - a * a, exponent)
    return blaschke - growth


# -- f and its numerator Y ----------------------------------------------------


def f_raw(x, a, m_exp=M_DEFAULT):
    """(x^2 - 1) / ((1 - x^m)(a + x)^2); singular at x = 1."""
    _require(_lo(x) > 0 and _hi(x) < 1, f"f_raw needs x in (0, 1), got {x!r}")
    return (x * x - 1) / ((1 - pow_rat(x, m_exp)) * pow_int(a + x, 2))


def f_factored(x, a):
    """The same function for m = 1/4 with the removable singularity at x = 1 cancelled.

    With u = x^(1/4): (x^2 - 1)/(1 - u) = -(1 + u)(1 + u^2)(1 + x).
    """
    _require(_lo(x) > 0 and _hi(x) <= 1, f"f_factored needs x in (0, 1], got {x!r}")
    u = root(x, 4)
    return -(1 + u) * (1 + u * u) * (1 + x) / pow_int(a + x, 2)


def Y_of(x, a, m_exp=M_DEFAULT):
    """Numerator of f'(x) up to a positive factor."""
    _require(_lo(x) > 0 and _hi(x) <= 1, f"Y needs x in (0, 1], got {x!r}")
    m = Fraction(m_exp)
    xm = pow_rat(x, m)
    xm1 = xm * x
    return ((m - 2) * xm1 - m * xm / x + 2 * x) * a + m * xm1 * x - (2 + m) * xm + 2


# -- sigma bound (finite optimization lemma) -----------------------------------


@dataclass(frozen=True)
class BoundParams:
    N: int
    m: object
    M: object
    C: object
    v: int | None = None


def _degenerate(m, M) -> bool:
    return _lo(m) == _hi(m) == _lo(M) == _hi(M)


def step_candidates(N: int, m, M, C) -> tuple:
    """Candidates for v = min{j : M^j m^(N-j) >= C} with 0 <= j <= N.

    A feasible point always has v <= N (C <= M^N).  An empty tuple means every
    point of the box has C > M^N.
    """
    first = None
    for j in range(0, N + 1):
        g = pow_int(M, j) * pow_int(m, N - j)
        if first is None:
            if _hi(g) < _lo(C):
                continue  # certainly fails
            first = j
        if _lo(g) >= _hi(C):
            return tuple(range(first, j + 1))
    if first is None:
        return ()
    return tuple(range(first, N + 1))


def sigma_bound_value(N: int, m, M, C, v: int):
    """(N-v)/m^2 + (v-1)/M^2 + (m^(N-v) M^(v-1) / C)^2."""
    tail = pow_int(m, N - v) * pow_int(M, v - 1) / C
    return (N - v) * pow_int(m, -2) + (v - 1) * pow_int(M, -2) + tail * tail


def sigma_bound(p: BoundParams):
    """Upper bound of sum 1/c_k^2 for m <= c_k <= M with prod c_k >= C."""
    N, m, M, C = p.N, p.m, p.M, p.C
    if N < 1:
        raise ValueError("N must be positive")
    if _degenerate(m, M):
        if _hi(pow_int(m, N)) < _lo(C) or _lo(pow_int(m, N)) > _hi(C):
            raise InfeasibleBound("m = M but C != m^N")
        return N * pow_int(m, -2)
    if _lo(pow_int(m, N)) > _hi(C):
        raise InfeasibleBound("m^N > C")
    if _hi(pow_int(M, N)) < _lo(C):
        raise InfeasibleBound("C > M^N")
    v = p.v
    if v is None:
        cands = step_candidates(N, m, M, C)
        if len(cands) != 1:
            raise AmbiguityError(cands)
        v = cands[0]
    return sigma_bound_value(N, m, M, C, v)


# -- bound for the normalized distances (U*) -----------------------------------


def v_star_ratio(a):
    t = (1 + a) / S
    denom = pow_rat(1 + a, Fraction(15, 8)) / (NINE_POW_8TH * pow_rat(S, Fraction(7, 8)))
    return 7 * ln(t) / ln(denom)


def _ceil_candidates(r, lo_clip=None, hi_clip=None) -> tuple:
    lo, hi = _bounds(r)
    j0, j1 = math.ceil(lo), math.ceil(hi)
    if lo_clip is not None:
        j0, j1 = max(j0, lo_clip), max(j1, lo_clip)
    if hi_clip is not None:
        j0, j1 = min(j0, hi_clip), min(j1, hi_clip)
    return tuple(range(j0, j1 + 1))


def v_star(a):
    """Integer threshold of U*; an :class:`AmbiguousInteger` if not decided on ``a``."""
    _require(_lo(a) >= A_LO and _hi(a) <= 1, f"v_star needs a in [0.845, 1], got {a!r}")
    cands = _ceil_candidates(v_star_ratio(a))
    if len(cands) == 1:
        return cands[0]
    return AmbiguousInteger(cands)


def U_star_value(a, v: int):
    t = S / (1 + a)
    u = (1 + a) / NINE_POW_8TH
    tail = pow_rat(t, Fraction(7, 8) * (8 - v)) * pow_int(u, v - 1)
    return (8 - v) * pow_rat(t, Fraction(-7, 4)) + (v - 1) * pow_int(u, -2) + tail * tail


def U_star(a, v: int | None = None):
    """Upper bound of sum 1/R_k^2; hull over candidate thresholds when ``v*`` is open."""
    if v is None:
        vs = v_star(a)
        cands = vs.candidates if isinstance(vs, AmbiguousInteger) else (vs,)
    else:
        cands = (v,)
    vals = [as_interval(U_star_value(a, c)) for c in cands]
    return Interval.hull_of(vals)


# -- case analysis --------------------------------------------------------------


@dataclass(frozen=True)
class CaseSpec:
    id: str
    n1: int
    n2: int

    @property
    def has_q(self) -> bool:
        return self.n1 > 0

    def q_lower(self) -> Interval | None:
        if self.n1 == 0:
            return None
        if self.n1 == 1:
            return S
        return S2

    def feasible_q_min(self, a):
        """Smallest q allowed by q (1+a)^n2 >= 9."""
        return 9 / pow_int(1 + a, self.n2)


CASES = {
    "i": CaseSpec("i", 0, 8),
    "ii": CaseSpec("ii", 1, 7),
    "iii_a": CaseSpec("iii_a", 2, 6),
    "iii_b": CaseSpec("iii_b", 3, 5),
    "iv": CaseSpec("iv", 4, 4),
}


@dataclass
class CaseBound:
    UA: Interval
    UB: Interval
    U: Interval
    splits: dict = field(default_factory=dict)


def clip_q(case: CaseSpec, a, q):
    """Shrink ``q`` to the feasible part of the box; raise if nothing is left."""
    a_top = Interval(_iv(a).hi) if isinstance(a, (Interval, Dual)) else a
    qmin = _iv(case.feasible_q_min(a_top))
    qi = _iv(q)
    if qi.hi < qmin.lo:
        raise InfeasibleRegion(f"q (1+a)^{case.n2} < 9 on the whole box")
    if isinstance(q, Interval) and qmin.lo > q.lo:
        return Interval(qmin.lo, q.hi)
    return q


def U_case(case: CaseSpec, a, q=None, enforce_feasibility: bool = True) -> CaseBound:
    """Upper bound U = U_A + U_B of sigma for one case on an (a, q) box.

    Threshold indices that are not constant on the box are handled by taking
    the hull over all candidates (each candidate value bounds sigma from above
    at the points where it is the true index, and the true value is one of them).
    """
    a_iv = _iv(a)
    _require(a_iv.lo >= A_LO and a_iv.hi <= 1, f"U_case needs a in [0.845, 1], got {a!r}")
    splits: dict = {}
    if case.n1 == 0:
        q = Fraction(1)
        UA = Interval(0.0, 0.0)
    else:
        if q is None:
            raise ValueError(f"case {case.id} needs q")
        _require(_hi(q) <= 1 and _lo(q) > 0, f"q must lie in (0, 1], got {q!r}")
        if enforce_feasibility:
            q = clip_q(case, a, q)
        if case.n1 == 1:
            UA = as_interval(pow_int(q, -2))
        else:
            n1 = case.n1
            r = n1 - ln(q) / ln(S)
            # q in (0, 1] makes r <= n1; q >= S^n1 makes r >= 0
            v1s = _ceil_candidates(r, lo_clip=0, hi_clip=n1)
            splits["v1"] = v1s
            UA = Interval.hull_of(
                [as_interval(sigma_bound_value(n1, S, 1, q, v)) for v in v1s]
            )
    C = 9 / q
    M = 1 + a
    n2 = case.n2
    if enforce_feasibility:
        v2s = step_candidates(n2, 1, M, C)
        if not v2s:
            raise InfeasibleRegion(f"(1+a)^{n2} < 9/q on the whole box")
    else:
        # without the feasibility constraint the sigma bound needs C <= M^n2 proven
        top = pow_int(M, n2)
        if _hi(top) < _lo(C):
            raise InfeasibleBound("C > M^N on the whole box")
        if _lo(top) < _hi(C):
            raise AmbiguityError(())
        v2s = step_candidates(n2, 1, M, C)
    splits["v2"] = v2s
    UB = Interval.hull_of([as_interval(sigma_bound_value(n2, 1, M, C, v)) for v in v2s])
    return CaseBound(UA, UB, UA + UB, splits)


# -- contradiction inequality ---------------------------------------------------


def _lhs_core(U, a):
    return 4 * U / (U - 4) * root((8 - Fraction(9, 8) * U) / pow_int(1 - a * a, 3), 4)


def _check_U(U):
    _require(_lo(U) > 4 and _hi(U) < U_CAP, f"lhs_213 needs 4 < U < 64/9, got {U!r}")


def lhs_213(U, a):
    """4U/(U-4) * ((8 - 9U/8) / (1-a^2)^3)^(1/4).

    Decreasing in U (both factors are) and increasing in a on [0, 1), so the
    enclosure is assembled from corner evaluations.
    """
    _check_U(U)
    _require(_lo(a) >= 0 and _hi(a) < 1, f"lhs_213 needs a in [0, 1), got {a!r}")
    if not isinstance(U, Interval) and not isinstance(a, Interval):
        return _lhs_core(U, a)
    U, a = as_interval(U), as_interval(a)
    low = as_interval(_lhs_core(Interval(U.hi), Interval(a.lo)))
    high = as_interval(_lhs_core(Interval(U.lo), Interval(a.hi)))
    return Interval(low.lo, high.hi)


def lhs_213_lower(U, a) -> float:
    """Lower bound of lhs_213 over a box that may reach a = 1.

    (1-a^2)^(-3/4) grows without bound as a -> 1, so only the corner (U.hi, a.lo)
    matters and the bound stays finite while a.lo < 1.
    """
    _check_U(U)
    U, a = as_interval(U), as_interval(a)
    _require(a.lo >= 0 and a.lo < 1, f"lhs_213_lower needs a.lo in [0, 1), got {a!r}")
    return as_interval(_lhs_core(Interval(U.hi), Interval(a.lo))).lo


# -- diagnostics for a concrete polynomial ----------------------------------------


def lemma_2_5_bound(a, lam):
    t = lam * (lam + 2)
    return 1 / sqrt(1 + t - a * a * t)


def lemma_2_6_threshold(a):
    return 1 / (1 + a - a * a)


def lemma_2_8_bound(a, sigma):
    return -8 / a + 8 * a + 9 / (8 * a) * (1 - a * a) * sigma


def _config_terms(config):
    a = Interval(config.a)
    terms = []
    for z in config.zeros:
        re, im = Interval(z.real), Interval(z.imag)
        mod2 = re * re + im * im
        r2 = pow_int(a - re, 2) + im * im
        terms.append((mod2, r2))
    return a, terms


def lemma_2_10_factor(config):
    a, terms = _config_terms(config)
    s = Interval(0.0)
    for mod2, r2 in terms:
        s = s + (mod2 - a * a) / r2
    return pow_int(a * a - 1 + s / 4, 4)


def eq_2_1_rhs(config):
    """prod |w_k| / const_2_1(a) for the Blaschke images w_k of the zeros."""
    a, terms = _config_terms(config)
    prod = Interval(1.0)
    for z, (mod2, r2) in zip(config.zeros, terms):
        re, im = Interval(z.real), Interval(z.imag)
        den2 = pow_int(a * re - 1, 2) + pow_int(a * im, 2)
        prod = prod * sqrt(r2 / den2)
    return prod / const_2_1(a)


def lemma_2_12_sum(config):
    """Sum of 1/R_k^2 with R_k = r_k / (prod r_j)^(1/8)."""
    a, terms = _config_terms(config)
    prod2 = Interval(1.0)
    inv = Interval(0.0)
    for _, r2 in terms:
        prod2 = prod2 * r2
        inv = inv + 1 / r2
    # 1/R_k^2 = (prod r_j^2)^(1/8) / r_k^2
    return inv * pow_rat(prod2, Fraction(1, 8))
