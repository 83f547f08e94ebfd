"""Concrete conditions checked by the prover, addressed by stable string ids.

Ids follow the numbering of the argument being verified (``"2.2"``,
``"2.13-iv"`` ...) because certificates, CLI commands and reports refer to
them; each condition also carries a descriptive ``title``.

A condition maps a :class:`~sendov_cert.prover.Box` to an
:class:`~sendov_cert.prover.Outcome` and is rebuilt from ``(id, params,
domain)`` alone, which is what replay and worker processes rely on.
"""

from __future__ import annotations

from fractions import Fraction

from . import formulas as F
from .autodiff import Dual
from .constants import CONSTANTS
from .exact import NonRationalResidue, exact_eval
from .interval import DomainError, Interval, as_interval
from .prover import Box, Outcome

TWO_M40 = 2.0**-40


def lo_of(dec) -> float:
    return Interval.enclose(str(dec)).lo


def hi_of(dec) -> float:
    return Interval.enclose(str(dec)).hi


def _pair(iv: Interval) -> tuple:
    return (iv.lo, iv.hi)


def _sub_down(x: float, y: float) -> float:
    return (Interval(x) - Interval(y)).lo


class Condition:
    id = ""
    title = ""
    target = ">0"
    assumptions: tuple = ()
    cuts: dict = {}
    notes: tuple = ()

    def __init__(self, params: dict, domain: Box | None):
        self.params = params
        self.domain = domain

    def evaluate(self, box: Box) -> Outcome:
        raise NotImplementedError

    def refute(self, box: Box):
        return None


# -- scalar sign conditions ------------------------------------------------------------


def _decides(target: str, enc: Interval) -> bool:
    if target == "<0":
        return enc.hi < 0
    return enc.lo > 0


def _margin(target: str, enc: Interval) -> float:
    return -enc.hi if target == "<0" else enc.lo


def _violates(target: str, enc: Interval) -> bool:
    if target == ">0":
        return enc.hi <= 0
    if target == "<0":
        return enc.lo >= 0
    return enc.hi < 0  # ">=0"


class SignCondition(Condition):
    """func(*box) has the target sign on the domain.

    Enclosures are the natural interval extension intersected with the
    mean-value form.  For ``">=0"`` targets an equality endpoint may be
    declared: there the value is proven to be exactly zero in rational
    arithmetic, and boxes touching it are closed by a strict derivative sign,
    which makes the function strictly positive on the rest of the box.
    """

    mean_value = True
    equality: tuple | None = None  # (dim name, Fraction endpoint, needed derivative sign)

    def func(self, *args):
        raise NotImplementedError

    def value(self, *args):
        """func shifted by the optional ``offset`` parameter, so a margin can be certified."""
        off = self.params.get("offset")
        if off is None:
            return self.func(*args)
        return self.func(*args) - Fraction(str(off))

    def side(self, ranges):
        return True  # no side conditions

    def _enclose(self, ranges):
        try:
            enc = as_interval(self.value(*ranges))
        except DomainError:
            return None, None
        form = "natural"
        if self.mean_value and not _decides(self.target, enc):
            mv = self._mean_value(ranges)
            if mv is not None:
                cut = enc.intersect(mv)
                if cut is not None:
                    enc = cut
                    form = "mean_value"
        return enc, form

    def _gradient(self, ranges):
        try:
            val = self.value(*Dual.variables(ranges))
        except DomainError:
            return None
        if not isinstance(val, Dual):
            return [Interval(0.0)] * len(ranges)
        return list(val.grad)

    def _mean_value(self, ranges):
        grad = self._gradient(ranges)
        if grad is None:
            return None
        mids = [Interval(r.mid) for r in ranges]
        try:
            out = as_interval(self.value(*mids))
        except DomainError:
            return None
        for g, r, c in zip(grad, ranges, mids):
            out = out + g * (r - c)
        return out

    def _equality_value(self):
        """Exact value at the equality endpoint (cached)."""
        if not hasattr(self, "_eq_cache"):
            dim, point, _ = self.equality
            try:
                value = exact_eval(lambda **kw: self.value(kw[dim]), {dim: point})
            except NonRationalResidue:
                value = None
            self._eq_cache = value
        return self._eq_cache

    def evaluate(self, box: Box) -> Outcome:
        ranges = box.ranges()
        st = self.side(ranges)
        if st is False:
            return Outcome("unsupported", None, None, {"reason": "side condition fails"})
        enc, form = self._enclose(ranges)
        if enc is None:
            return Outcome("undecided")
        if st and _decides(self.target, enc):
            info = {"form": form} if form != "natural" else {}
            return Outcome("certified", _pair(enc), _margin(self.target, enc), info)
        if st and self.equality is not None:
            dim, point, sign = self.equality
            i = box.index(dim)
            edge = box.hi[i] if sign < 0 else box.lo[i]
            if Fraction(edge) == point and self._equality_value() == 0:
                grad = self._gradient(ranges)
                if grad is not None:
                    g = grad[i]
                    if (sign < 0 and g.hi < 0) or (sign > 0 and g.lo > 0):
                        return Outcome("equality", _pair(g), None, {"endpoint": str(point), "value": "0"})
        return Outcome("undecided", _pair(enc))

    def refute(self, box: Box):
        pt = box.midpoint()
        try:
            enc = as_interval(self.value(*[Interval(p) for p in pt]))
        except DomainError:
            return None
        if _violates(self.target, enc):
            return Outcome("refuted", _pair(enc), None, {"witness": list(pt)})
        return None


class Const21(SignCondition):
    id = "2.1"
    title = "positivity of 9 - 4a^2/(1+a^2) - 6a on a in [0.845, 1]"
    target = ">0"

    def func(self, a):
        return F.const_2_1(a)


class F22Condition(SignCondition):
    id = "2.2"
    title = "zero-modulus inequality F22(a, R) >= 0 on a in [0.845, 1], equality at a = 1"
    target = ">=0"
    assumptions = ("lemma-2.1-proof", "lemma-2.5-proof")

    def __init__(self, params, domain):
        super().__init__(params, domain)
        self.R = Fraction(str(params.get("R", "23/50")))
        self.exponent = int(params.get("exponent", 7))
        self.equality = ("a", Fraction(1), -1)

    def func(self, a):
        return F.F22(a, self.R, self.exponent)

    def side(self, ranges):
        lam = F.lambda_of(ranges[0], self.R)
        if lam.lambda_ok is False or lam.radius_ok is False:
            return False
        if lam.lambda_ok and lam.radius_ok:
            return True
        return None


class YCondition(SignCondition):
    id = "2.9"
    title = "Y(x, a) > 0, the numerator of f'(x), on [0.46, 0.999] x [0.845, 1]"
    target = ">0"

    def __init__(self, params, domain):
        super().__init__(params, domain)
        self.m = Fraction(str(params.get("m", "1/4")))

    def func(self, x, a):
        return F.Y_of(x, a, self.m)


class YEdgeIdentity(Condition):
    """Y(1, a) = 0 for every a.

    Y is affine in a, so vanishing at the two rational points a = 0 and a = 1
    (checked exactly) forces it to vanish identically.
    """

    id = "2.9-x1"
    title = "exact identity Y(1, a) = 0 for all a"
    target = "=0"

    def evaluate(self, box) -> Outcome:
        m = Fraction(str(self.params.get("m", "1/4")))
        vals = {}
        for a in ("0", "1"):
            try:
                vals[a] = exact_eval(lambda x, a: F.Y_of(x, a, m), {"x": 1, "a": a})
            except NonRationalResidue:
                vals[a] = None
        ok = all(v == 0 for v in vals.values())
        info = {"Y(1,0)": str(vals["0"]), "Y(1,1)": str(vals["1"]), "m": str(m)}
        if ok:
            return Outcome("exact", None, None, info)
        return Outcome("refuted", None, None, {**info, "witness": [1.0, 0.0 if vals["0"] != 0 else 1.0]})


class ConstantIdentity(Condition):
    id = "3.1"
    title = "9 / prod_{k=2..7} 2 sin(pi k/9) equals (2 sin(pi/9))^2"
    target = "=0"

    def evaluate(self, box) -> Outcome:
        rep = CONSTANTS.identity_check()
        info = {"rhs": rep["rhs"], "indices": list(CONSTANTS.crit_indices)}
        if not rep["overlap"]:
            return Outcome("refuted", tuple(rep["lhs"]), None, {**info, "witness": []})
        if rep["lhs_width"] <= TWO_M40 and rep["rhs_width"] <= TWO_M40:
            return Outcome("exact", tuple(rep["lhs"]), None, info)
        return Outcome("unsupported", tuple(rep["lhs"]), None, {**info, "reason": "enclosures too wide"})


# -- case conditions ------------------------------------------------------------------


def _case_box(case: F.CaseSpec, with_x: bool) -> Box:
    ranges = {}
    if with_x:
        ranges["x"] = (lo_of("0.46"), 1.0)
    ranges["a"] = (lo_of("0.845"), 1.0)
    if case.has_q:
        ranges["q"] = (case.q_lower().lo, 1.0)
    return Box.from_ranges(ranges)


def _flag(params, key, default=True) -> bool:
    v = params.get(key, default)
    if isinstance(v, str):
        return v.lower() not in ("0", "false", "no", "off")
    return bool(v)


class _CaseCondition(Condition):
    assumptions = ("lemma-2.2-proof",)

    def __init__(self, params, domain, case_id):
        super().__init__(params, domain)
        self.case = F.CASES[case_id]
        self.clip = _flag(params, "clip", True)

    def _split(self, ranges):
        names = self.domain.names
        d = dict(zip(names, ranges))
        return d.get("x"), d["a"], d.get("q")

    def _bound(self, a, q):
        """U on the box, or an Outcome closing the box."""
        try:
            return F.U_case(self.case, a, q, enforce_feasibility=self.clip)
        except F.InfeasibleRegion:
            return Outcome("infeasible")
        except F.InfeasibleBound as exc:
            return Outcome("unsupported", None, None, {"reason": str(exc)})
        except (F.AmbiguityError, DomainError):
            return None

    @staticmethod
    def _splits(cb) -> dict:
        return {k: list(v) for k, v in cb.splits.items()}


class Condition23(_CaseCondition):
    """f(x) + (1 - a^2)(U(a, q) - 4) < 0 for x in [0.46, 1].

    The expression increases with sigma, so the upper bound U may replace it.
    """

    target = "<0"

    def __init__(self, params, domain, case_id):
        super().__init__(params, domain, case_id)
        self.id = f"2.3-{case_id}"
        self.title = f"condition f + (1-a^2)(U-4) < 0, case {case_id}"
        self.assumptions = ("lemma-2.2-proof", "lemma-2.8-proof", "lemma-2.10-proof")

    def _value(self, x, a, cb):
        return F.f_factored(x, a) + (1 - a * a) * (cb.U - 4)

    def evaluate(self, box: Box) -> Outcome:
        x, a, q = self._split(box.ranges())
        cb = self._bound(a, q)
        if cb is None:
            return Outcome("undecided")
        if isinstance(cb, Outcome):
            return cb
        val = self._value(x, a, cb)
        if val.hi < 0:
            return Outcome("certified", _pair(val), -val.hi, self._splits(cb))
        return Outcome("undecided", _pair(val))

    def refute(self, box: Box):
        pt = box.midpoint()
        x, a, q = self._split([Interval(p) for p in pt])
        cb = self._bound(a, q)
        if cb is None or isinstance(cb, Outcome):
            return None
        val = self._value(x, a, cb)
        if val.lo >= 0:
            return Outcome("refuted", _pair(val), None, {"witness": list(pt)})
        return None


STRIP = 1e-4  # width of the a-strip next to 1 handled by the divergence bound


class Condition213(_CaseCondition):
    """Violation of the master inequality: lhs(U(a,q), a) > U*(a) with 4 < U < 64/9.

    lhs is bounded below through its monotonicity: decreasing in U, increasing
    in a.  Near a = 1 the factor (1 - a^2)^(-3/4) grows without bound, so the
    lower bound taken at the left end of each box stays valid up to a = 1.
    """

    target = ">0"
    cuts = {"a": [1 - STRIP]}

    def __init__(self, params, domain, case_id):
        super().__init__(params, domain, case_id)
        self.id = f"2.13-{case_id}"
        self.title = f"contradiction with the master inequality, case {case_id}"
        self.assumptions = ("lemma-2.2-proof", "lemma-2.12-proof", "sigma-gt-4")

    def evaluate(self, box: Box) -> Outcome:
        _, a, q = self._split(box.ranges())
        cb = self._bound(a, q)
        if cb is None:
            return Outcome("undecided")
        if isinstance(cb, Outcome):
            return cb
        U = cb.U
        info = self._splits(cb)
        if U.hi <= 4 or U.lo >= F.U_CAP:
            return Outcome("gap", _pair(U), None, info)
        if not (U.lo > 4 and U.hi < F.U_CAP):
            return Outcome("undecided")
        vs = F.v_star(a)
        if isinstance(vs, F.AmbiguousInteger):
            return Outcome("undecided")
        ustar = F.U_star(a, vs)
        lower = F.lhs_213_lower(U, a)
        margin = _sub_down(lower, ustar.hi)
        if margin > 0:
            info = {**info, "U": list(_pair(U)), "lhs_lower": lower, "Ustar_upper": ustar.hi, "v_star": vs}
            if box.lo[box.index("a")] >= 1 - STRIP:
                info["strip"] = True
            return Outcome("certified", None, margin, info)
        return Outcome("undecided")

    def refute(self, box: Box):
        pt = box.midpoint()
        _, a, q = self._split([Interval(p) for p in pt])
        cb = self._bound(a, q)
        if cb is None or isinstance(cb, Outcome):
            return None
        U = cb.U
        if not (U.lo > 4 and U.hi < F.U_CAP) or a.hi >= 1:
            return None
        vs = F.v_star(a)
        if isinstance(vs, F.AmbiguousInteger):
            return None
        lhs = F.lhs_213(U, a)
        ustar = F.U_star(a, vs)
        if lhs.hi <= ustar.lo:
            return Outcome("refuted", (lhs.hi, ustar.lo), None, {"witness": list(pt)})
        return None


# -- registry -------------------------------------------------------------------------

DEFAULT_DOMAINS = {
    "2.1": lambda p: Box.from_ranges({"a": (lo_of("0.845"), 1.0)}),
    "2.2": lambda p: Box.from_ranges({"a": (lo_of("0.845"), 1.0)}),
    "2.9": lambda p: Box.from_ranges({"x": (lo_of("0.46"), hi_of(p.get("x_hi", "0.999"))), "a": (lo_of("0.845"), 1.0)}),
}

SIMPLE = {"2.1": Const21, "2.2": F22Condition, "2.9": YCondition}
EXACT = {"3.1": ConstantIdentity, "2.9-x1": YEdgeIdentity}

CASE_IDS = tuple(F.CASES)
CONDITION_IDS = (
    ["3.1", "2.1", "2.2", "2.9", "2.9-x1"]
    + [f"2.3-{c}" for c in CASE_IDS]
    + [f"2.13-{c}" for c in CASE_IDS]
)


def default_domain(cond_id: str, params: dict | None = None) -> Box | None:
    params = params or {}
    if cond_id in EXACT:
        return None
    if cond_id in DEFAULT_DOMAINS:
        return DEFAULT_DOMAINS[cond_id](params)
    head, case = cond_id.split("-", 1)
    return _case_box(F.CASES[case], with_x=(head == "2.3"))


def build(cond_id: str, params: dict | None = None, domain: Box | None = None) -> Condition:
    """Instantiate a condition; ``domain`` defaults to the full region of the claim."""
    params = dict(params or {})
    if cond_id not in CONDITION_IDS:
        raise KeyError(f"unknown condition id {cond_id!r}")
    if cond_id in EXACT:
        return EXACT[cond_id](params, None)
    if domain is None:
        domain = default_domain(cond_id, params)
    if cond_id in SIMPLE:
        return SIMPLE[cond_id](params, domain)
    head, case = cond_id.split("-", 1)
    cls = Condition23 if head == "2.3" else Condition213
    return cls(params, domain, case)
