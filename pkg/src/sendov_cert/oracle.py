"""Independent high-precision and brute-force checks.

Point values are recomputed with mpmath at 60 digits, without touching the
interval kernel, and stored as the golden file ``data/golden.json``.  The
sampling oracles test the finite optimization bound, the Moebius threshold
lemma, the product identities and the Sendov monitor on random inputs.
"""

from __future__ import annotations

import json
import math
import random
from fractions import Fraction
from pathlib import Path

import mpmath
import numpy as np

from . import formulas as F
from .interval import Interval
from .poly import NonConvergence, derive, identity_residuals, random_config

GOLDEN_PATH = Path(__file__).with_name("data") / "golden.json"
DPS = 60
DIGITS = 50

# -- high-precision formulas (independent code path) ------------------------------------

CASE_N = {"i": (0, 8), "ii": (1, 7), "iii_a": (2, 6), "iii_b": (3, 5), "iv": (4, 4)}


def _mp(x):
    return mpmath.mpf(Fraction(x).numerator) / Fraction(x).denominator if not isinstance(x, mpmath.mpf) else x


def mp_s():
    return 2 * mpmath.sin(mpmath.pi / 9)


def mp_const21(a):
    return 9 - 4 * a**2 / (1 + a**2) - 6 * a


def mp_lambda(a, R):
    return 1 - mpmath.root(1 - a * R, 9)


def mp_F22(a, R, exponent=7):
    lam = mp_lambda(a, R)
    return mp_const21(a) * (a * R + 1) / (R + a) - mpmath.sqrt(1 + (1 - a**2) * lam * (lam + 2)) * (1 + a - a**2) ** exponent


def mp_f(x, a, m=mpmath.mpf(1) / 4):
    if x == 1:
        return -8 / (1 + a) ** 2  # limit for m = 1/4
    return (x**2 - 1) / ((1 - x**m) * (a + x) ** 2)


def mp_Y(x, a, m=mpmath.mpf(1) / 4):
    return ((m - 2) * x ** (m + 1) - m * x ** (m - 1) + 2 * x) * a + m * x ** (m + 2) - (2 + m) * x**m + 2


def mp_sigma_bound(N, m, M, C):
    if m == M:
        return N / m**2
    v = next(j for j in range(0, N + 1) if M**j * m ** (N - j) >= C)
    return (N - v) / m**2 + (v - 1) / M**2 + (m ** (N - v) * M ** (v - 1) / C) ** 2


def mp_v_star(a):
    s = mp_s()
    ratio = 7 * mpmath.log((1 + a) / s) / mpmath.log((1 + a) ** (mpmath.mpf(15) / 8) / (mpmath.mpf(9) ** (mpmath.mpf(1) / 8) * s ** (mpmath.mpf(7) / 8)))
    return int(mpmath.ceil(ratio))


def mp_U_star(a):
    s = mp_s()
    v = mp_v_star(a)
    t = s / (1 + a)
    u = (1 + a) / mpmath.mpf(9) ** (mpmath.mpf(1) / 8)
    return (8 - v) * t ** (-mpmath.mpf(7) / 4) + (v - 1) / u**2 + (t ** (mpmath.mpf(7) * (8 - v) / 8) * u ** (v - 1)) ** 2


def mp_U_case(case, a, q=None):
    n1, n2 = CASE_N[case]
    s = mp_s()
    if n1 == 0:
        q = mpmath.mpf(1)
        UA = mpmath.mpf(0)
    elif n1 == 1:
        UA = 1 / q**2
    else:
        v1 = max(0, min(n1, int(mpmath.ceil(n1 - mpmath.log(q) / mpmath.log(s)))))
        UA = (n1 - v1) / s**2 + (v1 - 1) + (s ** (n1 - v1) / q) ** 2
    C = 9 / q
    v2 = next(j for j in range(0, n2 + 1) if (1 + a) ** j >= C)
    UB = (n2 - v2) + (v2 - 1) / (1 + a) ** 2 + ((1 + a) ** (v2 - 1) / C) ** 2
    return UA, UB, UA + UB


def mp_lhs(U, a):
    return 4 * U / (U - 4) * mpmath.root((8 - mpmath.mpf(9) / 8 * U) / (1 - a**2) ** 3, 4)


def _args(point):
    return {k: (mpmath.mpf(str(v)) if k != "case" else v) for k, v in point.items()}


def _ev_U_case_part(idx):
    def ev(p):
        return mp_U_case(p["case"], p["a"], p.get("q"))[idx]

    return ev


MP_EXPRS = {
    "const_2_1": lambda p: mp_const21(p["a"]),
    "lambda": lambda p: mp_lambda(p["a"], p["R"]),
    "F22": lambda p: mp_F22(p["a"], p["R"]),
    "f": lambda p: mp_f(p["x"], p["a"]),
    "Y": lambda p: mp_Y(p["x"], p["a"]),
    "U_star": lambda p: mp_U_star(p["a"]),
    "v_star": lambda p: mpmath.mpf(mp_v_star(p["a"])),
    "U_case": _ev_U_case_part(2),
    "U_A": _ev_U_case_part(0),
    "U_B": _ev_U_case_part(1),
    "lhs_213": lambda p: mp_lhs(p["U"], p["a"]),
    "case_margin": lambda p: mp_lhs(mp_U_case(p["case"], p["a"], p.get("q"))[2], p["a"]) - mp_U_star(p["a"]),
    "sigma_bound": lambda p: mp_sigma_bound(int(p["N"]), p["m"], p["M"], p["C"]),
    "sin_pi_k_9": lambda p: mpmath.sin(mpmath.pi * p["k"] / 9),
    "pow": lambda p: p["x"] ** p["r"],
}

GRID = (
    [("const_2_1", {"a": a}) for a in ("0.845", "0.9", "1")]
    + [("lambda", {"a": a, "R": "0.46"}) for a in ("0.845", "1")]
    + [("F22", {"a": a, "R": "0.46"}) for a in ("0.845", "0.9", "0.95", "0.999")]
    + [("f", {"x": x, "a": a}) for x, a in (("0.46", "0.9"), ("0.7", "0.845"), ("0.999", "1"))]
    + [("Y", {"x": x, "a": a}) for x, a in (("0.9", "0.9"), ("0.5", "0.85"), ("0.999", "0.845"), ("0.999", "1"))]
    + [("U_star", {"a": a}) for a in ("0.845", "0.9", "0.95", "0.99", "0.9999")]
    + [("v_star", {"a": a}) for a in ("0.845", "0.9", "1")]
    + [
        (e, p)
        for p in (
            {"case": "i", "a": "0.9"},
            {"case": "i", "a": "0.845"},
            {"case": "ii", "a": "0.9", "q": "0.8"},
            {"case": "iii_a", "a": "0.9", "q": "0.6"},
            {"case": "iii_b", "a": "0.95", "q": "0.7"},
            {"case": "iv", "a": "0.845", "q": "0.7768"},
            {"case": "iv", "a": "0.9", "q": "0.9"},
        )
        for e in ("U_case", "U_A", "U_B", "case_margin")
    ]
    + [("lhs_213", {"U": U, "a": a}) for U, a in (("5.41185", "0.9"), ("6", "0.845"), ("7", "0.99"))]
    + [("sigma_bound", {"N": "8", "m": "1", "M": "1.9", "C": "9"}), ("sigma_bound", {"N": "2", "m": "1", "M": "2", "C": "2"})]
    + [("sin_pi_k_9", {"k": str(k)}) for k in range(1, 9)]
    + [("pow", {"x": "9", "r": "0.125"}), ("pow", {"x": "0.36002", "r": "1.75"})]
)


def golden_value(expr: str, point: dict):
    with mpmath.workdps(DPS):
        return MP_EXPRS[expr](_args(point))


def compute_golden() -> list:
    out = []
    for expr, point in GRID:
        with mpmath.workdps(DPS):
            v = MP_EXPRS[expr](_args(point))
            tol = mpmath.mpf(10) ** (-(DIGITS - 5)) * max(1, abs(v))
            out.append({"expr": expr, "point": point, "value": mpmath.nstr(v, DIGITS, strip_zeros=False), "tolerance": mpmath.nstr(tol, 3)})
    return out


def write_golden(path=GOLDEN_PATH):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(compute_golden(), fh, indent=1)
        fh.write("\n")


def load_golden(path=GOLDEN_PATH) -> list:
    with open(path) as fh:
        return json.load(fh)


# -- kernel side of the comparison ----------------------------------------------------


def _iv(point, key) -> Interval:
    return Interval.enclose(point[key])


def _case_kernel(p):
    case = F.CASES[p["case"]]
    q = _iv(p, "q") if "q" in p else None
    return F.U_case(case, _iv(p, "a"), q)


def _case_margin(p):
    a = _iv(p, "a")
    U = _case_kernel(p).U
    return F.lhs_213(U, a) - F.U_star(a)


def _sin_kernel(p):
    from .constants import CONSTANTS

    return CONSTANTS.sin_k(int(p["k"]))


KERNEL_EXPRS = {
    "const_2_1": lambda p: F.const_2_1(_iv(p, "a")),
    "lambda": lambda p: F.lambda_value(_iv(p, "a"), Fraction(p["R"])),
    "F22": lambda p: F.F22(_iv(p, "a"), Fraction(p["R"])),
    "f": lambda p: F.f_factored(_iv(p, "x"), _iv(p, "a")),
    "Y": lambda p: F.Y_of(_iv(p, "x"), _iv(p, "a")),
    "U_star": lambda p: F.U_star(_iv(p, "a")),
    "v_star": lambda p: Interval(float(F.v_star(_iv(p, "a")))),
    "U_case": lambda p: _case_kernel(p).U,
    "U_A": lambda p: _case_kernel(p).UA,
    "U_B": lambda p: _case_kernel(p).UB,
    "lhs_213": lambda p: F.lhs_213(_iv(p, "U"), _iv(p, "a")),
    "case_margin": _case_margin,
    "sigma_bound": lambda p: F.sigma_bound(F.BoundParams(int(p["N"]), _iv(p, "m"), _iv(p, "M"), _iv(p, "C"))),
    "sin_pi_k_9": _sin_kernel,
    "pow": lambda p: _iv(p, "x").pow_rat(Fraction(p["r"])),
}


def kernel_enclosure(expr: str, point: dict) -> Interval:
    from .interval import as_interval

    return as_interval(KERNEL_EXPRS[expr](point))


def contains_golden(enc: Interval, record: dict) -> bool:
    v = Fraction(record["value"])
    tol = Fraction(record["tolerance"])
    return Fraction(enc.lo) - tol <= v <= Fraction(enc.hi) + tol


def oracle_formula_spotchecks(path=GOLDEN_PATH) -> dict:
    """Recompute every golden value and check the stored value and the kernel enclosure."""
    records = load_golden(path)
    failures = []
    for rec in records:
        fresh = golden_value(rec["expr"], rec["point"])
        with mpmath.workdps(DPS):
            if abs(fresh - mpmath.mpf(rec["value"])) > mpmath.mpf(rec["tolerance"]):
                failures.append({**rec, "problem": "stored value differs from recomputation"})
                continue
        enc = kernel_enclosure(rec["expr"], rec["point"])
        if not contains_golden(enc, rec):
            failures.append({**rec, "problem": "enclosure misses value", "enc": enc.to_json()})
    return {"suite": "spotchecks", "records": len(records), "violations": failures, "ok": not failures}


# -- finite optimization bound ----------------------------------------------------------


def _vertex_max(N, m, M, C):
    """Max over points with all coordinates at m or M except one free coordinate."""
    best = -math.inf
    for i in range(N):
        j = N - 1 - i
        need = C / (m**i * M**j)
        c = max(m, need)
        if c <= M * (1 + 1e-15):
            best = max(best, i / m**2 + j / M**2 + 1 / min(c, M) ** 2)
    return best


def _random_max(rng, N, m, M, C, samples):
    lm, lM, lC = math.log(m), math.log(M), math.log(C)
    t = rng.uniform(lm, lM, size=(samples, N))
    deficit = lC - t.sum(axis=1)
    room = (lM - t).sum(axis=1)
    alpha = np.clip(np.where(room > 0, deficit / np.where(room > 0, room, 1), 0), 0, 1)
    t = t + alpha[:, None] * (lM - t)
    return float(np.exp(-2 * t).sum(axis=1).max())


def _grid_max(N, m, M, C, points=20000):
    if N == 1:
        return 1 / max(m, C) ** 2 if max(m, C) <= M * (1 + 1e-15) else -math.inf
    g = max(2, int(round(points ** (1 / (N - 1)))))
    axis = np.linspace(m, M, g)
    mesh = np.meshgrid(*([axis] * (N - 1)), indexing="ij")
    pts = np.stack([x.ravel() for x in mesh], axis=1)
    last = np.maximum(m, C / pts.prod(axis=1))
    ok = last <= M * (1 + 1e-15)
    if not ok.any():
        return -math.inf
    vals = (1 / pts[ok] ** 2).sum(axis=1) + 1 / np.minimum(last[ok], M) ** 2
    return float(vals.max())


def _kernel_bound(N, m, M, C) -> float:
    p = F.BoundParams(N, Interval(m), Interval(M), Interval(C))
    try:
        return F.sigma_bound(p).hi
    except F.AmbiguityError as exc:
        cands = exc.candidates or range(N + 1)
        return max(F.sigma_bound_value(N, p.m, p.M, p.C, v).hi for v in cands)


def oracle_lemma_2_3(trials: int = 10_000, seed: int = 0, samples: int = 1000) -> dict:
    rng = np.random.default_rng(seed)
    violations = []
    structure = []
    max_excess = -math.inf
    for t in range(trials):
        N = int(rng.integers(1, 9))
        m = float(rng.uniform(0.2, 2.0))
        M = m if rng.random() < 0.05 else m * float(rng.uniform(1.01, 3.0))
        C = math.exp(rng.uniform(N * math.log(m), N * math.log(M))) if M > m else m**N
        bound = _kernel_bound(N, m, M, C)
        best = max(_vertex_max(N, m, M, C), _random_max(rng, N, m, M, C, samples))
        if N <= 4:
            best = max(best, _grid_max(N, m, M, C))
        excess = best - bound
        max_excess = max(max_excess, excess)
        if excess > 1e-9:
            violations.append({"trial": t, "N": N, "m": m, "M": M, "C": C, "bound": bound, "found": best})
        vert = _vertex_max(N, m, M, C)
        if abs(vert - bound) > 1e-9 * max(1.0, bound):
            structure.append({"trial": t, "N": N, "m": m, "M": M, "C": C, "bound": bound, "vertex": vert})
    return {
        "suite": "lemma23",
        "trials": trials,
        "seed": seed,
        "violations": violations,
        "structure_mismatches": structure,
        "max_excess": max_excess,
        "ok": not violations and not structure,
    }


# -- Moebius threshold -------------------------------------------------------------------


def oracle_lemma_2_6(samples: int = 100_000, seed: int = 0, sweep: int = 10_000, a_sweep: float = 0.845) -> dict:
    rng = np.random.default_rng(seed)
    a = rng.uniform(0.5, 1.0, samples)
    r = np.sqrt(rng.uniform(0, 1, samples))
    th = rng.uniform(0, 2 * np.pi, samples)
    z = r * np.exp(1j * th)
    gamma = (z - a) / (a * z - 1)
    thr = 1 / (1 + a - a * a)
    hit = np.abs(gamma) <= thr
    dist = np.abs(z - a)
    bad = hit & (dist > 1 + 1e-12)
    # dense sweeps: the unit circle, and the preimage of the threshold circle
    phi = np.linspace(0, 2 * np.pi, sweep, endpoint=False)
    zc = np.exp(1j * phi)
    gc = (zc - a_sweep) / (a_sweep * zc - 1)
    thr_s = 1 / (1 + a_sweep - a_sweep**2)
    bad_circle = (np.abs(gc) <= thr_s) & (np.abs(zc - a_sweep) > 1 + 1e-12)
    g_edge = thr_s * np.exp(1j * phi)
    z_edge = (g_edge - a_sweep) / (a_sweep * g_edge - 1)  # the map is an involution
    bad_edge = np.abs(z_edge - a_sweep) > 1 + 1e-12
    violations = [{"a": float(a[i]), "z": [float(z[i].real), float(z[i].imag)]} for i in np.flatnonzero(bad)[:20]]
    return {
        "suite": "lemma26",
        "samples": samples,
        "seed": seed,
        "hits": int(hit.sum()),
        "max_distance_on_hits": float(dist[hit].max()) if hit.any() else None,
        "violations": violations,
        "circle_violations": int(bad_circle.sum()),
        "edge_violations": int(bad_edge.sum()),
        "max_edge_distance": float(np.abs(z_edge - a_sweep).max()),
        "ok": not bad.any() and not bad_circle.any() and not bad_edge.any(),
    }


# -- product identities and the Sendov monitor --------------------------------------------

KINDS = ("uniform", "near_double", "near_a")


def oracle_identities(trials: int = 1000, seed: int = 0, tol: float = 1e-8) -> dict:
    rng = random.Random(seed)
    worst = {"lemma_2_4": 0.0, "logderiv": 0.0}
    violations = []
    failures = 0
    for t in range(trials):
        cfg = random_config(rng, kind=KINDS[t % len(KINDS)])
        try:
            res = identity_residuals(cfg)
        except NonConvergence as exc:
            failures += 1
            violations.append({"trial": t, "error": str(exc)})
            continue
        for k, v in res.items():
            worst[k] = max(worst[k], v)
        if max(res.values()) > tol:
            violations.append({"trial": t, "kind": KINDS[t % len(KINDS)], **res})
    return {
        "suite": "identities",
        "trials": trials,
        "seed": seed,
        "max_residual": worst,
        "nonconvergence": failures,
        "violations": violations,
        "ok": not violations,
    }


def sendov_monitor(trials: int = 10_000, seed: int = 0) -> dict:
    """Largest I_a seen on random configurations; a value above 1 would be reported."""
    rng = random.Random(seed)
    worst = 0.0
    worst_cfg = None
    reports = []
    for t in range(trials):
        cfg = random_config(rng)
        try:
            d = derive(cfg)
        except NonConvergence:
            continue
        if d.I_a > worst:
            worst, worst_cfg = d.I_a, cfg.to_dict()
        if not d.sendov_ok:
            reports.append({"trial": t, "I_a": d.I_a, "config": cfg.to_dict()})
    return {"suite": "sendov", "trials": trials, "seed": seed, "max_I_a": worst, "argmax": worst_cfg, "counterexamples": reports, "ok": not reports}


SUITES = {
    "lemma23": oracle_lemma_2_3,
    "lemma26": oracle_lemma_2_6,
    "identities": oracle_identities,
    "sendov": sendov_monitor,
    "spotchecks": lambda trials=None, seed=None: oracle_formula_spotchecks(),
}

if __name__ == "__main__":
    write_golden()
