"""Polynomials p(z) = (z - a) prod (z - z_k) and the quantities attached to them.

Computations run in binary64 complex arithmetic by default.  A configuration
may request a working precision (``dps``); then the zeros are read as decimal
strings and everything runs on mpmath numbers, which is what resolves the
eight-fold critical point of z^9 - c to a small cluster.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from pathlib import Path

import mpmath
import numpy as np

BOUNDARY_TOL = 1e-12
RESIDUAL_TOL = 1e-10


class ConfigError(ValueError):
    pass


class NonConvergence(RuntimeError):
    pass


class PoleError(ZeroDivisionError):
    pass


@dataclass
class PolyConfig:
    """Distinguished zero ``a`` plus the remaining zeros ``zeros``.

    The degree is ``len(zeros) + 1``; the main use is degree nine (eight zeros).
    """

    a: object
    zeros: list
    dps: int | None = None

    def __post_init__(self):
        if self.dps is not None:
            with mpmath.workdps(self.dps):
                self.a = mpmath.mpf(self.a)
                self.zeros = [mpmath.mpc(z) for z in self.zeros]
        else:
            self.a = float(self.a)
            self.zeros = [complex(z) for z in self.zeros]
        self.validate()

    @property
    def degree(self) -> int:
        return len(self.zeros) + 1

    def validate(self):
        if not self.zeros:
            raise ConfigError("need at least one zero besides a")
        if not (0 < self.a <= 1):
            raise ConfigError(f"a must lie in (0, 1], got {self.a}")
        for z in self.zeros:
            if abs(z) > 1 + BOUNDARY_TOL:
                raise ConfigError(f"zero {z} outside the closed unit disk")
            if abs(z) <= BOUNDARY_TOL:
                raise ConfigError("zeros must be nonzero")
            if abs(z - self.a) <= BOUNDARY_TOL:
                raise ConfigError(f"zero {z} coincides with a")

    def canonical_zeros(self) -> list:
        """Zeros in a fixed order, so results do not depend on the input labelling."""
        return sorted(self.zeros, key=lambda z: (float(z.real), float(z.imag)))

    # -- serialization --

    @classmethod
    def from_dict(cls, d: dict) -> "PolyConfig":
        if not isinstance(d, dict):
            raise ConfigError("configuration must be a JSON object with 'a' and 'zeros'")
        dps = d.get("dps")
        if dps is not None:
            with mpmath.workdps(int(dps)):
                a = mpmath.mpf(str(d["a"]))
                zeros = [mpmath.mpc(mpmath.mpf(str(re)), mpmath.mpf(str(im))) for re, im in d["zeros"]]
            return cls(a, zeros, int(dps))
        return cls(float(d["a"]), [complex(float(re), float(im)) for re, im in d["zeros"]])

    @classmethod
    def load(cls, path) -> "PolyConfig":
        with open(Path(path)) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        if self.dps is not None:
            with mpmath.workdps(self.dps):
                return {
                    "a": mpmath.nstr(self.a, self.dps),
                    "zeros": [[mpmath.nstr(z.real, self.dps), mpmath.nstr(z.imag, self.dps)] for z in self.zeros],
                    "dps": self.dps,
                }
        return {"a": self.a, "zeros": [[z.real, z.imag] for z in self.zeros]}


# -- coefficient arithmetic -------------------------------------------------------


def coeffs_from_roots(roots, one=1.0):
    """Monic coefficients, highest degree first."""
    c = [one]
    for r in roots:
        nxt = c + [0 * one]
        for i in range(1, len(nxt)):
            nxt[i] = nxt[i] - r * c[i - 1]
        c = nxt
    return c


def derivative(c):
    n = len(c) - 1
    return [c[i] * (n - i) for i in range(n)]


def horner2(c, z):
    """p(z) and p'(z)."""
    p = c[0]
    dp = 0 * c[0]
    for coef in c[1:]:
        dp = dp * z + p
        p = p * z + coef
    return p, dp


def value_residual(c, z) -> float:
    """|p(z)| relative to the coefficient norm weighted at |z|."""
    p, _ = horner2(c, z)
    t = max(1.0, float(abs(z)))
    n = len(c) - 1
    norm = sum(float(abs(coef)) * t ** (n - i) for i, coef in enumerate(c))
    return float(abs(p)) / norm if norm else 0.0


def aberth(c, seed: int = 0, max_iter: int = 500, dps: int | None = None):
    """All roots of the polynomial with coefficients ``c`` (highest first).

    Initial guesses sit on a circle around the root centroid whose radius is the
    Fujiwara bound of the shifted polynomial; ``seed`` only rotates the circle.
    """
    n = len(c) - 1
    if n < 1:
        return []
    mp = dps is not None
    cexp = mpmath.expjpi if mp else None
    lead = c[0]
    c = [coef / lead for coef in c]
    center = -c[1] / n
    # shifted polynomial gives the spread around the centroid
    shifted = _taylor_shift(c, center)
    radius = 0.0
    for i in range(1, n + 1):
        mag = float(abs(shifted[i]))
        if mag:
            radius = max(radius, (mag / (2 if i == n else 1)) ** (1.0 / i))
    radius *= 2
    if radius == 0.0:
        return [center] * n
    offset = 0.4 + random.Random(seed).random() if seed else 0.4
    roots = []
    for k in range(n):
        theta = 2 * math.pi * k / n + offset / n
        if mp:
            roots.append(center + radius * cexp(mpmath.mpf(theta) / mpmath.pi))
        else:
            roots.append(center + radius * complex(math.cos(theta), math.sin(theta)))
    eps = 10.0 ** (-(dps - 4)) if mp else 4e-16
    for _ in range(max_iter):
        worst = 0.0
        for k in range(n):
            zk = roots[k]
            p, dp = horner2(c, zk)
            if p == 0:
                continue
            ratio = p / dp if dp != 0 else None
            s = sum(1 / (zk - roots[j]) for j in range(n) if j != k and roots[j] != zk)
            if ratio is None:
                corr = 1 / s if s != 0 else 0
            else:
                corr = ratio / (1 - ratio * s)
            roots[k] = zk - corr
            worst = max(worst, float(abs(corr)) / (1.0 + float(abs(zk))))
        if worst <= eps:
            break
    return roots


def _aberth_float(c, seed: int = 0, max_iter: int = 500):
    """Vectorized (Jacobi-style) variant of :func:`aberth` for binary64 coefficients."""
    c = np.asarray(c, dtype=complex)
    n = len(c) - 1
    c = c / c[0]
    center = -c[1] / n
    shifted = np.asarray(_taylor_shift(list(c), center))
    mags = np.abs(shifted[1:])
    exps = 1.0 / np.arange(1, n + 1)
    mags[-1] /= 2
    radius = 2 * float(np.max(np.where(mags > 0, mags**exps, 0.0)))
    if radius == 0.0:
        return [complex(center)] * n
    offset = 0.4 + random.Random(seed).random() if seed else 0.4
    theta = 2 * np.pi * np.arange(n) / n + offset / n
    z = center + radius * np.exp(1j * theta)
    dc = c[:-1] * np.arange(n, 0, -1)
    eye = np.eye(n, dtype=bool)
    polish = 2
    for _ in range(max_iter):
        p = np.polyval(c, z)
        dp = np.polyval(dc, z)
        diff = z[:, None] - z[None, :]
        diff[eye] = 1.0
        inv = 1.0 / diff
        inv[eye] = 0.0
        s = inv.sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = p / dp
            corr = ratio / (1 - ratio * s)
        corr = np.where(p == 0, 0, corr)
        if not np.all(np.isfinite(corr)):
            break
        z = z - corr
        step = float(np.max(np.abs(corr) / (1 + np.abs(z))))
        if step <= 1e-14:
            polish -= 1
            if polish < 0:
                break
    return [complex(x) for x in z]


def _taylor_shift(c, t):
    """Coefficients of p(z + t), highest first."""
    c = list(c)
    n = len(c) - 1
    for i in range(n):
        for j in range(1, n - i + 1):
            c[j] = c[j] + t * c[j - 1]
    return c


def _sort_key(z):
    return (float(z.real), float(z.imag))


def critical_points(config: PolyConfig, seed: int = 0, max_iter: int = 500):
    """Roots of p' with the worst value residual |p'(zeta)| / ||p'||."""
    ctx = mpmath.workdps(config.dps) if config.dps else _Null()
    with ctx:
        one = mpmath.mpf(1) if config.dps else 1.0
        roots = [config.a] + config.canonical_zeros()
        dp = derivative(coeffs_from_roots(roots, one))
        if config.dps:
            crit = aberth(dp, seed=seed, max_iter=max_iter, dps=config.dps)
        else:
            crit = _aberth_float(dp, seed=seed, max_iter=max_iter)
        crit = _polish_isolated(crit, roots)
        resid = max((value_residual(dp, z) for z in crit), default=0.0)
    if resid > RESIDUAL_TOL or not all(map(_finite, crit)):
        raise NonConvergence(f"root residual {resid:.3e} above {RESIDUAL_TOL:g}")
    return sorted(crit, key=_sort_key), resid


def _logderiv(z, roots):
    g = dg = 0
    for r in roots:
        t = 1 / (z - r)
        g = g + t
        dg = dg - t * t
    return g, dg


def _polish(z, roots, steps: int = 3):
    """Newton on p'/p = sum 1/(z - z_k), which stays well conditioned near clustered zeros."""
    try:
        g, dg = _logderiv(z, roots)
        for _ in range(steps):
            if g == 0 or dg == 0:
                break
            w = z - g / dg
            gw, dgw = _logderiv(w, roots)
            if not abs(gw) < abs(g):
                break
            z, g, dg = w, gw, dgw
    except ZeroDivisionError:
        pass
    return z


def _polish_isolated(crit, roots):
    # only roots nearer to a zero than to any other critical point; clustered
    # (multiple) critical points are left as the simultaneous iteration found them
    out = list(crit)
    for i, z in enumerate(crit):
        near_zero = min(abs(z - r) for r in roots)
        near_crit = min((abs(z - w) for j, w in enumerate(crit) if j != i), default=math.inf)
        if near_zero < near_crit:
            out[i] = _polish(z, roots)
    return out


class _Null:
    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False


def _finite(z) -> bool:
    return math.isfinite(float(z.real)) and math.isfinite(float(z.imag))


def mobius(z, a):
    """(z - a) / (a z - 1)."""
    den = a * z - 1
    if abs(den) < 1e-14:
        raise PoleError(f"a z = 1 at z={z}, a={a}")
    return (z - a) / den


@dataclass
class DerivedQuantities:
    r: list
    rho: list
    I_a: float
    sigma: float
    sigma_A: float
    sigma_B: float
    delta: float
    q: float
    n1: int
    n2: int
    Rk_norm: list
    w: list
    gamma: list
    critical_points: list
    root_residual: float
    boundary_ambiguous: bool
    lower_bound_1_3_holds: bool
    sendov_ok: bool
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        def cplx(zs):
            return [[float(z.real), float(z.imag)] for z in zs]

        return {
            "r": self.r,
            "rho": self.rho,
            "I_a": self.I_a,
            "sigma": self.sigma,
            "sigma_A": self.sigma_A,
            "sigma_B": self.sigma_B,
            "delta": self.delta,
            "q": self.q,
            "n1": self.n1,
            "n2": self.n2,
            "Rk_norm": self.Rk_norm,
            "w": cplx(self.w),
            "gamma": cplx(self.gamma),
            "critical_points": cplx(self.critical_points),
            "root_residual": self.root_residual,
            "boundary_ambiguous": self.boundary_ambiguous,
            "lower_bound_1_3_holds": self.lower_bound_1_3_holds,
            "sendov_ok": self.sendov_ok,
            "notes": self.notes,
        }


def derive(config: PolyConfig, seed: int = 0) -> DerivedQuantities:
    crit, resid = critical_points(config, seed=seed)
    ctx = mpmath.workdps(config.dps) if config.dps else _Null()
    with ctx:
        a = config.a
        zeros = config.canonical_zeros()
        n = config.degree
        r_raw = [abs(a - z) for z in zeros]
        r = sorted(float(x) for x in r_raw)
        rho = sorted(float(abs(a - zeta)) for zeta in crit)
        inner = [x for x in r if x < 1]
        q = math.prod(inner) if inner else 1.0
        sigma_A = sum(1 / x**2 for x in inner)
        sigma_B = sum(1 / x**2 for x in r if x >= 1)
        delta = float((1 / a + sum(1 / z for z in zeros)).real)
        log_mean = sum(math.log(x) for x in r) / (n - 1)
        Rk = [x * math.exp(-log_mean) for x in r]
        w = [complex(mobius(z, a)) for z in zeros]
        gamma = []
        notes = []
        for zeta in crit:
            try:
                gamma.append(complex(mobius(zeta, a)))
            except PoleError:
                gamma.append(complex(math.inf, 0.0))
                notes.append("critical point at the pole of the Moebius map")
    I_a = rho[0]
    lb = 2 * I_a * math.sin(math.pi / n)
    return DerivedQuantities(
        r=r,
        rho=rho,
        I_a=I_a,
        sigma=sigma_A + sigma_B,
        sigma_A=sigma_A,
        sigma_B=sigma_B,
        delta=delta,
        q=q,
        n1=len(inner),
        n2=len(r) - len(inner),
        Rk_norm=Rk,
        w=w,
        gamma=gamma,
        critical_points=[complex(z) for z in crit],
        root_residual=resid,
        boundary_ambiguous=any(abs(x - 1) <= 1e-10 for x in r),
        lower_bound_1_3_holds=all(x >= lb for x in r),
        sendov_ok=I_a <= 1 + 1e-8,
        notes=notes,
    )


def identity_residuals(config: PolyConfig, seed: int = 0) -> dict:
    """Relative residuals of prod r_k = n prod rho_j and of the log-derivative at 0."""
    crit, _ = critical_points(config, seed=seed)
    ctx = mpmath.workdps(config.dps) if config.dps else _Null()
    with ctx:
        a = config.a
        zeros = config.canonical_zeros()
        n = config.degree
        prod_r = math.prod(float(abs(a - z)) for z in zeros)
        prod_rho = math.prod(float(abs(a - zeta)) for zeta in crit)
        lemma = abs(prod_r - n * prod_rho) / prod_r
        # p'(0)/p(0) from the critical points versus the zeros
        prod_zeta = 1
        for zeta in crit:
            prod_zeta = prod_zeta * zeta
        prod_z = 1
        for z in zeros:
            prod_z = prod_z * z
        from_crit = -n * prod_zeta / (a * prod_z)
        from_zeros = -(1 / a + sum(1 / z for z in zeros))
        scale = float(abs(1 / a) + sum(abs(1 / z) for z in zeros))
        logd = float(abs(from_crit - from_zeros)) / scale
    return {"lemma_2_4": lemma, "logderiv": logd}


def cluster_radius(points, center=0) -> float:
    return max(float(abs(z - center)) for z in points)


# -- sampling ---------------------------------------------------------------------


def random_config(rng: random.Random, n_zeros: int = 8, kind: str = "uniform") -> PolyConfig:
    """Random configuration: ``uniform`` in the disk, ``near_double`` (two zeros
    10^-6 apart) or ``near_a`` (one zero at distance 10^-3 from a)."""

    def disk():
        while True:
            rad = math.sqrt(rng.random())
            th = rng.uniform(0, 2 * math.pi)
            z = complex(rad * math.cos(th), rad * math.sin(th))
            if abs(z) > 1e-3:
                return z

    a = rng.uniform(0.05, 0.999)
    zeros = [disk() for _ in range(n_zeros)]
    if kind == "near_double":
        z0 = zeros[0] * 0.999
        zeros[0] = z0
        zeros[1] = z0 + 1e-6 * complex(math.cos(rng.random() * 6.28), math.sin(rng.random() * 6.28))
        if abs(zeros[1]) > 1:
            zeros[1] = z0 - (zeros[1] - z0)
    elif kind == "near_a":
        th = rng.uniform(0, 2 * math.pi)
        cand = a + 1e-3 * complex(math.cos(th), math.sin(th))
        if abs(cand) > 1:
            cand = a - 1e-3
        zeros[0] = cand
    elif kind != "uniform":
        raise ValueError(f"unknown sampling kind {kind!r}")
    return PolyConfig(a, zeros)


def z9_config(c: str = "0.5", dps: int | None = 60) -> PolyConfig:
    """p(z) = z^9 - c with a = c^(1/9); all eight critical points sit at 0."""
    with mpmath.workdps(dps or 30):
        a = mpmath.root(mpmath.mpf(c), 9)
        zeros = [a * mpmath.expjpi(mpmath.mpf(2 * k) / 9) for k in range(1, 9)]
        if dps is None:
            return PolyConfig(float(a), [complex(z) for z in zeros])
        return PolyConfig(a, zeros, dps)
