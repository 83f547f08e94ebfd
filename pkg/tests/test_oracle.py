import random
from pathlib import Path

import mpmath
import numpy as np
import pytest

from sendov_cert import oracle as O
from sendov_cert import poly as P
from sendov_cert.formulas import CASES

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"

# -- golden file ------------------------------------------------------------------------


def test_spotchecks_pass():
    rep = O.oracle_formula_spotchecks()
    assert rep["ok"], rep["violations"]
    assert rep["records"] == len(O.GRID)


def test_golden_file_matches_grid():
    stored = O.load_golden()
    assert [(r["expr"], r["point"]) for r in stored] == [(e, p) for e, p in O.GRID]
    for r in stored:
        digits = r["value"].lstrip("-").replace(".", "").lstrip("0")
        assert len(digits) >= O.DIGITS - 1 or set(digits) <= {"0"} or r["expr"] == "v_star", r


def test_golden_spot_values():
    g = {(r["expr"], tuple(sorted(r["point"].items()))): mpmath.mpf(r["value"]) for r in O.load_golden()}
    assert abs(g[("U_star", (("a", "0.9"),))] - 15.450) < 5e-3
    assert abs(g[("F22", (("R", "0.46"), ("a", "0.845")))] - 5.2e-3) < 2e-4
    assert g[("Y", (("a", "0.9"), ("x", "0.9")))] > 0


def test_enclosure_miss_is_reported(tmp_path):
    """A corrupted golden value is caught by the recomputation."""
    import json

    recs = O.load_golden()
    recs[0] = {**recs[0], "value": "3.0"}
    path = tmp_path / "golden.json"
    path.write_text(json.dumps(recs))
    rep = O.oracle_formula_spotchecks(path)
    assert not rep["ok"] and len(rep["violations"]) == 1


# -- finite optimization bound -------------------------------------------------------------


def test_lemma23_example_exhaustive_grid():
    found = O._grid_max(2, 1.0, 2.0, 2.0, points=10**6)
    assert abs(found - 1.25) < 1e-9
    assert abs(O._kernel_bound(2, 1.0, 2.0, 2.0) - 1.25) < 1e-12


def test_lemma23_degenerate():
    m = 1.5
    bound = O._kernel_bound(3, m, m, m**3)
    assert abs(bound - 3 / m**2) < 1e-12
    assert abs(O._vertex_max(3, m, m, m**3) - bound) < 1e-12


def test_lemma23_random_trials():
    rep = O.oracle_lemma_2_3(trials=10_000, seed=0, samples=200)
    assert rep["violations"] == [] and rep["structure_mismatches"] == []
    assert rep["max_excess"] <= 1e-9


# -- Moebius threshold -------------------------------------------------------------------


def test_lemma26_center():
    for a in (0.5, 0.845, 0.99):
        assert P.mobius(a, a) == 0


def test_lemma26_samples_and_sweep():
    rep = O.oracle_lemma_2_6(samples=100_000, seed=0, sweep=10_000, a_sweep=0.845)
    assert rep["ok"]
    assert rep["hits"] > 0
    assert rep["circle_violations"] == rep["edge_violations"] == 0
    # the bound is attained on the threshold preimage, so it cannot be improved
    assert abs(rep["max_edge_distance"] - 1) < 1e-9


# -- identities and the monitor -------------------------------------------------------------


def test_identities_random_configs():
    rep = O.oracle_identities(trials=1000, seed=0)
    assert rep["ok"], rep["violations"][:3]
    assert rep["nonconvergence"] == 0
    assert max(rep["max_residual"].values()) <= 1e-8


def test_identities_on_fixtures():
    z9 = P.identity_residuals(P.PolyConfig.load(FIXTURES / "z9.json"))
    assert max(z9.values()) <= 1e-10
    z2 = P.identity_residuals(P.PolyConfig.load(FIXTURES / "z2.json"))
    assert max(z2.values()) == 0


def test_sendov_monitor():
    rep = O.sendov_monitor(trials=10_000, seed=0)
    assert rep["ok"] and rep["counterexamples"] == []
    assert rep["max_I_a"] <= 1 + 1e-8


@pytest.mark.parametrize("suite,kw", [("lemma23", {"trials": 200}), ("lemma26", {"samples": 5000}), ("identities", {"trials": 60}), ("sendov", {"trials": 60})])
def test_seeded_determinism(suite, kw):
    fn = O.SUITES[suite]
    assert fn(seed=3, **kw) == fn(seed=3, **kw)


def test_different_seeds_differ():
    assert O.oracle_lemma_2_6(samples=5000, seed=1)["hits"] != O.oracle_lemma_2_6(samples=5000, seed=2)["hits"]


# -- case chain at random feasible points -------------------------------------------------


def _random_feasible(rng):
    """A random (case, a, q) obeying the case constraints on q, or None."""
    case = rng.choice(sorted(CASES))
    n1, n2 = O.CASE_N[case]
    a = rng.uniform(0.845, 0.9999)
    if n1 == 0:
        return case, a, None
    s = float(O.mp_s())
    q = rng.uniform(s if n1 == 1 else s * s, 1.0)
    if q * (1 + a) ** n2 < 9:
        return None
    return case, a, q


def test_case_chain_at_random_points():
    """Wherever the oracle finds a point feasible, 4 < U < 64/9 and the contradiction margin is positive."""
    rng = random.Random(17)
    checked = 0
    xs = np.linspace(0.46, 1.0, 25)
    with mpmath.workdps(30):
        for _ in range(600):
            pick = _random_feasible(rng)
            if pick is None:
                continue
            case, a, q = pick
            _, _, U = O.mp_U_case(case, mpmath.mpf(a), None if q is None else mpmath.mpf(q))
            checked += 1
            assert 4 < U < mpmath.mpf(64) / 9, (case, a, q)
            assert O.mp_lhs(U, a) - O.mp_U_star(a) > 0, (case, a, q)
            for x in xs:
                assert O.mp_f(x, a) + (1 - mpmath.mpf(a) ** 2) * (U - 4) < 0, (case, a, q, x)
    assert checked >= 100
