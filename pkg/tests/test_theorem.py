import json

import pytest

from sendov_cert import Options, verify_all
from sendov_cert.prover import CERTIFIED, INCONCLUSIVE, REFUTED, replay
from sendov_cert.theorem import (
    ASSUMPTIONS,
    MUTATIONS,
    VERDICT_CERTIFIED,
    VERDICT_REFUTED,
    VERDICT_UNPROVEN,
    _verdict,
    load_certificate,
    plan,
    write_report,
)

EXPECTED_ASSUMPTIONS = {
    "lemma-2.1-proof",
    "lemma-2.2-proof",
    "lemma-2.5-proof",
    "lemma-2.8-proof",
    "lemma-2.10-proof",
    "lemma-2.12-proof",
    "a-below-0.845",
    "sigma-gt-4",
}


def test_plan_order_and_mutation_routing():
    ids = [cid for cid, _ in plan()]
    assert len(ids) == len(set(ids)) == 15
    assert ids[0] == "3.1"
    routed = dict(plan({"R": "0.5", "m": "1/8"}))
    assert routed["2.2"] == {"R": "0.5"}
    assert routed["2.9"] == routed["2.9-x1"] == {"m": "1/8"}
    assert routed["2.1"] == {}
    with pytest.raises(KeyError):
        plan({"nonsense": 1})


def test_verdict_rules():
    assert _verdict([CERTIFIED, CERTIFIED]) == VERDICT_CERTIFIED
    assert _verdict([CERTIFIED, INCONCLUSIVE]) == VERDICT_UNPROVEN
    assert _verdict([INCONCLUSIVE, REFUTED]) == VERDICT_REFUTED


def test_full_run_is_certified(full_report):
    assert full_report.verdict == VERDICT_CERTIFIED
    assert set(full_report.assumptions) == EXPECTED_ASSUMPTIONS == set(ASSUMPTIONS)
    assert all(c.status == CERTIFIED for c in full_report.certificates.values())
    hr = full_report.hypothesis_report
    assert hr["gap_boxes"] == 0 and not hr["U_le_4_anywhere"]
    assert 4 < hr["min_U_lower"] <= hr["max_U_upper"] < 64 / 9


def test_depth_cap_is_unproven():
    rep = verify_all(Options(max_depth=1))
    assert rep.verdict == VERDICT_UNPROVEN


@pytest.mark.parametrize("mutation,condition", [({"R": "0.5"}, "2.2"), ({"f22_exponent": 8}, "2.2"), ({"m": "1/8"}, "2.9")])
def test_mutations_refute(mutation, condition):
    rep = verify_all(Options(), mutation)
    assert rep.verdict == VERDICT_REFUTED
    assert rep.certificates[condition].status == REFUTED
    assert rep.mutations == mutation


def test_dropping_the_clip_loses_the_certificate():
    """Without the feasibility clip, case iv is no longer certifiable at a depth that suffices with it."""
    opts = Options(max_depth=12)
    base = verify_all(opts)
    mutated = verify_all(opts, {"clip": "0"})
    for cid in ("2.3-iv", "2.13-iv"):
        assert base.certificates[cid].status == CERTIFIED
        assert mutated.certificates[cid].status == INCONCLUSIVE


def test_mutations_table():
    assert set(MUTATIONS) == {"R", "f22_exponent", "clip", "m"}


def test_write_report_json(full_report, tmp_path):
    paths = write_report(full_report, tmp_path)
    assert len(paths) == 16
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["verdict"] == VERDICT_CERTIFIED
    assert set(rep["assumptions"]) == EXPECTED_ASSUMPTIONS
    for cid in full_report.certificates:
        d = load_certificate(tmp_path / f"{cid}.json")
        assert d["seal"] and replay(d).ok, cid


def test_write_report_markdown(full_report, tmp_path):
    write_report(full_report, tmp_path, fmt="md")
    text = (tmp_path / "report.md").read_text()
    assert text.startswith("# Verdict: Certified")
    for cid in full_report.certificates:
        assert f"| {cid} |" in text
    assert "sigma-gt-4" in text


def test_report_is_reproducible(full_report, tmp_path):
    again = verify_all(Options(jobs=1))
    a = json.dumps(full_report.to_json(), sort_keys=True)
    b = json.dumps(again.to_json(), sort_keys=True)
    assert a == b
