"""The nine acceptance criteria, each at its stated tolerance and time limit.

Every test logs one PASS/FAIL line through the ``acceptance_log`` fixture; the
lines are repeated in the terminal summary.
"""

import copy
import json
import struct
import time
from fractions import Fraction

from sendov_cert import Options, verify_all
from sendov_cert import oracle as O
from sendov_cert.conditions import CASE_IDS, build
from sendov_cert.constants import CONSTANTS
from sendov_cert.exact import exact_eval
from sendov_cert import formulas as F
from sendov_cert.prover import CERTIFIED, canonical_json, certify, iter_leaves, replay
from sendov_cert.theorem import VERDICT_CERTIFIED, VERDICT_REFUTED

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


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def _check(acceptance_log, number, checks: dict, summary: str):
    failed = [name for name, ok in checks.items() if not ok]
    ok = not failed
    acceptance_log(number, ok, summary + ("" if ok else f" (failed: {', '.join(failed)})"))
    assert ok, failed


def test_criterion_1_constant_identity(acceptance_log):
    cert, secs = _timed(lambda: certify(build("3.1")))
    rep = CONSTANTS.identity_check()
    lhs, rhs = rep["lhs"], rep["rhs"]
    hull = max(lhs[1], rhs[1]) - min(lhs[0], rhs[0])
    checks = {
        "certified": cert.status == CERTIFIED,
        "overlap": rep["overlap"],
        "width <= 2^-40": hull <= 2.0**-40,
        "runtime < 1 s": secs < 1,
    }
    _check(acceptance_log, 1, checks, f"9/prod 2sin(pi k/9) and (2 sin(pi/9))^2 agree, width {hull:.2e}, {secs:.3f} s")


def test_criterion_2_f22(acceptance_log):
    cert, secs = _timed(lambda: certify(build("2.2")))
    kinds = {}
    equality_at_one = True
    for box, leaf in iter_leaves(cert.tree, cert.domain):
        kinds[leaf["leaf"]] = kinds.get(leaf["leaf"], 0) + 1
        if leaf["leaf"] == "equality":
            equality_at_one &= box.hi[0] == 1.0
    checks = {
        "certified": cert.status == CERTIFIED,
        "domain covers [0.845, 1]": cert.domain.lo[0] <= 0.845 and cert.domain.hi[0] == 1.0,
        "strict leaves plus one equality leaf": set(kinds) == {"certified", "equality"} and kinds["equality"] == 1,
        "equality leaf ends at a = 1": equality_at_one,
        "F22(1) = 0 exactly": exact_eval(F.F22, {"a": 1, "R": "0.46"}) == 0,
        "runtime < 60 s": secs < 60,
    }
    _check(acceptance_log, 2, checks, f"F22(a, 0.46) >= 0 on [0.845, 1], {kinds.get('certified', 0)} strict leaves, {secs:.2f} s")


def test_criterion_3_Y(acceptance_log):
    (cert, edge), secs = _timed(lambda: (certify(build("2.9")), certify(build("2.9-x1"))))
    x, a = cert.domain.ranges()
    checks = {
        "certified": cert.status == CERTIFIED,
        "domain covers [0.46, 0.999] x [0.845, 1]": x.lo <= 0.46 and x.hi >= 0.999 and a.lo <= 0.845 and a.hi >= 1,
        "Y(1, a) = 0 exactly": edge.status == CERTIFIED and edge.tree["leaf"] == "exact",
        "runtime < 60 s": secs < 60,
    }
    _check(acceptance_log, 3, checks, f"Y > 0 on the box and Y(1, a) = 0 exactly, {secs:.2f} s")


def test_criterion_4_mixed_inequality(acceptance_log, full_report):
    ids = [f"2.3-{c}" for c in CASE_IDS]
    certs = [full_report.certificates[i] for i in ids]
    secs = sum(full_report.timings[i] for i in ids)
    checks = {
        "five certified": all(c.status == CERTIFIED for c in certs),
        "x covers [0.46, 1]": all(c.domain.lo[0] <= 0.46 and c.domain.hi[0] == 1.0 for c in certs),
        "runtime < 5 min": secs < 300,
    }
    _check(acceptance_log, 4, checks, f"f + (1-a^2)(U-4) < 0 in all five cases, {secs:.2f} s")


def _golden(expr, point):
    for r in O.load_golden():
        if r["expr"] == expr and r["point"] == point:
            return r
    raise KeyError((expr, point))


def test_criterion_5_case_contradictions(acceptance_log, full_report):
    ids = [f"2.13-{c}" for c in CASE_IDS]
    certs = [full_report.certificates[i] for i in ids]
    secs = sum(full_report.timings[i] for i in ids)
    per_case = [sum(1 for _, leaf in iter_leaves(c.tree, c.domain) if (leaf.get("info") or {}).get("strip")) for c in certs]
    strip_leaves = sum(per_case)
    spots = {
        ("U_case", (("case", "i"), ("a", "0.9"))): (5.41185, 1e-5),
        ("lhs_213", (("U", "5.41185"), ("a", "0.9"))): (62.65, 5e-3),
        ("U_star", (("a", "0.9"),)): (15.450, 5e-3),
    }
    spots_ok = True
    for (expr, pt), (quoted, tol) in spots.items():
        rec = _golden(expr, dict(pt))
        enc = O.kernel_enclosure(expr, rec["point"])
        v = Fraction(rec["value"])
        spots_ok &= O.contains_golden(enc, rec) and abs(float(v) - quoted) <= tol * max(1, quoted)
    checks = {
        "five certified": all(c.status == CERTIFIED for c in certs),
        "zero hypothesis gaps": all(not c.hypothesis_gaps for c in certs),
        "U within (4, 64/9)": 4 < full_report.hypothesis_report["min_U_lower"] and full_report.hypothesis_report["max_U_upper"] < 64 / 9,
        "a -> 1 strip covered in every case": all(per_case),
        "golden spot values": spots_ok,
        "runtime < 10 min": secs < 600,
    }
    _check(acceptance_log, 5, checks, f"lhs_213(U, a) > U*(a) in all five cases, {strip_leaves} strip leaves, {secs:.2f} s")


def test_criterion_6_oracle_suites(acceptance_log):
    def suites():
        return (
            O.oracle_lemma_2_3(trials=10_000, seed=0),
            O.oracle_lemma_2_6(samples=100_000, seed=0),
            O.oracle_identities(trials=1000, seed=0),
        )

    (l23, l26, ids), secs = _timed(suites)
    worst = max(ids["max_residual"].values())
    checks = {
        "lemma23 zero violations": not l23["violations"],
        "lemma26 zero violations": l26["ok"],
        "identities <= 1e-8": ids["ok"] and worst <= 1e-8,
        "runtime < 60 s": secs < 60,
    }
    _check(acceptance_log, 6, checks, f"10^4 / 10^5 / 10^3 oracle runs clean, worst residual {worst:.1e}, {secs:.1f} s")


def test_criterion_7_mutation_honesty(acceptance_log, full_report):
    shallow = Options(max_depth=12)
    control_shallow = verify_all(shallow)
    runs = {
        "R=0.5": (full_report, verify_all(Options(), {"R": "0.5"})),
        "f22_exponent=8": (full_report, verify_all(Options(), {"f22_exponent": 8})),
        "m=1/8": (full_report, verify_all(Options(), {"m": "1/8"})),
        "clip=0": (control_shallow, verify_all(shallow, {"clip": "0"})),
    }
    flipped = {}
    for name, (base, mut) in runs.items():
        flipped[name] = sorted(
            cid for cid, c in mut.certificates.items() if base.certificates[cid].status == CERTIFIED and c.status != CERTIFIED
        )
    n = sum(1 for v in flipped.values() if v)
    checks = {
        "at least three mutations flip": n >= 3,
        "refutations are reported as such": runs["R=0.5"][1].verdict == VERDICT_REFUTED and runs["f22_exponent=8"][1].verdict == VERDICT_REFUTED,
    }
    text = "; ".join(f"{k} -> {','.join(v) or 'none'}" for k, v in flipped.items())
    _check(acceptance_log, 7, checks, f"{n} mutations flip a certificate ({text})")


def _flip_bit(x: float, bit: int) -> float:
    (u,) = struct.unpack("<Q", struct.pack("<d", x))
    return struct.unpack("<d", struct.pack("<Q", u ^ (1 << bit)))[0]


def test_criterion_8_replay(acceptance_log, full_report):
    sealed = {cid: json.loads(c.dumps()) for cid, c in full_report.certificates.items()}
    all_ok = all(replay(d).ok for d in sealed.values())
    # one bit of one leaf enclosure
    d = copy.deepcopy(sealed["2.2"])
    node = d["children"]["tree"]
    while "children" in node:
        node = node["children"][0]
    node["enc"][0] = _flip_bit(node["enc"][0], 0)
    leaf_caught = not replay(d).ok
    # one bit anywhere in the serialized file, at fixed positions
    text = bytearray(canonical_json(sealed["2.13-iv"]).encode())
    caught, tried = 0, 0
    for pos in range(7, len(text), max(1, len(text) // 40)):
        mutated = bytearray(text)
        mutated[pos] ^= 1
        try:
            obj = json.loads(mutated.decode())
        except (UnicodeDecodeError, json.JSONDecodeError):
            continue
        if obj == sealed["2.13-iv"]:
            continue
        tried += 1
        caught += not replay(obj).ok
    checks = {
        "all certificates replay": all_ok,
        "leaf bit flip detected": leaf_caught,
        "file bit flips detected": tried > 0 and caught == tried,
    }
    _check(acceptance_log, 8, checks, f"{len(sealed)} certificates replay; tampering caught ({caught}/{tried} file flips)")


def test_criterion_9_end_to_end(acceptance_log, full_report):
    secs = full_report.timings["__total__"]
    checks = {
        "verdict Certified": full_report.verdict == VERDICT_CERTIFIED,
        "assumption ledger exact": set(full_report.assumptions) == EXPECTED_ASSUMPTIONS,
        "runtime < 20 min": secs < 1200,
    }
    _check(acceptance_log, 9, checks, f"verify-all verdict {full_report.verdict} with {len(full_report.assumptions)} assumptions, {secs:.1f} s")
