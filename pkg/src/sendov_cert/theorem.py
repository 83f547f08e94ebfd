"""Run every certificate of the degree-nine argument and assemble a report."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from .conditions import CASE_IDS, build
from .prover import CERTIFIED, INCONCLUSIVE, REFUTED, Certificate, Options, canonical_json, certify

# Results used but not re-proved here.
ASSUMPTIONS = {
    "lemma-2.1-proof": "existence of the critical point zeta_0 = a + rho_0 e^(i theta_0) (imported)",
    "lemma-2.2-proof": "lower bound for products of distances to the zeros (imported; its consequence for q is checked by 3.1)",
    "lemma-2.5-proof": "bound for |gamma_0| (imported; evaluable as a diagnostic)",
    "lemma-2.8-proof": "bound of the derivative term by sigma (imported; evaluable as a diagnostic)",
    "lemma-2.10-proof": "fourth-power bound (imported; evaluable as a diagnostic)",
    "lemma-2.12-proof": "sum of 1/R_k^2 <= U*(a) (imported; evaluable as a diagnostic)",
    "a-below-0.845": "the case a < 0.845 is settled elsewhere and not checked here",
    "sigma-gt-4": "the contradiction step needs sigma > 4, which is not derived; U > 4 is certified on every feasible box",
}

VERDICT_CERTIFIED = "Certified"
VERDICT_REFUTED = "Refuted"
VERDICT_UNPROVEN = "Unproven"

# mutation key -> (condition ids affected, parameter name)
MUTATIONS = {
    "R": (("2.2",), "R"),
    "f22_exponent": (("2.2",), "exponent"),
    "clip": (tuple(f"{h}-{c}" for h in ("2.3", "2.13") for c in CASE_IDS), "clip"),
    "m": (("2.9", "2.9-x1"), "m"),
}


def plan(mutations: dict | None = None) -> list:
    """Condition ids in dependency order with their parameters."""
    mutations = mutations or {}
    for key in mutations:
        if key not in MUTATIONS:
            raise KeyError(f"unknown mutation {key!r}; known: {sorted(MUTATIONS)}")
    ids = ["3.1", "2.1", "2.2", "2.9", "2.9-x1"]
    ids += [f"2.3-{c}" for c in CASE_IDS]
    ids += [f"2.13-{c}" for c in CASE_IDS]
    out = []
    for cid in ids:
        params = {}
        for key, value in mutations.items():
            targets, pname = MUTATIONS[key]
            if cid in targets:
                params[pname] = value
        out.append((cid, params))
    return out


@dataclass
class TheoremReport:
    certificates: dict
    assumptions: dict
    verdict: str
    mutations: dict = field(default_factory=dict)
    hypothesis_report: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)

    def to_json(self, with_trees: bool = False) -> dict:
        certs = {}
        for cid, c in self.certificates.items():
            d = c.to_json()
            if not with_trees:
                d["children"] = {"digest": d["children"]["digest"]}
            certs[cid] = d
        return {
            "verdict": self.verdict,
            "assumptions": self.assumptions,
            "mutations": self.mutations,
            "hypothesis_report": self.hypothesis_report,
            "certificates": certs,
        }

    def to_markdown(self) -> str:
        lines = [f"# Verdict: {self.verdict}", "", "| condition | status | boxes | worst margin |", "|---|---|---|---|"]
        for cid, c in self.certificates.items():
            wm = c.stats.get("worst_margin") or {}
            m = wm.get("margin")
            lines.append(f"| {cid} | {c.status} | {c.stats.get('boxes_processed')} | {'' if m is None else f'{m:.4g}'} |")
        lines += ["", "## Assumptions", ""]
        lines += [f"- `{k}`: {v}" for k, v in self.assumptions.items()]
        hr = self.hypothesis_report
        if hr:
            lines += ["", "## Hypotheses 4 < U < 64/9", ""]
            lines += [f"- {k}: {v}" for k, v in hr.items()]
        if self.mutations:
            lines += ["", f"Mutations: {self.mutations}"]
        return "\n".join(lines) + "\n"


def _verdict(statuses) -> str:
    statuses = list(statuses)
    if any(s == REFUTED for s in statuses):
        return VERDICT_REFUTED
    if all(s == CERTIFIED for s in statuses):
        return VERDICT_CERTIFIED
    return VERDICT_UNPROVEN


def hypothesis_report(certs: dict) -> dict:
    """Range of the certified U enclosures over the contradiction leaves."""
    lo, hi, gaps = None, None, 0
    for cid, c in certs.items():
        if not cid.startswith("2.13-"):
            continue
        gaps += len(c.hypothesis_gaps)
        for leaf in _leaves(c.tree):
            U = (leaf.get("info") or {}).get("U")
            if U:
                lo = U[0] if lo is None else min(lo, U[0])
                hi = U[1] if hi is None else max(hi, U[1])
    return {"min_U_lower": lo, "max_U_upper": hi, "gap_boxes": gaps, "U_le_4_anywhere": bool(gaps) and (lo is None or lo <= 4)}


def _leaves(tree):
    stack = [tree]
    while stack:
        n = stack.pop()
        if "children" in n:
            stack.extend(n["children"])
        else:
            yield n


def verify_all(opts: Options | None = None, mutations: dict | None = None, progress=None) -> TheoremReport:
    opts = opts or Options()
    certs, timings = {}, {}
    for cid, params in plan(mutations):
        t0 = time.perf_counter()
        certs[cid] = certify(build(cid, params), opts)
        timings[cid] = time.perf_counter() - t0
        if progress:
            progress(cid, certs[cid], timings[cid])
    return TheoremReport(
        certificates=certs,
        assumptions=dict(ASSUMPTIONS),
        verdict=_verdict(c.status for c in certs.values()),
        mutations=dict(mutations or {}),
        hypothesis_report=hypothesis_report(certs),
        timings=timings,
    )


def write_report(report: TheoremReport, out_dir, fmt: str = "json") -> list:
    """One certificate file per condition plus the report; returns written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for cid, c in report.certificates.items():
        p = out / f"{cid}.json"
        p.write_text(c.dumps() + "\n")
        paths.append(p)
    if fmt == "md":
        p = out / "report.md"
        p.write_text(report.to_markdown())
    else:
        p = out / "report.json"
        p.write_text(json.dumps(report.to_json(), indent=1, sort_keys=True) + "\n")
    paths.append(p)
    return paths


def load_certificate(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


__all__ = [
    "ASSUMPTIONS",
    "MUTATIONS",
    "TheoremReport",
    "verify_all",
    "write_report",
    "load_certificate",
    "Certificate",
    "canonical_json",
    "INCONCLUSIVE",
]
