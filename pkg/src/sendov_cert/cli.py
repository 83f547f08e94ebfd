"""Command-line entry point ``sendov-cert``.

Exit codes: 0 certified / success, 1 refuted (or replay failure, or oracle
violations), 2 inconclusive, 3 usage or I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import formulas as F
from .conditions import CONDITION_IDS, build, default_domain
from .interval import DomainError, Interval
from .prover import CERTIFIED, INFEASIBLE, REFUTED, Box, Options, certify, replay
from .theorem import MUTATIONS, VERDICT_CERTIFIED, VERDICT_REFUTED, verify_all, write_report

EXIT_OK, EXIT_REFUTED, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _default_out() -> str:
    return os.environ.get("SENDOV_CERT_DIR", "certificates")


def _key_values(items, what) -> dict:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise UsageError(f"{what} expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _options(args) -> Options:
    if args.max_depth < 0 or args.min_width <= 0 or args.jobs < 1 or args.budget < 1:
        raise UsageError("limits must be positive")
    return Options(max_depth=args.max_depth, min_width=args.min_width, budget=args.budget, jobs=args.jobs)


def _status_code(status: str) -> int:
    if status in (CERTIFIED, INFEASIBLE):
        return EXIT_OK
    if status == REFUTED:
        return EXIT_REFUTED
    return EXIT_INCONCLUSIVE


def _print(obj, fmt="json"):
    sys.stdout.write(json.dumps(obj, indent=1, sort_keys=True) + "\n")


# -- commands -------------------------------------------------------------------------


def cmd_verify_all(args) -> int:
    mutations = _key_values(args.mutate, "--mutate")
    for k in mutations:
        if k not in MUTATIONS:
            raise UsageError(f"unknown mutation {k!r}; known: {', '.join(sorted(MUTATIONS))}")

    def progress(cid, cert, secs):
        wm = (cert.stats.get("worst_margin") or {}).get("margin")
        extra = "" if wm is None else f" worst_margin={wm:.4g}"
        print(f"{cid:12s} {cert.status:13s} boxes={cert.stats['boxes_processed']}{extra}", flush=True)

    report = verify_all(_options(args), mutations, progress=None if args.quiet else progress)
    try:
        write_report(report, args.out, args.format)
    except OSError as exc:
        raise UsageError(f"cannot write to {args.out}: {exc}") from exc
    print(f"verdict: {report.verdict}")
    if report.verdict == VERDICT_CERTIFIED:
        return EXIT_OK
    if report.verdict == VERDICT_REFUTED:
        return EXIT_REFUTED
    return EXIT_INCONCLUSIVE


def _parse_box(cond_id, items, params) -> Box | None:
    ranges = _key_values(items, "--box")
    if not ranges:
        return None
    base = default_domain(cond_id, params)
    if base is None:
        raise UsageError(f"{cond_id} has no box domain")
    lo, hi = list(base.lo), list(base.hi)
    for name, spec in ranges.items():
        if name not in base.names:
            raise UsageError(f"{cond_id} has no dimension {name!r} (dimensions: {', '.join(base.names)})")
        try:
            a, b = spec.split(":")
            i = base.index(name)
            lo[i], hi[i] = Interval.enclose(a).lo, Interval.enclose(b).hi
        except (ValueError, ArithmeticError) as exc:
            raise UsageError(f"bad range {spec!r} for {name}") from exc
    try:
        return Box(base.names, tuple(lo), tuple(hi))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_certify(args) -> int:
    if args.condition not in CONDITION_IDS:
        raise UsageError(f"unknown condition {args.condition!r}; known: {', '.join(CONDITION_IDS)}")
    params = _key_values(args.param, "--param")
    domain = _parse_box(args.condition, args.box, params)
    try:
        cond = build(args.condition, params, domain)
    except (ValueError, KeyError, ArithmeticError) as exc:
        raise UsageError(f"bad parameters: {exc}") from exc
    cert = certify(cond, _options(args))
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        path = out / f"{cert.condition_id}.json"
        path.write_text(cert.dumps() + "\n")
    except OSError as exc:
        raise UsageError(f"cannot write to {out}: {exc}") from exc
    summary = {k: v for k, v in cert.to_json().items() if k != "children"}
    summary["digest"] = cert.digest
    summary["path"] = str(path)
    _print(summary)
    return _status_code(cert.status)


def cmd_replay(args) -> int:
    try:
        text = Path(args.path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {args.path}: {exc}") from exc
    try:
        data = json.loads(text)
    except ValueError as exc:
        print(json.dumps({"ok": False, "errors": [f"not valid JSON: {exc}"]}))
        return EXIT_REFUTED
    res = replay(data)
    _print({"ok": res.ok, "errors": res.errors, "leaves_checked": res.leaves_checked, "status": res.status})
    return EXIT_OK if res.ok else EXIT_REFUTED


def cmd_poly(args) -> int:
    from .poly import ConfigError, NonConvergence, PolyConfig, derive, identity_residuals

    try:
        cfg = PolyConfig.load(args.path)
    except OSError as exc:
        raise UsageError(f"cannot read {args.path}: {exc}") from exc
    except (ConfigError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"invalid polynomial file: {exc}") from exc
    try:
        d = derive(cfg, seed=args.seed)
        res = identity_residuals(cfg, seed=args.seed)
    except NonConvergence as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return EXIT_INCONCLUSIVE
    out = {"config": cfg.to_dict(), "derived": d.to_dict(), "identity_residuals": res}
    out["diagnostics"] = _diagnostics(cfg, d)
    _print(out)
    return EXIT_OK


def _diagnostics(cfg, d) -> dict:
    from .poly import PolyConfig

    diag = {}
    if cfg.degree != 9:
        return diag
    if cfg.dps is not None:
        cfg = PolyConfig(float(cfg.a), [complex(z) for z in cfg.zeros])
    a = Interval(cfg.a)
    try:
        diag["lemma_2_6_threshold"] = F.lemma_2_6_threshold(a).to_json()
        diag["lemma_2_8_bound"] = F.lemma_2_8_bound(a, Interval(d.sigma)).to_json()
        diag["lemma_2_10_factor"] = F.lemma_2_10_factor(cfg).to_json()
        diag["lemma_2_12_sum"] = F.lemma_2_12_sum(cfg).to_json()
        diag["eq_2_1_rhs"] = F.eq_2_1_rhs(cfg).to_json()
        if cfg.a >= 0.845:
            diag["U_star"] = F.U_star(a).to_json()
    except (DomainError, F.AmbiguityError, ZeroDivisionError) as exc:
        diag["error"] = str(exc)
    return diag


def cmd_sample(args) -> int:
    from . import oracle

    if args.suite not in oracle.SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; known: {', '.join(sorted(oracle.SUITES))}")
    fn = oracle.SUITES[args.suite]
    kwargs = {}
    if args.suite != "spotchecks":
        if args.trials is not None:
            kwargs["samples" if args.suite == "lemma26" else "trials"] = args.trials
        kwargs["seed"] = args.seed
    rep = fn(**kwargs)
    _print(rep)
    return EXIT_OK if rep["ok"] else EXIT_REFUTED


def _grid(spec: str) -> list:
    try:
        parts = [Fraction(p) for p in spec.split(":")]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad grid {spec!r}") from exc
    if len(parts) == 1:
        return [parts[0]]
    if len(parts) != 3 or parts[2] <= 0 or parts[1] < parts[0]:
        raise UsageError(f"grid must be lo:hi:step with step > 0, got {spec!r}")
    lo, hi, step = parts
    n = int((hi - lo) / step)
    return [lo + k * step for k in range(n + 1)]


def _fmt(x) -> str:
    return f"{x:.10g}"


def cmd_curves(args) -> int:
    if args.case not in F.CASES:
        raise UsageError(f"unknown case {args.case!r}")
    case = F.CASES[args.case]
    a_vals = _grid(args.a)
    if any(a < F.A_MIN or a > 1 for a in a_vals):
        raise UsageError("a must lie in [0.845, 1]")
    q_vals = [None]
    if case.has_q:
        q_vals = _grid(args.q) if args.q else None
    rows = []
    for a in a_vals:
        a_iv = Interval.enclose(a)
        qs = q_vals if q_vals is not None else _default_q(case, a)
        for q in qs:
            q_iv = Interval.enclose(q) if q is not None else None
            try:
                cb = F.U_case(case, a_iv, q_iv)
            except (F.InfeasibleRegion, DomainError):
                continue
            ustar = F.U_star(a_iv).mid
            U = cb.U.mid
            if a == 1:
                lhs = float("inf")
            else:
                try:
                    lhs = F.lhs_213(cb.U, a_iv).mid
                except DomainError:
                    lhs = float("nan")
            rows.append([_fmt(float(a)), "" if q is None else _fmt(float(q)), args.case, _fmt(cb.UA.mid), _fmt(cb.UB.mid), _fmt(U), _fmt(lhs), _fmt(ustar), _fmt(lhs - ustar)])
    header = ["a", "q", "case", "U_A", "U_B", "U", "lhs213", "Ustar", "margin"]
    if args.out and args.out != "-":
        try:
            fh = open(args.out, "w", newline="")
        except OSError as exc:
            raise UsageError(f"cannot write {args.out}: {exc}") from exc
    else:
        fh = sys.stdout
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    if fh is not sys.stdout:
        fh.close()
    return EXIT_OK


def _default_q(case, a) -> list:
    """Eleven q values from the feasible minimum up to 1."""
    qmin = max(F.CASES[case.id].q_lower().hi, Fraction(9) / (1 + a) ** case.n2)
    qmin = Fraction(qmin)
    if qmin >= 1:
        return []
    return [qmin + (1 - qmin) * Fraction(k, 10) for k in range(11)]


# -- parser -----------------------------------------------------------------------------


def _limits(p):
    p.add_argument("--max-depth", type=int, default=48)
    p.add_argument("--min-width", type=float, default=2.0**-44)
    p.add_argument("--budget", type=int, default=10**7, help="box budget per condition")
    p.add_argument("--jobs", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="sendov-cert", description="certificates for the degree-nine Sendov argument")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("verify-all", help="run every certificate and write a report")
    p.add_argument("--out", default=_default_out())
    p.add_argument("--format", choices=["json", "md"], default="json")
    p.add_argument("--mutate", action="append", metavar="KEY=VALUE", help=f"perturb a constant ({', '.join(sorted(MUTATIONS))})")
    p.add_argument("--quiet", action="store_true")
    _limits(p)
    p.set_defaults(func=cmd_verify_all)

    p = sub.add_parser("certify", help="certify one condition")
    p.add_argument("condition")
    p.add_argument("--box", action="append", metavar="NAME=LO:HI")
    p.add_argument("--param", action="append", metavar="KEY=VALUE")
    p.add_argument("--out", default=_default_out())
    _limits(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("replay", help="re-verify a stored certificate")
    p.add_argument("path")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("poly", help="derived quantities of a polynomial file")
    p.add_argument("path")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_poly)

    p = sub.add_parser("sample", help="run an oracle suite")
    p.add_argument("suite")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("curves", help="CSV of the case bounds over a grid")
    p.add_argument("--a", required=True, metavar="LO:HI:STEP")
    p.add_argument("--q", metavar="LO:HI:STEP")
    p.add_argument("--case", required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_curves)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"sendov-cert: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
