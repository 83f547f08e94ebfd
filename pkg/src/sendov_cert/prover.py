"""Branch-and-bound sign certification with replayable certificates.

A condition (see :mod:`sendov_cert.conditions`) evaluates a box to an
:class:`Outcome`.  The engine bisects undecided boxes and records the whole
subdivision tree; :func:`replay` rebuilds every leaf box from the recorded
splits and re-evaluates it, so a certificate is checked without trusting the
run that produced it.

The work is split into a fixed number of subtrees before any parallelism is
applied, which keeps the emitted tree independent of ``jobs``.
"""

from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from .interval import Interval

SCHEMA = "sendov-cert/1"

CERTIFIED = "Certified"
REFUTED = "Refuted"
INCONCLUSIVE = "Inconclusive"
INFEASIBLE = "InfeasibleRegion"

# leaf kinds
LEAF_OK = ("certified", "equality", "infeasible", "exact")
LEAF_BAD = ("refuted", "gap", "unsupported", "residual")


@dataclass(frozen=True)
class Box:
    names: tuple
    lo: tuple
    hi: tuple
    depth: int = 0

    def __post_init__(self):
        if not (len(self.names) == len(self.lo) == len(self.hi)) or not self.names:
            raise ValueError("box needs matching, nonempty names and bounds")
        for lo, hi in zip(self.lo, self.hi):
            if not (lo <= hi) or not (math.isfinite(lo) and math.isfinite(hi)):
                raise ValueError(f"bad range [{lo}, {hi}]")

    @classmethod
    def from_ranges(cls, ranges: dict, depth: int = 0) -> "Box":
        names = tuple(ranges)
        return cls(names, tuple(float(ranges[n][0]) for n in names), tuple(float(ranges[n][1]) for n in names), depth)

    def ranges(self) -> list:
        return [Interval(lo, hi) for lo, hi in zip(self.lo, self.hi)]

    def widths(self) -> tuple:
        return tuple(hi - lo for lo, hi in zip(self.lo, self.hi))

    def midpoint(self) -> tuple:
        return tuple(lo + (hi - lo) / 2 for lo, hi in zip(self.lo, self.hi))

    def split(self, dim: int, at: float):
        lo_l, hi_l = list(self.lo), list(self.hi)
        hi_l[dim] = at
        lo_r, hi_r = list(self.lo), list(self.hi)
        lo_r[dim] = at
        d = self.depth + 1
        return Box(self.names, self.lo, tuple(hi_l), d), Box(self.names, tuple(lo_r), self.hi, d)

    def index(self, name: str) -> int:
        return self.names.index(name)

    def to_json(self) -> dict:
        return {"dims": [[n, [lo, hi]] for n, lo, hi in zip(self.names, self.lo, self.hi)], "depth": self.depth}

    @classmethod
    def from_json(cls, d: dict) -> "Box":
        names = tuple(n for n, _ in d["dims"])
        return cls(names, tuple(float(r[0]) for _, r in d["dims"]), tuple(float(r[1]) for _, r in d["dims"]), int(d.get("depth", 0)))


@dataclass
class Outcome:
    kind: str
    enc: tuple | None = None
    margin: float | None = None
    info: dict = field(default_factory=dict)

    def leaf(self) -> dict:
        node = {"leaf": self.kind, "enc": list(self.enc) if self.enc is not None else None}
        if self.margin is not None:
            node["margin"] = self.margin
        if self.info:
            node["info"] = self.info
        return node


@dataclass(frozen=True)
class Options:
    max_depth: int = 48
    min_width: float = 2.0**-44
    budget: int = 10**7
    jobs: int = 1
    frontier: int = 16

    def to_json(self) -> dict:
        d = asdict(self)
        d.pop("jobs")  # does not influence the result
        return d


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def digest(tree) -> str:
    return hashlib.sha256(canonical_json(tree).encode()).hexdigest()


def seal_of(cert_json: dict) -> str:
    body = {k: v for k, v in cert_json.items() if k != "seal"}
    return hashlib.sha256(canonical_json(body).encode()).hexdigest()


# -- engine --------------------------------------------------------------------------


def _choose_dim(box: Box, domain: Box, min_width: float):
    best, best_key = None, None
    for i, (w, dw) in enumerate(zip(box.widths(), domain.widths())):
        if w < min_width:
            continue
        rel = w / dw if dw > 0 else 0.0
        key = (rel, box.names[i] == "a")
        if best_key is None or key > best_key:
            best, best_key = i, key
    return best


def _split_point(box: Box, dim: int):
    lo, hi = box.lo[dim], box.hi[dim]
    at = lo + (hi - lo) / 2
    if not (lo < at < hi):
        return None
    return at


class _Runner:
    def __init__(self, cond, opts: Options, budget: int):
        self.cond = cond
        self.opts = opts
        self.budget = budget
        self.processed = 0
        self.max_depth = 0

    def node(self, box: Box):
        self.max_depth = max(self.max_depth, box.depth)
        if self.processed >= self.budget:
            return {"leaf": "residual", "enc": None, "info": {"reason": "budget"}}
        self.processed += 1
        out = self.cond.evaluate(box)
        if out.kind != "undecided":
            return out.leaf()
        ref = self.cond.refute(box)
        if ref is not None:
            return ref.leaf()
        return None

    def expand(self, box: Box, out_enc=None):
        """Split an undecided box, or close it as residual when limits are reached."""
        if box.depth >= self.opts.max_depth:
            return None, {"leaf": "residual", "enc": out_enc, "info": {"reason": "depth"}}
        dim = _choose_dim(box, self.cond.domain, self.opts.min_width)
        at = _split_point(box, dim) if dim is not None else None
        if at is None:
            return None, {"leaf": "residual", "enc": out_enc, "info": {"reason": "width"}}
        return (dim, at), None

    def run(self, box: Box):
        leaf = self.node(box)
        if leaf is not None:
            return leaf
        split, leaf = self.expand(box)
        if leaf is not None:
            return leaf
        dim, at = split
        left, right = box.split(dim, at)
        return {"split": box.names[dim], "at": at, "children": [self.run(left), self.run(right)]}


def _cut_tree(cond, box: Box, pending: list):
    """Apply the condition's forced cuts, leaving placeholders for the pieces."""
    for name, values in getattr(cond, "cuts", {}).items():
        dim = box.index(name)
        for v in values:
            if box.lo[dim] < v < box.hi[dim]:
                left, right = box.split(dim, v)
                return {"split": name, "at": v, "children": [_cut_tree(cond, left, pending), _cut_tree(cond, right, pending)]}
    pending.append(box)
    return {"pending": len(pending) - 1}


def _fill(tree, results):
    if "pending" in tree:
        return results[tree["pending"]]
    if "children" in tree:
        return {**tree, "children": [_fill(c, results) for c in tree["children"]]}
    return tree


def _frontier(cond, opts: Options, boxes: list, runner: _Runner):
    """Breadth-first evaluation until ``opts.frontier`` undecided boxes are queued.

    Returns one tree per input box, with ``{"pending": key}`` placeholders for
    the queued boxes, and the queue itself as (key, box) pairs.
    """
    nodes = {}
    work = [(("r", i), b) for i, b in enumerate(boxes)]
    count = 0
    while work and len(work) < opts.frontier:
        key, b = work.pop(0)
        leaf = runner.node(b)
        if leaf is None:
            split, leaf = runner.expand(b)
        if leaf is not None:
            nodes[key] = leaf
            continue
        dim, at = split
        left, right = b.split(dim, at)
        kl, kr = ("n", count), ("n", count + 1)
        count += 2
        nodes[key] = {"split": b.names[dim], "at": at, "children": [kl, kr]}
        work.extend([(kl, left), (kr, right)])

    def build(key):
        node = nodes.get(key)
        if node is None:
            return {"pending": key}
        if "children" in node:
            return {**node, "children": [build(c) for c in node["children"]]}
        return node

    return [build(("r", i)) for i in range(len(boxes))], work


def _run_subtree(args):
    cond_id, params, domain_json, box_json, opts_json, budget = args
    from .conditions import build

    cond = build(cond_id, params, Box.from_json(domain_json))
    opts = Options(**opts_json)
    runner = _Runner(cond, opts, budget)
    tree = runner.run(Box.from_json(box_json))
    return tree, runner.processed, runner.max_depth


def _replace_pending(tree, mapping):
    if "pending" in tree:
        ref = tree["pending"]
        ref = tuple(ref) if isinstance(ref, list) else ref
        return mapping[ref]
    if "children" in tree:
        return {**tree, "children": [_replace_pending(c, mapping) for c in tree["children"]]}
    return tree


def iter_leaves(tree, box: Box):
    """Yield (box, leaf) pairs in tree order (left before right)."""
    stack = [(tree, box)]
    while stack:
        node, b = stack.pop()
        if "children" in node:
            dim = b.index(node["split"])
            left, right = b.split(dim, node["at"])
            stack.append((node["children"][1], right))
            stack.append((node["children"][0], left))
        else:
            yield b, node


def summarize(tree, domain: Box) -> dict:
    counts: dict = {}
    worst = None
    witness = None
    residual, gaps = [], []
    for b, leaf in iter_leaves(tree, domain) if domain is not None else [(None, tree)]:
        k = leaf["leaf"]
        counts[k] = counts.get(k, 0) + 1
        m = leaf.get("margin")
        if m is not None and (worst is None or m < worst["margin"]):
            worst = {"margin": m, "enc": leaf.get("enc"), "box": b.to_json() if b else None}
        if k == "refuted" and witness is None:
            witness = {"point": leaf["info"]["witness"], "enc": leaf["enc"], "box": b.to_json() if b else None}
        elif k in ("residual", "unsupported"):
            residual.append({"box": b.to_json() if b else None, "kind": k, **({"reason": leaf["info"].get("reason")} if leaf.get("info") else {})})
        elif k == "gap":
            gaps.append({"box": b.to_json() if b else None, "enc": leaf.get("enc")})
    if witness is not None:
        status = REFUTED
    elif residual or gaps:
        status = INCONCLUSIVE
    elif counts and set(counts) == {"infeasible"}:
        status = INFEASIBLE
    else:
        status = CERTIFIED
    return {"status": status, "counts": counts, "worst": worst, "witness": witness, "residual": residual, "gaps": gaps}


@dataclass
class Certificate:
    condition_id: str
    title: str
    params: dict
    target: str
    domain: Box | None
    status: str
    witness: dict | None
    residual_boxes: list
    hypothesis_gaps: list
    stats: dict
    assumptions: list
    options: dict
    tree: dict
    notes: list = field(default_factory=list)

    @property
    def digest(self) -> str:
        return digest(self.tree)

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "condition_id": self.condition_id,
            "title": self.title,
            "params": self.params,
            "target": self.target,
            "domain": self.domain.to_json() if self.domain is not None else None,
            "status": self.status,
            "witness": self.witness,
            "residual_boxes": self.residual_boxes,
            "hypothesis_gaps": self.hypothesis_gaps,
            "stats": self.stats,
            "assumptions": self.assumptions,
            "options": self.options,
            "notes": self.notes,
            "children": {"digest": self.digest, "tree": self.tree},
        }

    def sealed(self) -> dict:
        """JSON form plus a hash over every other field, so any edit is detectable."""
        d = self.to_json()
        d["seal"] = seal_of(d)
        return d

    def dumps(self) -> str:
        return canonical_json(self.sealed())

    @classmethod
    def from_json(cls, d: dict) -> "Certificate":
        dom = d.get("domain")
        return cls(
            condition_id=d["condition_id"],
            title=d.get("title", ""),
            params=d.get("params", {}),
            target=d["target"],
            domain=Box.from_json(dom) if dom is not None else None,
            status=d["status"],
            witness=d.get("witness"),
            residual_boxes=d.get("residual_boxes", []),
            hypothesis_gaps=d.get("hypothesis_gaps", []),
            stats=d.get("stats", {}),
            assumptions=d.get("assumptions", []),
            options=d.get("options", {}),
            tree=d["children"]["tree"],
            notes=d.get("notes", []),
        )


def _assemble(cond, opts: Options, tree, processed: int, depth: int) -> Certificate:
    s = summarize(tree, cond.domain)
    stats = {
        "boxes_processed": processed,
        "max_depth_reached": depth,
        "worst_margin": s["worst"],
        "leaves": s["counts"],
    }
    return Certificate(
        condition_id=cond.id,
        title=cond.title,
        params=cond.params,
        target=cond.target,
        domain=cond.domain,
        status=s["status"],
        witness=s["witness"],
        residual_boxes=s["residual"],
        hypothesis_gaps=s["gaps"],
        stats=stats,
        assumptions=list(cond.assumptions),
        options=opts.to_json(),
        tree=tree,
        notes=list(getattr(cond, "notes", [])),
    )


def certify(cond, opts: Options | None = None) -> Certificate:
    """Certify ``cond`` over its domain; failure is reported as a status."""
    opts = opts or Options()
    if cond.domain is None:
        out = cond.evaluate(None)
        return _assemble(cond, opts, out.leaf(), 1, 0)
    pending: list = []
    skeleton = _cut_tree(cond, cond.domain, pending)
    runner = _Runner(cond, opts, opts.budget)
    trees, open_boxes = _frontier(cond, opts, pending, runner)
    skeleton = _fill(skeleton, trees)
    processed, depth = runner.processed, runner.max_depth
    if open_boxes:
        share = max(1, (opts.budget - processed) // len(open_boxes))
        args = [
            (cond.id, cond.params, cond.domain.to_json(), b.to_json(), opts.to_json(), share)
            for _, b in open_boxes
        ]
        if opts.jobs > 1 and len(args) > 1:
            with ProcessPoolExecutor(max_workers=opts.jobs) as pool:
                results = list(pool.map(_run_subtree, args))
        else:
            results = [_run_subtree(a) for a in args]
        mapping = {}
        for (ref, _), (tree, n, d) in zip(open_boxes, results):
            mapping[ref] = tree
            processed += n
            depth = max(depth, d)
        skeleton = _replace_pending(skeleton, mapping)
    return _assemble(cond, opts, skeleton, processed, depth)


# -- replay ----------------------------------------------------------------------------


@dataclass
class ReplayResult:
    ok: bool
    errors: list
    leaves_checked: int
    status: str | None = None


def _replay_node(cond, node, box, stack, errors) -> int:
    """Check one node; returns 1 for a leaf, 0 for a split."""
    if not isinstance(node, dict):
        errors.append("malformed node")
        return 0
    if "children" in node:
        dim = box.index(node["split"])
        at = float(node["at"])
        if not (box.lo[dim] < at < box.hi[dim]):
            errors.append(f"split point {at} outside box {box.to_json()}")
            return 0
        if len(node["children"]) != 2:
            errors.append("split node needs two children")
            return 0
        left, right = box.split(dim, at)
        stack.append((node["children"][1], right))
        stack.append((node["children"][0], left))
        return 0
    kind = node.get("leaf")
    if kind == "residual":
        return 1
    if kind == "refuted":
        fresh = cond.refute(box)
    elif kind in LEAF_OK or kind in ("gap", "unsupported"):
        fresh = cond.evaluate(box)
    else:
        errors.append(f"unknown leaf kind {kind!r}")
        return 1
    if fresh is None or canonical_json(fresh.leaf()) != canonical_json(node):
        where = box.to_json() if box is not None else "-"
        errors.append(f"leaf {kind} does not re-verify on {where}")
    return 1


def replay(cert_json: dict, max_errors: int = 20) -> ReplayResult:
    """Re-verify a stored certificate leaf by leaf."""
    from .conditions import build

    errors: list = []
    try:
        cert = Certificate.from_json(cert_json)
        if cert_json.get("schema") != SCHEMA:
            errors.append(f"unknown schema {cert_json.get('schema')!r}")
        if "seal" not in cert_json:
            errors.append("certificate is not sealed")
        elif cert_json["seal"] != seal_of(cert_json):
            errors.append("seal mismatch: certificate was modified")
        stored_digest = cert_json["children"]["digest"]
        if stored_digest != digest(cert.tree):
            errors.append("tree digest mismatch")
        cond = build(cert.condition_id, cert.params, cert.domain)
    except Exception as exc:  # malformed file
        return ReplayResult(False, [f"unreadable certificate: {exc!r}"], 0)
    if cond.target != cert.target:
        errors.append("target differs from the condition definition")
    checked = 0
    if cert.domain is None:
        stack = [(cert.tree, None)]
    else:
        stack = [(cert.tree, cert.domain)]
    while stack and len(errors) < max_errors:
        node, box = stack.pop()
        try:
            checked += _replay_node(cond, node, box, stack, errors)
        except Exception as exc:  # malformed tree
            errors.append(f"malformed node: {exc!r}")
    try:
        s = summarize(cert.tree, cert.domain)
    except Exception as exc:
        errors.append(f"cannot summarize tree: {exc!r}")
        return ReplayResult(False, errors, checked)
    if s["status"] != cert.status:
        errors.append(f"stored status {cert.status} but leaves give {s['status']}")
    recomputed = {
        "witness": s["witness"],
        "residual_boxes": s["residual"],
        "hypothesis_gaps": s["gaps"],
        "worst_margin": s["worst"],
        "leaves": s["counts"],
    }
    stored = {
        "witness": cert.witness,
        "residual_boxes": cert.residual_boxes,
        "hypothesis_gaps": cert.hypothesis_gaps,
        "worst_margin": cert.stats.get("worst_margin"),
        "leaves": cert.stats.get("leaves"),
    }
    for key in recomputed:
        if canonical_json(recomputed[key]) != canonical_json(stored[key]):
            errors.append(f"stored {key} differs from the tree")
    return ReplayResult(not errors, errors, checked, s["status"])
