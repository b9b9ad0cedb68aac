"""Command-line front end.

Reads one JSON file (a MOY graph or a link diagram), runs one task and writes
a deterministic report to standard output.  Failures exit nonzero with a
reason code from ``REASONS``.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .complexes import (DiagramError, LinkDiagram, T_SIGN, deformed_homology, euler_characteristic,
                        hat_tc, link_homology, normalization, purity_check, tc)
from .matfact import MFError, UniquenessViolated, UnsupportedGraph
from .moy import (GraphError, MoyGraph, RewritingStuck, build_mf, colored_rotation,
                  graph_homology, moy_poly_detailed, validate)
from .polyring import ResourceLimit, budgets
from .qpoly import LaurentPoly
from .symfunc import BParams

TASKS = ("validate", "moy-poly", "graph-homology", "link-homology", "deformed", "euler", "purity")
GRAPH_TASKS = ("moy-poly", "graph-homology")
DIAGRAM_TASKS = ("link-homology", "deformed", "euler", "purity")

# reason code -> exit status
REASONS = {
    "invalid-graph": 3,
    "width-cap-zero": 4,
    "unsupported-graph": 5,
    "rewriting-stuck": 6,
    "resource-limit": 7,
    "uniqueness-violated": 8,
    "internal-error": 9,
}


class JobError(Exception):
    def __init__(self, reason: str, message: str):
        super().__init__(message)
        self.reason = reason


@dataclass
class JobSpec:
    path: str
    task: str
    N: int
    roots: Optional[List[Fraction]] = None
    fmt: str = "json"
    budget_monomials: Optional[int] = None
    budget_steps: Optional[int] = None

    def check(self):
        if self.task not in TASKS:
            raise JobError("invalid-graph", f"unknown task {self.task!r}")
        if self.N < 2:
            raise JobError("invalid-graph", "N must be at least 2")
        if self.roots is not None and len(self.roots) != self.N:
            raise JobError("invalid-graph", f"expected {self.N} roots, got {len(self.roots)}")
        if self.task in ("deformed", "purity") and self.roots is None:
            raise JobError("invalid-graph", f"task {self.task} needs --roots")


def parse_roots(text: str) -> List[Fraction]:
    return [Fraction(x.strip()) for x in text.split(",") if x.strip()]


def load_input(path: str):
    """Return ('graph', MoyGraph) or ('diagram', LinkDiagram)."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise JobError("invalid-graph", f"cannot read {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise JobError("invalid-graph", "top level must be a JSON object")
    try:
        if "arcs" in data:
            return "diagram", LinkDiagram.from_json(data)
        return "graph", MoyGraph.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise JobError("invalid-graph", str(exc)) from exc


def _poly_terms(p: LaurentPoly) -> List[List]:
    return [[e, str(c)] for e, c in p.terms()]


def _table(P) -> List[List[int]]:
    return [[q, t, z, n] for (q, t, z), n in P.terms()]


def _graph_report(task: str, G: MoyGraph, N: int) -> dict:
    status, why = validate(G, N)
    if status == "invalid":
        raise JobError("invalid-graph", why)
    if task == "validate":
        if status == "zero":
            raise JobError("width-cap-zero", why)
        return {"status": "ok"}
    if task == "moy-poly":
        if not G.closed:
            raise JobError("invalid-graph", "moy-poly needs a closed graph")
        res = moy_poly_detailed(G, N)
        return {"status": status, "poly": _poly_terms(res.poly), "text": res.poly.to_text(),
                "steps": res.steps, "fallbacks": res.fallbacks}
    if task == "graph-homology":
        if status == "zero":
            return {"status": "zero", "dims": [], "text": "0", "q_shift": 0}
        H = graph_homology(G, N)
        M = build_mf(G, N, BParams.zero(N))
        dims = sorted([g, p, n] for (p, g), n in H.dims().items())
        poly = LaurentPoly({g: n for g, p, n in dims})
        return {"status": "ok", "dims": dims, "text": poly.to_text(), "q_shift": M.q_shift,
                "colored_rotation": colored_rotation(G)}
    raise JobError("invalid-graph", f"task {task} needs a link diagram")


def _diagram_report(task: str, D: LinkDiagram, N: int, roots) -> dict:
    if task == "validate":
        out = {"status": "ok", "crossings": len(D.crossings), "vertices": len(D.vertices)}
        if not D.vertices:
            out["components"] = len(D.components())
        return out
    if task == "link-homology":
        P = link_homology(D, N)
        out = {"poincare": _table(P), "text": P.to_text(), "total_dim": P.total_dim(),
               "normalization": _normalization(D, N)}
        if not D.vertices:
            out["hat_tc"] = hat_tc(D)
        return out
    if task == "euler":
        chi = euler_characteristic(D, N)
        return {"poly": _poly_terms(chi), "text": chi.to_text()}
    if task == "deformed":
        F = deformed_homology(D, N, roots)
        out = F.to_json()
        out["total_dim"] = F.total_dim()
        out["roots"] = [str(r) for r in roots]
        return out
    if task == "purity":
        return {"pure": purity_check(D, N, roots), "tc": tc(D), "roots": [str(r) for r in roots]}
    raise JobError("invalid-graph", f"task {task} needs a MOY graph")


def _normalization(D: LinkDiagram, N: int) -> dict:
    """Summed equal-color shifts as reported (q, t, z2)."""
    q = h = z = 0
    for c in D.crossings:
        m, n = D.colors(c)
        a, b, cc = normalization(c.sign, m, n, N)
        q, h, z = q + a, h + b, z + cc
    return {"q": q, "t": T_SIGN * h, "z2": z % 2}


def run(spec: JobSpec) -> Tuple[int, dict]:
    """Execute a job; returns (exit status, report)."""
    try:
        spec.check()
        kind, obj = load_input(spec.path)
        if kind == "graph" and spec.task in DIAGRAM_TASKS:
            raise JobError("invalid-graph", f"task {spec.task} needs a link diagram")
        if kind == "diagram" and spec.task in GRAPH_TASKS:
            raise JobError("invalid-graph", f"task {spec.task} needs a MOY graph")
        with budgets(steps=spec.budget_steps, terms=spec.budget_monomials):
            if kind == "graph":
                body = _graph_report(spec.task, obj, spec.N)
            else:
                body = _diagram_report(spec.task, obj, spec.N, spec.roots)
    except JobError as exc:
        return REASONS[exc.reason], _error(spec, exc.reason, str(exc))
    except (GraphError, DiagramError) as exc:
        return REASONS["invalid-graph"], _error(spec, "invalid-graph", str(exc))
    except UnsupportedGraph as exc:
        return REASONS["unsupported-graph"], _error(spec, "unsupported-graph", str(exc))
    except RewritingStuck as exc:
        return REASONS["rewriting-stuck"], _error(spec, "rewriting-stuck", str(exc))
    except ResourceLimit as exc:
        return REASONS["resource-limit"], _error(spec, "resource-limit", str(exc))
    except UniquenessViolated as exc:
        return REASONS["uniqueness-violated"], _error(spec, "uniqueness-violated", str(exc))
    except MFError as exc:
        return REASONS["internal-error"], _error(spec, "internal-error", str(exc))
    report = {"format": 1, "task": spec.task, "N": spec.N, "ok": True}
    report.update(body)
    return 0, report


def _error(spec: JobSpec, reason: str, message: str) -> dict:
    return {"format": 1, "task": spec.task, "N": spec.N, "ok": False, "reason": reason,
            "message": message}


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2)
    lines = []
    if not report["ok"]:
        lines.append(f"error[{report['reason']}]: {report['message']}")
        return "\n".join(lines)
    if "text" in report:
        lines.append(report["text"])
    skip = {"format", "task", "N", "ok", "text", "poly", "poincare", "dims", "profiles"}
    for key in sorted(report):
        if key in skip:
            continue
        lines.append(f"{key}: {json.dumps(report[key], sort_keys=True)}")
    if "poincare" in report:
        lines.append("q t z2 dim")
        lines += [" ".join(map(str, row)) for row in report["poincare"]]
    if "dims" in report:
        lines.append("q z2 dim")
        lines += [" ".join(map(str, row)) for row in report["dims"]]
    if "profiles" in report:
        for prof in report["profiles"]:
            fil = ", ".join(f"{k}:{v}" for k, v in prof["fil"])
            lines.append(f"z2={prof['z2']} t={prof['t']} fil {fil}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="colored-sln",
                                 description="Colored sl(N) homology of MOY graphs and link diagrams.")
    ap.add_argument("input", help="graph or diagram JSON file")
    ap.add_argument("--task", required=True, choices=TASKS)
    ap.add_argument("--n", type=int, required=True, dest="N", help="rank N >= 2")
    ap.add_argument("--roots", type=parse_roots, default=None,
                    help="comma separated rationals, exactly N of them")
    ap.add_argument("--format", choices=("json", "text"), default="json", dest="fmt")
    ap.add_argument("--budget-monomials", type=int, default=None,
                    help="cap on live terms during a reduction")
    ap.add_argument("--budget-steps", type=int, default=None,
                    help="cap on reduction steps per Groebner computation")
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    spec = JobSpec(args.input, args.task, args.N, args.roots, args.fmt,
                   args.budget_monomials, args.budget_steps)
    status, report = run(spec)
    print(render(report, spec.fmt))
    return status


if __name__ == "__main__":
    sys.exit(main())
