"""Command-line interface: series computations on plumbing graphs and
builtin knots, JSON/text emission, and the golden-table harness.

Exit codes: 0 success, 2 invalid input, 3 not computable (definiteness,
divergence, degeneracy, unsupported input).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .exactnum import Singular, NotPositiveDefinite
from .plumbing import (BadDistinguished, BadFraction, BadInput, DuplicateId,
                       MissingDistinguished, NotATree, NotRepresentable,
                       PlumbingGraph, parse_graph, torus_knot_graph)
from .qseries import QSeries, XSeries
from .closed import (NotWeaklyNegativeDefinite, brieskorn_zhat, zhat_all_classes)
from .spinc import spinc_classes, class_key
from .knots import (Divergent, MissingEpsilonD, NotNegativeDefinite,
                    NotSeifertFramed, NotZHS, SurgeryPlan, UnsupportedDegree,
                    fk_plumbed, glue_zhat, mirror_series, stability_check,
                    surgery_zhat, torus_fk, torus_jones_normalized,
                    torus_jones_unnormalized)
from .recursion import (UnsupportedKnot, fk_extend, jones_fig8, jones_trefoil)

NOT_COMPUTABLE = (Singular, NotPositiveDefinite, NotWeaklyNegativeDefinite,
                  NotNegativeDefinite, NotSeifertFramed, NotZHS, Divergent,
                  MissingEpsilonD, UnsupportedDegree, UnsupportedKnot)
INVALID = (BadInput, BadFraction, BadDistinguished, DuplicateId, NotATree,
           NotRepresentable, MissingDistinguished, ValueError, KeyError,
           json.JSONDecodeError)


@dataclass
class JobSpec:
    """One CLI invocation: a command plus its validated options."""

    command: str
    graph: list = field(default_factory=list)
    knot: str | None = None
    coef: tuple[int, int] | None = None
    spinc: str = "all"
    max_q: int = 40
    max_x: int = 21
    as_json: bool = False
    out: str | None = None
    threads: int = 1
    ints: list = field(default_factory=list)
    n: int = 2


def _parse_coef(text: str) -> tuple[int, int]:
    if "/" in text:
        p, r = text.split("/", 1)
    else:
        p, r = text, "1"
    frac = Fraction(int(p), int(r))
    return frac.numerator, frac.denominator


def _load_graph(path: str) -> PlumbingGraph:
    return parse_graph(Path(path).read_text())


def _knot_fk(tag: str, max_x: int, max_q: int) -> XSeries:
    if tag == "unknot":
        from .plumbing import make_graph
        return fk_plumbed(make_graph([(0, 0)], [], distinguished=0), max_x, max_q)
    if tag == "trefoil":
        return torus_fk(2, 3, max_x)
    if tag == "fig8":
        return fk_extend("fig8", max_x)
    if tag.startswith("torus:"):
        s, t = (int(v) for v in tag.split(":", 1)[1].split(","))
        return torus_fk(s, t, max_x)
    raise BadInput("unknown knot tag %r" % tag)


def _emit_series(spec: JobSpec, payload) -> str:
    if spec.as_json:
        if isinstance(payload, QSeries):
            doc = payload.to_json_dict()
        elif isinstance(payload, XSeries):
            doc = payload.to_json_dict()
        elif isinstance(payload, dict):
            doc = {k: (v.to_json_dict() if isinstance(v, (QSeries, XSeries)) else v)
                   for k, v in payload.items()}
        else:
            doc = payload
        return json.dumps(doc, sort_keys=True)
    if isinstance(payload, QSeries):
        return payload.render()
    if isinstance(payload, XSeries):
        return "\n".join("x^(%d/2): %s" % (m, payload.slice(m).render())
                         for m in payload.support())
    if isinstance(payload, dict):
        return "\n".join("%s: %s" % (k, v.render() if hasattr(v, "render") else v)
                         for k, v in payload.items())
    return str(payload)


def run(spec: JobSpec) -> tuple[int, str]:
    """Execute a job; returns (exit code, document)."""
    try:
        payload = _dispatch(spec)
    except NOT_COMPUTABLE as exc:
        print("not computable: %s" % exc, file=sys.stderr)
        return 3, ""
    except INVALID as exc:
        print("invalid input: %s" % exc, file=sys.stderr)
        return 2, ""
    doc = _emit_series(spec, payload)
    if spec.out:
        Path(spec.out).write_text(doc + "\n")
    return 0, doc


def _dispatch(spec: JobSpec):
    cmd = spec.command
    if cmd == "closed":
        g = _load_graph(spec.graph[0])
        table = zhat_all_classes(g, spec.max_q)
        reps, conj = spinc_classes(g)
        if spec.spinc == "all":
            out = {}
            seen = set()
            for rep in reps:
                key = class_key(g, rep)
                pair = tuple(sorted((key, conj[key])))
                if pair in seen:
                    continue
                seen.add(pair)
                out["spinc" + repr(list(rep)).replace(" ", "")] = table[key]
            return out
        rep = reps[int(spec.spinc)]
        return table[class_key(g, rep)]
    if cmd == "brieskorn":
        b1, b2, b3 = spec.ints
        return brieskorn_zhat(b1, b2, b3, spec.max_q)
    if cmd == "knot-fk":
        if spec.graph:
            return fk_plumbed(_load_graph(spec.graph[0]), spec.max_x, spec.max_q)
        return _knot_fk(spec.knot, spec.max_x, spec.max_q)
    if cmd == "torus-fk":
        s, t = spec.ints
        return torus_fk(s, t, spec.max_x)
    if cmd == "surgery":
        p, r = spec.coef
        fk = _knot_fk(spec.knot, max(spec.max_x, 41), spec.max_q)
        plan_kwargs = {}
        if spec.knot in ("trefoil", "unknot") or (spec.knot or "").startswith("torus:"):
            if spec.knot == "unknot":
                from .plumbing import make_graph
                graph = make_graph([(0, 0)], [], distinguished=0)
            elif spec.knot == "trefoil":
                graph = torus_knot_graph(2, 3)
            else:
                s, t = (int(v) for v in spec.knot.split(":", 1)[1].split(","))
                graph = torus_knot_graph(s, t)
            plan_kwargs = {"mode": "plumbed_theorem", "graph": graph}
        plan = SurgeryPlan(p=p, r=r, **plan_kwargs)
        return surgery_zhat(fk, plan, spec.max_q)
    if cmd == "glue":
        gm = _load_graph(spec.graph[0])
        gp = _load_graph(spec.graph[1])
        from .plumbing import degree_vector
        am = tuple(degree_vector(gm))
        ap = tuple(degree_vector(gp))
        return glue_zhat(gm, am, gp, ap, spec.max_q)
    if cmd == "jones":
        tag, n = spec.knot, spec.n
        if tag == "trefoil":
            return jones_trefoil(n).substitute_q_inverse()
        if tag == "fig8":
            return jones_fig8(n)
        if tag and tag.startswith("torus:"):
            s, t = (int(v) for v in tag.split(":", 1)[1].split(","))
            return torus_jones_normalized(s, t, n)
        raise BadInput("unknown knot tag %r" % tag)
    if cmd == "recursion":
        return fk_extend("fig8" if spec.knot == "fig8" else "trefoil_r", spec.max_x)
    if cmd == "stability":
        s, t = (int(v) for v in spec.knot.split(":", 1)[1].split(","))
        return {"stable_n_%d" % n: stability_check(s, t, n)
                for n in range(1, spec.n + 1)}
    raise BadInput("unknown command %r" % cmd)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="zhat", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("closed", "brieskorn", "knot-fk", "torus-fk", "surgery",
                 "glue", "jones", "recursion", "stability"):
        p = sub.add_parser(name)
        p.add_argument("ints", nargs="*", type=int)
        p.add_argument("--graph", action="append", default=[])
        p.add_argument("--knot")
        p.add_argument("--coef", type=_parse_coef)
        p.add_argument("--spinc", default="all")
        p.add_argument("--max-q", type=int, default=40, dest="max_q")
        p.add_argument("--max-x", type=int, default=21, dest="max_x")
        p.add_argument("--json", action="store_true", dest="as_json")
        p.add_argument("--out")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("-n", type=int, default=2)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = JobSpec(command=args.command, graph=args.graph, knot=args.knot,
                   coef=args.coef, spinc=args.spinc, max_q=args.max_q,
                   max_x=args.max_x, as_json=args.as_json, out=args.out,
                   threads=args.threads, ints=args.ints, n=args.n)
    code, doc = run(spec)
    if code == 0 and not spec.out:
        print(doc)
    return code


# -- golden files --------------------------------------------------------------

def golden_dir() -> Path:
    env = os.environ.get("ZHAT_GOLDEN_DIR")
    if env:
        return Path(env)
    return Path(__file__).resolve().parents[2] / "goldens"


@dataclass
class GoldenReport:
    regenerated: list
    diffs: list

    @property
    def clean(self) -> bool:
        return not self.diffs


def regenerate_goldens(directory=None, check=False) -> GoldenReport:
    """Re-run every manifest entry; in check mode report diffs without
    touching the files."""
    directory = Path(directory) if directory else golden_dir()
    manifest = json.loads((directory / "manifest.json").read_text())
    regenerated, diffs = [], []
    for entry in manifest:
        args = build_parser().parse_args(entry["argv"])
        graphs = [str(directory / p) if not os.path.isabs(p) else p
                  for p in args.graph]
        spec = JobSpec(command=args.command, graph=graphs, knot=args.knot,
                       coef=args.coef, spinc=args.spinc, max_q=args.max_q,
                       max_x=args.max_x, as_json=args.as_json, out=None,
                       threads=args.threads, ints=args.ints, n=args.n)
        code, doc = run(spec)
        if code != 0:
            diffs.append((entry["file"], "exit code %d" % code))
            continue
        target = directory / entry["file"]
        old = target.read_text() if target.exists() else None
        if old != doc + "\n":
            diffs.append((entry["file"], "content changed"))
            if not check:
                target.write_text(doc + "\n")
        regenerated.append(entry["file"])
    return GoldenReport(regenerated, diffs)


if __name__ == "__main__":
    sys.exit(main())
