"""Command-line orchestration over all modules.

Verbs: color, verify, witness, cocycle, defect, orbitprobe, walk, escape,
growth.  Every emitted artifact embeds a RunManifest (command, input digests,
seed, mode, version); reruns with equal manifests are bit-identical.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys

from . import __version__
from . import errors as E
from .cayley import (
    LinearEscapeOracle,
    build_ball,
    escape_constant,
    growth_sequence,
)
from .coloring import (
    audit_conditions,
    build_range_plan,
    coloring_from_dict,
    coloring_to_dict,
    construct_coloring,
    tight_range_plan,
    verify_3proper,
    verify_P1,
    verify_P2,
)
from .dynamics import free_witness
from .groups import (
    FreeBackend,
    GroupElement,
    VirtZBackend,
    ZdBackend,
    load_group_spec,
    standard_generators,
)
from .orbits import (
    OrbitPoint,
    cocycle,
    defect_bound,
    model_from_dict,
    piecewise_from_dict,
    stabilizer_orbit_probe,
)
from .walks import (
    cayley_graph_source,
    decay_classify,
    free_radial_source,
    schreier_graph,
    srw_estimate,
    walk_csv,
)

# One exit code per error class; stable and documented in the README.
EXIT_CODES = {
    E.InvalidGroupSpec: 10,
    E.BackendMismatch: 11,
    E.PreconditionFailed: 12,
    E.Inconclusive: 13,
    E.CapExceeded: 14,
    E.BoundaryRisk: 15,
    E.Unreachable: 16,
    E.NoEscape: 17,
    E.NotSubgroup: 18,
    E.NotCommuting: 19,
    E.InfiniteStabilizer: 20,
    E.NotBijective: 21,
    E.InternalInconsistency: 22,
    E.PlacementConflict: 23,
    E.BallTooSmall: 24,
    E.NoInteriorCenters: 25,
    E.NoMarkedCopy: 26,
    E.InsufficientWindow: 27,
    E.BoundaryClipped: 28,
    E.WindowTooSmall: 29,
}


def exit_code(exc: Exception) -> int:
    return EXIT_CODES.get(type(exc), 1)


def _sha256(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def build_manifest(args: argparse.Namespace, inputs: list[str]) -> dict:
    return {
        "tool": "fullgroups",
        "version": __version__,
        "command": args.verb,
        "args": {
            k: v
            for k, v in sorted(vars(args).items())
            # --out changes where files land, not what they contain
            if k not in ("func", "verb", "out") and v is not None
        },
        "inputs": {path: _sha256(path) for path in sorted(inputs)},
        "seed": getattr(args, "seed", 0),
        "mode": getattr(args, "mode", None),
    }


def _dump_json(path: str, payload: dict):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_text(path: str, text: str):
    with open(path, "w") as fh:
        fh.write(text)


def _out_dir(args) -> str:
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    return out


def parse_element(backend, text: str) -> GroupElement:
    """Parse an element literal: '2,0' (zd), 'ab' (free), 'a,x' (virtz)."""
    if isinstance(backend, ZdBackend):
        return backend.element(*(int(c) for c in text.split(",")))
    if isinstance(backend, FreeBackend):
        return backend.word(text)
    if isinstance(backend, VirtZBackend):
        a, x = (int(c) for c in text.split(","))
        return backend.element(a, x)
    raise E.InvalidGroupSpec(f"unknown backend {backend!r}")


def _coloring_report(cb) -> dict:
    plan = cb.plan
    report = {"mode": plan.mode, "threeProper": verify_3proper(cb), "words": {}}
    for i in range(1, plan.k + 1):
        entry = {}
        try:
            entry["P1"] = verify_P1(cb, plan.words[i - 1], plan.r[i - 1])
            entry["P2"] = verify_P2(cb, plan.elements[i - 1], plan.r[i - 1])
        except E.NoInteriorCenters as exc:
            entry["P1"] = entry["P2"] = {"holds": None, "note": str(exc)}
        report["words"][str(i)] = entry
    report["conditions"] = {
        str(i): entry for i, entry in audit_conditions(cb).items()
    }
    return report


def _report_text(report: dict) -> str:
    lines = [f"mode: {report['mode']}"]
    lines.append(f"3-proper: {'pass' if report['threeProper']['holds'] else 'FAIL'}")
    for i, entry in sorted(report["words"].items()):
        for prop in ("P1", "P2"):
            holds = entry[prop].get("holds")
            status = "pass" if holds else ("n/a" if holds is None else "FAIL")
            lines.append(f"word {i} {prop}: {status}")
    for i, conds in sorted(report["conditions"].items()):
        for c in ("condition1", "condition2", "condition3"):
            holds = conds[c].get("holds")
            status = "pass" if holds else ("n/a" if holds is None else "FAIL")
            lines.append(f"word {i} {c}: {status}")
    return "\n".join(lines) + "\n"


def cmd_color(args) -> int:
    backend = load_group_spec(args.group)
    gens = standard_generators(backend)
    if args.mode == "paper":
        oracle = LinearEscapeOracle(backend, gens, probe_radius=args.probe_radius)
        plan = build_range_plan(backend, gens, args.k, oracle)
    else:
        if not (args.pairs and args.r_prime and args.r):
            raise E.PreconditionFailed(
                "tight mode needs --pairs, --r-prime and --r"
            )
        pairs = []
        for chunk in args.pairs.split(";"):
            word, elem = chunk.split(":")
            pairs.append((word, parse_element(backend, elem)))
        r_prime = [int(v) for v in args.r_prime.split(",")]
        r = [int(v) for v in args.r.split(",")]
        plan = tight_range_plan(backend, gens, pairs, r_prime, r)
    try:
        ball = build_ball(backend, gens, backend.identity(), args.radius)
    except E.CapExceeded as exc:
        raise E.CapExceeded(
            f"{exc}; paper-mode radii are infeasible on this backend -- "
            "try --mode tight with user ranges"
        ) from exc
    cb = construct_coloring(ball, plan)
    manifest = build_manifest(args, [args.group])
    out = _out_dir(args)
    payload = coloring_to_dict(cb)
    payload["manifest"] = manifest
    _dump_json(os.path.join(out, "coloring.json"), payload)
    dot = ball.to_dot(cb.colors)
    _write_text(os.path.join(out, "coloring.dot"),
                f"// manifest {json.dumps(manifest, sort_keys=True)}\n{dot}")
    report = _coloring_report(cb)
    report["manifest"] = manifest
    _dump_json(os.path.join(out, "report.json"), report)
    _write_text(os.path.join(out, "report.txt"), _report_text(report))
    print(_report_text(report), end="")
    return 0


def cmd_verify(args) -> int:
    with open(args.coloring) as fh:
        cb = coloring_from_dict(json.load(fh))
    report = _coloring_report(cb)
    report["manifest"] = build_manifest(args, [args.coloring])
    out = _out_dir(args)
    _dump_json(os.path.join(out, "verify.json"), report)
    print(_report_text(report), end="")
    all_ok = report["threeProper"]["holds"] and all(
        entry[p].get("holds") in (True, None)
        for entry in report["words"].values()
        for p in ("P1", "P2")
    )
    return 0 if all_ok else 1


def cmd_witness(args) -> int:
    with open(args.coloring) as fh:
        cb = coloring_from_dict(json.load(fh))
    result = free_witness(cb, args.word)
    ball = cb.ball
    payload = {
        "manifest": build_manifest(args, [args.coloring]),
        "word": args.word,
        "moved": result["moved"],
        "reversedPathFollowed": result["reversedPathFollowed"],
        "trace": [
            {
                "letter": letter,
                "from": ball.backend.label(ball.vertices[u]),
                "to": ball.backend.label(ball.vertices[v]),
            }
            for letter, u, v in result["trace"]
        ],
    }
    out = _out_dir(args)
    _dump_json(os.path.join(out, "witness.json"), payload)
    print(f"moved: {result['moved']}")
    for step in payload["trace"]:
        print(f"  {step['letter']}: {step['from']} -> {step['to']}")
    return 0


def _load_model_and_piecewise(args):
    with open(args.model) as fh:
        mo = model_from_dict(json.load(fh))
    with open(args.piecewise) as fh:
        phi = piecewise_from_dict(mo, json.load(fh))
    return mo, phi


def cmd_cocycle(args) -> int:
    mo, phi = _load_model_and_piecewise(args)
    points = cocycle(mo, phi)
    payload = {
        "manifest": build_manifest(
            args, [args.model, args.piecewise] + ([args.second] if args.second else [])
        ),
        "cocycle": [[p.k, p.line] for p in points],
        "size": len(points),
        "defect": defect_bound(mo, phi, args.window),
    }
    if args.second:
        with open(args.second) as fh:
            psi = piecewise_from_dict(mo, json.load(fh))
        lhs = cocycle(mo, phi.compose(psi))
        c_phi = set(points)
        c_psi = cocycle(mo, psi)
        rhs = c_phi.symmetric_difference(phi.apply(q) for q in c_psi)
        payload["identityCheck"] = {
            "holds": set(lhs) == rhs,
            "lhsSize": len(lhs),
        }
    out = _out_dir(args)
    _dump_json(os.path.join(out, "cocycle.json"), payload)
    print(f"|c_phi| = {len(points)}")
    for p in points:
        print(f"  ({p.k}, line{p.line})")
    return 0


def cmd_defect(args) -> int:
    mo, phi = _load_model_and_piecewise(args)
    result = defect_bound(mo, phi, args.window)
    result["manifest"] = build_manifest(args, [args.model, args.piecewise])
    out = _out_dir(args)
    _dump_json(os.path.join(out, "defect.json"), result)
    print(
        f"measuredMax={result['measuredMax']} "
        f"closedFormBound={result['closedFormBound']}"
    )
    return 0


def cmd_orbitprobe(args) -> int:
    with open(args.model) as fh:
        mo = model_from_dict(json.load(fh))
    phis = []
    files = args.piecewise.split(",")
    for path in files:
        with open(path) as fh:
            phis.append(piecewise_from_dict(mo, json.load(fh)))
    k, line = (int(v) for v in args.point.split(","))
    result = stabilizer_orbit_probe(mo, phis, OrbitPoint(k, line), args.cap)
    payload = {
        "manifest": build_manifest(args, [args.model] + files),
        "capHit": result["capHit"],
        "size": result["size"],
        "orbit": None if result["orbit"] is None
        else [[p.k, p.line] for p in result["orbit"]],
    }
    out = _out_dir(args)
    _dump_json(os.path.join(out, "orbitprobe.json"), payload)
    print(f"capHit={result['capHit']} size={result['size']}")
    return 0


def cmd_walk(args) -> int:
    inputs = []
    if args.model:
        with open(args.model) as fh:
            mo = model_from_dict(json.load(fh))
        inputs.append(args.model)
        graph = schreier_graph(mo, window=args.max_time)
        exact_limit = 16
    else:
        backend = load_group_spec(args.group)
        inputs.append(args.group)
        if isinstance(backend, FreeBackend):
            # radial path-count oracle; exact at every time
            graph = free_radial_source(backend.rank, args.max_time)
            exact_limit = args.max_time
        else:
            graph = cayley_graph_source(backend, radius=args.max_time)
            exact_limit = 16
    ws = srw_estimate(graph, args.max_time, args.trials, args.seed, exact_limit)
    profile = decay_classify(ws)
    manifest = build_manifest(args, inputs)
    out = _out_dir(args)
    csv = walk_csv(ws)
    header, rest = csv.split("\n", 1)
    csv = f"{header} manifest={json.dumps(manifest, sort_keys=True)}\n{rest}"
    _write_text(os.path.join(out, "walk.csv"), csv)
    _dump_json(os.path.join(out, "walk.json"),
               {"manifest": manifest, "profile": profile})
    print(json.dumps(profile, sort_keys=True))
    return 0


def cmd_escape(args) -> int:
    backend = load_group_spec(args.group)
    gens = standard_generators(backend)
    result = escape_constant(backend, gens, args.n, args.probe_radius)
    result["manifest"] = build_manifest(args, [args.group])
    out = _out_dir(args)
    _dump_json(os.path.join(out, "escape.json"), result)
    print(f"K({args.n}) = {result['K']}")
    return 0


def cmd_growth(args) -> int:
    backend = load_group_spec(args.group)
    gens = standard_generators(backend)
    result = growth_sequence(backend, gens, args.max_radius)
    result["manifest"] = build_manifest(args, [args.group])
    out = _out_dir(args)
    _dump_json(os.path.join(out, "growth.json"), result)
    print(f"sizes={result['sizes']} linear={result['linear']}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fullgroups",
        description="Cocycle, coloring and walk diagnostics for group actions",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--mode", choices=("paper", "tight"), default="paper")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--format", choices=("json", "dot", "csv"), default="json")

    p = sub.add_parser("color", help="construct and verify a marked coloring")
    p.add_argument("--group", required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--probe-radius", type=int, default=6)
    p.add_argument("--pairs", help="tight mode: 'word:element;word:element'")
    p.add_argument("--r-prime", help="tight mode: comma-separated R_i'")
    p.add_argument("--r", help="tight mode: comma-separated R_i")
    common(p)
    p.set_defaults(func=cmd_color)

    p = sub.add_parser("verify", help="re-verify a coloring file")
    p.add_argument("--coloring", required=True)
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("witness", help="free-subgroup witness trace")
    p.add_argument("--coloring", required=True)
    p.add_argument("--word", required=True)
    common(p)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("cocycle", help="cocycle listing and defect report")
    p.add_argument("--model", required=True)
    p.add_argument("--piecewise", required=True)
    p.add_argument("--second", help="second piecewise file for the identity check")
    p.add_argument("--window", type=int, default=20)
    common(p)
    p.set_defaults(func=cmd_cocycle)

    p = sub.add_parser("defect", help="coordinate defect bounds")
    p.add_argument("--model", required=True)
    p.add_argument("--piecewise", required=True)
    p.add_argument("--window", type=int, default=20)
    common(p)
    p.set_defaults(func=cmd_defect)

    p = sub.add_parser("orbitprobe", help="stabilizer orbit local-finiteness probe")
    p.add_argument("--model", required=True)
    p.add_argument("--piecewise", required=True,
                   help="comma-separated piecewise files")
    p.add_argument("--point", required=True, help="'k,line'")
    p.add_argument("--cap", type=int, default=10000)
    common(p)
    p.set_defaults(func=cmd_orbitprobe)

    p = sub.add_parser("walk", help="random-walk return-probability probe")
    p.add_argument("--group")
    p.add_argument("--model")
    p.add_argument("--max-time", type=int, default=64)
    p.add_argument("--trials", type=int, default=100000)
    common(p)
    p.set_defaults(func=cmd_walk)

    p = sub.add_parser("escape", help="escape constant K(n)")
    p.add_argument("--group", required=True)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--probe-radius", type=int, default=6)
    common(p)
    p.set_defaults(func=cmd_escape)

    p = sub.add_parser("growth", help="ball growth sequence")
    p.add_argument("--group", required=True)
    p.add_argument("--max-radius", type=int, default=6)
    common(p)
    p.set_defaults(func=cmd_growth)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.verb == "walk" and not (args.group or args.model):
        parser.error("walk needs --group or --model")
    try:
        return args.func(args)
    except E.FullgroupsError as exc:
        print(f"error [{type(exc).__name__}]: {exc}", file=sys.stderr)
        return exit_code(exc)


if __name__ == "__main__":
    sys.exit(main())
