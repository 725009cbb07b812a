"""Command-line front end: build designs, verify bounds, run experiments.

Exit codes: 0 success, 1 bound violation, 2 hypothesis unmet,
3 validation error (including bad arguments and malformed files),
4 resource ceiling exceeded.

Reports are JSON objects with a top-level ``schema`` field; identical
invocations (including the seed) produce byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from typing import Optional

from . import bounds as bounds_mod
from . import design as design_mod
from . import spectral as spectral_mod
from . import triangles as triangles_mod
from .errors import CeilingError, HypothesisUnmetError, ValidationError
from .finite_field import make_field_of_order
from .geometry import GeometryParams

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_HYPOTHESIS_UNMET = 2
EXIT_VALIDATION = 3
EXIT_CEILING = 4


class _Parser(argparse.ArgumentParser):
    # bad flags are configuration validation problems, not a separate code
    def error(self, message):
        raise ValidationError(message)


def _parse_kv_spec(spec: str, keys) -> dict:
    out = {}
    for part in spec.split(","):
        if "=" not in part:
            raise ValidationError(f"malformed spec {spec!r}, expected key=value pairs")
        key, value = part.split("=", 1)
        key = key.strip()
        if key not in keys:
            raise ValidationError(f"unknown key {key!r} in spec {spec!r}")
        try:
            out[key] = int(value)
        except ValueError as exc:
            raise ValidationError(f"non-integer value in spec {spec!r}") from exc
    missing = [k for k in keys if k not in out]
    if missing:
        raise ValidationError(f"spec {spec!r} is missing {missing}")
    return out


def _load_design(args) -> design_mod.Design:
    if getattr(args, "ag", None):
        kv = _parse_kv_spec(args.ag, ("q", "n", "m"))
        return design_mod.from_affine_geometry(GeometryParams(**kv))
    if getattr(args, "design", None):
        return design_mod.load_design(args.design)
    raise ValidationError("a design source is required: --ag or --design")


def _emit(text: str, out_path: Optional[str]) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_report(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _point_as_lists(pt):
    return [list(coord) for coord in pt]


# ---------------------------------------------------------------------------
# subcommands

def _cmd_generate(args) -> int:
    d = _load_design(args)
    text = design_mod.design_to_text(d)
    p = d.params
    params_line = f"bibd {p.num_points} {p.num_blocks} {p.r} {p.k} {p.lam}\n"
    if args.out:
        _emit(text, args.out)
        sys.stdout.write(params_line)
    else:
        sys.stdout.write(text)
        sys.stderr.write(params_line)
    return EXIT_OK


def _cmd_spectrum(args) -> int:
    d = _load_design(args)
    report = spectral_mod.numeric_spectrum(d)
    payload = {
        "schema": SCHEMA_VERSION,
        "command": "spectrum",
        "config": {"ag": args.ag, "design": args.design},
        "report": {
            "theoretical": [[value, mult] for value, mult in report.theoretical],
            "numeric": list(report.numeric),
            "mu": report.mu,
            "mu_squared": str(report.mu_squared),
            "max_abs_deviation": report.max_abs_deviation,
            "gram_identity": spectral_mod.gram_identity_holds(d),
        },
    }
    _emit(_json_report(payload), args.out)
    return EXIT_OK


def _reports_to_csv(reports) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(
        ["bound_name", "hypothesis_met", "satisfied", "bound_value",
         "measured", "slack_ratio", "parameters"]
    )
    for rep in reports:
        d = rep.to_dict()
        writer.writerow(
            [d["bound_name"], d["hypothesis_met"], d["satisfied"],
             d["bound_value"], d["measured"], d["slack_ratio"],
             json.dumps(d["parameters"], sort_keys=True)]
        )
    return buf.getvalue()


def _cmd_verify(args) -> int:
    d = _load_design(args)
    if args.bound not in bounds_mod.BOUND_NAMES:
        raise ValidationError(
            f"unknown bound {args.bound!r}; choose from {bounds_mod.BOUND_NAMES}"
        )
    query = None
    if args.bound != bounds_mod.BOUND_INCIDENCE:
        if args.epsilon is None or args.t is None:
            raise ValidationError("richness bounds need --epsilon and --t")
        query = bounds_mod.RichnessQuery.make(Fraction(args.epsilon), args.t)
    if args.exhaustive:
        reports = bounds_mod.verify_bound_exhaustive(
            d, args.bound, size_p=args.size_p, size_l=args.size_l, query=query
        )
    else:
        if args.seed is None:
            raise ValidationError("sampling verification needs --seed")
        reports = bounds_mod.verify_bound_sampled(
            d,
            args.bound,
            budget=args.budget,
            seed=args.seed,
            size_p=args.size_p,
            size_l=args.size_l,
            query=query,
        )
    violations = [rep for rep in reports if rep.is_violation()]
    payload = {
        "schema": SCHEMA_VERSION,
        "command": "verify",
        "config": {
            "ag": args.ag,
            "design": args.design,
            "bound": args.bound,
            "epsilon": args.epsilon,
            "t": args.t,
            "budget": None if args.exhaustive else args.budget,
            "seed": None if args.exhaustive else args.seed,
            "size_p": args.size_p,
            "size_l": args.size_l,
            "exhaustive": bool(args.exhaustive),
        },
        "reports": [rep.to_dict() for rep in reports],
        "num_reports": len(reports),
        "num_violations": len(violations),
        "num_hypothesis_unmet": sum(1 for r in reports if not r.hypothesis_met),
    }
    if args.format == "csv":
        _emit(_reports_to_csv(reports), args.out)
    else:
        _emit(_json_report(payload), args.out)
    if violations:
        sys.stderr.write(
            "bound violation:\n"
            + json.dumps(violations[0].to_dict(), sort_keys=True, indent=2)
            + "\n"
        )
        return EXIT_VIOLATION
    return EXIT_OK


def _cmd_triangles(args) -> int:
    if args.points:
        pset = triangles_mod.load_points(args.points)
        source = {"points": args.points}
    elif args.random:
        kv = _parse_kv_spec(args.random, ("q", "size"))
        if args.seed is None:
            raise ValidationError("--random needs --seed")
        f = make_field_of_order(kv["q"])
        pset = triangles_mod.random_plane_points(f, kv["size"], args.seed)
        source = {"random": args.random, "seed": args.seed}
    else:
        raise ValidationError("a point source is required: --points or --random")
    epsilon = Fraction(args.epsilon) if args.epsilon is not None else Fraction(1)
    result = triangles_mod.distinct_areas_experiment(pset, epsilon)
    satisfied = result.num_distinct_areas >= result.guarantee
    payload = {
        "schema": SCHEMA_VERSION,
        "command": "triangles",
        "config": {**source, "epsilon": str(epsilon)},
        "report": {
            "z": _point_as_lists(result.z),
            "t": result.t,
            "delta": str(result.delta),
            "lines_used": result.lines_used,
            "num_distinct_areas": result.num_distinct_areas,
            "constant": str(result.constant),
            "guarantee": result.guarantee,
            "satisfied": satisfied,
        },
    }
    _emit(_json_report(payload), args.out)
    return EXIT_OK if satisfied else EXIT_VIOLATION


# ---------------------------------------------------------------------------

def _build_parser() -> _Parser:
    parser = _Parser(prog="bibdkit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_design_source(p):
        p.add_argument("--ag", help="affine geometry spec, e.g. q=3,n=2,m=1")
        p.add_argument("--design", help="path to a design file")

    p_gen = sub.add_parser("generate", help="build and write a validated design")
    add_design_source(p_gen)
    p_gen.add_argument("--out", help="output path (stdout when omitted)")
    p_gen.set_defaults(func=_cmd_generate)

    p_spec = sub.add_parser("spectrum", help="theoretical vs numeric spectrum")
    add_design_source(p_spec)
    p_spec.add_argument("--out", help="output path (stdout when omitted)")
    p_spec.set_defaults(func=_cmd_spectrum)

    p_ver = sub.add_parser("verify", help="verify an incidence/richness bound")
    add_design_source(p_ver)
    p_ver.add_argument("--bound", required=True,
                       help="incidence | rich-blocks | rich-points")
    p_ver.add_argument("--epsilon", help="excess factor for richness bounds")
    p_ver.add_argument("--t", type=int, help="richness threshold (>= 2)")
    p_ver.add_argument("--budget", type=int, default=1000,
                       help="number of sampled configurations")
    p_ver.add_argument("--seed", type=int, help="RNG seed (required for sampling)")
    p_ver.add_argument("--size-p", type=int, dest="size_p",
                       help="fixed point-subset size")
    p_ver.add_argument("--size-l", type=int, dest="size_l",
                       help="fixed block-subset size")
    p_ver.add_argument("--exhaustive", action="store_true",
                       help="enumerate all subsets of the given sizes")
    p_ver.add_argument("--format", choices=("json", "csv"), default="json")
    p_ver.add_argument("--out", help="output path (stdout when omitted)")
    p_ver.set_defaults(func=_cmd_verify)

    p_tri = sub.add_parser("triangles", help="distinct triangle-areas experiment")
    p_tri.add_argument("--points", help="path to a point-set file")
    p_tri.add_argument("--random", help="random point spec, e.g. q=7,size=14")
    p_tri.add_argument("--epsilon", help="excess factor (default 1)")
    p_tri.add_argument("--seed", type=int, help="RNG seed for --random")
    p_tri.add_argument("--out", help="output path (stdout when omitted)")
    p_tri.set_defaults(func=_cmd_triangles)

    return parser


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except HypothesisUnmetError as exc:
        sys.stderr.write(f"hypothesis unmet: {exc}\n")
        return EXIT_HYPOTHESIS_UNMET
    except CeilingError as exc:
        sys.stderr.write(f"resource ceiling: {exc}\n")
        return EXIT_CEILING
    except ValidationError as exc:
        sys.stderr.write(f"validation error: {exc}\n")
        return EXIT_VALIDATION
    except OSError as exc:
        sys.stderr.write(f"validation error: {exc}\n")
        return EXIT_VALIDATION


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
