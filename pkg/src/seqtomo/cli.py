"""Command-line interface.

Exit codes: 0 success, 1 usage or input error, 2 infeasible or negative
result (not informationally complete, empty feasible set, failed check).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import jsonio
from .instrument import (
    DensityOperator,
    make_example1,
    make_example2,
    make_luders,
    make_nqubit_shift,
    make_projective,
    make_qudit_mub,
    sic_qubit_effects,
)
from .optimize import InfeasibleScanError, optimize_family, scan_condition_number
from .recon import NotInformationallyCompleteError, TrajectoryBatch, reconstruct, sample_trajectories, trace_distance
from .reproduce import run_checks
from .sequential import (
    collective_effects,
    format_multi_index,
    gram_report,
    ic_search,
    min_depth_bound,
    multi_indices,
    outcome_distribution,
    parse_multi_index,
)

FAMILIES = ("example1", "example2", "qudit-mub", "luders", "projective", "nqubit-shift", "sic")
SCALAR_FAMILIES = ("example1", "example2", "qudit-mub")


class UsageError(Exception):
    pass


class Infeasible(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_instrument_args(p, scalar_only=False):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--family", choices=SCALAR_FAMILIES if scalar_only else FAMILIES)
    if not scalar_only:
        src.add_argument("--instrument-file", metavar="PATH", help="instrument JSON file")
        p.add_argument("--p", type=float, help="family parameter")
        p.add_argument("--effects-file", metavar="PATH", help="effects for the luders/projective families")
        p.add_argument("--n", type=int, default=2, help="qubit count for nqubit-shift")
        p.add_argument("--base", choices=("example1", "example2"), default="example2", help="base instrument for nqubit-shift")
        p.add_argument("--dump-instrument", metavar="PATH", help="write the instrument as JSON")
    p.add_argument("--d", type=int, default=3, help="dimension for qudit-mub")


def _add_output_args(p, formats=("json",)):
    p.add_argument("--output", "-o", metavar="PATH", help="write to file instead of stdout")
    p.add_argument("--format", choices=formats, default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="seqtomo", description="Sequential-measurement tomography toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check-ic", help="span rank per depth and first informationally complete depth")
    _add_instrument_args(p)
    p.add_argument("--max-depth", type=int, default=4)
    _add_output_args(p, ("json", "csv"))

    p = sub.add_parser("gram", help="Gram matrix and condition number at one depth")
    _add_instrument_args(p)
    p.add_argument("--depth", type=int, default=2)
    _add_output_args(p)

    for name in ("scan", "optimize"):
        p = sub.add_parser(name, help="condition number over the family parameter" + (" with refinement" if name == "optimize" else ""))
        _add_instrument_args(p, scalar_only=True)
        p.add_argument("--depth", type=int, default=2)
        p.add_argument("--grid-points", type=int, default=101)
        p.add_argument("--p-min", type=float)
        p.add_argument("--p-max", type=float)
        _add_output_args(p, ("json", "csv"))

    p = sub.add_parser("simulate", help="sample measurement trajectories")
    _add_instrument_args(p)
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--state", default="mixed", help="mixed | basis:k | random:seed | PATH")
    p.add_argument("--shots", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exact", action="store_true", help="write exact probabilities instead of sampling")
    _add_output_args(p)

    p = sub.add_parser("reconstruct", help="linear-inversion state estimate")
    _add_instrument_args(p)
    data = p.add_mutually_exclusive_group(required=True)
    data.add_argument("--batch", metavar="PATH", help="TrajectoryBatch JSON written by simulate")
    data.add_argument("--probabilities", metavar="PATH", help="exact-probability JSON written by simulate --exact")
    p.add_argument("--truth", help="true state (same syntax as simulate --state)")
    p.add_argument("--no-project", action="store_true", help="skip projection onto the state space")
    _add_output_args(p)

    p = sub.add_parser("demo-paper", help="reproduce the reference numbers as a check table")
    p.add_argument("--only", action="append", metavar="NAME", help="run only this check (repeatable)")
    _add_output_args(p, ("json", "csv"))
    return parser


def _require_p(args, default=None):
    if args.p is None:
        if default is None:
            raise UsageError(f"--family {args.family} needs --p")
        return default
    return args.p


def build_instrument(args):
    if getattr(args, "instrument_file", None):
        return jsonio.load_instrument(args.instrument_file)
    fam = args.family
    if fam == "example1":
        return make_example1(_require_p(args))
    if fam == "example2":
        return make_example2(_require_p(args))
    if fam == "qudit-mub":
        return make_qudit_mub(args.d, _require_p(args))
    if fam == "sic":
        return make_luders(sic_qubit_effects(), label="sic")
    if fam == "nqubit-shift":
        base = (make_example1 if args.base == "example1" else make_example2)(_require_p(args, 0.5))
        return make_nqubit_shift(args.n, base)
    if fam in ("luders", "projective"):
        if not args.effects_file:
            raise UsageError(f"--family {fam} needs --effects-file")
        effects = jsonio.effects_from_json(jsonio.load_json(args.effects_file))
        return make_luders(effects) if fam == "luders" else make_projective(effects)
    raise UsageError(f"unknown family {fam}")


def parse_state(spec: str, d: int) -> DensityOperator:
    if spec == "mixed":
        return DensityOperator.maximally_mixed(d)
    kind, _, arg = spec.partition(":")
    if kind == "basis" and arg:
        return DensityOperator.basis(d, int(arg))
    if kind == "random" and arg:
        return DensityOperator.random(d, np.random.default_rng(int(arg)))
    if os.path.exists(spec):
        rho = jsonio.state_from_json(jsonio.load_json(spec))
        if rho.dim != d:
            raise ValueError(f"state file has dimension {rho.dim}, instrument acts on {d}")
        return rho
    raise UsageError(f"unrecognized state {spec!r}")


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _finite_or_none(x):
    return None if not math.isfinite(x) else x


def cmd_check_ic(args, instr):
    res = ic_search(instr, args.max_depth)
    report = {
        "label": instr.label,
        "dim": instr.dim,
        "outcomes": instr.outcomes,
        "min_depth_bound": min_depth_bound(instr.outcomes, instr.dim),
        "rank_per_depth": res.rank_per_depth,
        "first_ic_depth": res.first_ic_depth,
    }
    if args.format == "csv":
        text = _csv(["depth", "span_rank", "is_ic"], [[k + 1, r, r == instr.dim**2] for k, r in enumerate(res.rank_per_depth)])
    else:
        text = _json(report)
    return text, 0 if res.first_ic_depth is not None else 2


def cmd_gram(args, instr):
    es = collective_effects(instr, args.depth)
    rep = gram_report(es)
    out = {
        "label": instr.label,
        "depth": args.depth,
        "span_rank": es.span_rank,
        "is_ic": es.is_ic,
        "condition_number": _finite_or_none(rep.condition_number),
        "infinite_reason": rep.infinite_reason,
        "eigenvalues": rep.eigenvalues.tolist(),
        "indices": [format_multi_index(ix, es.outcomes) for ix in es.indices],
        "gram": rep.gram.tolist(),
    }
    return _json(out), 0 if rep.is_finite else 2


def _scan_range(args):
    if args.p_min is None and args.p_max is None:
        return None
    lo = 0.0 if args.p_min is None else args.p_min
    hi = 1.0 if args.p_max is None else args.p_max
    return (lo, hi)


def cmd_scan(args, refine):
    fam = args.family.replace("-", "_")
    fn = optimize_family if refine else scan_condition_number
    res = fn(fam, args.depth, grid_points=args.grid_points, p_range=_scan_range(args), d=args.d)
    if args.format == "csv":
        return _csv(["p", "lambda", "feasible"], [[p, lam if math.isfinite(lam) else "inf", math.isfinite(lam)] for p, lam in res.grid]), 0
    return _json(res.to_dict()), 0


def _exact_payload(instr, depth, rho):
    probs = outcome_distribution(instr, depth, rho)
    return {
        "label": instr.label,
        "depth": depth,
        "outcomes": instr.outcomes,
        "probabilities": {format_multi_index(ix, instr.outcomes): float(v) for ix, v in zip(multi_indices(instr.outcomes, depth), probs)},
    }


def cmd_simulate(args, instr):
    rho = parse_state(args.state, instr.dim)
    if args.exact:
        return _json(_exact_payload(instr, args.depth, rho)), 0
    batch = sample_trajectories(instr, args.depth, rho, args.shots, args.seed)
    return batch.to_json() + "\n", 0


def cmd_reconstruct(args, instr):
    if args.batch:
        batch = TrajectoryBatch.from_dict(jsonio.load_json(args.batch))
        depth, probs = batch.depth, batch.frequencies()
    else:
        data = jsonio.load_json(args.probabilities)
        depth = int(data["depth"])
        table = {parse_multi_index(k, instr.outcomes): float(v) for k, v in data["probabilities"].items()}
        probs = np.array([table.get(ix, 0.0) for ix in multi_indices(instr.outcomes, depth)])
    es = collective_effects(instr, depth)
    res = reconstruct(es, probs, project=not args.no_project)
    out = {
        "label": instr.label,
        "depth": depth,
        "estimate": jsonio.matrix_to_json(res.estimate.matrix),
        "raw_estimate": jsonio.matrix_to_json(res.raw_estimate),
        "residual": res.residual,
        "estimate_residual": res.estimate_residual,
        "projected": res.projected,
    }
    if args.truth:
        out["trace_distance"] = trace_distance(res.estimate, parse_state(args.truth, instr.dim))
    return _json(out), 0


def cmd_demo_paper(args):
    rows = run_checks(args.only)
    code = 0 if all(r.passed for r in rows) else 2
    if args.format == "csv":
        return _csv(["name", "expected", "measured", "tolerance", "pass"], [[r.name, r.expected, r.measured, r.tolerance, r.passed] for r in rows]), code
    return _json([{"name": r.name, "expected": r.expected, "measured": _finite_or_none(r.measured), "tolerance": r.tolerance, "pass": r.passed} for r in rows]), code


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "demo-paper":
            text, code = cmd_demo_paper(args)
        elif args.command in ("scan", "optimize"):
            text, code = cmd_scan(args, refine=args.command == "optimize")
        else:
            instr = build_instrument(args)
            if args.dump_instrument:
                with open(args.dump_instrument, "w") as fh:
                    fh.write(jsonio.dumps_instrument(instr))
            handler = {
                "check-ic": cmd_check_ic,
                "gram": cmd_gram,
                "simulate": cmd_simulate,
                "reconstruct": cmd_reconstruct,
            }[args.command]
            text, code = handler(args, instr)
    except (NotInformationallyCompleteError, InfeasibleScanError) as exc:
        print(f"seqtomo: {exc}", file=sys.stderr)
        return 2
    except (UsageError, ValueError, KeyError, OSError) as exc:
        print(f"seqtomo: error: {exc}", file=sys.stderr)
        return 1
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
