"""Command-line front end.

Exit codes: 0 success, 2 input error, 3 solver error.
"""

import argparse
import json
import os
import sys

import numpy as np

from .errors import NoPseudoChannelError, PdoError, RankDeficientError, SolverError
from .experiments import EXPERIMENTS, CSV_HEADER, fmt, round_floats, run_experiment
from .measures import (
    EPS_SPATIAL,
    EPS_TEMPORAL,
    TOL_OPT,
    classify,
    entanglement_negativity,
    forward_atemporality,
    reverse_atemporality,
)
from .pseudo_channel import (
    RANK_EPS,
    input_marginal_min_eigenvalue,
    recover_pseudo_channel,
    verify_compatibility,
)
from .serialization import (
    InputError,
    estimate_to_csv,
    estimate_to_json,
    mechanism_from_json,
    pdo_from_json,
    pdo_to_json,
    pseudo_channel_record,
)
from .simulate import reconstruct_pdo, sample_correlations

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_SOLVER = 3


def _positive(value):
    x = float(value)
    if not x > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return x


def _add_common(p):
    p.add_argument("--input", "-i", default="-", help="input JSON file ('-' for stdin)")
    p.add_argument("--output", "-o", default="-", help="output file ('-' for stdout)")
    p.add_argument("--format", choices=("json", "csv"), default=None, help="json (default) or csv (default for experiment)")
    p.add_argument("--seed", type=int, default=None, help="RNG seed (falls back to $PDO_CAUSAL_SEED, then 0)")
    p.add_argument("--tol-opt", type=_positive, default=TOL_OPT)
    p.add_argument("--eps-spatial", type=_positive, default=EPS_SPATIAL)
    p.add_argument("--eps-temporal", type=_positive, default=EPS_TEMPORAL)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pdo-causal",
        description="Spatial and temporal causal compatibility of two-qubit pseudo-density operators.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="region label and all measures of a PDO")
    _add_common(p)

    p = sub.add_parser("measures", help="aspatiality, entanglement negativity and atemporalities")
    _add_common(p)

    p = sub.add_parser("recover-channel", help="compatible pseudo-channel of a PDO")
    _add_common(p)
    p.add_argument("--direction", choices=("forward", "reverse"), default="forward")
    p.add_argument("--tau", default=None, help="Bloch vector 'x,y,z' of tau for a pure input marginal")
    p.add_argument("--optimize", action="store_true", help="pick the least negative tau for a pure input marginal")

    p = sub.add_parser("simulate", help="finite-shot Pauli measurements and reconstruction")
    _add_common(p)
    p.add_argument("--shots", type=int, default=10_000, help="shots per setting pair")

    p = sub.add_parser("experiment", help="run a named family or sweep")
    _add_common(p)
    p.add_argument("name", help=f"one of: {', '.join(EXPERIMENTS)}")
    p.add_argument("--grid", type=int, default=None, help="grid points per axis")
    p.add_argument("--n", type=int, default=1000, help="sample count for random-scatter")
    p.add_argument("--q", type=float, default=0.25, help="Werner parameter for the biased-werner cut")
    return parser


def _format(args):
    if args.format is not None:
        return args.format
    return "csv" if args.command == "experiment" else "json"


def _tolerances(args):
    return {"eps_spatial": args.eps_spatial, "eps_temporal": args.eps_temporal, "tol_opt": args.tol_opt}


def _seed(args):
    if args.seed is not None:
        return args.seed
    env = os.environ.get("PDO_CAUSAL_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise InputError(f"PDO_CAUSAL_SEED must be an integer, got {env!r}") from None


def _read_json(path):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def _dump(doc):
    return json.dumps(round_floats(doc), indent=2, ensure_ascii=False) + "\n"


def _report_csv(rep):
    vals = ["", "", fmt(rep.e_neg), fmt(rep.f), fmt(rep.f_forward), fmt(rep.f_reverse), fmt(rep.aspatiality), rep.region]
    return ",".join(CSV_HEADER) + "\n" + ",".join(vals) + "\n"


def cmd_classify(args):
    r = pdo_from_json(_read_json(args.input))
    rep = classify(r, **_tolerances(args))
    return _report_csv(rep) if _format(args) == "csv" else _dump(rep.to_dict())


def cmd_measures(args):
    r = pdo_from_json(_read_json(args.input))
    tol = _tolerances(args)
    rep = classify(r, **tol)
    doc = rep.to_dict()
    # e_neg is withheld for non-states; the raw partial-transpose value is still useful
    doc["partial_transpose_negativity"] = entanglement_negativity(r)
    doc["pseudo_channels"] = {
        d.direction: {"method": d.method, "negativity": d.value, "flags": d.flags}
        for d in (rep.forward, rep.reverse)
    }
    doc["pdo"] = pdo_to_json(r)
    if _format(args) == "csv":
        return _report_csv(rep)
    return _dump(doc)


def _parse_tau(text):
    try:
        v = np.array([float(x) for x in text.split(",")])
    except ValueError:
        raise InputError(f"--tau must be three comma-separated numbers, got {text!r}") from None
    if v.shape != (3,):
        raise InputError(f"--tau must have three components, got {len(v)}")
    return v


def cmd_recover_channel(args):
    r = pdo_from_json(_read_json(args.input))
    direction = args.direction
    pure = input_marginal_min_eigenvalue(r, direction) < RANK_EPS
    if pure and args.tau is None and not args.optimize:
        raise RankDeficientError(
            "the input marginal is pure, so the compatible pseudo-channel is not unique; "
            "pass --tau x,y,z or --optimize"
        )
    if pure and args.optimize and args.tau is None:
        run = forward_atemporality(r, args.tol_opt) if direction == "forward" else reverse_atemporality(r, args.tol_opt)
        pc = run.pseudo_channel
        if pc is None:
            raise NoPseudoChannelError(
                f"no {direction} pseudo-channel is compatible with this PDO; try the other --direction"
            )
    else:
        tau = _parse_tau(args.tau) if args.tau is not None else None
        pc = recover_pseudo_channel(r, direction, tau)
    doc = pseudo_channel_record(pc, verify_compatibility(pc, r))
    doc["tolerances"] = _tolerances(args)
    if _format(args) == "csv":
        return "direction,method,negativity,cptp,residual\n" + ",".join(
            [pc.direction, pc.method, fmt(doc["negativity"]), str(doc["cptp"]).lower(), fmt(doc["residual"])]
        ) + "\n"
    return _dump(doc)


def cmd_simulate(args):
    if args.shots < 1:
        raise InputError(f"--shots must be at least 1, got {args.shots}")
    mech = mechanism_from_json(_read_json(args.input))
    seed = _seed(args)
    est = sample_correlations(mech, args.shots, seed)
    if _format(args) == "csv":
        return estimate_to_csv(est)
    r, flags = reconstruct_pdo(est)
    rep = classify(r, **_tolerances(args))
    report = rep.to_dict()
    report["flags"] = report["flags"] + flags + ["finite-sample-estimate"]
    return _dump(
        {
            "seed": seed,
            "estimate": estimate_to_json(est),
            "pdo": pdo_to_json(r),
            "report": report,
        }
    )


def cmd_experiment(args):
    if args.name not in EXPERIMENTS:
        raise InputError(f"unknown experiment {args.name!r}; choose from {', '.join(EXPERIMENTS)}")
    if args.grid is not None and args.grid < 2:
        raise InputError("--grid must be at least 2")
    if args.n < 1:
        raise InputError("--n must be at least 1")
    result = run_experiment(args.name, args.grid, args.n, _seed(args), args.q, **_tolerances(args))
    return result.to_csv() if _format(args) == "csv" else result.to_json()


COMMANDS = {
    "classify": cmd_classify,
    "measures": cmd_measures,
    "recover-channel": cmd_recover_channel,
    "simulate": cmd_simulate,
    "experiment": cmd_experiment,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        text = COMMANDS[args.command](args)
    except SolverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except PdoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
