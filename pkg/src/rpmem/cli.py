"""Command-line front end.

stdout carries only the JSON or CSV payload; diagnostics go to stderr.
Exit codes: 0 ran, 2 invalid input, 3 the decider returned NotSeparated.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from rpmem import bounds
from rpmem.bounds import ConstantConfig
from rpmem.geometry import Cone, FiniteSet, IntegerFiber, Polytope, doubling_constant
from rpmem.linalg import Distribution, ProjectionSpec, Scaling, apply, sample_projection
from rpmem.membership import Outcome, decide_pipeline
from rpmem.montecarlo import ExperimentConfig, calibrate_C, estimate_failure, reproduce_ifp_float

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NOT_SEPARATED = 3
SEED_ENV = "RPMEM_SEED"

_num = {"type": "number"}
_int = {"type": "integer"}

CONSTANTS_SCHEMA = {
    "type": "object",
    "required": ["C_jl", "C_doubling", "kappa", "k_min"],
    "properties": {"C_jl": _num, "C_doubling": _num, "kappa": _num, "k_min": _int},
    "additionalProperties": False,
}

KSELECTION_SCHEMA = {
    "type": "object",
    "required": ["k", "rule", "inputs", "constants", "guarantee", "notes"],
    "properties": {
        "k": {"type": "integer", "minimum": 1},
        "rule": {"enum": [r.value for r in bounds.Rule]},
        "inputs": {"type": "object"},
        "constants": CONSTANTS_SCHEMA,
        "guarantee": {"type": "number", "minimum": 0, "maximum": 1},
        "notes": {"type": "array", "items": {"type": "string"}},
    },
}

DECISION_SCHEMA = {
    "type": "object",
    "required": ["outcome", "margin", "k_used", "threshold", "guarantee", "vacuous", "selection"],
    "properties": {
        "outcome": {"enum": [o.value for o in Outcome]},
        "margin": {"type": ["number", "null"], "minimum": 0},
        "k_used": {"type": "integer", "minimum": 1},
        "threshold": {"type": "number", "minimum": 0},
        "guarantee": {"type": "number", "minimum": 0, "maximum": 1},
        "vacuous": {"type": "boolean"},
        "selection": {"oneOf": [{"type": "null"}, KSELECTION_SCHEMA]},
    },
}

REPORT_SCHEMA = {
    "type": "object",
    "required": ["failures", "trials", "rate", "wilson_99_lower", "wilson_99_upper", "half_width",
                 "theoretical_delta", "within_bound", "metadata"],
    "properties": {
        "failures": {"type": "integer", "minimum": 0},
        "trials": {"type": "integer", "minimum": 1},
        "rate": {"type": "number", "minimum": 0, "maximum": 1},
        "wilson_99_lower": {"type": "number", "minimum": 0, "maximum": 1},
        "wilson_99_upper": {"type": "number", "minimum": 0, "maximum": 1},
        "half_width": {"type": "number", "minimum": 0},
        "theoretical_delta": {"type": "number", "minimum": 0},
        "within_bound": {"type": "boolean"},
        "metadata": {"type": "object", "required": ["k", "constants"]},
    },
}

IFP_SCHEMA = {
    "type": "object",
    "required": ["trials", "gaps", "gap_quantiles", "below_tolerance", "below_scaled_tolerance",
                 "exact_k", "exact_separated", "exact_rate", "metadata"],
    "properties": {
        "trials": {"type": "integer", "minimum": 1},
        "gaps": {"type": "array", "items": {"type": "number", "minimum": 0}},
        "gap_quantiles": {"type": "object", "additionalProperties": _num},
        "below_tolerance": {"type": "object", "additionalProperties": _num},
        "below_scaled_tolerance": {"type": "object", "additionalProperties": _num},
        "exact_k": _int,
        "exact_separated": _int,
        "exact_rate": _num,
    },
}

CALIBRATION_SCHEMA = {
    "type": "object",
    "required": ["C_hat", "intercept", "status", "k_grid", "rates", "points_used"],
    "properties": {
        "C_hat": _num,
        "intercept": {"type": ["number", "null"]},
        "status": {"enum": ["fit", "lower_bound"]},
        "k_grid": {"type": "array", "items": _int},
        "rates": {"type": "array", "items": _num},
    },
}

DOUBLING_SCHEMA = {
    "type": "object",
    "required": ["lambda", "mode"],
    "properties": {"lambda": {"type": "integer", "minimum": 1}, "mode": {"enum": ["exact", "greedy"]}},
}


class InputError(ValueError):
    pass


def _emit(payload) -> None:
    sys.stdout.write(json.dumps(payload, sort_keys=True, allow_nan=False) + "\n")


def read_points_csv(path: str) -> list[list[float]]:
    """One point per row; blank lines and ``#`` comments skipped; ``# dim=m`` is checked."""
    try:
        with open(path, newline="") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    dim = None
    rows = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or not "".join(row).strip():
            continue
        first = row[0].strip()
        if first.startswith("#"):
            tag = ",".join(row).lstrip("#").strip()
            if tag.startswith("dim="):
                try:
                    dim = int(tag[4:])
                except ValueError as exc:
                    raise InputError(f"{path}:{lineno}: bad dim header {tag!r}") from exc
            continue
        try:
            vals = [float(v) for v in row]
        except ValueError as exc:
            raise InputError(f"{path}:{lineno}: {exc}") from exc
        if rows and len(vals) != len(rows[0]):
            raise InputError(f"{path}:{lineno}: expected {len(rows[0])} columns, got {len(vals)}")
        if dim is not None and len(vals) != dim:
            raise InputError(f"{path}:{lineno}: header says dim={dim}, row has {len(vals)} columns")
        rows.append(vals)
    if not rows:
        raise InputError(f"{path}: no data rows")
    return rows


def _read_json(path: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise InputError(f"{path}: top level must be an object")
    return data


def _field(data: dict, key: str, path: str):
    if key not in data:
        raise InputError(f"{path}: missing field {key!r}")
    return data[key]


def _constants(path):
    return ConstantConfig() if path is None else ConstantConfig.from_dict(_read_json(path))


def _seed(flag):
    if flag is not None:
        return flag
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError as exc:
        raise InputError(f"{SEED_ENV}={env!r} is not an integer") from exc


def load_instance(kind: str, path: str):
    data = _read_json(path)
    if kind == "integer":
        box = data.get("box")
        if box is not None:
            box = (_field(box, "L", path + ":box"), _field(box, "U", path + ":box"))
        return IntegerFiber(_field(data, "A", path), _field(data, "b", path), data.get("positive_row", 0),
                            box, data.get("B")), None
    key, point = {"finite": ("points", "p"), "polytope": ("vertices", "b"), "cone": ("generators", "b")}[kind]
    cls = {"finite": FiniteSet, "polytope": Polytope, "cone": Cone}[kind]
    return cls(_field(data, key, path)), _field(data, point, path)


def cmd_bounds(args) -> int:
    cfg = _constants(args.config)

    def need(*names):
        missing = [n for n in names if getattr(args, n) is None]
        if missing:
            raise InputError(f"rule {args.rule!r} needs --" + ", --".join(m.replace("_", "-") for m in missing))
        return [getattr(args, n) for n in names]

    if args.rule == "finite":
        size, delta, tau, d = need("size", "delta", "tau", "d")
        sel = bounds.k_for_finite_threshold(size, delta, tau, d, cfg)
    elif args.rule == "integer":
        n, B, delta = need("n", "B", "delta")
        sel = bounds.k_for_integer_fiber(n, B, delta, cfg)
    elif args.rule == "polytope":
        n, d, D, delta = need("n", "d", "D", "delta")
        sel = bounds.k_for_polytope(n, d, D, delta, cfg)
    elif args.rule == "cone":
        n, d, mu, delta = need("n", "d", "mu_a", "delta")
        sel = bounds.k_for_cone(n, d, mu, delta, cfg)
    elif args.rule == "doubling":
        lam, delta, tau, d = need("lambda_", "delta", "tau", "d")
        sel = bounds.k_for_doubling(lam, delta, tau, d, cfg)
    else:
        (lam,) = need("lambda_")
        sel = bounds.k_for_doubling_exact(lam, cfg)
    _emit(sel.to_dict())
    return EXIT_OK


def cmd_project(args) -> int:
    if args.k < 1:
        raise InputError("--k must be positive")
    pts = read_points_csv(args.input)
    spec = ProjectionSpec(len(pts[0]), args.k, Distribution(args.dist),
                          Scaling.INV_SQRT_K if args.scale else Scaling.NONE, _seed(args.seed))
    img = apply(sample_projection(spec), pts)
    out = [f"# dim={args.k}"]
    out.extend(",".join(repr(float(v)) for v in row) for row in img)
    sys.stdout.write("\n".join(out) + "\n")
    return EXIT_OK


def cmd_decide(args) -> int:
    instance, point = load_instance(args.kind, args.input)
    decision = decide_pipeline(instance, point, args.delta, args.tau, _constants(args.config), _seed(args.seed))
    _emit(decision.to_dict())
    return EXIT_NOT_SEPARATED if decision.outcome is Outcome.NOT_SEPARATED else EXIT_OK


def cmd_doubling(args) -> int:
    mode = "exact" if args.exact else "greedy" if args.greedy else "auto"
    lam, used = doubling_constant(read_points_csv(args.input), mode)
    _emit({"lambda": lam, "mode": used})
    return EXIT_OK


def cmd_experiment(args) -> int:
    data = _read_json(args.config)
    if args.seed is not None:
        data["master_seed"] = args.seed
    if args.kind == "calibrate":
        data = dict(data)
        k_grid = _field(data, "k_grid", args.config)
        result = calibrate_C(data.get("cls", "finite"), k_grid, data.get("trials", 1000), data.get("params"),
                             data.get("delta", 0.05), data.get("tau"), data.get("master_seed", 0),
                             data.get("instance_seed", 0), data.get("prefactor", 1.0))
        _emit(result.to_dict())
        return EXIT_OK
    try:
        cfg = ExperimentConfig.from_dict(data)
    except TypeError as exc:
        raise InputError(f"{args.config}: {exc}") from exc
    report = estimate_failure(cfg) if args.kind == "failure" else reproduce_ifp_float(cfg)
    _emit(report.to_dict())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rpmem", description="Random-projection membership tests.")
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bounds", help="projection dimension for a rule")
    b.add_argument("rule", choices=["finite", "integer", "polytope", "cone", "doubling", "doubling-exact"])
    b.add_argument("--delta", type=float)
    b.add_argument("--tau", type=float)
    b.add_argument("--d", type=float)
    b.add_argument("--D", type=float)
    b.add_argument("--size", type=int)
    b.add_argument("--n", type=int)
    b.add_argument("--B", type=int)
    b.add_argument("--lambda", dest="lambda_", type=float)
    b.add_argument("--mu-a", dest="mu_a", type=float)
    b.add_argument("--config")
    b.set_defaults(func=cmd_bounds)

    p = sub.add_parser("project", help="project a CSV of points")
    p.add_argument("--input", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--dist", choices=[d.value for d in Distribution], default="gaussian")
    p.add_argument("--scale", action="store_true", help="scale by 1/sqrt(k)")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_project)

    d = sub.add_parser("decide", help="decide a membership instance")
    d.add_argument("kind", choices=["finite", "polytope", "cone", "integer"])
    d.add_argument("--input", required=True)
    d.add_argument("--delta", type=float, default=0.05)
    d.add_argument("--tau", type=float, default=0.0)
    d.add_argument("--seed", type=int)
    d.add_argument("--config")
    d.set_defaults(func=cmd_decide)

    db = sub.add_parser("doubling", help="doubling constant of a CSV point set")
    db.add_argument("--input", required=True)
    g = db.add_mutually_exclusive_group()
    g.add_argument("--exact", action="store_true")
    g.add_argument("--greedy", action="store_true")
    db.set_defaults(func=cmd_doubling)

    e = sub.add_parser("experiment", help="Monte Carlo experiments")
    e.add_argument("kind", choices=["failure", "ifp-float", "calibrate"])
    e.add_argument("--config", required=True)
    e.add_argument("--seed", type=int)
    e.set_defaults(func=cmd_experiment)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (ValueError, TypeError, KeyError) as exc:
        print(f"rpmem: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
