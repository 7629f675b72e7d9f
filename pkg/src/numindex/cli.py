"""Command-line front end.

Every subcommand reads spaces/operators from JSON (or CSV matrices with a
sidecar space file), runs the mapped computation and writes a JSON or CSV
report embedding the fully resolved configuration, so every number in a
report can be regenerated.  Exit codes: 0 success, 2 validation error,
3 numerical diagnostic.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, is_dataclass
from pathlib import Path

import numpy as np

from . import constructions as cn
from .lie import detect_components, lie_basis
from .operators import (
    Estimate,
    Operator,
    load_operator,
    numerical_radius,
    numerical_radius_closed,
    op_norm,
    operator_to_json,
)
from .quotient import estimate_index, estimate_second_index, quotient_norm
from .spaces import (
    NonSmoothPoint,
    NumericalDiagnostic,
    SpaceValidationError,
    load_space,
    space_dim,
    space_to_json,
)
from .suite import SuiteConfig, UnknownClaim, report_csv, report_json, run_suite

SCHEMA = "1"


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def _load_space_arg(args):
    return load_space(_read(args.space))


def _load_operator_arg(args):
    text = _read(args.matrix)
    if text.lstrip().startswith("{"):
        return load_operator(text)
    if not getattr(args, "space", None):
        raise SpaceValidationError("CSV matrices need --space as a sidecar space file")
    return load_operator(text, space=_load_space_arg(args))


def _to_jsonable(obj):
    if isinstance(obj, Operator):
        return operator_to_json(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if is_dataclass(obj) and not isinstance(obj, type):
        return {k: _to_jsonable(v) for k, v in asdict(obj).items()}
    if isinstance(obj, dict):
        return {k: _to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_jsonable(v) for v in obj]
    return obj


def _emit(args, payload: dict) -> None:
    payload = {"schema": SCHEMA} | _to_jsonable(payload)
    fmt = getattr(args, "format", "json")
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        flat = _flatten(payload)
        w.writerow(flat.keys())
        w.writerow(flat.values())
        text = buf.getvalue()
    else:
        text = json.dumps(payload, indent=2, sort_keys=True)
    out = getattr(args, "out", None)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _flatten(obj, prefix=""):
    flat = {}
    if isinstance(obj, dict):
        for k, v in obj.items():
            flat |= _flatten(v, f"{prefix}{k}." if prefix else f"{k}.")
    else:
        key = prefix.rstrip(".")
        flat[key] = json.dumps(obj) if isinstance(obj, (list, dict)) else obj
    return flat


def _config(args, **extra) -> dict:
    keep = ("space", "matrix", "budget", "seed", "restarts", "delta", "tol", "scale")
    cfg = {k: getattr(args, k) for k in keep if hasattr(args, k)}
    return cfg | extra


def _estimate_payload(est: Estimate) -> dict:
    return {
        "value": est.value,
        "direction": est.direction,
        "witness": _to_jsonable(est.witness),
        "budget": est.budget,
        "seed": est.seed,
        "details": _to_jsonable(est.details),
    }


# ---------------------------------------------------------------------------
# Subcommands


def _cmd_space(args):
    space = _load_space_arg(args)
    _emit(args, {"config": _config(args), "space": space_to_json(space), "dim": space_dim(space)})
    return 0


def _cmd_opnorm(args):
    T = _load_operator_arg(args)
    est = op_norm(T, budget=args.budget, seed=args.seed)
    _emit(args, {"config": _config(args), "estimate": _estimate_payload(est)})
    return 0


def _cmd_radius(args):
    T = _load_operator_arg(args)
    est = numerical_radius(T, budget=args.budget, seed=args.seed, delta=args.delta)
    closed = numerical_radius_closed(T)
    payload = {"config": _config(args), "estimate": _estimate_payload(est)}
    payload["closed_form"] = closed if closed is not None else "unavailable"
    _emit(args, payload)
    return 0


def _cmd_lie(args):
    space = _load_space_arg(args)
    basis = lie_basis(space, budget=args.budget, seed=args.seed)
    _emit(
        args,
        {
            "config": _config(args),
            "dimension": len(basis),
            "elements": [S.tolist() for S in basis.elements],
            "residuals": basis.residuals.tolist(),
            "constraint_count": basis.constraint_count,
            "svd_gap": basis.svd_gap,
            "components": detect_components(space, basis),
        },
    )
    return 0


def _cmd_quotient(args):
    T = _load_operator_arg(args)
    basis = lie_basis(T.space, budget=max(args.budget // 4, 10 * space_dim(T.space) ** 2), seed=args.seed)
    est = quotient_norm(T, basis, budget=args.budget, seed=args.seed)
    _emit(
        args,
        {
            "config": _config(args),
            "estimate": _estimate_payload(est),
            "lie_dimension": len(basis),
        },
    )
    return 0


def _cmd_index(args, second: bool):
    space = _load_space_arg(args)
    fn = estimate_second_index if second else estimate_index
    est = fn(space, restarts=args.restarts, budget=args.budget, seed=args.seed)
    _emit(
        args,
        {
            "config": _config(args),
            "value": est.value,
            "direction": est.direction,
            "witness": _to_jsonable(est.witness),
            "restarts": est.restarts,
            "inner_budget": est.inner_budget,
            "seed": est.seed,
            "details": _to_jsonable(est.details),
        },
    )
    return 0


def _cmd_construct(args):
    kind = args.kind
    if kind in ("witness-sup", "witness-one"):
        space = _load_space_arg(args)
        builder = cn.sup_sum_witness if kind == "witness-sup" else cn.l1_sum_witness
        obj = builder(space)
        payload = {"operator": operator_to_json(obj)}
    elif kind == "shift":
        space = _load_space_arg(args)
        s = cn.shift_operator(space, args.direction)
        payload = {
            "operator": operator_to_json(s.as_operator()),
            "source": s.source,
            "target": s.target,
        }
    elif kind == "ck":
        T = cn.ck_model_operator(args.m)
        payload = {"operator": operator_to_json(T), "space": space_to_json(T.space)}
    elif kind == "ck-space":
        payload = {"space": space_to_json(cn.ck_model(args.m))}
    elif kind == "lift":
        T = _load_operator_arg(args)
        target = load_space(_read(args.into))
        payload = {"operator": operator_to_json(cn.lift_operator(T, target, block=args.block))}
    else:  # pragma: no cover - argparse restricts choices
        raise SpaceValidationError(f"unknown construction {kind!r}")
    _emit(args, {"config": _config(args, kind=kind)} | payload)
    return 0


def _cmd_shift_check(args):
    space = _load_space_arg(args)
    report = cn.shift_bound_check(space, budget=args.budget, seed=args.seed)
    _emit(args, {"config": _config(args), "report": report})
    return 0


def _cmd_paper_suite(args):
    cfg = SuiteConfig(seed=args.seed, budget_scale=args.scale, subset=args.filter)
    results = run_suite(cfg)
    text = report_csv(results, cfg) if args.format == "csv" else report_json(results, cfg)
    if args.out:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        ext = "csv" if args.format == "csv" else "json"
        (outdir / f"report.{ext}").write_text(text + ("\n" if not text.endswith("\n") else ""))
    else:
        print(text)
    for r in results:
        print(f"{r.status:8s} {r.claim_id} (margin {r.margin:+.4f})", file=sys.stderr)
    return 1 if any(r.status == "fail" for r in results) else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="numindex",
        description="numerical radius, skew-hermitian structure and numerical "
        "indices of finite-dimensional real normed spaces",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, matrix=False, budget=20_000):
        # operator files can be JSON (self-describing) or CSV + sidecar space
        p.add_argument("--space", required=not matrix, help="space JSON file ('-' for stdin)")
        if matrix:
            p.add_argument("--matrix", required=True, help="operator JSON/CSV file")
        p.add_argument("--budget", type=int, default=budget)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out", default=None)

    p = sub.add_parser("space", help="validate and describe a space file")
    common(p)
    p.set_defaults(fn=_cmd_space)

    p = sub.add_parser("opnorm", help="operator norm estimate")
    common(p, matrix=True)
    p.set_defaults(fn=_cmd_opnorm)

    p = sub.add_parser("radius", help="numerical radius estimate")
    common(p, matrix=True)
    p.add_argument("--delta", type=float, default=None)
    p.set_defaults(fn=_cmd_radius)

    p = sub.add_parser("lie", help="skew-hermitian basis and component report")
    common(p, budget=4000)
    p.set_defaults(fn=_cmd_lie)

    p = sub.add_parser("quotient", help="distance to the skew-hermitian space")
    common(p, matrix=True)
    p.set_defaults(fn=_cmd_quotient)

    p = sub.add_parser("index", help="classical numerical index estimate")
    common(p)
    p.add_argument("--restarts", type=int, default=20)
    p.set_defaults(fn=lambda a: _cmd_index(a, second=False))

    p = sub.add_parser("index2", help="second numerical index estimate")
    common(p)
    p.add_argument("--restarts", type=int, default=12)
    p.set_defaults(fn=lambda a: _cmd_index(a, second=True))

    p = sub.add_parser("construct", help="emit structured operators/spaces as JSON")
    p.add_argument("kind", choices=("witness-sup", "witness-one", "shift", "ck", "ck-space", "lift"))
    p.add_argument("--space", default=None, help="space JSON file ('-' for stdin)")
    p.add_argument("--matrix", default=None, help="operator file (for lift)")
    p.add_argument("--into", default=None, help="target sum space file (for lift)")
    p.add_argument("--block", type=int, default=0)
    p.add_argument("--direction", choices=("12", "21"), default="12")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_construct)

    p = sub.add_parser("shift-check", help="shift-radius geometry consistency report")
    common(p)
    p.set_defaults(fn=_cmd_shift_check)

    p = sub.add_parser("paper-suite", help="run the reproduction claim suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--filter", default=None)
    p.add_argument("--out", default=None, help="directory for the report")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(fn=_cmd_paper_suite)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except (SpaceValidationError, UnknownClaim, FileNotFoundError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (NumericalDiagnostic, NonSmoothPoint) as e:
        print(f"numerical diagnostic: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
