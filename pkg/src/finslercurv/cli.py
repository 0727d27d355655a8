"""Command line front end: ``classify``, ``validate`` and ``catalog``.

Exit status: 0 on success (a ``fails`` verdict is a result, not an error),
1 if any check errored or a metric failed validation, 2 for bad usage,
configuration or I/O problems.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .errors import ConfigError, FinslerError, MetricValidationError
from .metric import CATALOG, from_config, validate
from .report import CHECK_IDS, RunConfig, has_errors, run, write


def _param_value(text: str):
    parts = text.split(",")
    try:
        nums = [float(p) for p in parts]
    except ValueError:
        if len(parts) > 1:
            raise ConfigError(f"cannot parse vector parameter {text!r}") from None
        return text
    return tuple(nums) if len(parts) > 1 else nums[0]


def _params(items) -> dict:
    out = {}
    for item in items or ():
        if "=" not in item:
            raise ConfigError(f"--param expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = _param_value(v.strip())
    return out


def _load_document(metric: str, dim: int | None, params: dict) -> dict:
    """Config document from a JSON file path or a builtin family id."""
    if os.path.isfile(metric):
        try:
            with open(metric, encoding="utf-8") as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read {metric}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{metric} is not valid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigError(f"{metric} must contain a JSON object")
        mcfg = doc.get("metric", doc)
        if dim is not None:
            mcfg["dimension"] = dim
        if params:
            mcfg.setdefault("params", {}).update(params)
        return doc
    return {"metric": {"family": metric, "dimension": dim if dim is not None else 4, "params": params}}


def _add_metric_args(p):
    p.add_argument("--metric", required=True, help="builtin family id (see `catalog`) or path to a JSON config")
    p.add_argument("--dim", type=int, default=None, help="dimension n (default 4 for builtins)")
    p.add_argument("--param", action="append", metavar="KEY=VALUE",
                   help="family parameter, e.g. mu=0.7 or a=0.5,0.3,-0.2,0.1 (repeatable)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="finslercurv", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("--catalog", action="store_true", help="same as the `catalog` command")
    sub = ap.add_subparsers(dest="command")

    c = sub.add_parser("classify", help="run classifiers / identity suites on sampled points")
    _add_metric_args(c)
    c.add_argument("--points", type=int, default=None, help="number of sample points (default 16)")
    c.add_argument("--seed", type=int, default=None, help="sampling seed (default 0)")
    c.add_argument("--tol", type=float, default=None, help="verdict tolerance (default 1e-6)")
    c.add_argument("--checks", default=None, help=f"comma list from {','.join(CHECK_IDS)} (default classify)")
    c.add_argument("--format", choices=("json", "text"), default=None)
    c.add_argument("--out", default=None, help="write the report here instead of stdout")
    c.add_argument("--workers", type=int, default=None, help="worker processes (default: all cores)")

    v = sub.add_parser("validate", help="check positivity, homogeneity and convexity on samples")
    _add_metric_args(v)
    v.add_argument("--points", type=int, default=32)
    v.add_argument("--seed", type=int, default=0)

    k = sub.add_parser("catalog", help="list builtin metrics with their expected classification")
    k.add_argument("--format", choices=("json", "text"), default="text")
    return ap


def _cmd_classify(args) -> int:
    doc = _load_document(args.metric, args.dim, _params(args.param))
    overrides = {"points": args.points, "seed": args.seed, "tolerance": args.tol,
                 "checks": args.checks, "format": args.format, "out": args.out, "workers": args.workers}
    for key, val in overrides.items():
        if val is not None:
            doc.pop({"tolerance": "tol"}.get(key, key), None)
            doc[key] = val
    doc.setdefault("workers", os.cpu_count() or 1)
    cfg = RunConfig.from_mapping(doc)
    report = run(cfg)
    text = write(report, cfg.format, cfg.out)
    if not cfg.out:
        sys.stdout.write(text)
    return 1 if has_errors(report) else 0


def _cmd_validate(args) -> int:
    doc = _load_document(args.metric, args.dim, _params(args.param))
    spec = from_config(doc.get("metric", doc))
    rep = validate(spec, n_samples=args.points, seed=args.seed)
    print(f"metric: {spec.name} (n={spec.dimension}), {rep.n_points} points")
    for name, c in rep.checks.items():
        status = "pass" if c["passed"] else "FAIL"
        print(f"  {name:<18} {status}  failures={c['failures']} worst={c['worst']!r}")
    for idx, reason in rep.excluded:
        print(f"  excluded #{idx}: {reason}")
    return 0 if rep.passed else 1


def _cmd_catalog(fmt: str) -> int:
    if fmt == "json":
        print(json.dumps(CATALOG, indent=2, sort_keys=True))
        return 0
    for entry in CATALOG:
        ex = entry["example"]
        print(f"{entry['id']}" + (f"  (example {ex})" if ex is not None else ""))
        if "params" in entry:
            print(f"    params: {entry['params']}")
        print(f"    expected: {entry['classification']}")
        for name, val in entry["scalars"].items():
            print(f"    {name} = {val}")
    return 0


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        if args.catalog or args.command == "catalog":
            return _cmd_catalog(getattr(args, "format", "text") or "text")
        if args.command == "classify":
            return _cmd_classify(args)
        if args.command == "validate":
            return _cmd_validate(args)
        ap.print_help()
        return 2
    except MetricValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (FinslerError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
