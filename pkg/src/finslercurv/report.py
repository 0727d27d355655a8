"""Batch runs over sampled points and the report they produce.

The machine format is a single JSON document (schema version ``"1"``)
with floats in shortest round-trip form, keys sorted and fixed
indentation, so identical runs give byte-identical files.  The text format
is rendered from the same document.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from . import classifiers as cl
from . import identities as ids
from .berwald import PointFrame
from .errors import ConfigError, FinslerError, MetricValidationError
from .metric import MetricSpec, from_config, validate
from .sampling import sample_points

SCHEMA_VERSION = "1"
CHECK_IDS = ("classify", "identities", "theorem_a", "perpendicular", "ratios")

HOLDS, FAILS, SKIPPED, ERROR = "holds", "fails", "skipped", "error"


@dataclass
class RunConfig:
    metric: MetricSpec
    n_points: int = 16
    seed: int = 0
    tolerance: float = cl.DEFAULT_TOL
    checks: tuple = ("classify",)
    format: str = "json"
    out: str | None = None
    workers: int | None = 1

    def __post_init__(self):
        if int(self.n_points) < 1:
            raise ConfigError("n_points must be at least 1")
        if not self.tolerance > 0:
            raise ConfigError("tolerance must be positive")
        if int(self.seed) < 0:
            raise ConfigError("seed must be non-negative")
        unknown = set(self.checks) - set(CHECK_IDS)
        if unknown:
            raise ConfigError(f"unknown checks {sorted(unknown)}; choose from {list(CHECK_IDS)}")
        checks = tuple(c for c in CHECK_IDS if c in set(self.checks))
        if not checks:
            raise ConfigError("at least one check is required")
        if self.format not in ("json", "text"):
            raise ConfigError("format must be 'json' or 'text'")
        self.checks = checks
        self.n_points = int(self.n_points)
        self.seed = int(self.seed)
        self.tolerance = float(self.tolerance)

    @classmethod
    def from_mapping(cls, d: dict) -> "RunConfig":
        """Build from a config document: metric keys plus optional run keys."""
        d = dict(d)
        run_keys = {"points": "n_points", "n_points": "n_points", "seed": "seed",
                    "tolerance": "tolerance", "tol": "tolerance", "checks": "checks",
                    "format": "format", "out": "out", "workers": "workers"}
        kwargs = {}
        for k, attr in run_keys.items():
            if k in d:
                kwargs[attr] = d.pop(k)
        if isinstance(kwargs.get("checks"), str):
            kwargs["checks"] = tuple(c for c in kwargs["checks"].split(",") if c)
        metric_cfg = d.pop("metric", d)
        if isinstance(metric_cfg, str):
            metric_cfg = {"family": metric_cfg, "dimension": d.get("dimension", 4), "params": d.get("params", {})}
        return cls(metric=from_config(metric_cfg), **kwargs)


# (field_order, extra_x) each check needs; checks are run on the shallowest
# frame that serves them since jet cost grows steeply with depth
CHECK_DEPTH = {
    "classify": (2, 1),
    "identities": (2, 0),
    "theorem_a": (2, 0),
    "perpendicular": (0, 0),
    "ratios": (3, 0),
}


def frame_depth(checks) -> tuple[int, int]:
    """Smallest single (field_order, extra_x) serving every check in ``checks``."""
    depths = [CHECK_DEPTH[c] for c in checks] or [(0, 0)]
    return max(d[0] for d in depths), max(d[1] for d in depths)


# -- per point ------------------------------------------------------------

def _vd(v):
    return {"label": SKIPPED, "reason": "hypothesis not met"} if v is None else v.to_dict()


def _classify(frame, tol):
    out, scalars = {}, {}
    sc = cl.scalar_curvature_test(frame, tol)
    hp = cl.hp_scalar_test(frame, tol)
    out["scalar_curvature"] = sc.to_dict()
    out["hp_scalar"] = hp.to_dict()
    scalars["k"] = cl.k_jet(frame).value
    scalars["epsilon"] = cl.eps_jet(frame).value
    const = cl.constant_curvature_test(frame, tol)
    hpc = cl.hp_constant_test(frame, tol)
    out["constant_curvature"] = const.to_dict()
    out["hp_constant"] = hpc.to_dict()
    if sc.holds:
        out["thm6"] = cl.thm6_check(frame, tol).to_dict()
        ff = cl.f_form_test(frame, tol)
        nf = cl.n_form_test(frame, tol)
        out["f_form"] = ff.to_dict()
        out["n_form"] = nf.to_dict()
        # 𝒫·F = 0 and constant curvature agree in dimension >= 3; 𝒫·N = 0 and ε = 0 always
        eps0 = abs(scalars["epsilon"]) <= tol * max(1.0, abs(scalars["k"]))
        agree_n = nf.holds == (hp.holds and eps0)
        out["n_form_equivalence"] = {"label": HOLDS if agree_n else FAILS}
        if frame.n >= 3:
            out["f_form_equivalence"] = {"label": HOLDS if ff.holds == const.holds else FAILS}
        if hp.holds and frame.n >= 3:
            eq = abs(scalars["epsilon"] - scalars["k"]) <= tol * max(1.0, abs(scalars["k"]))
            four = [eq, const.holds, hpc.holds, ff.holds]
            out["thm8_agreement"] = {"label": HOLDS if len(set(four)) == 1 else FAILS,
                                     "members": [bool(b) for b in four]}
    else:
        for name in ("thm6", "f_form", "n_form"):
            out[name] = _vd(None)
    return out, scalars


def evaluate_point(spec: MetricSpec, x, y, checks, tol: float) -> dict:
    """All requested checks at one point; frame errors mark the point skipped."""
    rec = {"x": [float(v) for v in x], "y": [float(v) for v in y]}
    frames = {}
    try:
        for depth in sorted({CHECK_DEPTH[c] for c in checks}):
            frames[depth] = PointFrame(spec, x, y, field_order=depth[0], extra_x=depth[1])
            frames[depth].L_jet
    except FinslerError as exc:
        rec["skipped"] = f"{type(exc).__name__}: {exc}"
        return rec
    verdicts, scalars = {}, {}
    for check in checks:
        frame = frames[CHECK_DEPTH[check]]
        try:
            if check == "classify":
                v, s = _classify(frame, tol)
                verdicts.update(v)
                scalars.update(s)
            elif check == "identities":
                names = [n for n in ids.ALL if n not in ("theorem_a", "symmetric_part_along_eta", "projected_skew_zw")]
                for name, v in ids.run_identities(frame, names, tol).items():
                    verdicts[f"identity_{name}"] = _vd(v)
            elif check == "theorem_a":
                for name, v in ids.run_identities(frame, ("theorem_a", "symmetric_part_along_eta", "projected_skew_zw"), tol).items():
                    verdicts[f"identity_{name}"] = _vd(v)
            elif check == "perpendicular":
                hp = cl.hp_scalar_test(frame, tol)
                if hp.holds:
                    v = cl.perpendicular_test(frame, tol)
                    verdicts["perpendicular"] = v.to_dict()
                    scalars["q"] = v.details["q"]
                    scalars["rho"] = v.details["rho"]
                else:
                    verdicts["perpendicular"] = _vd(None)
            elif check == "ratios":
                ok = cl.scalar_curvature_test(frame, tol).holds and cl.hp_scalar_test(frame, tol).holds
                if ok:
                    for name, v in cl.ratio_checks(frame, tol).items():
                        verdicts[f"ratio_{name}"] = v.to_dict()
                else:
                    for name in ("C", "B", "A"):
                        verdicts[f"ratio_{name}"] = _vd(None)
        except FinslerError as exc:
            verdicts[f"{check}_error"] = {"label": ERROR, "reason": f"{type(exc).__name__}: {exc}"}
    rec["verdicts"] = verdicts
    rec["scalars"] = scalars
    return rec


def _eval_star(args):
    return evaluate_point(*args)


# -- aggregate and run ------------------------------------------------------

def aggregate(points: list) -> dict:
    agg_v = {}
    names = sorted({k for p in points for k in p.get("verdicts", {})})
    for name in names:
        labels = [p["verdicts"][name]["label"] for p in points if name in p.get("verdicts", {})]
        active = [lab for lab in labels if lab != SKIPPED]
        if ERROR in active:
            lab = ERROR
        elif not active:
            lab = SKIPPED
        else:
            lab = HOLDS if all(a == HOLDS for a in active) else FAILS
        worst = max(
            (p["verdicts"][name].get("residual", 0.0) for p in points
             if name in p.get("verdicts", {}) and "residual" in p["verdicts"][name]),
            default=0.0,
        )
        agg_v[name] = {"label": lab, "points": len(active), "worst_residual": worst}
    scal = {}
    for name in sorted({k for p in points for k in p.get("scalars", {})}):
        vals = [p["scalars"][name] for p in points if name in p.get("scalars", {})]
        scal[name] = {"min": min(vals), "max": max(vals)}
    skipped = [{"index": i, "reason": p["skipped"]} for i, p in enumerate(points) if "skipped" in p]
    return {"verdicts": agg_v, "scalars": scal, "skipped": skipped}


def run(config: RunConfig) -> dict:
    """Validate the metric, sample points, run the checks and build the report document."""
    spec = config.metric
    vr = validate(spec, n_samples=min(32, max(config.n_points, 8)), seed=config.seed)
    if not vr.passed:
        failed = [k for k, c in vr.checks.items() if not c["passed"]]
        raise MetricValidationError(f"{spec.name} fails validation: {', '.join(failed)}")
    pts = sample_points(spec, config.n_points, config.seed)
    jobs = [(spec, x, y, config.checks, config.tolerance) for x, y in pts]
    workers = config.workers if config.workers is not None else (os.cpu_count() or 1)
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as ex:
            per_point = list(ex.map(_eval_star, jobs))  # map preserves input order
    else:
        per_point = [_eval_star(j) for j in jobs]
    for i, p in enumerate(per_point):
        p["index"] = i
    return {
        "schema_version": SCHEMA_VERSION,
        "metadata": {
            "metric": spec.to_config(),
            "spec_name": spec.name,
            "dimension": spec.dimension,
            "seed": config.seed,
            "n_points": config.n_points,
            "tolerance": config.tolerance,
            "checks": list(config.checks),
            "tool_version": __version__,
            "note": "verdicts are sample-based: they hold at the listed points only",
        },
        "per_point": per_point,
        "aggregate": aggregate(per_point),
    }


def has_errors(report: dict) -> bool:
    return any(v["label"] == ERROR for v in report["aggregate"]["verdicts"].values())


# -- serialization ----------------------------------------------------------

def _canon(obj):
    if isinstance(obj, dict):
        return {str(k): _canon(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canon(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def dumps_json(report: dict) -> str:
    """Canonical JSON: sorted keys, 2-space indent, shortest round-trip floats."""
    return json.dumps(_canon(report), sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def loads_json(text: str) -> dict:
    return json.loads(text)


def render_text(report: dict) -> str:
    md = report["metadata"]
    agg = report["aggregate"]
    lines = [
        f"metric: {md['spec_name']} (n={md['dimension']})",
        f"points: {md['n_points']}  seed: {md['seed']}  tolerance: {_num(md['tolerance'])}",
        f"checks: {', '.join(md['checks'])}",
        "",
        "aggregate verdicts:",
    ]
    width = max((len(k) for k in agg["verdicts"]), default=0)
    for name, v in agg["verdicts"].items():
        lines.append(f"  {name:<{width}}  {v['label']:<8} points={v['points']} "
                     f"worst_residual={_num(v['worst_residual'])}")
    if agg["scalars"]:
        lines.append("")
        lines.append("scalars (min .. max):")
        for name, s in agg["scalars"].items():
            lines.append(f"  {name}: {_num(s['min'])} .. {_num(s['max'])}")
    if agg["skipped"]:
        lines.append("")
        lines.append("skipped points:")
        for s in agg["skipped"]:
            lines.append(f"  #{s['index']}: {s['reason']}")
    lines.append("")
    lines.append(md["note"])
    return "\n".join(lines) + "\n"


def _num(v) -> str:
    return repr(float(v))


def write(report: dict, fmt: str = "json", path: str | None = None) -> str:
    text = dumps_json(report) if fmt == "json" else render_text(report)
    if path:
        try:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write report to {path}: {exc}") from exc
    return text
