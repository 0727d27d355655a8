"""Finsler fundamental functions: builtin families, custom expressions, validation."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping

import numpy as np

from . import dsl, jets
from .errors import BadParameter, ConfigError, DomainError, FinslerError


@dataclass(frozen=True)
class Domain:
    """Where a metric may be evaluated and where points are sampled.

    ``x_radius`` bounds ``|x|`` (strictly); ``y_halfspace`` is a vector ``w``
    with ``<w, y> > 0`` required.  Sampling stays inside ``sample_fraction``
    of a finite radius (or ``sample_radius`` for unbounded domains) and keeps
    ``<w, y> > y_margin``.
    """

    x_radius: float = math.inf
    y_halfspace: tuple | None = None
    sample_radius: float = 1.0
    sample_fraction: float = 0.8
    y_margin: float = 0.1

    def check(self, x, y):
        x = np.asarray(x, float)
        y = np.asarray(y, float)
        if not np.any(y):
            raise DomainError("y must be non-zero")
        if not np.linalg.norm(x) < self.x_radius:
            raise DomainError(f"|x| = {np.linalg.norm(x):.6g} is not below {self.x_radius:.6g}")
        if self.y_halfspace is not None and not np.dot(self.y_halfspace, y) > 0:
            raise DomainError("y lies outside the half-space <w, y> > 0")

    def contains(self, x, y) -> bool:
        try:
            self.check(x, y)
        except DomainError:
            return False
        return True

    @property
    def sampling_radius(self) -> float:
        if math.isinf(self.x_radius):
            return self.sample_radius
        return min(self.sample_fraction * self.x_radius, self.sample_radius)

    def to_dict(self) -> dict:
        return {
            "x_radius": None if math.isinf(self.x_radius) else self.x_radius,
            "y_halfspace": None if self.y_halfspace is None else list(self.y_halfspace),
            "sample_radius": self.sample_radius,
            "sample_fraction": self.sample_fraction,
            "y_margin": self.y_margin,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "Domain":
        r = d.get("x_radius")
        hs = d.get("y_halfspace")
        return cls(
            x_radius=math.inf if r is None else float(r),
            y_halfspace=None if hs is None else tuple(float(v) for v in hs),
            sample_radius=float(d.get("sample_radius", 1.0)),
            sample_fraction=float(d.get("sample_fraction", 0.8)),
            y_margin=float(d.get("y_margin", 0.1)),
        )


@dataclass(frozen=True)
class MetricSpec:
    """A Finsler fundamental function ``L(x, y)`` on an ``n``-dimensional domain."""

    name: str
    dimension: int
    source: str
    params: dict = field(default_factory=dict)
    domain: Domain = Domain()
    family: str | None = None
    family_params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.dimension < 2:
            raise BadParameter("dimension must be at least 2")

    @cached_property
    def program(self) -> dsl.Program:
        return dsl.parse(self.source, self.dimension, self.params)

    def __call__(self, x, y):
        return dsl.evaluate(self.program, x, y, self.params)

    def lift(self, x, y, x_order: int, y_order: int) -> jets.Jet:
        return jets.lift(self, (x, y), (x_order, y_order), domain=self.domain)

    def value(self, x, y) -> float:
        self.domain.check(x, y)
        return float(self(list(np.asarray(x, float)), list(np.asarray(y, float))))

    # -- config round trip ---------------------------------------------
    def to_config(self) -> dict:
        if self.family is not None:
            return {
                "name": self.name,
                "dimension": self.dimension,
                "family": self.family,
                "params": _jsonable(self.family_params),
            }
        return {
            "name": self.name,
            "dimension": self.dimension,
            "expression": dsl.unparse(self.program),
            "params": _jsonable(self.params),
            "domain": self.domain.to_dict(),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_config(), sort_keys=True, indent=2)


def _jsonable(params: Mapping) -> dict:
    return {k: list(v) if isinstance(v, (list, tuple)) else v for k, v in sorted(params.items())}


def from_config(cfg: Mapping) -> MetricSpec:
    try:
        n = int(cfg["dimension"])
    except (KeyError, TypeError, ValueError):
        raise ConfigError("metric config needs an integer 'dimension'") from None
    params = dict(cfg.get("params", {}))
    if "family" in cfg:
        spec = builtin(cfg["family"], n, **params)
        name = cfg.get("name")
        if name and name != spec.name:
            spec = MetricSpec(name, n, spec.source, spec.params, spec.domain, spec.family, spec.family_params)
        return spec
    if "expression" not in cfg:
        raise ConfigError("metric config needs 'family' or 'expression'")
    params = {k: tuple(v) if isinstance(v, list) else float(v) for k, v in params.items()}
    spec = MetricSpec(
        name=cfg.get("name", "custom"),
        dimension=n,
        source=cfg["expression"],
        params=params,
        domain=Domain.from_dict(cfg.get("domain", {})),
    )
    try:
        spec.program
    except FinslerError as exc:
        raise ConfigError(f"bad metric expression: {exc}") from exc
    return spec


def loads(text: str) -> MetricSpec:
    return from_config(json.loads(text))


# -- builtin families ----------------------------------------------------

_SOURCES = {
    "euclidean": "sqrt(dot(y, y))",
    "lmu": "sqrt(dot(y, y) + mu*(dot(x, x)*dot(y, y) - dot(x, y)^2)) / (1 + mu*dot(x, x))",
    "funk": "(sqrt(dot(y, y) - (dot(x, x)*dot(y, y) - dot(x, y)^2)) + dot(x, y)) / (1 - dot(x, x))",
    "lphi": """
        s = 1 + dot(a, x)
        ay = dot(a, y)
        z = (s*y - ay*x) / ay
        ay / s^2 * {phi}
    """,
    "shen": """
        aa = dot(a, a)
        xx = dot(x, x)
        d = 1 - aa*xx^2
        b = xx*dot(a, y) - 2*dot(a, x)*dot(x, y)
        (sqrt(d*dot(y, y) + b^2) - b) / d
    """,
    "warped": "{f} * norm(y)",
}

PHI_PRESETS = {
    "ex4": "sqrt(norm2(z) + exp(-norm2(z)))",
    "norm": "norm(z)",
}

# f, f', f'' for the warped-product presets (t = x1)
F_PRESETS = {
    "exp": (
        "exp(c*x1)",
        lambda t, c: math.exp(c * t),
        lambda t, c: c * math.exp(c * t),
        lambda t, c: c * c * math.exp(c * t),
    ),
    "quad": (
        "(1 + x1^2)",
        lambda t, c: 1 + t * t,
        lambda t, c: 2 * t,
        lambda t, c: 2.0,
    ),
}

_DEFAULT_A = (0.5, 0.3, -0.2, 0.1, 0.15, -0.1, 0.05, 0.2)


def default_a(n: int) -> tuple:
    return tuple(_DEFAULT_A[i % len(_DEFAULT_A)] for i in range(n))


def _vector(name, v, n):
    try:
        v = tuple(float(c) for c in v)
    except TypeError:
        raise BadParameter(f"parameter {name!r} must be a vector") from None
    if len(v) != n:
        raise BadParameter(f"parameter {name!r} must have length {n}")
    return v


def builtin(family: str, n: int, **params) -> MetricSpec:
    """Metric of one of the builtin families (see :data:`CATALOG`)."""
    fam = FAMILY_ALIASES.get(family, family)
    if family in ("example3", "example4"):
        params = {"phi": "norm" if family == "example3" else "ex4", **params}
    if fam == "euclidean":
        return MetricSpec("euclidean", n, _SOURCES["euclidean"], family="euclidean")
    if fam == "lmu":
        mu = float(params.get("mu", 1.0))
        radius = 1 / math.sqrt(-mu) if mu < 0 else math.inf
        return MetricSpec(
            f"lmu(mu={mu!r})", n, _SOURCES["lmu"], {"mu": mu}, Domain(x_radius=radius),
            family="lmu", family_params={"mu": mu},
        )
    if fam == "funk":
        return MetricSpec("funk", n, _SOURCES["funk"], domain=Domain(x_radius=1.0), family="funk")
    if fam == "lphi":
        a = _vector("a", params.get("a", default_a(n)), n)
        phi = params.get("phi", "ex4")
        if phi not in PHI_PRESETS:
            raise BadParameter(f"unknown phi preset {phi!r}; choose from {sorted(PHI_PRESETS)}")
        norm_a = math.sqrt(sum(c * c for c in a))
        if norm_a == 0:
            raise BadParameter("a must be non-zero")
        return MetricSpec(
            f"lphi(phi={phi})", n, _SOURCES["lphi"].format(phi=PHI_PRESETS[phi]), {"a": a},
            Domain(x_radius=1 / norm_a, y_halfspace=a),
            family="lphi", family_params={"a": a, "phi": phi},
        )
    if fam == "shen":
        a = _vector("a", params.get("a", default_a(n)), n)
        norm_a = math.sqrt(sum(c * c for c in a))
        if norm_a == 0:
            raise BadParameter("a must be non-zero")
        return MetricSpec(
            "shen", n, _SOURCES["shen"], {"a": a}, Domain(x_radius=1 / math.sqrt(norm_a)),
            family="shen", family_params={"a": a},
        )
    if fam == "warped":
        f = params.get("f", "exp")
        if f not in F_PRESETS:
            raise BadParameter(f"unknown f preset {f!r}; choose from {sorted(F_PRESETS)}")
        c = float(params.get("c", 1.0))
        fparams = {"c": c} if f == "exp" else {}
        fp = {"f": f, "c": c} if f == "exp" else {"f": f}
        return MetricSpec(
            f"warped(f={f})", n, _SOURCES["warped"].format(f=F_PRESETS[f][0]), fparams,
            family="warped", family_params=fp,
        )
    raise BadParameter(f"unknown metric family {family!r}; see `catalog`")


FAMILY_ALIASES = {
    "example1": "lmu",
    "example2": "funk",
    "example3": "lphi",
    "example4": "lphi",
    "example5": "shen",
    "example6": "warped",
}


CATALOG = [
    {
        "id": "euclidean", "example": None,
        "classification": "flat: constant curvature 0, H_p-constant 0",
        "scalars": {"k": "0", "epsilon": "0"},
    },
    {
        "id": "lmu", "example": 1, "params": "mu (real)",
        "classification": "Riemannian, constant curvature mu, H_p-constant mu",
        "scalars": {"k": "mu", "epsilon": "mu"},
    },
    {
        "id": "funk", "example": 2,
        "classification": "constant curvature -1/4, H_p-constant -1/4",
        "scalars": {"k": "-1/4", "epsilon": "-1/4"},
    },
    {
        "id": "lphi", "example": "3 (phi=norm), 4 (phi=ex4)", "params": "a (vector), phi in {ex4, norm}",
        "classification": "zero constant curvature, vanishing H_p-scalar curvature",
        "scalars": {"k": "0", "epsilon": "0"},
    },
    {
        "id": "shen", "example": 5, "params": "a (vector)",
        "classification": "scalar (non-constant) curvature, H_p-scalar curvature",
        "scalars": {
            "k": "3<a,y>/F + 3<a,x>^2 - 2|a|^2|x|^2",
            "epsilon": "2<a,y>/F + 3<a,x>^2 - 2|a|^2|x|^2",
        },
    },
    {
        "id": "warped", "example": 6, "params": "f in {exp (with c), quad}",
        "classification": (
            "n=2: scalar curvature (f'^2 - f f'')/f^4, epsilon = 0, not constant; "
            "n=3: not scalar curvature, H_p-scalar curvature"
        ),
        "scalars": {
            "k (n=2)": "(f'^2 - f f'')/f^4",
            "epsilon (n=3)": "-(phi'((y2)^2+(y3)^2) + phi^2 (y1)^2)/L^2, phi = f'/f",
        },
    },
]


# -- validation ----------------------------------------------------------

@dataclass
class ValidationReport:
    spec_name: str
    checks: dict  # check name -> {"passed": bool, "failures": int, "worst": float}
    excluded: list  # (point index, reason)
    n_points: int

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks.values())


def fundamental_tensor_at(spec: MetricSpec, x, y) -> np.ndarray:
    L = spec.lift(x, y, 0, 2)
    return 0.5 * (L * L).grad_y().grad_y().value


def validate(spec: MetricSpec, n_samples: int = 32, seed: int = 0, points=None) -> ValidationReport:
    """Check positivity, 1-homogeneity and positive-definiteness of ``g`` on samples."""
    from .sampling import sample_points

    if points is None:
        points = sample_points(spec, n_samples, seed)
    stats = {k: {"passed": True, "failures": 0, "worst": 0.0} for k in ("positivity", "homogeneity", "positive_definite")}
    excluded = []

    def record(name, ok, worst):
        s = stats[name]
        s["worst"] = max(s["worst"], worst)
        if not ok:
            s["passed"] = False
            s["failures"] += 1

    for idx, (x, y) in enumerate(points):
        x = np.asarray(x, float)
        y = np.asarray(y, float)
        try:
            spec.domain.check(x, y)
            Lv = spec.value(x, y)
            record("positivity", Lv > 0, 0.0 if Lv > 0 else -Lv)
            worst = 0.0
            for lam in (0.5, 2.0, 3.0):
                err = abs(spec.value(x, lam * y) - lam * Lv) / max(abs(lam * Lv), 1e-300)
                worst = max(worst, err)
            record("homogeneity", worst <= 1e-10, worst)
            eig = np.linalg.eigvalsh(fundamental_tensor_at(spec, x, y))
            record("positive_definite", eig.min() > 0, float(-eig.min()) if eig.min() <= 0 else 0.0)
        except FinslerError as exc:
            excluded.append((idx, f"{type(exc).__name__}: {exc}"))
    return ValidationReport(spec.name, stats, excluded, len(points))
