"""Finsler connection and curvature tensors from jets of ``L(x, y)``, with
classifiers for scalar, constant and H_p-scalar curvature."""

__version__ = "0.1.0"

from .berwald import PointFrame  # noqa: E402
from .cartan import CartanFrame  # noqa: E402
from .classifiers import (  # noqa: E402
    Verdict,
    constant_curvature_test,
    hp_constant_test,
    hp_scalar_test,
    perpendicular_test,
    project,
    ratio_checks,
    scalar_curvature_test,
    thm6_check,
)
from .identities import run_identities, theorem_a_identity  # noqa: E402
from .metric import MetricSpec, builtin, validate  # noqa: E402
from .sampling import sample_points  # noqa: E402
from .tensors import Tensor  # noqa: E402

__all__ = [
    "CartanFrame", "MetricSpec", "PointFrame", "Tensor", "Verdict", "builtin",
    "constant_curvature_test", "hp_constant_test", "hp_scalar_test",
    "perpendicular_test", "project", "ratio_checks", "run_identities", "sample_points",
    "scalar_curvature_test", "theorem_a_identity", "thm6_check", "validate",
]
