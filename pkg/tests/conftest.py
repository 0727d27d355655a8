"""Shared fixtures: builtin metric presets and seeded sample points."""

import numpy as np
import pytest

from finslercurv import PointFrame, builtin, sample_points

# (family, params) covering every builtin, with a negative and a positive mu
BUILTINS = [
    ("euclidean", {}),
    ("lmu", {"mu": -0.5}),
    ("lmu", {"mu": 1.0}),
    ("funk", {}),
    ("lphi", {"phi": "norm"}),
    ("lphi", {"phi": "ex4"}),
    ("shen", {}),
    ("warped", {"f": "exp", "c": 0.7}),
    ("warped", {"f": "quad"}),
]


def preset_id(p):
    fam, params = p
    return fam + "".join(f"-{k}={v}" for k, v in sorted(params.items()))


def frames(family, n, count, seed=0, field_order=0, extra_x=0, **params):
    spec = builtin(family, n, **params)
    return [PointFrame(spec, x, y, field_order, extra_x) for x, y in sample_points(spec, count, seed)]


def rel_err(a, b):
    a, b = np.asarray(a, float), np.asarray(b, float)
    return float(np.abs(a - b).max() / max(np.abs(b).max(), 1.0))


@pytest.fixture(params=BUILTINS, ids=preset_id)
def preset(request):
    return request.param
