import numpy as np
import pytest

from finslercurv import builtin, sample_points, validate
from finslercurv.errors import BadParameter, ConfigError, DomainError, SamplingExhausted
from finslercurv.metric import Domain, MetricSpec, from_config, loads

from conftest import BUILTINS, preset_id


@pytest.mark.parametrize("preset", BUILTINS, ids=preset_id)
def test_builtins_validate(preset):
    fam, params = preset
    for n in (2, 3, 4):
        rep = validate(builtin(fam, n, **params), n_samples=12, seed=3)
        assert rep.passed, rep.checks
        assert not rep.excluded


@pytest.mark.parametrize("preset", BUILTINS, ids=preset_id)
def test_config_round_trip(preset):
    fam, params = preset
    spec = builtin(fam, 3, **params)
    again = loads(spec.dumps())
    assert again.dumps() == spec.dumps()
    x, y = sample_points(spec, 1, 0)[0]
    assert again.value(x, y) == spec.value(x, y)


def test_expression_config_round_trip():
    cfg = {"name": "randers", "dimension": 2, "expression": "norm(y) + dot(b, y)",
           "params": {"b": [0.2, -0.1]}, "domain": {"x_radius": 2.0}}
    spec = from_config(cfg)
    assert loads(spec.dumps()).dumps() == spec.dumps()
    assert spec.value([0, 0], [3, 4]) == pytest.approx(5.0 + 0.6 - 0.4)
    assert validate(spec, 8, 0).passed


def test_bad_configs():
    with pytest.raises(ConfigError):
        from_config({"family": "funk"})
    with pytest.raises(ConfigError):
        from_config({"dimension": 2, "expression": "norm(y) +"})
    with pytest.raises(BadParameter):
        builtin("lphi", 3, a=(0.0, 0.0, 0.0))
    with pytest.raises(BadParameter):
        builtin("warped", 3, f="cosh")
    with pytest.raises(BadParameter):
        builtin("shen", 3, a=(1.0, 2.0))


def test_validation_detects_non_homogeneous_and_indefinite():
    bad = from_config({"dimension": 2, "expression": "norm2(y)"})
    assert not validate(bad, 8, 0).checks["homogeneity"]["passed"]
    indef = from_config({"dimension": 2, "expression": "sqrt(y1^2 + 3*y1*y2 + y2^2 + 10)"})
    assert not validate(indef, 16, 0).passed


def test_domains():
    spec = builtin("funk", 3)
    with pytest.raises(DomainError):
        spec.value([1.0, 0.0, 0.0], [1.0, 0.0, 0.0])
    lp = builtin("lphi", 2, a=(1.0, 0.0), phi="norm")
    with pytest.raises(DomainError):
        lp.value([0.0, 0.0], [-1.0, 0.5])


def test_sampling_is_deterministic():
    spec = builtin("euclidean", 4)
    a = sample_points(spec, 4, 42)
    b = sample_points(spec, 4, 42)
    assert len(a) == 4
    assert all(np.array_equal(p[0], q[0]) and np.array_equal(p[1], q[1]) for p, q in zip(a, b))


@pytest.mark.parametrize("family, params, radius", [("lmu", {"mu": -1.0}, 1.0), ("funk", {}, 1.0), ("shen", {}, None)])
def test_samples_respect_domain(family, params, radius):
    spec = builtin(family, 4, **params)
    pts = sample_points(spec, 32, 7)
    r = radius if radius is not None else spec.domain.x_radius
    for x, y in pts:
        assert np.linalg.norm(x) < r
        assert 0.5 <= np.linalg.norm(y) <= 2.0


def test_samples_avoid_halfspace_margin():
    spec = builtin("lphi", 4)
    a = np.array(spec.family_params["a"])
    for _, y in sample_points(spec, 32, 1):
        assert a @ y > 0.1


def test_sampling_exhausted():
    spec = MetricSpec("thin", 2, "norm(y)", domain=Domain(y_halfspace=(1.0, 0.0), y_margin=5.0))
    with pytest.raises(SamplingExhausted):
        sample_points(spec, 2, 0)
