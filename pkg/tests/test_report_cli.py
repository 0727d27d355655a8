import json

import pytest

from finslercurv import builtin
from finslercurv import cli
from finslercurv.errors import ConfigError
from finslercurv.report import RunConfig, dumps_json, loads_json, render_text, run


def _cfg(**kw):
    base = dict(metric=builtin("funk", 3), n_points=3, seed=5, checks=("classify", "perpendicular"))
    base.update(kw)
    return RunConfig(**base)


def test_report_round_trip_byte_identical():
    rep = run(_cfg())
    text = dumps_json(rep)
    assert dumps_json(loads_json(text)) == text
    assert rep["aggregate"]["verdicts"]["hp_scalar"]["label"] == "holds"
    assert rep["metadata"]["seed"] == 5 and len(rep["per_point"]) == 3


def test_workers_preserve_order_and_bytes():
    a = dumps_json(run(_cfg(workers=1)))
    b = dumps_json(run(_cfg(workers=2)))
    assert a == b


def test_text_rendering_mentions_every_verdict():
    rep = run(_cfg())
    text = render_text(rep)
    for name in rep["aggregate"]["verdicts"]:
        assert name in text


@pytest.mark.parametrize("kw", [dict(n_points=0), dict(tolerance=0.0), dict(checks=()),
                                dict(checks=("bogus",)), dict(format="xml"), dict(seed=-1)])
def test_config_validation(kw):
    with pytest.raises(ConfigError):
        _cfg(**kw)


def test_from_mapping():
    cfg = RunConfig.from_mapping({"metric": {"family": "lmu", "dimension": 3, "params": {"mu": 0.5}},
                                  "points": 2, "checks": "classify,ratios", "tol": 1e-7})
    assert cfg.n_points == 2 and cfg.checks == ("classify", "ratios") and cfg.tolerance == 1e-7


def test_cli_classify_json(tmp_path, capsys):
    out = tmp_path / "r.json"
    rc = cli.main(["classify", "--metric", "example1", "--dim", "3", "--param", "mu=0.5",
                   "--points", "2", "--workers", "1", "--out", str(out)])
    assert rc == 0
    rep = json.loads(out.read_text())
    assert rep["aggregate"]["scalars"]["epsilon"]["min"] == pytest.approx(0.5, abs=1e-9)


def test_cli_config_file(tmp_path, capsys):
    cfg = tmp_path / "m.json"
    cfg.write_text(json.dumps({"metric": {"dimension": 2, "expression": "norm(y)"}, "points": 2}))
    rc = cli.main(["classify", "--metric", str(cfg), "--format", "text", "--workers", "1"])
    assert rc == 0
    assert "constant_curvature" in capsys.readouterr().out


def test_cli_exit_codes(tmp_path, capsys):
    assert cli.main(["classify", "--metric", "nope"]) == 2
    assert cli.main(["classify", "--metric", "lmu", "--param", "mu"]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["classify", "--metric", str(bad)]) == 2
    nh = tmp_path / "nh.json"
    nh.write_text(json.dumps({"metric": {"dimension": 2, "expression": "norm2(y)"}}))
    assert cli.main(["validate", "--metric", str(nh)]) == 1
    assert cli.main(["classify", "--metric", str(nh), "--workers", "1"]) == 1
    assert cli.main([]) == 2


def test_cli_catalog(capsys):
    assert cli.main(["catalog", "--format", "json"]) == 0
    ids = {e["id"] for e in json.loads(capsys.readouterr().out)}
    assert {"euclidean", "lmu", "funk", "lphi", "shen", "warped"} <= ids
    assert cli.main(["--catalog"]) == 0
