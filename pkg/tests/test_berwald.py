import numpy as np
import pytest

from finslercurv import PointFrame, builtin, sample_points
from finslercurv import berwald
from finslercurv.errors import DepthError, DomainError
from finslercurv.metric import F_PRESETS

from conftest import frames, rel_err


@pytest.mark.parametrize("mu", [-0.5, 0.0, 1.0])
def test_lmu_closed_forms(mu):
    n = 4
    I = np.eye(n)
    for fr in frames("lmu", n, 5, seed=11, mu=mu):
        x, y = fr.x, fr.y
        s = 1 + mu * x @ x
        G = -mu * (x @ y) / s * y
        Gjk = -mu * (np.einsum("j,ik->ijk", x, I) + np.einsum("k,ij->ijk", x, I)) / s
        assert rel_err(fr.spray().data, G) < 1e-12
        assert rel_err(fr.berwald_coeffs().data, Gjk) < 1e-12
        g = fr.fundamental_tensor().data
        R0 = mu * (np.einsum("hk,ij->ihjk", g, I) - np.einsum("hj,ik->ihjk", g, I))
        assert rel_err(fr.berwald_hcurvature().data, R0) < 1e-10
        yl = g @ y
        assert rel_err(fr.deviation().data, mu * (fr.L ** 2 * I - np.outer(y, yl))) < 1e-10


@pytest.mark.parametrize("phi", ["norm", "ex4"])
def test_lphi_projective_flat(phi):
    for fr in frames("lphi", 4, 5, seed=2, phi=phi):
        a = np.array(fr.spec.family_params["a"])
        G = -(a @ fr.y) / (1 + a @ fr.x) * fr.y
        assert rel_err(fr.spray().data, G) < 1e-8
        assert np.abs(fr.berwald_hcurvature().data).max() < 1e-9


@pytest.mark.parametrize("f", ["exp", "quad"])
def test_warped_metric_and_connection(f):
    _, F, F1, _ = F_PRESETS[f]
    n = 3
    I = np.eye(n)
    e1 = I[0]
    for fr in frames("warped", n, 4, seed=5, f=f, c=0.7):
        t = fr.x[0]
        fv, phi = F(t, 0.7), F1(t, 0.7) / F(t, 0.7)
        assert rel_err(fr.fundamental_tensor().data, fv ** 2 * I) < 1e-13
        B = phi * (np.einsum("i,hj->hij", e1, I) + np.einsum("j,hi->hij", e1, I) - np.einsum("ij,h->hij", I, e1))
        assert rel_err(fr.berwald_coeffs().data, B) < 1e-12


def test_funk_deviation_trace():
    for fr in frames("funk", 3, 4, seed=0):
        H = fr.deviation().data
        assert np.trace(H) / (fr.L ** 2 * 2) == pytest.approx(-0.25, abs=1e-10)


def test_euler_identities(preset):
    fam, params = preset
    for fr in frames(fam, 3, 3, seed=4, **params):
        y, L = fr.y, fr.L
        g = fr.fundamental_tensor().data
        assert y @ g @ y == pytest.approx(L * L, rel=1e-12)
        assert fr.hilbert_form().data @ y == pytest.approx(L, rel=1e-12)
        assert np.abs(np.einsum("ijk,k->ij", fr.cartan_tensor().data, y)).max() < 1e-10
        hb = fr.angular_metric().data
        assert np.abs(hb @ y).max() < 1e-10 * max(1, np.abs(hb).max())
        h = fr.phi_operator().data
        assert rel_err(h @ h, h) < 1e-12
        assert np.abs(h @ y).max() < 1e-12
        G, N = fr.spray().data, fr.nonlinear_connection().data
        assert rel_err(N @ y, 2 * G) < 1e-11
        assert rel_err(np.einsum("ijk,k->ij", fr.berwald_coeffs().data, y), N) < 1e-11


def test_homogeneity_in_y(preset):
    fam, params = preset
    spec = builtin(fam, 3, **params)
    x, y = sample_points(spec, 1, 9)[0]
    lam = 1.7
    a, b = PointFrame(spec, x, y), PointFrame(spec, x, lam * y)
    for name, deg in [("fundamental_tensor", 0), ("cartan_tensor", -1), ("spray", 2),
                      ("nonlinear_connection", 1), ("berwald_coeffs", 0), ("berwald_hcurvature", 0),
                      ("deviation", 2)]:
        ta, tb = getattr(a, name)().data, getattr(b, name)().data
        assert rel_err(tb, lam ** deg * ta) < 1e-10, name


def test_deviation_against_spray_formula(preset):
    fam, params = preset
    for fr in frames(fam, 4, 2, seed=6, **params):
        assert rel_err(fr.deviation().data, fr.deviation_direct().data) < 1e-10


def test_quadrilinear_slot_convention():
    # R(X,Y,Z,W) = g(R(X,Y)Z, W) with constant curvature mu gives mu(g(X,Z)g(Y,W) - g(Y,Z)g(X,W))
    mu = 0.8
    fr = frames("lmu", 3, 1, seed=1, mu=mu)[0]
    g = fr.fundamental_tensor().data
    expect = mu * (np.einsum("xz,yw->xyzw", g, g) - np.einsum("yz,xw->xyzw", g, g))
    assert rel_err(fr.quadrilinear().data, expect) < 1e-10


def test_cache_reproducible_bitwise():
    spec = builtin("shen", 3)
    x, y = sample_points(spec, 1, 0)[0]
    a, b = PointFrame(spec, x, y), PointFrame(spec, x, y)
    assert np.array_equal(a.berwald_hcurvature().data, b.berwald_hcurvature().data)
    assert np.array_equal(a.berwald_hcurvature().data, a.berwald_hcurvature().data)


def test_frame_errors():
    spec = builtin("funk", 2)
    with pytest.raises(DomainError):
        PointFrame(spec, [2.0, 0.0], [1.0, 0.0])
    with pytest.raises(DomainError):
        PointFrame(spec, [0.0, 0.0], [0.0, 0.0])
    with pytest.raises(DomainError):
        PointFrame(spec, [0.0, 0.0, 0.0], [1.0, 0.0])
    with pytest.raises(DepthError):
        PointFrame(spec, [0.0, 0.0], [1.0, 0.0]).require(field_order=2, what="B^k")


def test_module_level_accessors():
    fr = frames("euclidean", 2, 1)[0]
    assert berwald.fundamental_tensor(fr).variance == "ll"
    assert berwald.deviation(fr).variance == "ul"
    assert np.allclose(berwald.spray(fr).data, 0.0)
