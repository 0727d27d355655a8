import numpy as np
import pytest

from finslercurv import CartanFrame, PointFrame, builtin, sample_points
from finslercurv import cartan

from conftest import frames, rel_err


def test_deflection_and_metric_compatibility(preset):
    fam, params = preset
    for fr in frames(fam, 3, 3, seed=8, **params):
        cf = CartanFrame(fr)
        F = cf.cartan_coeffs().data
        assert rel_err(np.einsum("ijk,j->ik", F, fr.y), fr.nonlinear_connection().data) < 1e-10
        g = fr.g_jet.value
        dg = fr.delta(fr.g_jet).value  # dg[i, j, k] = δ_k g_ij
        comp = dg - np.einsum("mik,mj->ijk", F, g) - np.einsum("mjk,im->ijk", F, g)
        assert np.abs(comp).max() < 1e-10 * max(1.0, np.abs(dg).max())


def test_phat_symmetric_and_indicatory(preset):
    fam, params = preset
    for fr in frames(fam, 3, 3, seed=12, **params):
        P = CartanFrame(fr).hv_torsion_hat().data
        scale = max(1.0, np.abs(P).max())
        assert np.abs(P - P.transpose(0, 2, 1)).max() < 1e-11 * scale
        assert np.abs(np.einsum("ijk,j->ik", P, fr.y)).max() < 1e-11 * scale


@pytest.mark.parametrize("mu", [-0.5, 1.0])
def test_riemannian_cartan_equals_berwald(mu):
    for fr in frames("lmu", 3, 3, seed=1, mu=mu):
        cf = CartanFrame(fr)
        assert rel_err(cf.cartan_coeffs().data, fr.berwald_coeffs().data) < 1e-12
        assert np.abs(cf.hv_torsion_hat().data).max() < 1e-12
        assert rel_err(cf.cartan_hcurvature().data, fr.berwald_hcurvature().data) < 1e-10
        assert np.abs(cf.q_tensor().data).max() < 1e-20


def test_relation_to_berwald_curvature(preset):
    fam, params = preset
    for fr in frames(fam, 4, 2, seed=3, **params):
        assert CartanFrame(fr).berwald_cartan_residual() < 1e-10


def test_cartan_curvature_antisymmetric_in_last_pair(preset):
    fam, params = preset
    for fr in frames(fam, 3, 2, seed=5, **params):
        R = CartanFrame(fr).R4_jet.value
        assert np.abs(R + R.transpose(0, 1, 3, 2)).max() < 1e-10 * max(1.0, np.abs(R).max())


def test_q_tensor_symmetries():
    fr = frames("shen", 4, 1, seed=2)[0]
    Q = cartan.q_tensor(CartanFrame(fr)).data
    assert np.abs(Q + Q.transpose(0, 1, 3, 2)).max() < 1e-14
    assert np.abs(np.einsum("xyzw,x->yzw", Q, fr.y)).max() < 1e-12


def _lowered_phat(spec, x, y):
    return CartanFrame(PointFrame(spec, x, y)).Pl_jet.value


@pytest.mark.parametrize("family", ["funk", "shen", "lphi"])
def test_hcov_along_eta_matches_transport_fd(family):
    """(D°_{βη}P̂) equals d/dt P̂ along the horizontal lift of η minus connection terms."""
    spec = builtin(family, 3)
    h = 1e-5
    for x, y in sample_points(spec, 3, 4):
        fr = PointFrame(spec, x, y)
        cf = CartanFrame(fr)
        G, N = fr.spray().data, fr.nonlinear_connection().data
        plus = _lowered_phat(spec, x + h * y, y - 2 * h * G)
        minus = _lowered_phat(spec, x - h * y, y + 2 * h * G)
        dP = (plus - minus) / (2 * h)
        P = cf.Pl_jet.value
        expect = (dP - np.einsum("ea,ebc->abc", N, P) - np.einsum("eb,aec->abc", N, P)
                  - np.einsum("ec,abe->abc", N, P))
        got = cf.berwald_hcov_Phat_along_eta().data
        assert rel_err(got, expect) < 1e-6


def test_cartan_hcov_symmetric_in_last_pair():
    fr = frames("funk", 4, 1, seed=0)[0]
    DP = CartanFrame(fr).cartan_hcov_Phat().data
    assert np.abs(DP - DP.transpose(0, 1, 3, 2)).max() < 1e-12 * max(1.0, np.abs(DP).max())
