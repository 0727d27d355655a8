"""Cartan-side quantities built on a :class:`~finslercurv.berwald.PointFrame`.

Array layouts:

* ``F[i, j, k]`` = F^i_{jk}
* ``Phat[i, j, k]`` = P̂^i_{jk} = G^i_{jk} - F^i_{jk}
* ``Pl[x, y, z]`` = P̂(X, Y, Z) = g(P̂(X, Y), Z) = g_{za} P̂^a_{xy}
* ``R[i, h, j, k]`` = R^i_{h jk} (same slot reading as the Berwald R°)
* ``Q[x, y, z, w]`` = g(P̂(X, W), P̂(Y, Z)) - g(P̂(X, Z), P̂(Y, W))
* ``DPl[m, x, z, w]`` = (D°_{β∂m} P̂)(X, Z, W), Berwald horizontal derivative
* ``DPhat[m, i, y, z]`` = (∇_{β∂m} P̂)^i_{yz}, Cartan horizontal derivative
"""

from __future__ import annotations

from functools import cached_property

import numpy as np

from .berwald import PointFrame
from .jets import Jet, contract
from .tensors import Tensor

# Sign of the T·R̂ term in the local Cartan h-curvature.  With R̂^m_{jk} =
# y^h R°^m_{h jk} this sign makes the Berwald-Cartan relation hold exactly.
_T_RHAT_SIGN = 1.0


class CartanFrame:
    """Cartan connection data sharing the jets of a base :class:`PointFrame`."""

    def __init__(self, base: PointFrame):
        self.base = base
        self.n = base.n

    def __repr__(self):
        return f"CartanFrame({self.base!r})"

    # -- jets -----------------------------------------------------------
    @cached_property
    def F_jet(self) -> Jet:
        b = self.base
        dg = b.delta(b.g_jet)  # dg[s, k, j] = δ_j g_{sk}
        br = dg + dg.transpose(1, 2, 0) - dg.transpose(2, 1, 0)
        # br[s, k, j] = δ_j g_sk + δ_k g_js - δ_s g_jk
        return contract("is,skj->ijk", b.ginv_jet, br) * 0.5

    @cached_property
    def Phat_jet(self) -> Jet:
        return self.base.B_jet - self.F_jet

    @cached_property
    def Pl_jet(self) -> Jet:
        return contract("za,axy->xyz", self.base.g_jet, self.Phat_jet)

    @cached_property
    def Tmix_jet(self) -> Jet:
        """T^i_{jk} = g^{ia} T_{ajk}."""
        b = self.base
        return contract("ia,ajk->ijk", b.ginv_jet, b.T_jet)

    @cached_property
    def R_jet(self) -> Jet:
        F = self.F_jet
        dF = self.base.delta(F)  # dF[i, h, k, j] = δ_j F^i_{hk}
        a = dF.transpose(0, 1, 3, 2) + contract("imj,mhk->ihjk", F, F)
        r = a - a.transpose(0, 1, 3, 2)
        return r + contract("ihm,mjk->ihjk", self.Tmix_jet, self.base.Rhat_jet) * _T_RHAT_SIGN

    @cached_property
    def R4_jet(self) -> Jet:
        """Cartan quadrilinear form, same slot reading as the Berwald one."""
        return contract("di,icba->abcd", self.base.g_jet, self.R_jet)

    @cached_property
    def Q_jet(self) -> Jet:
        g, P = self.base.g_jet, self.Phat_jet
        gp = contract("ab,axw->bxw", g, P)  # g_{ab} P̂^a_{xw}
        t = contract("bxw,byz->xyzw", gp, P)
        return t - t.transpose(0, 1, 3, 2)

    @cached_property
    def DPl_jet(self) -> Jet:
        b = self.base
        Pl, B = self.Pl_jet, b.B_jet
        d = b.delta(Pl).transpose(3, 0, 1, 2)  # d[m, x, z, w] = δ_m Pl_xzw
        t1 = contract("emx,ezw->mxzw", B, Pl)
        t2 = contract("emz,xew->mxzw", B, Pl)
        t3 = contract("emw,xze->mxzw", B, Pl)
        return d - t1 - t2 - t3

    @cached_property
    def DPl_eta_jet(self) -> Jet:
        return contract("m,mxzw->xzw", self.base.y_jet, self.DPl_jet)

    @cached_property
    def DPhat_jet(self) -> Jet:
        F, P = self.F_jet, self.Phat_jet
        d = self.base.delta(P).transpose(3, 0, 1, 2)  # d[m, i, y, z] = δ_m P̂^i_yz
        t1 = contract("ime,eyz->miyz", F, P)
        t2 = contract("emy,iez->miyz", F, P)
        t3 = contract("emz,iye->miyz", F, P)
        return d + t1 - t2 - t3

    # -- public accessors ---------------------------------------------
    def _t(self, jet: Jet, variance: str) -> Tensor:
        return Tensor(np.asarray(jet.value, dtype=float), variance)

    def cartan_coeffs(self) -> Tensor:
        return self._t(self.F_jet, "ull")

    def hv_torsion_hat(self) -> Tensor:
        return self._t(self.Phat_jet, "ull")

    def hv_torsion_hat_lowered(self) -> Tensor:
        return self._t(self.Pl_jet, "lll")

    def cartan_hcurvature(self) -> Tensor:
        return self._t(self.R_jet, "ulll")

    def q_tensor(self) -> Tensor:
        return self._t(self.Q_jet, "llll")

    def berwald_hcov_Phat(self) -> Tensor:
        """``(D°_{β∂m} P̂)(X, Z, W)`` indexed ``[m, x, z, w]``."""
        return self._t(self.DPl_jet, "llll")

    def berwald_hcov_Phat_along_eta(self) -> Tensor:
        return self._t(self.DPl_eta_jet, "lll")

    def cartan_hcov_Phat(self) -> Tensor:
        """``(∇_{β∂m} P̂)^i_{yz}`` indexed ``[m, i, y, z]``."""
        return self._t(self.DPhat_jet, "lull")

    def berwald_cartan_residual(self) -> float:
        """Relative residual of the relation expressing R° through R, T, R̂ and P̂.

        R°(X,Y)Z = R(X,Y)Z - T(R̂(X,Y), Z) - 𝔄_{X,Y}{(∇_{βX} P̂)(Y,Z) + P̂(X, P̂(Y,Z))}
        with R(∂a, ∂b)∂c read as ``R[i, c, b, a]``.
        """
        b = self.base
        R0 = b.R0_jet.value
        R = self.R_jet.value
        T = self.Tmix_jet.value
        Rh = b.Rhat_jet.value
        P = self.Phat_jet.value
        DP = self.DPhat_jet.value
        # all terms indexed [i, c(Z), a(X), b(Y)]
        lhs = R0.transpose(0, 1, 3, 2)
        r = R.transpose(0, 1, 3, 2)
        tr = np.einsum("icm,mba->icab", T, Rh)
        u = np.einsum("aibc->icab", DP) + np.einsum("iam,mbc->icab", P, P)
        rhs = r - tr - (u - u.transpose(0, 1, 3, 2))
        scale = max(np.abs(R0).max(), np.abs(r).max(), 1.0)
        return float(np.abs(lhs - rhs).max() / scale)


def cartan_coeffs(cf: CartanFrame) -> Tensor:
    return cf.cartan_coeffs()


def hv_torsion_hat(cf: CartanFrame) -> Tensor:
    return cf.hv_torsion_hat()


def cartan_hcurvature(cf: CartanFrame) -> Tensor:
    return cf.cartan_hcurvature()


def q_tensor(cf: CartanFrame) -> Tensor:
    return cf.q_tensor()


def berwald_hcov_Phat_along_eta(cf: CartanFrame) -> Tensor:
    return cf.berwald_hcov_Phat_along_eta()
