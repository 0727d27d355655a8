"""Berwald-side tensor tower at a supporting element ``(x, y)``.

A :class:`PointFrame` lifts ``L`` once to a jet that is deep enough for
every tensor it may be asked for, then derives each tensor lazily as a jet
(so it can be differentiated further) and caches it.  Public accessors
return plain :class:`~finslercurv.tensors.Tensor` values.

Index layout of the arrays follows the component names:

* ``g[i, j]``, ``T[i, j, k]``, ``G[i]``, ``N[i, j]`` = G^i_j,
  ``B[i, j, k]`` = G^i_{jk}
* ``R0[i, h, j, k]`` = R°^i_{h jk} = 𝔄_{jk}{δ_j G^i_{hk} + G^i_{mj} G^m_{hk}}
* ``Rhat[i, j, k]`` = y^h R°^i_{h jk}
* ``H[i, k]`` = y^h R°^i_{h kj} y^j

The abstract quadrilinear form used by the classifiers is
``R(X, Y, Z, W) = W_i Z^h Y^j X^k R°^i_{h jk}`` (see :meth:`PointFrame.quadrilinear`);
with this reading a space of constant curvature ``μ`` has
``R = μ (g(X,Z) g(Y,W) - g(Y,Z) g(X,W))`` and ``H = μ L² h``.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np

from . import jets
from .errors import DepthError, DomainError, NonSmoothPoint
from .jets import Jet, contract
from .tensors import Tensor


class PointFrame:
    """Lazily computed tensors at one point of the slit tangent bundle.

    ``field_order`` is the number of extra y-derivatives every tensor keeps
    (the C/B/A forms need 3).  ``extra_x`` is the number of extra
    x-derivatives (testing constancy of a curvature scalar along x needs 1).
    """

    def __init__(self, spec, x, y, field_order: int = 0, extra_x: int = 0):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        n = spec.dimension
        if x.shape != (n,) or y.shape != (n,):
            raise DomainError(f"point must have {n} components, got x{x.shape} y{y.shape}")
        if not np.any(y):
            raise DomainError("y must be non-zero")
        spec.domain.check(x, y)
        if field_order < 0 or extra_x < 0:
            raise ValueError("jet depths must be non-negative")
        self.spec = spec
        self.n = n
        self.x = x
        self.y = y
        self.field_order = field_order
        self.extra_x = extra_x
        self.L_order = (2 + extra_x, 5 + field_order)
        self.cache: dict = {}

    def cached(self, key, fn):
        """Memoize ``fn()`` under ``key`` for quantities derived outside this class."""
        if key not in self.cache:
            self.cache[key] = fn()
        return self.cache[key]

    def require(self, field_order: int = 0, extra_x: int = 0, what: str = "this quantity"):
        if self.field_order < field_order or self.extra_x < extra_x:
            raise DepthError(
                f"{what} needs field_order>={field_order}, extra_x>={extra_x}; "
                f"frame has {self.field_order}, {self.extra_x}"
            )

    def __repr__(self):
        return f"PointFrame({self.spec.name!r}, x={self.x.tolist()}, y={self.y.tolist()})"

    # -- jets -----------------------------------------------------------
    @cached_property
    def L_jet(self) -> Jet:
        L = self.spec.lift(self.x, self.y, *self.L_order)
        if L.value <= 0:
            raise NonSmoothPoint(f"L = {L.value:.3g} is not positive at this point")
        return L

    @cached_property
    def y_jet(self) -> Jet:
        """The fibre coordinate ``y`` as a vector jet."""
        return Jet.variables(self.x, self.y, self.L_jet.space)[1]

    @cached_property
    def L2_jet(self) -> Jet:
        return self.L_jet * self.L_jet

    @cached_property
    def g_jet(self) -> Jet:
        return self.L2_jet.grad_y().grad_y() * 0.5

    @cached_property
    def ginv_jet(self) -> Jet:
        g = self.g_jet
        return jets.inv(g.truncate(g.order[0] - 1, g.order[1]))

    @cached_property
    def ell_jet(self) -> Jet:
        return self.L_jet.grad_y()

    @cached_property
    def hbar_jet(self) -> Jet:
        ell = self.ell_jet
        return self.g_jet - contract("i,j->ij", ell, ell)

    @cached_property
    def h_jet(self) -> Jet:
        ell = self.ell_jet
        yl = contract("i,j->ij", self.y_jet, ell) / self.L_jet
        return np.eye(self.n) - yl

    @cached_property
    def T_jet(self) -> Jet:
        return self.g_jet.grad_y() * 0.5

    @cached_property
    def G_jet(self) -> Jet:
        L2 = self.L2_jet
        dy = L2.grad_y()
        term = contract("lk,k->l", dy.grad_x(), self.y_jet) - L2.grad_x()
        return contract("il,l->i", self.ginv_jet, term) * 0.25

    @cached_property
    def N_jet(self) -> Jet:
        return self.G_jet.grad_y()

    @cached_property
    def B_jet(self) -> Jet:
        return self.N_jet.grad_y()

    def delta(self, t: Jet) -> Jet:
        """Horizontal derivative ``δ_m t = ∂_m t - G^e_m ∂̇_e t``, appended as last axis."""
        k = t.ndim
        idx = "abcdefgh"[:k]
        return t.grad_x() - contract(f"em,{idx}e->{idx}m", self.N_jet, t.grad_y())

    @cached_property
    def R0_jet(self) -> Jet:
        B = self.B_jet
        dB = self.delta(B)  # dB[i, h, k, j] = δ_j G^i_{hk}
        a = dB.transpose(0, 1, 3, 2) + contract("imj,mhk->ihjk", B, B)
        return a - a.transpose(0, 1, 3, 2)

    @cached_property
    def Rhat_jet(self) -> Jet:
        return contract("h,ihjk->ijk", self.y_jet, self.R0_jet)

    @cached_property
    def H_jet(self) -> Jet:
        return contract("ikj,j->ik", self.Rhat_jet, self.y_jet)

    @cached_property
    def R4_jet(self) -> Jet:
        """Quadrilinear form ``R[X, Y, Z, W] = g_{Wi} R°^i_{Z Y X}``."""
        return contract("di,icba->abcd", self.g_jet, self.R0_jet)

    @cached_property
    def H_direct_jet(self) -> Jet:
        """Deviation tensor from the spray alone, with no curvature tensor involved."""
        G, N, B, y = self.G_jet, self.N_jet, self.B_jet, self.y_jet
        t1 = G.grad_x() * 2.0
        t2 = contract("ikj,j->ik", N.grad_x(), y)
        t3 = contract("j,ijk->ik", G, B) * 2.0
        t4 = contract("ij,jk->ik", N, N)
        return t1 - t2 + t3 - t4

    # -- public accessors ---------------------------------------------
    def _t(self, jet: Jet, variance: str) -> Tensor:
        return Tensor(np.asarray(jet.value, dtype=float), variance)

    @cached_property
    def L(self) -> float:
        return self.L_jet.value

    def fundamental_tensor(self) -> Tensor:
        return self._t(self.g_jet, "ll")

    def inverse_metric(self) -> Tensor:
        return self._t(self.ginv_jet, "uu")

    def hilbert_form(self) -> Tensor:
        return self._t(self.ell_jet, "l")

    def angular_metric(self) -> Tensor:
        return self._t(self.hbar_jet, "ll")

    def phi_operator(self) -> Tensor:
        return self._t(self.h_jet, "ul")

    def cartan_tensor(self) -> Tensor:
        return self._t(self.T_jet, "lll")

    def spray(self) -> Tensor:
        return self._t(self.G_jet, "u")

    def nonlinear_connection(self) -> Tensor:
        return self._t(self.N_jet, "ul")

    def berwald_coeffs(self) -> Tensor:
        return self._t(self.B_jet, "ull")

    def berwald_hcurvature(self) -> Tensor:
        return self._t(self.R0_jet, "ulll")

    def vh_torsion(self) -> Tensor:
        return self._t(self.Rhat_jet, "ull")

    def deviation(self) -> Tensor:
        return self._t(self.H_jet, "ul")

    def deviation_direct(self) -> Tensor:
        return self._t(self.H_direct_jet, "ul")

    def quadrilinear(self) -> Tensor:
        return self._t(self.R4_jet, "llll")


# Module-level functional forms, one per tensor.
def fundamental_tensor(frame: PointFrame) -> Tensor:
    return frame.fundamental_tensor()


def hilbert_form(frame: PointFrame) -> Tensor:
    return frame.hilbert_form()


def angular_metric(frame: PointFrame) -> Tensor:
    return frame.angular_metric()


def phi_operator(frame: PointFrame) -> Tensor:
    return frame.phi_operator()


def cartan_tensor(frame: PointFrame) -> Tensor:
    return frame.cartan_tensor()


def spray(frame: PointFrame) -> Tensor:
    return frame.spray()


def nonlinear_connection(frame: PointFrame) -> Tensor:
    return frame.nonlinear_connection()


def berwald_coeffs(frame: PointFrame) -> Tensor:
    return frame.berwald_coeffs()


def berwald_hcurvature(frame: PointFrame) -> Tensor:
    return frame.berwald_hcurvature()


def vh_torsion(frame: PointFrame) -> Tensor:
    return frame.vh_torsion()


def deviation(frame: PointFrame) -> Tensor:
    return frame.deviation()
