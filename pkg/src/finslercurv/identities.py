"""Pointwise identity suite relating the Berwald and Cartan tensors.

Each check compares two independently assembled sides and returns a
:class:`~finslercurv.classifiers.Verdict` whose residual is
``max|lhs - rhs| / max(max|term|, 1)`` over all terms involved.  The unit
floor keeps metrics whose curvature vanishes (up to rounding) from
comparing noise against noise.

Quadrilinear forms are indexed ``[x, y, z, w]`` for the arguments
``(X, Y, Z, W)``.  Helper layouts:

* ``Rh3[x, y, z]`` = R̂(X, Y, Z) = g(R̂(X, Y), Z)
* ``TH[a, b, c]`` = T(H(A), B, C)
* ``TR[a, b, c, d]`` = T(R̂(A, B), C, D)
* ``DP[m, x, z, w]`` = (D°_{β∂m} P̂)(X, Z, W); ``DPe`` is its η-contraction
"""

from __future__ import annotations

import numpy as np

from . import classifiers as cl
from .berwald import PointFrame
from .classifiers import Verdict

E = np.einsum

# Tolerance ladder by derivative depth of the tensors involved.
TOL_ALGEBRAIC = 1e-8
TOL_FIRST = 1e-8
TOL_SECOND = 1e-7
TOL_FIELD = 1e-6
TOL_RATIO = 1e-5

# checks in the order they are reported
ALL = (
    "berwald_skew_xy", "vh_torsion_agreement", "berwald_symmetric_part", "first_bianchi", "pair_exchange",
    "deviation_oracle", "berwald_cartan", "cartan_antisymmetry",
    "symmetric_part_along_eta", "projected_skew_zw", "scalar_curvature_expansion", "theorem_a",
)


def _perm(src: str, t) -> np.ndarray:
    return E(f"{src}->xyzw", t)


def _verdict(lhs, rhs, tol, terms=(), **details) -> Verdict:
    scale = max([1.0, np.abs(lhs).max(), np.abs(rhs).max()] + [np.abs(t).max() for t in terms])
    res = float(np.abs(lhs - rhs).max() / scale)
    return Verdict(cl._label(res, tol), res, tol, details=details)


class _Parts:
    """Numeric tensors shared by the identities at one frame."""

    def __init__(self, frame: PointFrame):
        cf = cl.cartan_frame(frame)
        self.frame, self.cf = frame, cf
        self.n, self.L = frame.n, frame.L
        self.y = frame.y
        self.g = frame.g_jet.value
        self.ell = frame.ell_jet.value
        self.hbar = frame.hbar_jet.value
        self.h = frame.h_jet.value
        self.T = frame.T_jet.value
        self.H = frame.H_jet.value
        self.R0 = frame.R0_jet.value
        self.R4 = frame.R4_jet.value
        self.Rhat = frame.Rhat_jet.value
        self.Rh3 = E("zm,myx->xyz", self.g, self.Rhat)
        self.TH = E("ma,mbc->abc", self.H, self.T)
        self.TR = E("mcd,mba->abcd", self.T, self.Rhat)
        self.DP = cf.DPl_jet.value
        self.DPe = cf.DPl_eta_jet.value


def _parts(frame):
    return frame.cached("identity_parts", lambda: _Parts(frame))


def berwald_skew_xy(frame: PointFrame) -> Verdict:
    """R°(X,Y,Z,W) = -R°(Y,X,Z,W)."""
    p = _parts(frame)
    return _verdict(p.R4, -p.R4.transpose(1, 0, 2, 3), TOL_ALGEBRAIC)


def vh_torsion_agreement(frame: PointFrame) -> Verdict:
    """The (v)h-torsions of the Berwald and Cartan connections agree."""
    p = _parts(frame)
    cart = E("h,ihjk->ijk", p.y, p.cf.R_jet.value)
    return _verdict(p.Rhat, cart, TOL_FIRST)


def berwald_symmetric_part(frame: PointFrame) -> Verdict:
    """R°(X,Y,Z,W) + R°(X,Y,W,Z) = 2𝔄_{X,Y}{(D°_{βY}P̂)(X,Z,W)} - 2T(R̂(X,Y),Z,W)."""
    p = _parts(frame)
    lhs = p.R4 + p.R4.transpose(0, 1, 3, 2)
    a = _perm("yxzw", p.DP)
    rhs = 2.0 * (a - a.transpose(1, 0, 2, 3)) - 2.0 * p.TR
    return _verdict(lhs, rhs, TOL_SECOND, (p.R4,))


def first_bianchi(frame: PointFrame) -> Verdict:
    """First Bianchi identity: the cyclic sum of R°(X,Y)Z over X, Y, Z vanishes."""
    p = _parts(frame)
    R0 = p.R0
    cyc = R0 + R0.transpose(0, 2, 3, 1) + R0.transpose(0, 3, 1, 2)
    return _verdict(cyc, np.zeros_like(cyc), TOL_FIRST, (R0,))


def pair_exchange(frame: PointFrame) -> Verdict:
    """Pair-exchange identity for R° with D°P̂ and T·R̂ corrections."""
    p = _parts(frame)
    DP, TR = p.DP, p.TR
    rhs = (
        _perm("zwxy", p.R4)
        + _perm("yxzw", DP) - _perm("xzwy", DP) + _perm("zxwy", DP) - _perm("wxzy", DP)
        + _perm("xwzy", TR) - _perm("ywxz", TR) + _perm("yzxw", TR)
        - _perm("xzyw", TR) + _perm("zwyx", TR) - _perm("xyzw", TR)
    )
    return _verdict(p.R4, rhs, TOL_SECOND, (DP,))


def deviation_oracle(frame: PointFrame) -> Verdict:
    """H from R̂ against H straight from the spray."""
    return _verdict(frame.H_jet.value, frame.H_direct_jet.value, TOL_FIRST)


def berwald_cartan(frame: PointFrame) -> Verdict:
    res = cl.cartan_frame(frame).berwald_cartan_residual()
    return Verdict(cl._label(res, TOL_SECOND), res, TOL_SECOND)


def cartan_antisymmetry(frame: PointFrame) -> Verdict:
    """R(X,Y,Z,W) = -R(X,Y,W,Z) for the metric-compatible Cartan connection."""
    R = cl.cartan_frame(frame).R4_jet.value
    return _verdict(R, -R.transpose(0, 1, 3, 2), TOL_FIRST)


def symmetric_part_along_eta(frame: PointFrame) -> Verdict:
    """R°(X,Y,Z,W) + R°(X,Y,W,Z) = 2L⁻¹ 𝔄_{X,Y}{ℓ(Y)[(D°_{βη}P̂)(Z,W,X) + T(H(X),Z,W)]}.

    This is the part of the full expansion (:func:`theorem_a`) that is
    symmetric in (Z, W).  ``details["alt_reading"]`` holds the residual of
    the variant with ``(D°_{βη}P̂)(Z,W,Y)`` and ℓ(Y) outside the
    antisymmetrization, which does not hold in general.
    """
    p = _parts(frame)
    lhs = p.R4 + p.R4.transpose(0, 1, 3, 2)
    inner = E("zwx->xzw", p.DPe) + p.TH  # [x, z, w]
    j = E("y,xzw->xyzw", p.ell, inner)
    rhs = 2.0 / p.L * (j - j.transpose(1, 0, 2, 3))
    n = p.n
    alt = np.broadcast_to(E("zwy->yzw", p.DPe)[None], (n,) * 4) + np.broadcast_to(p.TH[:, None], (n,) * 4)
    other = 2.0 / p.L * E("y,xyzw->xyzw", p.ell, alt - alt.transpose(1, 0, 2, 3))
    scale = max(1.0, np.abs(lhs).max(), np.abs(other).max())
    v = _verdict(lhs, rhs, TOL_SECOND, (p.R4,))
    v.details["alt_reading"] = float(np.abs(lhs - other).max() / scale)
    return v


def projected_skew_zw(frame: PointFrame) -> Verdict:
    """(𝒫·R°)(X,Y,Z,W) + (𝒫·R°)(X,Y,W,Z) = 0 on H_p-scalar spaces."""
    PR = cl.projected_R(frame)
    return _verdict(PR, -PR.transpose(0, 1, 3, 2), TOL_FIRST, (_parts(frame).R4,))


def scalar_curvature_expansion(frame: PointFrame) -> Verdict:
    """R°(X,Y)Z rebuilt from k, C^k, B^k, ℓ, ħ and φ (scalar-curvature spaces)."""
    p = _parts(frame)
    k = cl.k_jet(frame).value
    Ck = cl.ck_jet(frame).value
    Bk = cl.bk_jet(frame).value
    kl = k * p.ell + Ck / 3.0
    # bracket multiplying φ(Y), indexed [x, z]; B^k(Z, X) = Bk[z, x]
    br = E("z,x->xz", p.ell, kl) + Bk.T / 3.0 + (2.0 / 3.0) * E("x,z->xz", p.ell, Ck) + k * p.hbar.T
    w = (
        E("iy,xz->ixyz", p.h, br)
        + E("x,y,iz->ixyz", p.ell, Ck, p.h) / 3.0
        + E("xz,i,y->ixyz", p.hbar, p.y, kl) / p.L
    )
    rhs = w - w.transpose(0, 2, 1, 3)
    lhs = E("izyx->ixyz", p.R0)
    return _verdict(lhs, rhs, TOL_FIELD)


def theorem_a(frame: PointFrame) -> Verdict:
    """R° expanded through R̂, T, H, D°_{βη}P̂, ℓ, ħ and the H_p scalar ε."""
    p = _parts(frame)
    eps = cl.eps_jet(frame).value
    L, ell, Rh3, TH = p.L, p.ell, p.Rh3, p.TH
    t1 = (E("z,xyw->xyzw", ell, Rh3) - E("w,xyz->xyzw", ell, Rh3)) / L
    v = E("zwy->yzw", Rh3) - E("zwy->yzw", TH) + E("wzy->yzw", TH) - TH - E("zwy->yzw", p.DPe)
    rhe = E("m,mab->ab", p.y, Rh3)  # R̂(η, A, B)
    u = E("x,yzw->xyzw", ell, v) / L - (
        E("xz,y,w->xyzw", rhe, ell, ell)
        + E("yw,x,z->xyzw", rhe, ell, ell)
        - eps * L * L * E("xz,yw->xyzw", p.hbar, p.hbar)
    ) / (L * L)
    rhs = t1 + u - u.transpose(1, 0, 2, 3)
    return _verdict(p.R4, rhs, TOL_FIELD, (p.R4,), eps=eps)


def theorem_a_identity(frame: PointFrame, cf=None, tol: float = TOL_FIELD) -> Verdict:
    """Full expansion of R° on an H_p-scalar space plus its two corollaries.

    The verdict is that of :func:`theorem_a` judged at ``tol``; the residuals
    of :func:`symmetric_part_along_eta` and :func:`projected_skew_zw` are in
    ``details`` and must also pass for the verdict to hold.  ``cf`` may be a
    :class:`CartanFrame` already built on ``frame``.
    """
    if cf is not None:
        frame.cache.setdefault("cartan", cf)
    main = theorem_a(frame)
    sym = symmetric_part_along_eta(frame)
    skew = projected_skew_zw(frame)
    ok = main.residual <= tol and sym.holds and skew.holds
    return Verdict(cl.HOLDS if ok else cl.FAILS, main.residual, tol, main.details["eps"],
                   details={"eps": main.details["eps"], "symmetric_part": sym.residual,
                            "projected_skew": skew.residual})


_CHECKS = {
    "berwald_skew_xy": berwald_skew_xy, "vh_torsion_agreement": vh_torsion_agreement, "berwald_symmetric_part": berwald_symmetric_part, "first_bianchi": first_bianchi,
    "pair_exchange": pair_exchange, "deviation_oracle": deviation_oracle, "berwald_cartan": berwald_cartan,
    "cartan_antisymmetry": cartan_antisymmetry, "symmetric_part_along_eta": symmetric_part_along_eta, "projected_skew_zw": projected_skew_zw,
    "scalar_curvature_expansion": scalar_curvature_expansion, "theorem_a": theorem_a,
}

# checks whose hypothesis is a special-space property; skipped when it fails
HYPOTHESES = {
    "projected_skew_zw": "hp_scalar", "theorem_a": "hp_scalar", "scalar_curvature_expansion": "scalar_curvature",
}


def run_identities(frame: PointFrame, names=ALL, tol: float = cl.DEFAULT_TOL) -> dict:
    """Evaluate the named identities; hypothesis-gated ones report ``skipped`` when unmet."""
    gates = {}
    out = {}
    for name in names:
        hyp = HYPOTHESES.get(name)
        if hyp is not None:
            if hyp not in gates:
                test = cl.hp_scalar_test if hyp == "hp_scalar" else cl.scalar_curvature_test
                gates[hyp] = test(frame, tol).holds
            if not gates[hyp]:
                out[name] = None
                continue
        out[name] = _CHECKS[name](frame)
    return out
