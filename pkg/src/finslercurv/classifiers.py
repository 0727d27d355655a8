"""Projection, curvature scalars and the special-space verdicts.

The scalars ``k`` (scalar curvature) and ``ε`` (H_p-scalar curvature) are
extracted by closed-form ratios evaluated on jets, so the fields
``C = L ∂̇f``, ``B = L 𝒫 ∂̇C`` and ``A = L 𝒫 ∂̇B`` come from further jet
differentiation rather than finite differences.

Every test returns a :class:`Verdict`.  Residuals are relative to the norm
of the reference tensor, with the absolute floor ``1e-12 * size`` so that
identically vanishing tensors give ``holds`` instead of dividing by zero.
Norms are the ones induced by ``g``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .berwald import PointFrame
from .cartan import CartanFrame
from .errors import VarianceError
from .jets import Jet, contract
from .tensors import Tensor, antisym_pattern, apply_slotwise, inner

HOLDS = "holds"
FAILS = "fails"
INDETERMINATE = "indeterminate"

DEFAULT_TOL = 1e-6

# flags attached to verdicts
BELOW_DIMENSION = "below_definitional_dimension"
FLAT = "flat"
DEGENERATE_PATTERN = "degenerate_pattern"


@dataclass
class Verdict:
    label: str
    residual: float
    tolerance: float
    extracted_scalar: float | None = None
    flags: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.label == HOLDS

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "residual": float(self.residual),
            "tolerance": float(self.tolerance),
            "scalar": None if self.extracted_scalar is None else float(self.extracted_scalar),
            "flags": list(self.flags),
            "details": {k: float(v) for k, v in self.details.items()},
        }


def _label(residual, tol):
    return HOLDS if residual <= tol else FAILS


def floor(t) -> float:
    return 1e-12 * max(np.size(t), 1)


# -- projection and norms -------------------------------------------------

def project(t, frame: PointFrame, variance: str | None = None):
    """Apply 𝒫: every slot is composed with the projector ``h^i_j``.

    Accepts a :class:`Tensor`, or an array / jet together with ``variance``.
    Jet input uses the jet of ``h`` so the result stays differentiable.
    """
    if isinstance(t, Tensor):
        data, variance = t.data, t.variance
    else:
        data = t
    if variance is None:
        raise VarianceError("project needs slot variance")
    h = frame.h_jet if isinstance(data, Jet) else frame.h_jet.value
    out = apply_slotwise(data, variance, h, h)
    return Tensor(out, variance) if isinstance(t, Tensor) else out


def gnorm(data, variance: str, frame: PointFrame) -> float:
    g, gi = frame.g_jet.value, frame.ginv_jet.value
    data = data.value if isinstance(data, Jet) else np.asarray(data)
    v = inner(data, data, variance, g, gi)
    return float(np.sqrt(max(float(v), 0.0)))


def _pattern(frame):
    return frame.cached("pattern", lambda: antisym_pattern(frame.hbar_jet.value))


# -- scalar fields ----------------------------------------------------------

def k_jet(frame: PointFrame) -> Jet:
    """``k = tr H / (L² (n-1))`` as a jet."""
    def make():
        H = frame.H_jet
        tr = sum(H[i, i] for i in range(frame.n))
        return tr / (frame.L2_jet * float(frame.n - 1))
    return frame.cached("k", make)


def projected_R(frame: PointFrame) -> np.ndarray:
    return frame.cached("PR", lambda: project(frame.R4_jet.value, frame, "llll"))


def hbar_up_jet(frame: PointFrame) -> Jet:
    """``ħ^{ab} = g^{ab} - y^a y^b / L²``."""
    def make():
        y = frame.y_jet
        return frame.ginv_jet - contract("a,b->ab", y, y) / frame.L2_jet
    return frame.cached("hbar_up", make)


def eps_jet(frame: PointFrame) -> Jet:
    """``ε = <𝒫·R°, A> / <A, A>`` with ``A`` the antisymmetrized ``ħ⊗ħ`` pattern.

    Since ``A`` is indicatory and ``h`` is ``g``-self-adjoint, ``<𝒫·R°, A> =
    <R°, A>``, and ``<A, A> = 2(n-1)(n-2)``.  In dimension 2 the pattern
    vanishes and ε is defined as 0.
    """
    def make():
        R = frame.R4_jet
        if frame.n < 3:
            return Jet.constant(0.0, R.space)
        hu = hbar_up_jet(frame)
        s1 = contract("bd,bd->", contract("abcd,ac->bd", R, hu), hu)
        s2 = contract("ad,ad->", contract("abcd,bc->ad", R, hu), hu)
        return (s1 - s2) / float(2 * (frame.n - 1) * (frame.n - 2))
    return frame.cached("eps", make)


def field_jet(frame: PointFrame, name: str) -> Jet:
    if name == "k":
        return k_jet(frame)
    if name in ("eps", "epsilon", "ε"):
        return eps_jet(frame)
    raise ValueError(f"unknown scalar field {name!r}")


def ck_jet(frame: PointFrame, name: str = "k") -> Jet:
    frame.require(field_order=1, what="C form")
    return frame.cached(("C", name), lambda: frame.L_jet * field_jet(frame, name).grad_y())


def bk_jet(frame: PointFrame, name: str = "k") -> Jet:
    frame.require(field_order=2, what="B form")
    def make():
        dC = ck_jet(frame, name).grad_y()  # dC[i, j] = ∂̇_j C_i
        return frame.L_jet * project(dC, frame, "ll")
    return frame.cached(("B", name), make)


def ak_jet(frame: PointFrame, name: str = "k") -> Jet:
    frame.require(field_order=3, what="A form")
    def make():
        dB = bk_jet(frame, name).grad_y()
        return frame.L_jet * project(dB, frame, "lll")
    return frame.cached(("A", name), make)


def ck_tensor(frame, name="k") -> Tensor:
    return Tensor(ck_jet(frame, name).value, "l")


def bk_tensor(frame, name="k") -> Tensor:
    return Tensor(bk_jet(frame, name).value, "ll")


def ak_tensor(frame, name="k") -> Tensor:
    return Tensor(ak_jet(frame, name).value, "lll")


def horizontal_gradient(frame: PointFrame, name: str = "k") -> np.ndarray:
    """``δ_m f`` of a curvature scalar; needs one extra x-order."""
    frame.require(extra_x=1, what="horizontal gradient")
    return frame.cached(("dh", name), lambda: frame.delta(field_jet(frame, name)).value)


# -- verdicts ---------------------------------------------------------------

def scalar_curvature_test(frame: PointFrame, tol: float = DEFAULT_TOL) -> Verdict:
    """``H = k L² φ`` with ``k = tr H / (L²(n-1))``."""
    H = frame.H_jet.value
    k = k_jet(frame).value
    flags = [] if frame.n >= 3 else [BELOW_DIMENSION]
    nH = gnorm(H, "ul", frame)
    if nH < floor(H):
        return Verdict(HOLDS, 0.0, tol, 0.0, flags + [FLAT])
    diff = H - k * frame.L ** 2 * frame.h_jet.value
    res = gnorm(diff, "ul", frame) / nH
    return Verdict(_label(res, tol), res, tol, k, flags)


def hp_scalar_test(frame: PointFrame, tol: float = DEFAULT_TOL) -> Verdict:
    """``𝒫·R° = ε 𝔄{ħ⊗ħ}``."""
    S = projected_R(frame)
    A = _pattern(frame)
    eps = eps_jet(frame).value
    flags = [] if frame.n >= 4 else [BELOW_DIMENSION]
    nS = gnorm(S, "llll", frame)
    if gnorm(A, "llll", frame) < floor(A):
        flags.append(DEGENERATE_PATTERN)
    if nS < floor(S):
        return Verdict(HOLDS, 0.0, tol, eps, flags + [FLAT])
    res = gnorm(S - eps * A, "llll", frame) / nS
    return Verdict(_label(res, tol), res, tol, eps, flags)


def _constancy(frame: PointFrame, name: str, tol: float) -> Verdict:
    """A curvature scalar is constant iff its C form and, when available, its horizontal gradient vanish."""
    f = field_jet(frame, name).value
    scale = max(abs(f), 1.0)
    C = ck_jet(frame, name).value
    details = {"norm_C": gnorm(C, "l", frame)}
    if frame.field_order >= 2:
        details["norm_B"] = gnorm(bk_jet(frame, name).value, "ll", frame)
    res = details["norm_C"]
    if frame.extra_x >= 1:
        dh = horizontal_gradient(frame, name)
        # δf is a covector; weight by L like C
        details["norm_dh"] = frame.L * gnorm(dh, "l", frame)
        res = max(res, details["norm_dh"])
    res /= scale
    return Verdict(_label(res, tol), res, tol, f, [], details)


def constant_curvature_test(frame: PointFrame, tol: float = DEFAULT_TOL) -> Verdict:
    """Vanishing of ``C^k`` (and of ``δk`` when the frame carries an extra x-order).

    In dimension 2 the y-independence of ``k`` does not force x-constancy, so
    the horizontal gradient is what separates the two there.
    """
    sc = scalar_curvature_test(frame, tol)
    v = _constancy(frame, "k", tol)
    if not sc.holds:
        v.label = FAILS
        v.flags.append("not_scalar_curvature")
    return v


def hp_constant_test(frame: PointFrame, tol: float = DEFAULT_TOL) -> Verdict:
    hp = hp_scalar_test(frame, tol)
    v = _constancy(frame, "eps", tol)
    if not hp.holds:
        v.label = FAILS
        v.flags.append("not_hp_scalar")
    return v


def thm6_check(frame: PointFrame, tol: float = DEFAULT_TOL) -> Verdict:
    """``B^k = 3(ε - k) ħ`` under scalar curvature."""
    Bk = bk_jet(frame, "k").value
    k, eps = k_jet(frame).value, eps_jet(frame).value
    rhs = 3.0 * (eps - k) * frame.hbar_jet.value
    scale = max(gnorm(Bk, "ll", frame), gnorm(rhs, "ll", frame), abs(k), 1.0)
    res = gnorm(Bk - rhs, "ll", frame) / scale
    g, gi = frame.g_jet.value, frame.ginv_jet.value
    alpha = float(inner(Bk, frame.hbar_jet.value, "ll", g, gi)) / (frame.n - 1)
    flags = [] if frame.n >= 4 else [BELOW_DIMENSION]
    return Verdict(_label(res, tol), res, tol, 3.0 * (eps - k), flags,
                   {"implied_eps": k + alpha / 3.0, "eps": eps, "k": k})


def ratio_checks(frame: PointFrame, tol: float = DEFAULT_TOL) -> dict:
    """``3 X^ε = 2 X^k`` for ``X`` in C, B and, when the frame is deep enough, A."""
    out = {}
    forms = [("C", ck_jet, "l"), ("B", bk_jet, "ll"), ("A", ak_jet, "lll")]
    for name, fn, var in forms:
        if name == "A" and frame.field_order < 3:
            continue
        xe, xk = fn(frame, "eps").value, fn(frame, "k").value
        scale = max(gnorm(3 * xe, var, frame), gnorm(2 * xk, var, frame),
                    abs(k_jet(frame).value), 1.0)
        res = gnorm(3 * xe - 2 * xk, var, frame) / scale
        out[name] = Verdict(_label(res, tol), res, tol)
    return out


def f_form(frame: PointFrame) -> np.ndarray:
    """``F = (B^k + 2 C^k⊗ℓ) / 3``."""
    C, B, ell = ck_jet(frame).value, bk_jet(frame).value, frame.ell_jet.value
    return (B + 2.0 * np.outer(C, ell)) / 3.0


def n_form(frame: PointFrame) -> np.ndarray:
    """``N = k(g + ℓ⊗ℓ) + (B^k + 2ℓ⊗C^k + 2C^k⊗ℓ) / 3``."""
    C, B, ell = ck_jet(frame).value, bk_jet(frame).value, frame.ell_jet.value
    k, g = k_jet(frame).value, frame.g_jet.value
    return k * (g + np.outer(ell, ell)) + (B + 2.0 * np.outer(ell, C) + 2.0 * np.outer(C, ell)) / 3.0


def _vanishing(t, var, frame, tol, scalar=None):
    f = scalar if scalar is not None else k_jet(frame).value
    res = gnorm(t, var, frame) / max(abs(f), 1.0)
    return Verdict(_label(res, tol), res, tol)


def f_form_test(frame: PointFrame, tol: float = DEFAULT_TOL) -> Verdict:
    """``𝒫·F = 0``, equivalent to constant curvature in dimension at least 3."""
    PF = project(f_form(frame), frame, "ll")
    v = _vanishing(PF, "ll", frame, tol)
    if frame.n < 3:
        v.flags.append(BELOW_DIMENSION)
    return v


def n_form_test(frame: PointFrame, tol: float = DEFAULT_TOL) -> Verdict:
    """``𝒫·N = 0``, equivalent to vanishing ε."""
    PN = project(n_form(frame), frame, "ll")
    return _vanishing(PN, "ll", frame, tol)


def cartan_frame(frame: PointFrame) -> CartanFrame:
    return frame.cached("cartan", lambda: CartanFrame(frame))


def _fit_pattern(S, frame):
    """Closed-form least-squares coefficient of ``S`` against the ħħ pattern and its relative residual."""
    A = _pattern(frame)
    g, gi = frame.g_jet.value, frame.ginv_jet.value
    aa = float(inner(A, A, "llll", g, gi))
    c = float(inner(S, A, "llll", g, gi)) / aa if aa > floor(A) else 0.0
    nS = gnorm(S, "llll", frame)
    res = gnorm(S - c * A, "llll", frame) / nS if nS > floor(S) else 0.0
    return c, res


def perpendicular_test(frame, tol: float = DEFAULT_TOL) -> Verdict:
    """``Q = q 𝔄{ħħ}`` and ``𝒫·R = ρ 𝔄{ħħ}`` (Cartan R) with ``ρ = ε + q``.

    Projecting the Berwald-Cartan relation gives ``𝒫·R° = 𝒫·R - Q`` once
    ``∇P̂`` is symmetric in its last two slots, hence ``ρ = ε + q`` with the
    curvature sign that makes constant curvature ``μ`` give ``ε = μ``.  The
    gap to the alternative reading ``ρ = ε - q`` is reported as
    ``gap_minus``.  Accepts a :class:`PointFrame` or a :class:`CartanFrame`.
    """
    if isinstance(frame, CartanFrame):
        frame.base.cache.setdefault("cartan", frame)
        frame = frame.base
    cf = cartan_frame(frame)
    eps = eps_jet(frame).value
    q, rq = _fit_pattern(cf.Q_jet.value, frame)
    PR = project(cf.R4_jet.value, frame, "llll")
    rho, rr = _fit_pattern(PR, frame)
    scale = max(abs(eps), abs(q), abs(rho), 1.0)
    gap = abs(rho - (eps + q)) / scale
    gap_minus = abs(rho - (eps - q)) / scale
    res = max(rq, rr, gap)
    flags = []
    if rq > tol:
        flags.append("q_not_proportional")
    return Verdict(_label(res, tol), res, tol, rho, flags,
                   {"q": q, "rho": rho, "eps": eps, "residual_q": rq, "residual_rho": rr, "gap": gap,
                    "gap_minus": gap_minus})
