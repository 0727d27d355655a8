"""Truncated multivariate Taylor arithmetic over base and fiber coordinates.

A :class:`Jet` stores the Taylor coefficients of a (tensor of) smooth
function(s) of ``(x, y)`` around a point, truncated separately in the total
x-degree and the total y-degree.  Coefficients are kept per monomial, so a
mixed partial derivative has exactly one storage slot whatever the order in
which it is requested.

Products and elementwise functions are exact at the truncation order, so
partials are correct to floating-point rounding.  Differentiating a jet
lowers its order by one in the corresponding group, which is how the
geometric pipeline builds ``g = 1/2 d_y d_y L^2``, ``G^i_j = d_y G^i`` and
so on from a single deep jet of ``L``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import DepthError, DomainError, NonSmoothPoint

_PAIR_AXIS = "Z"


@dataclass(frozen=True)
class DerivativeRequest:
    x_order: int = 0
    y_order: int = 0

    def __post_init__(self):
        if self.x_order < 0 or self.y_order < 0:
            raise ValueError("derivative orders must be non-negative")


def _monomials(n: int, d: int) -> list[tuple[int, ...]]:
    # Graded order; for d' < d the list for d' is a prefix of the list for d.
    out = []
    for deg in range(d + 1):
        for combo in itertools.combinations_with_replacement(range(n), deg):
            e = [0] * n
            for v in combo:
                e[v] += 1
            out.append(tuple(e))
    return out


def _pair_table(mons, d):
    index = {m: i for i, m in enumerate(mons)}
    a_idx, b_idx, c_idx = [], [], []
    for i, a in enumerate(mons):
        da = sum(a)
        for j, b in enumerate(mons):
            if da + sum(b) > d:
                break
            a_idx.append(i)
            b_idx.append(j)
            c_idx.append(index[tuple(p + q for p, q in zip(a, b))])
    return np.array(a_idx), np.array(b_idx), np.array(c_idx)


class JetSpace:
    """Monomial basis for jets in ``n`` base and ``n`` fiber variables."""

    def __init__(self, n: int, ox: int, oy: int):
        if ox < 0 or oy < 0:
            raise DepthError(f"negative jet order ({ox}, {oy})")
        self.n = n
        self.ox = ox
        self.oy = oy
        self.xmons = _monomials(n, ox)
        self.ymons = _monomials(n, oy)
        self.nxm = len(self.xmons)
        self.nym = len(self.ymons)
        self.size = self.nxm * self.nym
        self.max_degree = ox + oy
        self._xindex = {m: i for i, m in enumerate(self.xmons)}
        self._yindex = {m: i for i, m in enumerate(self.ymons)}

    def __repr__(self):
        return f"JetSpace(n={self.n}, ox={self.ox}, oy={self.oy})"

    def index(self, xexp: Sequence[int], yexp: Sequence[int]) -> int:
        try:
            return self._xindex[tuple(xexp)] * self.nym + self._yindex[tuple(yexp)]
        except KeyError:
            raise DepthError(
                f"monomial x^{tuple(xexp)} y^{tuple(yexp)} is beyond {self!r}"
            ) from None

    @cached_property
    def factorials(self) -> np.ndarray:
        fx = np.array([math.prod(math.factorial(e) for e in m) for m in self.xmons], float)
        fy = np.array([math.prod(math.factorial(e) for e in m) for m in self.ymons], float)
        return np.outer(fx, fy).ravel()

    @cached_property
    def _mul(self):
        xa, xb, xc = _pair_table(self.xmons, self.ox)
        ya, yb, yc = _pair_table(self.ymons, self.oy)
        ny = self.nym
        ia = (xa[:, None] * ny + ya[None, :]).ravel()
        ib = (xb[:, None] * ny + yb[None, :]).ravel()
        ic = (xc[:, None] * ny + yc[None, :]).ravel()
        npairs = ia.size
        # (size x npairs) summation operator: out = S @ products
        s = sp.csr_matrix(
            (np.ones(npairs), (ic, np.arange(npairs))), shape=(self.size, npairs)
        )
        return ia, ib, s

    @lru_cache(maxsize=None)
    def truncation(self, ox: int, oy: int) -> np.ndarray:
        """Indices of the coefficients that survive truncation to ``(ox, oy)``."""
        if ox > self.ox or oy > self.oy:
            raise DepthError(f"cannot raise {self!r} to order ({ox}, {oy})")
        tgt = space(self.n, ox, oy)
        return (np.arange(tgt.nxm)[:, None] * self.nym + np.arange(tgt.nym)[None, :]).ravel()

    @lru_cache(maxsize=None)
    def derivative_map(self, group: str, var: int):
        if group == "x":
            if self.ox == 0:
                raise DepthError(f"no x-derivative left in {self!r}")
            tgt = space(self.n, self.ox - 1, self.oy)
            src_x, fac = [], []
            for m in tgt.xmons:
                up = list(m)
                up[var] += 1
                src_x.append(self._xindex[tuple(up)])
                fac.append(m[var] + 1)
            src = (np.array(src_x)[:, None] * self.nym + np.arange(tgt.nym)[None, :]).ravel()
            factor = np.repeat(np.array(fac, float), tgt.nym)
        else:
            if self.oy == 0:
                raise DepthError(f"no y-derivative left in {self!r}")
            tgt = space(self.n, self.ox, self.oy - 1)
            src_y, fac = [], []
            for m in tgt.ymons:
                up = list(m)
                up[var] += 1
                src_y.append(self._yindex[tuple(up)])
                fac.append(m[var] + 1)
            src = (np.arange(tgt.nxm)[:, None] * self.nym + np.array(src_y)[None, :]).ravel()
            factor = np.tile(np.array(fac, float), tgt.nxm)
        return tgt, src, factor


@lru_cache(maxsize=None)
def space(n: int, ox: int, oy: int) -> JetSpace:
    return JetSpace(n, ox, oy)


def _check_finite(arr, what):
    if not np.all(np.isfinite(arr)):
        raise NonSmoothPoint(f"non-finite value in {what}")


class Jet:
    """A tensor of truncated Taylor expansions sharing one :class:`JetSpace`.

    ``data`` has shape ``(*shape, space.size)``; the last axis indexes
    monomials and ``data[..., 0]`` is the value at the expansion point.
    Instances are treated as immutable.
    """

    __slots__ = ("space", "data")
    __array_ufunc__ = None

    def __init__(self, space_: JetSpace, data: np.ndarray):
        self.space = space_
        self.data = data

    # -- construction -------------------------------------------------
    @classmethod
    def constant(cls, value, space_: JetSpace) -> "Jet":
        value = np.asarray(value, dtype=float)
        data = np.zeros(value.shape + (space_.size,))
        data[..., 0] = value
        return cls(space_, data)

    @classmethod
    def variables(cls, x0, y0, space_: JetSpace) -> tuple["Jet", "Jet"]:
        """Coordinate jets ``x = x0 + dx`` and ``y = y0 + dy``."""
        n = space_.n
        x = cls.constant(x0, space_)
        y = cls.constant(y0, space_)
        zero = (0,) * n
        for i in range(n):
            e = [0] * n
            e[i] = 1
            if space_.ox >= 1:
                x.data[i, space_.index(e, zero)] = 1.0
            if space_.oy >= 1:
                y.data[i, space_.index(zero, e)] = 1.0
        return x, y

    # -- inspection ---------------------------------------------------
    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape[:-1]

    @property
    def ndim(self) -> int:
        return self.data.ndim - 1

    @property
    def order(self) -> tuple[int, int]:
        return self.space.ox, self.space.oy

    @property
    def value(self):
        v = self.data[..., 0]
        return float(v) if v.ndim == 0 else v.copy()

    def partial(self, x: Sequence[int] = (), y: Sequence[int] = ()):
        """Mixed partial derivative; ``x`` and ``y`` list 0-based variable indices.

        ``partial(x=[0], y=[1, 1])`` is d^3 / dx^1 dy^2 dy^2.
        """
        n = self.space.n
        xe, ye = [0] * n, [0] * n
        for v in x:
            xe[v] += 1
        for v in y:
            ye[v] += 1
        k = self.space.index(xe, ye)
        out = self.data[..., k] * self.space.factorials[k]
        return float(out) if out.ndim == 0 else out

    def partials(self) -> dict:
        """All stored partials of a scalar jet keyed by ``(x_exponents, y_exponents)``."""
        if self.ndim:
            raise ValueError("partials() is defined for scalar jets")
        s = self.space
        vals = self.data * s.factorials
        return {
            (xm, ym): float(vals[i * s.nym + j])
            for i, xm in enumerate(s.xmons)
            for j, ym in enumerate(s.ymons)
        }

    def __repr__(self):
        return f"Jet(shape={self.shape}, order={self.order}, value={self.data[..., 0]!r})"

    # -- structural ---------------------------------------------------
    def __getitem__(self, idx) -> "Jet":
        if not isinstance(idx, tuple):
            idx = (idx,)
        if len(idx) > self.ndim or any(i is Ellipsis for i in idx):
            raise IndexError("jet indexing must address tensor axes only")
        return Jet(self.space, self.data[idx])

    def __len__(self):
        return self.shape[0]

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def transpose(self, *axes) -> "Jet":
        if len(axes) == 1 and isinstance(axes[0], (tuple, list)):
            axes = tuple(axes[0])
        return Jet(self.space, self.data.transpose(*axes, self.ndim))

    def sum(self, axis=None) -> "Jet":
        if axis is None:
            axis = tuple(range(self.ndim))
        return Jet(self.space, self.data.sum(axis=axis))

    def truncate(self, ox: int, oy: int) -> "Jet":
        if (ox, oy) == self.order:
            return self
        idx = self.space.truncation(ox, oy)
        return Jet(space(self.space.n, ox, oy), self.data[..., idx])

    def d(self, group: str, var: int) -> "Jet":
        tgt, src, fac = self.space.derivative_map(group, var)
        return Jet(tgt, self.data[..., src] * fac)

    def dx(self, var: int) -> "Jet":
        return self.d("x", var)

    def dy(self, var: int) -> "Jet":
        return self.d("y", var)

    def grad(self, group: str) -> "Jet":
        """Derivatives along every coordinate of ``group``, appended as the last tensor axis."""
        parts = [self.d(group, v) for v in range(self.space.n)]
        return Jet(parts[0].space, np.stack([p.data for p in parts], axis=-2))

    def grad_x(self) -> "Jet":
        return self.grad("x")

    def grad_y(self) -> "Jet":
        return self.grad("y")

    # -- arithmetic ---------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Jet):
            ox = min(self.space.ox, other.space.ox)
            oy = min(self.space.oy, other.space.oy)
            return self.truncate(ox, oy), other.truncate(ox, oy)
        return self, None

    def __add__(self, other):
        a, b = self._coerce(other)
        if b is not None:
            return Jet(a.space, a.data + b.data)
        other = np.asarray(other, dtype=float)
        data = np.broadcast_to(a.data, np.broadcast_shapes(a.data.shape, other.shape + (1,))).copy()
        data[..., 0] += other
        return Jet(a.space, data)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.space, -self.data)

    def __pos__(self):
        return self

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._coerce(other)
        if b is None:
            other = np.asarray(other, dtype=float)
            return Jet(a.space, a.data * other[..., None])
        return Jet(a.space, _mul_data(a.space, a.data, b.data))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return _divide(self, other)
        other = np.asarray(other, dtype=float)
        if np.any(other == 0):
            raise NonSmoothPoint("division by zero")
        return Jet(self.space, self.data / other[..., None])

    def __rtruediv__(self, other):
        return _divide(other, self)

    def __pow__(self, p):
        return power(self, p)

    # -- elementwise functions ----------------------------------------
    def sqrt(self):
        return sqrt(self)

    def exp(self):
        return exp(self)

    def log(self):
        return log(self)


def _mul_data(sp_: JetSpace, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if sp_.size == 1:
        return a * b
    ia, ib, s = sp_._mul
    prod = a[..., ia] * b[..., ib]
    lead = prod.shape[:-1]
    flat = prod.reshape(-1, prod.shape[-1])
    out = (s @ flat.T).T
    return np.ascontiguousarray(out).reshape(lead + (sp_.size,))


def _compose(a: Jet, coeffs: Callable[[np.ndarray, int], list], what: str) -> Jet:
    """f(a) = sum_k coeffs[k] * (a - a0)^k, truncated at the space's max degree."""
    a0 = a.data[..., 0]
    kmax = a.space.max_degree
    cs = coeffs(a0, kmax)
    for c in cs:
        _check_finite(c, what)
    result = Jet.constant(cs[kmax], a.space)
    if kmax:
        delta = Jet(a.space, a.data.copy())
        delta.data[..., 0] = 0.0
        for k in range(kmax - 1, -1, -1):
            result = result * delta + cs[k]
    return result


def _divide(num, den: Jet) -> Jet:
    if isinstance(num, Jet):
        num, den = num._coerce(den)
        if den.ndim == 0 and num.ndim > 0:
            # one scalar reciprocal instead of a fixed-point sweep over every component
            return num * _divide(1.0, den)
    b0 = den.data[..., 0]
    if np.any(b0 == 0):
        raise NonSmoothPoint("division by a jet with zero value")
    if not isinstance(num, Jet):
        num = Jet.constant(np.broadcast_to(np.asarray(num, float), den.shape), den.space)
    db = Jet(den.space, den.data.copy())
    db.data[..., 0] = 0.0
    # q = (num - q*db) / b0 gains one correct degree per sweep.
    q = Jet(num.space, num.data / b0[..., None])
    for _ in range(den.space.max_degree):
        q = Jet(num.space, (num - q * db).data / b0[..., None])
    _check_finite(q.data, "division")
    return q


def _sqrt_coeffs(a0, kmax):
    if np.any(a0 <= 0):
        raise NonSmoothPoint("sqrt of a non-positive value")
    return [np.sqrt(a0)] + [_binom(0.5, k) * np.power(a0, 0.5 - k) for k in range(1, kmax + 1)]


def _binom(p: float, k: int) -> float:
    out = 1.0
    for j in range(k):
        out *= (p - j) / (j + 1)
    return out


def sqrt(a):
    if isinstance(a, Jet):
        return _compose(a, _sqrt_coeffs, "sqrt")
    if np.any(np.asarray(a) <= 0):
        raise NonSmoothPoint("sqrt of a non-positive value")
    return np.sqrt(a)


def exp(a):
    if isinstance(a, Jet):
        return _compose(
            a, lambda a0, K: [np.exp(a0) / math.factorial(k) for k in range(K + 1)], "exp"
        )
    return np.exp(a)


def log(a):
    def coeffs(a0, K):
        if np.any(a0 <= 0):
            raise NonSmoothPoint("log of a non-positive value")
        return [np.log(a0)] + [(-1) ** (k + 1) / (k * np.power(a0, k)) for k in range(1, K + 1)]

    if isinstance(a, Jet):
        return _compose(a, coeffs, "log")
    if np.any(np.asarray(a) <= 0):
        raise NonSmoothPoint("log of a non-positive value")
    return np.log(a)


def ipow(a, p: int):
    """Integer power by repeated multiplication (same rounding for floats and jets)."""
    if p == 0:
        return a * 0.0 + 1.0
    result = a
    for _ in range(p - 1):
        result = result * a
    return result


def power(a, p):
    p = float(p)
    if p.is_integer() and 0 <= p <= 16:
        return ipow(a, int(p))
    if p.is_integer() and -16 <= p < 0:
        return 1.0 / ipow(a, int(-p))
    if isinstance(a, Jet):
        def coeffs(a0, K):
            if np.any(a0 <= 0):
                raise NonSmoothPoint("non-integer power of a non-positive value")
            return [_binom(p, k) * np.power(a0, p - k) for k in range(K + 1)]
        return _compose(a, coeffs, "pow")
    if np.any(np.asarray(a) <= 0):
        raise NonSmoothPoint("non-integer power of a non-positive value")
    return np.power(a, p)


# -- tensor contraction ----------------------------------------------------

def contract(subscripts: str, a, b):
    """``einsum`` for two operands, each a :class:`Jet` or a plain array."""
    lhs, out = subscripts.replace(" ", "").split("->")
    sa, sb = lhs.split(",")
    z = _PAIR_AXIS
    if isinstance(a, Jet) and isinstance(b, Jet):
        a, b = a._coerce(b)
        s_ = a.space
        if s_.size == 1:
            data = np.einsum(f"{sa}{z},{sb}{z}->{out}{z}", a.data, b.data)
            return Jet(s_, data)
        ia, ib, smat = s_._mul
        prod = np.einsum(
            f"{sa}{z},{sb}{z}->{out}{z}", a.data[..., ia], b.data[..., ib], optimize=True
        )
        lead = prod.shape[:-1]
        flat = prod.reshape(-1, prod.shape[-1])
        data = np.ascontiguousarray((smat @ flat.T).T).reshape(lead + (s_.size,))
        return Jet(s_, data)
    if isinstance(a, Jet):
        return Jet(a.space, np.einsum(f"{sa}{z},{sb}->{out}{z}", a.data, np.asarray(b, float)))
    if isinstance(b, Jet):
        return Jet(b.space, np.einsum(f"{sa},{sb}{z}->{out}{z}", np.asarray(a, float), b.data))
    return np.einsum(subscripts, a, b)


def inv(a: Jet) -> Jet:
    """Inverse of a jet-valued square matrix (last two tensor axes)."""
    m0 = a.data[..., 0]
    cond = np.linalg.cond(m0)
    if not np.all(np.isfinite(cond)) or np.any(cond > 1e12):
        from .errors import SingularMetric

        raise SingularMetric(f"matrix condition number {np.max(cond):.3g} exceeds 1e12")
    m0inv = np.linalg.inv(m0)
    d = Jet(a.space, a.data.copy())
    d.data[..., 0] = 0.0
    # (M0 + D)^-1 = sum_k (-M0^-1 D)^k M0^-1 ; D is nilpotent in the jet algebra.
    step = -contract("...ij,...jk->...ik", m0inv, d)
    term = Jet.constant(m0inv, a.space)
    total = term
    for _ in range(a.space.max_degree):
        term = contract("...ij,...jk->...ik", step, term)
        total = total + term
    return total


def stack(jets: Sequence[Jet], axis: int = 0) -> Jet:
    ox = min(j.space.ox for j in jets)
    oy = min(j.space.oy for j in jets)
    jets = [j.truncate(ox, oy) for j in jets]
    if axis < 0:
        axis = jets[0].ndim + 1 + axis
    return Jet(jets[0].space, np.stack([j.data for j in jets], axis=axis))


# -- public entry points ---------------------------------------------------

def lift(f, at, req, domain=None) -> Jet:
    """Evaluate ``f(x, y)`` on coordinate jets of order ``req = (x_order, y_order)``.

    ``f`` receives sequences of scalar jets and must use only arithmetic and
    the functions of this module.  ``domain``, if given, is an object with a
    ``check(x, y)`` method raising :class:`DomainError`.
    """
    x0, y0 = (np.asarray(v, dtype=float) for v in at)
    if domain is not None:
        domain.check(x0, y0)
    if not np.any(y0):
        raise DomainError("y must be non-zero")
    ox, oy = (req.x_order, req.y_order) if hasattr(req, "x_order") else req
    s_ = space(len(x0), ox, oy)
    x, y = Jet.variables(x0, y0, s_)
    out = f(list(x), list(y))
    if not isinstance(out, Jet):
        out = Jet.constant(out, s_)
    _check_finite(out.data, "lift result")
    return out


def _coord(name: str) -> tuple[str, int]:
    group, idx = name[0], int(name[1:]) - 1
    if group not in "xy" or idx < 0:
        raise ValueError(f"bad coordinate name {name!r}")
    return group, idx


def fd_oracle(f, at, which_coord, order: int = 1, step: float = 1e-5, domain=None) -> float:
    """Central finite-difference estimate of a first or second partial of ``f``.

    ``which_coord`` is a coordinate name such as ``"x1"`` or ``"y2"`` (1-based),
    or a pair of names for a mixed second derivative.  Truncation error is
    O(step**2).
    """
    if step <= 0:
        raise ValueError("step must be positive")
    if isinstance(which_coord, str):
        coords = [which_coord] * order
    else:
        coords = list(which_coord)
        order = len(coords)
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    x0, y0 = (np.asarray(v, dtype=float) for v in at)

    def ev(shifts):
        x, y = x0.copy(), y0.copy()
        for name, s in shifts:
            g, i = _coord(name)
            (x if g == "x" else y)[i] += s
        if domain is not None:
            domain.check(x, y)
        return f(x, y)

    h = step
    if order == 1:
        c = coords[0]
        return (ev([(c, h)]) - ev([(c, -h)])) / (2 * h)
    c1, c2 = coords
    if c1 == c2:
        return (ev([(c1, h)]) - 2 * ev([]) + ev([(c1, -h)])) / (h * h)
    return (
        ev([(c1, h), (c2, h)]) - ev([(c1, h), (c2, -h)])
        - ev([(c1, -h), (c2, h)]) + ev([(c1, -h), (c2, -h)])
    ) / (4 * h * h)
