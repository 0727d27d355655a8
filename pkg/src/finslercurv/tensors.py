"""Dense small tensors with slot variance, plus contraction helpers.

The helpers work on plain arrays and on :class:`~finslercurv.jets.Jet`
tensors alike, which is what lets scalar fields extracted from curvature
be differentiated again.
"""

from __future__ import annotations

import string
from dataclasses import dataclass

import numpy as np

from .errors import VarianceError
from .jets import Jet, contract

UPPER = "u"
LOWER = "l"


@dataclass(frozen=True)
class Tensor:
    """Component array with one variance flag per slot (``"u"`` or ``"l"``)."""

    data: np.ndarray
    variance: str

    def __post_init__(self):
        if not set(self.variance) <= {UPPER, LOWER}:
            raise VarianceError(f"bad variance string {self.variance!r}")
        if np.ndim(self.data) != len(self.variance):
            raise VarianceError(
                f"variance {self.variance!r} does not match array rank {np.ndim(self.data)}"
            )

    @property
    def dims(self) -> tuple[int, ...]:
        return np.shape(self.data)

    @property
    def rank(self) -> int:
        return len(self.variance)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.data, dtype=dtype)


def _letters(k, skip=""):
    return [c for c in string.ascii_lowercase if c not in skip][:k]


def apply_slotwise(data, variance: str, up_op, low_op):
    """Contract each slot with a 2-tensor: ``up_op[i, a] T[..a..]`` or ``T[..a..] low_op[a, b]``."""
    if variance is None or len(variance) != (data.ndim if isinstance(data, Jet) else np.ndim(data)):
        raise VarianceError("slot metadata missing or inconsistent")
    out = data
    rank = len(variance)
    idx = _letters(rank)
    for slot, v in enumerate(variance):
        new = "z"
        src = "".join(idx)
        dst = "".join(idx[:slot] + [new] + idx[slot + 1:])
        if v == UPPER:
            out = contract(f"{new}{idx[slot]},{src}->{dst}", up_op, out)
        else:
            out = contract(f"{src},{idx[slot]}{new}->{dst}", out, low_op)
    return out


def dual(data, variance: str, g, ginv):
    """Every covariant slot raised with ``g^-1`` and every contravariant slot lowered with ``g``."""
    # raising slot a of T_..a.. : g^{za} T_..a..  == T_..a.. (g^-1)[a, z] (symmetric)
    return apply_slotwise(data, variance, g, ginv)


def inner(a, b, variance: str, g, ginv):
    """``g``-induced inner product of two tensors of the same type."""
    bd = dual(b, variance, g, ginv)
    idx = "".join(_letters(len(variance)))
    return contract(f"{idx},{idx}->", a, bd)


def norm(data, variance: str, g, ginv) -> float:
    v = inner(data, data, variance, g, ginv)
    v = v.value if isinstance(v, Jet) else float(v)
    return float(np.sqrt(max(v, 0.0)))


def antisym_pattern(hbar):
    """``hbar(X,Z) hbar(Y,W) - hbar(Y,Z) hbar(X,W)`` as an array indexed ``[X, Y, Z, W]``."""
    t = contract("ac,bd->abcd", hbar, hbar)
    return t - t.transpose(1, 0, 2, 3)
