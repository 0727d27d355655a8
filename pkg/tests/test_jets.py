import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from finslercurv import jets
from finslercurv.errors import DomainError, NonSmoothPoint
from finslercurv.jets import Jet, contract, fd_oracle, lift

coord = st.floats(-1.5, 1.5, allow_nan=False)


def test_bilinear_monomial():
    J = lift(lambda x, y: x[0] * y[0], ([0.3, -0.2], [1.1, 0.4]), (1, 1))
    assert J.partial(x=[0], y=[0]) == 1.0
    assert J.partial(x=[1], y=[0]) == 0.0


def test_norm_first_and_second_partials():
    J = lift(lambda x, y: jets.sqrt(y[0] * y[0] + y[1] * y[1]), ([0.0, 0.0], [3.0, 4.0]), (0, 2))
    assert J.value == pytest.approx(5.0)
    assert J.partial(y=[0]) == pytest.approx(3 / 5, abs=1e-15)
    assert J.partial(y=[0, 0]) == pytest.approx(16 / 125, abs=1e-15)


def test_lmu_x_gradient_vanishes_at_origin():
    from finslercurv import builtin

    spec = builtin("lmu", 2, mu=1.0)
    J = spec.lift([0.0, 0.0], [1.0, 0.0], 1, 0)
    fd = fd_oracle(spec, ([0.0, 0.0], [1.0, 0.0]), "x1")
    assert abs(J.partial(x=[0])) < 1e-15
    assert abs(fd) < 1e-9


def test_schwarz_symmetry_by_storage():
    f = lambda x, y: jets.exp(x[0] * y[1]) * jets.sqrt(1 + y[0] * y[0] + x[1] * x[1])
    J = lift(f, ([0.2, 0.1], [0.7, -0.3]), (2, 3))
    assert J.partial(x=[0, 1], y=[1]) == J.partial(x=[1, 0], y=[1])
    assert J.partial(y=[0, 1, 1]) == J.partial(y=[1, 0, 1]) == J.partial(y=[1, 1, 0])


@settings(max_examples=30, deadline=None)
@given(coord, coord, st.floats(0.3, 2.0))
def test_chain_and_product_rules_against_closed_form(a, b, c):
    # f = exp(a x) / (c + y^2), second mixed partials known in closed form
    x0, y0 = b, a + 2.0
    J = lift(lambda x, y: jets.exp(x[0] * a) / (y[0] * y[0] + c), ([x0], [y0]), (2, 2))
    u = math.exp(a * x0)
    v = 1 / (c + y0 * y0)
    dv = -2 * y0 * v * v
    d2v = (6 * y0 * y0 - 2 * c) * v ** 3
    assert J.value == pytest.approx(u * v, rel=1e-12)
    assert J.partial(x=[0]) == pytest.approx(a * u * v, rel=1e-12, abs=1e-14)
    assert J.partial(x=[0], y=[0]) == pytest.approx(a * u * dv, rel=1e-12, abs=1e-14)
    assert J.partial(y=[0, 0]) == pytest.approx(u * d2v, rel=1e-10, abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.lists(coord, min_size=3, max_size=3), st.lists(coord, min_size=3, max_size=3))
def test_arithmetic_matches_fd_oracle(xs, ys):
    ys = [v + (2.0 if i == 0 else 0.0) for i, v in enumerate(ys)]

    def f(x, y):
        r = y[0] * y[0] + y[1] * y[1] + y[2] * y[2] + x[0] * x[1]
        return jets.sqrt(r + 3.0) * jets.exp(x[2] / 4) - y[1] / (2 + x[0] * x[0]) + jets.log(r + 5.0)

    def fnum(x, y):
        r = y[0] ** 2 + y[1] ** 2 + y[2] ** 2 + x[0] * x[1]
        return math.sqrt(r + 3.0) * math.exp(x[2] / 4) - y[1] / (2 + x[0] ** 2) + math.log(r + 5.0)

    at = (xs, ys)
    J = lift(f, at, (2, 2))
    for c in ("x1", "x3", "y1", "y2"):
        g, i = c[0], int(c[1]) - 1
        jet_d = J.partial(**{g: [i]})
        assert jet_d == pytest.approx(fd_oracle(fnum, at, c), rel=1e-6, abs=1e-7)
        jet_dd = J.partial(**{g: [i, i]})
        assert jet_dd == pytest.approx(fd_oracle(fnum, at, c, order=2, step=1e-4), rel=1e-4, abs=1e-5)
    mixed = J.partial(x=[0], y=[1])
    assert mixed == pytest.approx(fd_oracle(fnum, at, ("x1", "y2"), step=1e-4), rel=1e-4, abs=1e-5)


def test_power_and_ipow():
    J = lift(lambda x, y: jets.power(y[0], 2.5) + jets.ipow(y[0], 3), ([0.0], [1.3]), (0, 3))
    t = 1.3
    assert J.partial(y=[0, 0, 0]) == pytest.approx(2.5 * 1.5 * 0.5 * t ** -0.5 + 6.0, rel=1e-13)


def test_tensor_jets_inverse_and_contract():
    s = jets.space(2, 1, 2)
    x, y = Jet.variables([0.1, 0.2], [1.0, 0.5], s)
    m = jets.stack([jets.stack([2 + y[0] * y[0], x[0] * y[1]]), jets.stack([x[0] * y[1], 3 + y[1]])])
    mi = jets.inv(m)
    eye = contract("ij,jk->ik", m, mi)
    assert np.allclose(eye.data[..., 0], np.eye(2), atol=1e-14)
    assert np.allclose(eye.data[..., 1:], 0.0, atol=1e-13)


def test_grad_appends_last_axis():
    s = jets.space(3, 1, 2)
    _, y = Jet.variables([0, 0, 0], [1.0, 2.0, 3.0], s)
    v = jets.stack([y[0] * y[1], y[2]])
    gy = v.grad_y()
    assert gy.shape == (2, 3)
    assert np.allclose(gy.value, [[2.0, 1.0, 0.0], [0.0, 0.0, 1.0]])


def test_errors():
    with pytest.raises(DomainError):
        lift(lambda x, y: y[0], ([0.0], [0.0]), (0, 1))
    with pytest.raises(NonSmoothPoint):
        lift(lambda x, y: jets.sqrt(y[0] - 1.0), ([0.0], [1.0]), (0, 1))
    with pytest.raises(NonSmoothPoint):
        lift(lambda x, y: 1.0 / (y[0] - 1.0), ([0.0], [1.0]), (0, 1))
