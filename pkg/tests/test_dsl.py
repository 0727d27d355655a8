import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from finslercurv import dsl, jets
from finslercurv.errors import ArityError, DslError, DslSyntaxError, UnknownIdentifier


@pytest.mark.parametrize(
    "src, exc, line, col",
    [
        ("sqrt(y1 +)", DslSyntaxError, 1, 10),
        ("y1 $ 2", DslSyntaxError, 1, 4),
        ("a = 1\nb = foo(y1)\nb", UnknownIdentifier, 2, 5),
        ("q + y1", UnknownIdentifier, 1, 1),
        ("y5", UnknownIdentifier, 1, 1),
        ("dot(y)", ArityError, 1, 1),
    ],
)
def test_errors_carry_position(src, exc, line, col):
    with pytest.raises(exc) as info:
        dsl.parse(src, 3, {})
    assert (info.value.line, info.value.column) == (line, col)


def test_scalar_vector_mismatch():
    with pytest.raises(DslError):
        dsl.parse("norm(y) + x", 2, {})


def test_precedence_and_unary_minus():
    p = dsl.parse("-y1^2 + 2*3^2/3", 1, {})
    assert dsl.evaluate(p, [0.0], [3.0], {}) == pytest.approx(-9.0 + 6.0)


def test_assignments_and_vector_params():
    p = dsl.parse("s = 1 + dot(a, x)\nnorm(y) / s", 2, {"a": (1.0, 2.0)})
    v = dsl.evaluate(p, [0.1, 0.2], [3.0, 4.0], {"a": (1.0, 2.0)})
    assert v == pytest.approx(5.0 / 1.5)


def test_same_tree_on_jets():
    p = dsl.parse("sqrt(norm2(y) + x1^2)", 2, {})
    J = jets.lift(lambda x, y: dsl.evaluate(p, x, y, {}), ([0.5, 0.0], [1.0, 2.0]), (1, 1))
    r = math.sqrt(1 + 4 + 0.25)
    assert J.value == pytest.approx(r)
    assert J.partial(x=[0]) == pytest.approx(0.5 / r)
    assert J.partial(x=[0], y=[1]) == pytest.approx(-0.5 * 2.0 / r ** 3)


_atoms = st.sampled_from(["x1", "x2", "y1", "y2", "1.5", "2", "c"])
_exprs = st.recursive(
    _atoms,
    lambda sub: st.one_of(
        st.tuples(sub, st.sampled_from(["+", "-", "*", "/", "^"]), sub).map(lambda t: f"({t[0]} {t[1]} {t[2]})"),
        sub.map(lambda s: f"-{s}"),
        sub.map(lambda s: f"exp({s})"),
        st.just("dot(y, y)"),
        st.just("norm(y)"),
    ),
    max_leaves=8,
)


@settings(max_examples=60, deadline=None)
@given(_exprs)
def test_unparse_round_trip(src):
    params = {"c": 0.25}
    p = dsl.parse(src, 2, params)
    text = dsl.unparse(p)
    p2 = dsl.parse(text, 2, params)
    assert dsl.strip_positions(p2) == dsl.strip_positions(p)
    assert dsl.unparse(p2) == text
