import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from riemext.lifts import (
    CotangentPoint,
    LiftVector,
    complete_lift_at,
    contracted_at,
    evaluation_fn,
    liouville_at,
    vertical_lift_at,
)
from riemext.manifold import OneFormSpec, VectorFieldSpec

X = VectorFieldSpec.parse(["x1*x2", "sin(x1) + x2^2"], 2)
Y = VectorFieldSpec.parse(["cos(x2)", "x1^3 - x2"], 2)
ALPHA = OneFormSpec.parse(["x2", "exp(x1)"], 2)

pts = st.tuples(
    st.lists(st.floats(-1, 1), min_size=2, max_size=2), st.lists(st.floats(-2, 2), min_size=2, max_size=2)
).map(lambda t: CotangentPoint(t[0], t[1]))


def directional(fn, p, U, h=1e-6):
    """Central difference of a function on T*M along the bundle vector U."""
    z = p.coords()
    n = p.n
    up, dn = z + h * U.array(), z - h * U.array()
    return (fn(CotangentPoint(up[:n], up[n:])) - fn(CotangentPoint(dn[:n], dn[n:]))) / (2 * h)


def bracket_val(X, Y, x):
    Xl, Yl = X.at(x), Y.at(x)
    return Yl.d1 @ Xl.val - Xl.d1 @ Yl.val


@given(pts)
def test_complete_lift_acts_by_bracket(p):
    # X^C (iota Y) = iota [X, Y]
    d = directional(lambda q: evaluation_fn(Y, q), p, complete_lift_at(X, p))
    assert d == pytest.approx(float(p.omega @ bracket_val(X, Y, p.x)), abs=1e-7)


@given(pts)
def test_vertical_lift_acts_by_pairing(p):
    d = directional(lambda q: evaluation_fn(Y, q), p, vertical_lift_at(ALPHA, p))
    assert d == pytest.approx(float(ALPHA.at(p.x).val @ Y.at(p.x).val), abs=1e-7)


@given(pts)
def test_liouville_is_euler_field_on_fibres(p):
    d = directional(lambda q: evaluation_fn(Y, q), p, liouville_at(p))
    assert d == pytest.approx(evaluation_fn(Y, p), abs=1e-7)


@given(pts)
def test_contracted_field(p):
    T = np.array([[1.0, 2.0], [-0.5, 3.0]])
    d = directional(lambda q: evaluation_fn(Y, q), p, contracted_at(T, p))
    assert d == pytest.approx(float(p.omega @ T @ Y.at(p.x).val), abs=1e-7)


def test_lift_vector_arithmetic():
    u = LiftVector(np.array([1.0, 2.0]), np.array([3.0, 4.0]))
    v = LiftVector.from_array([0.5, 0.5, 0.5, 0.5])
    assert ((u + v) - v).array().tolist() == u.array().tolist()
    assert (2 * u).array().tolist() == [2.0, 4.0, 6.0, 8.0]
    assert (u / 2).array().tolist() == [0.5, 1.0, 1.5, 2.0]
    assert (-u + u).array().tolist() == LiftVector.zero(2).array().tolist()


def test_point_shape_checked():
    with pytest.raises(ValueError):
        CotangentPoint([0.0, 1.0], [1.0])
