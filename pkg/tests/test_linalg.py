import numpy as np
import pytest

from dwfinsler import TangentSample, base1
from dwfinsler.errors import SingularMetricError
from dwfinsler.jets import jet_lift
from dwfinsler.linalg import invert_matrix


def test_hand_inverse_2x2():
    inv, cond = invert_matrix([[4.0, 7.0], [2.0, 6.0]])
    assert np.allclose(inv, [[0.6, -0.7], [-0.2, 0.4]])
    assert cond >= 1.0


def test_identity_roundtrip():
    a = [[2.0, 1.0, 0.0], [1.0, 3.0, 0.5], [0.0, 0.5, 1.5]]
    inv, _ = invert_matrix(a)
    assert np.allclose(np.array(a) @ np.array(inv), np.eye(3), atol=1e-14)


def test_singular_and_ill_conditioned_rejected():
    with pytest.raises(SingularMetricError):
        invert_matrix([[1.0, 2.0], [2.0, 4.0]])
    with pytest.raises(SingularMetricError):
        invert_matrix([[1.0, 1.0], [1.0, 1.0 + 1e-15]])


def test_jet_entries_carry_inverse_derivative():
    # d(A^{-1}) = -A^{-1} (dA) A^{-1}, checked against the jet elimination.
    p = TangentSample((0.3,), (0.0,), (1.0,), (1.0,))
    x = base1(0)
    entry = jet_lift(lambda c: 2.0 + c.x[0] ** 2, p, (x,), 1)
    rows = [[entry, 0.5], [0.5, 1.0]]
    inv, _ = invert_matrix(rows)
    a = np.array([[entry.value, 0.5], [0.5, 1.0]])
    da = np.array([[2.0 * 0.3, 0.0], [0.0, 0.0]])
    expected = -np.linalg.inv(a) @ da @ np.linalg.inv(a)
    got = np.array([[inv[i][j].partial([x]) if hasattr(inv[i][j], "partial") else 0.0
                     for j in range(2)] for i in range(2)])
    assert np.allclose(got, expected, atol=1e-12)
