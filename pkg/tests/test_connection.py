import numpy as np
import pytest

from dwfinsler import base1, base2, fiber1, fixture
from dwfinsler.connection import (adapted_derivative, connection_fiber_residuals,
                                  frame_brackets, horizontal_coefficients,
                                  horizontal_residuals, nonlinear_connection,
                                  spray, spray_decomposition_residual)
from dwfinsler.engine import workspace
from dwfinsler.errors import PreconditionError
from conftest import region


def test_spray_vanishes_on_flat_product(fixp):
    for p in region("FIX-P", 3):
        assert np.max(np.abs(spray(fixp, p).values)) == 0.0


def test_spray_hand_values(fix1d, p1d):
    for method in ("generic", "product"):
        s = spray(fix1d, p1d, method)
        assert s.values[0] == pytest.approx(0.5, abs=1e-9)
        assert s.values[1] == pytest.approx(-0.5, abs=1e-9)


@pytest.mark.parametrize("name", ["FIX-1D", "FIX-E", "FIX-P", "FIX-R"])
def test_spray_decomposition_agreement(name):
    cfg = fixture(name)
    for p in region(name, 6):
        assert spray_decomposition_residual(cfg, p) <= 1e-9


def test_spray_two_homogeneity(fixe):
    for p in region("FIX-E", 4):
        a = spray(fixe, p).values
        b = spray(fixe, p.fiber_scaled(2.0)).values
        assert np.max(np.abs(b - 4.0 * a)) <= 1e-9


def test_nonlinear_connection_hand_values(fix1d, p1d):
    N = nonlinear_connection(fix1d, p1d).matrix
    assert np.allclose(N, [[0.5, 0.5], [-1.0, 0.0]], atol=1e-9)


def test_nonlinear_connection_vanishes_on_product(fixp, p4):
    assert np.max(np.abs(nonlinear_connection(fixp, p4).matrix)) == 0.0


@pytest.mark.parametrize("name", ["FIX-1D", "FIX-E", "FIX-R"])
def test_nonlinear_connection_closed_blocks(name):
    cfg = fixture(name)
    for p in region(name, 25):
        res = nonlinear_connection(cfg, p).closed_form_residuals()
        assert max(res.values()) <= 1e-8, res


def test_connection_degree_identity(fixe):
    # fiber contraction of the second derivative reproduces the connection
    for p in region("FIX-E", 6):
        ep = workspace(fixe).at(p).product
        lhs = np.einsum("abc,c->ab", ep.connection_fiber_values(), ep.fiber_values())
        assert np.max(np.abs(lhs - ep.nonlinear_connection_values())) <= 1e-8


def test_adapted_derivative_reduces_to_plain(fixe, p4):
    field = lambda c: c.x[0] ** 2 + 2.0 * c.u[0]
    assert adapted_derivative(fixe, p4, field, base1(0)) == pytest.approx(2.0 * p4.x[0],
                                                                          abs=1e-12)
    assert adapted_derivative(fixe, p4, field, base2(0)) == pytest.approx(2.0, abs=1e-12)
    nc = nonlinear_connection(fixe, p4)
    assert nc.delta(field, base1(0)) == pytest.approx(2.0 * p4.x[0], abs=1e-12)
    with pytest.raises(PreconditionError):
        adapted_derivative(fixe, p4, field, fiber1(0))


def test_norm_is_horizontally_constant(fixe):
    for p in region("FIX-E", 5):
        for d in fixe.base:
            assert abs(adapted_derivative(fixe, p, fixe.F2, d)) <= 1e-8


def test_adapted_derivative_on_product_is_plain(fixp, p4):
    field = lambda c: c.y[0] ** 2 * c.x[1]
    got = adapted_derivative(fixp, p4, field, base1(1))
    assert got == pytest.approx(p4.y[0] ** 2, abs=1e-12)


def test_brackets_on_product(fixp, p4):
    R, G = frame_brackets(fixp, p4)
    assert R.max_abs() == 0.0
    assert G.max_abs() == 0.0


def test_bracket_antisymmetry(fixr, p4):
    R, _ = frame_brackets(fixr, p4)
    assert np.max(np.abs(R.array + np.transpose(R.array, (0, 2, 1)))) == 0.0


def test_bracket_hand_value(fix1d, p1d):
    _, G = frame_brackets(fix1d, p1d)
    # second-factor fiber response to the first-factor block
    assert G.array[1, 0, 0] == pytest.approx(-1.0, abs=1e-9)


@pytest.mark.parametrize("name", ["FIX-1D", "FIX-E", "FIX-R"])
def test_connection_fiber_closed_blocks(name):
    cfg = fixture(name)
    for p in region(name, 25):
        res = connection_fiber_residuals(cfg, p)
        assert max(res.values()) <= 1e-8, res


def test_horizontal_flat_product(fixp, p4):
    assert horizontal_coefficients(fixp, p4).max_abs() == 0.0


def test_horizontal_symmetry_and_hand_value(fix1d, p1d, fixr, p4):
    H = horizontal_coefficients(fix1d, p1d).array
    assert H[0, 0, 1] == pytest.approx(0.5, abs=1e-9)
    Hr = horizontal_coefficients(fixr, p4).array
    assert np.max(np.abs(Hr - np.transpose(Hr, (0, 2, 1)))) == 0.0


@pytest.mark.parametrize("name", ["FIX-E", "FIX-R"])
def test_fiber_contraction_recovers_connection(name):
    cfg = fixture(name)
    for p in region(name, 6):
        ep = workspace(cfg).at(p).product
        lhs = np.einsum("c,abc->ab", ep.fiber_values(), ep.horizontal_values())
        assert np.max(np.abs(lhs - ep.nonlinear_connection_values())) <= 1e-8


@pytest.mark.parametrize("name", ["FIX-1D", "FIX-E", "FIX-R"])
def test_horizontal_closed_blocks(name):
    cfg = fixture(name)
    for p in region(name, 25):
        res = horizontal_residuals(cfg, p)
        assert max(res.values()) <= 1e-8, res


def test_projector_algebra(fixe):
    from dwfinsler.lifted import frame_vector
    rng = np.random.default_rng(3)
    for _ in range(10):
        X = frame_vector(fixe, rng.normal(size=2 * fixe.n))
        v = X.vertical_projector()
        h = X.horizontal_projector()
        assert np.array_equal(v.vertical_projector().comps, v.comps)
        assert np.array_equal(h.horizontal_projector().comps, h.comps)
        assert np.array_equal(v.comps + h.comps, X.comps)
        J = X.tangent_map()
        assert np.max(np.abs(J.tangent_map().comps)) == 0.0
        assert np.array_equal(h.tangent_map().vertical, X.horizontal)
        assert np.max(np.abs(J.horizontal)) == 0.0
