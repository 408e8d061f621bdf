import math

import numpy as np
import pytest

from rmatld.geometry import (CartanFrames, DualPoint, ProjPoint, act,
                             angular_distance, cartan, cocycle_sigma, delta,
                             iwasawa, wedge2_norm)

A = np.array([[2.0, 1.0], [1.0, 1.0]])
B = np.array([[1.0, 1.0], [1.0, 2.0]])


def test_projpoint_canonical_unit_and_sign():
    p = ProjPoint(np.array([-3.0, -4.0]))
    assert np.allclose(np.linalg.norm(p.rep), 1.0)
    assert p.rep[0] > 0
    assert p == ProjPoint(np.array([3.0, 4.0]))


def test_angle_round_trip():
    for theta in (0.0, 0.3, 1.2, math.pi - 1e-6):
        assert ProjPoint.from_angle(theta).angle == pytest.approx(theta, abs=1e-12)
    # angles are mod pi
    assert ProjPoint.from_angle(0.3 + math.pi).angle == pytest.approx(0.3)


def test_zero_vector_rejected():
    with pytest.raises(ValueError):
        ProjPoint(np.zeros(2))


def test_act_matches_direct_matrix_action():
    x = ProjPoint.from_angle(0.7)
    y = act(A, x)
    direct = A @ x.rep
    assert abs(abs(np.dot(y.rep, direct / np.linalg.norm(direct))) - 1.0) < 1e-12


def test_cocycle_additive_over_composition():
    x = ProjPoint.from_angle(0.7)
    lhs = cocycle_sigma(A @ B, x)
    rhs = cocycle_sigma(A, act(B, x)) + cocycle_sigma(B, x)
    assert lhs == pytest.approx(rhs, abs=1e-12)


def test_delta_bounds_and_orthogonality():
    x = ProjPoint.from_angle(0.3)
    assert delta(DualPoint.from_angle(0.3), x) == pytest.approx(1.0)
    assert delta(DualPoint.from_angle(0.3 + math.pi / 2), x) == pytest.approx(0.0, abs=1e-12)


def test_angular_distance_zero_iff_equal():
    x = ProjPoint.from_angle(0.4)
    assert angular_distance(x, x) == 0.0
    assert angular_distance(x, ProjPoint.from_angle(1.1)) > 0.1


def test_cartan_reconstructs_and_orders():
    fr = cartan(A @ B @ A)
    assert np.allclose(fr.reconstruct(), A @ B @ A, atol=1e-10)
    assert fr.a[0] >= fr.a[1] > 0


def test_cartan_rejects_singular():
    with pytest.raises(ValueError):
        cartan(np.array([[1.0, 0.0], [0.0, 0.0]]))


def test_iwasawa_reconstructs_with_unitriangular_factor():
    g = A @ B
    fr = iwasawa(g)
    assert np.allclose(fr.reconstruct(), g, atol=1e-10)
    assert fr.L[0, 0] == pytest.approx(1.0) and fr.L[1, 1] == pytest.approx(1.0)
    assert fr.L[0, 1] == pytest.approx(0.0, abs=1e-12)
    assert np.all(fr.A > 0)
    assert np.allclose(fr.K @ fr.K.T, np.eye(2), atol=1e-10)


def test_wedge2_norm_is_abs_det_for_2x2():
    g = 3.0 * A
    assert wedge2_norm(g) == pytest.approx(abs(np.linalg.det(g)), rel=1e-12)


def test_density_point_is_top_left_singular_direction():
    fr = cartan(A)
    u, _, _ = np.linalg.svd(A)
    assert abs(abs(np.dot(fr.density_point.rep, u[:, 0])) - 1.0) < 1e-12
