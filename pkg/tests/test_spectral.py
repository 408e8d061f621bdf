import numpy as np
import pytest

from rmatld.geometry import ProjPoint
from rmatld.spectral import (SpectralData, duality_residual, empirical_kappa,
                             perturbed_gap, solve_spectral, tilt_kernel,
                             tilt_kernel_defect)


def test_markov_case_is_exact(solves):
    data = solves[0.0]
    assert abs(data.kappa - 1.0) <= 1e-10
    assert np.max(np.abs(data.r_s - 1.0)) <= 1e-10


def test_kappa_at_one_matches_mean_matrix(fib2, solves):
    # E[g] has a positive dominant eigenvalue equal to kappa(1)
    mean_g = np.tensordot(fib2.weights, fib2.generators, axes=1)
    lead = max(np.linalg.eigvals(mean_g).real)
    assert solves[1.0].kappa == pytest.approx(lead, abs=2e-4)


def test_discretization_error_shrinks(fib2):
    mean_g = np.tensordot(fib2.weights, fib2.generators, axes=1)
    lead = max(np.linalg.eigvals(mean_g).real)
    errs = [abs(solve_spectral(fib2, 1.0, N=n).kappa - lead) for n in (128, 512)]
    assert errs[1] < errs[0]


def test_normalizations(solves):
    for data in solves.values():
        assert data.r_s.max() == pytest.approx(1.0)
        assert data.nu_s.sum() == pytest.approx(1.0)
        assert data.nu_s_star.sum() == pytest.approx(1.0)
        assert data.pi_s.sum() == pytest.approx(1.0)
        assert data.rho_s == pytest.approx(float(data.nu_s @ data.r_s))
        assert data.residual < 1e-10


def test_pi_is_nu_times_r_over_rho(solves):
    data = solves[1.0]
    assert np.allclose(data.pi_s, data.nu_s * data.r_s / data.rho_s, atol=1e-14)


def test_r_star_exact_matches_weighted_sum(solves):
    data = solves[0.5]
    phi = 0.3
    direct = float((np.abs(np.cos(data.grid.angles - phi))**0.5) @ data.nu_s)
    assert data.r_star_exact(phi) == pytest.approx(direct, rel=1e-12)


def test_json_round_trip(solves):
    data = solves[0.5]
    again = SpectralData.from_json(data.to_json())
    assert again.s == data.s
    assert again.kappa == data.kappa
    assert np.array_equal(again.r_s, data.r_s)
    assert np.array_equal(again.nu_s_star, data.nu_s_star)


def test_duality_residual_small_at_positive_tilt(fib2):
    data = solve_spectral(fib2, 1.0, N=512)
    assert duality_residual(data) < 1e-4


def test_tilt_kernel_rows_are_probabilities(fib2, solves):
    k = tilt_kernel(fib2, solves[1.0], ProjPoint.from_angle(0.7))
    assert np.all(k >= 0)
    assert k.sum() == pytest.approx(1.0)
    # the defect is limited by the interpolation error of r on the grid
    assert tilt_kernel_defect(fib2, solves[1.0], ProjPoint.from_angle(0.7)) < 1e-4


def test_perturbed_gap_unit_only_at_zero(fib2, solves):
    data = solves[1.0]
    assert perturbed_gap(fib2, data, 0.0) == pytest.approx(1.0, abs=1e-10)
    assert perturbed_gap(fib2, data, 2.0) < 1.0 - 1e-4


def test_empirical_kappa_consistent(fib2, solves):
    kap, se = empirical_kappa(fib2, 1.0, 20, 50_000, 3)
    assert abs(kap - solves[1.0].kappa) < 4 * se + 1e-3


def test_invalid_inputs(fib2):
    with pytest.raises(ValueError):
        solve_spectral(fib2, 1.0, tol=-1.0)
    with pytest.raises(ValueError):
        empirical_kappa(fib2, 1.0, 1, 10, 0)
