import math

import numpy as np
import pytest

from rmatld.diagnostics import (cartan_convergence, clt_diagnostic, draw_words,
                                iwasawa_convergence, lyapunov_spectrum,
                                regularity_decay, regularity_profile)
from rmatld.geometry import DualPoint, ProjPoint

SEED = 17


@pytest.fixture(scope="module")
def y_support():
    # orthogonal to a direction inside the stationary support
    return DualPoint.from_angle(0.626 + math.pi / 2.0)


def test_draw_words_deterministic_and_valid(fib2, solves):
    w1 = draw_words(fib2, solves[1.0], 0.7, 15, 100, SEED)
    w2 = draw_words(fib2, solves[1.0], 0.7, 15, 100, SEED)
    assert np.array_equal(w1, w2)
    assert w1.shape == (100, 15)
    assert w1.min() >= 0 and w1.max() < fib2.m


def test_plain_words_match_weights(fib2):
    words = draw_words(fib2, None, 0.7, 50, 2000, SEED)
    freq = words.mean()
    assert abs(freq - 0.5) < 0.01


def test_regularity_profile_fits_positive_exponent(fib2, solves, y_support):
    prof = regularity_profile(fib2, solves[1.0], y_support,
                              0.3 * 0.7**np.arange(8), 20_000, SEED)
    assert prof.fitted_rate is not None and prof.fitted_rate > 0
    assert prof.rate_ci[0] > 0
    # ball mass decreases with radius
    probs = prof.empirical_probs
    assert all(b <= a for a, b in zip(probs, probs[1:]))


def test_regularity_profile_requires_decreasing_grid(fib2, solves, y_support):
    with pytest.raises(ValueError):
        regularity_profile(fib2, solves[1.0], y_support, np.array([0.1, 0.2]),
                           100, SEED)


def test_regularity_decay_positive_rate(fib2, solves, x0, y_support):
    dec = regularity_decay(fib2, solves[1.0], x0, y_support, 0.3, 30, 25,
                           20_000, SEED)
    assert dec.fitted_rate is not None and dec.fitted_rate > 0


def test_clt_diagnostic_fields(fib2, solves, rate):
    x = ProjPoint.from_angle(math.pi / 4)
    f = DualPoint.from_angle(math.pi / 4)
    out = clt_diagnostic(fib2, solves[1.0], rate, x, f, 100, 20_000, SEED)
    assert 0 <= out["ks"] < 0.1
    assert out["mean_err"] < 5 * out["mean_stderr"] + 1e-4
    assert out["dropped"] == 0


def test_lyapunov_determinant_identity(fib2):
    est = lyapunov_spectrum(fib2, None, 200, 400, SEED)
    # unimodular generators: exponents are exactly opposite per path
    assert est.lambda1 + est.lambda2 == pytest.approx(0.0, abs=1e-12)
    assert est.gap_ci[0] > 0


def test_lyapunov_tilted_tracks_drift(fib2, solves, rate):
    est = lyapunov_spectrum(fib2, solves[1.0], 1000, 300, SEED)
    assert est.lambda1 == pytest.approx(rate.q_of(1.0), abs=1e-3)


def test_cartan_statistics(fib2, x0):
    rows = cartan_convergence(fib2, None, x0, (20, 40, 80), 500, SEED)
    # diagonal ratio tracks -2 lambda1 n for unimodular generators
    for row in rows:
        per_n = row["mean_log_a_ratio"] / row["n"]
        assert per_n == pytest.approx(-1.8312, abs=0.02)
    # the right frame converges: increments shrink
    incs = [r["mean_density_increment"] for r in rows[1:]]
    assert incs[-1] < incs[0]
    assert all(r["mean_defect"] < 1e-12 for r in rows)


def test_iwasawa_majorant_and_moment_decay(fib2):
    rows = iwasawa_convergence(fib2, None, list(range(1, 13)), 0.5, 500, SEED)
    assert all(r["majorant_holds_fraction"] == 1.0 for r in rows)
    moments = [r["alpha_moment"] for r in rows[:-1]]
    assert all(b < a for a, b in zip(moments, moments[1:]))


def test_dimension_guards(fib2):
    with pytest.raises(ValueError):
        lyapunov_spectrum(fib2, None, 50, 10, SEED)  # n too small
