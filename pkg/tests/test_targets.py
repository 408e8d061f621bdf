import math

import numpy as np
import pytest

from rmatld.targets import (IntervalIndicator, PsiTable, TailIndicator,
                            gaussian_tail_window, gaussian_window)


def test_tail_window_at_zero_is_half():
    assert gaussian_tail_window(0.0) == pytest.approx(0.5)


def test_tail_window_asymptote():
    z = 50.0
    assert gaussian_tail_window(z) == pytest.approx(1.0 / (z * math.sqrt(2 * math.pi)),
                                                    rel=1e-3)


def test_window_additive_over_intervals():
    s, v = 0.7, 2.3
    whole = gaussian_window(s, v, -1.0, 2.0)
    split = gaussian_window(s, v, -1.0, 0.4) + gaussian_window(s, v, 0.4, 2.0)
    assert split == pytest.approx(whole, rel=1e-14)


def test_window_full_line_is_mgf():
    s, v = 0.7, 2.3
    assert gaussian_window(s, v, -np.inf, np.inf) == pytest.approx(
        math.exp(0.5 * s * s * v), rel=1e-12)


def test_half_line_window_equals_tail_window():
    s, v = 1.3, 0.8
    assert gaussian_window(s, v, 0.0, np.inf) == pytest.approx(
        gaussian_tail_window(s * math.sqrt(v)), rel=1e-12)


def test_tail_indicator_values_and_signs():
    upper = TailIndicator(upper=True)
    assert np.array_equal(upper(np.array([-1.0, 0.0, 1.0])), [0.0, 1.0, 1.0])
    lower = TailIndicator(upper=False)
    assert np.array_equal(lower(np.array([-1.0, 0.0, 1.0])), [1.0, 1.0, 0.0])
    with pytest.raises(ValueError):
        upper.tilted_integral(-0.5, 1.0)
    with pytest.raises(ValueError):
        lower.tilted_integral(0.5, 1.0)


def test_interval_indicator_requires_order():
    with pytest.raises(ValueError):
        IntervalIndicator(1.0, 1.0)


def test_psi_table_zero_outside_support():
    table = PsiTable.from_function(lambda u: np.ones_like(u), 0.0, 1.0)
    assert table(np.array([-0.5, 0.5, 1.5])).tolist() == [0.0, 1.0, 0.0]
    assert table(np.array([-np.inf]))[0] == 0.0


def test_psi_table_integral_matches_indicator_window():
    s, v = 1.0, 0.2
    a1, a2 = 0.1, 0.9
    indicator = IntervalIndicator(a1, a2)
    table = PsiTable.from_function(lambda u: np.ones_like(u), a1, a2, step=1e-4)
    assert table.tilted_integral(s, v) == pytest.approx(
        indicator.tilted_integral(s, v), rel=1e-6)


def test_psi_table_requires_certificate_flag():
    table = PsiTable.from_function(lambda u: np.ones_like(u), 0.0, 1.0,
                                   certified=False)
    assert table.certified is False
