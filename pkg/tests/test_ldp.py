import math

import numpy as np
import pytest

from rmatld.ldp import (WrongTailError, bahadur_rao_factors, bahadur_rao_lower,
                        bahadur_rao_upper, changed_measure_theory, llt_theory,
                        target_theory)
from rmatld.rate import cramer_h
from rmatld.targets import IntervalIndicator, PsiTable, TailIndicator

N = 40


def test_factors_multiply_to_value(solves, rate, x0, f):
    fac = bahadur_rao_factors(solves[1.0], rate, x0, f, N)
    recon = fac["prefactor"] * math.exp(-N * fac["rate"]) * fac["gaussian"]
    assert fac["value"] == pytest.approx(recon, rel=1e-15)
    assert 0 < fac["value"] < 1


def test_tail_sign_enforced(solves, rate, x0, f):
    with pytest.raises(WrongTailError):
        bahadur_rao_upper(solves[-0.2], rate, x0, f, N)
    with pytest.raises(WrongTailError):
        bahadur_rao_lower(solves[1.0], rate, x0, f, N)


def test_half_line_interval_equals_tail(solves, rate, x0, f):
    tail = bahadur_rao_upper(solves[1.0], rate, x0, f, N)
    interval = llt_theory(solves[1.0], rate, x0, f, N, 0.0, np.inf)
    assert interval == pytest.approx(tail, rel=1e-12)


def test_interval_additivity(solves, rate, x0, f):
    whole = llt_theory(solves[1.0], rate, x0, f, N, 0.0, 1.0)
    split = (llt_theory(solves[1.0], rate, x0, f, N, 0.0, 0.4)
             + llt_theory(solves[1.0], rate, x0, f, N, 0.4, 1.0))
    assert split == pytest.approx(whole, rel=1e-12)


def test_target_with_tail_indicator_reduces_to_tail(solves, rate, x0, f):
    phi = np.ones_like(solves[1.0].grid.angles)
    general = target_theory(solves[1.0], rate, x0, f, N, phi,
                            TailIndicator(upper=True))
    assert general == pytest.approx(bahadur_rao_upper(solves[1.0], rate, x0, f, N),
                                    rel=1e-12)


def test_target_with_interval_indicator_reduces_to_llt(solves, rate, x0, f):
    phi = np.ones_like(solves[1.0].grid.angles)
    general = target_theory(solves[1.0], rate, x0, f, N, phi,
                            IntervalIndicator(0.0, 1.0))
    assert general == pytest.approx(llt_theory(solves[1.0], rate, x0, f, N, 0.0, 1.0),
                                    rel=1e-12)


def test_target_requires_certificate(solves, rate, x0, f):
    phi = np.ones_like(solves[1.0].grid.angles)
    psi = PsiTable.from_function(lambda u: np.ones_like(u), 0.0, 1.0,
                                 certified=False)
    with pytest.raises(ValueError):
        target_theory(solves[1.0], rate, x0, f, N, phi, psi)


def test_level_offset_ratio_identity(solves, rate, x0, f):
    l = 1e-3
    th0 = bahadur_rao_upper(solves[1.0], rate, x0, f, N)
    th1 = bahadur_rao_upper(solves[1.0], rate, x0, f, N, l=l)
    expected = math.exp(-N * (1.0 * l + cramer_h(rate, 1.0, l)))
    assert th1 / th0 == pytest.approx(expected, rel=1e-12)


def test_changed_measure_reduces_to_plain_tail_at_zero(solves, rate, x0, f):
    reduced = changed_measure_theory(solves[0.0], solves[1.0], rate, x0, f, N)
    plain = bahadur_rao_upper(solves[1.0], rate, x0, f, N)
    assert reduced == pytest.approx(plain, rel=1e-12)


def test_changed_measure_tilt_order(solves, rate, x0, f):
    with pytest.raises(WrongTailError):
        changed_measure_theory(solves[1.0], solves[0.5], rate, x0, f, N,
                               tail="upper")


def test_monotone_decay_in_n(solves, rate, x0, f):
    vals = [bahadur_rao_upper(solves[1.0], rate, x0, f, n) for n in (20, 40, 80)]
    assert vals[0] > vals[1] > vals[2] > 0
