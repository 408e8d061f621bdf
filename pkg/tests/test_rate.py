import math

import numpy as np
import pytest

from rmatld.rate import (OutOfDomainError, cramer_h, cramer_series,
                         lambda_star_at, legendre)


def test_lambda_zero_is_zero(rate):
    assert rate.lambda_at(0.0) == pytest.approx(0.0, abs=1e-9)


def test_q_is_increasing(rate):
    lo, hi = rate.valid_s_range
    ss = np.linspace(lo, hi, 40)
    qs = [rate.q_of(s) for s in ss]
    assert all(b > a for a, b in zip(qs, qs[1:]))


def test_sigma_positive(rate):
    for s in (-0.2, 0.0, 0.5, 1.0):
        assert rate.sigma_at(s) > 0.0


def test_legendre_inverts_q(rate):
    for s in (-0.2, 0.5, 1.0):
        q = rate.q_of(s)
        lam_star, s_root = legendre(rate, q)
        assert s_root == pytest.approx(s, abs=1e-6)
        assert lam_star == pytest.approx(s * q - rate.lambda_at(s), abs=1e-8)


def test_lambda_star_closed_form_matches_root_finding(rate):
    for s in (-0.2, 0.5, 1.0):
        lam_star, _ = legendre(rate, rate.q_of(s))
        assert lambda_star_at(rate, s) == pytest.approx(lam_star, abs=1e-8)


def test_lambda_star_nonnegative_and_zero_at_mean(rate):
    assert lambda_star_at(rate, 0.0) == pytest.approx(0.0, abs=1e-9)
    for s in (-0.2, 0.5, 1.0):
        assert lambda_star_at(rate, s) >= -1e-12


def test_out_of_domain_level_raises(rate):
    lo, hi = rate.q_range
    with pytest.raises(OutOfDomainError):
        legendre(rate, hi + 0.1)
    with pytest.raises(OutOfDomainError):
        legendre(rate, lo - 0.1)


def test_cramer_h_zero_at_zero_offset(rate):
    for s in (0.5, 1.0):
        assert cramer_h(rate, s, 0.0) == 0.0


def test_cramer_h_quadratic_leading_order(rate):
    s = 1.0
    sigma2 = rate.sigma_at(s) ** 2
    l = 1e-3
    # table and root-finding error leave slack beyond the l^2 leading term
    assert cramer_h(rate, s, l) == pytest.approx(l * l / (2 * sigma2), rel=0.5)


def test_cramer_series_orders(rate):
    vals = [cramer_series(rate, 1.0, 0.01, order=k) for k in (0, 1, 2)]
    assert all(np.isfinite(v) for v in vals)
    with pytest.raises(ValueError):
        cramer_series(rate, 1.0, 0.01, order=3)


def test_to_csv(tmp_path, rate):
    path = tmp_path / "rate.csv"
    rate.to_csv(path)
    header = path.read_text().splitlines()[0]
    assert header.startswith("s,lambda,d1")
