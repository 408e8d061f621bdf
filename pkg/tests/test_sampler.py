import numpy as np
import pytest

from rmatld.sampler import (changed_measure_estimator, enumerate_exact,
                            enumerate_expectation, importance_estimator,
                            target_estimator, tilted_walk, walk)
from rmatld.targets import TailIndicator

N_ENUM = 6
SAMPLES = 40_000


def test_walk_shapes_and_determinism(fib2, x0):
    t1 = walk(fib2, x0, 12, seed=5)
    t2 = walk(fib2, x0, 12, seed=5)
    assert t1.word == t2.word and t1.log_norm == t2.log_norm
    assert len(t1.word) == 12 and len(t1.x_path) == 13
    assert t1.log_norm > 0  # positive matrices grow
    assert walk(fib2, x0, 12, seed=6).word != t1.word


def test_tilted_walk_runs(fib2, solves, x0):
    traj = tilted_walk(fib2, solves[1.0], x0, 12, seed=5)
    assert len(traj.word) == 12
    assert traj.log_norm > 0
    assert np.isfinite(traj.weight_log)


def test_enumeration_total_probability(fib2, x0, f, solves):
    total = enumerate_expectation(fib2, x0, f, N_ENUM, lambda c, ln, th: 1.0)
    assert total == pytest.approx(1.0, rel=1e-12)
    tilted = enumerate_expectation(fib2, x0, f, N_ENUM, lambda c, ln, th: 1.0,
                                   tilt=solves[1.0])
    assert tilted == pytest.approx(1.0, rel=1e-12)


def test_enumeration_tails_are_complementary(fib2, x0, f):
    thr = N_ENUM * 0.9
    up = enumerate_exact(fib2, x0, f, N_ENUM, thr, tail="upper")
    lo = enumerate_exact(fib2, x0, f, N_ENUM, thr, tail="lower")
    # both tails include equality, so the overlap is the atom at thr
    atom = enumerate_expectation(fib2, x0, f, N_ENUM,
                                 lambda c, ln, th: (c == thr).astype(float))
    assert up + lo - atom == pytest.approx(1.0, rel=1e-12)


def test_importance_estimator_matches_enumeration(fib2, solves, rate, x0, f):
    q = rate.q_of(1.0)
    est = importance_estimator(fib2, solves[1.0], rate, x0, f, N_ENUM, q,
                               SAMPLES, 11, tail="upper")
    exact = enumerate_exact(fib2, x0, f, N_ENUM, N_ENUM * q, tail="upper")
    assert abs(est.value - exact) < 4 * est.stderr


def test_importance_estimator_lower_tail(fib2, solves, rate, x0, f):
    q = rate.q_of(-0.2)
    est = importance_estimator(fib2, solves[-0.2], rate, x0, f, N_ENUM, q,
                               SAMPLES, 12, tail="lower")
    exact = enumerate_exact(fib2, x0, f, N_ENUM, N_ENUM * q, tail="lower")
    assert abs(est.value - exact) < 4 * est.stderr


def test_changed_measure_estimator_matches_tilted_enumeration(fib2, solves,
                                                              rate, x0, f):
    est = changed_measure_estimator(fib2, solves[0.5], solves[1.0], rate, x0,
                                    f, N_ENUM, SAMPLES, 13, tail="upper")
    q_t = rate.q_of(1.0)
    exact = enumerate_exact(fib2, x0, f, N_ENUM, N_ENUM * q_t, tail="upper",
                            tilt=solves[0.5])
    assert abs(est.value - exact) < 4 * est.stderr


def test_target_estimator_with_tail_indicator_matches_importance(fib2, solves,
                                                                 rate, x0, f):
    q = rate.q_of(1.0)
    phi = np.ones_like(solves[1.0].grid.angles)
    est_t = target_estimator(fib2, solves[1.0], rate, x0, f, N_ENUM, q, phi,
                             TailIndicator(upper=True), SAMPLES, 14)
    est_i = importance_estimator(fib2, solves[1.0], rate, x0, f, N_ENUM, q,
                                 SAMPLES, 14, tail="upper")
    assert est_t.value == pytest.approx(est_i.value, rel=1e-12)


def test_estimator_determinism(fib2, solves, rate, x0, f):
    q = rate.q_of(1.0)
    a = importance_estimator(fib2, solves[1.0], rate, x0, f, 10, q, 5000, 21)
    b = importance_estimator(fib2, solves[1.0], rate, x0, f, 10, q, 5000, 21)
    assert a.value == b.value and a.stderr == b.stderr


def test_changed_measure_tilt_order_validated(fib2, solves, rate, x0, f):
    with pytest.raises(ValueError):
        changed_measure_estimator(fib2, solves[1.0], solves[0.5], rate, x0, f,
                                  10, 100, 1, tail="upper")


def test_wrong_sign_tilt_warns(fib2, solves, rate, x0, f):
    q = rate.q_of(-0.2)
    with pytest.warns(UserWarning):
        importance_estimator(fib2, solves[-0.2], rate, x0, f, 10, q, 100, 1,
                             tail="upper")


def test_enumeration_budget_guard(fib2, x0, f):
    with pytest.raises(ValueError):
        enumerate_exact(fib2, x0, f, 60, 0.0)
