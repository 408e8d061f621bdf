import json

import numpy as np
import pytest

from rmatld.model import MatrixModel, matrix_functionals, validate_model
from tests.conftest import FIB2


def test_from_dict_round_trip(fib2):
    again = MatrixModel.from_dict(fib2.to_dict())
    assert np.array_equal(again.generators, fib2.generators)
    assert np.array_equal(again.weights, fib2.weights)
    assert again.dimension == 2 and again.m == 2


def test_from_file(tmp_path, fib2):
    path = tmp_path / "model.json"
    path.write_text(json.dumps(FIB2))
    model = MatrixModel.from_file(path)
    assert np.array_equal(model.generators, fib2.generators)


def test_labels(fib2):
    assert fib2.label(0) == "A" and fib2.label(1) == "B"


def test_weights_must_sum_to_one():
    bad = dict(FIB2, weights=[0.5, 0.6])
    with pytest.raises(ValueError):
        MatrixModel.from_dict(bad)


def test_singular_generator_rejected_by_functionals():
    with pytest.raises(ValueError):
        matrix_functionals(np.array([[1.0, 2.0], [2.0, 4.0]]))


def test_matrix_functionals_values():
    g = np.diag([2.0, 0.5])
    norm, iota, n_g = matrix_functionals(g)
    assert norm == pytest.approx(2.0)
    assert iota == pytest.approx(0.5)
    assert n_g == pytest.approx(2.0)


def test_validate_fib2(fib2):
    report = validate_model(fib2)
    assert report.proximal_witness == "A"
    assert report.irreducibility_pass
    assert report.n_g_moment > 1.0
    assert all(np.isfinite(v) for v in report.moment_values.values())


def test_validate_rotation_model_not_proximal(similarity):
    # pure similarities are never proximal: equal singular values
    report = validate_model(similarity, max_word_len=2)
    assert report.proximal_witness is None
    assert not report.irreducibility_pass
