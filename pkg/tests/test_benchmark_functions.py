"""Pruebas de las funciones de prueba y su validación por diferencias finitas"""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from domain.entities.domain import (
    BenchmarkFunction, DomainParameterError, FunctionOracle, OracleEvaluationError,
    OracleValidationError
)
from domain.services import benchmark_functions as benchmarks

class TestValues:

    @pytest.mark.parametrize("d", [1, 4, 8])
    def test_f3_at_origin(self, d):
        oracle = benchmarks.test_function(BenchmarkFunction.F3, d)
        assert oracle.evaluate(np.zeros((1, d)))[0] == pytest.approx(1.0)

    def test_f3_gradient_is_uniform(self, rng):
        d = 4
        oracle = benchmarks.test_function(BenchmarkFunction.F3, d)
        points = rng.uniform(-1, 1, (5, d))
        expected = -oracle.evaluate(points)[:, None] / (2 * d) * np.ones((1, d))
        assert_allclose(oracle.evaluate_gradient(points), expected)

    def test_f1_peak(self):
        oracle = benchmarks.test_function(BenchmarkFunction.F1, 2)
        peak = np.array([[-0.5, 1.0 / 3.0]])
        assert oracle.evaluate(peak)[0] == pytest.approx(1.0)
        assert_allclose(oracle.evaluate_gradient(peak), 0.0, atol=1e-14)

    def test_f2_at_origin(self):
        oracle = benchmarks.test_function(BenchmarkFunction.F2, 4)
        assert oracle.evaluate(np.zeros((1, 4)))[0] == pytest.approx(1.0)

    def test_f2_requires_even_dimension(self):
        with pytest.raises(DomainParameterError):
            benchmarks.test_function(BenchmarkFunction.F2, 3)

    def test_dimension_must_be_positive(self):
        with pytest.raises(DomainParameterError):
            benchmarks.test_function("F1", 0)

class TestGradientValidation:

    @pytest.mark.parametrize("function_id", list(BenchmarkFunction))
    @pytest.mark.parametrize("d", [2, 6])
    def test_analytic_gradients_pass(self, function_id, d):
        oracle = benchmarks.test_function(function_id, d, validate=False)
        assert benchmarks.validate_gradient(oracle) <= benchmarks.FD_TOLERANCE

    def test_wrong_gradient_is_rejected(self):
        oracle = FunctionOracle("wrong", 2, value=lambda y: np.sum(y ** 2, axis=1),
                                gradient=lambda y: np.zeros_like(y))
        with pytest.raises(OracleValidationError):
            benchmarks.validate_gradient(oracle)

    def test_bad_shape_is_reported(self):
        oracle = FunctionOracle("shape", 2, value=lambda y: np.ones((len(y), 2)))
        with pytest.raises(OracleEvaluationError):
            oracle.evaluate(np.zeros((3, 2)))

    def test_available_functions(self):
        assert benchmarks.available_functions() == ["F1", "F2", "F3"]
