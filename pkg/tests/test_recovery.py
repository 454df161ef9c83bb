"""Pruebas del caso de uso de recuperación y de los errores Monte Carlo"""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from domain.entities.domain import (
    Approximant, Density, DomainParameterError, IndexSet, SamplingMode
)
from domain.services.index_sets import hyperbolic_cross, intrinsic_weights
from application.use_cases.recovery_use_case import (
    approximant_gradient, approximant_values, basis_function_oracle, create_recovery_use_case,
    expansion_oracle, h1_error, h1_error_estimate, linf_error, optimization_weights, recover
)

@pytest.fixture
def sparse_target(legendre):
    index_set = hyperbolic_cross(2, 5)
    coefficients = np.zeros(len(index_set))
    for n, value in (((0, 0), 1.0), ((1, 0), -0.5), ((0, 1), 0.25)):
        coefficients[index_set.position(n)] = value
    return index_set, coefficients, expansion_oracle(legendre, index_set, coefficients)

class TestWeights:

    def test_theta_zero_is_unweighted(self, legendre):
        index_set = hyperbolic_cross(2, 3)
        assert_allclose(optimization_weights(legendre, Density.matching(legendre), index_set, 0.0), 1.0)

    def test_theta_one_is_intrinsic(self, legendre):
        mu = Density.matching(legendre)
        index_set = hyperbolic_cross(2, 3)
        assert_allclose(optimization_weights(legendre, mu, index_set, 1.0),
                        intrinsic_weights(legendre, mu, index_set))

    def test_negative_theta(self, legendre):
        with pytest.raises(DomainParameterError):
            optimization_weights(legendre, Density.matching(legendre), hyperbolic_cross(1, 2), -1.0)

class TestApproximant:

    def test_values_and_gradient(self, legendre):
        index_set = IndexSet(1, ((0,), (1,)))
        approx = Approximant(legendre, index_set, np.array([2.0, 1.0]))
        points = np.array([[0.5], [-1.0]])
        # φ_1(y) = √3·y
        assert_allclose(approximant_values(approx, points), 2.0 + math.sqrt(3) * points[:, 0])
        assert_allclose(approximant_gradient(approx, points), math.sqrt(3))

    def test_basis_function_oracle(self, legendre):
        oracle = basis_function_oracle(legendre, (0, 2))
        assert oracle.evaluate(np.array([[0.3, 1.0]]))[0] == pytest.approx(math.sqrt(5))

    def test_coefficients_must_align(self, legendre):
        with pytest.raises(DomainParameterError):
            Approximant(legendre, hyperbolic_cross(1, 3), np.ones(2))

class TestErrors:

    def test_exact_approximant_has_zero_error(self, legendre, sparse_target):
        index_set, coefficients, oracle = sparse_target
        approx = Approximant(legendre, index_set, coefficients)
        mu = Density.matching(legendre)
        assert h1_error(oracle, approx, mu, 200, seed=1) == pytest.approx(0.0, abs=1e-12)
        assert linf_error(oracle, approx, 200, seed=1) == pytest.approx(0.0, abs=1e-12)

    def test_h1_error_of_single_mode(self, legendre):
        # ‖φ_(1,0)‖_{H̃¹}² = 1 + λ_1 = 3
        mu = Density.matching(legendre)
        index_set = hyperbolic_cross(2, 1)
        approx = Approximant(legendre, index_set, np.zeros(len(index_set)))
        estimate = h1_error_estimate(basis_function_oracle(legendre, (1, 0)), approx, mu, 50_000, seed=2)
        assert estimate.value == pytest.approx(math.sqrt(3), abs=5 * estimate.standard_error + 0.02)
        assert estimate.grid_size == 50_000

    def test_linf_grows_with_grid(self, legendre):
        approx = Approximant(legendre, hyperbolic_cross(2, 1), np.zeros(3))
        oracle = basis_function_oracle(legendre, (2, 0))
        assert linf_error(oracle, approx, 10, seed=5) <= linf_error(oracle, approx, 40, seed=5)

    def test_grid_must_be_positive(self, legendre, sparse_target):
        index_set, coefficients, oracle = sparse_target
        approx = Approximant(legendre, index_set, coefficients)
        with pytest.raises(DomainParameterError):
            linf_error(oracle, approx, -3)

class TestRecover:

    def test_recovers_sparse_expansion(self, legendre, sparse_target):
        index_set, coefficients, oracle = sparse_target
        mu = Density.matching(legendre)
        result = recover(oracle, legendre, mu, 2, 5, len(index_set), SamplingMode.full_gradient(),
                         theta=1.0, eta=0.0, seed=11)
        assert result.diagnostics.m_tilde == 2 * len(index_set)
        assert result.diagnostics.seed == 11
        assert_allclose(result.approximant.coefficients, coefficients, atol=1e-6)

    def test_same_seed_same_result(self, legendre, sparse_target):
        _, _, oracle = sparse_target
        mu = Density.matching(legendre)
        mode = SamplingMode.fractional(0.5)
        first = recover(oracle, legendre, mu, 2, 5, 8, mode, seed=3)
        second = recover(oracle, legendre, mu, 2, 5, 8, mode, seed=3)
        assert_allclose(first.approximant.coefficients, second.approximant.coefficients)
        assert first.diagnostics.m_g == 4

    def test_unaugmented_needs_no_gradient(self, legendre):
        index_set = hyperbolic_cross(2, 3)
        base = expansion_oracle(legendre, index_set, np.eye(len(index_set))[0])
        oracle = type(base)(name="value-only", dimension=2, value=base.value)
        result = recover(oracle, legendre, Density.matching(legendre), 2, 3, 12,
                         SamplingMode.unaugmented(), seed=0)
        assert result.diagnostics.m_g == 0
        assert result.diagnostics.m_tilde == 12

    def test_evaluate_reports_grid(self, legendre, sparse_target):
        index_set, coefficients, oracle = sparse_target
        use_case = create_recovery_use_case()
        report = use_case.evaluate(oracle, Approximant(legendre, index_set, coefficients),
                                   Density.matching(legendre), seed=4)
        assert report.grid_size == 4 * len(index_set)
        assert report.h1_error == pytest.approx(0.0, abs=1e-12)

    def test_dimension_mismatch(self, legendre, sparse_target):
        _, _, oracle = sparse_target
        with pytest.raises(DomainParameterError):
            recover(oracle, legendre, Density.matching(legendre), 3, 5, 10, SamplingMode.full_gradient())
