"""Pruebas del ensamblado de mediciones"""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from domain.entities.domain import (
    BasisFamily, Density, DomainParameterError, EmptyIndexSetError, EnsembleTooLargeError,
    FunctionOracle, IndexSet, SamplingMode
)
from domain.services.index_sets import hyperbolic_cross
from domain.services.measurement import (
    COLUMN_NORM_Z_THRESHOLD, assemble, column_norm_check, derive_seed, function_block,
    isotropy_deviation, measurement_cost, points_for_budget, q_scaling, sample_points, tau_k,
    tau_weights, tensor_design
)

def expansion(family, index_set, coefficients):
    """Oráculo exacto Σ x_n φ_n con su gradiente"""

    def value(points):
        return tensor_design(family, index_set, points)[0] @ coefficients

    def gradient(points):
        partials = tensor_design(family, index_set, points)[1]
        return np.stack([partials[k] @ coefficients for k in range(index_set.dimension)], axis=1)

    return FunctionOracle("expansion", index_set.dimension, value, gradient)

class TestSeeds:

    def test_pure_function_of_labels(self):
        assert derive_seed(7, "trial", 3) == derive_seed(7, "trial", 3)
        assert derive_seed(7, "trial", 3) != derive_seed(7, "trial", 4)
        assert derive_seed(7, "points") != derive_seed(8, "points")

    def test_sample_points_deterministic(self, uniform):
        first = sample_points(uniform, 3, 10, seed=42)
        second = sample_points(uniform, 3, 10, seed=42)
        assert first.points.shape == (10, 3)
        assert first.seed == 42
        assert_allclose(first.points, second.points)

    def test_negative_count_rejected(self, uniform):
        with pytest.raises(DomainParameterError):
            sample_points(uniform, 2, -1)

class TestTau:

    def test_matching_density(self, legendre):
        points = np.array([[0.5, -0.25], [0.0, 0.9]])
        tau = tau_weights(legendre, Density.matching(legendre), points)
        assert_allclose(tau[:, 0], 1.0)
        assert_allclose(tau[:, 1:], 1 - points ** 2)

    def test_single_point(self, chebyshev):
        mu = Density.matching(chebyshev)
        assert tau_k(chebyshev, mu, [0.5, 0.1], 1) == pytest.approx(0.75)
        with pytest.raises(DomainParameterError):
            tau_k(chebyshev, mu, [0.5, 0.1], 3)
        with pytest.raises(DomainParameterError):
            tau_k(chebyshev, mu, [1.0, 0.1], 0)

class TestTensorDesign:

    def test_partials_match_finite_differences(self, legendre, rng):
        index_set = hyperbolic_cross(2, 4)
        points = rng.uniform(-0.8, 0.8, (6, 2))
        _, partials = tensor_design(legendre, index_set, points)
        h = 1e-6
        for k in range(2):
            step = np.zeros(2)
            step[k] = h
            forward = tensor_design(legendre, index_set, points + step)[0]
            backward = tensor_design(legendre, index_set, points - step)[0]
            assert_allclose(partials[k], (forward - backward) / (2 * h), atol=1e-6)

    def test_fourier_is_complex(self, fourier):
        values, _ = tensor_design(fourier, hyperbolic_cross(2, 2, signed=True), np.zeros((3, 2)))
        assert np.iscomplexobj(values)
        assert_allclose(values, 1.0)

    def test_dimension_mismatch(self, legendre):
        with pytest.raises(DomainParameterError):
            tensor_design(legendre, hyperbolic_cross(2, 3), np.zeros((4, 3)))

    def test_q_scaling(self, legendre):
        index_set = IndexSet(2, ((0, 0), (1, 2)))
        assert_allclose(q_scaling(legendre, index_set), [1.0, 3.0])

class TestCost:

    @pytest.mark.parametrize("mode,m,expected", [
        (SamplingMode.unaugmented(), 10, (10, 0, 10)),
        (SamplingMode.full_gradient(), 10, (10, 10, 20)),
        (SamplingMode.independent_gradient(), 4, (4, 4, 8)),
        (SamplingMode.fractional(0.25), 10, (10, 3, 13)),
        (SamplingMode.fractional(0.1), 30, (30, 3, 33)),
    ])
    def test_measurement_cost(self, mode, m, expected):
        assert measurement_cost(mode, m) == expected

    @pytest.mark.parametrize("mode,budget,expected", [
        (SamplingMode.unaugmented(), 5, 5),
        (SamplingMode.full_gradient(), 7, 3),
        (SamplingMode.full_gradient(), 8, 4),
        (SamplingMode.fractional(0.25), 10, 8),
        (SamplingMode.full_gradient(), 1, 1),
    ])
    def test_points_for_budget(self, mode, budget, expected):
        assert points_for_budget(mode, budget) == expected

    def test_invalid_fraction(self):
        with pytest.raises(DomainParameterError):
            SamplingMode.fractional(1.5)

class TestAssemble:

    @pytest.fixture
    def setup(self, legendre, rng):
        index_set = hyperbolic_cross(2, 3)
        coefficients = rng.standard_normal(len(index_set))
        mu = Density.matching(legendre)
        return legendre, mu, index_set, coefficients, expansion(legendre, index_set, coefficients)

    def test_full_gradient_blocks(self, setup):
        family, mu, index_set, coefficients, oracle = setup
        points = sample_points(mu, 2, 12, seed=1)
        ensemble = assemble(family, mu, index_set, points, oracle, SamplingMode.full_gradient())
        assert ensemble.block_sizes == (12, 12, 12)
        assert ensemble.rows == 36
        assert ensemble.m_tilde == 24
        assert_allclose(ensemble.matrix, ensemble.a_bar / ensemble.q)
        # Consistencia: Ā x = y para funciones en el espacio generado
        assert_allclose(ensemble.a_bar @ coefficients, ensemble.rhs, atol=1e-12)
        assert_allclose(ensemble.matrix @ (ensemble.q * coefficients), ensemble.rhs, atol=1e-12)

    def test_function_block_same_in_all_modes(self, setup):
        family, mu, index_set, _, oracle = setup
        points = sample_points(mu, 2, 10, seed=3)
        plain = assemble(family, mu, index_set, points, oracle, SamplingMode.unaugmented())
        full = assemble(family, mu, index_set, points, oracle, SamplingMode.full_gradient())
        assert plain.block_sizes == (10,)
        assert_allclose(plain.q, 1.0)
        assert_allclose(function_block(plain), function_block(full))

    def test_fractional_random_subset(self, setup):
        family, mu, index_set, coefficients, oracle = setup
        points = sample_points(mu, 2, 20, seed=5)
        mode = SamplingMode.fractional(0.5, random_subset=True)
        ensemble = assemble(family, mu, index_set, points, oracle, mode, rng=np.random.default_rng(9))
        assert ensemble.m_g == 10
        assert ensemble.block_sizes == (20, 10, 10)
        assert ensemble.gradient_points.size == 10
        assert_allclose(ensemble.a_bar @ coefficients, ensemble.rhs, atol=1e-12)

    def test_independent_gradient_points(self, setup):
        family, mu, index_set, coefficients, oracle = setup
        points = sample_points(mu, 2, 8, seed=11)
        gradient_points = sample_points(mu, 2, 8, seed=12)
        mode = SamplingMode.independent_gradient()
        ensemble = assemble(family, mu, index_set, points, oracle, mode, gradient_points)
        assert_allclose(ensemble.gradient_points.points, gradient_points.points)
        assert_allclose(ensemble.a_bar @ coefficients, ensemble.rhs, atol=1e-12)
        with pytest.raises(DomainParameterError):
            assemble(family, mu, index_set, points, oracle, mode)

    def test_memory_budget(self, setup):
        family, mu, index_set, _, oracle = setup
        points = sample_points(mu, 2, 50, seed=0)
        with pytest.raises(EnsembleTooLargeError):
            assemble(family, mu, index_set, points, oracle, SamplingMode.full_gradient(),
                     memory_budget_bytes=1024)

    def test_empty_index_set(self, setup):
        family, mu, _, _, oracle = setup
        points = sample_points(mu, 2, 5, seed=0)
        with pytest.raises(EmptyIndexSetError):
            assemble(family, mu, IndexSet(2, ()), points, oracle, SamplingMode.unaugmented())

class TestIsotropy:

    @pytest.mark.parametrize("family", [BasisFamily.legendre(), BasisFamily.chebyshev()])
    def test_near_identity_for_large_m(self, family):
        index_set = hyperbolic_cross(2, 3)
        report = isotropy_deviation(family, Density.matching(family), index_set, 50_000, seed=3)
        assert report.spectral < 0.15
        assert report.max_entry <= report.spectral + 1e-12

    def test_chebyshev_sampling_for_legendre(self, legendre):
        index_set = hyperbolic_cross(1, 4)
        report = isotropy_deviation(legendre, Density.chebyshev(), index_set, 50_000, seed=1)
        assert report.spectral < 0.15

    def test_deviation_decays_with_m(self, legendre):
        index_set = hyperbolic_cross(2, 3)
        mu = Density.matching(legendre)
        means = [
            np.mean([isotropy_deviation(legendre, mu, index_set, m, seed=seed).spectral
                     for seed in range(5)])
            for m in (1_000, 10_000, 100_000)
        ]
        for previous, current in zip(means, means[1:]):
            assert 1.3 < previous / current < 8.0
        assert 3.0 < means[0] / means[2] < 30.0

class TestColumnNorms:

    @pytest.mark.parametrize("family", [BasisFamily.legendre(), BasisFamily.chebyshev()])
    def test_unit_expected_norm(self, family):
        index_set = hyperbolic_cross(2, 3)
        report = column_norm_check(family, Density.matching(family), index_set, m=20,
                                   replicates=200, seed=5)
        assert report.mean.shape == (len(index_set),)
        assert report.max_z <= COLUMN_NORM_Z_THRESHOLD
        assert_allclose(report.mean, 1.0, atol=0.25)

    def test_constant_column_is_exact(self, legendre):
        report = column_norm_check(legendre, Density.matching(legendre), hyperbolic_cross(1, 3),
                                   m=10, replicates=5)
        assert report.mean[0] == pytest.approx(1.0, abs=1e-12)
        assert report.z_scores[0] < 1.0

    def test_requires_two_replicates(self, legendre):
        with pytest.raises(DomainParameterError):
            column_norm_check(legendre, Density.matching(legendre), hyperbolic_cross(1, 3),
                              replicates=1)
