"""Pruebas de coherencias locales, cotas cerradas y cotas de cola"""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from domain.entities.domain import (
    BasisFamily, CoherenceKind, Density, DomainParameterError, IndexSet
)
from domain.services.coherence import (
    coherence_sample_complexity, gamma1_bound, gamma2_bound, kappa_lambda_ratio,
    local_coherence, measurement_rows, tail_bound_check, upsilon_bound
)
from domain.services.index_sets import hyperbolic_cross, intrinsic_weights

@pytest.fixture
def chebyshev_setup(chebyshev):
    mu = Density.matching(chebyshev)
    delta = hyperbolic_cross(2, 2)
    return chebyshev, mu, delta, intrinsic_weights(chebyshev, mu, delta)

class TestMeasurementRows:

    def test_shape_and_function_row(self, legendre, rng):
        index_set = hyperbolic_cross(2, 3)
        points = rng.uniform(-1, 1, (5, 2))
        rows = measurement_rows(legendre, Density.matching(legendre), index_set, points)
        assert rows.shape == (5, 3, len(index_set))
        # φ_0 = 1: columna constante en el bloque de función, nula en los gradientes
        assert_allclose(rows[:, 0, 0], 1.0)
        assert_allclose(rows[:, 1:, 0], 0.0)

class TestEstimators:

    def test_upsilon_below_closed_bound(self, chebyshev_setup):
        family, mu, delta, _ = chebyshev_setup
        estimate = local_coherence(family, mu, delta, CoherenceKind.UPSILON, mc_samples=500)
        assert estimate.kind == CoherenceKind.UPSILON
        # Chebyshev: κ = λ, la cota es |Δ|_u = 1 + 4·2
        assert upsilon_bound(family, mu, delta) == pytest.approx(9.0, rel=1e-6)
        assert estimate.value <= 9.0 * (1 + 1e-6)
        assert estimate.value >= 1.0

    def test_gamma1_between_one_and_bound(self, chebyshev_setup):
        family, mu, delta, w = chebyshev_setup
        estimate = local_coherence(family, mu, delta, CoherenceKind.GAMMA1, w, mc_samples=500)
        assert 1.0 - 1e-6 <= estimate.value <= gamma1_bound(family, mu, delta, delta, w) + 1e-6

    def test_gamma2_below_bound(self, chebyshev_setup):
        family, mu, delta, w = chebyshev_setup
        estimate = local_coherence(family, mu, delta, CoherenceKind.GAMMA2, w, mc_samples=500)
        assert 0.0 < estimate.value <= gamma2_bound(family, mu, delta, delta, w) + 1e-6

    def test_fourier_constant(self, fourier, uniform):
        estimate = local_coherence(fourier, uniform, IndexSet.from_indices(1, [(0,)]),
                                   CoherenceKind.UPSILON, mc_samples=50)
        assert estimate.value == pytest.approx(1.0, abs=1e-12)
        assert estimate.converged

    def test_deterministic_given_seed(self, chebyshev_setup):
        family, mu, delta, w = chebyshev_setup
        first = local_coherence(family, mu, delta, CoherenceKind.GAMMA2, w, mc_samples=200, seed=4)
        second = local_coherence(family, mu, delta, CoherenceKind.GAMMA2, w, mc_samples=200, seed=4)
        assert first.value == second.value

    def test_delta_must_be_in_index_set(self, legendre):
        mu = Density.matching(legendre)
        with pytest.raises(DomainParameterError, match="contenido"):
            local_coherence(legendre, mu, IndexSet.from_indices(1, [(5,)]), CoherenceKind.UPSILON,
                            index_set=hyperbolic_cross(1, 3))

    def test_delta_size_limit(self, legendre):
        mu = Density.matching(legendre)
        with pytest.raises(DomainParameterError):
            local_coherence(legendre, mu, hyperbolic_cross(1, 30), CoherenceKind.UPSILON, max_delta=20)

    def test_weights_must_align(self, chebyshev_setup):
        family, mu, delta, _ = chebyshev_setup
        with pytest.raises(DomainParameterError):
            local_coherence(family, mu, delta, CoherenceKind.GAMMA1, np.ones(2))

class TestClosedForms:

    def test_gamma2_with_intrinsic_weights(self, chebyshev_setup):
        family, mu, delta, w = chebyshev_setup
        # Con w = u y κ = λ la razón vale 1: Γ₂ ≤ |Δ|_w = |Δ|_u
        assert gamma2_bound(family, mu, delta, delta, w) == pytest.approx(9.0, rel=1e-6)
        assert gamma1_bound(family, mu, delta, delta, w) == pytest.approx(9.0, rel=1e-6)

    def test_sample_complexity_formula(self):
        value = coherence_sample_complexity(2.0, 3.0, 100, 10.0, 0.1)
        log_n = math.log(1000)
        assert value == pytest.approx(2 * log_n + 3 * (log_n + math.log(10) * math.log(100)))

    @pytest.mark.parametrize("eps", [0.0, 1.0])
    def test_sample_complexity_rejects_eps(self, eps):
        with pytest.raises(DomainParameterError):
            coherence_sample_complexity(1.0, 1.0, 10, 2.0, eps)

class TestTailBounds:

    @pytest.mark.parametrize("family", [BasisFamily.legendre(), BasisFamily.chebyshev()])
    @pytest.mark.parametrize("n", [(0, 0), (2, 0), (1, 1), (0, 3)])
    def test_bounds_hold(self, family, n):
        report = tail_bound_check(family, Density.matching(family), n, grid_points=64)
        assert report.passed
        assert report.v == pytest.approx(math.sqrt(1 + sum(k * (k + 2 * family.alpha + 1) for k in n))
                                         * report.u)

    def test_kappa_ratio(self, legendre, chebyshev):
        assert kappa_lambda_ratio(chebyshev, Density.matching(chebyshev), 6) == pytest.approx(1.0, rel=1e-5)
        ratios = [kappa_lambda_ratio(legendre, Density.matching(legendre), n) for n in (1, 4, 16)]
        assert all(r <= 0.5 + 1e-6 for r in ratios)
        assert ratios[-1] < ratios[0]
