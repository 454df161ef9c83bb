"""Pruebas de conjuntos de índices, pesos intrínsecos y K(s)"""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from domain.entities.domain import (
    BasisFamily, Density, DivergentSupremumError, IndexSet, IndexSetTooLargeError, KMode,
    MissingWeightError, SearchBudgetExceededError, UnsupportedParametersError
)
from domain.services.index_sets import (
    K_of_s, K_of_s_table, best_lower_s_term, grid_supremum, hyperbolic_cross,
    hyperbolic_cross_size, hyperbolic_cross_size_bound, intrinsic_weight, intrinsic_weight_1d,
    intrinsic_weights, is_lower, k_bound_exponent, kappa_1d, lower_closure, lower_sets,
    union_of_lower_sets, weighted_cardinality
)

class TestHyperbolicCross:

    def test_one_dimensional(self):
        index_set = hyperbolic_cross(1, 5)
        assert list(index_set) == [(n,) for n in range(6)]

    def test_two_dimensional_members(self):
        index_set = hyperbolic_cross(2, 3)
        expected = {(0, 0), (1, 0), (2, 0), (3, 0), (0, 1), (0, 2), (0, 3), (1, 1)}
        assert index_set.as_set() == expected

    def test_graded_order(self):
        index_set = hyperbolic_cross(3, 6)
        degrees = [sum(n) for n in index_set]
        assert degrees == sorted(degrees)
        assert index_set[0] == (0, 0, 0)

    @pytest.mark.parametrize("d,s", [(1, 1), (2, 7), (3, 10), (4, 10), (5, 4)])
    def test_size_matches_construction(self, d, s):
        index_set = hyperbolic_cross(d, s)
        assert len(index_set) == hyperbolic_cross_size(d, s)
        assert all(math.prod(k + 1 for k in n) <= s + 1 for n in index_set)
        assert is_lower(index_set)

    @pytest.mark.parametrize("d,s", [(2, 10), (4, 10), (6, 5)])
    def test_size_bound(self, d, s):
        assert hyperbolic_cross_size(d, s) <= hyperbolic_cross_size_bound(d, s)

    def test_signed_variant(self):
        index_set = hyperbolic_cross(1, 2, signed=True)
        assert index_set.as_set() == {(0,), (1,), (-1,), (2,), (-2,)}
        assert len(hyperbolic_cross(2, 3, signed=True)) == hyperbolic_cross_size(2, 3, signed=True)

    def test_size_cap(self):
        with pytest.raises(IndexSetTooLargeError):
            hyperbolic_cross(4, 10, max_size=10)

    def test_invalid_arguments(self):
        with pytest.raises(ValueError):
            hyperbolic_cross(0, 3)

    @pytest.mark.parametrize("d", [1, 2, 3])
    @pytest.mark.parametrize("s", range(1, 7))
    def test_equals_union_of_lower_sets(self, d, s):
        assert hyperbolic_cross(d, s).as_set() == union_of_lower_sets(d, s + 1)

    def test_union_uses_size_s_plus_1(self):
        # con |Δ| ≤ s solo se alcanza hasta grado s−1 en d=1
        assert union_of_lower_sets(1, 5) == {(n,) for n in range(5)}
        assert len(hyperbolic_cross(1, 5)) == 6

    def test_signed_union_of_lower_sets(self):
        assert hyperbolic_cross(1, 2, signed=True).as_set() == union_of_lower_sets(1, 3, signed=True)
        assert hyperbolic_cross(2, 3, signed=True).as_set() == union_of_lower_sets(2, 4, signed=True)

    def test_lower_sets_enumeration(self):
        # en d=2 los inferiores de tamaño k son las particiones de k: 1 + 2 + 3 + 5
        found = list(lower_sets(2, 4))
        assert len(found) == 11
        assert len(set(found)) == 11
        assert all(is_lower(delta) and len(delta) <= 4 for delta in found)

class TestLowerSets:

    def test_is_lower(self):
        assert is_lower([(0, 0), (1, 0), (0, 1), (1, 1)])
        assert not is_lower([(0, 0), (1, 1)])

    def test_closure(self):
        assert lower_closure([(2, 1)]) == {(0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (2, 1)}

    def test_weighted_cardinality(self):
        weights = {(0,): 1.0, (1,): 2.0}
        assert weighted_cardinality([(0,), (1,)], weights) == pytest.approx(5.0)
        with pytest.raises(MissingWeightError):
            weighted_cardinality([(2,)], weights)

    def test_best_lower_s_term_prefers_lower_set(self):
        x = {(0,): 1.0, (1,): 0.1, (2,): 5.0}
        result = best_lower_s_term(x, None, 2)
        # {0, 2} no es inferior: el mejor conjunto de dos índices es {0, 1}
        assert result.index_set.as_set() == {(0,), (1,)}
        assert result.sigma == pytest.approx(5.0)
        assert result.exact

    def test_best_lower_s_term_full_support(self):
        x = {(0, 0): 1.0, (1, 0): -2.0, (0, 1): 0.5}
        result = best_lower_s_term(x, {n: 2.0 for n in x}, 3)
        assert result.sigma == pytest.approx(0.0)

    def test_greedy_fallback_is_flagged(self):
        x = {(0,): 1.0, (1,): 1.0, (2,): 1.0}
        result = best_lower_s_term(x, None, 2, force_greedy=True)
        assert not result.exact
        assert len(result.index_set) <= 2

    def test_best_lower_s_term_two_dimensional(self):
        x = {(0, 0): 5.0, (1, 0): 3.0, (1, 1): 4.0}
        result = best_lower_s_term(x, None, 2)
        assert result.index_set.as_set() == {(0, 0), (1, 0)}
        assert result.sigma == pytest.approx(4.0)

    @pytest.mark.parametrize("seed", range(6))
    @pytest.mark.parametrize("s", [3, 5])
    def test_exact_never_worse_than_greedy(self, seed, s):
        rng = np.random.default_rng(seed)
        support = list(hyperbolic_cross(2, 6))
        x = {n: float(rng.standard_normal()) for n in support}
        v = {n: 1.0 + 2.0 * float(rng.random()) for n in support} if seed % 2 else None
        exact = best_lower_s_term(x, v, s)
        greedy = best_lower_s_term(x, v, s, force_greedy=True)
        assert exact.exact and not greedy.exact
        assert exact.sigma <= greedy.sigma + 1e-12
        for result in (exact, greedy):
            assert is_lower(result.index_set)
            assert len(result.index_set) <= s

class TestIntrinsicWeights:

    @pytest.mark.parametrize("n", [0, 1, 3, 10])
    def test_legendre(self, legendre, n):
        assert intrinsic_weight_1d(legendre, Density.matching(legendre), n) == pytest.approx(
            math.sqrt(2 * n + 1), rel=1e-6)

    @pytest.mark.parametrize("n,expected", [(0, 1.0), (1, math.sqrt(2)), (7, math.sqrt(2))])
    def test_chebyshev(self, chebyshev, n, expected):
        assert intrinsic_weight_1d(chebyshev, Density.matching(chebyshev), n) == pytest.approx(
            expected, rel=1e-6)

    def test_fourier_is_one(self, fourier, uniform):
        assert intrinsic_weight(fourier, uniform, (3, -2)) == 1.0

    def test_tensor_product(self, legendre):
        mu = Density.matching(legendre)
        assert intrinsic_weight(legendre, mu, (1, 2)) == pytest.approx(math.sqrt(15), rel=1e-6)

    def test_vector_aligned_with_index_set(self, legendre):
        mu = Density.matching(legendre)
        index_set = IndexSet(2, ((0, 0), (1, 0), (0, 2)))
        assert_allclose(intrinsic_weights(legendre, mu, index_set),
                        [1.0, math.sqrt(3), math.sqrt(5)], rtol=1e-6)

    def test_legendre_under_chebyshev_sampling_is_bounded(self, legendre):
        # Con muestreo de Chebyshev √(ν/μ)|φ_n| queda acotado por √3 para n ≥ 1
        weights = [intrinsic_weight_1d(legendre, Density.chebyshev(), n) for n in (1, 5, 20)]
        assert max(weights) < 2.5

    def test_divergent_supremum(self):
        with pytest.raises(DivergentSupremumError):
            grid_supremum(lambda y: 1.0 / (1.0 - np.abs(y) + 1e-300), include_endpoints=False,
                          start=16, max_points=256)

class TestKappa:

    @pytest.mark.parametrize("n", [1, 4, 15])
    def test_chebyshev_kappa_equals_eigenvalue(self, chebyshev, n):
        assert kappa_1d(chebyshev, Density.matching(chebyshev), n) == pytest.approx(n * n, rel=1e-5)

    def test_legendre_kappa_is_below_eigenvalue(self, legendre):
        mu = Density.matching(legendre)
        for n in (1, 5, 20):
            assert kappa_1d(legendre, mu, n) <= n * (n + 1) * 0.5 + 1e-6

    def test_constant_has_zero_kappa(self, legendre):
        assert kappa_1d(legendre, Density.matching(legendre), 0) == 0.0

class TestKOfS:

    @pytest.mark.parametrize("s", [1, 2, 5, 8])
    def test_legendre_one_dimensional(self, legendre, s):
        assert K_of_s(legendre, Density.matching(legendre), 1, s) == pytest.approx(s * s, rel=1e-6)

    @pytest.mark.parametrize("s", [1, 3, 6])
    def test_chebyshev_one_dimensional(self, chebyshev, s):
        assert K_of_s(chebyshev, Density.matching(chebyshev), 1, s) == pytest.approx(2 * s - 1, rel=1e-6)

    def test_chebyshev_bound_value(self, chebyshev):
        mu = Density.matching(chebyshev)
        assert K_of_s(chebyshev, mu, 3, 4, KMode.BOUND) == pytest.approx(9.0)
        assert K_of_s(chebyshev, mu, 3, 4) == pytest.approx(9.0, rel=1e-6)

    @pytest.mark.parametrize("family", [BasisFamily.legendre(), BasisFamily.chebyshev()])
    def test_exact_below_bound(self, family):
        mu = Density.matching(family)
        table = K_of_s_table(family, mu, 3, 8)
        assert table == sorted(table)
        gamma = k_bound_exponent(family, mu)
        for s, value in enumerate(table, start=1):
            assert value <= s ** gamma * (1 + 1e-9)

    def test_fourier_is_linear(self, fourier, uniform):
        assert K_of_s(fourier, uniform, 2, 6) == pytest.approx(6.0)

    def test_search_budget(self, legendre):
        mu = Density.matching(legendre)
        with pytest.raises(SearchBudgetExceededError):
            K_of_s_table(legendre, mu, 7, 9, search_cap=50)

    def test_bound_exponents(self, legendre):
        assert k_bound_exponent(legendre, Density.matching(legendre)) == 2.0
        jacobi = BasisFamily.jacobi(1.0, 2.0)
        assert k_bound_exponent(jacobi, Density.matching(jacobi)) == 6.0

    def test_unsupported_bound(self):
        family = BasisFamily.jacobi(0.3, 0.2)
        with pytest.raises(UnsupportedParametersError):
            k_bound_exponent(family, Density.matching(family))
        with pytest.raises(UnsupportedParametersError):
            k_bound_exponent(BasisFamily.legendre(), Density.chebyshev())
