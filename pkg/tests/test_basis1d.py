"""Pruebas de las bases unidimensionales"""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from domain.entities.domain import BasisFamily, Density, DomainParameterError
from domain.services.basis1d import (
    basis_deriv_table, basis_table, chi_over_mu, density_pdf, eigenvalue, eval_basis,
    eval_basis_deriv, gauss_quadrature, jacobi_mass, jacobi_max_value, jacobi_norm_const,
    jacobi_polynomials, nu_over_mu, sample_1d
)

JACOBI_FAMILIES = [
    BasisFamily.legendre(),
    BasisFamily.chebyshev(),
    BasisFamily.jacobi(1.0, 0.0),
    BasisFamily.jacobi(0.5, -0.3),
]

class TestConstants:

    def test_masses(self):
        assert jacobi_mass(0.0, 0.0) == pytest.approx(2.0)
        assert jacobi_mass(-0.5, -0.5) == pytest.approx(math.pi)
        assert jacobi_mass(1.0, 1.0) == pytest.approx(4.0 / 3.0)

    @pytest.mark.parametrize("n", [0, 1, 5, 30])
    def test_legendre_norm(self, n):
        assert jacobi_norm_const(0.0, 0.0, n) == pytest.approx(2.0 / (2 * n + 1))

    def test_norm_const_large_degree_is_finite(self):
        assert np.isfinite(jacobi_norm_const(0.3, 0.7, 500))

    def test_max_value(self):
        assert jacobi_max_value(0.0, 0.0, 7) == pytest.approx(1.0)
        assert jacobi_max_value(1.0, 0.0, 4) == pytest.approx(5.0)

    def test_invalid_parameters(self):
        with pytest.raises(DomainParameterError):
            jacobi_mass(-1.0, 0.0)
        with pytest.raises(DomainParameterError):
            BasisFamily.jacobi(0.0, -1.5)

class TestEvaluation:

    @pytest.mark.parametrize("n", [0, 1, 4, 12])
    def test_legendre_endpoint(self, legendre, n):
        assert eval_basis(legendre, n, 1.0) == pytest.approx(math.sqrt(2 * n + 1))

    @pytest.mark.parametrize("n", [1, 3, 9])
    def test_chebyshev_is_scaled_cosine(self, chebyshev, n):
        theta = np.linspace(0.1, 3.0, 17)
        assert_allclose(eval_basis(chebyshev, n, np.cos(theta)), math.sqrt(2) * np.cos(n * theta),
                        atol=1e-12)

    def test_chebyshev_constant(self, chebyshev):
        assert_allclose(eval_basis(chebyshev, 0, np.array([-0.3, 0.9])), [1.0, 1.0])

    def test_fourier_negative_degree(self, fourier):
        y = np.array([-0.5, 0.25])
        assert_allclose(eval_basis(fourier, -2, y), np.exp(-2j * np.pi * y))

    def test_table_shape(self, legendre):
        table = basis_table(legendre, [0, 2, 5], np.linspace(-1, 1, 11))
        assert table.shape == (11, 3)

    def test_negative_degree_rejected(self, legendre):
        with pytest.raises(DomainParameterError):
            eval_basis(legendre, -1, 0.0)

    def test_points_outside_domain_rejected(self, legendre):
        with pytest.raises(DomainParameterError):
            eval_basis(legendre, 2, 1.5)

    @pytest.mark.parametrize("family", JACOBI_FAMILIES + [BasisFamily.fourier()])
    def test_derivative_matches_finite_differences(self, family):
        y = np.linspace(-0.9, 0.9, 13)
        h = 1e-6
        for n in range(0, 8):
            numeric = (eval_basis(family, n, y + h) - eval_basis(family, n, y - h)) / (2 * h)
            exact = eval_basis_deriv(family, n, y)
            assert_allclose(exact, numeric, rtol=1e-6, atol=1e-6 * (1 + n * n))

    @pytest.mark.parametrize("family", JACOBI_FAMILIES)
    def test_reflection_symmetry(self, family):
        y = np.linspace(-1.0, 1.0, 1000)
        signs = (-1.0) ** np.arange(16)
        left = jacobi_polynomials(family.alpha, family.beta, 15, -y)
        right = jacobi_polynomials(family.beta, family.alpha, 15, y) * signs
        assert np.abs(left - right).max() <= 1e-12

    @pytest.mark.parametrize("family", JACOBI_FAMILIES)
    def test_reflection_symmetry_orthonormal(self, family):
        mirrored = BasisFamily.jacobi(family.beta, family.alpha)
        y = np.linspace(-0.95, 0.95, 9)
        for n in range(10):
            assert_allclose(eval_basis(family, n, -y), (-1) ** n * eval_basis(mirrored, n, y),
                            rtol=1e-10, atol=1e-10)

class TestOrthogonality:

    @pytest.mark.parametrize("family", JACOBI_FAMILIES + [BasisFamily.fourier()])
    def test_orthonormal_against_nu(self, family):
        degrees = list(range(-6, 7)) if family.is_fourier else list(range(15))
        nodes, weights = gauss_quadrature(family, 32)
        table = basis_table(family, degrees, nodes)
        gram = table.conj().T @ (weights[:, None] * table)
        assert_allclose(gram, np.eye(len(degrees)), atol=1e-10)

    @pytest.mark.parametrize("family", JACOBI_FAMILIES)
    def test_sobolev_orthogonality(self, family):
        degrees = list(range(21))
        nodes, weights = gauss_quadrature(family, 40)
        deriv = basis_deriv_table(family, degrees, nodes)
        gram = deriv.T @ ((weights * (1 - nodes ** 2))[:, None] * deriv)
        expected = np.diag([eigenvalue(family, n) for n in degrees])
        assert_allclose(gram, expected, atol=1e-8 * (1 + expected.max()))

    def test_quadrature_weights_sum_to_one(self, chebyshev, fourier):
        assert gauss_quadrature(chebyshev, 10)[1].sum() == pytest.approx(1.0)
        assert gauss_quadrature(fourier, 10)[1].sum() == pytest.approx(1.0)

class TestEigenvalues:

    def test_values(self, legendre, chebyshev, fourier):
        assert eigenvalue(legendre, 3) == 12.0
        assert eigenvalue(chebyshev, 3) == pytest.approx(9.0)
        assert eigenvalue(fourier, -2) == pytest.approx(4 * math.pi ** 2)

class TestDensities:

    def test_arcsine_pdf(self):
        assert density_pdf(Density.chebyshev(), 0.0) == pytest.approx(1 / math.pi)

    def test_matching_ratios(self, legendre):
        mu = Density.matching(legendre)
        y = np.array([-0.5, 0.0, 0.75])
        assert_allclose(nu_over_mu(legendre, mu, y), 1.0)
        assert_allclose(chi_over_mu(legendre, mu, y), 1 - y ** 2)

    def test_mismatched_ratio(self, legendre):
        y = np.array([0.0, 0.5])
        expected = 0.5 / (1 / (math.pi * np.sqrt(1 - y ** 2)))
        assert_allclose(nu_over_mu(legendre, Density.chebyshev(), y), expected)

    @pytest.mark.parametrize("density", [Density.uniform(), Density.chebyshev(),
                                         Density.matching(BasisFamily.jacobi(1.0, 2.0))])
    def test_samples_are_interior(self, density, rng):
        samples = sample_1d(density, 5000, rng)
        assert samples.shape == (5000,)
        assert np.all(np.abs(samples) < 1.0)

    def test_beta_sampling_mean(self, rng):
        # media de 2B − 1 con B ~ Beta(β+1, α+1) = (β − α)/(α + β + 2)
        density = Density.matching(BasisFamily.jacobi(1.0, 2.0))
        samples = sample_1d(density, 200_000, rng)
        assert samples.mean() == pytest.approx(0.2, abs=0.01)
