"""
Caso de uso de validación
Suites de comprobaciones numéricas (ortonormalidad, cotas de K(s), isotropía,
coherencia, solver frente a enumeración, recuperación exacta, Parseval...)
con una línea por comprobación: nombre, valor medido, umbral y resultado
"""

from abc import ABC, abstractmethod
import logging
import math
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from domain.entities.domain import (
    Approximant, BasisFamily, BPDNProblem, CoherenceKind, Density, IndexSet, SamplingMode,
    ConfigurationError
)
from domain.services.basis1d import (
    basis_deriv_table, basis_table, eigenvalues, gauss_quadrature, jacobi_mass,
    jacobi_max_value, jacobi_norm_const, jacobi_polynomials
)
from domain.services.coherence import (
    gamma1_bound, gamma2_bound, kappa_lambda_ratio, local_coherence, tail_bound_check,
    upsilon_bound
)
from domain.services.index_sets import (
    K_of_s_table, hyperbolic_cross, hyperbolic_cross_size, hyperbolic_cross_size_bound,
    intrinsic_weight, intrinsic_weight_1d, intrinsic_weights, is_lower, k_bound_exponent,
    union_of_lower_sets
)
from domain.services.measurement import (
    COLUMN_NORM_Z_THRESHOLD, column_norm_check, derive_seed, isotropy_deviation
)
from domain.services.wl1_solver import kkt_residual, solve_bpdn, support_enumeration_oracle
from application.dto.experiment_dto import ValidationCheck
from application.use_cases.recovery_use_case import (
    basis_function_oracle, expansion_oracle, h1_error_estimate, recover
)

logger = logging.getLogger(__name__)

SuiteFunction = Callable[[], List[ValidationCheck]]

JACOBI_FAMILIES = (BasisFamily.legendre(), BasisFamily.chebyshev(), BasisFamily.jacobi(1.0, 0.0))

def _check(suite: str, name: str, measured: float, threshold: float,
           passed: Optional[bool] = None) -> ValidationCheck:
    """Comprobación del tipo medido ≤ umbral salvo que se indique el resultado"""
    if passed is None:
        passed = bool(measured <= threshold)
    return ValidationCheck(suite=suite, name=name, measured=float(measured),
                           threshold=float(threshold), passed=bool(passed))

# ============================================================================
# BASE UNIDIMENSIONAL
# ============================================================================

def orthonormality_suite(n_max: int = 20, nodes: int = 32) -> List[ValidationCheck]:
    """∫φ_nφ_m dν = δ_{nm} por cuadratura exacta"""
    checks = []
    degrees = np.arange(n_max + 1)
    for family in JACOBI_FAMILIES:
        y, w = gauss_quadrature(family, nodes)
        table = basis_table(family, degrees, y)
        gram = table.T @ (w[:, None] * table)
        checks.append(_check("orthonormality", family.name,
                             np.abs(gram - np.eye(n_max + 1)).max(), 1e-8))

    fourier = BasisFamily.fourier()
    signed = np.arange(-(n_max // 2), n_max // 2 + 1)
    y, w = gauss_quadrature(fourier, 4 * n_max)
    table = basis_table(fourier, signed, y)
    gram = table.conj().T @ (w[:, None] * table)
    checks.append(_check("orthonormality", fourier.name,
                         np.abs(gram - np.eye(signed.size)).max(), 1e-8))
    return checks

def sobolev_suite(n_max: int = 20, nodes: int = 32) -> List[ValidationCheck]:
    """∫χφ′_nφ′_m = λ_nδ_{nm}; χ/ν = 1 − y² para Jacobi"""
    checks = []
    degrees = np.arange(n_max + 1)
    for family in JACOBI_FAMILIES:
        y, w = gauss_quadrature(family, nodes)
        table = basis_deriv_table(family, degrees, y)
        gram = table.T @ ((w * (1.0 - y ** 2))[:, None] * table)
        expected = np.diag(eigenvalues(family, degrees))
        checks.append(_check("sobolev", family.name, np.abs(gram - expected).max(), 1e-6))

    fourier = BasisFamily.fourier()
    signed = np.arange(-(n_max // 2), n_max // 2 + 1)
    y, w = gauss_quadrature(fourier, 4 * n_max)
    table = basis_deriv_table(fourier, signed, y)
    gram = table.conj().T @ (w[:, None] * table)
    expected = np.diag(eigenvalues(fourier, signed))
    checks.append(_check("sobolev", fourier.name, np.abs(gram - expected).max(), 1e-6))
    return checks

def reflection_suite(n_max: int = 15) -> List[ValidationCheck]:
    """P_n^{(α,β)}(−y) = (−1)^n P_n^{(β,α)}(y) en 1000 puntos de [−1, 1], error absoluto"""
    checks = []
    y = np.linspace(-1.0, 1.0, 1000)
    signs = (-1.0) ** np.arange(n_max + 1)
    for alpha, beta in ((1.0, 0.0), (0.5, -0.5), (2.0, 1.0)):
        left = jacobi_polynomials(alpha, beta, n_max, -y)
        right = jacobi_polynomials(beta, alpha, n_max, y) * signs
        checks.append(_check("reflection", f"jacobi({alpha:g},{beta:g})",
                             np.abs(left - right).max(), 1e-12))
    return checks

def sup_norm_suite(n_max: int = 20) -> List[ValidationCheck]:
    """u_n en malla frente a √(c/κ_n)·binom(n+q, n) (α, β ≥ −1/2)"""
    checks = []
    families = JACOBI_FAMILIES + (BasisFamily.jacobi(1.0, 1.0), BasisFamily.jacobi(0.5, -0.5))
    for family in families:
        mu = Density.matching(family)
        c = jacobi_mass(family.alpha, family.beta)
        worst = 0.0
        for n in range(n_max + 1):
            closed = math.sqrt(c / jacobi_norm_const(family.alpha, family.beta, n)) \
                * jacobi_max_value(family.alpha, family.beta, n)
            worst = max(worst, abs(intrinsic_weight_1d(family, mu, n) - closed) / closed)
        checks.append(_check("sup-norm", family.name, worst, 1e-6))

    fourier = BasisFamily.fourier()
    worst = max(abs(intrinsic_weight_1d(fourier, Density.uniform(), n) - 1.0)
                for n in range(-n_max, n_max + 1))
    checks.append(_check("sup-norm", fourier.name, worst, 1e-12))
    return checks

def derivative_suite(n_max: int = 10, step: float = 1e-6) -> List[ValidationCheck]:
    """φ′_n frente a diferencias centradas"""
    checks = []
    y = np.linspace(-0.9, 0.9, 41)
    for family in JACOBI_FAMILIES + (BasisFamily.fourier(),):
        degrees = np.arange(-n_max, n_max + 1) if family.is_fourier else np.arange(n_max + 1)
        analytic = basis_deriv_table(family, degrees, y)
        numeric = (basis_table(family, degrees, y + step) - basis_table(family, degrees, y - step)) / (2 * step)
        error = np.abs(analytic - numeric) / np.maximum(1.0, np.abs(analytic))
        checks.append(_check("derivative", family.name, error.max(), 1e-6))
    return checks

# ============================================================================
# CONJUNTOS DE ÍNDICES Y PESOS
# ============================================================================

def hyperbolic_cross_suite(d_max: int = 4, s_max: int = 10) -> List[ValidationCheck]:
    """Cardinalidad exacta, cota cerrada y carácter inferior"""
    size_mismatch = bound_violations = not_lower = 0
    for d in range(1, d_max + 1):
        for s in range(1, s_max + 1):
            index_set = hyperbolic_cross(d, s)
            size_mismatch += len(index_set) != hyperbolic_cross_size(d, s)
            bound_violations += len(index_set) > hyperbolic_cross_size_bound(d, s)
            not_lower += not is_lower(index_set)
    d1 = max(abs(len(hyperbolic_cross(1, s)) - (s + 1)) for s in range(1, s_max + 1))
    # Π(n_k+1) ≤ s+1 es exactamente la unión de los inferiores con |Δ| ≤ s+1
    union_mismatch = sum(
        hyperbolic_cross(d, s).as_set() != union_of_lower_sets(d, s + 1)
        for d in range(1, min(d_max, 3) + 1) for s in range(1, min(s_max, 6) + 1)
    )
    return [
        _check("hyperbolic-cross", "size_matches_count", size_mismatch, 0),
        _check("hyperbolic-cross", "size_within_bound", bound_violations, 0),
        _check("hyperbolic-cross", "is_lower", not_lower, 0),
        _check("hyperbolic-cross", "d1_has_s_plus_1_terms", d1, 0),
        _check("hyperbolic-cross", "union_of_lower_sets", union_mismatch, 0),
    ]

def weights_suite(s: int = 5) -> List[ValidationCheck]:
    """u multivariado = producto de suprema 1D y u ≥ 1"""
    checks = []
    for family in (BasisFamily.legendre(), BasisFamily.chebyshev()):
        mu = Density.matching(family)
        index_set = hyperbolic_cross(2, s)
        u = intrinsic_weights(family, mu, index_set)
        product = np.array([intrinsic_weight_1d(family, mu, n[0]) * intrinsic_weight_1d(family, mu, n[1])
                            for n in index_set])
        checks.append(_check("weights", f"{family.name}_tensor_product",
                             np.abs(u - product).max(), 1e-12))
        checks.append(_check("weights", f"{family.name}_at_least_one", u.min(), 1.0,
                             passed=u.min() >= 1.0 - 1e-12))
    legendre = BasisFamily.legendre()
    u_legendre = intrinsic_weight(legendre, Density.uniform(), (1, 2))
    checks.append(_check("weights", "legendre_closed_form", abs(u_legendre - math.sqrt(15.0)), 1e-6))
    return checks

def kappa_suite(n_max: int = 50, parameters: Sequence[float] = (-0.5, 0.0, 1.0),
                bound: float = 5.0) -> List[ValidationCheck]:
    """κ_n/max(λ_n, 1) acotado y sin tendencia creciente, μ = ν"""
    checks = []
    window = min(10, max(1, n_max // 2))
    for alpha in parameters:
        for beta in parameters:
            family = BasisFamily.jacobi(alpha, beta)
            mu = Density.matching(family)
            ratios = np.array([kappa_lambda_ratio(family, mu, n) for n in range(1, n_max + 1)])
            checks.append(_check("kappa", f"{family.name}_bounded", ratios.max(), bound))
            trend = ratios[-window:].mean() / ratios[:window].mean()
            checks.append(_check("kappa", f"{family.name}_no_growth", trend, 1.1))
    return checks

def k_bounds_suite(s_max: int = 12, d_max: int = 4) -> List[ValidationCheck]:
    """K(s) ≤ s² (Legendre) y K(s) ≤ s^{log 3/log 2} (Chebyshev), con igualdad en s = 2"""
    checks = []
    for family, k2 in ((BasisFamily.legendre(), 4.0), (BasisFamily.chebyshev(), 3.0)):
        mu = Density.matching(family)
        gamma = k_bound_exponent(family, mu)
        worst = 0.0
        for d in range(1, d_max + 1):
            table = K_of_s_table(family, mu, d, s_max)
            worst = max(worst, max(k / s ** gamma for s, k in enumerate(table, start=1)))
            if d == d_max:
                equality = abs(table[1] - k2)
        checks.append(_check("k-bounds", f"{family.name}_below_bound", worst, 1.0 + 1e-9))
        checks.append(_check("k-bounds", f"{family.name}_equality_at_2", equality, 1e-9))
    return checks

# ============================================================================
# MEDICIONES Y COHERENCIA
# ============================================================================

def isotropy_suite(m: int = 100_000, seeds: int = 20, required: int = 18,
                   tolerance: float = 0.05) -> List[ValidationCheck]:
    """max |A*A − I| < 0.05 en la mayoría de semillas"""
    family = BasisFamily.legendre()
    index_set = hyperbolic_cross(2, 3)
    passing = sum(
        isotropy_deviation(family, Density.uniform(), index_set, m, seed=seed).max_entry < tolerance
        for seed in range(seeds)
    )
    fourier = isotropy_deviation(BasisFamily.fourier(), Density.uniform(), IndexSet.from_indices(1, [(0,)]),
                                 7, mode=SamplingMode.unaugmented())
    columns = column_norm_check(family, Density.uniform(), index_set, m=20, replicates=200)
    # desviación espectral media con m = 10³ y 10⁵: debe caer como ~1/√m
    decay = [
        np.mean([isotropy_deviation(family, Density.uniform(), index_set, size, seed=seed).spectral
                 for seed in range(5)])
        for size in (1_000, 100_000)
    ]
    ratio = decay[0] / decay[1]
    return [
        _check("isotropy", "legendre_d2_max_entry", passing, required, passed=passing >= required),
        _check("isotropy", "fourier_constant_exact", fourier.max_entry, 1e-12),
        _check("isotropy", "legendre_d2_column_norm_z", columns.max_z, COLUMN_NORM_Z_THRESHOLD),
        _check("isotropy", "legendre_d2_decay_ratio", ratio, 3.0, passed=3.0 < ratio < 30.0),
    ]

def coherence_suite(seed: int = 0) -> List[ValidationCheck]:
    """Estimaciones de Υ, Γ₁ y Γ₂ frente a sus cotas cerradas"""
    family = BasisFamily.chebyshev()
    mu = Density.matching(family)
    delta = hyperbolic_cross(2, 2)
    w = intrinsic_weights(family, mu, delta)

    upsilon = local_coherence(family, mu, delta, CoherenceKind.UPSILON, seed=seed).value
    gamma1 = local_coherence(family, mu, delta, CoherenceKind.GAMMA1, w, seed=seed).value
    gamma2 = local_coherence(family, mu, delta, CoherenceKind.GAMMA2, w, seed=seed).value
    fourier = local_coherence(BasisFamily.fourier(), Density.uniform(),
                              IndexSet.from_indices(1, [(0,)]), CoherenceKind.UPSILON, seed=seed).value
    return [
        _check("coherence", "upsilon_below_bound", upsilon - upsilon_bound(family, mu, delta), 1e-6),
        _check("coherence", "gamma1_at_least_one", gamma1, 1.0, passed=gamma1 >= 1.0 - 1e-6),
        _check("coherence", "gamma1_below_bound",
               gamma1 - gamma1_bound(family, mu, delta, delta, w), 1e-6),
        _check("coherence", "gamma2_below_bound",
               gamma2 - gamma2_bound(family, mu, delta, delta, w), 1e-6),
        _check("coherence", "fourier_constant_upsilon", abs(fourier - 1.0), 1e-12),
    ]

def tail_bounds_suite(slack: float = 1e-6) -> List[ValidationCheck]:
    """sup|φ_n| ≤ u_n y sup de la norma de Sobolev puntual ≤ √(1+λ_n)u_n"""
    checks = []
    for family in (BasisFamily.legendre(), BasisFamily.chebyshev()):
        mu = Density.matching(family)
        worst = -math.inf
        for n in hyperbolic_cross(2, 3):
            report = tail_bound_check(family, mu, n, slack=slack)
            worst = max(worst, report.sup_value - report.u, report.sup_sobolev - report.v)
        checks.append(_check("tail-bounds", family.name, worst, slack))
    return checks

# ============================================================================
# SOLVER Y RECUPERACIÓN
# ============================================================================

def _random_instance(rng: np.random.Generator, eta: float) -> BPDNProblem:
    if eta == 0:
        n = int(rng.integers(4, 13))
        m = int(rng.integers(2, min(8, n - 1) + 1))
    else:
        n = int(rng.integers(3, 9))
        m = int(rng.integers(2, min(5, n - 1) + 1))
    A = rng.standard_normal((m, n)) / math.sqrt(m)
    x = np.zeros(n)
    x[rng.choice(n, size=min(2, n), replace=False)] = rng.standard_normal(min(2, n))
    y = A @ x + (0.05 * rng.standard_normal(m) if eta > 0 else 0.0)
    if eta > 0 and np.linalg.norm(y) <= eta:
        y = y * (2 * eta / max(np.linalg.norm(y), 1e-12))
    return BPDNProblem(A, y, rng.uniform(1.0, 3.0, n), eta)

def solver_oracle_suite(instances: int = 50, seed: int = 0) -> List[ValidationCheck]:
    """BPDN frente al óptimo por enumeración de soportes"""
    objective_gap = kkt = 0.0
    for i in range(instances):
        eta = 0.0 if i % 2 == 0 else 0.1
        rng = np.random.default_rng(derive_seed(seed, "solver-oracle", i))
        problem = _random_instance(rng, eta)
        result = solve_bpdn(problem)
        optimum, _ = support_enumeration_oracle(problem)
        objective_gap = max(objective_gap, abs(result.objective - optimum) / max(1.0, optimum))
        kkt = max(kkt, kkt_residual(problem, result.z))
    return [
        _check("solver-oracle", "objective_matches_enumeration", objective_gap, 1e-5),
        _check("solver-oracle", "kkt_residual", kkt, 1e-6),
    ]

def exact_recovery_suite(seeds: int = 10, required: int = 9) -> List[ValidationCheck]:
    """Legendre d=2, s=3: recuperación de una única función base con m = N"""
    family = BasisFamily.legendre()
    mu = Density.uniform()
    index_set = hyperbolic_cross(2, 3)
    successes = 0
    for seed in range(seeds):
        rng = np.random.default_rng(derive_seed(seed, "exact-recovery"))
        n0 = index_set[int(rng.integers(len(index_set)))]
        result = recover(basis_function_oracle(family, n0), family, mu, 2, 3, len(index_set),
                         SamplingMode.full_gradient(), theta=1.0, eta=1e-12, seed=seed)
        target = np.zeros(len(index_set))
        target[index_set.position(n0)] = 1.0
        successes += np.linalg.norm(result.approximant.coefficients - target) <= 1e-6
    return [_check("exact-recovery", "legendre_d2_single_term", successes, required,
                   passed=successes >= required)]

def parseval_suite(grid_size: int = 100_000, seed: int = 0) -> List[ValidationCheck]:
    """Estimador H̃¹ frente a √(Σ(1+λ_n)|x_n|²)"""
    checks = []
    index_set = hyperbolic_cross(2, 3)
    rng = np.random.default_rng(derive_seed(seed, "parseval"))
    x = rng.standard_normal(len(index_set))
    for family in (BasisFamily.legendre(), BasisFamily.chebyshev()):
        mu = Density.matching(family)
        exact = math.sqrt(float(np.sum((1.0 + eigenvalues(family, index_set.as_array()).sum(axis=1)) * x ** 2)))
        zero = Approximant(family=family, index_set=index_set, coefficients=np.zeros(len(index_set)))
        estimate = h1_error_estimate(expansion_oracle(family, index_set, x), zero, mu, grid_size,
                                     derive_seed(seed, "parseval", family.name))
        z_score = abs(estimate.value - exact) / estimate.standard_error
        checks.append(_check("parseval", family.name, z_score, 3.0))
    return checks

# ============================================================================
# CASO DE USO
# ============================================================================

SUITES: Dict[str, SuiteFunction] = {
    "orthonormality": orthonormality_suite,
    "sobolev": sobolev_suite,
    "reflection": reflection_suite,
    "sup-norm": sup_norm_suite,
    "derivative": derivative_suite,
    "hyperbolic-cross": hyperbolic_cross_suite,
    "weights": weights_suite,
    "kappa": kappa_suite,
    "k-bounds": k_bounds_suite,
    "isotropy": isotropy_suite,
    "coherence": coherence_suite,
    "tail-bounds": tail_bounds_suite,
    "solver-oracle": solver_oracle_suite,
    "exact-recovery": exact_recovery_suite,
    "parseval": parseval_suite,
}

def available_suites() -> List[str]:
    return list(SUITES) + ["all"]

class ValidationUseCase(ABC):
    """Caso de uso de ejecución de suites de validación"""

    @abstractmethod
    def execute(self, suite: str) -> List[ValidationCheck]:
        """Ejecuta la suite (o todas con 'all') y devuelve sus comprobaciones"""
        pass

class ValidationUseCaseImpl(ValidationUseCase):
    """Ejecuta suites registradas por nombre"""

    def __init__(self, suites: Optional[Dict[str, SuiteFunction]] = None):
        self.suites = dict(SUITES if suites is None else suites)

    def execute(self, suite: str) -> List[ValidationCheck]:
        if suite == "all":
            names = list(self.suites)
        elif suite in self.suites:
            names = [suite]
        else:
            raise ConfigurationError(
                f"Suite desconocida: '{suite}'",
                [f"Suites disponibles: {', '.join(list(self.suites) + ['all'])}"],
            )

        checks: List[ValidationCheck] = []
        for name in names:
            results = self.suites[name]()
            failed = sum(not check.passed for check in results)
            logger.info("Suite %s: %d comprobaciones, %d fallidas", name, len(results), failed)
            checks.extend(results)
        return checks

def create_validation_use_case(suites: Optional[Dict[str, SuiteFunction]] = None) -> ValidationUseCase:
    return ValidationUseCaseImpl(suites)
