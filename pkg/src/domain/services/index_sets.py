"""
Conjuntos de multi-índices
Cruz hiperbólica, conjuntos inferiores, pesos intrínsecos u, cantidades κ,
K(s) y mejor aproximación de s términos en conjuntos inferiores
"""

import itertools
import logging
import math
from functools import lru_cache
from typing import Callable, Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Set, Tuple

import numpy as np

from domain.entities.domain import (
    BasisFamily, Density, IndexSet, KMode, LowerApproximation, MultiIndex,
    DomainParameterError, DivergentSupremumError, IndexSetTooLargeError,
    MissingWeightError, SearchBudgetExceededError, UnsupportedParametersError,
    graded_order_key
)
from domain.services.basis1d import (
    basis_deriv_table, basis_table, chi_over_mu, nu_over_mu
)

logger = logging.getLogger(__name__)

DEFAULT_INDEX_SET_CAP = 1_000_000
DEFAULT_K_SEARCH_CAP = 10_000_000
DEFAULT_LOWER_SET_EXACT_CAP = 100_000
SUP_GRID_START = 2 ** 12
SUP_GRID_MAX = 2 ** 20
SUP_TOLERANCE = 1e-6

# ============================================================================
# CRUZ HIPERBÓLICA
# ============================================================================

@lru_cache(maxsize=None)
def _hc_count(d: int, budget: int, signed: bool) -> int:
    """Número de n ∈ ℕ₀^d (o ℤ^d) con Π(|n_k|+1) ≤ budget"""
    if d == 0:
        return 1
    total = 0
    for n in range(budget):
        multiplicity = 2 if (signed and n > 0) else 1
        total += multiplicity * _hc_count(d - 1, budget // (n + 1), signed)
    return total

def _check_ds(d: int, s: int) -> None:
    if d < 1 or s < 1:
        raise DomainParameterError(f"Se requiere d ≥ 1 y s ≥ 1 (recibido d={d}, s={s})")

def hyperbolic_cross_size(d: int, s: int, signed: bool = False) -> int:
    """Cardinalidad exacta de la cruz hiperbólica sin construirla"""
    _check_ds(d, s)
    return _hc_count(d, s + 1, signed)

def hyperbolic_cross_size_bound(d: int, s: int) -> float:
    """min{2s³4^d, e²s^{2+log₂d}}"""
    _check_ds(d, s)
    return min(2.0 * s ** 3 * 4.0 ** d, math.e ** 2 * s ** (2 + math.log2(d)))

def hyperbolic_cross(d: int, s: int, signed: bool = False,
                     max_size: int = DEFAULT_INDEX_SET_CAP) -> IndexSet:
    """
    Cruz hiperbólica {n : Π(n_k+1) ≤ s+1} por descenso recursivo.

    Args:
        d: Dimensión
        s: Grado (orden de dispersión)
        signed: Índices con signo (base de Fourier), usando |n_k|
        max_size: Cardinalidad máxima permitida

    Returns:
        IndexSet en orden lexicográfico graduado
    """
    size = hyperbolic_cross_size(d, s, signed)
    if size > max_size:
        raise IndexSetTooLargeError(
            f"La cruz hiperbólica (d={d}, s={s}) tendría {size} índices (límite {max_size})"
        )

    indices: List[MultiIndex] = []
    prefix: List[int] = []

    def descend(k: int, budget: int) -> None:
        if k == d:
            indices.append(tuple(prefix))
            return
        for n in range(budget):
            prefix.append(n)
            descend(k + 1, budget // (n + 1))
            prefix.pop()

    descend(0, s + 1)

    if signed:
        expanded = []
        for index in indices:
            choices = [(n,) if n == 0 else (n, -n) for n in index]
            expanded.extend(itertools.product(*choices))
        indices = expanded

    return IndexSet.from_indices(d, indices)

# ============================================================================
# CONJUNTOS INFERIORES
# ============================================================================

def _predecessors(index: MultiIndex) -> Iterable[MultiIndex]:
    for k, n in enumerate(index):
        if n != 0:
            step = n - 1 if n > 0 else n + 1
            yield index[:k] + (step,) + index[k + 1:]

def _successors(index: MultiIndex, signed: bool) -> Iterable[MultiIndex]:
    for k, n in enumerate(index):
        if n > 0 or not signed:
            yield index[:k] + (n + 1,) + index[k + 1:]
        elif n < 0:
            yield index[:k] + (n - 1,) + index[k + 1:]
        else:
            yield index[:k] + (1,) + index[k + 1:]
            yield index[:k] + (-1,) + index[k + 1:]

def is_lower(index_set: Iterable[MultiIndex]) -> bool:
    """True si cada índice dominado coordenada a coordenada está en el conjunto"""
    members = {tuple(n) for n in index_set}
    for index in members:
        for predecessor in _predecessors(index):
            if predecessor not in members:
                return False
    return True

def lower_closure(indices: Iterable[MultiIndex]) -> Set[MultiIndex]:
    """Menor conjunto inferior que contiene a `indices`"""
    closure: Set[MultiIndex] = set()
    pending = [tuple(n) for n in indices]
    while pending:
        index = pending.pop()
        if index in closure:
            continue
        closure.add(index)
        pending.extend(p for p in _predecessors(index) if p not in closure)
    return closure

def _addable(delta: FrozenSet[MultiIndex], d: int, signed: bool,
             allowed: Optional[Set[MultiIndex]] = None) -> List[MultiIndex]:
    """Índices que pueden añadirse a `delta` manteniéndolo inferior"""
    if not delta:
        zero = (0,) * d
        return [zero] if allowed is None or zero in allowed else []
    candidates = set()
    for index in delta:
        for successor in _successors(index, signed):
            if successor in delta or (allowed is not None and successor not in allowed):
                continue
            if all(p in delta for p in _predecessors(successor)):
                candidates.add(successor)
    return sorted(candidates, key=graded_order_key)

def lower_sets(d: int, max_size: int, signed: bool = False) -> Iterator[FrozenSet[MultiIndex]]:
    """
    Enumera todos los conjuntos inferiores no vacíos con |Δ| ≤ max_size.

    Crece desde {0} añadiendo un índice admisible cada vez; un conjunto de
    tamaño k+1 siempre resulta de uno de tamaño k sin un elemento maximal.
    """
    if d < 1 or max_size < 1:
        raise DomainParameterError(f"Se requiere d ≥ 1 y max_size ≥ 1 (recibido d={d}, max_size={max_size})")
    seen: Set[FrozenSet[MultiIndex]] = set()
    pending = [frozenset({(0,) * d})]
    while pending:
        delta = pending.pop()
        if delta in seen:
            continue
        seen.add(delta)
        yield delta
        if len(delta) < max_size:
            pending.extend(delta | {index} for index in _addable(delta, d, signed))

def union_of_lower_sets(d: int, max_size: int, signed: bool = False) -> Set[MultiIndex]:
    """⋃{Δ inferior : |Δ| ≤ max_size}; coincide con hyperbolic_cross(d, max_size − 1)"""
    union: Set[MultiIndex] = set()
    for delta in lower_sets(d, max_size, signed):
        union.update(delta)
    return union

def weighted_cardinality(index_set: Iterable[MultiIndex], w: Mapping[MultiIndex, float]) -> float:
    """|Δ|_w = Σ_{n∈Δ} w_n²"""
    total = 0.0
    for index in index_set:
        try:
            total += float(w[tuple(index)]) ** 2
        except KeyError:
            raise MissingWeightError(f"Falta el peso del índice {tuple(index)}") from None
    return total

# ============================================================================
# SUPREMOS EN MALLA, PESOS INTRÍNSECOS Y κ
# ============================================================================

def chebyshev_grid(count: int, include_endpoints: bool) -> np.ndarray:
    """Nodos de Chebyshev-Gauss más el origen y, opcionalmente, ±1"""
    j = np.arange(count)
    nodes = np.cos(np.pi * (j + 0.5) / count)
    extra = [0.0, -1.0, 1.0] if include_endpoints else [0.0]
    return np.concatenate([nodes, extra])

def grid_supremum(func: Callable[[np.ndarray], np.ndarray], include_endpoints: bool,
                  start: int = SUP_GRID_START, max_points: int = SUP_GRID_MAX,
                  tol: float = SUP_TOLERANCE) -> float:
    """
    Supremo adaptativo: duplica la malla hasta que dos valores sucesivos
    coincidan con tolerancia relativa `tol`.
    """
    count = start
    previous = float(np.max(func(chebyshev_grid(count, include_endpoints))))
    while True:
        count *= 2
        if count > max_points or not math.isfinite(previous):
            raise DivergentSupremumError(
                f"El supremo no se estabiliza (último valor {previous:.6g} con {count // 2} puntos)"
            )
        current = float(np.max(func(chebyshev_grid(count, include_endpoints))))
        if abs(current - previous) <= tol * max(abs(current), np.finfo(float).tiny):
            return current
        previous = current

@lru_cache(maxsize=8192)
def intrinsic_weight_1d(family: BasisFamily, mu: Density, n: int,
                        start: int = SUP_GRID_START, max_points: int = SUP_GRID_MAX,
                        tol: float = SUP_TOLERANCE) -> float:
    """u_n = sup √(ν/μ)|φ_n| en una dimensión"""
    if family.is_fourier and mu.law == "uniform":
        return 1.0
    include = mu.matches(family)

    def func(y: np.ndarray) -> np.ndarray:
        return np.sqrt(nu_over_mu(family, mu, y)) * np.abs(basis_table(family, [n], y)[:, 0])

    return grid_supremum(func, include, start, max_points, tol)

@lru_cache(maxsize=8192)
def kappa_1d(family: BasisFamily, mu: Density, n: int,
             start: int = SUP_GRID_START, max_points: int = SUP_GRID_MAX,
             tol: float = SUP_TOLERANCE) -> float:
    """κ_n = u_n⁻² sup (χ/μ)|φ′_n|²"""
    if n == 0:
        return 0.0
    u = intrinsic_weight_1d(family, mu, n, start, max_points, tol)
    include = mu.matches(family)

    def func(y: np.ndarray) -> np.ndarray:
        return chi_over_mu(family, mu, y) * np.abs(basis_deriv_table(family, [n], y)[:, 0]) ** 2

    return grid_supremum(func, include, start, max_points, tol) / u ** 2

def intrinsic_weight(family: BasisFamily, mu: Density, n: MultiIndex) -> float:
    """Peso intrínseco multivariado: producto de suprema unidimensionales"""
    return float(np.prod([intrinsic_weight_1d(family, mu, int(k)) for k in n]))

def kappa(family: BasisFamily, mu: Density, n: MultiIndex) -> float:
    """κ multivariado: suma de κ por coordenada"""
    return float(sum(kappa_1d(family, mu, int(k)) for k in n))

def intrinsic_weights(family: BasisFamily, mu: Density, index_set: IndexSet) -> np.ndarray:
    """Vector u alineado con el orden de Λ"""
    return np.array([intrinsic_weight(family, mu, n) for n in index_set])

def kappas(family: BasisFamily, mu: Density, index_set: IndexSet) -> np.ndarray:
    return np.array([kappa(family, mu, n) for n in index_set])

def weight_map(index_set: IndexSet, values: np.ndarray) -> Dict[MultiIndex, float]:
    return {index: float(values[i]) for i, index in enumerate(index_set)}

# ============================================================================
# K(s)
# ============================================================================

_K_TABLES: Dict[Tuple[BasisFamily, Density, int], List[float]] = {}

def k_bound_exponent(family: BasisFamily, mu: Density) -> float:
    """
    Exponente γ de la cota cerrada K(s) ≤ s^γ.

    Cubre α, β ∈ ℕ₀; α = β con 2α+1 ∈ ℕ; Chebyshev; y Fourier (γ = 1).
    """
    if family.is_fourier and mu.law == "uniform":
        return 1.0
    if not mu.matches(family):
        raise UnsupportedParametersError(
            "Las cotas cerradas de K(s) sólo cubren el muestreo con la densidad de ortogonalidad"
        )
    a, b = family.alpha, family.beta
    if a == -0.5 and b == -0.5:
        return math.log(3) / math.log(2)
    if a >= 0 and b >= 0 and float(a).is_integer() and float(b).is_integer():
        return 2 * max(a, b) + 2
    if a == b and float(2 * a + 1).is_integer() and 2 * a + 1 >= 1:
        return 2 * a + 2
    raise UnsupportedParametersError(
        f"Cota cerrada de K(s) no disponible para α={a:g}, β={b:g}: cubre α, β ∈ ℕ₀, "
        "α = β con 2α+1 ∈ ℕ, o Chebyshev (α = β = −1/2)"
    )

def K_of_s_table(family: BasisFamily, mu: Density, d: int, s_max: int,
                 search_cap: int = DEFAULT_K_SEARCH_CAP) -> List[float]:
    """
    K(1), ..., K(s_max) por búsqueda exhaustiva, nivel a nivel, sobre conjuntos
    inferiores. Los conjuntos visitados se memorizan como frozensets.
    """
    _check_ds(d, s_max)
    key = (family, mu, d)
    cached = _K_TABLES.get(key)
    if cached is not None and len(cached) >= s_max:
        return cached[:s_max]

    signed = family.is_fourier
    u2_cache: Dict[MultiIndex, float] = {}

    def u2(index: MultiIndex) -> float:
        if index not in u2_cache:
            u2_cache[index] = intrinsic_weight(family, mu, index) ** 2
        return u2_cache[index]

    zero = (0,) * d
    level: Dict[FrozenSet[MultiIndex], float] = {frozenset([zero]): u2(zero)}
    best = [u2(zero)]
    visited = 1
    for size in range(2, s_max + 1):
        following: Dict[FrozenSet[MultiIndex], float] = {}
        for delta, mass in level.items():
            for index in _addable(delta, d, signed):
                extended = delta | {index}
                if extended in following:
                    continue
                following[extended] = mass + u2(index)
                visited += 1
                if visited > search_cap:
                    raise SearchBudgetExceededError(
                        f"Búsqueda de K(s) supera {search_cap} conjuntos (d={d}, s={size})"
                    )
        best.append(max(best[-1], max(following.values())))
        level = following
        logger.debug("K(%d) = %.6g (%d conjuntos inferiores de tamaño %d)", size, best[-1], len(level), size)

    _K_TABLES[key] = best
    return list(best)

def K_of_s(family: BasisFamily, mu: Density, d: int, s: int,
           mode: KMode = KMode.EXACT, search_cap: int = DEFAULT_K_SEARCH_CAP) -> float:
    """K(s) = max{|Δ|_u : |Δ| ≤ s, Δ inferior}, exacto o mediante la cota cerrada"""
    _check_ds(d, s)
    if KMode(mode) == KMode.BOUND:
        return float(s) ** k_bound_exponent(family, mu)
    return K_of_s_table(family, mu, d, s, search_cap)[s - 1]

# ============================================================================
# MEJOR APROXIMACIÓN DE s TÉRMINOS EN CONJUNTOS INFERIORES
# ============================================================================

class _BudgetExhausted(Exception):
    pass

def _exact_lower_selection(mass: Mapping[MultiIndex, float], closure: Set[MultiIndex],
                           d: int, s: int, signed: bool, cap: int) -> FrozenSet[MultiIndex]:
    best_set: FrozenSet[MultiIndex] = frozenset()
    best_key = (0.0, 0)
    level: Dict[FrozenSet[MultiIndex], float] = {frozenset(): 0.0}
    visited = 0
    for size in range(1, s + 1):
        following: Dict[FrozenSet[MultiIndex], float] = {}
        for delta, captured in level.items():
            for index in _addable(delta, d, signed, allowed=closure):
                extended = delta | {index}
                if extended in following:
                    continue
                following[extended] = captured + mass.get(index, 0.0)
                visited += 1
                if visited > cap:
                    raise _BudgetExhausted()
        if not following:
            break
        for delta in sorted(following, key=lambda c: sorted(c, key=graded_order_key)):
            key = (following[delta], -len(delta))
            if key > best_key:
                best_key, best_set = key, delta
        level = following
    return best_set

def _greedy_lower_selection(mass: Mapping[MultiIndex, float], s: int) -> Set[MultiIndex]:
    delta: Set[MultiIndex] = set()
    while True:
        best = None
        for index in sorted(mass, key=graded_order_key):
            if index in delta:
                continue
            added = lower_closure([index]) - delta
            if len(delta) + len(added) > s:
                continue
            ratio = sum(mass.get(m, 0.0) for m in added) / len(added)
            if best is None or ratio > best[0]:
                best = (ratio, added)
        if best is None:
            return delta
        delta |= best[1]

def best_lower_s_term(x: Mapping[MultiIndex, complex], v: Optional[Mapping[MultiIndex, float]],
                      s: int, exact_cap: int = DEFAULT_LOWER_SET_EXACT_CAP,
                      force_greedy: bool = False) -> LowerApproximation:
    """
    Conjunto inferior Δ, |Δ| ≤ s, que minimiza ‖x − x_Δ‖_{1,v}, y ese mínimo σ_{s,L}.

    Búsqueda exhaustiva dentro del cierre inferior del soporte mientras el número
    de candidatos no supere `exact_cap`; si no, heurística voraz (exact=False).
    v = None equivale a v ≡ 1.
    """
    if s < 0:
        raise DomainParameterError(f"s debe ser ≥ 0 (recibido {s})")
    support = {tuple(n): abs(value) for n, value in x.items() if value != 0}
    if not x:
        return LowerApproximation(IndexSet(1, ()), 0.0, True)
    d = len(next(iter(x)))
    if not support:
        return LowerApproximation(IndexSet(d, ()), 0.0, True)

    def weight(index: MultiIndex) -> float:
        if v is None:
            return 1.0
        try:
            return float(v[index])
        except KeyError:
            raise MissingWeightError(f"Falta el peso del índice {index}") from None

    mass = {index: weight(index) * magnitude for index, magnitude in support.items()}
    signed = any(k < 0 for index in support for k in index)
    exact = not force_greedy
    selected: Set[MultiIndex]
    if exact:
        try:
            selected = set(_exact_lower_selection(mass, lower_closure(support), d, s, signed, exact_cap))
        except _BudgetExhausted:
            logger.info("σ_{s,L}: más de %d candidatos, se usa la heurística voraz", exact_cap)
            exact = False
    if not exact:
        selected = _greedy_lower_selection(mass, s)

    sigma = float(sum(m for index, m in mass.items() if index not in selected))
    return LowerApproximation(IndexSet.from_indices(d, selected), sigma, exact)
