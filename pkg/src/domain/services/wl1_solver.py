"""
Solver BPDN ponderado
min ‖z‖_{1,w} sujeto a ‖Az − y‖₂ ≤ η mediante búsqueda de raíz en la curva de
Pareto, con subproblemas LASSO ponderados resueltos por gradiente proyectado
espectral y un pulido final sobre el soporte
"""

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linprog

from domain.entities.domain import (
    BPDNProblem, SolverConfig, SolverResult, SolverStatus, SolverTraceRow,
    DomainParameterError
)

logger = logging.getLogger(__name__)

STEP_MIN = 1e-16
STEP_MAX = 1e5
ARMIJO_GAMMA = 1e-4
MAX_LINE_SEARCH = 10
LEAST_SQUARES_TOL = 1e-10
PROJECTION_SLACK = 1e-10
SUPPORT_THRESHOLDS = (1e-9, 1e-6, 1e-3)
POLISH_WINDOW = 1e-3

TraceCallback = Callable[[SolverTraceRow], None]

# ============================================================================
# NORMAS Y PROYECCIÓN
# ============================================================================

def weighted_l1_norm(z: np.ndarray, w: np.ndarray) -> float:
    """‖z‖_{1,w} = Σ w_i|z_i|"""
    return float(np.sum(np.asarray(w) * np.abs(z)))

def dual_norm(g: np.ndarray, w: np.ndarray) -> float:
    """Norma dual max_i |g_i|/w_i"""
    g = np.asarray(g)
    return float(np.max(np.abs(g) / w)) if g.size else 0.0

def _project_magnitudes(b: np.ndarray, d: np.ndarray, tau: float) -> np.ndarray:
    """Proyección de b ≥ 0 sobre {x ≥ 0 : Σ d_i x_i ≤ τ} por búsqueda de umbral"""
    order = np.argsort(b / d, kind="stable")[::-1]
    bs, ds = b[order], d[order]
    theta = (np.cumsum(ds * bs) - tau) / np.cumsum(ds * ds)
    active = np.nonzero(bs / ds > theta)[0]
    threshold = max(float(theta[active[-1]]), 0.0)
    return np.maximum(b - threshold * d, 0.0)

def project_weighted_l1_ball(z: Sequence, w: Sequence[float], tau: float) -> np.ndarray:
    """
    Proyección euclídea de z sobre {v : Σ w_i|v_i| ≤ τ}.

    v_i = sign(z_i)·max(|z_i| − θw_i, 0) con θ ≥ 0 hallado por búsqueda exacta
    del punto de ruptura tras ordenar |z_i|/w_i. Para z complejo se contraen
    los módulos y se conserva la fase.
    """
    z = np.asarray(z)
    w = np.asarray(w, dtype=float)
    if tau < 0:
        raise DomainParameterError(f"τ debe ser ≥ 0 (recibido {tau})")
    if z.shape != w.shape:
        raise DomainParameterError("z y w deben tener la misma longitud")
    if np.any(w <= 0):
        raise DomainParameterError("Los pesos deben ser positivos")
    if tau == 0:
        return np.zeros_like(z)

    magnitude = np.abs(z)
    if float(np.dot(w, magnitude)) <= tau * (1.0 + PROJECTION_SLACK):
        return z.copy()

    shrunk = _project_magnitudes(magnitude, w, tau)
    if np.iscomplexobj(z):
        phase = np.zeros_like(z)
        nonzero = magnitude > 0
        phase[nonzero] = z[nonzero] / magnitude[nonzero]
        return shrunk * phase
    return np.sign(z) * shrunk

# ============================================================================
# LASSO PONDERADO (GRADIENTE PROYECTADO ESPECTRAL)
# ============================================================================

@dataclass
class _LassoState:
    z: np.ndarray
    r: np.ndarray
    f: float
    iterations: int
    optimal: bool

def _objective(r: np.ndarray) -> float:
    return 0.5 * float(np.real(np.vdot(r, r)))

def _curvy_line_search(A, y, w, tau, z, g, gstep, fmax):
    """Búsqueda hacia atrás proyectada sobre el arco z − α·g"""
    step = 1.0
    for _ in range(MAX_LINE_SEARCH + 1):
        z_new = project_weighted_l1_ball(z - step * gstep * g, w, tau)
        r_new = y - A @ z_new
        f_new = _objective(r_new)
        gts = float(np.real(np.vdot(g, z_new - z)))
        if gts >= 0:
            return None
        if f_new < fmax + ARMIJO_GAMMA * gts:
            return z_new, r_new, f_new
        step /= 2.0
    return None

def _feasible_line_search(A, y, z, f, dx, g, fmax):
    """Búsqueda no monótona a lo largo de una dirección factible dx"""
    step = 1.0
    gtd = -abs(float(np.real(np.vdot(g, dx))))
    for _ in range(MAX_LINE_SEARCH + 1):
        z_new = z + step * dx
        r_new = y - A @ z_new
        f_new = _objective(r_new)
        if f_new < fmax + ARMIJO_GAMMA * step * gtd:
            return z_new, r_new, f_new
        if step <= 0.1:
            step /= 2.0
        else:
            trial = (-gtd * step ** 2) / (2.0 * (f_new - f - step * gtd))
            step = step / 2.0 if (np.isnan(trial) or trial < 0.1 or trial > 0.9 * step) else trial
    return None

def _spg_lasso(A: np.ndarray, y: np.ndarray, w: np.ndarray, tau: float, z0: np.ndarray,
               cfg: SolverConfig, budget: int, trace: Optional[TraceCallback] = None,
               offset: int = 0) -> _LassoState:
    """min ½‖Az − y‖² sujeto a ‖z‖_{1,w} ≤ τ, arrancando en z0"""
    z = project_weighted_l1_ball(z0, w, tau)
    r = y - A @ z
    g = -(A.conj().T @ r)
    f = _objective(r)
    ynorm = float(np.linalg.norm(y))

    dxnorm = float(np.max(np.abs(project_weighted_l1_ball(z - g, w, tau) - z), initial=0.0))
    step_max = STEP_MAX
    gstep = step_max if dxnorm < 1.0 / step_max else min(step_max, max(STEP_MIN, 1.0 / dxnorm))
    history = np.full(cfg.line_search_window, -np.inf)
    history[0] = f

    iterations = 0
    while True:
        gap = float(np.real(np.vdot(r, r - y))) + tau * dual_norm(g, w)
        if abs(gap) / max(1.0, f) <= cfg.optimality_tol or \
                math.sqrt(2.0 * f) < cfg.optimality_tol * ynorm:
            return _LassoState(z, r, f, iterations, True)
        if iterations >= budget:
            return _LassoState(z, r, f, iterations, False)

        iterations += 1
        z_old, f_old, g_old = z, f, g
        fmax = float(history.max())
        accepted = _curvy_line_search(A, y, w, tau, z_old, g_old, gstep, fmax)
        if accepted is None:
            dx = project_weighted_l1_ball(z_old - gstep * g_old, w, tau) - z_old
            accepted = _feasible_line_search(A, y, z_old, f_old, dx, g_old, fmax)
        if accepted is None:
            step_max /= 10.0
            gstep = min(step_max, gstep)
            if step_max < STEP_MIN:
                return _LassoState(z_old, y - A @ z_old, f_old, iterations, False)
            continue

        z, r, f = accepted
        g = -(A.conj().T @ r)
        s = z - z_old
        sts = float(np.real(np.vdot(s, s)))
        sty = float(np.real(np.vdot(s, g - g_old)))
        gstep = step_max if sty <= 0 else min(step_max, max(STEP_MIN, sts / sty))
        history[iterations % cfg.line_search_window] = f

        if trace is not None:
            trace(SolverTraceRow(offset + iterations, tau, math.sqrt(2.0 * f), weighted_l1_norm(z, w)))

def solve_weighted_lasso(A: np.ndarray, y: np.ndarray, w: Sequence[float], tau: float,
                         cfg: Optional[SolverConfig] = None,
                         z0: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Minimizador aproximado de ‖Az − y‖₂ sujeto a ‖z‖_{1,w} ≤ τ.

    Los iterados son siempre factibles (proyectados).
    """
    cfg = cfg or SolverConfig()
    A = np.atleast_2d(np.asarray(A))
    y = np.asarray(y).reshape(-1)
    w = np.asarray(w, dtype=float)
    if tau < 0:
        raise DomainParameterError(f"τ debe ser ≥ 0 (recibido {tau})")
    dtype = np.result_type(A.dtype, y.dtype, float)
    if tau == 0:
        return np.zeros(A.shape[1], dtype=dtype)
    start = np.zeros(A.shape[1], dtype=dtype) if z0 is None else np.asarray(z0, dtype=dtype)
    state = _spg_lasso(A, y, w, float(tau), start, cfg, cfg.max_iterations)
    if not state.optimal:
        logger.warning("LASSO ponderado sin converger tras %d iteraciones (τ=%.6g)", state.iterations, tau)
    return state.z

# ============================================================================
# CERTIFICADO KKT
# ============================================================================

def _support(z: np.ndarray, rtol: float = SUPPORT_THRESHOLDS[0]) -> np.ndarray:
    magnitude = np.abs(z)
    if magnitude.size == 0 or magnitude.max() == 0:
        return np.zeros(0, dtype=int)
    return np.nonzero(magnitude > rtol * magnitude.max())[0]

def _phase(values: np.ndarray) -> np.ndarray:
    return values / np.abs(values)

def _basis_pursuit_dual(A: np.ndarray, support: np.ndarray, target: np.ndarray,
                        w: np.ndarray) -> np.ndarray:
    """
    ν con A_S^H ν = w_S s_S y mínima violación fuera del soporte.

    Programa lineal en el caso real con soporte menor que el número de filas;
    en otro caso, solución de mínima norma.
    """
    m, n = A.shape
    off = np.setdiff1d(np.arange(n), support)
    if not np.iscomplexobj(A) and not np.iscomplexobj(target) and support.size < m and off.size:
        A_off = A[:, off].T
        w_off = w[off][:, None]
        cost = np.zeros(m + 1)
        cost[-1] = 1.0
        upper = np.vstack([np.hstack([A_off, -w_off]), np.hstack([-A_off, -w_off])])
        equality = np.hstack([A[:, support].T, np.zeros((support.size, 1))])
        bounds = [(None, None)] * m + [(0, None)]
        solution = linprog(cost, A_ub=upper, b_ub=np.zeros(2 * off.size), A_eq=equality,
                           b_eq=np.real(target), bounds=bounds, method="highs")
        if solution.success:
            return solution.x[:m]
    nu, *_ = np.linalg.lstsq(A[:, support].conj().T, target, rcond=None)
    return nu

def kkt_residual(problem: BPDNProblem, z: np.ndarray) -> float:
    """
    Violación de las condiciones de optimalidad de z.

    Máximo de tres términos: exceso de factibilidad (y holgura de la
    restricción activa si η > 0), infactibilidad dual fuera del soporte y
    holgura complementaria sobre el soporte. El multiplicador es r/t̂ con t̂
    ajustado por mínimos cuadrados sobre el soporte; si η = 0 o el residuo es
    despreciable se resuelve A_S^H ν = w_S s_S.
    """
    A, y, w, eta = problem.matrix, problem.rhs, problem.weights, problem.eta
    z = np.asarray(z).reshape(-1)
    r = y - A @ z
    rnorm = float(np.linalg.norm(r))
    ynorm = float(np.linalg.norm(y))
    scale = max(1.0, ynorm)

    support = _support(z)
    if support.size == 0:
        return max(0.0, rnorm - eta) / scale

    feasibility = max(0.0, rnorm - eta) / scale
    if eta > 0:
        feasibility = abs(rnorm - eta) / scale

    target = w[support] * _phase(z[support])
    if eta > 0 and rnorm > 1e-12 * scale:
        correlation = A[:, support].conj().T @ r
        energy = float(np.real(np.vdot(correlation, correlation)))
        coefficient = float(np.real(np.vdot(correlation, target))) / energy if energy > 0 else 0.0
        nu = coefficient * r
    else:
        nu = _basis_pursuit_dual(A, support, target, w)

    correlation = A.conj().T @ nu
    slackness = float(np.max(np.abs(correlation[support] - target) / w[support]))
    off = np.setdiff1d(np.arange(A.shape[1]), support)
    dual_infeasibility = 0.0
    if off.size:
        dual_infeasibility = max(0.0, float(np.max(np.abs(correlation[off]) / w[off])) - 1.0)
    return float(max(feasibility, dual_infeasibility, slackness))

# ============================================================================
# PULIDO SOBRE EL SOPORTE
# ============================================================================

def _solve_on_support(A: np.ndarray, y: np.ndarray, w: np.ndarray, eta: float,
                      support: np.ndarray, signs: np.ndarray) -> Optional[np.ndarray]:
    """
    Solución cerrada del BPDN restringido a un soporte con patrón de signos fijo.

    z_S = z_LS − t·G⁻¹w_S s_S con G = A_S^H A_S y t elegido para que
    ‖A_S z_S − y‖ = η; para η = 0, mínimos cuadrados.
    """
    A_s = A[:, support]
    z_ls, *_ = np.linalg.lstsq(A_s, y, rcond=None)
    if eta == 0:
        candidate = z_ls
    else:
        r0 = y - A_s @ z_ls
        r0_sq = float(np.real(np.vdot(r0, r0)))
        if r0_sq > eta ** 2:
            return None
        gram = A_s.conj().T @ A_s
        try:
            h = np.linalg.solve(gram, w[support] * signs)
        except np.linalg.LinAlgError:
            return None
        direction = A_s @ h
        d_sq = float(np.real(np.vdot(direction, direction)))
        if d_sq <= 0 or not np.all(np.isfinite(h)):
            return None
        candidate = z_ls - math.sqrt((eta ** 2 - r0_sq) / d_sq) * h
    if not np.all(np.real(np.conj(signs) * candidate) > 0):
        return None
    z = np.zeros(A.shape[1], dtype=np.result_type(A.dtype, y.dtype, float))
    z[support] = candidate
    return z

def _polish(problem: BPDNProblem, z: np.ndarray) -> Optional[Tuple[np.ndarray, float]]:
    """Mejor candidato de soporte (según el residuo KKT) que mejora a z"""
    A, y, w, eta = problem.matrix, problem.rhs, problem.weights, problem.eta
    best, best_kkt = None, kkt_residual(problem, z)
    tried = set()
    for rtol in SUPPORT_THRESHOLDS:
        support = _support(z, rtol)
        key = tuple(support)
        if not support.size or support.size > A.shape[0] or key in tried:
            continue
        tried.add(key)
        candidate = _solve_on_support(A, y, w, eta, support, _phase(z[support]))
        if candidate is None:
            continue
        score = kkt_residual(problem, candidate)
        if score < best_kkt:
            best, best_kkt = candidate, score
    return None if best is None else (best, best_kkt)

# ============================================================================
# BPDN PONDERADO
# ============================================================================

def solve_bpdn(problem: BPDNProblem, cfg: Optional[SolverConfig] = None,
               trace: Optional[TraceCallback] = None) -> SolverResult:
    """
    Resuelve min ‖z‖_{1,w} sujeto a ‖Az − y‖₂ ≤ η.

    Itera Newton sobre φ(τ) = ‖Az_τ − y‖₂ − η, con z_τ solución del LASSO
    ponderado y φ′(τ) = −‖A^H r‖_{∞,1/w}/‖r‖, salvaguardado por bisección en
    el intervalo que acota la raíz. Cerca de la raíz se pule la solución
    sobre su soporte.

    Args:
        problem: Problema BPDN
        cfg: Configuración del solver
        trace: Callback opcional por iteración (iteración, τ, residuo, objetivo)

    Returns:
        SolverResult con estado OPTIMAL, ITERATION_LIMIT o INFEASIBLE
    """
    cfg = cfg or SolverConfig()
    A, y, w, eta = problem.matrix, problem.rhs, problem.weights, problem.eta
    dtype = np.result_type(A.dtype, y.dtype, float)
    ynorm = float(np.linalg.norm(y))
    scale = max(1.0, ynorm)

    z = np.zeros(A.shape[1], dtype=dtype)
    if ynorm <= eta:
        return SolverResult(z=z, residual_norm=ynorm, objective=0.0, iterations=0,
                            status=SolverStatus.OPTIMAL, tau=0.0, pareto_path=((0.0, ynorm),))

    feasibility_tol = cfg.feasibility_tol * scale
    root_tol = cfg.pareto_root_tol * scale
    tau, rnorm = 0.0, ynorm
    gnorm = dual_norm(A.conj().T @ y, w)
    path: List[Tuple[float, float]] = [(0.0, ynorm)]
    lower, upper = 0.0, math.inf
    iterations = newton_steps = 0
    root_found = polished = infeasible = polish_tried = False

    while True:
        phi = rnorm - eta
        if cfg.polish and not polish_tried and abs(phi) <= POLISH_WINDOW * scale:
            polish_tried = True
            outcome = _polish(problem, z)
            if outcome is not None and outcome[1] <= cfg.optimality_tol:
                z, polished = outcome[0], True
                rnorm = float(np.linalg.norm(y - A @ z))
                if rnorm <= eta + feasibility_tol:
                    root_found = True
                    break
        if -root_tol <= phi <= feasibility_tol:
            root_found = True
            break
        if phi > 0 and gnorm <= LEAST_SQUARES_TOL * rnorm:
            infeasible = True
            break
        if newton_steps >= cfg.max_newton_steps or iterations >= cfg.max_iterations:
            break

        if phi > 0:
            lower = max(lower, tau)
        else:
            upper = min(upper, tau)
        candidate_tau = tau + phi * rnorm / gnorm if gnorm > 0 else math.inf
        if not lower < candidate_tau < upper:
            candidate_tau = 0.5 * (lower + upper) if math.isfinite(upper) else 2.0 * max(tau, 1.0)
        tau = candidate_tau
        newton_steps += 1
        polish_tried = polished = False

        state = _spg_lasso(A, y, w, tau, z, cfg, cfg.max_iterations - iterations, trace, iterations)
        iterations += state.iterations
        z, r = state.z, state.r
        rnorm = float(np.linalg.norm(r))
        gnorm = dual_norm(A.conj().T @ r, w)
        path.append((tau, rnorm))
        logger.debug("Newton %d: τ=%.10g ‖r‖=%.10g (%d iteraciones SPG)",
                     newton_steps, tau, rnorm, state.iterations)

    if cfg.polish and not polished and not infeasible:
        outcome = _polish(problem, z)
        if outcome is not None:
            z, polished = outcome[0], True
            rnorm = float(np.linalg.norm(y - A @ z))
            root_found = root_found or outcome[1] <= cfg.optimality_tol

    if infeasible:
        status = SolverStatus.INFEASIBLE
    elif root_found and rnorm <= eta + feasibility_tol:
        status = SolverStatus.OPTIMAL
    else:
        status = SolverStatus.ITERATION_LIMIT
    if status != SolverStatus.OPTIMAL:
        logger.warning("BPDN terminó con estado %s (‖r‖=%.6g, η=%.6g)", status.value, rnorm, eta)

    return SolverResult(
        z=z, residual_norm=rnorm, objective=weighted_l1_norm(z, w), iterations=iterations,
        status=status, tau=tau, pareto_path=tuple(path), polished=polished
    )


# ============================================================================
# ORÁCULO POR ENUMERACIÓN DE SOPORTES
# ============================================================================

def support_enumeration_oracle(problem: BPDNProblem, max_columns: int = 12) -> Tuple[float, np.ndarray]:
    """
    Óptimo exacto de un BPDN real pequeño por enumeración.

    η = 0: soluciones básicas (soportes de tamaño ≤ m con sistema compatible).
    η > 0: todos los soportes |S| ≤ m y patrones de signos con la solución
    cerrada de `_solve_on_support`.
    """
    A, y, w, eta = problem.matrix, problem.rhs, problem.weights, problem.eta
    m, n = A.shape
    if problem.is_complex:
        raise DomainParameterError("El oráculo por enumeración sólo admite datos reales")
    if n > max_columns:
        raise DomainParameterError(f"El oráculo admite N ≤ {max_columns} (recibido {n})")
    ynorm = float(np.linalg.norm(y))
    scale = max(1.0, ynorm)
    best_value, best_z = math.inf, np.zeros(n)
    if ynorm <= eta:
        return 0.0, best_z

    for size in range(1, min(m, n) + 1):
        for support in itertools.combinations(range(n), size):
            support = np.array(support)
            if eta == 0:
                solution, *_ = np.linalg.lstsq(A[:, support], y, rcond=None)
                if np.linalg.norm(A[:, support] @ solution - y) > 1e-10 * scale:
                    continue
                candidates = [solution]
            else:
                candidates = []
                for signs in itertools.product((1.0, -1.0), repeat=size):
                    z = _solve_on_support(A, y, w, eta, support, np.array(signs))
                    if z is not None:
                        candidates.append(z[support])
            for values in candidates:
                value = float(np.sum(w[support] * np.abs(values)))
                if value < best_value:
                    best_value = value
                    best_z = np.zeros(n)
                    best_z[support] = values
    return best_value, best_z
