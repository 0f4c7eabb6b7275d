# services/transport_solver.py
"""
엔트로피 정규화 최적 수송

  min_Γ ⟨Γ, C⟩ - ε H(Γ)   s.t.  Γ1 = p, Γᵀ1 = q

- sinkhorn: scaling (u, v) 반복, u/v 가 [1e-100, 1e100] 을 벗어나면 log-domain (f, g) 로 전환
  cost 범위가 ε 의 100 배를 넘으면 처음부터 log-domain, 큰 ε 에서 시작하는 ε-scaling 으로 warm start
- greenkhorn: 위반이 가장 큰 행/열 하나씩 갱신, potential 형태라 underflow 없음
- exact_ot_small: 작은 문제의 비정규화 정확해 (검증용)
"""
import itertools

import numpy as np
from scipy.optimize import linprog
from scipy.special import entr, logsumexp

from core.logging import get_logger, get_metrics_logger, log_execution_time
from exceptions.error_messages import ErrorMessage
from exceptions.exceptions import AppException
from schemas.cost import CostMatrix
from schemas.transport import Solver, SolverDiagnostics, TransportPlan

logger = get_logger(__name__)
metrics_logger = get_metrics_logger()

DEFAULT_EPSILON = 0.01
DEFAULT_TOL = 1e-6
DEFAULT_MAX_ITER = 10_000

SCALING_MIN = 1e-100
SCALING_MAX = 1e100
MARGINAL_SUM_TOL = 1e-9

EPS_SCALING_RATIO = 100.0
EPS_SCALING_FACTOR = 0.5
EPS_SCALING_INNER_ITER = 100

# 이 반복 수 동안 위반이 STALL_RATE 배 아래로 줄지 않으면 stall
STALL_WINDOW = 1000
STALL_RATE = 0.99

NON_CONVERGENCE_HINT = "rerun with --normalize-cost or a larger --epsilon"

EXACT_PERMUTATION_MAX = 8
EXACT_LP_MAX_ENTRIES = 64


# ============================================
# 공통 helper
# ============================================

def uniform_marginal(n: int) -> np.ndarray:
    return np.full(n, 1.0 / n)


def marginal_violation(gamma: np.ndarray, p: np.ndarray, q: np.ndarray) -> float:
    """max(‖Γ1 - p‖₁, ‖Γᵀ1 - q‖₁)"""
    return float(max(np.abs(gamma.sum(axis=1) - p).sum(), np.abs(gamma.sum(axis=0) - q).sum()))


def plan_entropy(plan: TransportPlan | np.ndarray) -> float:
    """H(Γ) = -Σ γ log γ  (0 log 0 = 0)"""
    gamma = plan.gamma if isinstance(plan, TransportPlan) else np.asarray(plan)
    return float(entr(gamma).sum())


def transport_cost(plan: TransportPlan, C: CostMatrix | np.ndarray) -> float:
    """⟨Γ, C⟩"""
    values = C.values if isinstance(C, CostMatrix) else np.asarray(C, dtype=np.float64)
    if plan.gamma.shape != values.shape:
        raise AppException(
            ErrorMessage.SHAPE_MISMATCH,
            f"plan {plan.gamma.shape} vs cost {values.shape}",
        )
    return float(np.sum(plan.gamma * values))


def _cost_values(C: CostMatrix | np.ndarray) -> np.ndarray:
    values = C.values if isinstance(C, CostMatrix) else np.asarray(C, dtype=np.float64)
    if values.ndim != 2 or values.size == 0:
        raise AppException(ErrorMessage.SHAPE_MISMATCH, f"cost must be non-empty 2-D, got {values.shape}")
    if not np.isfinite(values).all():
        raise AppException(ErrorMessage.NON_FINITE_COST, "cost matrix contains NaN or inf")
    return values


def _check_marginal(name: str, marginal, size: int) -> np.ndarray:
    arr = np.asarray(marginal, dtype=np.float64).reshape(-1)
    if arr.shape[0] != size:
        raise AppException(ErrorMessage.SHAPE_MISMATCH, f"{name} has length {arr.shape[0]}, expected {size}")
    if not np.isfinite(arr).all() or (arr < 0).any():
        raise AppException(ErrorMessage.INVALID_MARGINAL, f"{name} must be finite and nonnegative")
    if abs(arr.sum() - 1.0) > MARGINAL_SUM_TOL:
        raise AppException(ErrorMessage.INVALID_MARGINAL, f"{name} sums to {arr.sum():.12g}, expected 1")
    return arr


def _check_parameters(epsilon: float, tol: float, max_iter: int) -> None:
    if not (epsilon > 0 and np.isfinite(epsilon)):
        raise AppException(ErrorMessage.INVALID_SOLVER_PARAMETER, f"epsilon must be positive, got {epsilon}")
    if not tol > 0:
        raise AppException(ErrorMessage.INVALID_SOLVER_PARAMETER, f"tol must be positive, got {tol}")
    if max_iter < 1:
        raise AppException(ErrorMessage.INVALID_SOLVER_PARAMETER, f"max_iter must be >= 1, got {max_iter}")


def _prepare(C, p, q, epsilon, tol, max_iter) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    values = _cost_values(C)
    n, m = values.shape
    p = uniform_marginal(n) if p is None else _check_marginal("p", p, n)
    q = uniform_marginal(m) if q is None else _check_marginal("q", q, m)
    _check_parameters(epsilon, tol, max_iter)
    return values, p, q


def _log_kernel(values: np.ndarray, epsilon: float) -> np.ndarray:
    """-C/ε, 어떤 행/열이 전부 -inf 면 log-domain 으로도 복구 불가"""
    with np.errstate(over="ignore"):
        log_k = -values / epsilon
    dead_rows = np.flatnonzero(~np.isfinite(log_k).any(axis=1))
    dead_cols = np.flatnonzero(~np.isfinite(log_k).any(axis=0))
    if dead_rows.size or dead_cols.size:
        raise AppException(
            ErrorMessage.KERNEL_UNDERFLOW,
            f"exp(-C/epsilon) underflows beyond log-domain reach at epsilon={epsilon:g} "
            f"(max cost {values.max():.6g}); {NON_CONVERGENCE_HINT}",
        )
    return log_k


def _embed_support(sub: np.ndarray, rows: np.ndarray, cols: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    if sub.shape == shape:
        return sub
    gamma = np.zeros(shape, dtype=np.float64)
    gamma[np.ix_(rows, cols)] = sub
    return gamma


def _finish(
    gamma: np.ndarray,
    p: np.ndarray,
    q: np.ndarray,
    epsilon: float,
    solver: Solver,
    iterations: int,
    tol: float,
    log_domain: bool = False,
    stalled: bool = False,
) -> TransportPlan:
    violation = marginal_violation(gamma, p, q)
    converged = violation <= tol
    diagnostics = SolverDiagnostics(
        solver=solver,
        iterations=iterations,
        marginal_violation=violation,
        converged=converged,
        log_domain=log_domain,
        stalled=stalled,
        entropy=plan_entropy(gamma),
    )

    shape = f"{gamma.shape[0]}x{gamma.shape[1]}"
    metrics_logger.info(
        f"solve done | solver={solver.value}, shape={shape}, epsilon={epsilon:g}, "
        f"iterations={iterations}, violation={violation:.3e}, log_domain={log_domain}"
    )
    if not converged:
        logger.warning(
            f"solver did not converge | solver={solver.value}, iterations={iterations}, "
            f"violation={violation:.3e}, tol={tol:g}, stalled={stalled}"
            + (f" | {NON_CONVERGENCE_HINT}" if log_domain else "")
        )
    return TransportPlan(gamma=gamma, p=p, q=q, epsilon=epsilon, diagnostics=diagnostics)


# ============================================
# Sinkhorn
# ============================================

def _scaling_stable(u: np.ndarray, v: np.ndarray) -> bool:
    for x in (u, v):
        if not np.isfinite(x).all() or x.min() < SCALING_MIN or x.max() > SCALING_MAX:
            return False
    return True


def _sinkhorn_scaling(
    log_k: np.ndarray, p: np.ndarray, q: np.ndarray, tol: float, max_iter: int
) -> tuple[np.ndarray | None, int, np.ndarray, np.ndarray]:
    """
    scaling domain 반복

    Returns:
        (gamma 또는 None, 사용한 반복 수, 마지막 안정 u, 마지막 안정 v)
        gamma 가 None 이면 log-domain 전환이 필요
    """
    n, m = log_k.shape
    K = np.exp(log_k)
    u = np.ones(n)
    v = np.ones(m)

    # kernel 에 0 행/열이 있으면 scaling 자체가 불가
    if not (K.sum(axis=1) > 0).all() or not (K.sum(axis=0) > 0).all():
        return None, 0, u, v

    Ktu = K.T @ u
    for it in range(1, max_iter + 1):
        prev_u, prev_v = u, v
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            v = q / Ktu
            Kv = K @ v
            u = p / Kv
            Ktu = K.T @ u

        if not _scaling_stable(u, v):
            logger.debug(f"sinkhorn switching to log domain | iteration={it}")
            return None, it - 1, prev_u, prev_v

        violation = max(np.abs(u * Kv - p).sum(), np.abs(v * Ktu - q).sum())
        if violation <= tol:
            break

    return u[:, None] * K * v[None, :], it, u, v


def _log_plan(values: np.ndarray, f: np.ndarray, g: np.ndarray, epsilon: float) -> np.ndarray:
    """log Γ = (f_i + g_j - C_ij) / ε"""
    return (f[:, None] + g[None, :] - values) / epsilon


def _sinkhorn_log(
    values: np.ndarray,
    p: np.ndarray,
    q: np.ndarray,
    epsilon: float,
    tol: float,
    max_iter: int,
    f: np.ndarray,
    g: np.ndarray,
    stall_window: int | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, int, bool]:
    """
    log-domain 반복 (dual potential f, g 갱신)

    f 갱신 직후에는 행 합이 p 와 같으므로 행 logsumexp 는 다시 계산하지 않는다.
    stall_window 가 주어지면 그 반복 수 동안 위반이 STALL_RATE 배 아래로
    줄지 않을 때 멈춘다.

    Returns:
        (log Γ, f, g, 사용한 반복 수, stall 여부)
    """
    log_p, log_q = np.log(p), np.log(q)
    log_gamma = _log_plan(values, f, g, epsilon)
    row_lse = logsumexp(log_gamma, axis=1)

    it = 0
    window_start = np.inf
    stalled = False
    while True:
        col_lse = logsumexp(log_gamma, axis=0)
        violation = max(np.abs(np.exp(row_lse) - p).sum(), np.abs(np.exp(col_lse) - q).sum())
        if violation <= tol or it >= max_iter:
            break
        if stall_window and it % stall_window == 0:
            if violation > STALL_RATE * window_start:
                stalled = True
                logger.debug(f"log-domain sinkhorn stalled | iteration={it}, violation={violation:.3e}")
                break
            window_start = violation

        it += 1
        g = g + epsilon * (log_q - col_lse)
        log_gamma = _log_plan(values, f, g, epsilon)
        step = log_p - logsumexp(log_gamma, axis=1)
        f = f + epsilon * step
        log_gamma += step[:, None]
        row_lse = log_p

    return log_gamma, f, g, it, stalled


def epsilon_schedule(span: float, epsilon: float) -> list[float]:
    """
    ε-scaling 단계: span 에서 EPS_SCALING_FACTOR 배씩 줄여 ε 보다 큰 값까지

    cost 범위가 ε 의 EPS_SCALING_RATIO 배 이하이면 빈 목록 (warm start 불필요).
    """
    if span <= EPS_SCALING_RATIO * epsilon:
        return []
    schedule = []
    eps = span
    while eps > epsilon:
        schedule.append(eps)
        eps *= EPS_SCALING_FACTOR
    return schedule


def _warm_start_potentials(
    values: np.ndarray, p: np.ndarray, q: np.ndarray, schedule: list[float], tol: float, max_iter: int
) -> tuple[np.ndarray, np.ndarray, int]:
    """큰 ε 부터 단계별로 짧게 풀어 다음 단계의 시작 potential 로 넘긴다"""
    f = np.zeros(values.shape[0])
    g = np.zeros(values.shape[1])
    used = 0
    for eps in schedule:
        budget = min(EPS_SCALING_INNER_ITER, max_iter - used)
        if budget <= 0:
            break
        _, f, g, it, _ = _sinkhorn_log(values, p, q, eps, tol, budget, f, g)
        used += it
    logger.debug(f"epsilon scaling warm start | stages={len(schedule)}, iterations={used}")
    return f, g, used


def _cost_span(values: np.ndarray) -> float:
    return float(values.max() - values.min())


def _sinkhorn_core(
    values: np.ndarray, p: np.ndarray, q: np.ndarray, epsilon: float, tol: float, max_iter: int
) -> tuple[np.ndarray, int, bool, bool]:
    log_k = _log_kernel(values, epsilon)
    schedule = epsilon_schedule(_cost_span(values), epsilon)

    if schedule:
        f, g, used = _warm_start_potentials(values, p, q, schedule, tol, max_iter)
    else:
        gamma, used, u, v = _sinkhorn_scaling(log_k, p, q, tol, max_iter)
        if gamma is not None:
            return gamma, used, False, False
        f = epsilon * np.log(u)
        g = epsilon * np.log(v)

    log_gamma, _, _, it, stalled = _sinkhorn_log(
        values, p, q, epsilon, tol, max_iter - used, f, g, stall_window=STALL_WINDOW
    )
    return np.exp(log_gamma), used + it, True, stalled


def _support(p: np.ndarray, q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return np.flatnonzero(p > 0), np.flatnonzero(q > 0)


@log_execution_time(logger)
def sinkhorn(
    C: CostMatrix | np.ndarray,
    p: np.ndarray | None = None,
    q: np.ndarray | None = None,
    epsilon: float = DEFAULT_EPSILON,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> TransportPlan:
    """
    Sinkhorn 반복 (max_iter 는 ε-scaling 단계까지 포함한 행+열 full pass 수)

    미수렴이어도 예외 없이 converged=False 인 plan 을 반환한다.
    """
    values, p, q = _prepare(C, p, q, epsilon, tol, max_iter)
    rows, cols = _support(p, q)

    sub, iterations, log_domain, stalled = _sinkhorn_core(
        values[np.ix_(rows, cols)], p[rows], q[cols], epsilon, tol, max_iter
    )
    gamma = _embed_support(sub, rows, cols, values.shape)
    return _finish(gamma, p, q, epsilon, Solver.SINKHORN, iterations, tol, log_domain, stalled)


# ============================================
# Greenkhorn
# ============================================

def _gain(target: np.ndarray, current: np.ndarray) -> np.ndarray:
    """ρ(a, b) = b - a + a log(a/b), b = 0 이면 inf"""
    with np.errstate(divide="ignore"):
        return current - target + target * (np.log(target) - np.log(current))


def _greenkhorn_core(
    values: np.ndarray,
    p: np.ndarray,
    q: np.ndarray,
    epsilon: float,
    tol: float,
    max_updates: int,
    g: np.ndarray | None = None,
) -> tuple[np.ndarray, int]:
    n, m = values.shape
    log_k = _log_kernel(values, epsilon)
    log_p, log_q = np.log(p), np.log(q)

    # 행 합이 p 가 되도록 f 초기화 (각 행에 underflow 하지 않는 원소 보장)
    g = np.zeros(m) if g is None else g.copy()
    f = epsilon * (log_p - logsumexp(log_k + g[None, :] / epsilon, axis=1))
    G = np.exp(log_k + (f[:, None] + g[None, :]) / epsilon)
    row_sum = G.sum(axis=1)
    col_sum = G.sum(axis=0)

    refresh_every = n + m
    updates = 0
    while updates < max_updates:
        violation = max(np.abs(row_sum - p).sum(), np.abs(col_sum - q).sum())
        if violation <= tol:
            # 누적 오차 제거 후 재확인
            row_sum, col_sum = G.sum(axis=1), G.sum(axis=0)
            violation = max(np.abs(row_sum - p).sum(), np.abs(col_sum - q).sum())
            if violation <= tol:
                break

        row_gain = _gain(p, row_sum)
        col_gain = _gain(q, col_sum)
        i = int(np.argmax(row_gain))
        j = int(np.argmax(col_gain))

        if row_gain[i] >= col_gain[j]:
            log_row = log_k[i] + g / epsilon
            f[i] = epsilon * (log_p[i] - logsumexp(log_row))
            new_row = np.exp(log_row + f[i] / epsilon)
            col_sum += new_row - G[i]
            G[i] = new_row
            row_sum[i] = new_row.sum()
        else:
            log_col = log_k[:, j] + f / epsilon
            g[j] = epsilon * (log_q[j] - logsumexp(log_col))
            new_col = np.exp(log_col + g[j] / epsilon)
            row_sum += new_col - G[:, j]
            G[:, j] = new_col
            col_sum[j] = new_col.sum()

        updates += 1
        if updates % refresh_every == 0:
            row_sum, col_sum = G.sum(axis=1), G.sum(axis=0)

    return G, updates


@log_execution_time(logger)
def greenkhorn(
    C: CostMatrix | np.ndarray,
    p: np.ndarray | None = None,
    q: np.ndarray | None = None,
    epsilon: float = DEFAULT_EPSILON,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> TransportPlan:
    """
    Greenkhorn 탐욕 좌표 갱신

    max_iter 는 full pass 단위, 실제 좌표 갱신 상한은 max_iter * (n + m).
    진단값 iterations 는 좌표 갱신 횟수 (ε-scaling warm start 의 full pass 는 n + m 회로 환산).
    """
    values, p, q = _prepare(C, p, q, epsilon, tol, max_iter)
    rows, cols = _support(p, q)

    sub_values = values[np.ix_(rows, cols)]
    sub_p, sub_q = p[rows], q[cols]
    pass_size = sub_values.shape[0] + sub_values.shape[1]
    max_updates = max_iter * pass_size

    _log_kernel(sub_values, epsilon)
    schedule = epsilon_schedule(_cost_span(sub_values), epsilon)
    g = None
    warm_updates = 0
    if schedule:
        _, g, passes = _warm_start_potentials(sub_values, sub_p, sub_q, schedule, tol, max_iter)
        warm_updates = passes * pass_size

    sub, updates = _greenkhorn_core(
        sub_values, sub_p, sub_q, epsilon, tol, max_updates - warm_updates, g=g
    )

    gamma = _embed_support(sub, rows, cols, values.shape)
    return _finish(gamma, p, q, epsilon, Solver.GREENKHORN, warm_updates + updates, tol, log_domain=True)


# ============================================
# 정확해 (작은 문제)
# ============================================

def _best_permutation(values: np.ndarray) -> np.ndarray:
    n = values.shape[0]
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
    costs = values[np.arange(n), perms].sum(axis=1)
    # 동률이면 사전순 첫 순열
    return perms[int(np.argmin(costs))]


def _linprog_plan(values: np.ndarray, p: np.ndarray, q: np.ndarray) -> np.ndarray:
    n, m = values.shape
    row_constraints = np.kron(np.eye(n), np.ones((1, m)))
    col_constraints = np.kron(np.ones((1, n)), np.eye(m))
    result = linprog(
        values.reshape(-1),
        A_eq=np.vstack([row_constraints, col_constraints]),
        b_eq=np.concatenate([p, q]),
        bounds=(0, None),
        method="highs",
    )
    if not result.success:
        raise AppException(ErrorMessage.INTERNAL_ERROR, f"exact LP failed: {result.message}")
    return np.maximum(result.x.reshape(n, m), 0.0)


def exact_ot_small(
    C: CostMatrix | np.ndarray,
    p: np.ndarray | None = None,
    q: np.ndarray | None = None,
) -> TransportPlan:
    """
    비정규화 OT 정확해

    - n = m <= 8, 균등 marginal: 순열 전수 탐색, Γ = (1/n) P*
    - n * m <= 64: 선형계획 (HiGHS)
    """
    values = _cost_values(C)
    n, m = values.shape
    p = uniform_marginal(n) if p is None else _check_marginal("p", p, n)
    q = uniform_marginal(m) if q is None else _check_marginal("q", q, m)

    uniform = n == m and np.allclose(p, 1.0 / n, rtol=0, atol=1e-15) and np.allclose(q, p, rtol=0, atol=1e-15)
    if uniform and n <= EXACT_PERMUTATION_MAX:
        perm = _best_permutation(values)
        gamma = np.zeros((n, n))
        gamma[np.arange(n), perm] = 1.0 / n
    elif n * m <= EXACT_LP_MAX_ENTRIES:
        gamma = _linprog_plan(values, p, q)
    else:
        raise AppException(
            ErrorMessage.INSTANCE_TOO_LARGE,
            f"{n}x{m} exceeds exact limits (uniform n=m<={EXACT_PERMUTATION_MAX} or n*m<={EXACT_LP_MAX_ENTRIES})",
        )

    return _finish(gamma, p, q, 0.0, Solver.EXACT, 0, tol=DEFAULT_TOL)


# ============================================
# dispatcher
# ============================================

def solve(
    C: CostMatrix | np.ndarray,
    solver: Solver | str = Solver.SINKHORN,
    p: np.ndarray | None = None,
    q: np.ndarray | None = None,
    epsilon: float = DEFAULT_EPSILON,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> TransportPlan:
    solver = Solver(solver)
    if solver == Solver.SINKHORN:
        return sinkhorn(C, p, q, epsilon, tol, max_iter)
    if solver == Solver.GREENKHORN:
        return greenkhorn(C, p, q, epsilon, tol, max_iter)
    return exact_ot_small(C, p, q)
