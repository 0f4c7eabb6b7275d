# cli/transport.py
import argparse

import numpy as np

from cli.common import print_rows
from core.logging import get_logger, log_execution_time
from exceptions.error_messages import ErrorMessage
from exceptions.exceptions import AppException
from providers.matrix_store import read_features, write_matrix, write_plan
from schemas.cost import Metric
from schemas.transport import Solver
from services.cost_service import pairwise_cost
from services.transport_solver import (
    DEFAULT_EPSILON,
    DEFAULT_MAX_ITER,
    DEFAULT_TOL,
    NON_CONVERGENCE_HINT,
    solve,
    transport_cost,
)

logger = get_logger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(
        "transport",
        help="두 특징 행렬 사이 OT plan 계산",
        description="source(행) / target(열) 특징으로 cost 행렬을 만들고 solver 로 plan 과 sidecar 기록",
    )
    parser.add_argument("--source", required=True, help="행 쪽 특징 파일 (.bin)")
    parser.add_argument("--target", required=True, help="열 쪽 특징 파일 (.bin)")
    parser.add_argument("--out", required=True, help="plan 출력 경로 (.bin, sidecar 는 .json)")
    parser.add_argument("--metric", default=Metric.L1.value, choices=[m.value for m in Metric])
    parser.add_argument("--solver", default=Solver.SINKHORN.value, choices=[s.value for s in Solver])
    parser.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    parser.add_argument("--tol", type=float, default=DEFAULT_TOL)
    parser.add_argument("--max-iter", dest="max_iter", type=int, default=DEFAULT_MAX_ITER)
    parser.add_argument("--normalize-cost", dest="normalize_cost", action="store_true")
    parser.add_argument("--cost-out", dest="cost_out", help="cost 행렬도 기록할 경로 (.bin, float64)")
    parser.add_argument("--threads", type=int, default=0)
    parser.set_defaults(handler=cmd_transport)


@log_execution_time(logger)
def cmd_transport(args: argparse.Namespace) -> int:
    source = read_features(args.source)
    target = read_features(args.target)
    logger.info(
        f"transport request | source={source.values.shape}, target={target.values.shape}, "
        f"metric={args.metric}, solver={args.solver}, epsilon={args.epsilon:g}"
    )

    cost = pairwise_cost(
        source.values,
        target.values,
        args.metric,
        normalize=args.normalize_cost,
        threads=args.threads or None,
        row_source=str(args.source),
        col_source=str(args.target),
    )
    if args.cost_out:
        write_matrix(args.cost_out, cost.values, dtype=np.float64)

    plan = solve(cost, args.solver, epsilon=args.epsilon, tol=args.tol, max_iter=args.max_iter)
    write_plan(args.out, plan, metric=cost.metric.value, cost_scale=cost.scale)

    diagnostics = plan.diagnostics
    print_rows(
        ["plan", "iterations", "marginal_violation", "converged", "transport_cost"],
        [[args.out, diagnostics.iterations, f"{diagnostics.marginal_violation:.3e}",
          str(diagnostics.converged).lower(), f"{transport_cost(plan, cost):.10g}"]],
    )

    if not diagnostics.converged:
        raise AppException(
            ErrorMessage.SOLVER_NOT_CONVERGED,
            f"violation={diagnostics.marginal_violation:.3e} after {diagnostics.iterations} iterations"
            f"{' (stalled)' if diagnostics.stalled else ''}; {NON_CONVERGENCE_HINT}",
        )
    logger.info("transport success")
    return 0
