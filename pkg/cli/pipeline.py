# cli/pipeline.py
import argparse

from cli.common import add_experiment_arguments, build_config, print_rows
from core.logging import get_logger, log_execution_time
from exceptions.error_messages import ErrorMessage
from exceptions.exceptions import AppException
from pipeline.stages import PIPELINE_STAGES, run_stages
from pipeline.state import all_converged, create_initial_state, iter_runs, run_name
from services.transport_solver import NON_CONVERGENCE_HINT

logger = get_logger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(
        "pipeline",
        help="split → rotate → embed → cost → solve → evaluate 전체 실행",
        description=(
            "클래스 절반 분할 실험 전체를 실행하고 summary.csv 를 기록. "
            "같은 --output-dir 로 다시 실행하면 완료된 feature / plan 을 재사용"
        ),
    )
    add_experiment_arguments(parser)
    parser.set_defaults(handler=cmd_pipeline)


@log_execution_time(logger)
def cmd_pipeline(args: argparse.Namespace) -> int:
    config = build_config(args)
    logger.info(
        f"pipeline request | dataset={config.dataset}, per_class={config.per_class}, "
        f"solver={config.solver.value}, epsilons={config.epsilons}, baseline={config.baseline}, "
        f"direction={config.direction.value}"
    )

    state = run_stages(create_initial_state(config, threads=args.threads or 0))

    rows = []
    for key in iter_runs(config):
        name = run_name(key)
        plan = state["plans"][name]
        rows.append([
            key["representation"],
            key["metric"],
            f"{key['epsilon']:g}",
            f"{state['reports'][name].accuracy:.4f}",
            str(plan.diagnostics.converged).lower(),
        ])
    print_rows(["representation", "metric", "epsilon", "accuracy", "converged"], rows)

    if not all_converged(state):
        failed = [name for name, plan in state["plans"].items() if not plan.diagnostics.converged]
        raise AppException(ErrorMessage.SOLVER_NOT_CONVERGED, f"runs={failed}; {NON_CONVERGENCE_HINT}")

    logger.info(f"pipeline success | output_dir={state['output_dir']}")
    return 0
