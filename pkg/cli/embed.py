# cli/embed.py
import argparse

from cli.common import add_experiment_arguments, build_config, print_rows
from core.logging import get_logger, log_execution_time
from pipeline.stages import EMBED_STAGES, run_stages
from pipeline.state import create_initial_state, feature_path

logger = get_logger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(
        "embed",
        help="두 half 의 특징 행렬 생성",
        description="half A (회전, --baseline 이면 회전 없음) 와 half B 의 특징을 features/ 에 기록",
    )
    add_experiment_arguments(parser)
    parser.set_defaults(handler=cmd_embed)


@log_execution_time(logger)
def cmd_embed(args: argparse.Namespace) -> int:
    config = build_config(args)
    logger.info(
        f"embed request | dataset={config.dataset}, per_class={config.per_class}, "
        f"K={config.angular_bins}, representations={[r.value for r in config.representations]}"
    )

    state = run_stages(create_initial_state(config, threads=args.threads or 0), EMBED_STAGES)

    rows = []
    for rep in config.representations:
        pair = state["features"][rep.value]
        for half, matrix in zip(("a", "b"), pair):
            rows.append([rep.value, half, matrix.values.shape[0], matrix.values.shape[1], feature_path(state, rep, half)])
    print_rows(["representation", "half", "rows", "dim", "path"], rows)

    logger.info("embed success")
    return 0
