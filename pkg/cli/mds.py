# cli/mds.py
import argparse
from pathlib import Path

from cli.common import add_experiment_arguments, build_config, print_rows
from core.logging import get_logger, log_execution_time
from pipeline.stages import load_source_dataset
from schemas.cost import Metric
from services.figure_service import sample_figure_images, write_mds_figures

logger = get_logger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(
        "mds",
        help="회전 orbit 특징의 2D classical MDS 좌표",
        description="클래스별 --figure-per-class 장을 9° 간격으로 회전시켜 표현별 mds_<rep>.csv 기록",
    )
    add_experiment_arguments(parser)
    parser.add_argument("--distance", default=Metric.L2.value, choices=[m.value for m in Metric])
    parser.set_defaults(handler=cmd_mds)


@log_execution_time(logger)
def cmd_mds(args: argparse.Namespace) -> int:
    config = build_config(args)
    samples = sample_figure_images(load_source_dataset(config), config)
    out_dir = Path(config.output_dir) / "figures"

    written = write_mds_figures(samples, config, out_dir, Metric(args.distance), threads=args.threads or None)

    print_rows(["representation", "path"], [[rep, path] for rep, path in written.items()])
    logger.info(f"mds success | samples={len(samples)}")
    return 0
