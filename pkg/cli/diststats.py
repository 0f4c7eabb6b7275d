# cli/diststats.py
import argparse
from pathlib import Path

from cli.common import add_experiment_arguments, build_config, print_rows
from core.logging import get_logger, log_execution_time
from pipeline.stages import load_source_dataset
from schemas.cost import Metric
from services.figure_service import sample_figure_images, write_distance_figures

logger = get_logger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(
        "diststats",
        help="클래스 간/내 평균 거리와 회전 각도별 거리 grid",
        description="distances_<rep>.csv/.pgm/.json 과 15° 간격 grid_<rep>_class<c>.csv/.pgm 기록",
    )
    add_experiment_arguments(parser)
    parser.add_argument("--distance", default=Metric.L2.value, choices=[m.value for m in Metric])
    parser.set_defaults(handler=cmd_diststats)


@log_execution_time(logger)
def cmd_diststats(args: argparse.Namespace) -> int:
    config = build_config(args)
    samples = sample_figure_images(load_source_dataset(config), config)
    out_dir = Path(config.output_dir) / "figures"

    reports = write_distance_figures(samples, config, out_dir, Metric(args.distance), threads=args.threads or None)

    print_rows(
        ["representation", "intra_mean", "inter_mean", "tightest_class"],
        [
            [rep, f"{r.intra_mean:.6g}", f"{r.inter_mean:.6g}", r.tightest_classes[0]]
            for rep, r in reports.items()
        ],
    )
    logger.info(f"diststats success | samples={len(samples)}")
    return 0
