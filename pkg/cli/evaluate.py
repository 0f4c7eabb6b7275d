# cli/evaluate.py
import argparse
from pathlib import Path

from cli.common import print_rows
from core.logging import get_logger, log_execution_time
from providers.matrix_store import read_features, read_plan
from services.report_service import evaluate_plan

logger = get_logger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(
        "evaluate",
        help="plan 의 클래스 보존 정확도와 confusion 행렬",
        description="accuracy.json, confusion.csv/.pgm, per_class.csv 를 --out-dir 에 기록",
    )
    parser.add_argument("--plan", required=True, help="plan 파일 (.bin)")
    parser.add_argument("--source", required=True, help="plan 행 쪽 특징 파일 (라벨 사용)")
    parser.add_argument("--target", required=True, help="plan 열 쪽 특징 파일 (라벨 사용)")
    parser.add_argument("--out-dir", dest="out_dir", required=True)
    parser.add_argument("--dataset", default="unknown")
    parser.add_argument("--direction", default="rotated-to-unrotated")
    parser.add_argument("--baseline", action="store_true")
    parser.set_defaults(handler=cmd_evaluate)


@log_execution_time(logger)
def cmd_evaluate(args: argparse.Namespace) -> int:
    plan, sidecar = read_plan(args.plan)
    source = read_features(args.source)
    target = read_features(args.target)

    report = evaluate_plan(
        plan,
        source.labels,
        target.labels,
        max(source.num_classes, target.num_classes),
        Path(args.out_dir),
        dataset=args.dataset,
        metric=sidecar.metric or "unknown",
        representation=source.representation.value,
        solver=plan.diagnostics.solver.value,
        direction=args.direction,
        baseline=args.baseline,
    )

    print_rows(["accuracy", "converged", "out_dir"], [[f"{report.accuracy:.6f}", str(report.converged).lower(), args.out_dir]])
    logger.info(f"evaluate success | accuracy={report.accuracy:.4f}")
    return 0
