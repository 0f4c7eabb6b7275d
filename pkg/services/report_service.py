# services/report_service.py
from pathlib import Path

import numpy as np

from core.logging import get_logger, get_metrics_logger
from providers.matrix_store import write_json, write_matrix_csv, write_pgm, write_rows_csv
from schemas.evaluation import AccuracyReport
from schemas.transport import TransportPlan
from services.evaluation_service import (
    class_assignment,
    class_confusion,
    class_preservation_accuracy,
    hard_assignment_confusion,
    per_class_accuracy,
)

logger = get_logger(__name__)
metrics_logger = get_metrics_logger()

SUMMARY_HEADER = [
    "dataset",
    "representation",
    "metric",
    "epsilon",
    "solver",
    "direction",
    "baseline",
    "accuracy",
    "converged",
    "marginal_violation",
    "iterations",
]


def evaluate_plan(
    plan: TransportPlan,
    source_labels: np.ndarray,
    target_labels: np.ndarray,
    num_classes: int,
    report_dir: str | Path,
    *,
    dataset: str,
    metric: str,
    representation: str,
    solver: str,
    direction: str,
    baseline: bool,
) -> AccuracyReport:
    """
    plan 평가 후 산출물 기록

    accuracy.json, confusion.csv/.pgm (row 정규화), confusion_mass.csv,
    confusion_hard.csv (argmax 횟수), per_class.csv
    """
    report_dir = Path(report_dir)
    assignment = class_assignment(plan, target_labels, num_classes)
    accuracy = class_preservation_accuracy(assignment.assigned, source_labels)
    per_class = per_class_accuracy(assignment.assigned, source_labels, num_classes)

    confusion = class_confusion(plan, source_labels, target_labels, num_classes, "row")
    mass = class_confusion(plan, source_labels, target_labels, num_classes, "mass")
    hard = hard_assignment_confusion(assignment.assigned, source_labels, num_classes)

    class_header = [str(c) for c in range(num_classes)]
    write_matrix_csv(report_dir / "confusion.csv", confusion.matrix, header=class_header)
    write_pgm(report_dir / "confusion.pgm", confusion.matrix)
    write_matrix_csv(report_dir / "confusion_mass.csv", mass.matrix, header=class_header)
    write_matrix_csv(report_dir / "confusion_hard.csv", hard.matrix, header=class_header, fmt="%d")
    write_rows_csv(
        report_dir / "per_class.csv",
        ["class", "count", "accuracy"],
        [
            [c, int(np.sum(np.asarray(source_labels) == c)), "" if acc is None else f"{acc:.6f}"]
            for c, acc in enumerate(per_class)
        ],
    )

    report = AccuracyReport(
        dataset=dataset,
        metric=metric,
        representation=representation,
        epsilon=plan.epsilon,
        solver=solver,
        direction=direction,
        baseline=baseline,
        accuracy=accuracy,
        per_class_accuracy=per_class,
        converged=plan.diagnostics.converged,
        marginal_violation=plan.diagnostics.marginal_violation,
    )
    write_json(report_dir / "accuracy.json", report)

    metrics_logger.info(
        f"accuracy | representation={representation}, metric={metric}, "
        f"epsilon={plan.epsilon:g}, accuracy={accuracy:.4f}"
    )
    return report


def summary_row(report: AccuracyReport, iterations: int) -> list:
    return [
        report.dataset,
        report.representation,
        report.metric,
        f"{report.epsilon:g}",
        report.solver,
        report.direction,
        str(report.baseline).lower(),
        f"{report.accuracy:.6f}",
        str(report.converged).lower(),
        f"{report.marginal_violation:.3e}",
        iterations,
    ]


def write_summary(path: str | Path, rows: list[list]) -> Path:
    """representation x metric (x ε) 정확도 표"""
    return write_rows_csv(path, SUMMARY_HEADER, rows)
