# services/figure_service.py
"""
시각화용 데이터 생성

- 클래스별 샘플 이미지를 일정 각도 간격으로 회전시킨 집합 (orbit)
- orbit 특징의 classical MDS 좌표
- orbit 특징의 클래스 간 / 클래스 내 평균 거리
- 클래스별 회전 각도 x 각도 거리 grid
"""
from pathlib import Path

import numpy as np

from core.logging import get_logger, get_metrics_logger
from providers.matrix_store import write_json, write_matrix_csv, write_pgm, write_rows_csv
from schemas.cost import Metric
from schemas.dataset import LabeledImageSet
from schemas.evaluation import DistanceStatsReport
from schemas.experiment import ExperimentConfig
from schemas.spectra import FeatureMatrix, Representation
from services.cost_service import pairwise_cost
from services.dataset_service import normalize, rotate_fixed, subsample_per_class
from services.evaluation_service import (
    classical_mds,
    interclass_distance_stats,
    intra_class_ranking,
    rotation_distance_grid,
)
from services.spectra import embed_dataset

logger = get_logger(__name__)
metrics_logger = get_metrics_logger()

MDS_STEP_DEG = 9.0
GRID_STEP_DEG = 15.0


def angle_steps(step_deg: float) -> list[float]:
    """[0, 360) 을 step 간격으로"""
    count = int(round(360.0 / step_deg))
    return [i * step_deg for i in range(count)]


def sample_figure_images(dataset: LabeledImageSet, config: ExperimentConfig) -> LabeledImageSet:
    """정규화 후 클래스별 figure_per_class 장 샘플"""
    return subsample_per_class(normalize(dataset), config.figure_per_class, config.figure_seed)


def rotation_orbit(samples: LabeledImageSet, angles: list[float]) -> tuple[LabeledImageSet, np.ndarray]:
    """
    각 샘플을 모든 각도로 회전한 집합 (angle-major)

    Returns:
        (회전 집합, 행별 각도)
    """
    rotated = [rotate_fixed(samples, angle) for angle in angles]
    images = np.concatenate([r.images for r in rotated])
    labels = np.concatenate([r.labels for r in rotated])
    row_angles = np.repeat(np.asarray(angles, dtype=np.float64), len(samples))

    orbit = LabeledImageSet(
        images=images,
        labels=labels,
        num_classes=samples.num_classes,
        meta=samples.meta.model_copy(update={"augmentation": None}),
    )
    return orbit, row_angles


def _orbit_features(
    orbit: LabeledImageSet,
    representation: Representation,
    config: ExperimentConfig,
    threads: int | None,
) -> FeatureMatrix:
    return embed_dataset(
        orbit,
        R=config.radial_bins,
        K=config.angular_bins,
        representation=representation,
        threads=threads,
    )


def write_mds_figures(
    samples: LabeledImageSet,
    config: ExperimentConfig,
    output_dir: str | Path,
    metric: Metric = Metric.L2,
    threads: int | None = None,
) -> dict[str, Path]:
    """표현별 2D MDS 좌표 CSV (x, y, label, angle)"""
    output_dir = Path(output_dir)
    angles = angle_steps(MDS_STEP_DEG)
    orbit, row_angles = rotation_orbit(samples, angles)

    written = {}
    for rep in config.representations:
        features = _orbit_features(orbit, rep, config, threads)
        D = pairwise_cost(features.values, features.values, metric, threads=threads).values
        # 블록 계산 반올림 차이 제거
        D = 0.5 * (D + D.T)
        np.fill_diagonal(D, 0.0)
        coords = classical_mds(D, dim=2)

        path = output_dir / f"mds_{rep.value}.csv"
        write_rows_csv(
            path,
            ["x", "y", "label", "angle"],
            [
                [f"{x:.10g}", f"{y:.10g}", int(label), f"{angle:g}"]
                for (x, y), label, angle in zip(coords, orbit.labels, row_angles)
            ],
        )
        written[rep.value] = path
        logger.info(f"mds written | representation={rep.value}, rows={coords.shape[0]}, path={path}")
    return written


def write_distance_figures(
    samples: LabeledImageSet,
    config: ExperimentConfig,
    output_dir: str | Path,
    metric: Metric = Metric.L2,
    threads: int | None = None,
) -> dict[str, DistanceStatsReport]:
    """
    표현별 산출물
      distances_<rep>.csv/.pgm  : 클래스 x 클래스 평균 거리 (9° orbit 기준)
      distances_<rep>.json      : intra / inter 평균과 가장 촘촘한 클래스 순위
      grid_<rep>_class<c>.csv/.pgm : 15° 간격 각도 x 각도 거리
    """
    output_dir = Path(output_dir)
    orbit, _ = rotation_orbit(samples, angle_steps(MDS_STEP_DEG))
    grid_angles = angle_steps(GRID_STEP_DEG)
    class_header = [str(c) for c in range(samples.num_classes)]

    reports = {}
    for rep in config.representations:
        features = _orbit_features(orbit, rep, config, threads)
        stats = interclass_distance_stats(features.values, features.labels, metric, samples.num_classes)
        write_matrix_csv(output_dir / f"distances_{rep.value}.csv", stats, header=class_header)
        write_pgm(output_dir / f"distances_{rep.value}.pgm", stats)

        off_diagonal = ~np.eye(samples.num_classes, dtype=bool)
        report = DistanceStatsReport(
            representation=rep.value,
            metric=Metric(metric).value,
            intra_mean=float(np.mean(np.diag(stats))),
            inter_mean=float(np.mean(stats[off_diagonal])) if samples.num_classes > 1 else 0.0,
            intra_by_class=np.diag(stats).tolist(),
            tightest_classes=intra_class_ranking(stats),
        )
        write_json(output_dir / f"distances_{rep.value}.json", report)
        reports[rep.value] = report
        metrics_logger.info(
            f"distance stats | representation={rep.value}, intra={report.intra_mean:.4f}, "
            f"inter={report.inter_mean:.4f}, tightest={report.tightest_classes[0]}"
        )

        grids = rotation_distance_grid(
            samples,
            grid_angles,
            metric,
            rep,
            R=config.radial_bins,
            K=config.angular_bins,
            threads=threads,
        )
        angle_header = [f"{a:g}" for a in grid_angles]
        for c, grid in grids.items():
            write_matrix_csv(output_dir / f"grid_{rep.value}_class{c}.csv", grid, header=angle_header)
            write_pgm(output_dir / f"grid_{rep.value}_class{c}.pgm", grid)

    return reports
