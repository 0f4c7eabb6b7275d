# services/evaluation_service.py
from concurrent.futures import ThreadPoolExecutor
from typing import Literal

import numpy as np

from core.config import get_settings
from core.logging import get_logger
from exceptions.error_messages import ErrorMessage
from exceptions.exceptions import AppException
from schemas.cost import Metric
from schemas.dataset import LabeledImageSet
from schemas.evaluation import ClassAssignment, ClassConfusion
from schemas.spectra import Representation
from schemas.transport import TransportPlan
from services.cost_service import pairwise_cost
from services.dataset_service import rotate_image
from services.spectra import embed_image

logger = get_logger(__name__)


def _gamma(plan: TransportPlan | np.ndarray) -> np.ndarray:
    return plan.gamma if isinstance(plan, TransportPlan) else np.asarray(plan, dtype=np.float64)


def _labels(labels, num_classes: int) -> np.ndarray:
    arr = np.asarray(labels, dtype=np.int64).reshape(-1)
    if arr.size and (arr.min() < 0 or arr.max() >= num_classes):
        raise AppException(
            ErrorMessage.LABEL_OUT_OF_RANGE,
            f"labels must lie in [0, {num_classes}), got [{arr.min()}, {arr.max()}]",
        )
    return arr


# ============================================
# 클래스 보존 정확도
# ============================================

def one_hot(labels, num_classes: int) -> np.ndarray:
    """H[j, k] = 1 iff labels[j] == k"""
    return np.eye(num_classes)[_labels(labels, num_classes)]


def class_assignment(
    plan: TransportPlan | np.ndarray,
    target_labels,
    num_classes: int,
) -> ClassAssignment:
    """ΓH 의 행별 argmax (동률이면 가장 작은 클래스)"""
    gamma = _gamma(plan)
    H = one_hot(target_labels, num_classes)
    if gamma.shape[1] != H.shape[0]:
        raise AppException(
            ErrorMessage.SHAPE_MISMATCH,
            f"plan has {gamma.shape[1]} columns, {H.shape[0]} target labels",
        )
    mass = gamma @ H
    # np.argmax 는 첫 최대값 인덱스를 반환
    return ClassAssignment(assigned=np.argmax(mass, axis=1), mass_by_class=mass)


def class_preservation_accuracy(assigned, source_labels) -> float:
    assigned = np.asarray(assigned, dtype=np.int64).reshape(-1)
    source = np.asarray(source_labels, dtype=np.int64).reshape(-1)
    if assigned.shape != source.shape:
        raise AppException(
            ErrorMessage.SHAPE_MISMATCH,
            f"{assigned.size} assignments vs {source.size} source labels",
        )
    if assigned.size == 0:
        return 0.0
    return float(np.mean(assigned == source))


def per_class_accuracy(assigned, source_labels, num_classes: int) -> list[float | None]:
    """소스 클래스별 정확도 (해당 클래스가 없으면 None)"""
    assigned = np.asarray(assigned, dtype=np.int64)
    source = _labels(source_labels, num_classes)
    result: list[float | None] = []
    for c in range(num_classes):
        mask = source == c
        result.append(float(np.mean(assigned[mask] == c)) if mask.any() else None)
    return result


def class_confusion(
    plan: TransportPlan | np.ndarray,
    source_labels,
    target_labels,
    num_classes: int,
    normalization: Literal["row", "mass"] = "row",
) -> ClassConfusion:
    """
    (a, b) = 소스 클래스 a 에서 타겟 클래스 b 로 수송된 질량

    row: 소스 클래스 합이 1 이 되도록, mass: 전체 질량 그대로
    """
    gamma = _gamma(plan)
    source_h = one_hot(source_labels, num_classes)
    target_h = one_hot(target_labels, num_classes)
    if gamma.shape != (source_h.shape[0], target_h.shape[0]):
        raise AppException(
            ErrorMessage.SHAPE_MISMATCH,
            f"plan {gamma.shape} vs labels ({source_h.shape[0]}, {target_h.shape[0]})",
        )

    matrix = source_h.T @ gamma @ target_h
    if normalization == "row":
        matrix = _row_normalize(matrix)
    return ClassConfusion(matrix=matrix, normalization=normalization)


def hard_assignment_confusion(assigned, source_labels, num_classes: int) -> ClassConfusion:
    """argmax 배정 횟수 기반 confusion (count)"""
    source = _labels(source_labels, num_classes)
    assigned = _labels(assigned, num_classes)
    matrix = np.zeros((num_classes, num_classes))
    np.add.at(matrix, (source, assigned), 1.0)
    return ClassConfusion(matrix=matrix, normalization="count")


def _row_normalize(matrix: np.ndarray) -> np.ndarray:
    sums = matrix.sum(axis=1, keepdims=True)
    return np.divide(matrix, sums, out=np.zeros_like(matrix), where=sums > 0)


# ============================================
# 거리 통계
# ============================================

def interclass_distance_stats(
    features: np.ndarray,
    labels,
    metric: Metric | str,
    num_classes: int,
) -> np.ndarray:
    """
    (a, b) = 클래스 a, b 특징 벡터 사이 평균 거리 (a == b 면 자기 자신 쌍 제외)

    원소가 하나뿐인 클래스의 intra 값은 0.
    """
    labels = _labels(labels, num_classes)
    counts = np.bincount(labels, minlength=num_classes)
    empty = np.flatnonzero(counts == 0)
    if empty.size:
        raise AppException(ErrorMessage.EMPTY_CLASS, f"classes without features: {empty.tolist()}")

    D = pairwise_cost(features, features, metric).values
    H = one_hot(labels, num_classes)
    sums = H.T @ D @ H

    pair_counts = np.outer(counts, counts).astype(np.float64)
    # 대각선: 자기 자신 쌍 제외 (D 의 대각선 합을 뺌)
    diag_self = H.T @ np.diag(D)
    np.fill_diagonal(sums, np.diag(sums) - diag_self)
    np.fill_diagonal(pair_counts, counts * (counts - 1))

    return np.divide(sums, pair_counts, out=np.zeros_like(sums), where=pair_counts > 0)


def intra_class_ranking(stats: np.ndarray) -> list[int]:
    """intra-class 평균 거리 오름차순 클래스 순서 (가장 촘촘한 클래스가 먼저)"""
    return np.argsort(np.diag(stats), kind="stable").tolist()


def rotation_distance_grid(
    base_images: LabeledImageSet,
    angles: list[float],
    metric: Metric | str,
    representation: Representation,
    R: int | None = None,
    K: int = 40,
    threads: int | None = None,
) -> dict[int, np.ndarray]:
    """
    클래스별 A x A 행렬: (s, t) = angle_s 회전본과 angle_t 회전본 표현 사이 거리,
    클래스 내 샘플 이미지들에 대해 평균
    """
    if not angles:
        raise AppException(ErrorMessage.CONFIG_INVALID, "rotation grid needs at least one angle")

    fill = base_images.meta.background_value

    def grid_for(img: np.ndarray) -> np.ndarray:
        rows = [embed_image(rotate_image(img, a, fill), representation, R, K, fill) for a in angles]
        return pairwise_cost(np.stack(rows), np.stack(rows), metric, threads=1).values

    workers = threads or get_settings().num_threads
    with ThreadPoolExecutor(max_workers=workers) as pool:
        per_image = list(pool.map(grid_for, base_images.images))

    grids: dict[int, np.ndarray] = {}
    for c in range(base_images.num_classes):
        members = [g for g, label in zip(per_image, base_images.labels) if label == c]
        if members:
            grids[c] = np.mean(members, axis=0)

    logger.debug(
        f"rotation grids done | representation={representation.value}, angles={len(angles)}, "
        f"classes={len(grids)}"
    )
    return grids


# ============================================
# classical MDS
# ============================================

def classical_mds(D: np.ndarray, dim: int = 2) -> np.ndarray:
    """
    Torgerson classical scaling

    B = -1/2 J D² J, 상위 dim 개 고유쌍, 좌표 = 고유벡터 * sqrt(max(λ, 0)).
    고유벡터 부호는 절댓값이 가장 큰 원소가 양수가 되도록 고정.
    """
    D = np.asarray(D, dtype=np.float64)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise AppException(ErrorMessage.INVALID_DISTANCE_MATRIX, f"expected square matrix, got {D.shape}")
    if not np.isfinite(D).all() or (D < 0).any():
        raise AppException(ErrorMessage.INVALID_DISTANCE_MATRIX, "entries must be finite and nonnegative")
    scale = max(1.0, float(np.abs(D).max()))
    if not np.allclose(D, D.T, rtol=0, atol=1e-9 * scale):
        raise AppException(ErrorMessage.INVALID_DISTANCE_MATRIX, "matrix is not symmetric")
    if dim < 1:
        raise AppException(ErrorMessage.INVALID_DISTANCE_MATRIX, f"dim must be positive, got {dim}")

    n = D.shape[0]
    J = np.eye(n) - np.full((n, n), 1.0 / n)
    B = -0.5 * J @ (D**2) @ J
    B = 0.5 * (B + B.T)

    eigenvalues, eigenvectors = np.linalg.eigh(B)
    order = np.argsort(eigenvalues)[::-1][:dim]
    eigenvalues = np.maximum(eigenvalues[order], 0.0)
    eigenvectors = eigenvectors[:, order]

    pivots = np.argmax(np.abs(eigenvectors), axis=0)
    signs = np.sign(eigenvectors[pivots, np.arange(eigenvectors.shape[1])])
    signs[signs == 0] = 1.0
    coords = eigenvectors * signs * np.sqrt(eigenvalues)

    if coords.shape[1] < dim:
        coords = np.hstack([coords, np.zeros((n, dim - coords.shape[1]))])
    return coords
