# services/dataset_service.py
import numpy as np

from core.logging import get_logger
from exceptions.error_messages import ErrorMessage
from exceptions.exceptions import AppException
from schemas.dataset import AugmentationRecord, LabeledImageSet, SplitPair
from utils.bilinear import bilinear_sample, rotation_weights

logger = get_logger(__name__)


def make_rng(seed: int) -> np.random.Generator:
    """seed 고정 PCG64 generator (플랫폼 무관 재현)"""
    return np.random.Generator(np.random.PCG64(seed))


def normalize(dataset: LabeledImageSet) -> LabeledImageSet:
    """전체 픽셀 기준 전역 mean/std 정규화"""
    if len(dataset) == 0:
        raise AppException(ErrorMessage.EMPTY_DATASET)

    mean = float(dataset.images.mean())
    std = float(dataset.images.std())
    if std == 0.0 or not np.isfinite(std):
        raise AppException(ErrorMessage.DEGENERATE_DATA, f"std={std}")

    images = (dataset.images - mean) / std

    # 이미 정규화된 입력이면 원래 통계를 합성해서 유지 (원본 0 밝기 = 배경값 추적용)
    prev = dataset.meta
    if prev.normalized and prev.mean is not None and prev.std:
        mean, std = prev.mean + prev.std * mean, prev.std * std

    logger.debug(f"normalized | n={len(dataset)}, mean={mean:.6f}, std={std:.6f}")
    return dataset.replace_images(
        images,
        prev.model_copy(update={"normalized": True, "mean": mean, "std": std}),
    )


def split_by_class_halves(dataset: LabeledImageSet, seed: int) -> SplitPair:
    """클래스별 seed 셔플 후 앞 floor(n_c/2) 는 half_a, 나머지는 half_b"""
    counts = dataset.class_counts()
    empty = np.flatnonzero(counts == 0)
    if empty.size:
        raise AppException(ErrorMessage.EMPTY_CLASS, f"classes without images: {empty.tolist()}")

    rng = make_rng(seed)
    parts_a: list[np.ndarray] = []
    parts_b: list[np.ndarray] = []
    for c in range(dataset.num_classes):
        idx = np.flatnonzero(dataset.labels == c)
        idx = idx[rng.permutation(idx.size)]
        cut = idx.size // 2
        parts_a.append(idx[:cut])
        parts_b.append(idx[cut:])

    indices_a = np.sort(np.concatenate(parts_a))
    indices_b = np.sort(np.concatenate(parts_b))

    logger.info(f"split done | seed={seed}, half_a={indices_a.size}, half_b={indices_b.size}")
    return SplitPair(
        half_a=dataset.take(indices_a),
        half_b=dataset.take(indices_b),
        seed=seed,
        indices_a=indices_a,
        indices_b=indices_b,
    )


def rotate_image(img: np.ndarray, angle: float, fill: float = 0.0) -> np.ndarray:
    """중심 ((M-1)/2, (N-1)/2) 기준 반시계 회전, 역사상 bilinear 보간"""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2:
        raise AppException(ErrorMessage.IMAGE_SHAPE_MISMATCH, f"expected 2-D image, got {img.shape}")
    if float(angle) % 360.0 == 0.0:
        return img.copy()

    weights = rotation_weights(img.shape, float(angle))
    return bilinear_sample(img, weights, fill)


def augment_uniform_rotations(dataset: LabeledImageSet, seed: int) -> LabeledImageSet:
    """이미지마다 [0, 360) 균등 각도로 독립 회전, 각도는 meta 에 기록"""
    if len(dataset) == 0:
        raise AppException(ErrorMessage.EMPTY_DATASET)

    angles = make_rng(seed).uniform(0.0, 360.0, size=len(dataset))
    fill = dataset.meta.background_value

    rotated = np.empty_like(dataset.images)
    for i, angle in enumerate(angles):
        rotated[i] = rotate_image(dataset.images[i], float(angle), fill)

    logger.info(f"rotation augment done | n={len(dataset)}, seed={seed}, fill={fill:.4f}")
    meta = dataset.meta.model_copy(
        update={
            "augmentation": AugmentationRecord(
                seed=seed, mode="uniform-random", angles=angles.tolist()
            )
        }
    )
    return dataset.replace_images(rotated, meta)


def rotate_fixed(dataset: LabeledImageSet, angle: float) -> LabeledImageSet:
    """모든 이미지를 같은 각도로 회전 (거리 grid / MDS 용)"""
    fill = dataset.meta.background_value
    rotated = np.empty_like(dataset.images)
    for i, img in enumerate(dataset.images):
        rotated[i] = rotate_image(img, angle, fill)
    meta = dataset.meta.model_copy(
        update={
            "augmentation": AugmentationRecord(mode="fixed", angles=[float(angle)] * len(dataset))
        }
    )
    return dataset.replace_images(rotated, meta)


def subsample_per_class(dataset: LabeledImageSet, per_class: int, seed: int) -> LabeledImageSet:
    """클래스별 per_class 개 비복원 추출 (원본 순서 유지)"""
    if per_class < 1:
        raise AppException(ErrorMessage.SUBSAMPLE_TOO_LARGE, f"per_class must be positive, got {per_class}")

    counts = dataset.class_counts()
    if per_class > int(counts.min()):
        raise AppException(
            ErrorMessage.SUBSAMPLE_TOO_LARGE,
            f"per_class={per_class} exceeds smallest class size {int(counts.min())}",
        )

    rng = make_rng(seed)
    picked = [
        rng.choice(np.flatnonzero(dataset.labels == c), size=per_class, replace=False)
        for c in range(dataset.num_classes)
    ]
    indices = np.sort(np.concatenate(picked))

    logger.debug(f"subsample done | per_class={per_class}, n={indices.size}, seed={seed}")
    return dataset.take(indices)
