# providers/idx_reader.py
"""
IDX 포맷 (MNIST 계열) 리더

  [offset] [type]          [value]
  0000     32 bit integer  0x00000803 (images) / 0x00000801 (labels)   big-endian
  0004     32 bit integer  dim_0 (항목 수)
  0008     32 bit integer  dim_1 (rows)     - images 만
  0012     32 bit integer  dim_2 (cols)     - images 만
  ....     unsigned byte   payload, row-major

파일명이 .gz 로 끝나면 gzip 으로 연다.
"""
import gzip
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from core.logging import get_logger
from exceptions.error_messages import ErrorMessage
from exceptions.exceptions import AppException
from schemas.dataset import DatasetMeta, LabeledImageSet

logger = get_logger(__name__)

IMAGES_MAGIC = 0x00000803
LABELS_MAGIC = 0x00000801


@dataclass(frozen=True)
class DatasetSpec:
    """등록된 벤치마크 데이터셋의 파일명 규칙"""
    images_file: str
    labels_file: str
    num_classes: int
    label_offset: int = 0


# 각 데이터셋은 <data_dir>/<name>/ 또는 <data_dir>/ 바로 아래에서 찾는다
DATASETS: dict[str, DatasetSpec] = {
    "mnist": DatasetSpec("train-images-idx3-ubyte", "train-labels-idx1-ubyte", 10),
    "kmnist": DatasetSpec("train-images-idx3-ubyte", "train-labels-idx1-ubyte", 10),
    "fashion-mnist": DatasetSpec("train-images-idx3-ubyte", "train-labels-idx1-ubyte", 10),
    # letters 라벨은 1..26 으로 저장되어 있음
    "emnist-letters": DatasetSpec(
        "emnist-letters-train-images-idx3-ubyte",
        "emnist-letters-train-labels-idx1-ubyte",
        26,
        label_offset=1,
    ),
}


def _read_bytes(path: Path) -> bytes:
    if not path.is_file():
        raise AppException(ErrorMessage.DATASET_NOT_FOUND, str(path))
    opener = gzip.open if path.suffix == ".gz" else open
    with opener(path, "rb") as f:
        return f.read()


def _parse_header(buffer: bytes, expected_magic: int, ndim: int, path: Path) -> tuple[int, ...]:
    header_size = 4 * (1 + ndim)
    if len(buffer) < header_size:
        raise AppException(ErrorMessage.IDX_PAYLOAD_TRUNCATED, f"{path}: header shorter than {header_size} bytes")

    magic, = struct.unpack(">I", buffer[:4])
    if magic != expected_magic:
        raise AppException(
            ErrorMessage.IDX_FORMAT_INVALID,
            f"{path}: magic 0x{magic:08X}, expected 0x{expected_magic:08X}",
        )
    return struct.unpack(f">{ndim}I", buffer[4:header_size])


def read_idx_images(path: str | Path) -> np.ndarray:
    """이미지 IDX 파일 -> (n, rows, cols) uint8"""
    path = Path(path)
    buffer = _read_bytes(path)
    n, rows, cols = _parse_header(buffer, IMAGES_MAGIC, 3, path)

    expected = n * rows * cols
    payload = np.frombuffer(buffer, dtype=np.uint8, offset=16)
    if payload.size < expected:
        raise AppException(
            ErrorMessage.IDX_PAYLOAD_TRUNCATED,
            f"{path}: {payload.size} pixel bytes, header promises {expected}",
        )
    return payload[:expected].reshape(n, rows, cols)


def read_idx_labels(path: str | Path) -> np.ndarray:
    """라벨 IDX 파일 -> (n,) uint8"""
    path = Path(path)
    buffer = _read_bytes(path)
    n, = _parse_header(buffer, LABELS_MAGIC, 1, path)

    payload = np.frombuffer(buffer, dtype=np.uint8, offset=8)
    if payload.size < n:
        raise AppException(
            ErrorMessage.IDX_PAYLOAD_TRUNCATED,
            f"{path}: {payload.size} label bytes, header promises {n}",
        )
    return payload[:n]


def load_idx(
    images_path: str | Path,
    labels_path: str | Path,
    num_classes: int | None = None,
    label_offset: int = 0,
    source: str | None = None,
) -> LabeledImageSet:
    """IDX 이미지/라벨 쌍을 [0,255] 실수 격자 집합으로 로드"""
    images = read_idx_images(images_path)
    labels = read_idx_labels(labels_path).astype(np.int64) - label_offset

    if images.shape[0] != labels.shape[0]:
        raise AppException(
            ErrorMessage.IDX_COUNT_MISMATCH,
            f"{images.shape[0]} images vs {labels.shape[0]} labels",
        )
    if labels.size and labels.min() < 0:
        raise AppException(ErrorMessage.LABEL_OUT_OF_RANGE, f"label below offset {label_offset}")

    inferred = int(labels.max()) + 1 if labels.size else 1
    num_classes = num_classes or inferred
    if inferred > num_classes:
        raise AppException(ErrorMessage.LABEL_OUT_OF_RANGE, f"label {inferred - 1} >= {num_classes}")

    logger.info(
        f"idx loaded | images={images.shape[0]}, shape={images.shape[1]}x{images.shape[2]}, "
        f"classes={num_classes}"
    )
    return LabeledImageSet(
        images=images.astype(np.float64),
        labels=labels,
        num_classes=num_classes,
        meta=DatasetMeta(source=source or Path(images_path).name),
    )


def _find_file(directory: Path, stem: str) -> Path | None:
    for candidate in (directory / stem, directory / f"{stem}.gz"):
        if candidate.is_file():
            return candidate
    return None


def resolve_dataset_paths(name: str, data_dir: str | Path) -> tuple[Path, Path, DatasetSpec]:
    """등록된 데이터셋 이름으로 IDX 파일 경로 탐색"""
    if name not in DATASETS:
        raise AppException(
            ErrorMessage.DATASET_NOT_FOUND,
            f"unknown dataset '{name}', known: {sorted(DATASETS)}",
        )
    spec = DATASETS[name]
    root = Path(data_dir)

    for directory in (root / name, root):
        images = _find_file(directory, spec.images_file)
        labels = _find_file(directory, spec.labels_file)
        if images is not None and labels is not None:
            return images, labels, spec

    raise AppException(
        ErrorMessage.DATASET_NOT_FOUND,
        f"{spec.images_file}[.gz] / {spec.labels_file}[.gz] not found under {root}",
    )


def load_dataset(name: str, data_dir: str | Path) -> LabeledImageSet:
    """등록된 데이터셋 로드"""
    images_path, labels_path, spec = resolve_dataset_paths(name, data_dir)
    return load_idx(
        images_path,
        labels_path,
        num_classes=spec.num_classes,
        label_offset=spec.label_offset,
        source=name,
    )
