"""
테스트용 합성 데이터 생성 helper

부드러운 가우시안 blob 이미지와 MNIST 이름 규칙의 IDX 파일
"""

import gzip
import struct
from pathlib import Path

import numpy as np

def gaussian_blobs(
    size: int,
    centers: list[tuple[float, float]],
    sigma: float = 2.0,
    amplitude: float = 1.0,
) -> np.ndarray:
    """
    (row, col) offset(중심 기준) 위치의 가우시안 blob 합

    부드러운 이미지라 bilinear 보간 오차가 작다.
    """
    c = (size - 1) / 2.0
    rows, cols = np.meshgrid(np.arange(size) - c, np.arange(size) - c, indexing="ij")
    img = np.zeros((size, size))
    for r0, c0 in centers:
        img += amplitude * np.exp(-((rows - r0) ** 2 + (cols - c0) ** 2) / (2 * sigma**2))
    return img



# 클래스별 blob 배치 (회전 대칭이 아닌 모양)
CLASS_LAYOUTS: dict[int, list[tuple[float, float]]] = {
    0: [(-3.5, 0.0)],
    1: [(-3.5, 0.0), (0.0, 3.5)],
    2: [(-3.5, -2.0), (3.5, -2.0), (0.0, 3.5)],
}


def synthetic_images(per_class: int, size: int = 16, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """클래스 3개, 위치 jitter 가 들어간 uint8 이미지와 라벨 (라벨 순서 섞음)"""
    rng = np.random.default_rng(seed)
    images, labels = [], []
    for label, layout in CLASS_LAYOUTS.items():
        for _ in range(per_class):
            jitter = rng.normal(0.0, 0.3, size=(len(layout), 2))
            centers = [(r + dr, c + dc) for (r, c), (dr, dc) in zip(layout, jitter)]
            img = gaussian_blobs(size, centers, sigma=1.6, amplitude=240.0)
            images.append(np.clip(np.rint(img), 0, 255).astype(np.uint8))
            labels.append(label)
    order = rng.permutation(len(labels))
    return np.stack(images)[order], np.asarray(labels, dtype=np.uint8)[order]


def write_idx(directory: Path, images: np.ndarray, labels: np.ndarray, gz: bool = False) -> tuple[Path, Path]:
    """MNIST 이름 규칙으로 IDX 파일 기록"""
    directory.mkdir(parents=True, exist_ok=True)
    n, rows, cols = images.shape
    image_bytes = struct.pack(">IIII", 0x00000803, n, rows, cols) + images.astype(np.uint8).tobytes()
    label_bytes = struct.pack(">II", 0x00000801, n) + labels.astype(np.uint8).tobytes()

    suffix = ".gz" if gz else ""
    images_path = directory / f"train-images-idx3-ubyte{suffix}"
    labels_path = directory / f"train-labels-idx1-ubyte{suffix}"
    opener = gzip.open if gz else open
    with opener(images_path, "wb") as f:
        f.write(image_bytes)
    with opener(labels_path, "wb") as f:
        f.write(label_bytes)
    return images_path, labels_path
