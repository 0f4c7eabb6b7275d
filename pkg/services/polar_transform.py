# services/polar_transform.py
from functools import lru_cache

import numpy as np

from exceptions.error_messages import ErrorMessage
from exceptions.exceptions import AppException
from schemas.spectra import PolarImage
from utils.bilinear import BilinearWeights, bilinear_sample, bilinear_weights

DEFAULT_ANGULAR_BINS = 40


def default_radial_bins(shape: tuple[int, int]) -> int:
    """R = floor(min(M, N) / 2)"""
    return min(shape) // 2


def default_radial_spacing(shape: tuple[int, int], R: int) -> float:
    return (min(shape) / 2.0) / R


@lru_cache(maxsize=32)
def polar_weights(shape: tuple[int, int], R: int, K: int, radial_spacing: float) -> BilinearWeights:
    """(r, k) -> 중심 + ρ_r (cos θ_k, sin θ_k) 샘플 가중치, y 축 위쪽 양수"""
    rho = (np.arange(R, dtype=np.float64) + 0.5) * radial_spacing
    theta = 2.0 * np.pi * np.arange(K, dtype=np.float64) / K

    row_offsets = -np.outer(rho, np.sin(theta))
    col_offsets = np.outer(rho, np.cos(theta))
    return bilinear_weights(shape, row_offsets, col_offsets)


def to_polar(
    img: np.ndarray,
    R: int | None = None,
    K: int = DEFAULT_ANGULAR_BINS,
    fill: float = 0.0,
    radial_spacing: float | None = None,
) -> PolarImage:
    """
    Cartesian 이미지 -> R x K 극좌표 격자

    Args:
        img: (M, N) 이미지
        R: 반지름 bin 수 (None 이면 floor(min(M,N)/2))
        K: 각도 bin 수
        fill: 격자 밖 샘플의 배경값
        radial_spacing: bin 간격 고정값 (None 이면 (min(M,N)/2)/R)
    """
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2:
        raise AppException(ErrorMessage.IMAGE_SHAPE_MISMATCH, f"expected 2-D image, got {img.shape}")

    max_r = default_radial_bins(img.shape)
    R = max_r if R is None else R
    if R < 1 or R > max_r:
        raise AppException(ErrorMessage.POLAR_PARAMETER_INVALID, f"R={R} must lie in [1, {max_r}]")
    if K < 2:
        raise AppException(ErrorMessage.POLAR_PARAMETER_INVALID, f"K={K} must be at least 2")

    spacing = default_radial_spacing(img.shape, R) if radial_spacing is None else float(radial_spacing)
    if spacing <= 0:
        raise AppException(ErrorMessage.POLAR_PARAMETER_INVALID, f"radial_spacing={spacing}")

    grid = bilinear_sample(img, polar_weights(img.shape, R, K, spacing), fill)
    return PolarImage(grid=grid, radial_spacing=spacing)


def cyclic_shift(polar: PolarImage, t: int) -> PolarImage:
    """각도 축 순환 이동: out[r, k] = in[r, (k - t) mod K]"""
    return PolarImage(grid=np.roll(polar.grid, int(t), axis=1), radial_spacing=polar.radial_spacing)
