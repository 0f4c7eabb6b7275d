# services/spectra.py
"""
순환군 Z/KZ 푸리에 분석

  f̂_k    = Σ_g f(g) e^{-i2πkg/K}              (정규화 없음)
  q_k    = |f̂_k|²                              (power spectrum)
  B_{ij} = f̂_i f̂_j conj(f̂_{(i+j) mod K})       (bispectrum)

이미지 임베딩은 반지름별 각도 slice 에 대해 dft -> bispectrum 을 계산하고,
복소수를 (real, imag) 쌍으로 펼쳐 반지름 순서대로 이어붙인다.
"""
from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np

from core.config import get_settings
from core.logging import get_logger, log_execution_time
from schemas.dataset import LabeledImageSet
from schemas.spectra import (
    BispectralFeature,
    Bispectrum1D,
    FeatureMatrix,
    PolarImage,
    Representation,
    SpectralCoefficients,
)
from services.polar_transform import DEFAULT_ANGULAR_BINS, to_polar

logger = get_logger(__name__)


# ============================================
# 1D 변환
# ============================================

def dft(signal: np.ndarray) -> SpectralCoefficients:
    """FFT 로 계산 (dft_direct 와 동일 계약)"""
    return SpectralCoefficients(coeffs=np.fft.fft(np.asarray(signal, dtype=np.float64)))


def dft_direct(signal: np.ndarray) -> SpectralCoefficients:
    """O(K²) 직접 합 - 검증용"""
    f = np.asarray(signal, dtype=np.float64)
    K = f.shape[0]
    g = np.arange(K)
    kernel = np.exp(-2j * np.pi * np.outer(g, g) / K)
    return SpectralCoefficients(coeffs=kernel @ f)


def power_spectrum(c: SpectralCoefficients) -> np.ndarray:
    return np.abs(c.coeffs) ** 2


def _bispectrum_matrix(coeffs: np.ndarray) -> np.ndarray:
    K = coeffs.shape[-1]
    idx = (np.arange(K)[:, None] + np.arange(K)[None, :]) % K
    return coeffs[..., :, None] * coeffs[..., None, :] * np.conj(coeffs[..., idx])


def bispectrum(c: SpectralCoefficients) -> Bispectrum1D:
    return Bispectrum1D(B=_bispectrum_matrix(c.coeffs))


def bispectrum_naive(c: SpectralCoefficients) -> Bispectrum1D:
    """삼중곱 정의를 그대로 loop - 검증용"""
    f = c.coeffs
    K = f.shape[0]
    B = np.zeros((K, K), dtype=np.complex128)
    for i in range(K):
        for j in range(K):
            B[i, j] = f[i] * f[j] * np.conj(f[(i + j) % K])
    return Bispectrum1D(B=B)


# ============================================
# 극좌표 격자 임베딩
# ============================================

def bispectral_embedding(polar: PolarImage) -> BispectralFeature:
    """반지름별 bispectrum 을 realify 해서 radius-major 로 연결 (길이 2RK²)"""
    coeffs = np.fft.fft(polar.grid, axis=1)
    B = np.ascontiguousarray(_bispectrum_matrix(coeffs))
    # complex128 view -> (real, imag) 교차 배치
    return BispectralFeature(vec=B.view(np.float64).reshape(-1), R=polar.R, K=polar.K)


def power_embedding(polar: PolarImage) -> np.ndarray:
    """반지름별 |f̂_k|² 연결 (길이 RK) - 위상 정보 없음"""
    coeffs = np.fft.fft(polar.grid, axis=1)
    return (np.abs(coeffs) ** 2).reshape(-1)


def _image_embedder(
    representation: Representation,
    R: int | None,
    K: int,
    fill: float,
) -> Callable[[np.ndarray], np.ndarray]:
    if representation == Representation.RAW:
        return lambda img: np.asarray(img, dtype=np.float64).reshape(-1)
    if representation == Representation.POWER:
        return lambda img: power_embedding(to_polar(img, R, K, fill))
    return lambda img: bispectral_embedding(to_polar(img, R, K, fill)).vec


def embed_image(
    img: np.ndarray,
    representation: Representation = Representation.BISPECTRAL,
    R: int | None = None,
    K: int = DEFAULT_ANGULAR_BINS,
    fill: float = 0.0,
) -> np.ndarray:
    """단일 이미지 임베딩 (embed_dataset 의 행과 동일)"""
    return _image_embedder(representation, R, K, fill)(img).astype(np.float32)


@log_execution_time(logger)
def embed_dataset(
    dataset: LabeledImageSet,
    R: int | None = None,
    K: int = DEFAULT_ANGULAR_BINS,
    representation: Representation = Representation.BISPECTRAL,
    threads: int | None = None,
) -> FeatureMatrix:
    """
    데이터셋 전체 임베딩 (행 순서 = 이미지 순서)

    이미지 단위로 thread pool 에 map 하므로 결과는 단일 이미지 호출과 bit 단위로 같다.
    """
    M, N = dataset.image_shape
    fill = dataset.meta.background_value
    embedder = _image_embedder(representation, R, K, fill)

    if representation == Representation.RAW:
        R_out, K_out, dim = 0, 0, M * N
    else:
        R_out = (min(M, N) // 2) if R is None else R
        K_out = K
        dim = 2 * R_out * K * K if representation == Representation.BISPECTRAL else R_out * K

    values = np.zeros((len(dataset), dim), dtype=np.float32)
    if len(dataset):
        workers = threads or get_settings().num_threads
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for i, row in enumerate(pool.map(embedder, dataset.images)):
                values[i] = row

    logger.info(
        f"embedding done | representation={representation.value}, n={len(dataset)}, dim={dim}"
    )
    return FeatureMatrix(
        values=values,
        labels=dataset.labels,
        num_classes=dataset.num_classes,
        representation=representation,
        R=R_out,
        K=K_out,
    )
