# utils/bilinear.py
"""
중심 기준 bilinear 샘플러 (회전 / 극좌표 변환 공용)

좌표는 이미지 중심 ((M-1)/2, (N-1)/2) 으로부터의 (row, col) offset 으로 받는다.
중심의 정수부와 소수부(0 또는 0.5)를 분리해서 보간 가중치를 계산하므로,
배경값으로 대칭 padding 한 이미지에서도 가중치와 이웃 값이 그대로 유지된다.
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class BilinearWeights:
    """샘플 지점별 좌상단 이웃 인덱스와 소수부"""
    rows: np.ndarray
    cols: np.ndarray
    frac_r: np.ndarray
    frac_c: np.ndarray


def split_center(size: int) -> tuple[int, float]:
    """(size-1)/2 -> (정수부, 소수부)"""
    return (size - 1) // 2, 0.5 * ((size - 1) % 2)


def _axis_weights(size: int, offsets: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    center_int, center_frac = split_center(size)
    t = offsets + center_frac
    floor = np.floor(t)
    return center_int + floor.astype(np.int64), t - floor


def bilinear_weights(
    shape: tuple[int, int],
    row_offsets: np.ndarray,
    col_offsets: np.ndarray,
) -> BilinearWeights:
    rows, frac_r = _axis_weights(shape[0], np.asarray(row_offsets, dtype=np.float64))
    cols, frac_c = _axis_weights(shape[1], np.asarray(col_offsets, dtype=np.float64))
    return BilinearWeights(rows=rows, cols=cols, frac_r=frac_r, frac_c=frac_c)


def _gather(img: np.ndarray, rows: np.ndarray, cols: np.ndarray, fill: float) -> np.ndarray:
    M, N = img.shape
    valid = (rows >= 0) & (rows < M) & (cols >= 0) & (cols < N)
    out = np.full(rows.shape, fill, dtype=np.float64)
    out[valid] = img[rows[valid], cols[valid]]
    return out


def bilinear_sample(img: np.ndarray, weights: BilinearWeights, fill: float = 0.0) -> np.ndarray:
    """격자 밖 이웃은 fill 값으로 취급"""
    r, c = weights.rows, weights.cols
    fr, fc = weights.frac_r, weights.frac_c

    v00 = _gather(img, r, c, fill)
    v01 = _gather(img, r, c + 1, fill)
    v10 = _gather(img, r + 1, c, fill)
    v11 = _gather(img, r + 1, c + 1, fill)

    # 소수부가 0 이면 v00 이 그대로 나온다 (정수 격자점 샘플은 정확)
    top = (1.0 - fc) * v00 + fc * v01
    bottom = (1.0 - fc) * v10 + fc * v11
    return (1.0 - fr) * top + fr * bottom


def exact_cos_sin(angle_deg: float) -> tuple[float, float]:
    """각도를 [0,360) 으로 줄이고, 90° 배수는 정확한 값 사용"""
    angle = float(angle_deg) % 360.0
    quarter = {0.0: (1.0, 0.0), 90.0: (0.0, 1.0), 180.0: (-1.0, 0.0), 270.0: (0.0, -1.0)}
    if angle in quarter:
        return quarter[angle]
    rad = np.deg2rad(angle)
    return float(np.cos(rad)), float(np.sin(rad))


@lru_cache(maxsize=64)
def rotation_weights(shape: tuple[int, int], angle_deg: float) -> BilinearWeights:
    """반시계 회전의 역사상 (출력 격자점 -> 원본 좌표) 가중치"""
    M, N = shape
    cos_a, sin_a = exact_cos_sin(angle_deg)

    # y 축은 위쪽이 양수
    cr, cc = (M - 1) / 2.0, (N - 1) / 2.0
    ii, jj = np.meshgrid(np.arange(M), np.arange(N), indexing="ij")
    x = jj - cc
    y = cr - ii

    xs = x * cos_a + y * sin_a
    ys = -x * sin_a + y * cos_a
    return bilinear_weights(shape, -ys, xs)
