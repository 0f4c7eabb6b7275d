"""
Spectra Unit Tests

테스트 대상: services/spectra.py
- dft() / dft_direct(): Z/KZ 푸리에 변환, 이동 정리, Hermitian 대칭
- power_spectrum() / bispectrum(): 순환 이동 불변량
- bispectral_embedding() / embed_image() / embed_dataset(): 이미지 임베딩
"""

import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from schemas.spectra import PolarImage, Representation
from services.dataset_service import normalize, rotate_image
from services.polar_transform import cyclic_shift, to_polar
from services.spectra import (
    bispectral_embedding,
    bispectrum,
    bispectrum_naive,
    dft,
    dft_direct,
    embed_dataset,
    embed_image,
    power_embedding,
    power_spectrum,
)

signals = st.integers(2, 24).flatmap(
    lambda K: arrays(np.float64, K, elements=st.floats(-10.0, 10.0, allow_nan=False))
)


def _close(a: np.ndarray, b: np.ndarray, rel: float = 1e-9) -> bool:
    scale = max(1.0, float(np.max(np.abs(a))), float(np.max(np.abs(b))))
    return bool(np.max(np.abs(a - b)) <= rel * scale)


# ============================================
# 1D 변환 테스트
# ============================================

class TestSpectra1D:
    """dft / power spectrum / bispectrum 테스트"""

    @settings(max_examples=50, deadline=None)
    @given(f=signals)
    def test_fft_직접합_일치(self, f):
        assert _close(dft(f).coeffs, dft_direct(f).coeffs)

    @settings(max_examples=50, deadline=None)
    @given(f=signals)
    def test_bispectrum_벡터화_일치(self, f):
        c = dft(f)

        assert _close(bispectrum(c).B, bispectrum_naive(c).B)

    @settings(max_examples=50, deadline=None)
    @given(f=signals, t=st.integers(-50, 50))
    def test_순환_이동_불변(self, f, t):
        """power spectrum 과 bispectrum 은 순환 이동에 불변"""
        c = dft(f)
        shifted = dft(np.roll(f, t))

        assert _close(power_spectrum(shifted), power_spectrum(c))
        assert _close(bispectrum(shifted).B, bispectrum(c).B)

    def test_정규화_없는_정의(self):
        """f̂_0 = Σf, B_00 = f̂_0³"""
        f = np.array([1.0, 2.0, 3.0])

        c = dft(f)

        assert c.coeffs[0] == pytest.approx(6.0)
        assert bispectrum(c).B[0, 0] == pytest.approx(216.0)

    def test_bispectrum_은_반사를_구분(self):
        """반사 신호는 power spectrum 이 같지만 bispectrum 은 다르다"""
        f = np.array([3.0, 1.0, 0.0, 0.0, 2.0, 0.0, 0.0])
        reflected = np.roll(f[::-1], 1)

        c, r = dft(f), dft(reflected)

        assert _close(power_spectrum(c), power_spectrum(r))
        assert not _close(bispectrum(c).B, bispectrum(r).B, rel=1e-3)

    def test_K_1_신호(self):
        c = dft(np.array([4.0]))

        assert bispectrum(c).B.shape == (1, 1)

    def test_이동_정리_계수별(self):
        """dft(roll(f, t))[k] = exp(-2πi k t / K) · f̂[k], 신호 100 개"""
        rng = np.random.default_rng(21)
        for _ in range(100):
            K = int(rng.integers(2, 41))
            t = int(rng.integers(-K, 2 * K))
            f = rng.normal(size=K)

            c = dft(f).coeffs
            shifted = dft(np.roll(f, t)).coeffs

            phase = np.exp(-2j * np.pi * np.arange(K) * t / K)
            scale = max(1.0, float(np.max(np.abs(c))))
            assert np.max(np.abs(shifted - phase * c)) <= 1e-12 * scale

    @settings(max_examples=50, deadline=None)
    @given(f=signals)
    def test_실수_신호의_hermitian_대칭(self, f):
        """f̂[-k mod K] = conj(f̂[k])"""
        c = dft(f).coeffs
        K = c.shape[0]

        mirrored = c[(-np.arange(K)) % K]

        assert _close(mirrored, np.conj(c), rel=1e-12)

    def test_대량_신호_모든_이동_불변(self):
        """길이 40 신호 1000 개 x 이동 40 가지, 상대 오차 1e-9 이하, 10 초 안"""
        grid = np.random.default_rng(22).normal(size=(1000, 40))
        polar = PolarImage(grid=grid, radial_spacing=1.0)

        started = time.perf_counter()
        base = bispectral_embedding(polar).vec
        scale = float(np.max(np.abs(base)))
        worst = 0.0
        for t in range(40):
            shifted = bispectral_embedding(cyclic_shift(polar, t)).vec
            worst = max(worst, float(np.max(np.abs(shifted - base))) / scale)
        elapsed = time.perf_counter() - started

        assert worst <= 1e-9
        assert elapsed < 10.0

    def test_무작위_쌍_구분(self):
        """서로 이동 관계가 아닌 무작위 신호 100 쌍은 bispectrum 이 다르다"""
        rng = np.random.default_rng(23)
        for _ in range(100):
            K = int(rng.integers(3, 17))
            a, b = rng.normal(size=K), rng.normal(size=K)

            Ba, Bb = bispectrum(dft(a)).B, bispectrum(dft(b)).B

            assert not _close(Ba, Bb, rel=1e-3)


# ============================================
# 극좌표 격자 임베딩 테스트
# ============================================

class TestEmbedding:
    """이미지 임베딩 테스트"""

    def test_28x28_기본_길이(self, blob_image):
        """R=14, K=40 이면 2·14·40² = 44800"""
        vec = embed_image(blob_image, Representation.BISPECTRAL, K=40)

        assert vec.shape == (44800,)
        assert vec.dtype == np.float32

    def test_실수_허수_교차_배치(self, blob_image):
        """반지름 우선, (i, j) 순서, (real, imag) 쌍"""
        polar = to_polar(blob_image, R=2, K=3)
        B = bispectrum(dft(polar.grid[1])).B

        vec = bispectral_embedding(polar).vec

        offset = 2 * 9 * 1
        for i in range(3):
            for j in range(3):
                pos = offset + 2 * (3 * i + j)
                assert vec[pos] == pytest.approx(B[i, j].real)
                assert vec[pos + 1] == pytest.approx(B[i, j].imag)

    def test_각도_이동_불변(self, blob_image):
        """극좌표 격자를 순환 이동해도 임베딩 불변"""
        polar = to_polar(blob_image, K=12)

        for t in (1, 5, 11):
            assert _close(
                bispectral_embedding(cyclic_shift(polar, t)).vec,
                bispectral_embedding(polar).vec,
            )

    def test_90도_회전_불변(self, blob_image):
        """K 가 4 의 배수면 90° 회전 이미지의 임베딩이 (수치 오차 내) 같다"""
        base = embed_image(blob_image, K=16).astype(np.float64)

        rotated = embed_image(rotate_image(blob_image, 90.0), K=16).astype(np.float64)

        assert np.linalg.norm(rotated - base) / np.linalg.norm(base) < 1e-5

    def test_raw_는_회전에_민감(self, blob_image):
        base = embed_image(blob_image, Representation.RAW)

        rotated = embed_image(rotate_image(blob_image, 90.0), Representation.RAW)

        assert np.linalg.norm(rotated - base) / np.linalg.norm(base) > 0.1

    def test_power_임베딩_길이(self):
        img = np.random.default_rng(0).normal(size=(16, 16))

        vec = power_embedding(to_polar(img, K=10))

        assert vec.shape == (8 * 10,)
        assert np.all(vec >= 0)


class TestEmbedDataset:
    """데이터셋 임베딩 테스트"""

    @pytest.mark.parametrize(
        "representation, dim",
        [
            (Representation.RAW, 256),
            (Representation.POWER, 8 * 6),
            (Representation.BISPECTRAL, 2 * 8 * 36),
        ],
    )
    def test_표현별_차원(self, synthetic_set, representation, dim):
        features = embed_dataset(synthetic_set, K=6, representation=representation, threads=2)

        assert features.values.shape == (18, dim)
        assert features.values.dtype == np.float32
        np.testing.assert_array_equal(features.labels, synthetic_set.labels)

    def test_R_K_기록(self, synthetic_set):
        raw = embed_dataset(synthetic_set, representation=Representation.RAW, threads=1)
        bisp = embed_dataset(synthetic_set, R=4, K=6, threads=1)

        assert (raw.R, raw.K) == (0, 0)
        assert (bisp.R, bisp.K) == (4, 6)

    def test_행은_단일_이미지_결과와_동일(self, synthetic_set):
        """thread 수와 무관하게 bit 단위로 같은 행"""
        dataset = normalize(synthetic_set)
        fill = dataset.meta.background_value

        many = embed_dataset(dataset, K=8, threads=4)
        one = embed_dataset(dataset, K=8, threads=1)

        np.testing.assert_array_equal(many.values, one.values)
        np.testing.assert_array_equal(
            many.values[5], embed_image(dataset.images[5], K=8, fill=fill)
        )
