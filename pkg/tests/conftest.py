"""
공통 Fixtures

모든 레벨에서 쓰는 합성 이미지 / 합성 IDX 데이터셋
(레벨별 fixture 는 각 디렉토리의 conftest.py, 생성 helper 는 tests/synthetic.py)
"""

import numpy as np
import pytest

from core.config import get_settings
from schemas.dataset import DatasetMeta, LabeledImageSet
from tests.synthetic import gaussian_blobs, synthetic_images, write_idx


# ============================================
# 공통 fixtures
# ============================================

@pytest.fixture(autouse=True)
def _fresh_settings():
    """환경변수를 바꾸는 테스트가 캐시된 Settings 를 보지 않도록"""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def blob_image():
    """비대칭 가우시안 blob 28x28 이미지 (값 범위 대략 [0, 1.5])"""
    return (
        gaussian_blobs(28, [(-5.0, 1.0), (2.0, 4.0)], sigma=4.0)
        + 0.5 * gaussian_blobs(28, [(3.0, -4.0)], sigma=4.0)
    )


@pytest.fixture
def synthetic_set():
    """클래스당 6장, 16x16 합성 데이터셋 (정규화 전)"""
    images, labels = synthetic_images(per_class=6)
    return LabeledImageSet(
        images=images.astype(np.float64),
        labels=labels.astype(np.int64),
        num_classes=3,
        meta=DatasetMeta(source="synthetic"),
    )


@pytest.fixture
def idx_dataset_dir(tmp_path):
    """클래스당 12장 합성 IDX 파일이 있는 데이터 디렉토리 (<tmp>/data/mnist/)"""
    images, labels = synthetic_images(per_class=12)
    data_dir = tmp_path / "data"
    write_idx(data_dir / "mnist", images, labels)
    return data_dir
