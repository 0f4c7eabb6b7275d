"""
E2E Test Configuration (실제 데이터셋 방식)

E2E 테스트는 실제 MNIST IDX 파일로 전체 파이프라인을 실행합니다.
- 데이터 위치: .env 또는 환경변수 BOT_DATA_DIR (mnist/ 하위 또는 바로 아래)
- 테스트 실행: uv run pytest tests/e2e -m e2e -v

특징:
- 데스크 규모(half 당 클래스별 200장, 2,000x2,000 OT)로 실행
- 8코어 기준 수십 분 소요 가능
- 데이터가 없으면 전체 스킵
- pipeline 은 --normalize-cost 로 실행: 정규화 안 한 L1 cost 는 최대값이 수천 이상이라
  ε=0.01 에서 사실상 정규화 없는 문제가 되고 log-domain 반복이 수렴하지 않는다
- figure 측정값 (τ_interp, τ_feat, 회전 거리 격자) 의 허용 한계는 아래 상수로 기록
"""

import csv
import os
from pathlib import Path

import pytest
from dotenv import load_dotenv

from core.config import get_settings
from exceptions.exceptions import AppException
from main import main
from providers.idx_reader import load_dataset, resolve_dataset_paths
from schemas.dataset import LabeledImageSet
from services.dataset_service import normalize, subsample_per_class


# ============================================
# .env 파일 로드 (E2E 테스트용)
# ============================================

_project_root = Path(__file__).parent.parent.parent
_env_file = _project_root / ".env"

if _env_file.exists():
    load_dotenv(_env_file)


# ============================================
# E2E 설정
# ============================================

DATA_DIR = os.getenv("BOT_DATA_DIR", str(_project_root / "data"))

# 데스크 규모 기본값
E2E_PER_CLASS = int(os.getenv("E2E_PER_CLASS", "200"))

# figure 측정 허용 한계 (측정값은 테스트가 출력)
# 360/K 회전 후 극좌표 격자 vs 한 bin 이동 격자, 상대 L2 중앙값
TAU_INTERP_MAX = 0.30
# 9° 회전 전후 bispectral 특징 상대 L2 거리의 95 백분위 (K=40)
TAU_FEAT_P95_MAX = 0.75
# raw 격자: 최대 비대각 / (0°, 15°) 원소
RAW_GRID_ANGLE_RATIO_MIN = 5.0
# 격자 평탄도: 비대각 (max - min) / 같은 클래스 서로 다른 이미지 사이 평균 거리
BISPECTRAL_GRID_FLATNESS_MAX = 0.5
BISPECTRAL_TO_RAW_FLATNESS_MAX = 0.5

FIGURE_PER_CLASS = 10
FIGURE_SEED = 2024


@pytest.fixture(scope="session")
def mnist_dir() -> Path:
    """MNIST IDX 파일이 없으면 스킵"""
    try:
        resolve_dataset_paths("mnist", DATA_DIR)
    except AppException:
        pytest.skip(f"MNIST not found under {DATA_DIR}. Set BOT_DATA_DIR in .env")
    return Path(DATA_DIR)


@pytest.fixture
def run_pipeline(mnist_dir, tmp_path):
    """데스크 규모 pipeline 실행 후 summary.csv 행을 representation 별로 반환"""
    def _run(name: str, *extra: str) -> dict[str, dict[str, str]]:
        get_settings.cache_clear()
        out = tmp_path / name
        code = main([
            "pipeline",
            "--dataset", "mnist",
            "--data-dir", str(mnist_dir),
            "--per-class", str(E2E_PER_CLASS),
            "--angular-bins", "16",
            "--epsilon", "0.01",
            "--metric", "L1",
            "--normalize-cost",
            "--output-dir", str(out),
            *extra,
        ])
        assert code == 0, f"pipeline exited with {code}"
        with (out / "summary.csv").open(newline="") as f:
            return {row["representation"]: row for row in csv.DictReader(f)}
    return _run


@pytest.fixture(scope="session")
def figure_samples(mnist_dir) -> LabeledImageSet:
    """정규화된 MNIST 에서 클래스별 FIGURE_PER_CLASS 장"""
    dataset = normalize(load_dataset("mnist", mnist_dir))
    return subsample_per_class(dataset, FIGURE_PER_CLASS, FIGURE_SEED)


@pytest.fixture(scope="session")
def figure_bounds() -> dict[str, float]:
    return {
        "tau_interp": TAU_INTERP_MAX,
        "tau_feat_p95": TAU_FEAT_P95_MAX,
        "raw_grid_angle_ratio": RAW_GRID_ANGLE_RATIO_MIN,
        "bispectral_flatness": BISPECTRAL_GRID_FLATNESS_MAX,
        "bispectral_to_raw_flatness": BISPECTRAL_TO_RAW_FLATNESS_MAX,
    }
