"""
Integration 테스트 전용 Fixtures

합성 IDX 데이터셋 위에서 CLI 진입점(main) 을 그대로 호출
(합성 데이터셋 fixture 는 tests/conftest.py 에 있음)
"""

import csv

import pytest

from main import main


# ============================================
# CLI 실행 helper
# ============================================

@pytest.fixture
def run_cli(capsys):
    """main(argv) 실행 후 (종료 코드, stdout) 반환"""
    def _run(*argv: str) -> tuple[int, str]:
        code = main([str(a) for a in argv])
        return code, capsys.readouterr().out
    return _run


@pytest.fixture
def experiment_args(idx_dataset_dir):
    """3 클래스 합성 IDX 파일을 직접 지정한 작은 실험 설정: half 당 클래스별 4장, K=8, 정규화 cost"""
    def _args(output_dir, *extra: str) -> list[str]:
        return [
            "--dataset", "synthetic",
            "--images", str(idx_dataset_dir / "mnist" / "train-images-idx3-ubyte"),
            "--labels", str(idx_dataset_dir / "mnist" / "train-labels-idx1-ubyte"),
            "--per-class", "4",
            "--angular-bins", "8",
            "--epsilon", "0.5",
            "--normalize-cost",
            "--threads", "2",
            "--output-dir", str(output_dir),
            *extra,
        ]
    return _args


def read_csv_rows(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as f:
        return list(csv.DictReader(f))


@pytest.fixture
def csv_rows():
    return read_csv_rows
