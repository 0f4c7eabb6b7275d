# cli/common.py
import argparse
import sys
from typing import Any

from core.logging import get_logger
from schemas.cost import Metric
from schemas.experiment import Direction, ExperimentConfig, load_experiment_config
from schemas.spectra import Representation
from schemas.transport import Solver

logger = get_logger(__name__)

INPUT_ERROR_EXIT = 1


class CliArgumentParser(argparse.ArgumentParser):
    """사용법 오류도 입력 오류 종료 코드(1) 로 (argparse 기본값 2 는 미수렴 전용)"""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(INPUT_ERROR_EXIT, f"{self.prog}: error: {message}\n")


def add_experiment_arguments(parser: argparse.ArgumentParser) -> None:
    """ExperimentConfig 필드 override 용 flag (지정한 것만 설정 파일 값을 덮어씀)"""
    parser.add_argument("--config", help="TOML / JSON 설정 파일 (이전 실행의 config.json 도 가능)")

    data = parser.add_argument_group("dataset")
    data.add_argument("--dataset", help="mnist | kmnist | fashion-mnist | emnist-letters")
    data.add_argument("--data-dir", dest="data_dir", help="IDX 파일 디렉토리 (기본값 BOT_DATA_DIR)")
    data.add_argument("--images", dest="images_path", help="이미지 IDX 파일 경로")
    data.add_argument("--labels", dest="labels_path", help="라벨 IDX 파일 경로")
    data.add_argument("--split-seed", dest="split_seed", type=int)
    data.add_argument("--rotation-seed", dest="rotation_seed", type=int)
    data.add_argument("--figure-seed", dest="figure_seed", type=int)
    data.add_argument("--per-class", dest="per_class", type=int, help="half 당 클래스별 샘플 수 (0 = 전체)")
    data.add_argument("--figure-per-class", dest="figure_per_class", type=int)
    data.add_argument("--baseline", action="store_true", default=None, help="두 half 모두 회전 없이")
    data.add_argument("--direction", choices=[d.value for d in Direction])

    features = parser.add_argument_group("features")
    features.add_argument("--radial-bins", "-R", dest="radial_bins", type=int)
    features.add_argument("--angular-bins", "-K", dest="angular_bins", type=int)
    features.add_argument(
        "--representation",
        dest="representations",
        nargs="+",
        choices=[r.value for r in Representation],
    )

    ot = parser.add_argument_group("transport")
    ot.add_argument("--metric", dest="metrics", nargs="+", choices=[m.value for m in Metric])
    ot.add_argument("--solver", choices=[s.value for s in Solver])
    ot.add_argument("--epsilon", type=float)
    ot.add_argument("--epsilon-sweep", dest="epsilon_sweep", nargs="+", type=float)
    ot.add_argument("--tol", type=float)
    ot.add_argument("--max-iter", dest="max_iter", type=int)
    ot.add_argument("--normalize-cost", dest="normalize_cost", action="store_true", default=None)

    parser.add_argument("--output-dir", "-o", dest="output_dir")
    parser.add_argument("--threads", type=int, help="스레드 수 상한 (0 = BOT_NUM_THREADS)")


_CONFIG_FIELDS = set(ExperimentConfig.model_fields)


def build_config(args: argparse.Namespace) -> ExperimentConfig:
    """설정 파일 + 명시된 flag 병합"""
    overrides: dict[str, Any] = {
        key: value for key, value in vars(args).items() if key in _CONFIG_FIELDS
    }
    config = load_experiment_config(args.config, overrides)
    logger.debug(f"config resolved | {config.model_dump_json()}")
    return config


def print_rows(header: list[str], rows: list[list]) -> None:
    """결과 표를 stdout 으로 (로그는 stderr)"""
    print("\t".join(header))
    for row in rows:
        print("\t".join(str(v) for v in row))
