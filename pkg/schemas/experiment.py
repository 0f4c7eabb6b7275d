# schemas/experiment.py
import json

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from enum import Enum
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from exceptions.error_messages import ErrorMessage
from exceptions.exceptions import AppException
from schemas.cost import Metric
from schemas.spectra import Representation
from schemas.transport import Solver


class Direction(str, Enum):
    """OT 방향: 행(source) 이 어느 쪽인지"""
    ROTATED_TO_UNROTATED = "rotated-to-unrotated"
    UNROTATED_TO_ROTATED = "unrotated-to-rotated"


class ExperimentConfig(BaseModel):
    """실험 설정 - output 디렉토리에 config.json 으로 그대로 저장되어 재실행 가능"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    # 데이터셋
    dataset: str = Field("mnist", description="등록된 데이터셋 이름")
    data_dir: str | None = Field(None, description="IDX 파일 디렉토리 (없으면 BOT_DATA_DIR)")
    images_path: str | None = None
    labels_path: str | None = None

    # seed
    split_seed: int = Field(0, ge=0)
    rotation_seed: int = Field(1, ge=0)
    figure_seed: int = Field(8, ge=0, description="MDS / 거리 통계용 샘플링 seed")

    # 샘플링
    per_class: int = Field(200, ge=0, description="half 당 클래스별 샘플 수 (0 = 전체)")
    figure_per_class: int = Field(1, ge=1, description="MDS / 거리 통계용 클래스별 이미지 수")

    # 극좌표 / bispectrum
    radial_bins: int | None = Field(None, ge=1, description="None 이면 floor(min(M,N)/2)")
    angular_bins: int = Field(16, ge=2)

    # 표현 / metric
    representations: list[Representation] = Field(
        default_factory=lambda: [Representation.RAW, Representation.BISPECTRAL]
    )
    metrics: list[Metric] = Field(default_factory=lambda: [Metric.L1])

    # solver
    solver: Solver = Solver.SINKHORN
    epsilon: float = Field(0.01, gt=0)
    epsilon_sweep: list[float] = Field(default_factory=list)
    tol: float = Field(1e-6, gt=0)
    max_iter: int = Field(10_000, ge=1)
    normalize_cost: bool = False

    # 실험 구성
    baseline: bool = Field(False, description="두 half 모두 회전 없이 사용")
    direction: Direction = Direction.ROTATED_TO_UNROTATED

    output_dir: str = "runs/default"
    threads: int = Field(0, ge=0, description="0 이면 BOT_NUM_THREADS 설정 사용")

    @field_validator("epsilon_sweep")
    @classmethod
    def _positive_sweep(cls, value: list[float]) -> list[float]:
        if any(eps <= 0 for eps in value):
            raise ValueError("epsilon sweep values must be positive")
        return value

    @field_validator("representations", "metrics")
    @classmethod
    def _non_empty(cls, value: list) -> list:
        if not value:
            raise ValueError("at least one entry required")
        # 순서 유지 중복 제거
        return list(dict.fromkeys(value))

    @property
    def epsilons(self) -> list[float]:
        return self.epsilon_sweep or [self.epsilon]

    def fingerprint(self) -> str:
        """재개(resume) 시 비교용 직렬화 문자열 (output_dir, threads 제외)"""
        payload = self.model_dump(mode="json", exclude={"output_dir", "threads"})
        return json.dumps(payload, sort_keys=True)


def _read_config_file(path: Path) -> dict[str, Any]:
    """TOML 또는 JSON 설정 파일 읽기 - [section] 중첩은 평탄화"""
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise AppException(ErrorMessage.ARTIFACT_NOT_FOUND, f"config file {path}") from e

    try:
        raw = json.loads(text) if path.suffix == ".json" else tomllib.loads(text)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as e:
        raise AppException(ErrorMessage.CONFIG_INVALID, f"{path}: {e}") from e

    flat: dict[str, Any] = {}
    for key, value in raw.items():
        if isinstance(value, dict):
            flat.update(value)
        else:
            flat[key] = value
    return flat


def load_experiment_config(
    config_path: str | Path | None = None,
    overrides: dict[str, Any] | None = None,
) -> ExperimentConfig:
    """설정 파일 + CLI override 병합 (override 우선, None 값은 무시)"""
    values: dict[str, Any] = {}
    if config_path is not None:
        values.update(_read_config_file(Path(config_path)))
    if overrides:
        values.update({k: v for k, v in overrides.items() if v is not None})

    try:
        return ExperimentConfig(**values)
    except ValidationError as e:
        raise AppException(ErrorMessage.CONFIG_INVALID, str(e)) from e
