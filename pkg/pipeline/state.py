"""
실험 파이프라인 State 정의

흐름: prepare_data → embed_features → solve_transport → evaluate_plans → write_summary

- 필수 필드: 시작 시 CLI 에서 주입
- 나머지 필드: 각 stage 가 실행되면서 채움
"""
from pathlib import Path
from typing import TypedDict

from schemas.dataset import LabeledImageSet
from schemas.evaluation import AccuracyReport
from schemas.experiment import Direction, ExperimentConfig
from schemas.spectra import FeatureMatrix, Representation
from schemas.transport import TransportPlan


class RunKey(TypedDict):
    """solve / evaluate 단위 (표현 x metric x ε)"""
    representation: str
    metric: str
    epsilon: float


class PipelineState(TypedDict):
    # input
    config: ExperimentConfig
    output_dir: Path
    threads: int

    # prepare_data 출력 (재개 시 feature 가 모두 있으면 None)
    half_a: LabeledImageSet | None
    half_b: LabeledImageSet | None

    # embed_features 출력: representation -> (half A, half B)
    features: dict[str, tuple[FeatureMatrix, FeatureMatrix]]

    # solve_transport 출력: run 이름 -> plan
    plans: dict[str, TransportPlan]

    # evaluate_plans 출력
    reports: dict[str, AccuracyReport]

    # 현재 처리 단계 (디버깅용)
    current_step: str


def create_initial_state(
    config: ExperimentConfig,
    output_dir: str | Path | None = None,
    threads: int = 0,
) -> PipelineState:
    """ExperimentConfig 로부터 초기 State 생성"""
    return PipelineState(
        # Input
        config=config,
        output_dir=Path(output_dir or config.output_dir),
        threads=threads or config.threads,

        # Processing Results
        half_a=None,
        half_b=None,
        features={},
        plans={},
        reports={},

        # Control Flow
        current_step="initialized",
    )


def run_name(key: RunKey) -> str:
    """산출물 파일명: bispectral_L1_eps0.01"""
    return f"{key['representation']}_{key['metric']}_eps{key['epsilon']:g}"


def iter_runs(config: ExperimentConfig) -> list[RunKey]:
    """표현 x metric x ε 조합 (설정 순서 유지)"""
    return [
        RunKey(representation=rep.value, metric=metric.value, epsilon=eps)
        for rep in config.representations
        for metric in config.metrics
        for eps in config.epsilons
    ]


def feature_path(state: PipelineState, representation: Representation | str, half: str) -> Path:
    rep = Representation(representation).value
    return state["output_dir"] / "features" / f"{rep}_{half}.bin"


def plan_path(state: PipelineState, key: RunKey) -> Path:
    return state["output_dir"] / "plans" / f"{run_name(key)}.bin"


def report_dir(state: PipelineState, key: RunKey) -> Path:
    return state["output_dir"] / "reports" / run_name(key)


def rows_and_cols(state: PipelineState, representation: str) -> tuple[FeatureMatrix, FeatureMatrix]:
    """방향에 따라 (source, target) 특징 행렬 선택"""
    features_a, features_b = state["features"][representation]
    if state["config"].direction == Direction.ROTATED_TO_UNROTATED:
        return features_a, features_b
    return features_b, features_a


def all_converged(state: PipelineState) -> bool:
    return all(plan.diagnostics.converged for plan in state["plans"].values())
