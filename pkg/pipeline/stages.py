"""
파이프라인 stage 노드

각 노드는 state 를 받아 갱신할 필드 dict 를 반환한다.
산출물은 output_dir 아래에 원자적으로 기록되고, 같은 설정으로 재실행하면
이미 있는 feature / plan 을 다시 읽어서 이어서 진행한다.
"""
from pathlib import Path
from typing import Callable

from core.config import get_settings
from core.logging import get_logger, update_stage
from exceptions.error_messages import ErrorMessage
from exceptions.exceptions import AppException
from pipeline.state import (
    PipelineState,
    feature_path,
    iter_runs,
    plan_path,
    report_dir,
    rows_and_cols,
    run_name,
)
from providers.idx_reader import DATASETS, load_dataset, load_idx
from providers.matrix_store import (
    read_features,
    read_plan,
    sidecar_path,
    write_features,
    write_json,
    write_plan,
    write_rows_csv,
)
from schemas.cost import CostMatrix
from schemas.dataset import LabeledImageSet
from schemas.experiment import ExperimentConfig
from services.cost_service import pairwise_cost
from services.dataset_service import (
    augment_uniform_rotations,
    normalize,
    split_by_class_halves,
    subsample_per_class,
)
from services.report_service import evaluate_plan, summary_row, write_summary
from services.spectra import embed_dataset
from services.transport_solver import solve

logger = get_logger(__name__)

HALVES = ("a", "b")


# ============================================
# 데이터 준비 helper (CLI 에서도 사용)
# ============================================

def load_source_dataset(config: ExperimentConfig) -> LabeledImageSet:
    """명시 경로가 있으면 그 파일, 아니면 등록된 데이터셋 이름으로 로드"""
    if config.images_path and config.labels_path:
        spec = DATASETS.get(config.dataset)
        return load_idx(
            config.images_path,
            config.labels_path,
            num_classes=spec.num_classes if spec else None,
            label_offset=spec.label_offset if spec else 0,
            source=config.dataset,
        )
    if config.images_path or config.labels_path:
        raise AppException(ErrorMessage.CONFIG_INVALID, "images_path and labels_path must be given together")
    return load_dataset(config.dataset, config.data_dir or get_settings().data_directory)


def prepare_halves(config: ExperimentConfig) -> tuple[LabeledImageSet, LabeledImageSet]:
    """
    load → normalize (전역) → class 절반 분할 → half 별 subsample → half A 회전

    정규화를 회전보다 먼저 해서 회전으로 생긴 바깥 영역이 원본 0 밝기 값으로 채워진다.
    """
    dataset = normalize(load_source_dataset(config))
    split = split_by_class_halves(dataset, config.split_seed)

    half_a, half_b = split.half_a, split.half_b
    if config.per_class > 0:
        half_a = subsample_per_class(half_a, config.per_class, config.split_seed)
        half_b = subsample_per_class(half_b, config.per_class, config.split_seed + 1)

    if not config.baseline:
        half_a = augment_uniform_rotations(half_a, config.rotation_seed)

    logger.info(
        f"halves ready | dataset={config.dataset}, half_a={len(half_a)}, half_b={len(half_b)}, "
        f"baseline={config.baseline}"
    )
    return half_a, half_b


def _artifact_ready(path: Path) -> bool:
    return path.is_file() and sidecar_path(path).is_file()


def check_or_write_config(config: ExperimentConfig, output_dir: Path) -> None:
    """output_dir 의 config.json 과 비교 (없으면 기록)"""
    path = output_dir / "config.json"
    if path.is_file():
        stored = ExperimentConfig.model_validate_json(path.read_text(encoding="utf-8"))
        if stored.fingerprint() != config.fingerprint():
            raise AppException(
                ErrorMessage.CONFIG_MISMATCH,
                f"{path} was written by a different configuration; use a new --output-dir",
            )
        logger.info(f"resuming run | output_dir={output_dir}")
        return

    write_json(path, config.model_copy(update={"output_dir": str(output_dir)}))


# ============================================
# stage nodes
# ============================================

def prepare_data(state: PipelineState) -> dict:
    config = state["config"]
    missing = [
        rep
        for rep in config.representations
        for half in HALVES
        if not _artifact_ready(feature_path(state, rep, half))
    ]
    if not missing:
        logger.info("all feature artifacts present, skipping data preparation")
        return {"half_a": None, "half_b": None}

    half_a, half_b = prepare_halves(config)

    augmentation = half_a.meta.augmentation
    angles = augmentation.angles if augmentation else [0.0] * len(half_a)
    write_rows_csv(
        state["output_dir"] / "data" / "half_a_angles.csv",
        ["row", "label", "angle"],
        [[i, int(label), f"{angle:.10g}"] for i, (label, angle) in enumerate(zip(half_a.labels, angles))],
    )
    return {"half_a": half_a, "half_b": half_b}


def embed_features(state: PipelineState) -> dict:
    config = state["config"]
    features = {}
    for rep in config.representations:
        pair = []
        for half, dataset in zip(HALVES, (state["half_a"], state["half_b"])):
            path = feature_path(state, rep, half)
            if _artifact_ready(path):
                logger.debug(f"reusing features | path={path}")
                pair.append(read_features(path))
                continue

            matrix = embed_dataset(
                dataset,
                R=config.radial_bins,
                K=config.angular_bins,
                representation=rep,
                threads=state["threads"] or None,
            )
            write_features(path, matrix, source=f"{config.dataset}:{half}")
            pair.append(matrix)
        features[rep.value] = tuple(pair)
    return {"features": features}


def solve_transport(state: PipelineState) -> dict:
    config = state["config"]
    plans = {}
    costs: dict[tuple[str, str], CostMatrix] = {}

    for key in iter_runs(config):
        path = plan_path(state, key)
        if _artifact_ready(path):
            logger.debug(f"reusing plan | path={path}")
            plans[run_name(key)], _ = read_plan(path)
            continue

        cost_key = (key["representation"], key["metric"])
        if cost_key not in costs:
            source, target = rows_and_cols(state, key["representation"])
            costs[cost_key] = pairwise_cost(
                source.values,
                target.values,
                key["metric"],
                normalize=config.normalize_cost,
                threads=state["threads"] or None,
                row_source=f"{key['representation']}:source",
                col_source=f"{key['representation']}:target",
            )
        cost = costs[cost_key]

        plan = solve(
            cost,
            config.solver,
            epsilon=key["epsilon"],
            tol=config.tol,
            max_iter=config.max_iter,
        )
        write_plan(path, plan, metric=key["metric"], cost_scale=cost.scale)
        plans[run_name(key)] = plan
    return {"plans": plans}


def evaluate_plans(state: PipelineState) -> dict:
    config = state["config"]
    reports = {}
    for key in iter_runs(config):
        source, target = rows_and_cols(state, key["representation"])
        reports[run_name(key)] = evaluate_plan(
            state["plans"][run_name(key)],
            source.labels,
            target.labels,
            source.num_classes,
            report_dir(state, key),
            dataset=config.dataset,
            metric=key["metric"],
            representation=key["representation"],
            solver=config.solver.value,
            direction=config.direction.value,
            baseline=config.baseline,
        )
    return {"reports": reports}


def summarize(state: PipelineState) -> dict:
    rows = [
        summary_row(
            state["reports"][run_name(key)],
            state["plans"][run_name(key)].diagnostics.iterations,
        )
        for key in iter_runs(state["config"])
    ]
    path = write_summary(state["output_dir"] / "summary.csv", rows)
    logger.info(f"summary written | path={path}, rows={len(rows)}")
    return {}


Stage = Callable[[PipelineState], dict]

EMBED_STAGES: list[tuple[str, Stage]] = [
    ("prepare", prepare_data),
    ("embed", embed_features),
]

PIPELINE_STAGES: list[tuple[str, Stage]] = EMBED_STAGES + [
    ("transport", solve_transport),
    ("evaluate", evaluate_plans),
    ("summary", summarize),
]


def run_stages(state: PipelineState, stages: list[tuple[str, Stage]] = PIPELINE_STAGES) -> PipelineState:
    """stage 를 순서대로 실행, 실패 시 stage 이름을 예외에 태깅"""
    check_or_write_config(state["config"], state["output_dir"])

    for name, node in stages:
        update_stage(name)
        try:
            state.update(node(state))
        except AppException as e:
            e.stage = name
            raise
        except Exception as e:
            logger.error(f"stage failed | stage={name} | {type(e).__name__}: {e}")
            error = AppException(ErrorMessage.INTERNAL_ERROR, f"{type(e).__name__}: {e}")
            error.stage = name
            raise error from e
        state["current_step"] = name

    update_stage("-")
    return state
