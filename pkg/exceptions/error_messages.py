# exceptions/error_messages.py
from enum import Enum


class ErrorMessage(str, Enum):
    """CLI 에러 코드 (로그와 종료 코드 결정에 사용)"""
    # 데이터셋 관련
    DATASET_NOT_FOUND = "dataset_not_found"
    IDX_FORMAT_INVALID = "idx_format_invalid"
    IDX_PAYLOAD_TRUNCATED = "idx_payload_truncated"
    IDX_COUNT_MISMATCH = "idx_count_mismatch"
    EMPTY_DATASET = "empty_dataset"
    EMPTY_CLASS = "empty_class"
    DEGENERATE_DATA = "degenerate_data"
    SUBSAMPLE_TOO_LARGE = "subsample_too_large"
    LABEL_OUT_OF_RANGE = "label_out_of_range"

    # 특징 추출 관련
    POLAR_PARAMETER_INVALID = "polar_parameter_invalid"
    IMAGE_SHAPE_MISMATCH = "image_shape_mismatch"

    # cost / OT 관련
    SHAPE_MISMATCH = "shape_mismatch"
    DEGENERATE_VECTOR = "degenerate_vector"
    NON_FINITE_COST = "non_finite_cost"
    INVALID_MARGINAL = "invalid_marginal"
    INVALID_SOLVER_PARAMETER = "invalid_solver_parameter"
    KERNEL_UNDERFLOW = "kernel_underflow"
    INSTANCE_TOO_LARGE = "instance_too_large"
    SOLVER_NOT_CONVERGED = "solver_not_converged"

    # 평가 관련
    INVALID_DISTANCE_MATRIX = "invalid_distance_matrix"

    # 설정 / 산출물 관련
    CONFIG_INVALID = "config_invalid"
    CONFIG_MISMATCH = "config_mismatch"
    ARTIFACT_NOT_FOUND = "artifact_not_found"
    MATRIX_FORMAT_INVALID = "matrix_format_invalid"
    ARTIFACT_WRITE_FAILED = "artifact_write_failed"

    # 공통
    INTERNAL_ERROR = "internal_error"


# 종료 코드 매핑: 0 성공, 1 입력 오류, 2 solver 미수렴
ERROR_EXIT_CODE: dict[ErrorMessage, int] = {
    # 1 - 입력 / 설정 오류
    ErrorMessage.DATASET_NOT_FOUND: 1,
    ErrorMessage.IDX_FORMAT_INVALID: 1,
    ErrorMessage.IDX_PAYLOAD_TRUNCATED: 1,
    ErrorMessage.IDX_COUNT_MISMATCH: 1,
    ErrorMessage.EMPTY_DATASET: 1,
    ErrorMessage.EMPTY_CLASS: 1,
    ErrorMessage.DEGENERATE_DATA: 1,
    ErrorMessage.SUBSAMPLE_TOO_LARGE: 1,
    ErrorMessage.LABEL_OUT_OF_RANGE: 1,
    ErrorMessage.POLAR_PARAMETER_INVALID: 1,
    ErrorMessage.IMAGE_SHAPE_MISMATCH: 1,
    ErrorMessage.SHAPE_MISMATCH: 1,
    ErrorMessage.DEGENERATE_VECTOR: 1,
    ErrorMessage.NON_FINITE_COST: 1,
    ErrorMessage.INVALID_MARGINAL: 1,
    ErrorMessage.INVALID_SOLVER_PARAMETER: 1,
    ErrorMessage.KERNEL_UNDERFLOW: 1,
    ErrorMessage.INSTANCE_TOO_LARGE: 1,
    ErrorMessage.INVALID_DISTANCE_MATRIX: 1,
    ErrorMessage.CONFIG_INVALID: 1,
    ErrorMessage.CONFIG_MISMATCH: 1,
    ErrorMessage.ARTIFACT_NOT_FOUND: 1,
    ErrorMessage.MATRIX_FORMAT_INVALID: 1,
    ErrorMessage.ARTIFACT_WRITE_FAILED: 1,
    ErrorMessage.INTERNAL_ERROR: 1,

    # 2 - solver 미수렴 (산출물은 기록됨)
    ErrorMessage.SOLVER_NOT_CONVERGED: 2,
}
