# providers/matrix_store.py
"""
행렬 산출물 입출력

flat binary 포맷 (little-endian):
  u32 n | u32 dim | u32 R | u32 K | u8 dtype (1=float32, 2=float64) | payload row-major

모든 쓰기는 같은 디렉토리의 임시 파일에 쓴 뒤 rename 한다 (중단 시 반쯤 쓰인 파일 없음).
"""
import csv
import io
import os
import struct
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from pydantic import BaseModel, ValidationError

from core.logging import get_logger
from exceptions.error_messages import ErrorMessage
from exceptions.exceptions import AppException
from schemas.spectra import FeatureMatrix, FeatureSidecar
from schemas.transport import PlanSidecar, TransportPlan

logger = get_logger(__name__)

_HEADER = struct.Struct("<IIIIB")
_DTYPE_CODES: dict[int, np.dtype] = {
    1: np.dtype("<f4"),
    2: np.dtype("<f8"),
}


@dataclass(frozen=True)
class MatrixHeader:
    n: int
    dim: int
    R: int = 0
    K: int = 0
    dtype_code: int = 1

    @property
    def dtype(self) -> np.dtype:
        return _DTYPE_CODES[self.dtype_code]


# ============================================
# atomic write
# ============================================

def atomic_write_bytes(path: str | Path, data: bytes) -> Path:
    """임시 파일에 쓰고 os.replace 로 교체"""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "wb") as f:
                f.write(data)
            os.replace(tmp_name, path)
        except BaseException:
            Path(tmp_name).unlink(missing_ok=True)
            raise
    except OSError as e:
        raise AppException(ErrorMessage.ARTIFACT_WRITE_FAILED, f"{path}: {e}") from e
    return path


def atomic_write_text(path: str | Path, text: str) -> Path:
    return atomic_write_bytes(path, text.encode("utf-8"))


def sidecar_path(path: str | Path) -> Path:
    """<name>.bin -> <name>.json"""
    return Path(path).with_suffix(".json")


# ============================================
# flat binary
# ============================================

def write_matrix(
    path: str | Path,
    values: np.ndarray,
    R: int = 0,
    K: int = 0,
    dtype: type = np.float32,
) -> Path:
    """2-D 행렬을 flat binary 로 기록"""
    arr = np.asarray(values)
    if arr.ndim != 2:
        raise AppException(ErrorMessage.SHAPE_MISMATCH, f"expected 2-D matrix, got shape {arr.shape}")

    code = 2 if np.dtype(dtype) == np.float64 else 1
    payload = np.ascontiguousarray(arr, dtype=_DTYPE_CODES[code])
    header = _HEADER.pack(arr.shape[0], arr.shape[1], R, K, code)

    logger.debug(f"matrix write | path={path}, shape={arr.shape[0]}x{arr.shape[1]}, dtype={payload.dtype}")
    return atomic_write_bytes(path, header + payload.tobytes())


def read_matrix(path: str | Path) -> tuple[np.ndarray, MatrixHeader]:
    """flat binary 행렬 읽기"""
    path = Path(path)
    if not path.is_file():
        raise AppException(ErrorMessage.ARTIFACT_NOT_FOUND, str(path))

    buffer = path.read_bytes()
    if len(buffer) < _HEADER.size:
        raise AppException(ErrorMessage.MATRIX_FORMAT_INVALID, f"{path}: header truncated")

    n, dim, R, K, code = _HEADER.unpack_from(buffer)
    if code not in _DTYPE_CODES:
        raise AppException(ErrorMessage.MATRIX_FORMAT_INVALID, f"{path}: unknown dtype code {code}")

    header = MatrixHeader(n=n, dim=dim, R=R, K=K, dtype_code=code)
    expected = n * dim * header.dtype.itemsize
    if len(buffer) - _HEADER.size != expected:
        raise AppException(
            ErrorMessage.MATRIX_FORMAT_INVALID,
            f"{path}: payload {len(buffer) - _HEADER.size} bytes, header promises {expected}",
        )

    values = np.frombuffer(buffer, dtype=header.dtype, offset=_HEADER.size).reshape(n, dim)
    return values.astype(header.dtype.newbyteorder("="), copy=True), header


# ============================================
# JSON sidecar
# ============================================

def write_json(path: str | Path, model: BaseModel) -> Path:
    return atomic_write_text(path, model.model_dump_json(indent=2) + "\n")


def read_json(path: str | Path, model_type: type[BaseModel]) -> BaseModel:
    path = Path(path)
    if not path.is_file():
        raise AppException(ErrorMessage.ARTIFACT_NOT_FOUND, str(path))
    try:
        return model_type.model_validate_json(path.read_text(encoding="utf-8"))
    except ValidationError as e:
        raise AppException(ErrorMessage.MATRIX_FORMAT_INVALID, f"{path}: {e}") from e


# ============================================
# features / plan
# ============================================

def write_features(path: str | Path, features: FeatureMatrix, source: str | None = None) -> Path:
    """특징 행렬 (float32) + 라벨 sidecar 기록"""
    write_matrix(path, features.values, R=features.R, K=features.K, dtype=np.float32)
    write_json(
        sidecar_path(path),
        FeatureSidecar(
            representation=features.representation,
            num_classes=features.num_classes,
            labels=features.labels.tolist(),
            source=source,
        ),
    )
    return Path(path)


def read_features(path: str | Path) -> FeatureMatrix:
    values, header = read_matrix(path)
    sidecar: FeatureSidecar = read_json(sidecar_path(path), FeatureSidecar)
    if len(sidecar.labels) != header.n:
        raise AppException(
            ErrorMessage.MATRIX_FORMAT_INVALID,
            f"{path}: {header.n} rows but {len(sidecar.labels)} labels",
        )
    return FeatureMatrix(
        values=values,
        labels=np.asarray(sidecar.labels, dtype=np.int64),
        num_classes=sidecar.num_classes,
        representation=sidecar.representation,
        R=header.R,
        K=header.K,
    )


def write_plan(
    path: str | Path,
    plan: TransportPlan,
    metric: str | None = None,
    cost_scale: float = 1.0,
) -> Path:
    """plan (float64) + p, q, ε, 진단값 sidecar 기록"""
    write_matrix(path, plan.gamma, dtype=np.float64)
    write_json(
        sidecar_path(path),
        PlanSidecar(
            p=plan.p.tolist(),
            q=plan.q.tolist(),
            epsilon=plan.epsilon,
            diagnostics=plan.diagnostics,
            metric=metric,
            cost_scale=cost_scale,
        ),
    )
    return Path(path)


def read_plan(path: str | Path) -> tuple[TransportPlan, PlanSidecar]:
    gamma, header = read_matrix(path)
    sidecar: PlanSidecar = read_json(sidecar_path(path), PlanSidecar)
    if len(sidecar.p) != header.n or len(sidecar.q) != header.dim:
        raise AppException(
            ErrorMessage.MATRIX_FORMAT_INVALID,
            f"{path}: plan {header.n}x{header.dim} vs marginals {len(sidecar.p)}/{len(sidecar.q)}",
        )
    plan = TransportPlan(
        gamma=gamma,
        p=sidecar.p,
        q=sidecar.q,
        epsilon=sidecar.epsilon,
        diagnostics=sidecar.diagnostics,
    )
    return plan, sidecar


# ============================================
# CSV / PGM
# ============================================

def write_matrix_csv(
    path: str | Path,
    values: np.ndarray,
    header: Sequence[str] | None = None,
    fmt: str = "%.10g",
) -> Path:
    """작은 행렬 CSV 출력"""
    buffer = io.StringIO()
    np.savetxt(
        buffer,
        np.atleast_2d(np.asarray(values, dtype=np.float64)),
        fmt=fmt,
        delimiter=",",
        header=",".join(header) if header else "",
        comments="",
    )
    return atomic_write_text(path, buffer.getvalue())


def write_rows_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    """이종 컬럼 표 (요약, 클래스별 정확도 등) CSV 출력"""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return atomic_write_text(path, buffer.getvalue())


def write_pgm(path: str | Path, values: np.ndarray) -> Path:
    """min-max 정규화 8bit 흑백 heatmap (P5, maxval 255)"""
    arr = np.atleast_2d(np.asarray(values, dtype=np.float64))
    lo, hi = float(np.min(arr)), float(np.max(arr))
    if hi > lo:
        scaled = np.rint((arr - lo) / (hi - lo) * 255.0)
    else:
        scaled = np.zeros_like(arr)

    rows, cols = arr.shape
    header = f"P5\n{cols} {rows}\n255\n".encode("ascii")
    return atomic_write_bytes(path, header + scaled.astype(np.uint8).tobytes())
