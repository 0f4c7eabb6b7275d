# schemas/dataset.py
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from schemas.common import ArrayModel, frozen_array


class AugmentationRecord(BaseModel):
    """회전 augmentation 기록"""
    model_config = ConfigDict(frozen=True)

    seed: int | None = Field(None, description="PRNG seed (고정 각도면 None)")
    mode: Literal["uniform-random", "fixed"] = Field(..., description="각도 생성 방식")
    angles: list[float] = Field(default_factory=list, description="이미지별 회전 각도 (deg)")


class DatasetMeta(BaseModel):
    """데이터셋 출처 / 정규화 / augmentation 메타데이터"""
    model_config = ConfigDict(frozen=True)

    source: str = Field(..., description="데이터 출처 이름")
    normalized: bool = False
    mean: float | None = Field(None, description="정규화에 사용한 전역 평균")
    std: float | None = Field(None, description="정규화에 사용한 전역 표준편차")
    augmentation: AugmentationRecord | None = None

    @property
    def background_value(self) -> float:
        """원본 밝기 0 이 현재 스케일에서 갖는 값 (회전/극좌표 바깥 영역 채움값)"""
        if self.normalized and self.mean is not None and self.std:
            return (0.0 - self.mean) / self.std
        return 0.0


class LabeledImageSet(ArrayModel):
    """라벨이 붙은 흑백 이미지 집합 (생성 후 불변)"""
    images: np.ndarray = Field(..., description="(n, M, N) float64")
    labels: np.ndarray = Field(..., description="(n,) int64, [0, num_classes)")
    num_classes: int = Field(..., gt=0)
    meta: DatasetMeta

    @field_validator("images", mode="before")
    @classmethod
    def _as_image_stack(cls, value) -> np.ndarray:
        arr = frozen_array(value, np.float64)
        if arr.ndim != 3:
            raise ValueError(f"images must be (n, M, N), got shape {arr.shape}")
        return arr

    @field_validator("labels", mode="before")
    @classmethod
    def _as_label_vector(cls, value) -> np.ndarray:
        arr = frozen_array(value, np.int64)
        if arr.ndim != 1:
            raise ValueError(f"labels must be 1-D, got shape {arr.shape}")
        return arr

    @model_validator(mode="after")
    def _check_invariants(self) -> "LabeledImageSet":
        if self.images.shape[0] != self.labels.shape[0]:
            raise ValueError(
                f"images/labels length mismatch: {self.images.shape[0]} != {self.labels.shape[0]}"
            )
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() >= self.num_classes):
            raise ValueError(f"labels must lie in [0, {self.num_classes})")
        return self

    def __len__(self) -> int:
        return int(self.images.shape[0])

    @property
    def image_shape(self) -> tuple[int, int]:
        return int(self.images.shape[1]), int(self.images.shape[2])

    def class_counts(self) -> np.ndarray:
        """클래스별 이미지 수"""
        return np.bincount(self.labels, minlength=self.num_classes)

    def take(self, indices: np.ndarray) -> "LabeledImageSet":
        """인덱스 부분집합 (메타데이터 유지, augmentation 각도도 함께 선택)"""
        indices = np.asarray(indices, dtype=np.int64)
        meta = self.meta
        if meta.augmentation is not None and meta.augmentation.angles:
            angles = [meta.augmentation.angles[i] for i in indices]
            meta = meta.model_copy(
                update={"augmentation": meta.augmentation.model_copy(update={"angles": angles})}
            )
        return LabeledImageSet(
            images=self.images[indices],
            labels=self.labels[indices],
            num_classes=self.num_classes,
            meta=meta,
        )

    def replace_images(self, images: np.ndarray, meta: DatasetMeta) -> "LabeledImageSet":
        """같은 라벨로 이미지/메타만 교체한 새 집합"""
        return LabeledImageSet(
            images=images,
            labels=self.labels,
            num_classes=self.num_classes,
            meta=meta,
        )


class SplitPair(ArrayModel):
    """클래스별 절반 분할 결과"""
    half_a: LabeledImageSet
    half_b: LabeledImageSet
    seed: int = Field(..., ge=0)
    indices_a: np.ndarray = Field(..., description="원본 기준 half_a 인덱스 (오름차순)")
    indices_b: np.ndarray = Field(..., description="원본 기준 half_b 인덱스 (오름차순)")
