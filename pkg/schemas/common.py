# schemas/common.py
import numpy as np
from pydantic import BaseModel, ConfigDict


class ArrayModel(BaseModel):
    """numpy 배열 필드를 갖는 불변 모델 공통 설정"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)


def frozen_array(values, dtype) -> np.ndarray:
    """복사 후 쓰기 금지 플래그를 건 배열 반환"""
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr
