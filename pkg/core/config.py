# core/config.py
import os
from functools import lru_cache
from typing import Literal

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    ENVIRONMENT: Literal["prod", "dev", "local"] = "local"

    # 로그 설정
    LOG_DIR: str | None = None

    @property
    def log_directory(self) -> str:
        if self.LOG_DIR and self.LOG_DIR.strip():
            return self.LOG_DIR
        # 환경별 기본값
        log_dirs = {
            "local": "./logs",
            "dev": "/var/log/bispectral-ot",
            "prod": "/var/log/bispectral-ot",
        }
        return log_dirs.get(self.ENVIRONMENT, "./logs")

    # 데이터셋 기본 디렉토리 (IDX 파일 위치, --data-dir 로 덮어쓰기 가능)
    BOT_DATA_DIR: str | None = None

    # 0 이면 os.cpu_count() 사용
    BOT_NUM_THREADS: int = 0

    # cost matrix 블록 계산 시 블록당 메모리 상한 (MB)
    BOT_COST_MEMORY_MB: int = 256

    @property
    def num_threads(self) -> int:
        if self.BOT_NUM_THREADS > 0:
            return self.BOT_NUM_THREADS
        return os.cpu_count() or 1

    @property
    def data_directory(self) -> str:
        if self.BOT_DATA_DIR and self.BOT_DATA_DIR.strip():
            return self.BOT_DATA_DIR
        return "./data"

    model_config = {
        "env_file": ".env",
        "extra": "ignore",  # 정의되지 않은 환경변수 무시
    }


@lru_cache
def get_settings() -> Settings:
    """환경변수 / .env 에서 설정 로드"""
    return Settings()
