# core/logging.py
import logging
import sys
import time
import uuid
from contextvars import ContextVar
from dataclasses import dataclass, replace
from functools import wraps
from logging.handlers import TimedRotatingFileHandler
from pathlib import Path
from typing import Any, Callable

from colorama import Fore, Style, just_fix_windows_console

# ============================================
# Context Variables (실행 추적용)
# ============================================

@dataclass(frozen=True)
class RunContext:
    """실행 컨텍스트 정보"""
    run_id: str = "-"
    command: str = "-"
    stage: str = "-"

# Context Variable
run_context_var: ContextVar[RunContext] = ContextVar(
    "run_context",
    default=RunContext()
)

# ============================================
# Logging Filter & Formatter
# ============================================

class RunContextFilter(logging.Filter):
    """로그 레코드에 실행 컨텍스트 추가"""
    def filter(self, record: logging.LogRecord) -> bool:
        ctx = run_context_var.get()
        record.run_id = ctx.run_id
        record.command = ctx.command
        record.stage = ctx.stage
        return True


_LEVEL_COLORS = {
    "DEBUG": Fore.CYAN,
    "INFO": Fore.GREEN,
    "WARNING": Fore.YELLOW,
    "ERROR": Fore.RED,
    "CRITICAL": Fore.MAGENTA,
}


class StandardLogFormatter(logging.Formatter):
    """
    표준화된 로그 포맷터

    출력 형식:
    [2026-02-03 12:41:27.123] [INFO] [services.spectra] [a1b2c3d4] pipeline/embed | message
    """

    def __init__(self, colorize: bool = False):
        super().__init__()
        self.colorize = colorize

    def format(self, record: logging.LogRecord) -> str:
        # 밀리세컨드 포함 timestamp
        timestamp = time.strftime("%Y-%m-%d %H:%M:%S", time.localtime(record.created))
        timestamp += f".{int(record.msecs):03d}"

        level = record.levelname
        if self.colorize:
            level = f"{_LEVEL_COLORS.get(level, '')}{level}{Style.RESET_ALL}"

        base = f"[{timestamp}] [{level}] [{record.name}] [{getattr(record, 'run_id', '-')}]"

        # command / stage 정보가 있으면 추가
        command = getattr(record, "command", "-")
        stage = getattr(record, "stage", "-")
        has_scope = command != "-"
        if has_scope:
            base += f" {command}" if stage == "-" else f" {command}/{stage}"

        if record.getMessage():
            base += f" | {record.getMessage()}" if has_scope else f" {record.getMessage()}"

        if record.exc_info:
            base += "\n" + self.formatException(record.exc_info)

        return base


def setup_logging(environment: str = "local", log_dir: str = "logs") -> None:
    """환경별 로깅 설정"""
    log_level = logging.DEBUG if environment == "local" else logging.INFO

    just_fix_windows_console()
    plain_formatter = StandardLogFormatter()
    console_formatter = StandardLogFormatter(colorize=sys.stderr.isatty())

    # 루트 로거 설정
    root_logger = logging.getLogger()
    root_logger.setLevel(log_level)

    # 기존 핸들러 제거 (중복 방지)
    root_logger.handlers.clear()

    # 콘솔 핸들러 (stdout 은 CLI 결과 출력용으로 비워둠)
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(console_formatter)
    console_handler.setLevel(log_level)
    console_handler.addFilter(RunContextFilter())
    root_logger.addHandler(console_handler)

    # prod/dev: 파일 핸들러 추가
    if environment in ("prod", "dev"):
        log_path = Path(log_dir)
        log_path.mkdir(parents=True, exist_ok=True)

        # app.log (INFO 이상)
        app_handler = TimedRotatingFileHandler(
            log_path / "app.log",
            when="midnight",
            backupCount=30,
            encoding="utf-8"
        )
        app_handler.setFormatter(plain_formatter)
        app_handler.setLevel(logging.INFO)
        app_handler.addFilter(RunContextFilter())
        root_logger.addHandler(app_handler)

        # error.log (ERROR 이상)
        error_handler = TimedRotatingFileHandler(
            log_path / "error.log",
            when="midnight",
            backupCount=30,
            encoding="utf-8"
        )
        error_handler.setFormatter(plain_formatter)
        error_handler.setLevel(logging.ERROR)
        error_handler.addFilter(RunContextFilter())
        root_logger.addHandler(error_handler)

    # 메트릭 로거 (별도) - solver 진단값, 정확도 기록용
    _setup_metrics_logger(environment, log_dir, plain_formatter, console_formatter)

    logging.debug(f"logging configured | env={environment}, level={logging.getLevelName(log_level)}")

def _setup_metrics_logger(
    environment: str,
    log_dir: str,
    formatter: logging.Formatter,
    console_formatter: logging.Formatter,
) -> None:
    """메트릭 로거 설정"""
    metrics_logger = logging.getLogger("metrics")
    metrics_logger.setLevel(logging.INFO)
    metrics_logger.propagate = False
    metrics_logger.handlers.clear()

    metrics_console = logging.StreamHandler(sys.stderr)
    metrics_console.setFormatter(console_formatter)
    metrics_console.addFilter(RunContextFilter())
    metrics_logger.addHandler(metrics_console)

    if environment in ("prod", "dev"):
        log_path = Path(log_dir)
        metrics_handler = TimedRotatingFileHandler(
            log_path / "metrics.log",
            when="midnight",
            backupCount=30,
            encoding="utf-8"
        )
        metrics_handler.setFormatter(formatter)
        metrics_handler.addFilter(RunContextFilter())
        metrics_logger.addHandler(metrics_handler)

# helper function

def get_logger(name: str) -> logging.Logger:
    """로거 인스턴스 반환"""
    return logging.getLogger(name)


def get_metrics_logger() -> logging.Logger:
    """메트릭 로거 반환"""
    return logging.getLogger("metrics")


def generate_run_id() -> str:
    """새 run_id 생성 (8자리)"""
    return uuid.uuid4().hex[:8]


def set_run_context(ctx: RunContext) -> None:
    """현재 컨텍스트 설정"""
    run_context_var.set(ctx)


def get_run_context() -> RunContext:
    """현재 컨텍스트 반환"""
    return run_context_var.get()


def update_stage(stage: str) -> None:
    """컨텍스트의 stage 갱신 (파이프라인 단계 진입 시 호출)"""
    run_context_var.set(replace(run_context_var.get(), stage=stage))


def log_execution_time(logger: logging.Logger):
    """함수 실행 시간 로깅 데코레이터"""
    def decorator(func: Callable) -> Callable:
        @wraps(func)
        def wrapper(*args, **kwargs) -> Any:
            start = time.perf_counter()
            try:
                result = func(*args, **kwargs)
                elapsed_ms = (time.perf_counter() - start) * 1000
                logger.debug(f"{func.__name__} done | duration={elapsed_ms:.2f}ms")
                return result
            except Exception as e:
                elapsed_ms = (time.perf_counter() - start) * 1000
                logger.error(f"{func.__name__} failed | duration={elapsed_ms:.2f}ms | {type(e).__name__}: {e}")
                raise
        return wrapper
    return decorator
