# exceptions/handlers.py
from exceptions.exceptions import AppException
from core.logging import get_logger

logger = get_logger(__name__)


def app_exception_handler(exc: AppException) -> int:
    """예상된 에러 - 로그 남기고 종료 코드 반환"""
    stage = f" | stage={exc.stage}" if exc.stage else ""
    detail = f" | {exc.detail}" if exc.detail else ""

    # 에러 레벨 결정
    if exc.exit_code == 1:
        logger.warning(f"input error | code={exc.message}{stage}{detail}")
    else:
        logger.error(f"run failed | exit={exc.exit_code} | code={exc.message}{stage}{detail}")

    return exc.exit_code


def global_exception_handler(exc: Exception) -> int:
    """예상치 못한 에러 - traceback 포함 기록"""
    logger.exception(f"unhandled exception | {type(exc).__name__}: {exc}")
    return 1
