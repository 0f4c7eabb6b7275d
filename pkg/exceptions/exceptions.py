# exceptions/exceptions.py
from exceptions.error_messages import ErrorMessage, ERROR_EXIT_CODE


class AppException(Exception):
    def __init__(self, error: ErrorMessage, detail: str | None = None):
        super().__init__(error.value)
        self.error = error
        self.message = error.value
        self.exit_code = ERROR_EXIT_CODE[error]
        self.detail = detail
        # 파이프라인 단계에서 발생한 경우 runner 가 채움
        self.stage: str | None = None

    def __str__(self) -> str:
        text = f"{self.exit_code}: {self.message}"
        if self.detail:
            text += f" ({self.detail})"
        return text
