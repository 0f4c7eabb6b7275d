import sys

from cli import diststats, embed, evaluate, mds, pipeline, transport
from cli.common import CliArgumentParser
from core.config import get_settings
from core.logging import RunContext, generate_run_id, get_logger, set_run_context, setup_logging
from exceptions.exceptions import AppException
from exceptions.handlers import app_exception_handler, global_exception_handler

logger = get_logger(__name__)

COMMANDS = (embed, transport, evaluate, pipeline, mds, diststats)


def build_parser() -> CliArgumentParser:
    parser = CliArgumentParser(
        prog="bispectral-ot",
        description="회전 불변 bispectrum 임베딩과 엔트로피 정규화 OT 실험 도구",
    )
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="<command>")
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def main(argv: list[str] | None = None) -> int:
    """종료 코드: 0 성공, 1 입력 오류, 2 solver 미수렴"""
    settings = get_settings()
    setup_logging(environment=settings.ENVIRONMENT, log_dir=settings.log_directory)

    args = build_parser().parse_args(argv)
    set_run_context(RunContext(run_id=generate_run_id(), command=args.command))
    logger.debug(f"command start | argv={argv if argv is not None else sys.argv[1:]}")

    try:
        return args.handler(args)
    except AppException as e:
        return app_exception_handler(e)
    except Exception as e:
        return global_exception_handler(e)
    finally:
        set_run_context(RunContext())


if __name__ == "__main__":
    sys.exit(main())
