import logging
import sys

from pydantic import ValidationError

from .api import register_commands
from .cli.service import CliArgumentParser
from .config import LOG_LEVEL
from .config_logging import LogLevels, configure_logging
from .exceptions import CurveEngineError, InputError, UsageError


def build_parser() -> CliArgumentParser:
    parser = CliArgumentParser(
        prog="python -m src.main",
        description="Collateral-aware cross-currency curve construction and swap pricing",
    )
    parser.add_argument(
        "--log-level",
        type=str.upper,
        choices=[level.value for level in LogLevels],
        default=str(LOG_LEVEL).upper(),
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    register_commands(subparsers)
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(e.detail, file=sys.stderr)
        return e.exit_code

    configure_logging(args.log_level)
    try:
        return args.handler(args)
    except CurveEngineError as e:
        logging.error(f"{args.command} failed: {e.detail}")
        print(e.detail, file=sys.stderr)
        return e.exit_code
    except ValidationError as e:
        logging.error(f"{args.command} rejected its settings: {e}")
        print(f"invalid settings: {e.error_count()} validation error(s)", file=sys.stderr)
        return InputError.exit_code
    except Exception:
        logging.error(f"Unexpected failure in {args.command}", exc_info=True)
        raise


if __name__ == "__main__":
    sys.exit(main())
