import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from ..config.settings import settings
from ..models.run_config import RunConfig
from ..utils.exceptions import InputFormatError, LiftZonoidError
from ..utils.logging_config import configure_logging
from ..utils.response_formatter import tabulate, to_csv, to_json
from .commands import EXIT_INPUT_ERROR, constants, example1, order, puncture_sweep, verify

logger = logging.getLogger(__name__)

COMMANDS = {
    "constants": constants.run,
    "order": order.run,
    "verify": verify.run,
    "puncture-sweep": puncture_sweep.run,
    "example1": example1.run,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="liftzonoid",
        description="Lift-zonoid order tests, log-Sobolev weights and inequality verification",
    )
    parser.add_argument("command_arg", nargs="?", metavar="command", choices=sorted(COMMANDS))
    parser.add_argument("--command", dest="command_opt", choices=sorted(COMMANDS))
    parser.add_argument("--input", help="density (.json or x,p .csv) or discrete-measure CSV")
    parser.add_argument("--measure", help="built-in measure used when --input is absent")
    parser.add_argument("--xmin", dest="x_min")
    parser.add_argument("--xmax", dest="x_max")
    parser.add_argument("--n")
    parser.add_argument("--c")
    parser.add_argument("--alpha")
    parser.add_argument("--weight", help="identity, kbar or khat")
    parser.add_argument("--seed")
    parser.add_argument("--trials")
    parser.add_argument("--R", help="comma-separated list of puncture radii")
    parser.add_argument("--radius", help="radius outside which the example1 drift sandwich is checked")
    parser.add_argument("--a")
    parser.add_argument("--b")
    parser.add_argument("--amplitude")
    parser.add_argument("--out")
    parser.add_argument("--format")
    parser.add_argument("--log-level", default=None)
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    fields = {
        "command": args.command_opt or args.command_arg,
        "input": args.input,
        "measure": args.measure,
        "x_min": args.x_min,
        "x_max": args.x_max,
        "n": args.n,
        "c": args.c,
        "alpha": args.alpha,
        "weight": args.weight,
        "seed": args.seed,
        "trials": args.trials,
        "radius": args.radius,
        "a": args.a,
        "b": args.b,
        "amplitude": args.amplitude,
        "out": args.out,
        "format": args.format,
    }
    if args.R is not None:
        fields["R"] = [item.strip() for item in args.R.split(",") if item.strip()]
    return RunConfig(**{k: v for k, v in fields.items() if v is not None})


def _describe_validation(error: ValidationError) -> str:
    first = error.errors()[0]
    field = ".".join(str(part) for part in first["loc"]) or "config"
    return f"invalid value for '{field}': {first['msg']}"


def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level or settings.log_level, settings.log_file)

    try:
        config = _config_from_args(args)
        payload, status = COMMANDS[config.command](config)
    except ValidationError as e:
        message = _describe_validation(e)
        logger.error(message)
        print(f"error: {message}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except InputFormatError as e:
        logger.error("input error in field '%s': %s", e.field, e)
        print(f"error: field '{e.field}': {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except LiftZonoidError as e:
        logger.error("%s: %s", type(e).__name__, e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    if config.format == "csv":
        columns, rows = tabulate(config.command, payload)
        text = to_csv(columns, rows)
    else:
        text = to_json(payload)
    _emit(text, config.out)
    logger.info("%s finished with exit status %d", config.command, status)
    return status


if __name__ == "__main__":
    sys.exit(main())
