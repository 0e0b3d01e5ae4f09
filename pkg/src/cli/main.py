import logging
import traceback
from typing import List, Optional

from src.cli import EXIT_OK, EXIT_USAGE, ScenarioConfigError, logger
from src.cli.args import get_args
from src.cli.models import CliArgs, SweepSpec
from src.cli.report import format_summary
from src.cli.runner import run_scenario, sweep, verify_directory
from src.cli.scenario import load_scenario
from src.netio import NetworkParseError, NetworkValidationError
from src.share.logger import set_debug


def _sweep_spec(args: CliArgs, configured: Optional[SweepSpec]) -> SweepSpec:
    base = configured.dict() if configured is not None else {}
    values = {
        "parameter": args.param or base.get("parameter"),
        "start": args.grid_from if args.grid_from is not None else base.get("start"),
        "stop": args.grid_to if args.grid_to is not None else base.get("stop"),
        "steps": args.steps if args.steps is not None else base.get("steps", 1),
    }
    if values["stop"] is None:
        values["stop"] = values["start"]
    if values["parameter"] is None or values["start"] is None:
        raise ScenarioConfigError("sweep needs --param and --from, or a [sweep] section")
    return SweepSpec(**values)


def run(args: CliArgs) -> int:
    if args.command == "verify":
        _, code = verify_directory(args.target)
        return code

    cfg = load_scenario(args.target)
    cfg = cfg.copy(update={"threads": args.threads, "deterministic": args.deterministic or cfg.deterministic})
    if args.command == "solve":
        report, code = run_scenario(cfg, args.output_dir, dump=args.dump_sequences, verify=not args.no_verify)
        print(format_summary(report))
        return code

    spec = _sweep_spec(args, cfg.sweep)
    points = sweep(cfg, spec.parameter, spec.grid(), cfg.effective_threads, args.output_dir)
    for value, report in points:
        status = report.error or ("converged" if report.converged else "not converged")
        print(f"{spec.parameter}={value:g}: DA {100 * report.shares.get('DA', 0):.2f}% "
              f"RD {100 * report.shares.get('RD', 0):.2f}% RP {100 * report.shares.get('RP', 0):.2f}% "
              f"PT {100 * report.shares.get('PT', 0):.2f}% ({status})")
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    args = get_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.debug else logging.INFO,
        format='[%(asctime)s] [%(threadName)s] %(levelname)s %(message)s'
    )
    set_debug(args.debug)
    try:
        return run(args)
    except (ScenarioConfigError, NetworkParseError, NetworkValidationError, FileNotFoundError, OSError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_USAGE
    except Exception:
        logger.error(f"[main] Unhandled exception:\n{traceback.format_exc()}")
        return EXIT_USAGE


if __name__ == '__main__':
    raise SystemExit(main())
