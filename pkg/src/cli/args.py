import argparse
import os
from typing import List, Optional

from src import config
from src.cli import SWEEP_PARAMETERS
from src.cli.models import CliArgs

command_description = '''Ridesharing general equilibrium

Joint mode choice, platform matching, stable matching and congested route choice.

PYTHONPATH=. python rideshare.py solve tests/resources/illustrative.ini
PYTHONPATH=. python rideshare.py sweep scenarios/sioux_falls.ini --param nu_d_rd --from 0 --to 1 --steps 11
PYTHONPATH=. python rideshare.py verify out/illustrative
'''


def _env_bool(name: str) -> bool:
    return str(os.environ.get(name)).lower() in ["1", "true", "yes"]


def _common(parser: argparse.ArgumentParser):
    parser.add_argument(
        '--threads',
        type=int,
        default=config.THREADS,
        help='Worker threads for sequence generation and sweep points (default: 1) ENV: RIDESHARE_THREADS'
    )
    parser.add_argument(
        '--deterministic',
        action='store_true',
        default=_env_bool('RIDESHARE_DETERMINISTIC'),
        help='Force one thread so repeated runs give identical reports ENV: RIDESHARE_DETERMINISTIC (1/true/yes)'
    )
    parser.add_argument(
        '--debug',
        action='store_true',
        default=config.DEBUG,
        help='Enable debug logging ENV: RIDESHARE_DEBUG (1/true/yes)'
    )
    parser.add_argument(
        '--output-dir',
        default=None,
        help='Output directory (default: [run] output_dir of the scenario, then RIDESHARE_OUTPUT_DIR)'
    )


def get_args(argv: Optional[List[str]] = None) -> CliArgs:
    parser = argparse.ArgumentParser(description=command_description, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest='command', required=True)

    solve = sub.add_parser('solve', help='Solve a scenario and its no-ridesharing baseline')
    solve.add_argument('scenario', help='Scenario .ini file')
    solve.add_argument(
        '--dump-sequences',
        action='store_true',
        help='Write the matching sequence pool as JSON lines (sequences.jsonl)'
    )
    solve.add_argument('--no-verify', action='store_true', help='Skip the residual check even on small instances')
    _common(solve)

    sweep = sub.add_parser('sweep', help='Solve one scenario per grid point of a parameter')
    sweep.add_argument('scenario', help='Scenario .ini file')
    sweep.add_argument('--param', choices=SWEEP_PARAMETERS, default=None, help='Swept parameter (default: [sweep] parameter)')
    sweep.add_argument('--from', dest='grid_from', type=float, default=None, help='First grid value')
    sweep.add_argument('--to', dest='grid_to', type=float, default=None, help='Last grid value')
    sweep.add_argument('--steps', type=int, default=None, help='Number of grid points')
    _common(sweep)

    verify = sub.add_parser('verify', help='Check a saved solution against the equilibrium conditions')
    verify.add_argument('solution_dir', help='Directory written by solve')
    _common(verify)

    args = parser.parse_args(argv)
    target = args.solution_dir if args.command == 'verify' else args.scenario
    threads = 1 if args.deterministic else max(args.threads, 1)

    return CliArgs(
        command=args.command,
        target=target,
        output_dir=args.output_dir,
        param=getattr(args, 'param', None),
        grid_from=getattr(args, 'grid_from', None),
        grid_to=getattr(args, 'grid_to', None),
        steps=getattr(args, 'steps', None),
        threads=threads,
        deterministic=args.deterministic,
        debug=args.debug,
        dump_sequences=getattr(args, 'dump_sequences', False),
        no_verify=getattr(args, 'no_verify', False),
    )
