"""
Command-line interface for icbargain.

Exit codes: 0 success, 2 invalid input, 3 equilibrium refused because the
bargaining problem is not regular (solution=spe).
"""

import argparse
import sys
from pathlib import Path

from icbargain import __version__

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NON_REGULAR = 3

COMMANDS = ("region", "bargain", "simulate", "sweep", "compare")


def _common_parser() -> argparse.ArgumentParser:
    """Flags shared by every command."""
    common = argparse.ArgumentParser(add_help=False)

    scenario = common.add_argument_group("scenario")
    scenario.add_argument("-s", "--scenario", type=Path, metavar="PATH",
                          help="Scenario file (TOML); flags override its values")
    scenario.add_argument("--a", type=float, help="Power gain of link 2 -> 1 (linear)")
    scenario.add_argument("--b", type=float, help="Power gain of link 1 -> 2 (linear)")
    scenario.add_argument("--snr1-db", type=float, metavar="DB", help="SNR of user 1 in dB")
    scenario.add_argument("--snr2-db", type=float, metavar="DB", help="SNR of user 2 in dB")
    scenario.add_argument("--scheme", choices=["hk", "tdm", "mac"], help="Cooperative scheme")
    scenario.add_argument("--p1", type=float, help="Breakdown probability after user 1's offer is rejected")
    scenario.add_argument("--p2", type=float, help="Breakdown probability after user 2's offer is rejected")
    scenario.add_argument("--first-mover", choices=["u1", "u2"], help="Who proposes in round 1")
    scenario.add_argument("--solution", choices=["spe", "nbs", "both"], help="Solution(s) to compute")

    output = common.add_argument_group("output")
    output.add_argument("-o", "--out", type=Path, metavar="DIR", help="Output directory (default: out)")
    output.add_argument("--svg", action=argparse.BooleanOptionalAction, default=None,
                        help="Write SVG figures (default: on)")
    output.add_argument("-c", "--config", type=Path, metavar="PATH",
                        help="Path to user config (default: ~/.config/icbargain/config.toml)")
    output.add_argument("-v", "--verbose", action="count", default=0,
                        help="Increase verbosity (can be repeated)")
    output.add_argument("--log-file", type=Path, metavar="PATH",
                        help="Also write a full debug log to PATH")
    return common


def parse_args(args: list[str] | None = None) -> argparse.Namespace:
    """Parse command-line arguments."""
    parser = argparse.ArgumentParser(
        prog="icbargain",
        description="Bargaining solutions for two-user Gaussian interference channels",
    )
    parser.add_argument(
        "-V", "--version",
        action="version",
        version=f"%(prog)s {__version__}",
    )

    common = _common_parser()
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    commands.add_parser("region", parents=[common],
                        help="Rate region, disagreement point and IR frontier")
    commands.add_parser("bargain", parents=[common],
                        help="Two-phase negotiation: incentive check, NBS and equilibrium")

    simulate = commands.add_parser("simulate", parents=[common],
                                   help="Play the bargaining game and verify the equilibrium")
    simulate.add_argument("--trials", type=int, help="Monte Carlo trials")
    simulate.add_argument("--seed", type=int, help="Master seed")
    simulate.add_argument("--grid-size", type=int, help="Deviation grid points per axis")
    simulate.add_argument("--max-rounds", type=int, help="Round cap of one play")

    sweep = commands.add_parser("sweep", parents=[common],
                                help="Equilibrium pair over a grid of p1 values")
    sweep.add_argument("--p1-from", type=float, metavar="P", help="First p1 of the grid")
    sweep.add_argument("--p1-to", type=float, metavar="P", help="Last p1 of the grid")
    sweep.add_argument("--p1-step", type=float, metavar="STEP", help="Grid step")
    sweep.add_argument("--joint", action=argparse.BooleanOptionalAction, default=None,
                       help="Use p2 = p1 on every row")

    commands.add_parser("compare", parents=[common],
                        help="Compare the H-K and TDM bargaining outcomes")

    return parser.parse_args(args)


def _apply_overrides(scenario, parsed: argparse.Namespace) -> None:
    """Copy flags that were given onto the scenario."""
    for key in ("a", "b", "snr1_db", "snr2_db", "scheme", "p1", "p2", "first_mover", "solution"):
        value = getattr(parsed, key, None)
        if value is not None:
            setattr(scenario, key, value)

    for flag, key in (("trials", "trials"), ("seed", "seed"),
                      ("grid_size", "grid_size"), ("max_rounds", "max_rounds")):
        value = getattr(parsed, flag, None)
        if value is not None:
            setattr(scenario.sim, key, value)

    for flag, key in (("p1_from", "start"), ("p1_to", "stop"), ("p1_step", "step"), ("joint", "joint")):
        value = getattr(parsed, flag, None)
        if value is not None:
            setattr(scenario.sweep, key, value)


def main(args: list[str] | None = None) -> int:
    """Main entry point for icbargain."""
    try:
        parsed = parse_args(args)
    except SystemExit as e:
        # argparse exits 0 for --help/--version and 2 for usage errors
        return e.code if isinstance(e.code, int) else EXIT_INVALID

    # Import here to allow CLI to load fast
    from icbargain.commands import run_command
    from icbargain.config import load_config, load_scenario, new_scenario
    from icbargain.errors import BargainError, DomainError, PreconditionError, ScenarioError
    from icbargain.log import setup_logging

    # Setup logging based on verbosity
    setup_logging(parsed.verbose, parsed.log_file)

    try:
        config = load_config(parsed.config)
        if parsed.scenario:
            scenario = load_scenario(parsed.scenario, config)
        else:
            scenario = new_scenario(config)
        _apply_overrides(scenario, parsed)
        scenario.validate()
    except (ScenarioError, DomainError, PreconditionError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_INVALID

    out_dir = parsed.out or config.output.dir
    svg = config.output.svg if parsed.svg is None else parsed.svg

    try:
        return run_command(parsed.command, scenario, out_dir, svg)
    except (ScenarioError, DomainError, PreconditionError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except BargainError as e:
        print(f"Error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
