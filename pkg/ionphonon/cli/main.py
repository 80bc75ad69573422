"""Command-line entry point: ``run`` a configured sweep or ``compare`` the solvers."""

import argparse
import logging
import sys
from typing import List, Optional

from ..core.config import init_config
from ..core.errors import InvalidInputError
from .compare import compare_solvers
from .run import run

EXIT_OK = 0
EXIT_CONFIG_ERROR = 1
EXIT_SOLVER_ERROR = 2


def _configure_logging(level: str, verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else getattr(logging, level, logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def run_command(args: argparse.Namespace) -> int:
    """Validate the config and, unless asked only to validate, run the sweep."""
    try:
        config = init_config(args.config)
        _configure_logging(config.get_log_level(), args.verbose)
        if args.out:
            config.set("output.directory", args.out)
        if args.workers:
            config.set("run.workers", args.workers)
        config.validate()
    except InvalidInputError as e:
        print(f"❌ Invalid configuration: {e}")
        return EXIT_CONFIG_ERROR

    print(f"📋 Config: {args.config}")
    print(f"   Ions: {config.get_n_ions()} | Phonons: {config.get_n_phonons()} | n_max: {config.get_n_max()}")
    print(f"   Solver: {config.get('solver.mode')} | Sweep points: {len(config.get_sweep_values())}")
    if args.validate_only:
        print("✅ Configuration is valid")
        return EXIT_OK

    print("🚀 Starting ground-state sweep...")
    try:
        outcome = run(config)
    except InvalidInputError as e:
        print(f"❌ Invalid input: {e}")
        return EXIT_CONFIG_ERROR
    except Exception as e:
        print(f"❌ Error during sweep: {e}")
        return EXIT_SOLVER_ERROR

    print("\n" + "=" * 60)
    print("📊 SWEEP SUMMARY")
    print("=" * 60)
    for row in outcome.rows:
        flags = "" if row["converged"] else " ⚠️ not converged"
        if row["near_degenerate"]:
            flags += " ⚠️ degenerate"
        alpha = f"{row['alpha']:.3f}" if row.get("alpha") is not None else "  -  "
        xi = f"{row['xi']:.3f}" if row.get("xi") is not None else "  -  "
        print(f"{row['parameter']}={row['value']:<8g} | E0: {row['energy']:14.8f} | "
              f"alpha: {alpha} | xi: {xi}{flags}")
    print("=" * 60)

    for name, fit in outcome.sweep_fits.items():
        if "error" in fit:
            print(f"⚪ {name}: {fit['error']}")
        else:
            parameters = ", ".join(f"{k}={v:.4g} ± {fit['errors'].get(k, 0.0):.2g}"
                                   for k, v in fit["parameters"].items())
            print(f"📈 {name}: {parameters}")

    if outcome.warnings:
        print(f"\n⚠️  {len(outcome.warnings)} point(s) recorded warnings (see summary.csv)")
    print(f"✅ Reports written to {outcome.directory}")
    return EXIT_OK


def compare_command(args: argparse.Namespace) -> int:
    """Run both solvers and print the discrepancy table."""
    try:
        config = init_config(args.config)
        _configure_logging(config.get_log_level(), args.verbose)
        print("🔬 Comparing DMRG against exact diagonalization...")
        table = compare_solvers(config, args.out)
    except InvalidInputError as e:
        print(f"❌ Cannot compare: {e}")
        return EXIT_CONFIG_ERROR
    except Exception as e:
        print(f"❌ Error during comparison: {e}")
        return EXIT_SOLVER_ERROR

    print("\n" + "=" * 60)
    print(f"{'value':>8} | {'dim':>6} | {'|dE|':>9} | {'density':>9} | {'C^nn':>9} | {'C^aa':>9}")
    print("-" * 60)
    for row in table.rows:
        cells = [row[c] if row[c] is not None else float("nan") for c in ("energy", "density", "cnn", "caa")]
        print(f"{row['value']:8g} | {row['dimension']:6d} | " + " | ".join(f"{c:9.2e}" for c in cells))
    print("=" * 60)
    print(f"✅ Table written to {table.path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="ionphonon - phonon Bose-Hubbard ground states of ion chains")
    subparsers = parser.add_subparsers(dest="command", required=True)

    run_parser = subparsers.add_parser("run", help="Run the sweep described by a config file")
    run_parser.add_argument("config", type=str, help="Path to the JSON run configuration")
    run_parser.add_argument("--out", type=str, help="Output directory (overrides output.directory)")
    run_parser.add_argument("--workers", type=int, help="Sweep points solved concurrently")
    run_parser.add_argument("--validate-only", action="store_true", help="Check the config and exit")
    run_parser.add_argument("--verbose", action="store_true", help="Log at DEBUG level")
    run_parser.set_defaults(handler=run_command)

    compare_parser = subparsers.add_parser("compare", help="Compare DMRG with exact diagonalization (N <= 6)")
    compare_parser.add_argument("config", type=str, help="Path to the JSON run configuration")
    compare_parser.add_argument("--out", type=str, help="Output directory (overrides output.directory)")
    compare_parser.add_argument("--verbose", action="store_true", help="Log at DEBUG level")
    compare_parser.set_defaults(handler=compare_command)
    return parser


def main(argv: Optional[List[str]] = None) -> None:
    """Main CLI entry point."""
    args = build_parser().parse_args(argv)
    sys.exit(args.handler(args))


if __name__ == "__main__":
    main()
