"""Command-line front end: ``pulsegate <command> [scenario] [options]``.

Exit status: 0 success, 2 configuration error, 3 numerical error,
4 acceptance failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import scenarios
from .errors import ConfigError, PulseGateError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_ACCEPT = 0, 2, 3, 4

_SINGLE = {"design": "design", "jsa": "jsa", "schmidt": "schmidt", "efficiency": "efficiency_sweep",
           "modematch": "modematch", "rigorous": "rigorous"}


def _scenario(ref: str | None, default: str) -> scenarios.Scenario:
    ref = ref or default
    if ref in scenarios.PRESETS:
        return scenarios.preset(ref)
    if Path(ref).exists():
        return scenarios.load_scenario(ref)
    shipped = scenarios.SHIPPED / f"{ref}.yaml"
    if shipped.exists():
        return scenarios.load_scenario(shipped)
    raise ConfigError(f"no scenario file, shipped scenario or preset named {ref!r}")


def _apply_flags(sc: scenarios.Scenario, args) -> scenarios.Scenario:
    if args.grid:
        if args.grid < 8:
            raise ConfigError("--grid must be at least 8")
        sc.grid["count"] = args.grid
        if "rigorous" in sc.options:
            sc.options["rigorous"]["count"] = args.grid
    if args.form:
        sc.grid["form"] = args.form
    return sc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--grid", type=int, help="samples per frequency axis")
    common.add_argument("--form", choices=("sinc", "gauss"), help="phasematching function")
    common.add_argument("--out", help="output directory (default: the scenario's output_dir)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized property checks")

    p = argparse.ArgumentParser(prog="pulsegate", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, analysis in _SINGLE.items():
        s = sub.add_parser(name, parents=[common], help=f"run the '{analysis}' analysis")
        s.add_argument("scenario", nargs="?", help="scenario file, shipped scenario or preset name")
    s = sub.add_parser("run", parents=[common], help="run every analysis listed in a scenario")
    s.add_argument("scenario")
    s = sub.add_parser("preset", parents=[common], help="run a figure preset")
    s.add_argument("name", choices=scenarios.PRESETS)
    s.add_argument("--write", metavar="FILE", help="save the preset scenario instead of running it")
    s = sub.add_parser("accept", parents=[common], help="run the acceptance checks")
    s.add_argument("--criteria", help="comma-separated criterion numbers (default: all)")
    return p


def _execute(args) -> int:
    if args.command == "accept":
        from . import acceptance
        sel = [int(x) for x in args.criteria.split(",")] if args.criteria else None
        results = acceptance.run_all(sel, seed=args.seed)
        return EXIT_OK if all(r.passed for r in results) else EXIT_ACCEPT
    if args.command == "preset":
        sc = scenarios.preset(args.name)
        if args.write:
            scenarios.save_scenario(sc, args.write)
            print(args.write)
            return EXIT_OK
    elif args.command == "run":
        sc = _scenario(args.scenario, "qpg_design")
    else:
        default = "timeorder_appendix" if args.command == "rigorous" else "qpg_design"
        sc = _scenario(args.scenario, default)
        sc.analysis = [_SINGLE[args.command]]
        if args.command == "modematch" and "modematch" not in sc.options:
            sc.options["modematch"] = {"duration_ratio": 2.0}
    sc = _apply_flags(sc, args)
    manifest = scenarios.run(sc, args.out)
    out = Path(args.out or sc.output_dir)
    for entry in manifest["files"]:
        print(out / entry["file"])
    print(out / "manifest.json")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _execute(args)
    except scenarios.AnalysisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG if isinstance(exc.cause, ConfigError) else EXIT_NUMERIC
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PulseGateError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
