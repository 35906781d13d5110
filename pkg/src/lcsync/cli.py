"""Command-line scenario runner.

    lcsync run <scenario> [--config FILE] [--seed N] [--out DIR] [--strict]
                          [--set key=value ...]
    lcsync sweep <sweep-id> [same options] [--workers N]
    lcsync list

Exit code 0 on success; failures print a machine-readable JSON object to
stderr and exit nonzero.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .scenarios import SCENARIOS, SWEEPS, ScenarioError, load_config, run_scenario, run_sweep


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", type=Path, default=None,
                     help="INI file whose [scenario] section overrides the preset")
    sub.add_argument("--seed", type=int, default=None, help="master RNG seed")
    sub.add_argument("--out", type=Path, default=Path("out"), help="output root directory")
    sub.add_argument("--strict", action="store_true",
                     help="escalate truncation warnings to errors")
    sub.add_argument("--set", dest="overrides", action="append", default=[],
                     metavar="KEY=VALUE", help="override one preset parameter")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lcsync",
                                     description="limit-cycle synchronization scenarios")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario")
    p_run.add_argument("scenario", help="scenario id (see 'lcsync list')")
    _add_common(p_run)

    p_sweep = sub.add_parser("sweep", help="run a (delta, V) sweep")
    p_sweep.add_argument("scenario", help="sweep id (see 'lcsync list')")
    p_sweep.add_argument("--workers", type=int, default=1,
                         help="concurrent sweep points")
    _add_common(p_sweep)

    sub.add_parser("list", help="print scenario ids and their figure mapping")
    return parser


def _parse_overrides(pairs: list[str]) -> dict:
    out = {}
    for pair in pairs:
        if "=" not in pair:
            raise ScenarioError(f"--set expects KEY=VALUE, got {pair!r}")
        key, value = pair.split("=", 1)
        out[key.strip()] = value
    return out


def _fail(kind: str, message: str, **extra) -> int:
    payload = {"error": kind, "message": message, **extra}
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)
    return 2


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "list":
        print(f"{'id':<16} {'figures':<12} description")
        for name, (_fn, desc, figs) in {**SCENARIOS, **SWEEPS}.items():
            print(f"{name:<16} {figs:<12} {desc}")
        return 0

    try:
        cfg = load_config(
            args.scenario,
            config_file=args.config,
            overrides=_parse_overrides(args.overrides),
            seed=args.seed,
            out_dir=args.out,
            strict=args.strict,
        )
        if args.command == "run":
            if args.scenario not in SCENARIOS:
                raise ScenarioError(
                    f"{args.scenario!r} is not a runnable scenario; "
                    f"valid ids: {sorted(SCENARIOS)}"
                )
            manifest = run_scenario(cfg)
        else:
            manifest = run_sweep(cfg, workers=args.workers)
    except ScenarioError as exc:
        return _fail("invalid-scenario", str(exc),
                     valid_ids=sorted(SCENARIOS) + sorted(SWEEPS))
    except (ValueError, RuntimeError, Warning) as exc:
        # Warnings arrive as exceptions in --strict mode.
        return _fail(type(exc).__name__, str(exc))
    print(manifest)
    return 0


if __name__ == "__main__":
    sys.exit(main())
