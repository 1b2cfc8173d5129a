"""Command-line front end.

Subcommands:
  run            execute one run (or every section of a --config file)
  preset NAME    execute a packaged preset file, one CSV per section
  list-problems  registered benchmark systems and their defaults
  list-presets   packaged preset names

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

import argparse
import sys
from importlib.resources import files
from pathlib import Path

from ._version import __version__
from .errors import ConfigError, IntegrationAborted, StepFailureError
from .harness import config_from_mapping, parse_config_text, run
from .problems import list_problems


def _presets_root():
    return files("symkry") / "presets"


def available_presets():
    root = _presets_root()
    return sorted(p.name[:-len(".conf")] for p in root.iterdir()
                  if p.name.endswith(".conf"))


def load_preset(name):
    path = _presets_root() / f"{name}.conf"
    if not path.is_file():
        raise ConfigError(f"unknown preset {name!r}; available: {available_presets()}")
    return parse_config_text(path.read_text(encoding="ascii"))


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="symkry",
        description="Krylov exponential integrators for Hamiltonian systems")
    parser.add_argument("--version", action="version", version=f"symkry {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute one experiment run")
    run_p.add_argument("--config", help="key = value config file (sections = runs)")
    run_p.add_argument("--problem", help="problem name (see list-problems)")
    run_p.add_argument("--method", help="EE, EEMP or IEMP")
    run_p.add_argument("--basis", help="arnoldi, symplectic-arnoldi, "
                                       "isotropic-arnoldi or hamiltonian-lanczos")
    run_p.add_argument("--basis-dim", type=int, help="total columns of the basis")
    run_p.add_argument("--t-final", type=float, help="integration horizon")
    run_p.add_argument("--steps", type=int, help="number of uniform steps")
    run_p.add_argument("--record-every", type=int, help="record metrics every k steps")
    run_p.add_argument("--output", help="CSV output path")
    run_p.add_argument("--seed", type=int, help="seed for breakdown-restart noise")
    run_p.add_argument("--reference", help="reference oracle: dense or fine[:factor]")
    run_p.add_argument("--param", action="append", default=[], metavar="NAME=VALUE",
                       help="problem parameter override (repeatable)")

    preset_p = sub.add_parser("preset", help="run a packaged preset")
    preset_p.add_argument("name", help="preset name (see list-presets)")
    preset_p.add_argument("--output-dir", default=".", help="directory for the CSVs")

    sub.add_parser("list-problems", help="list benchmark systems")
    sub.add_parser("list-presets", help="list packaged presets")
    return parser


def _flag_overrides(args):
    overrides = {}
    for key in ("problem", "method", "basis", "basis_dim", "t_final", "steps",
                "record_every", "output", "seed", "reference"):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    for item in args.param:
        if "=" not in item:
            raise ConfigError(f"--param expects NAME=VALUE, got {item!r}")
        name, value = item.split("=", 1)
        overrides[f"problem.{name.strip()}"] = value.strip()
    return overrides


def _cmd_run(args):
    overrides = _flag_overrides(args)
    if args.config:
        sections = parse_config_text(Path(args.config).read_text(encoding="ascii"))
    else:
        sections = [("run", {})]
    for _, mapping in sections:
        config = config_from_mapping({**mapping, **overrides})
        run(config)
    return 0


def _cmd_preset(args):
    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for section, mapping in load_preset(args.name):
        mapping = dict(mapping)
        mapping.setdefault("output", str(out_dir / f"{args.name}-{section}.csv"))
        config = config_from_mapping(mapping)
        run(config)
    return 0


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "preset":
            return _cmd_preset(args)
        if args.command == "list-problems":
            for name, defaults in list_problems().items():
                pretty = " ".join(f"{k}={v}" for k, v in defaults.items())
                print(f"{name}: {pretty}")
            return 0
        if args.command == "list-presets":
            for name in available_presets():
                print(name)
            return 0
    except ConfigError as exc:
        print(f"symkry: configuration error: {exc}", file=sys.stderr)
        return 2
    except (IntegrationAborted, StepFailureError) as exc:
        print(f"symkry: numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
