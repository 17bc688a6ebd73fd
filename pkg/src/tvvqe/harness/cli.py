"""Command-line entry point: ``tvvqe run | validate-gradients | exact-spectrum | list-data``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from ..hamiltonians import list_data, load_molecular
from ..solvers import METHODS
from . import config as config_mod
from . import experiments
from .config import SYSTEMS, ConfigError

log = logging.getLogger("tvvqe")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="INI experiment config (defaults are used for absent keys)")
    p.add_argument("--out", type=Path, help="output directory (overrides [experiment] out)")
    p.add_argument("--seed", type=int, help="random seed (overrides [experiment] seed)")
    p.add_argument("--system", choices=SYSTEMS, help="system to load (resets system-specific defaults)")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tvvqe", description="Tangent-vector VQE experiments on an exact statevector simulator.")
    sub = parser.add_subparsers(dest="verb", required=True)

    run = sub.add_parser("run", help="run the experiment described by the config")
    _common(run)
    run.add_argument("--method", help=f"comma-separated subset of {', '.join(METHODS)}")
    run.add_argument("--jobs", type=int, help="worker processes for bond-scan grid points")
    run.add_argument("--experiment", choices=config_mod.KINDS, help="experiment kind when no config is given")

    grad = sub.add_parser("validate-gradients", help="analytic vs finite-difference gradients at random parameters")
    _common(grad)

    spec = sub.add_parser("exact-spectrum", help="exact eigenvalues of the configured Hamiltonian")
    _common(spec)
    spec.add_argument("--sector", action="store_true", help="restrict to the configured particle number and S_z")

    data = sub.add_parser("list-data", help="list the shipped Hamiltonian files")
    data.add_argument("--data-dir", type=Path, help="directory to list instead of the packaged data")
    data.add_argument("-v", "--verbose", action="store_true")
    return parser


def _load(args, kind: str | None = None) -> config_mod.ExperimentConfig:
    if args.config is not None:
        cfg = config_mod.load(args.config)
    else:
        cfg = config_mod.defaults(args.system or "h2", kind or "convergence")
    return config_mod.with_overrides(
        cfg,
        out=args.out,
        seed=args.seed,
        system=args.system,
        method=getattr(args, "method", None),
        jobs=getattr(args, "jobs", None),
    )


def _cmd_run(args) -> int:
    cfg = _load(args, args.experiment)
    result = experiments.run(cfg)
    for f in result.files:
        print(f)
    return 0


def _cmd_gradients(args) -> int:
    cfg = _load(args)
    rep = experiments.validate_gradients(cfg)
    for m, w in enumerate(rep.max_by_component):
        print(f"component {m:3d}  max |analytic - FDM| = {w:.3e}  {'pass' if w < rep.tolerance else 'FAIL'}")
    print(f"{rep.system}: {'pass' if rep.passed else 'FAIL'}")
    for f in rep.files:
        print(f)
    return 0 if rep.passed else 1


def _cmd_spectrum(args) -> int:
    cfg = _load(args)
    path = experiments.write_exact_spectrum(cfg, sector=args.sector)
    for row in experiments.exact_spectrum(cfg, sector=args.sector):
        print(f"{row['index']:4d}  {row['energy']: .12f}  N={row['electrons']:g}  Sz={row['sz']:g}")
    print(path)
    return 0


def _cmd_list(args) -> int:
    for path in list_data(args.data_dir):
        system = load_molecular(path)
        print(f"{path.name:28s} {system.label:6s} r={system.bond_length:<5g} electrons={system.electron_count} qubits={system.qubit_count}")
    return 0


COMMANDS = {
    "run": _cmd_run,
    "validate-gradients": _cmd_gradients,
    "exact-spectrum": _cmd_spectrum,
    "list-data": _cmd_list,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return COMMANDS[args.verb](args)
    except (ConfigError, experiments.ExperimentError, OSError, ValueError) as exc:
        print(f"tvvqe: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
