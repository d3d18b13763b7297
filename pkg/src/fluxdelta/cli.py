"""Command-line front end.

    fluxdelta spectrum     --preset fig1   --out fig1.csv
    fluxdelta transitions  --config my.yaml --format json
    fluxdelta adiabatic    --preset fig3b
    fluxdelta propagate    --preset fig3-transfer
    fluxdelta phase-sweep  --preset fig3a --threads 4
    fluxdelta presets list

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 output written but some points were masked as level crossings.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .atom import adiabatic_frame, analytic_eigenvalues
from .circuit import ratio_table, sweep_spectrum
from .dynamics import phase_sweep, propagate
from .errors import ConfigurationError, CrossingError, DegenerateLevelsError, NumericalError
from .io import COMMANDS, RunConfig, load_config, load_preset, preset_names, preset_text, render_table
from .transitions import classify_structure, sweep_transitions

log = logging.getLogger("fluxdelta")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_MASKED = 0, 2, 3, 4


def run_spectrum(cfg: RunConfig, workers=None):
    table = sweep_spectrum(cfg.circuit, cfg.flux, cfg.levels, workers=workers)
    columns = ["f"] + [f"eps{i}" for i in range(cfg.levels)] + ["D20", "D21", "D10"]
    rows = []
    for f, levels in zip(table.f, table.levels):
        try:
            ratios = ratio_table(levels)
        except DegenerateLevelsError:
            ratios = (np.nan,) * 3
        rows.append([f, *levels, *ratios])
    return columns, rows, False


def run_transitions(cfg: RunConfig, workers=None):
    tables = sweep_transitions(cfg.circuit, cfg.flux, workers=workers)
    rows = []
    for t in tables:
        try:
            structure = str(classify_structure(t, cfg.threshold))
        except NumericalError:
            structure = "ambiguous"
        rows.append([t.f, t.s01, t.s12, t.s02, structure])
    return ["f", "s01", "s12", "s02", "structure"], rows, False


def run_adiabatic(cfg: RunConfig, workers=None):
    phases = cfg.phases if cfg.phases is not None else [cfg.schedule.total_phase]
    rows = []
    masked_any = False
    for phi in phases:
        s = cfg.schedule.with_total_phase(phi)
        for t in cfg.times:
            try:
                frame = adiabatic_frame(s, t, cfg.dt)
                rows.append([phi, t, *frame.energies, frame.max_coupling, False])
            except CrossingError:
                masked_any = True
                rows.append([phi, t, *analytic_eigenvalues(s, t), np.nan, True])
    return ["phi", "t_over_tau", "E1", "E2", "E3", "maxF", "masked"], rows, masked_any


def run_propagate(cfg: RunConfig, workers=None):
    traj = propagate(
        cfg.schedule,
        cfg.initial,
        (cfg.times[0], cfg.times[-1]),
        cfg.tolerance,
        t_eval=cfg.times,
    )
    columns = ["t_over_tau", "P0", "P1", "P2", "overlap_E1", "overlap_E2", "overlap_E3", "norm"]
    rows = [
        [t, *p, *ov, n]
        for t, p, ov, n in zip(traj.times, traj.populations, traj.frame_overlaps, traj.norms)
    ]
    return columns, rows, bool(traj.masked.any())


def run_phase_sweep(cfg: RunConfig, workers=None):
    surface = phase_sweep(cfg.schedule, cfg.phases, cfg.times, cfg.level, workers=workers)
    rows = []
    for i, phi in enumerate(surface.phis):
        for j, t in enumerate(surface.times):
            rows.append([phi, t, *surface.probabilities[i, j], bool(surface.masked[i, j])])
    return ["phi", "t_over_tau", "P0", "P1", "P2", "masked"], rows, bool(surface.masked.any())


RUNNERS = {
    "spectrum": run_spectrum,
    "transitions": run_transitions,
    "adiabatic": run_adiabatic,
    "propagate": run_propagate,
    "phase-sweep": run_phase_sweep,
}


def render(cfg: RunConfig, fmt: str = "csv", workers=None) -> tuple[str, bool]:
    columns, rows, masked = RUNNERS[cfg.command](cfg, workers)
    meta = {"description": cfg.description} if cfg.description else {}
    return render_table(columns, rows, fmt, command=cfg.command, meta=meta), masked


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fluxdelta", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--config", type=Path, help="YAML run configuration")
        src.add_argument("--preset", help="named preset (see 'presets list')")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", type=Path, help="output file (default: stdout)")
        p.add_argument("--threads", type=int, default=1, help="worker threads for sweeps")
    presets = sub.add_parser("presets")
    psub = presets.add_subparsers(dest="action", required=True)
    psub.add_parser("list")
    show = psub.add_parser("show")
    show.add_argument("name")
    return parser


def _presets(args) -> int:
    if args.action == "list":
        for name in preset_names():
            cfg = load_preset(name)
            print(f"{name:16s} {cfg.command:12s} {cfg.description}")
    else:
        sys.stdout.write(preset_text(args.name))
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        if args.command == "presets":
            return _presets(args)
        if args.threads < 1:
            raise ConfigurationError("must be >= 1", "--threads")
        cfg = (
            load_preset(args.preset, args.command)
            if args.preset
            else load_config(args.config, args.command)
        )
        text, masked = render(cfg, args.format, args.threads)
    except ConfigurationError as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG
    except NumericalError as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERIC

    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    if masked:
        log.warning("some points were masked as level crossings")
        return EXIT_MASKED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
