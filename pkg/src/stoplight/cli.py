"""Command-line front end.

Subcommands: ``ground-state``, ``store-revive``, ``sweep-b``, ``evolve``,
``validate-config``.  All plotting is external: the commands emit CSV
tables and binary snapshots only.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 non-convergence.  ``STOPLIGHT_LOG`` sets the log level.
"""

import argparse
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, parse_config
from .eit import calibrate_attenuation
from .gpe import ConvergenceError, NumericsError, ground_state, width_at_fraction
from .grids import norm
from .protocol import argmax_decay_field, fit_exponential_decay, run_protocol, sweep_bias_field
from .scattering import coupling_coefficients, scattering_at_field
from .snapshots import (
    config_hash,
    read_snapshot,
    write_convergence_csv,
    write_fidelity_csv,
    write_observables_csv,
    write_profile_csv,
    write_snapshot,
    write_sweep_csv,
)
from .units import parse_quantity

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICS = 3
EXIT_NO_CONVERGENCE = 4

log = logging.getLogger("stoplight")


def _setup_logging():
    level = os.environ.get("STOPLIGHT_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _add_common(parser):
    parser.add_argument("--config", type=Path, default=None,
                        help="configuration file (defaults are built in)")
    parser.add_argument("--out", type=Path, default=None,
                        help="output directory (default from config)")
    parser.add_argument("--jobs", type=int, default=1,
                        help="parallel workers for sweeps")
    parser.add_argument("--snapshot-every", default=None, metavar="DUR",
                        help='snapshot cadence, e.g. "50 ms"')


def build_parser():
    parser = argparse.ArgumentParser(
        prog="stoplight",
        description="slow-light storage simulator for a two-component condensate",
    )
    parser.add_argument("--version", action="version", version=f"stoplight {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate-config", help="parse and check a configuration")
    _add_common(p)

    p = sub.add_parser("ground-state", help="relax and store the condensate ground state")
    _add_common(p)

    p = sub.add_parser("store-revive", help="run the storage protocol over storage times")
    _add_common(p)
    p.add_argument("--storage", default="10 us,50 ms,100 ms,200 ms,500 ms,800 ms,1.1 s,1.5 s",
                   help="comma-separated storage times with units")

    p = sub.add_parser("sweep-b", help="decay-time sweep over the bias field")
    _add_common(p)
    p.add_argument("--b-range", default="131.5:133.5:9",
                   help="sweep as MIN:MAX:POINTS in gauss")
    p.add_argument("--storage", default="300 ms", help="storage duration per point")
    p.add_argument("--skip-before", default="0 s",
                   help="ignore samples before this time in the fits")

    p = sub.add_parser("evolve", help="raw propagation run with the configured schedules")
    _add_common(p)
    p.add_argument("--duration", default=None, help='override storage duration, e.g. "100 ms"')

    return parser


def _outdir(args, cfg):
    out = args.out if args.out is not None else Path(cfg["output", "directory"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _snapshot_times(args, cfg, duration):
    raw = args.snapshot_every
    if raw is not None:
        every = parse_quantity(raw, expect=("s", "ms", "us", "µs"))
    else:
        every = cfg["output", "snapshot_every"]
    if every is None:
        return ()
    count = int(math.floor(duration / every + 1e-9))
    return tuple(round(i * every, 12) for i in range(1, count + 1))


def _prepare_ground_state(cfg, out, digest):
    """Load the stored ground state or relax it now."""
    snap_path = out / "ground_state.snap"
    grid = cfg.grid()
    if snap_path.exists():
        _, psi1, _ = read_snapshot(snap_path)
        if psi1.grid == grid:
            log.info("reusing ground state from %s", snap_path)
            return psi1
        log.warning("stored ground state has a different grid; recomputing")
    psi1 = _relax_ground_state(cfg, out, digest)
    return psi1


def _relax_ground_state(cfg, out, digest):
    grid = cfg.grid()
    scat = scattering_at_field(cfg.scattering_model(), cfg["timeline", "bias_field"])
    couplings = coupling_coefficients(scat, reduction_factor=cfg.reduction_factor())
    log_rows = []
    psi1 = ground_state(
        grid, cfg.trap(), couplings, cfg.atom_number(),
        tolerance=cfg["output", "ground_state_tolerance"],
        convergence_log=log_rows,
    )
    write_snapshot(out / "ground_state.snap", 0.0, psi1,
                   type(psi1)(grid, grid.zeros()))
    write_convergence_csv(out / "ground_state_convergence.csv", log_rows, digest)
    return psi1


def _readout(cfg, psi1):
    from .protocol import central_column

    column = central_column(psi1, cfg.reduction_factor())
    alpha_read = calibrate_attenuation(
        column, cfg["pulses", "readout_transmission_full_column"]
    )
    return cfg.readout_model(alpha_read)


def cmd_validate_config(args):
    cfg = parse_config(args.config)
    digest = config_hash(cfg.canonical_text)
    grid = cfg.grid()
    print(f"config ok (hash {digest})")
    print(f"grid: {grid.dims}D {grid.points} over {tuple(e*1e6 for e in grid.extents)} um")
    print(f"atoms: {cfg.atom_number():g}; bias {cfg['timeline','bias_field']} G; "
          f"gradient {cfg['timeline','gradient']} G/m")
    return EXIT_OK


def cmd_ground_state(args):
    cfg = parse_config(args.config)
    digest = config_hash(cfg.canonical_text)
    out = _outdir(args, cfg)
    psi1 = _relax_ground_state(cfg, out, digest)
    diameter = width_at_fraction(psi1, 0.01)
    print(f"ground state: N = {norm(psi1):.6g}, z width at 1% density = "
          f"{diameter*1e6:.2f} um -> {out/'ground_state.snap'}")
    return EXIT_OK


def _revive_worker(item):
    storage, timeline, psi1, params = item
    observables, revival, _ = run_protocol(
        replace(timeline, storage_duration=storage,
                bias_schedule=((0.0, timeline.bias_schedule[0][1]),),
                gradient_schedule=((0.0, timeline.gradient_schedule[0][1]),),
                snapshot_times=()),
        psi1, params,
    )
    return storage, observables, revival


def cmd_store_revive(args):
    cfg = parse_config(args.config)
    digest = config_hash(cfg.canonical_text)
    out = _outdir(args, cfg)
    storages = sorted(
        parse_quantity(s.strip(), expect=("s", "ms", "us", "µs"))
        for s in args.storage.split(",")
    )
    psi1 = _prepare_ground_state(cfg, out, digest)
    params = cfg.protocol_params()
    readout = _readout(cfg, psi1)
    base = cfg.timeline(readout)
    work = [(s, base, psi1, params) for s in storages]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_revive_worker, work))
    else:
        results = [_revive_worker(item) for item in work]
    results.sort(key=lambda row: row[0])

    rows = []
    for index, (storage, observables, revival) in enumerate(results):
        rows.append((storage, revival.fidelity, revival.n2_at_read))
        write_observables_csv(out / f"observables_{index:02d}.csv", observables, digest)
        write_profile_csv(out / f"revival_profile_{index:02d}.csv", revival, digest)
        snap_times = _snapshot_times(args, cfg, storage)
        if snap_times:
            timeline = cfg.timeline(readout, storage=storage, snapshot_times=snap_times)
            _, _, snaps = run_protocol(timeline, psi1, params)
            for t, f1, f2 in snaps:
                write_snapshot(out / f"run{index:02d}_t{t:.6f}s.snap", t, f1, f2)
    write_fidelity_csv(out / "fidelity.csv", rows, digest)
    print(f"{len(rows)} storage runs -> {out/'fidelity.csv'}")
    for storage, fidelity, _ in rows:
        print(f"  storage {storage:g} s: fidelity {fidelity:.6g}")
    return EXIT_OK


def cmd_sweep_b(args):
    cfg = parse_config(args.config)
    digest = config_hash(cfg.canonical_text)
    out = _outdir(args, cfg)
    try:
        lo, hi, points = args.b_range.split(":")
        lo, hi, points = float(lo), float(hi), int(points)
    except ValueError:
        raise ConfigError(f"cannot parse --b-range {args.b_range!r} (MIN:MAX:POINTS)")
    if points < 2:
        raise ConfigError("--b-range needs at least 2 points")
    window = cfg.scattering_model().window_gauss
    if lo < window[0] or hi > window[1]:
        raise ConfigError(
            f"--b-range [{lo}, {hi}] G outside the scattering window {window}"
        )
    storage = parse_quantity(args.storage, expect=("s", "ms", "us", "µs"))
    skip = parse_quantity(args.skip_before, expect=("s", "ms", "us", "µs"))
    psi1 = _prepare_ground_state(cfg, out, digest)
    params = cfg.protocol_params()
    readout = _readout(cfg, psi1)
    timeline = cfg.timeline(readout, storage=storage)
    rows = sweep_bias_field(
        np.linspace(lo, hi, points), timeline, psi1, params,
        skip_before=skip, jobs=args.jobs,
    )
    write_sweep_csv(out / "sweep.csv", rows, digest)
    best = argmax_decay_field(rows)
    print(f"{points} fields -> {out/'sweep.csv'}")
    print(f"argmax tau at B = {best:g} G")
    return EXIT_OK


def cmd_evolve(args):
    cfg = parse_config(args.config)
    digest = config_hash(cfg.canonical_text)
    out = _outdir(args, cfg)
    duration = (parse_quantity(args.duration, expect=("s", "ms", "us", "µs"))
                if args.duration else cfg["timeline", "storage"])
    psi1 = _prepare_ground_state(cfg, out, digest)
    params = cfg.protocol_params()
    readout = _readout(cfg, psi1)
    timeline = cfg.timeline(readout, storage=duration,
                            snapshot_times=_snapshot_times(args, cfg, duration))
    observables, revival, snaps = run_protocol(timeline, psi1, params)
    write_observables_csv(out / "observables.csv", observables, digest)
    write_profile_csv(out / "revival_profile.csv", revival, digest)
    for t, f1, f2 in snaps:
        write_snapshot(out / f"evolve_t{t:.6f}s.snap", t, f1, f2)
    n2 = observables.n2
    print(f"evolved {duration:g} s: N2 {n2[0]:.6g} -> {n2[-1]:.6g}, "
          f"fidelity {revival.fidelity:.6g}")
    if len(n2) >= 3 and n2[0] > 0:
        fit = fit_exponential_decay(observables.times, n2)
        print(f"fitted decay time {fit.tau:.6g} s (+- {fit.tau_uncertainty:.2g})")
    return EXIT_OK


_COMMANDS = {
    "validate-config": cmd_validate_config,
    "ground-state": cmd_ground_state,
    "store-revive": cmd_store_revive,
    "sweep-b": cmd_sweep_b,
    "evolve": cmd_evolve,
}


def main(argv=None):
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericsError as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERICS
    except ConvergenceError as err:
        print(f"non-convergence: {err}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
