"""Binary field snapshots and CSV emission.

Snapshot layout (all little-endian):

    offset  size          content
    0       8             magic ``b"STOPLSNP"``
    8       4             format version, uint32 (currently 1)
    12      4             dims, uint32 (1 or 2)
    16      8             snapshot time in seconds, float64
    24      8 * dims      grid extents in metres, float64 each
    ...     4 * dims      grid points per axis, uint32 each
    ...     16 * N        component 1: interleaved (re, im) float64, C order
    ...     16 * N        component 2: same layout

CSV files start with ``#``-prefixed metadata lines (package version,
config hash, column units) so a result can be traced back to the exact
configuration that produced it.  No timestamps are written anywhere:
identical runs must produce byte-identical files.
"""

import hashlib
import struct

import numpy as np

from .grids import ComplexField, Grid

MAGIC = b"STOPLSNP"
VERSION = 1


def write_snapshot(path, time, psi1, psi2):
    if psi1.grid != psi2.grid:
        raise ValueError("snapshot components must share a grid")
    grid = psi1.grid
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", VERSION, grid.dims))
        fh.write(struct.pack("<d", float(time)))
        fh.write(struct.pack(f"<{grid.dims}d", *grid.extents))
        fh.write(struct.pack(f"<{grid.dims}I", *grid.points))
        for field in (psi1, psi2):
            interleaved = np.empty(grid.size * 2, dtype="<f8")
            flat = field.values.ravel(order="C")
            interleaved[0::2] = flat.real
            interleaved[1::2] = flat.imag
            fh.write(interleaved.tobytes())


def read_snapshot(path):
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != MAGIC:
            raise ValueError(f"{path}: not a snapshot file (magic {magic!r})")
        version, dims = struct.unpack("<II", fh.read(8))
        if version != VERSION:
            raise ValueError(f"{path}: unsupported snapshot version {version}")
        (time,) = struct.unpack("<d", fh.read(8))
        extents = struct.unpack(f"<{dims}d", fh.read(8 * dims))
        points = struct.unpack(f"<{dims}I", fh.read(4 * dims))
        grid = Grid(extents=extents, points=points)
        fields = []
        for _ in range(2):
            raw = np.frombuffer(fh.read(16 * grid.size), dtype="<f8")
            values = (raw[0::2] + 1j * raw[1::2]).reshape(grid.points)
            fields.append(ComplexField(grid, values))
    return time, fields[0], fields[1]


def config_hash(config_text):
    """Short stable hash of the configuration that produced an output."""
    return hashlib.sha256(config_text.encode("utf-8")).hexdigest()[:12]


def _write_csv(path, header_lines, columns, rows):
    from . import __version__

    with open(path, "w", newline="\n") as fh:
        fh.write(f"# stoplight {__version__}\n")
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_format(value) for value in row) + "\n")


def _format(value):
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".12e")


def write_observables_csv(path, observables, config_digest):
    rows = zip(observables.times, observables.n1, observables.n2,
               observables.com_z2, observables.overlap)
    _write_csv(
        path,
        [f"config_hash: {config_digest}",
         "units: s, atoms, atoms, m, atoms^2 m^-d"],
        ("t_s", "n1_atoms", "n2_atoms", "com_z2_m", "overlap"),
        rows,
    )


def write_fidelity_csv(path, rows, config_digest):
    """rows: iterable of (storage_s, fidelity, n2_at_read)."""
    _write_csv(
        path,
        [f"config_hash: {config_digest}", "units: s, fraction, atoms"],
        ("storage_s", "fidelity", "n2_at_read"),
        rows,
    )


def write_sweep_csv(path, rows, config_digest):
    """rows: iterable of (bias_gauss, DecayFit)."""
    flat = ((b, fit.tau, fit.tau_uncertainty) for b, fit in rows)
    _write_csv(
        path,
        [f"config_hash: {config_digest}", "units: gauss, s, s"],
        ("b_gauss", "tau_s", "tau_err_s"),
        flat,
    )


def write_convergence_csv(path, log, config_digest):
    """log: iterable of (iteration, energy_joule, relative_change)."""
    _write_csv(
        path,
        [f"config_hash: {config_digest}", "units: 1, J, 1"],
        ("iteration", "energy_j", "rel_change"),
        log,
    )


def write_profile_csv(path, revival, config_digest):
    rows = zip(revival.profile_times, revival.profile_power)
    _write_csv(
        path,
        [f"config_hash: {config_digest}",
         f"fidelity: {revival.fidelity!r}",
         "units: s, atoms/s"],
        ("t_s", "power_proxy"),
        rows,
    )
