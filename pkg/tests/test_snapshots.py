import numpy as np
import pytest

from stoplight.grids import ComplexField, make_grid
from stoplight.protocol import DecayFit, SimObservables
from stoplight.snapshots import (
    MAGIC,
    config_hash,
    read_snapshot,
    write_fidelity_csv,
    write_observables_csv,
    write_snapshot,
    write_sweep_csv,
)


def random_pair(grid, seed):
    rng = np.random.default_rng(seed)
    values = rng.standard_normal(grid.points) + 1j * rng.standard_normal(grid.points)
    return ComplexField(grid, values), ComplexField(grid, 0.3 * values[::-1].copy())


@pytest.mark.parametrize("dims,extents,points", [
    (1, (100e-6,), (64,)),
    (2, (80e-6, 120e-6), (32, 48)),
])
def test_snapshot_round_trip(tmp_path, dims, extents, points):
    grid = make_grid(dims, extents, points)
    psi1, psi2 = random_pair(grid, seed=dims)
    path = tmp_path / "state.snap"
    write_snapshot(path, 0.125, psi1, psi2)
    t, back1, back2 = read_snapshot(path)
    assert t == 0.125
    assert back1.grid == grid
    np.testing.assert_array_equal(back1.values, psi1.values)
    np.testing.assert_array_equal(back2.values, psi2.values)


def test_snapshot_layout_header(tmp_path):
    grid = make_grid(1, (50e-6,), (16,))
    psi1, psi2 = random_pair(grid, seed=3)
    path = tmp_path / "state.snap"
    write_snapshot(path, 1.0, psi1, psi2)
    raw = path.read_bytes()
    assert raw[:8] == MAGIC
    assert int.from_bytes(raw[8:12], "little") == 1  # version
    assert int.from_bytes(raw[12:16], "little") == 1  # dims
    # 8 magic + 4 version + 4 dims + 8 time + 8 extent + 4 points + 2*16*N
    assert len(raw) == 8 + 4 + 4 + 8 + 8 + 4 + 2 * 16 * 16


def test_snapshot_rejects_foreign_file(tmp_path):
    path = tmp_path / "junk.snap"
    path.write_bytes(b"NOTASNAP" + b"\x00" * 64)
    with pytest.raises(ValueError, match="magic"):
        read_snapshot(path)


def test_snapshot_mismatched_grids_rejected(tmp_path):
    g1 = make_grid(1, (50e-6,), (16,))
    g2 = make_grid(1, (50e-6,), (32,))
    f1, _ = random_pair(g1, seed=1)
    f2, _ = random_pair(g2, seed=2)
    with pytest.raises(ValueError):
        write_snapshot(tmp_path / "x.snap", 0.0, f1, f2)


def test_observables_csv_deterministic(tmp_path):
    obs = SimObservables(
        times=np.array([0.0, 1e-3, 2e-3]),
        n1=np.array([3e6, 2.9e6, 2.8e6]),
        n2=np.array([1e4, 0.9e4, 0.8e4]),
        com_z2=np.array([0.0, 1e-6, 2e-6]),
        overlap=np.array([1e33, 0.5e33, 0.2e33]),
    )
    digest = config_hash("some config")
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_observables_csv(a, obs, digest)
    write_observables_csv(b, obs, digest)
    assert a.read_bytes() == b.read_bytes()
    text = a.read_text()
    assert text.startswith("# stoplight")
    assert f"config_hash: {digest}" in text
    assert "t_s,n1_atoms,n2_atoms,com_z2_m,overlap" in text


def test_fidelity_and_sweep_csv_headers(tmp_path):
    digest = config_hash("cfg")
    fid = tmp_path / "fid.csv"
    write_fidelity_csv(fid, [(0.05, 0.02, 1e5), (1.5, 0.005, 4e4)], digest)
    lines = fid.read_text().splitlines()
    assert lines[3] == "storage_s,fidelity,n2_at_read"
    assert len(lines) == 6

    sweep = tmp_path / "sweep.csv"
    rows = [(132.0, DecayFit(tau=0.2, tau_uncertainty=0.01, amplitude=1e5,
                             residual_norm=1.0))]
    write_sweep_csv(sweep, rows, digest)
    content = sweep.read_text()
    assert "b_gauss,tau_s,tau_err_s" in content
    assert "1.320000000000e+02" in content


def test_config_hash_stable():
    assert config_hash("abc") == config_hash("abc")
    assert config_hash("abc") != config_hash("abd")
    assert len(config_hash("abc")) == 12
