import math
import warnings

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from stoplight.constants import SODIUM
from stoplight.gpe import (
    ConvergenceError,
    CoupledEvolver,
    EvolutionConfig,
    NumericsError,
    center_of_mass,
    evolve_step,
    ground_state,
    overlap_integral,
    single_component_energy,
    total_energy,
    width_at_fraction,
)
from stoplight.grids import ComplexField, make_grid, norm
from stoplight.potentials import TrapConfig, add_gradient
from stoplight.scattering import CouplingCoefficients

HBAR = SODIUM.hbar
MASS = SODIUM.atom_mass


def no_interaction():
    return CouplingCoefficients(g11=0.0, g22=0.0, g12=0j, loss_k12=0.0)


def lossless(g11, g22, g12):
    return CouplingCoefficients(g11=g11, g22=g22, g12=complex(g12, 0.0), loss_k12=0.0)


def loss_only(k12):
    # K12 = 2 |Im g12| / hbar
    return CouplingCoefficients(
        g11=0.0, g22=0.0, g12=complex(0.0, -0.5 * k12 * HBAR), loss_k12=k12
    )


# --- free dispersion oracle ---------------------------------------------------

def test_free_gaussian_dispersion():
    # closed form: amplitude width a(t) = a0 sqrt(1 + (hbar t / m a0^2)^2),
    # measured through <x^2> = a(t)^2 / 2
    grid = make_grid(1, [200e-6], [512])
    a0 = 5e-6
    x = grid.axes[0]
    psi = ComplexField(grid, np.exp(-(x**2) / (2 * a0**2)).astype(complex))
    v = np.zeros(grid.points)
    dt = 1e-4
    steps = 100
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # dt heuristic is moot for pure kinetic flow
        evolver = CoupledEvolver(grid, v, v, no_interaction(), dt)
    a1 = psi.values.copy()
    a2 = grid.zeros()
    evolver.run(a1, a2, steps)
    t = steps * dt
    a_t = a0 * math.sqrt(1.0 + (HBAR * t / (MASS * a0**2)) ** 2)
    n = np.abs(a1) ** 2
    x2 = float((x**2 * n).sum() / n.sum())
    assert x2 == pytest.approx(a_t**2 / 2.0, rel=1e-3)


# --- conservation --------------------------------------------------------------

@pytest.fixture(scope="module")
def trapped_pair():
    grid = make_grid(2, [60e-6, 60e-6], [64, 64])
    omega = 2 * math.pi * 40.0
    trap = TrapConfig(frequencies=(omega, omega))
    coup = lossless(1e-45, 1.2e-45, 1.1e-45)
    psi1 = ground_state(grid, trap, coup, 1e5, tolerance=1e-10)
    x, z = grid.meshes
    ratio = 0.4 * np.exp(-(x**2 + (z - 5e-6) ** 2) / (2 * (6e-6) ** 2))
    psi2 = ComplexField(grid, ratio * psi1.values)
    psi1 = ComplexField(grid, psi1.values * np.sqrt(1 - np.abs(ratio) ** 2))
    return grid, trap, coup, psi1, psi2


def test_lossless_norm_and_energy_conservation(trapped_pair):
    grid, trap, coup, psi1, psi2 = trapped_pair
    v1, v2 = trap.potentials(grid)
    evolver = CoupledEvolver(grid, v1, v2, coup, 1e-6)
    a1, a2 = psi1.values.copy(), psi2.values.copy()
    n1_0, n2_0 = norm(psi1), norm(psi2)
    e_0 = total_energy(psi1, psi2, v1, v2, coup)
    evolver.run(a1, a2, 1000)
    f1, f2 = ComplexField(grid, a1), ComplexField(grid, a2)
    assert abs(norm(f1) - n1_0) / n1_0 < 1e-10
    assert abs(norm(f2) - n2_0) / n2_0 < 1e-10
    assert abs(total_energy(f1, f2, v1, v2, coup) - e_0) / abs(e_0) < 1e-8


def test_split_step_time_symmetry(trapped_pair):
    grid, trap, coup, psi1, psi2 = trapped_pair
    v1, v2 = trap.potentials(grid)
    forward = CoupledEvolver(grid, v1, v2, coup, 1e-6)
    backward = CoupledEvolver(grid, v1, v2, coup, -1e-6)
    a1, a2 = psi1.values.copy(), psi2.values.copy()
    forward.step(a1, a2)
    backward.step(a1, a2)
    scale = np.abs(psi1.values).max()
    assert np.abs(a1 - psi1.values).max() / scale < 1e-10
    assert np.abs(a2 - psi2.values).max() / scale < 1e-10


def test_evolve_step_returns_new_fields(trapped_pair):
    grid, trap, coup, psi1, psi2 = trapped_pair
    v1, v2 = trap.potentials(grid)
    before1 = psi1.values.copy()
    out1, out2 = evolve_step(psi1, psi2, v1, v2, coup, 1e-6)
    np.testing.assert_array_equal(psi1.values, before1)
    assert out1 is not psi1 and out2 is not psi2
    assert np.abs(out1.values - before1).max() > 0


# --- two-body loss --------------------------------------------------------------

def test_uniform_loss_matches_ode_oracle():
    # kinetic disabled, uniform overlap: compare against the independently
    # integrated pair ODE dn1/dt = dn2/dt = -K n1 n2 over five decay times
    grid = make_grid(2, [10e-6, 10e-6], [16, 16])
    n1_0, n2_0 = 1.0e20, 2.0e18
    tau = 0.540
    k12 = 1.0 / (tau * n1_0)
    coup = loss_only(k12)
    v = np.zeros(grid.points)
    dt = 1e-3
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        evolver = CoupledEvolver(grid, v, v, coup, dt, include_kinetic=False)
    a1 = np.full(grid.points, math.sqrt(n1_0), dtype=complex)
    a2 = np.full(grid.points, math.sqrt(n2_0), dtype=complex)
    samples = []
    evolver.run(
        a1, a2, int(round(5 * tau / dt)),
        observer=lambda i, b1, b2: samples.append((i * dt, abs(b2[0, 0]) ** 2)),
        observe_every=54,
    )
    times = [t for t, _ in samples]
    sol = solve_ivp(
        lambda t, y: [-k12 * y[0] * y[1], -k12 * y[0] * y[1]],
        (0.0, times[-1]), [n1_0, n2_0], t_eval=times, rtol=1e-11, atol=1.0,
    )
    rel = [abs(n2 - ref) / ref for (_, n2), ref in zip(samples, sol.y[1])]
    assert max(rel) < 5e-3
    # and the early-time slope is the simple exponential with tau = 1/(K n1)
    t1, n2_t1 = samples[0]
    assert n2_t1 / n2_0 == pytest.approx(math.exp(-t1 / tau), rel=2e-3)


def test_loss_bookkeeping_identity(trapped_pair):
    # d(N1+N2)/dt = -2 K12_eff * integral(n1 n2) with the reduced coupling
    grid, trap, _, psi1, psi2 = trapped_pair
    k12 = 2e-20
    red = 1e5
    coup = CouplingCoefficients(
        g11=0.0, g22=0.0, g12=complex(0.0, -0.5 * k12 * HBAR * red),
        loss_k12=k12, reduction_factor=red,
    )
    v = np.zeros(grid.points)
    dt = 1e-6
    evolver = CoupledEvolver(grid, v, v, coup, dt, include_kinetic=False)
    a1, a2 = psi1.values.copy(), psi2.values.copy()
    total_before = norm(psi1) + norm(psi2)
    overlap = overlap_integral(psi1, psi2)
    evolver.step(a1, a2)
    total_after = norm(ComplexField(grid, a1)) + norm(ComplexField(grid, a2))
    expected_rate = -2.0 * k12 * red * overlap
    measured_rate = (total_after - total_before) / dt
    assert measured_rate == pytest.approx(expected_rate, rel=1e-4)


def test_n2_constant_without_overlap():
    grid = make_grid(1, [100e-6], [256])
    z = grid.axes[0]
    a1 = np.where(z < -10e-6, 1.0, 0.0).astype(complex) * 1e7
    a2 = np.where(z > 10e-6, 1.0, 0.0).astype(complex) * 1e7
    coup = loss_only(1e-19)
    v = np.zeros(grid.points)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        evolver = CoupledEvolver(grid, v, v, coup, 1e-5, include_kinetic=False)
    f2_before = norm(ComplexField(grid, a2.copy()))
    b1, b2 = a1.copy(), a2.copy()
    evolver.step(b1, b2)
    assert norm(ComplexField(grid, b2)) == pytest.approx(f2_before, rel=1e-15)
    np.testing.assert_array_equal(b2 == 0, a2 == 0)


def test_n2_nonincreasing_with_overlap(trapped_pair):
    grid, trap, _, psi1, psi2 = trapped_pair
    v1, v2 = trap.potentials(grid)
    coup = loss_only(5e-19)
    evolver = CoupledEvolver(grid, v1, v2, coup, 1e-6)
    a1, a2 = psi1.values.copy(), psi2.values.copy()
    series = []
    evolver.run(a1, a2, 200,
                observer=lambda i, b1, b2: series.append(
                    norm(ComplexField(grid, b2))),
                observe_every=20)
    assert all(b < a for a, b in zip(series, series[1:]))


# --- ground states --------------------------------------------------------------

def test_ground_state_harmonic_oscillator():
    omega = 2 * math.pi * 30.0
    grid = make_grid(1, [60e-6], [256])
    trap = TrapConfig(frequencies=(omega,))
    psi = ground_state(grid, trap, no_interaction(), 1.0, tolerance=1e-12)
    v1 = trap.potentials(grid)[0]
    energy = single_component_energy(psi, v1, 0.0)
    assert energy == pytest.approx(0.5 * HBAR * omega, rel=1e-3)
    x = grid.axes[0]
    x2 = float((x**2 * psi.density()).sum() * grid.cell_volume)
    assert x2 == pytest.approx(HBAR / (2 * MASS * omega), rel=1e-3)


def test_ground_state_thomas_fermi():
    omega = 2 * math.pi * 50.0
    atoms = 1e6
    mu_target = 50 * HBAR * omega  # deep Thomas-Fermi regime
    g1d = 4 * mu_target**1.5 / (3 * atoms * omega * math.sqrt(MASS / 2))
    grid = make_grid(1, [100e-6], [512])
    trap = TrapConfig(frequencies=(omega,))
    coup = lossless(g1d, g1d, 0.0)
    psi = ground_state(grid, trap, coup, atoms, tolerance=1e-12)
    v1 = trap.potentials(grid)[0]
    n = psi.density()
    kinetic = single_component_energy(psi, v1, 0.0) - float(
        (v1 * n).sum()
    ) * grid.cell_volume
    potential = float((v1 * n).sum()) * grid.cell_volume
    interaction_mu = g1d * float((n * n).sum()) * grid.cell_volume
    mu_measured = (kinetic + potential + interaction_mu) / atoms
    mu_tf = (3 * atoms * g1d * omega * math.sqrt(MASS / 2) / 4) ** (2.0 / 3.0)
    assert mu_measured == pytest.approx(mu_tf, rel=0.02)


def test_ground_state_convergence_error():
    grid = make_grid(1, [60e-6], [64])
    trap = TrapConfig(frequencies=(2 * math.pi * 30.0,))
    with pytest.raises(ConvergenceError):
        ground_state(grid, trap, no_interaction(), 1.0,
                     tolerance=1e-300, max_iterations=50)


# --- observables ----------------------------------------------------------------

def test_center_of_mass_symmetric_gaussian():
    grid = make_grid(2, [40e-6, 40e-6], [64, 64])
    x, z = grid.meshes
    field = ComplexField(grid, np.exp(-(x**2 + z**2) / (2 * (5e-6) ** 2)).astype(complex))
    com = center_of_mass(field)
    assert np.abs(com).max() < 1e-12


def test_center_of_mass_translation_covariance():
    grid = make_grid(1, [80e-6], [128])
    x = grid.axes[0]
    field = ComplexField(grid, np.exp(-(x**2) / (2 * (4e-6) ** 2)).astype(complex))
    com0 = center_of_mass(field)[0]
    cells = 7
    shifted = ComplexField(grid, np.roll(field.values, cells))
    com1 = center_of_mass(shifted)[0]
    assert com1 - com0 == pytest.approx(cells * grid.spacing[0], abs=grid.spacing[0] / 100)


def test_center_of_mass_two_gaussians_cancel():
    grid = make_grid(1, [80e-6], [256])
    x = grid.axes[0]
    a = 12e-6
    values = np.exp(-((x - a) ** 2) / (2 * (3e-6) ** 2)) + np.exp(
        -((x + a) ** 2) / (2 * (3e-6) ** 2)
    )
    com = center_of_mass(ComplexField(grid, values.astype(complex)))
    assert abs(com[0]) < 1e-10


def test_center_of_mass_zero_field_rejected():
    grid = make_grid(1, [80e-6], [64])
    with pytest.raises(ValueError):
        center_of_mass(ComplexField(grid, grid.zeros()))


def test_add_gradient_zero_is_noop():
    trap = TrapConfig(frequencies=(100.0, 100.0))
    grid = make_grid(2, [40e-6, 40e-6], [32, 32])
    v1a, v2a = trap.potentials(grid)
    v1b, v2b = add_gradient(trap, 0.0).potentials(grid)
    np.testing.assert_array_equal(v1a, v1b)
    np.testing.assert_array_equal(v2a, v2b)


def test_add_gradient_tilts_v2_only():
    trap = TrapConfig(frequencies=(100.0, 100.0), mu2=4.6e-28)
    grid = make_grid(2, [40e-6, 40e-6], [32, 32])
    tilted = add_gradient(trap, 20.0)  # 200 mG/cm
    v1a, v2a = trap.potentials(grid)
    v1b, v2b = tilted.potentials(grid)
    np.testing.assert_array_equal(v1a, v1b)
    z = grid.meshes[1]
    np.testing.assert_allclose(v2b - v2a, -4.6e-28 * 20.0 * z, rtol=1e-12)


def test_gradient_sign_steers_com_sign():
    # short 1D steering runs: the late COM of the minority component follows
    # the gradient sign
    grid = make_grid(1, [100e-6], [128])
    omega = 2 * math.pi * 40.0
    g = 5e-41
    coup = CouplingCoefficients(g11=g, g22=g * 1.2, g12=complex(g * 1.35, 0.0), loss_k12=0.0)
    trap = TrapConfig(frequencies=(omega,))
    psi1 = ground_state(grid, trap, coup, 5e5, tolerance=1e-10)
    z = grid.axes[0]
    ratio = 0.45 * np.exp(-(z**2) / (2 * (5e-6) ** 2))
    p2 = ComplexField(grid, ratio * psi1.values)
    p1 = ComplexField(grid, psi1.values * np.sqrt(1 - ratio**2))

    def late_com(sign):
        tilted = add_gradient(trap, sign * 20.0)
        v1, v2 = tilted.potentials(grid)
        evolver = CoupledEvolver(grid, v1, v2, coup, 1e-5)
        a1, a2 = p1.values.copy(), p2.values.copy()
        evolver.run(a1, a2, 8000)  # 80 ms
        return center_of_mass(ComplexField(grid, a2))[0]

    plus, minus = late_com(+1.0), late_com(-1.0)
    assert plus > 2e-6 and minus < -2e-6
    assert plus == pytest.approx(-minus, rel=0.05)


def test_width_at_fraction():
    grid = make_grid(1, [100e-6], [512])
    z = grid.axes[0]
    half = 20e-6
    n = np.where(np.abs(z) <= half, 1.0, 0.0)
    field = ComplexField(grid, np.sqrt(n).astype(complex))
    assert width_at_fraction(field, 0.5) == pytest.approx(2 * half, abs=2 * grid.spacing[0])


def test_coarse_time_step_converged():
    # the acceptance protocol runs use dt = 10 us; check against the 1 us
    # default over a 10 ms horizon that the observables are step-converged
    from stoplight.config import parse_config
    from stoplight.scattering import coupling_coefficients, scattering_at_field

    cfg = parse_config(text="[grid]\npoints_x = 64\npoints_z = 64\n")
    grid = cfg.grid()
    couplings = coupling_coefficients(
        scattering_at_field(cfg.scattering_model(), 132.4),
        reduction_factor=cfg.reduction_factor(),
    )
    psi1 = ground_state(grid, cfg.trap(), couplings, cfg.atom_number(),
                        tolerance=1e-9)
    x, z = grid.meshes
    ratio = 0.5 * np.exp(-(x**2 + z**2) / (2 * (8e-6) ** 2))
    p2 = ratio * psi1.values
    p1 = psi1.values * np.sqrt(1 - ratio**2)
    trap = cfg.trap(gradient_gauss_per_m=20.0)
    v1, v2 = trap.potentials(grid)

    results = {}
    for dt in (1e-6, 1e-5):
        evolver = CoupledEvolver(grid, v1, v2, couplings, dt)
        a1, a2 = p1.copy(), p2.copy()
        evolver.run(a1, a2, int(round(0.01 / dt)))
        f2 = ComplexField(grid, a2)
        results[dt] = (norm(f2), center_of_mass(f2)[1])
    n2_fine, com_fine = results[1e-6]
    n2_coarse, com_coarse = results[1e-5]
    assert abs(n2_coarse - n2_fine) / n2_fine < 5e-3
    assert abs(com_coarse - com_fine) < 0.1e-6


# --- failure handling -------------------------------------------------------------

def test_nan_detection_reports_step():
    grid = make_grid(1, [40e-6], [64])
    v = np.zeros(grid.points)
    evolver = CoupledEvolver(grid, v, v, no_interaction(), 1e-6)
    a1 = grid.zeros() + 1.0
    a1[3] = np.nan
    a2 = grid.zeros()
    with pytest.raises(NumericsError) as err:
        evolver.run(a1, a2, 5)
    assert err.value.step >= 1


def test_stability_heuristic_warns():
    grid = make_grid(1, [40e-6], [512])
    v = np.zeros(grid.points)
    with pytest.warns(UserWarning, match="heuristic"):
        CoupledEvolver(grid, v, v, no_interaction(), 1e-3)


def test_evolution_config_validation():
    with pytest.raises(ValueError):
        EvolutionConfig(dt=0.0, duration=1.0)
    with pytest.raises(ValueError):
        EvolutionConfig(dt=1e-6, duration=-1.0)
    cfg = EvolutionConfig(dt=1e-5, duration=1e-2, snapshot_interval=1e-3)
    assert cfg.n_steps() == 1000
    assert cfg.observe_every() == 100
