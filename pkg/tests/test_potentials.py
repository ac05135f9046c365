import math

import numpy as np
import pytest

from stoplight.constants import SODIUM
from stoplight.grids import make_grid
from stoplight.potentials import (
    DipoleBeams,
    TrapConfig,
    add_gradient,
    dipole_trap_depth,
    harmonic_frequencies_for_cloud,
)


def test_trap_requires_exactly_one_model():
    with pytest.raises(ValueError):
        TrapConfig()
    with pytest.raises(ValueError):
        TrapConfig(frequencies=(100.0,),
                   dipole=DipoleBeams(power=0.5, waist=45e-6, wavelength=980e-9))


def test_harmonic_potential_values():
    omega = 2 * math.pi * 30.0
    trap = TrapConfig(frequencies=(omega,))
    grid = make_grid(1, [60e-6], [64])
    v1, v2 = trap.potentials(grid)
    z = grid.axes[0]
    np.testing.assert_allclose(v1, 0.5 * SODIUM.atom_mass * omega**2 * z**2)
    np.testing.assert_array_equal(v1, v2)  # no gradient by default


def test_frequency_count_must_match_grid():
    trap = TrapConfig(frequencies=(100.0,))
    grid = make_grid(2, [60e-6, 60e-6], [16, 16])
    with pytest.raises(ValueError):
        trap.potentials(grid)


def test_asymmetry_bias_tilts_x():
    trap = TrapConfig(frequencies=(100.0, 100.0), asymmetry_slope_x=1e-28)
    grid = make_grid(2, [60e-6, 60e-6], [16, 16])
    v1, _ = trap.potentials(grid)
    base_v1, _ = TrapConfig(frequencies=(100.0, 100.0)).potentials(grid)
    np.testing.assert_allclose(v1 - base_v1, 1e-28 * grid.meshes[0])


def test_gradient_only_on_component_two():
    trap = add_gradient(TrapConfig(frequencies=(80.0, 80.0), mu2=4.6e-28), 20.0)
    grid = make_grid(2, [60e-6, 60e-6], [16, 16])
    v1, v2 = trap.potentials(grid)
    z = grid.meshes[1]
    np.testing.assert_allclose(v2 - v1, -4.6e-28 * 20.0 * z)


def test_gradient_must_be_finite():
    with pytest.raises(ValueError):
        add_gradient(TrapConfig(frequencies=(80.0,)), math.inf)


def test_dipole_depth_positive_and_scales_with_power():
    beams = DipoleBeams(power=0.5, waist=45e-6, wavelength=980e-9)
    depth = dipole_trap_depth(beams)
    assert depth > 0
    double = dipole_trap_depth(DipoleBeams(power=1.0, waist=45e-6, wavelength=980e-9))
    assert double == pytest.approx(2 * depth, rel=1e-12)


def test_crossed_dipole_potential_bounded_and_trapping():
    trap = TrapConfig(dipole=DipoleBeams(power=0.5, waist=45e-6, wavelength=980e-9))
    grid = make_grid(2, [120e-6, 120e-6], [64, 64])
    v1, _ = trap.potentials(grid)
    assert np.isfinite(v1).all()
    centre = v1[32, 32]
    assert centre == v1.min()  # deepest at the beam crossing
    assert v1.max() <= 0.0  # attractive everywhere


def test_harmonic_frequency_calibration_round_trip():
    # omega from the helper must reproduce the Thomas-Fermi radius it assumes
    g2d = 1.1e-45
    atoms = 3e6
    diameter = 80e-6
    omega = harmonic_frequencies_for_cloud(diameter, atoms, g2d)
    mu = 2 * atoms * g2d / (math.pi * (diameter / 2) ** 2)
    radius = math.sqrt(2 * mu / (SODIUM.atom_mass * omega**2))
    assert 2 * radius == pytest.approx(diameter, rel=1e-12)
