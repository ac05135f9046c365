"""Trapping and steering potentials for the two stored states.

The default trap is an anisotropic harmonic fit to the crossed dipole
geometry; the full crossed-Gaussian beam potential is available behind the
``dipole`` field for studies that need the anharmonicity.  State |1> is
magnetically insensitive (M = 0); state |2> carries a magnetic moment, so
a bias-field gradient along z adds a linear potential to V2 only:

    V2 += -mu2 * dB/dz * z

With mu2 > 0 a positive gradient pulls the imprint toward +z, the
configured tip.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .constants import BOHR_MAGNETON_PER_GAUSS, SODIUM

DEFAULT_MU2 = 0.5 * BOHR_MAGNETON_PER_GAUSS  # J/G, Breit-Rabi estimate at ~132 G


@dataclass(frozen=True)
class DipoleBeams:
    """Crossed far-detuned beams propagating along x and z."""

    power: float  # W per beam
    waist: float  # m
    wavelength: float  # m

    def __post_init__(self):
        if min(self.power, self.waist, self.wavelength) <= 0:
            raise ValueError("dipole beam parameters must be positive")


@dataclass(frozen=True)
class TrapConfig:
    """Potential configuration for both components.

    Either ``frequencies`` (rad/s per grid axis) or ``dipole`` must be set.
    ``asymmetry_slope_x`` adds a small linear bias along x to both states,
    modelling the trap imperfection that parks the imprint off-axis.
    """

    frequencies: tuple | None = None
    dipole: DipoleBeams | None = None
    gradient_gauss_per_m: float = 0.0
    mu1: float = 0.0  # J/G, M=0 state
    mu2: float = DEFAULT_MU2  # J/G
    asymmetry_slope_x: float = 0.0  # J/m

    def __post_init__(self):
        if (self.frequencies is None) == (self.dipole is None):
            raise ValueError("specify exactly one of frequencies or dipole beams")
        if self.frequencies is not None:
            freqs = tuple(float(f) for f in self.frequencies)
            if any(f <= 0 for f in freqs):
                raise ValueError("trap frequencies must be positive")
            object.__setattr__(self, "frequencies", freqs)
        if not math.isfinite(self.gradient_gauss_per_m):
            raise ValueError("gradient must be finite")

    def scalar_potential(self, grid, constants=SODIUM):
        """State-independent part of the trap on the grid."""
        if self.frequencies is not None:
            if len(self.frequencies) != grid.dims:
                raise ValueError(
                    f"{len(self.frequencies)} trap frequencies for a {grid.dims}D grid"
                )
            v = np.zeros(grid.points)
            for axis, (mesh, omega) in enumerate(zip(grid.meshes, self.frequencies)):
                v = v + 0.5 * constants.atom_mass * omega**2 * mesh**2
        else:
            v = _crossed_dipole_potential(self.dipole, grid, constants)
        if self.asymmetry_slope_x != 0.0 and grid.dims == 2:
            v = v + self.asymmetry_slope_x * grid.meshes[0]
        return v

    def potentials(self, grid, constants=SODIUM):
        """(V1, V2) arrays including the gradient term on V2."""
        base = self.scalar_potential(grid, constants)
        z = grid.meshes[-1]
        v1 = base - self.mu1 * self.gradient_gauss_per_m * z
        v2 = base - self.mu2 * self.gradient_gauss_per_m * z
        return v1, v2


def add_gradient(trap, gradient_gauss_per_m):
    """Return a trap with the magnetic gradient replaced."""
    if not math.isfinite(gradient_gauss_per_m):
        raise ValueError("gradient must be finite")
    return replace(trap, gradient_gauss_per_m=gradient_gauss_per_m)


def _crossed_dipole_potential(beams, grid, constants):
    """In-plane potential of two crossed Gaussian beams (y = 0 slice).

    Depth per beam follows the standard far-detuned two-level expression
    with the counter-rotating term retained (the trap light at 980 nm is
    very far from the 589 nm line).
    """
    depth = dipole_trap_depth(beams, constants)
    if grid.dims == 1:
        z = grid.meshes[0]
        # beam along x confines z; the z beam contributes a constant on axis
        return -depth * np.exp(-2.0 * z**2 / beams.waist**2) - depth
    x, z = grid.meshes
    vx_beam = -depth * np.exp(-2.0 * z**2 / beams.waist**2)
    vz_beam = -depth * np.exp(-2.0 * x**2 / beams.waist**2)
    return vx_beam + vz_beam


def dipole_trap_depth(beams, constants=SODIUM, linewidth=2.0 * math.pi * 9.79e6):
    """Peak dipole potential depth (J) of one Gaussian beam."""
    omega0 = 2.0 * math.pi * constants.vacuum_light_speed / constants.probe_wavelength
    omega = 2.0 * math.pi * constants.vacuum_light_speed / beams.wavelength
    intensity = 2.0 * beams.power / (math.pi * beams.waist**2)
    c = constants.vacuum_light_speed
    coeff = 3.0 * math.pi * c**2 / (2.0 * omega0**3)
    detuning_term = linewidth / (omega0 - omega) + linewidth / (omega0 + omega)
    return abs(coeff * detuning_term * intensity)


def harmonic_frequencies_for_cloud(diameter, atom_number, g_2d, constants=SODIUM):
    """Isotropic in-plane trap frequency reproducing a Thomas-Fermi diameter.

    For a 2D Thomas-Fermi cloud N = pi mu R^2 / (2 g2d) with
    mu = m omega^2 R^2 / 2, so omega follows directly from the target
    radius and atom number.
    """
    radius = diameter / 2.0
    mu = 2.0 * atom_number * g_2d / (math.pi * radius**2)
    return math.sqrt(2.0 * mu / constants.atom_mass) / radius
