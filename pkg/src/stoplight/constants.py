"""Physical constants for the sodium condensate simulations.

All internal quantities are SI. Unit-suffixed strings only appear at the
configuration boundary (see :mod:`stoplight.units`).
"""

from dataclasses import dataclass

from scipy.constants import atomic_mass, c, hbar, physical_constants

BOHR_RADIUS = physical_constants["Bohr radius"][0]

SODIUM_MASS = 22.989769282 * atomic_mass  # kg
SODIUM_D_LINE = 589.16e-9  # m, probe transition wavelength
SODIUM_HYPERFINE_SPLITTING = 1.7716261288e9  # Hz, 3S_1/2 ground-state splitting

BOHR_MAGNETON_PER_GAUSS = 9.2740100783e-28  # J/G


@dataclass(frozen=True)
class PhysicalConstants:
    """Bundle of constants shared by every numerical module.

    The default instance describes sodium-23 probed on the D line; the
    atom mass is validated against that species because all shipped
    calibrations assume it.
    """

    hbar: float = hbar
    atom_mass: float = SODIUM_MASS
    probe_wavelength: float = SODIUM_D_LINE
    vacuum_light_speed: float = c
    bohr_radius: float = BOHR_RADIUS

    def __post_init__(self):
        for name in ("hbar", "atom_mass", "probe_wavelength",
                     "vacuum_light_speed", "bohr_radius"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
        if abs(self.atom_mass - 3.8176e-26) > 0.01 * 3.8176e-26:
            raise ValueError(
                "atom_mass %.5g kg is not sodium-23 (expected within 1%% of "
                "3.8176e-26 kg)" % self.atom_mass
            )

    @property
    def probe_wavevector(self):
        """Probe wavenumber 2*pi/lambda in rad/m."""
        import math

        return 2.0 * math.pi / self.probe_wavelength


SODIUM = PhysicalConstants()
