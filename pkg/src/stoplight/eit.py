"""Analytic dark-state optics: pulse specs, slow light, and write-in.

Full optical propagation is deliberately absent.  The probe pulse enters
the simulation only through the adiabatic dark-state amplitude ratio

    psi2/psi1 = -(Omega_p/Omega_c) * exp(i dk.R - i domega t)

and the temporal envelope is converted to a spatial one along z via
z = v_g * t.  The optics of the experiment is summarized by two scalars,
the group velocity and a Beer-Lambert transmission.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import SODIUM
from .grids import ComplexField

ENVELOPES = ("gaussian", "raised_cosine", "square")

# gaussian envelopes truncate at duration/2 = 3 sigma
GAUSSIAN_SIGMA_FRACTION = 1.0 / 6.0
# square envelopes ramp up/down over this fraction of the duration
SQUARE_RAMP_FRACTION = 0.125


@dataclass(frozen=True)
class PulseSpec:
    """One laser pulse: angular peak Rabi frequency, duration, shape."""

    peak_rabi: float  # rad/s
    duration: float  # s
    envelope: str = "raised_cosine"
    direction: tuple = (0.0, 0.0, 1.0)  # unit propagation direction
    detuning: float = 0.0  # rad/s from the respective transition

    def __post_init__(self):
        if self.peak_rabi < 0:
            raise ValueError("peak_rabi must be >= 0")
        if self.duration <= 0:
            raise ValueError("duration must be positive")
        if self.envelope not in ENVELOPES:
            raise ValueError(f"unknown envelope {self.envelope!r}; pick from {ENVELOPES}")
        d = np.asarray(self.direction, dtype=float)
        if d.shape != (3,) or not np.isfinite(d).all() or np.linalg.norm(d) == 0:
            raise ValueError("direction must be a finite non-zero 3-vector")
        object.__setattr__(self, "direction", tuple(d / np.linalg.norm(d)))

    def envelope_at(self, t):
        """Dimensionless envelope value in [0, 1]; zero outside [0, duration]."""
        t = np.asarray(t, dtype=float)
        s = t / self.duration
        inside = (s >= 0.0) & (s <= 1.0)
        if self.envelope == "gaussian":
            sigma = GAUSSIAN_SIGMA_FRACTION
            env = np.exp(-((s - 0.5) ** 2) / (2.0 * sigma**2))
        elif self.envelope == "raised_cosine":
            env = np.sin(np.pi * np.clip(s, 0.0, 1.0)) ** 2
        else:  # square with smooth ramps
            r = SQUARE_RAMP_FRACTION
            env = np.ones_like(s)
            up = (s >= 0.0) & (s < r)
            down = (s > 1.0 - r) & (s <= 1.0)
            env = np.where(up, np.sin(0.5 * np.pi * s / r) ** 2, env)
            env = np.where(down, np.sin(0.5 * np.pi * (1.0 - s) / r) ** 2, env)
        return np.where(inside, env, 0.0)

    def amplitude_at(self, t):
        """Instantaneous Rabi amplitude Omega(t) in rad/s."""
        return self.peak_rabi * self.envelope_at(t)

    def energy_proxy(self, samples=4001):
        """Pulse energy proxy: integral of |Omega(t)|^2 dt, in rad^2/s."""
        t = np.linspace(0.0, self.duration, samples)
        amp = self.amplitude_at(t)
        return float(np.trapezoid(amp * amp, t))


@dataclass(frozen=True)
class BeamGeometry:
    """Probe/coupling beam difference quantities entering the dark state.

    The default wavevector difference is the residual from the ground-state
    hyperfine splitting for co-propagating beams, dynamically negligible;
    a counter-propagating configuration would use |dk| ~ 2 k_probe.
    """

    dk: tuple = (0.0, 0.0, 2.0 * math.pi * 1.7716261288e9 / 299792458.0)
    domega: float = 0.0  # omega_p - omega_c residual in the rotating frame

    def __post_init__(self):
        d = np.asarray(self.dk, dtype=float)
        if d.shape != (3,) or not np.isfinite(d).all():
            raise ValueError("dk must be a finite 3-vector")
        object.__setattr__(self, "dk", tuple(d))

    @property
    def dk_z(self):
        return self.dk[2]


def dark_state_ratio(probe_amplitude, coupling_amplitude, geometry=None, r=None, t=0.0):
    """Dark-state amplitude ratio psi2/psi1 at position r and time t.

    ``r`` may be a single 3-vector or an array whose last axis has length 3;
    the result broadcasts accordingly.  Raises if the coupling amplitude
    vanishes anywhere (the ratio is undefined there).
    """
    coupling_amplitude = np.asarray(coupling_amplitude)
    if np.any(np.abs(coupling_amplitude) == 0):
        raise ZeroDivisionError("dark-state ratio undefined where the coupling field is zero")
    geometry = geometry or BeamGeometry()
    if r is None:
        phase = -geometry.domega * np.asarray(t, dtype=float)
    else:
        r = np.asarray(r, dtype=float)
        phase = r @ np.asarray(geometry.dk) - geometry.domega * np.asarray(t, dtype=float)
    return -(np.asarray(probe_amplitude) / coupling_amplitude) * np.exp(1j * phase)


@dataclass(frozen=True)
class SlowLightParams:
    """Group velocity, spatial compression, and transmission of the probe."""

    group_velocity: float
    compression_factor: float
    transmission: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.transmission <= 1.0:
            raise ValueError("transmission must lie in [0, 1]")
        expected = SODIUM.vacuum_light_speed / self.group_velocity
        if not math.isclose(self.compression_factor, expected, rel_tol=1e-9):
            raise ValueError("compression_factor must equal c / group_velocity")

    @classmethod
    def from_group_velocity(cls, v_g, transmission=1.0):
        return cls(v_g, SODIUM.vacuum_light_speed / v_g, transmission)

    @classmethod
    def from_compression(cls, factor, transmission=1.0):
        return cls(group_velocity_from_compression(factor),
                   float(factor), transmission)


def group_velocity_from_compression(compression_factor):
    """v_g = c / compression; compression below 1 is unphysical here."""
    if compression_factor < 1.0:
        raise ValueError("compression factor must be >= 1")
    return SODIUM.vacuum_light_speed / compression_factor


def compression_from_group_velocity(group_velocity):
    if not 0.0 < group_velocity <= SODIUM.vacuum_light_speed:
        raise ValueError("group velocity must lie in (0, c]")
    return SODIUM.vacuum_light_speed / group_velocity


@dataclass(frozen=True)
class ImprintPlacement:
    """Where and how the stopped pulse is laid into the condensate.

    The pulse occupies ``group_velocity * probe.duration`` along z, centred
    on ``center_z``; the part of the pulse that entered first sits at
    larger z.  In 2D an optional transverse Gaussian (amplitude std
    ``transverse_sigma``) models the probe beam profile; ``None`` means a
    transversally uniform beam.
    """

    center_z: float
    group_velocity: float
    transverse_sigma: float | None = None
    center_x: float = 0.0
    geometry: BeamGeometry = field(default_factory=BeamGeometry)

    def __post_init__(self):
        if self.group_velocity <= 0:
            raise ValueError("group velocity must be positive")
        if self.transverse_sigma is not None and self.transverse_sigma <= 0:
            raise ValueError("transverse_sigma must be positive")


def write_imprint(psi1, probe, coupling, placement):
    """Map a stopped probe pulse onto the matter fields.

    Returns ``(psi1_after, psi2)``.  The transfer fraction at each point is
    |ratio|^2 with ratio from :func:`dark_state_ratio`; the host field is
    depleted as sqrt(1 - |ratio * env|^2) so that the total atom number is
    conserved pointwise.
    """
    if coupling.peak_rabi <= 0:
        raise ZeroDivisionError("write-in requires a non-zero coupling field")
    grid = psi1.grid
    z = grid.z_axis
    length = placement.group_velocity * probe.duration
    z_lo = placement.center_z - 0.5 * length
    z_hi = placement.center_z + 0.5 * length
    if z_lo < z[0] or z_hi > z[-1] + grid.spacing[-1]:
        raise ValueError(
            f"imprint support [{z_lo:.3g}, {z_hi:.3g}] m falls outside the grid z range"
        )

    # leading edge of the pulse (earliest t) lies furthest along +z
    t_of_z = (z_hi - z) / placement.group_velocity
    amp_ratio = probe.amplitude_at(t_of_z) / coupling.peak_rabi
    phase = np.exp(1j * (placement.geometry.dk_z * z - placement.geometry.domega * t_of_z))
    ratio_z = -amp_ratio * phase

    if grid.dims == 1:
        ratio = ratio_z
    else:
        x = grid.axes[0]
        if placement.transverse_sigma is None:
            transverse = np.ones_like(x)
        else:
            transverse = np.exp(
                -((x - placement.center_x) ** 2) / (2.0 * placement.transverse_sigma**2)
            )
        ratio = transverse[:, None] * ratio_z[None, :]

    transfer = np.abs(ratio) ** 2
    peak = transfer.max()
    if peak >= 1.0:
        raise ValueError(
            f"transfer fraction reaches {peak:.3f} >= 1; reduce the probe/coupling ratio"
        )
    psi2_values = ratio * psi1.values
    psi1_values = psi1.values * np.sqrt(1.0 - transfer)
    return ComplexField(grid, psi1_values), ComplexField(grid, psi2_values)


def transmission_estimate(alpha, column_density):
    """Beer-Lambert transmission exp(-alpha * column) through the cloud.

    ``column_density`` is the line-integrated density along the exit path
    (atoms/m^2 in 3D convention); scalar or array.
    """
    column = np.asarray(column_density, dtype=float)
    if np.any(column < 0):
        raise ValueError("column density must be non-negative")
    out = np.exp(-alpha * column)
    return float(out) if np.isscalar(column_density) else out


def calibrate_attenuation(column_density, target_transmission):
    """Attenuation coefficient such that the given column transmits target."""
    if column_density <= 0:
        raise ValueError("need a positive reference column density")
    if not 0.0 < target_transmission <= 1.0:
        raise ValueError("target transmission must lie in (0, 1]")
    return -math.log(target_transmission) / column_density
