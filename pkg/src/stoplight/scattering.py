"""Field-dependent complex scattering lengths and mean-field couplings.

The inelastic channel between the two stored states is described by the
imaginary part of the inter-species scattering length.  Its detailed
coupled-channels structure is replaced by a local polynomial around the
configured zero-crossing field B0:

    p(B) = slope * (B - B0) + curvature * (B - B0)^2
    Im a12(B) = -|p(B)|

The absolute value enforces the absorptive sign convention (Im a12 <= 0)
while keeping a single exact zero at B0.  The default slope is calibrated
so that the shipped overlap configuration decays with a 540 ms time
constant at 132.4 G; see stoplight.config.

Two-body loss convention used throughout:

    K12 = (8 * pi * hbar / m) * |Im a12|        [m^3/s]
    dn1/dt = dn2/dt = -K12 * n1 * n2            (local 3D densities)

so each inelastic event removes one atom from each component.
"""

import math
from dataclasses import dataclass

from .constants import SODIUM


@dataclass(frozen=True)
class ScatteringModel:
    """Parametrized scattering lengths over a validity window of B."""

    a11: float = 2.8e-9  # m
    a22: float = 3.4e-9  # m
    a12: float = 3.4e-9  # m
    zero_crossing_gauss: float = 132.36
    ima12_slope: float = 6.6e-12  # m per gauss, recalibrated in config
    ima12_curvature: float = 0.0  # m per gauss^2
    window_gauss: tuple = (130.0, 135.0)
    # optional linear B-dependence of the real parts, off by default
    da11_db: float = 0.0
    da22_db: float = 0.0
    da12_db: float = 0.0

    def __post_init__(self):
        lo, hi = self.window_gauss
        if not lo < hi:
            raise ValueError("scattering validity window must satisfy lo < hi")
        if not (lo <= self.zero_crossing_gauss <= hi):
            raise ValueError("zero-crossing field must lie inside the window")
        if self.ima12_slope < 0:
            raise ValueError("ima12_slope is a magnitude and must be >= 0")


@dataclass(frozen=True)
class ScatteringParams:
    """Scattering lengths evaluated at one bias field."""

    bias_field_gauss: float
    a11_re: float
    a22_re: float
    a12_re: float
    a12_im: float  # <= 0, absorptive

    def __post_init__(self):
        for name in ("a11_re", "a22_re", "a12_re"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.a12_im > 0:
            raise ValueError("a12_im must be <= 0 (absorptive convention)")


@dataclass(frozen=True)
class CouplingCoefficients:
    """Mean-field couplings derived from scattering lengths.

    g11/g22 are real, g12 is complex with Im(g12) <= 0.  In reduced
    dimensions all g carry the same dimensional-reduction factor
    (m^(d-3)); the two-body loss coefficient K12 stays the physical 3D
    rate in m^3/s.
    """

    g11: float
    g22: float
    g12: complex
    loss_k12: float
    reduction_factor: float = 1.0

    def __post_init__(self):
        if self.loss_k12 < 0:
            raise ValueError("K12 must be non-negative")
        if self.g12.imag > 0:
            raise ValueError("Im(g12) must be <= 0")


def scattering_at_field(model, bias_field_gauss):
    """Evaluate the scattering model at a bias field inside its window."""
    lo, hi = model.window_gauss
    if not (lo <= bias_field_gauss <= hi):
        raise ValueError(
            f"bias field {bias_field_gauss} G outside validity window [{lo}, {hi}] G"
        )
    delta = bias_field_gauss - model.zero_crossing_gauss
    poly = model.ima12_slope * delta + model.ima12_curvature * delta * delta
    return ScatteringParams(
        bias_field_gauss=bias_field_gauss,
        a11_re=model.a11 + model.da11_db * delta,
        a22_re=model.a22 + model.da22_db * delta,
        a12_re=model.a12 + model.da12_db * delta,
        a12_im=-abs(poly),
    )


def phase_separates(params):
    """Immiscibility criterion a11 * a22 < a12^2 (strict inequality)."""
    return params.a11_re * params.a22_re < params.a12_re**2


def loss_rate(params, constants=SODIUM):
    """Two-body loss coefficient K12 = (8 pi hbar / m) |Im a12|, in m^3/s."""
    return 8.0 * math.pi * constants.hbar / constants.atom_mass * abs(params.a12_im)


def coupling_coefficients(params, constants=SODIUM, reduction_factor=1.0):
    """Build propagator couplings from scattering lengths.

    ``reduction_factor`` folds the out-of-plane profile into the contact
    couplings for 1D/2D runs (1/(sqrt(2 pi) sigma_y) for a pancake).
    """
    if reduction_factor <= 0:
        raise ValueError("reduction_factor must be positive")
    prefactor = 4.0 * math.pi * constants.hbar**2 / constants.atom_mass
    g11 = prefactor * params.a11_re * reduction_factor
    g22 = prefactor * params.a22_re * reduction_factor
    g12 = prefactor * complex(params.a12_re, params.a12_im) * reduction_factor
    return CouplingCoefficients(
        g11=g11,
        g22=g22,
        g12=g12,
        loss_k12=loss_rate(params, constants),
        reduction_factor=reduction_factor,
    )


def pancake_reduction_factor(sigma_y):
    """2D coupling reduction 1/(sqrt(2 pi) sigma_y) for a Gaussian profile."""
    if sigma_y <= 0:
        raise ValueError("sigma_y must be positive")
    return 1.0 / (math.sqrt(2.0 * math.pi) * sigma_y)


def line_reduction_factor(sigma_x, sigma_y):
    """1D coupling reduction 1/(2 pi sigma_x sigma_y)."""
    if sigma_x <= 0 or sigma_y <= 0:
        raise ValueError("transverse widths must be positive")
    return 1.0 / (2.0 * math.pi * sigma_x * sigma_y)
