"""Slow-light pulse storage in a two-component condensate, on a desk.

The package is organized as a small numpy/scipy library:

* :mod:`stoplight.constants`, :mod:`stoplight.units` -- SI constants and
  unit-suffixed configuration values.
* :mod:`stoplight.grids` -- periodic grids, matter fields, FFT plumbing.
* :mod:`stoplight.scattering` -- field-dependent complex scattering
  lengths, mean-field couplings, the immiscibility predicate.
* :mod:`stoplight.eit` -- dark-state optics: slow light numbers, pulse
  specs, the write-in imprint, Beer-Lambert transmission.
* :mod:`stoplight.potentials`, :mod:`stoplight.gpe` -- trap/gradient
  potentials and the coupled split-step propagator with two-body loss.
* :mod:`stoplight.protocol` -- the write/store/steer/read experiment,
  decay-time fits, bias-field sweeps, revival fidelity.
* :mod:`stoplight.config`, :mod:`stoplight.cli` -- run configuration and
  the command-line front end.
"""

from .constants import SODIUM, PhysicalConstants
from .grids import ComplexField, Grid, forward_spectral, inverse_spectral, make_grid, norm
from .scattering import (
    CouplingCoefficients,
    ScatteringModel,
    ScatteringParams,
    coupling_coefficients,
    loss_rate,
    phase_separates,
    scattering_at_field,
)
from .eit import (
    BeamGeometry,
    ImprintPlacement,
    PulseSpec,
    SlowLightParams,
    compression_from_group_velocity,
    dark_state_ratio,
    group_velocity_from_compression,
    transmission_estimate,
    write_imprint,
)
from .potentials import DipoleBeams, TrapConfig, add_gradient
from .gpe import (
    ConvergenceError,
    CoupledEvolver,
    EvolutionConfig,
    NumericsError,
    center_of_mass,
    evolve_step,
    ground_state,
    overlap_integral,
    total_energy,
)

__version__ = "0.1.0"
