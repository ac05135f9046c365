"""Coupled two-component mean-field propagator.

Real-time evolution integrates

    i hbar d(psi1)/dt = [-hbar^2 lap / 2m + V1 + g11 |psi1|^2 + g12 |psi2|^2] psi1
    i hbar d(psi2)/dt = [-hbar^2 lap / 2m + V2 + g22 |psi2|^2 + g12 |psi1|^2] psi2

with one complex coupling g12 shared symmetrically by both equations, so
Im(g12) < 0 drains atoms from both components wherever they overlap:

    d(n1)/dt = d(n2)/dt = -K12 n1 n2,   K12 = 2 |Im g12| / hbar.

The integrator is the symmetric split-step (Strang) method: potential
half-step, spectral kinetic step, potential half-step.  Adjacent potential
half-steps between observations are merged into full steps, which is
algebraically identical because both act on the same density.  Imaginary
time reuses the same machinery with t -> -i tau plus renormalization and
is used for ground states.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.fft as _fft

from .constants import SODIUM
from .grids import ComplexField, norm

STABILITY_SAFETY = 0.5


class NumericsError(RuntimeError):
    """Propagation produced non-finite amplitudes."""

    def __init__(self, step, max_abs):
        self.step = step
        self.max_abs = max_abs
        super().__init__(
            f"non-finite field at step {step} (max finite |psi| = {max_abs:.3e})"
        )


class ConvergenceError(RuntimeError):
    """Imaginary-time relaxation failed to reach tolerance."""


@dataclass(frozen=True)
class EvolutionConfig:
    """Time-stepping parameters for a propagation segment."""

    dt: float
    duration: float
    snapshot_interval: float | None = None
    reduction_factor: float = 1.0
    include_kinetic: bool = True

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("time step must be positive")
        if self.duration < 0:
            raise ValueError("duration must be non-negative")
        if self.snapshot_interval is not None and self.snapshot_interval <= 0:
            raise ValueError("snapshot interval must be positive")

    def n_steps(self):
        return max(1, int(round(self.duration / self.dt))) if self.duration > 0 else 0

    def observe_every(self):
        if self.snapshot_interval is None:
            return None
        return max(1, int(round(self.snapshot_interval / self.dt)))


def check_time_step(grid, dt, constants=SODIUM):
    """Warn when dt exceeds the split-step accuracy heuristic."""
    dx = min(grid.spacing)
    bound = STABILITY_SAFETY * constants.atom_mass * dx * dx / constants.hbar
    if abs(dt) > bound:
        warnings.warn(
            f"dt = {dt:.3g} s exceeds the accuracy heuristic {bound:.3g} s "
            f"for spacing {dx:.3g} m; results may be under-resolved",
            stacklevel=3,
        )


class CoupledEvolver:
    """Split-step integrator bound to one grid, potential pair and dt.

    Instances precompute the kinetic phase factors; they hold no field
    state, so one evolver can drive many independent simulations.
    """

    def __init__(self, grid, v1, v2, couplings, dt, constants=SODIUM,
                 include_kinetic=True, imaginary=False):
        check_time_step(grid, dt, constants)
        self.grid = grid
        self.couplings = couplings
        self.dt = dt
        self.constants = constants
        self.imaginary = imaginary
        hbar = constants.hbar
        self._v1 = np.asarray(v1, dtype=float)
        self._v2 = np.asarray(v2, dtype=float)
        if self._v1.shape != grid.points or self._v2.shape != grid.points:
            raise ValueError("potential arrays must match the grid shape")
        self._skip_kinetic = not include_kinetic
        kinetic = hbar * grid.k_squared / (2.0 * constants.atom_mass)
        if imaginary:
            self._kinetic_factor = np.exp(-kinetic * dt)
        else:
            self._kinetic_factor = np.exp(-1j * kinetic * dt)
        # nonlinear coefficients divided by hbar, ready for the exponent
        self._g11 = couplings.g11 / hbar
        self._g22 = couplings.g22 / hbar
        self._g12r = couplings.g12.real / hbar
        # Im(g12) <= 0; positive decay rate per unit partner density
        self._gamma = -couplings.g12.imag / hbar

    def _potential_factor_pair(self, a1, a2, h):
        n1 = a1.real * a1.real + a1.imag * a1.imag
        n2 = a2.real * a2.real + a2.imag * a2.imag
        u1 = self._v1 / self.constants.hbar + self._g11 * n1 + self._g12r * n2
        u2 = self._v2 / self.constants.hbar + self._g22 * n2 + self._g12r * n1
        if self.imaginary:
            return np.exp(-u1 * h), np.exp(-u2 * h)
        if self._gamma != 0.0:
            f1 = np.exp(-h * self._gamma * n2 - 1j * h * u1)
            f2 = np.exp(-h * self._gamma * n1 - 1j * h * u2)
        else:
            f1 = np.exp(-1j * h * u1)
            f2 = np.exp(-1j * h * u2)
        return f1, f2

    def _apply_potential(self, a1, a2, h):
        f1, f2 = self._potential_factor_pair(a1, a2, h)
        a1 *= f1
        a2 *= f2

    def _apply_kinetic(self, a1, a2):
        if self._skip_kinetic:
            return
        a1[...] = _fft.ifftn(_fft.fftn(a1) * self._kinetic_factor)
        a2[...] = _fft.ifftn(_fft.fftn(a2) * self._kinetic_factor)

    def _check_finite(self, a1, a2, step):
        if not (np.isfinite(a1).all() and np.isfinite(a2).all()):
            mags = np.abs(np.concatenate([a1.ravel(), a2.ravel()]))
            finite = mags[np.isfinite(mags)]
            raise NumericsError(step, finite.max() if finite.size else math.nan)

    def step(self, a1, a2, step_index=0):
        """One full Strang step in place on raw arrays."""
        h = 0.5 * self.dt
        self._apply_potential(a1, a2, h)
        self._apply_kinetic(a1, a2)
        self._apply_potential(a1, a2, h)
        self._check_finite(a1, a2, step_index)

    def run(self, a1, a2, n_steps, observer=None, observe_every=None):
        """Advance ``n_steps`` in place, merging interior half-steps.

        ``observer(step_index, a1, a2)`` is called on properly closed
        states (after a trailing half potential step), so densities seen by
        the observer match plain repeated :meth:`step` calls exactly.
        """
        if n_steps <= 0:
            return
        h = 0.5 * self.dt
        self._apply_potential(a1, a2, h)
        for i in range(1, n_steps + 1):
            self._apply_kinetic(a1, a2)
            at_boundary = (
                i == n_steps
                or (observe_every is not None and i % observe_every == 0)
            )
            if at_boundary:
                self._apply_potential(a1, a2, h)
                self._check_finite(a1, a2, i)
                if observer is not None:
                    observer(i, a1, a2)
                if i < n_steps:
                    self._apply_potential(a1, a2, h)
            else:
                self._apply_potential(a1, a2, self.dt)
                self._check_finite(a1, a2, i)


def evolve_step(psi1, psi2, v1, v2, couplings, dt, constants=SODIUM,
                include_kinetic=True):
    """One split step on :class:`ComplexField` inputs; returns new fields."""
    if psi1.grid is not psi2.grid and psi1.grid != psi2.grid:
        raise ValueError("fields must share a grid")
    evolver = CoupledEvolver(psi1.grid, v1, v2, couplings, dt, constants,
                             include_kinetic=include_kinetic)
    a1 = psi1.values.copy()
    a2 = psi2.values.copy()
    evolver.step(a1, a2)
    return ComplexField(psi1.grid, a1), ComplexField(psi2.grid, a2)


def total_energy(psi1, psi2, v1, v2, couplings, constants=SODIUM):
    """Mean-field energy functional (real interaction parts only), in J."""
    grid = psi1.grid
    dv = grid.cell_volume
    hbar = constants.hbar
    kin_scale = hbar * hbar / (2.0 * constants.atom_mass)
    energy = 0.0
    for field in (psi1, psi2):
        coeff = _fft.fftn(field.values)
        energy += kin_scale * float(
            (grid.k_squared * (coeff.real**2 + coeff.imag**2)).sum()
        ) * dv / grid.size
    n1 = psi1.density()
    n2 = psi2.density()
    energy += float((np.asarray(v1) * n1 + np.asarray(v2) * n2).sum()) * dv
    energy += float(
        (0.5 * couplings.g11 * n1 * n1
         + 0.5 * couplings.g22 * n2 * n2
         + couplings.g12.real * n1 * n2).sum()
    ) * dv
    return energy


def single_component_energy(psi, v, g, constants=SODIUM):
    """Energy of one component alone (kinetic + potential + self-interaction)."""
    grid = psi.grid
    dv = grid.cell_volume
    kin_scale = constants.hbar**2 / (2.0 * constants.atom_mass)
    coeff = _fft.fftn(psi.values)
    kinetic = kin_scale * float(
        (grid.k_squared * (coeff.real**2 + coeff.imag**2)).sum()
    ) * dv / grid.size
    n = psi.density()
    return kinetic + float((np.asarray(v) * n).sum()) * dv \
        + 0.5 * g * float((n * n).sum()) * dv


def ground_state(grid, trap, couplings, atom_number, constants=SODIUM,
                 dtau=None, tolerance=1e-10, max_iterations=200_000,
                 convergence_log=None):
    """Relax the host component to its ground state in imaginary time.

    Renormalizes to ``atom_number`` after every step and stops when the
    relative energy change per step drops below ``tolerance``.  A second
    stage repeats the relaxation with dtau/8 to shrink the splitting bias.
    ``convergence_log``, if given, receives (iteration, energy, rel_change)
    tuples.

    Imaginary parts of the couplings are ignored: only g11 matters for a
    single-component ground state.
    """
    v1 = np.asarray(trap.potentials(grid, constants)[0], dtype=float)
    g11 = couplings.g11
    hbar = constants.hbar

    if dtau is None:
        # resolve both the trap scale and the mean-field scale
        v_span = float(v1.max() - v1.min())
        mu_guess = _thomas_fermi_mu(v1, g11, atom_number, grid) if g11 > 0 else 0.0
        scale = max(v_span, mu_guess, hbar / 1.0)
        dtau = 0.1 * hbar / scale

    psi = _initial_ansatz(grid, v1, g11, atom_number)
    kinetic = hbar * grid.k_squared / (2.0 * constants.atom_mass)

    iteration = 0
    for stage_dtau in (dtau, dtau / 8.0):
        kin_factor = np.exp(-kinetic * stage_dtau)
        energy = single_component_energy(ComplexField(grid, psi), v1, g11, constants)
        converged = False
        while iteration < max_iterations:
            iteration += 1
            n = psi.real * psi.real + psi.imag * psi.imag
            u = (v1 + g11 * n) / hbar
            half = np.exp(-0.5 * stage_dtau * u)
            psi = half * psi
            psi = _fft.ifftn(_fft.fftn(psi) * kin_factor)
            n = psi.real * psi.real + psi.imag * psi.imag
            u = (v1 + g11 * n) / hbar
            psi = np.exp(-0.5 * stage_dtau * u) * psi
            total = float((psi.real**2 + psi.imag**2).sum()) * grid.cell_volume
            psi *= math.sqrt(atom_number / total)
            new_energy = single_component_energy(
                ComplexField(grid, psi), v1, g11, constants
            )
            rel = abs(new_energy - energy) / max(abs(new_energy), 1e-300)
            if convergence_log is not None:
                convergence_log.append((iteration, new_energy, rel))
            energy = new_energy
            if rel < tolerance:
                converged = True
                break
        if not converged:
            raise ConvergenceError(
                f"ground state not converged after {iteration} iterations "
                f"(last relative energy change {rel:.3e}, tolerance {tolerance:.3e})"
            )
    return ComplexField(grid, psi.astype(np.complex128))


def _thomas_fermi_mu(v, g, atom_number, grid):
    """Chemical potential solving the Thomas-Fermi normalization on the grid."""
    dv = grid.cell_volume
    lo = float(v.min())
    hi = float(v.min()) + 2.0 * (float(v.max()) - float(v.min())) + 1e-30
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        n_total = float(np.clip(mid - v, 0.0, None).sum()) * dv / g
        if n_total < atom_number:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _initial_ansatz(grid, v, g, atom_number):
    if g > 0:
        mu = _thomas_fermi_mu(v, g, atom_number, grid)
        n = np.clip(mu - v, 0.0, None) / g
        psi = np.sqrt(n + 1e-12 * n.max())
    else:
        span = float(v.max() - v.min())
        psi = np.exp(-(v - v.min()) / (0.1 * span + 1e-300))
    psi = psi.astype(np.complex128)
    total = float((psi.real**2 + psi.imag**2).sum()) * grid.cell_volume
    return psi * math.sqrt(atom_number / total)


def center_of_mass(field):
    """Density-weighted mean position; vector of length grid.dims."""
    n = field.density()
    total = n.sum()
    if total <= 0:
        raise ValueError("center of mass undefined for a zero field")
    return np.array([float((mesh * n).sum() / total) for mesh in field.grid.meshes])


def overlap_integral(field_a, field_b):
    """Density overlap integral of two components, in atoms^2 / m^d."""
    if field_a.grid != field_b.grid:
        raise ValueError("fields must share a grid")
    return float((field_a.density() * field_b.density()).sum()) \
        * field_a.grid.cell_volume


def width_at_fraction(field, fraction, axis=-1):
    """Full width along one axis where the marginal density exceeds
    ``fraction`` of its maximum."""
    n = field.density()
    if field.grid.dims == 2:
        marg = n.sum(axis=0) if axis in (-1, 1) else n.sum(axis=1)
        coords = field.grid.axes[1] if axis in (-1, 1) else field.grid.axes[0]
    else:
        marg = n
        coords = field.grid.axes[0]
    threshold = fraction * marg.max()
    above = np.nonzero(marg > threshold)[0]
    if above.size == 0:
        return 0.0
    dx = coords[1] - coords[0]
    return float(coords[above[-1]] - coords[above[0]] + dx)
