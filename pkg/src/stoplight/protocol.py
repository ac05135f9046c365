"""The full storage experiment: write, store under scheduled fields, read.

Read-out is accounting, not microscopic optics.  The fidelity chain is

    input_proxy   = photon_norm * integral |Omega_p(t)|^2 dt
    regenerated   = eta_geom * f_res * sum_z L2(z) T_exit(z) dz
    fidelity      = regenerated / input_proxy

where L2(z) is the transverse-integrated imprint density at read time,
T_exit(z) = exp(-alpha_read * column(z)) is the Beer-Lambert transmission
through the host column between z and the exit edge, eta_geom <= 1 is a
geometric conversion efficiency, and f_res is the fraction of the host
reservoir available for stimulated conversion (0 when the reservoir has
been transferred away, an exact relabeling flag).  ``photon_norm``
converts the probe pulse-energy proxy into an input photon number; it is
a calibration constant of the shipped configuration.

The regenerated pulse is mapped back to the time domain at the read-out
group velocity, which scales with the coupling intensity:
v_read = v_write * (Omega_c,read / Omega_c,write)^2.
"""

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import curve_fit

from .constants import SODIUM
from .eit import ImprintPlacement, PulseSpec, write_imprint
from .gpe import CoupledEvolver, center_of_mass, overlap_integral
from .grids import ComplexField, norm
from .potentials import TrapConfig
from .scattering import ScatteringModel, coupling_coefficients, scattering_at_field


@dataclass(frozen=True)
class WriteSettings:
    probe: PulseSpec
    coupling: PulseSpec
    placement: ImprintPlacement


@dataclass(frozen=True)
class ReadoutModel:
    """Accounting model for the revival stage."""

    coupling: PulseSpec
    conversion_efficiency: float = 1.0  # eta_geom
    attenuation_alpha: float = 0.0  # m^2, exit-path attenuation
    photon_norm: float = 1.0  # atoms per (rad/s)^2 s of pulse energy proxy
    exit_sign: int = 1  # regenerated pulse leaves toward +z

    def __post_init__(self):
        if not 0.0 <= self.conversion_efficiency <= 1.0:
            raise ValueError("conversion efficiency must lie in [0, 1]")
        if self.photon_norm <= 0:
            raise ValueError("photon_norm must be positive")
        if self.exit_sign not in (-1, 1):
            raise ValueError("exit_sign must be +1 or -1")


@dataclass(frozen=True)
class ProtocolTimeline:
    """Ordered schedule of the write / store / read phases.

    Schedules are piecewise constant: ``bias_schedule`` and
    ``gradient_schedule`` hold (start_time, value) pairs starting at t = 0;
    each value holds until the next start time or the end of storage.
    Read-out happens at the end of storage.
    """

    write: WriteSettings
    storage_duration: float
    readout: ReadoutModel
    bias_schedule: tuple = ((0.0, 132.4),)
    gradient_schedule: tuple = ((0.0, 0.0),)
    snapshot_times: tuple = ()
    # control-experiment relabeling flags: the host reservoir can be parked
    # in a spectator state before read-out and optionally brought back
    reservoir_removed: bool = False
    reservoir_restored: bool = False
    reservoir_fraction: float = 1.0

    def __post_init__(self):
        if self.storage_duration < 0:
            raise ValueError("storage duration must be >= 0")
        for name in ("bias_schedule", "gradient_schedule"):
            sched = tuple((float(t), float(v)) for t, v in getattr(self, name))
            if not sched:
                raise ValueError(f"{name} must have at least one entry")
            if sched[0][0] != 0.0:
                raise ValueError(f"{name} must start at t = 0")
            times = [t for t, _ in sched]
            if any(b <= a for a, b in zip(times, times[1:])):
                raise ValueError(f"{name} times must be strictly increasing")
            if times[-1] > self.storage_duration:
                raise ValueError(f"{name} extends past the end of storage")
            object.__setattr__(self, name, sched)
        snaps = tuple(sorted(float(t) for t in self.snapshot_times))
        if snaps and (snaps[0] < 0 or snaps[-1] > self.storage_duration):
            raise ValueError("snapshot times must lie within the storage phase")
        object.__setattr__(self, "snapshot_times", snaps)
        if not 0.0 <= self.reservoir_fraction <= 1.0:
            raise ValueError("reservoir fraction must lie in [0, 1]")

    def segments(self):
        """Contiguous (start, end, bias_gauss, gradient) spans of storage.

        Snapshot times are segment boundaries too, so requested snapshots
        land on exactly-propagated states.
        """
        edges = sorted(
            {0.0, self.storage_duration}
            | {t for t, _ in self.bias_schedule}
            | {t for t, _ in self.gradient_schedule}
            | set(self.snapshot_times)
        )
        spans = []
        for start, end in zip(edges, edges[1:]):
            bias = [v for t, v in self.bias_schedule if t <= start][-1]
            grad = [v for t, v in self.gradient_schedule if t <= start][-1]
            spans.append((start, end, bias, grad))
        return spans

    def reservoir_at_read(self):
        if self.reservoir_removed and not self.reservoir_restored:
            return 0.0
        return self.reservoir_fraction


@dataclass(frozen=True)
class ProtocolParams:
    """Numerical context shared by the protocol stages."""

    trap: TrapConfig
    scattering: ScatteringModel
    reduction_factor: float
    dt: float = 1e-6
    observable_interval: float = 5e-3
    constants: object = SODIUM


@dataclass
class SimObservables:
    """Time series sampled during storage."""

    times: np.ndarray
    n1: np.ndarray
    n2: np.ndarray
    com_z2: np.ndarray
    overlap: np.ndarray
    revival_proxy: float | None = None


@dataclass
class RevivalResult:
    regenerated_proxy: float
    input_proxy: float
    fidelity: float
    profile_times: np.ndarray
    profile_power: np.ndarray
    n2_at_read: float

    def __post_init__(self):
        if not 0.0 <= self.fidelity <= 1.0:
            raise ValueError(
                f"fidelity {self.fidelity} outside [0, 1]; photon_norm is inconsistent"
            )
        if self.regenerated_proxy > self.n2_at_read * (1.0 + 1e-12):
            raise ValueError("regenerated proxy cannot exceed the stored atom number")


@dataclass(frozen=True)
class DecayFit:
    tau: float
    tau_uncertainty: float
    amplitude: float
    residual_norm: float

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError("decay time must be positive")
        if self.tau_uncertainty < 0:
            raise ValueError("uncertainty must be >= 0")

    @property
    def non_decaying(self):
        return math.isinf(self.tau)


def run_protocol(timeline, initial_state, params):
    """Execute write -> store -> read and collect observables.

    Returns ``(observables, revival, snapshots)`` where snapshots is a list
    of ``(t, psi1, psi2)`` at the requested snapshot times.
    """
    grid = initial_state.grid
    write = timeline.write
    psi1, psi2 = write_imprint(initial_state, write.probe, write.coupling,
                               write.placement)
    input_proxy = timeline.readout.photon_norm * write.probe.energy_proxy()

    a1 = psi1.values.copy()
    a2 = psi2.values.copy()
    dt = params.dt
    times = [0.0]
    n1s = [norm(psi1)]
    n2s = [norm(psi2)]
    com0 = center_of_mass(psi2)[-1] if n2s[0] > 0 else math.nan
    coms = [com0]
    overlaps = [overlap_integral(psi1, psi2)]
    snapshots = []
    snap_queue = list(timeline.snapshot_times)
    if snap_queue and snap_queue[0] == 0.0:
        snapshots.append((0.0, psi1.copy(), psi2.copy()))
        snap_queue.pop(0)

    observe_every = max(1, int(round(params.observable_interval / dt)))

    for start, end, bias, gradient in timeline.segments():
        seg_steps = int(round((end - start) / dt))
        if seg_steps == 0:
            continue
        scat = scattering_at_field(params.scattering, bias)
        couplings = coupling_coefficients(scat, params.constants,
                                          params.reduction_factor)
        trap = replace(params.trap, gradient_gauss_per_m=gradient)
        v1, v2 = trap.potentials(grid, params.constants)
        evolver = CoupledEvolver(grid, v1, v2, couplings, dt, params.constants)

        def observer(step, b1, b2, _start=start):
            t = _start + step * dt
            f1 = ComplexField(grid, b1)
            f2 = ComplexField(grid, b2)
            n2 = norm(f2)
            times.append(t)
            n1s.append(norm(f1))
            n2s.append(n2)
            coms.append(center_of_mass(f2)[-1] if n2 > 0 else math.nan)
            overlaps.append(overlap_integral(f1, f2))
            while snap_queue and snap_queue[0] <= t + 0.5 * dt:
                snapshots.append((snap_queue.pop(0), f1.copy(), f2.copy()))

        evolver.run(a1, a2, seg_steps, observer=observer,
                    observe_every=observe_every)

    psi1 = ComplexField(grid, a1)
    psi2 = ComplexField(grid, a2)
    revival = read_out(
        psi1, psi2, timeline.readout, input_proxy,
        write_coupling=write.coupling,
        write_group_velocity=write.placement.group_velocity,
        reservoir_fraction=timeline.reservoir_at_read(),
        reduction_factor=params.reduction_factor,
    )
    observables = SimObservables(
        times=np.asarray(times),
        n1=np.asarray(n1s),
        n2=np.asarray(n2s),
        com_z2=np.asarray(coms),
        overlap=np.asarray(overlaps),
        revival_proxy=revival.regenerated_proxy,
    )
    return observables, revival, snapshots


def read_out(psi1, psi2, readout, input_proxy, write_coupling,
             write_group_velocity, reservoir_fraction=1.0,
             reduction_factor=1.0):
    """Convert the stored imprint back into a probe-pulse proxy.

    See the module docstring for the accounting model.  The temporal
    profile maps the imprint's z profile to time at the read-out group
    velocity; its integral equals the regenerated proxy.
    """
    if readout.coupling.peak_rabi <= 0:
        raise ValueError("read-out requires a non-zero coupling field")
    grid = psi2.grid
    dz = grid.spacing[-1]
    z = grid.z_axis
    n2_read = norm(psi2)

    # transverse-integrated line densities along z
    if grid.dims == 1:
        line2 = psi2.density()
        host = psi1.density()
    else:
        dx = grid.spacing[0]
        line2 = psi2.density().sum(axis=0) * dx
        if n2_read > 0:
            ix = int(np.argmin(np.abs(grid.axes[0] - center_of_mass(psi2)[0])))
        else:
            ix = grid.points[0] // 2
        host = psi1.density()[ix, :]

    # host column between each z and the exit edge, in 3D units
    ahead = np.cumsum(host[::-1])[::-1] - host
    if readout.exit_sign < 0:
        ahead = np.cumsum(host) - host
    column = ahead * dz * reduction_factor
    t_exit = np.exp(-readout.attenuation_alpha * column)

    eta = readout.conversion_efficiency * reservoir_fraction
    regenerated = eta * float((line2 * t_exit).sum()) * dz

    velocity_ratio = (readout.coupling.peak_rabi / write_coupling.peak_rabi) ** 2
    v_read = write_group_velocity * velocity_ratio
    exit_edge = z[-1] if readout.exit_sign > 0 else z[0]
    profile_t = np.abs(exit_edge - z) / v_read
    order = np.argsort(profile_t)
    profile_power = eta * line2 * t_exit * v_read
    result = RevivalResult(
        regenerated_proxy=regenerated,
        input_proxy=input_proxy,
        fidelity=regenerated / input_proxy,
        profile_times=profile_t[order],
        profile_power=profile_power[order],
        n2_at_read=n2_read,
    )
    return result


def central_column(field, reduction_factor=1.0):
    """Line-integrated 3D density along z through the transverse centre.

    This is the column the probe traverses through the whole cloud; it
    anchors the Beer-Lambert attenuation calibrations.
    """
    grid = field.grid
    density = field.density()
    if grid.dims == 2:
        ix = int(np.argmin(np.abs(grid.axes[0])))
        density = density[ix, :]
    return float(density.sum()) * grid.spacing[-1] * reduction_factor


def fit_exponential_decay(times, values, skip_before=0.0):
    """Fit N(t) = A exp(-t / tau) to a time series.

    Log-linear least squares seeds a nonlinear refinement; non-positive
    samples are excluded with a warning.  A non-decaying series yields the
    tau = inf sentinel.
    """
    t = np.asarray(times, dtype=float)
    n = np.asarray(values, dtype=float)
    if t.shape != n.shape:
        raise ValueError("times and values must have matching shapes")
    keep = t >= skip_before
    t, n = t[keep], n[keep]
    positive = n > 0
    if not positive.all():
        warnings.warn(
            f"excluding {int((~positive).sum())} non-positive samples from decay fit",
            stacklevel=2,
        )
        t, n = t[positive], n[positive]
    if t.size < 3:
        raise ValueError("need at least 3 positive samples after the skip window")

    slope, intercept = np.polyfit(t, np.log(n), 1)
    span = t.max() - t.min()
    if slope >= 0 or -slope * span < 1e-9:  # flat to within float noise

        amplitude = float(np.exp(intercept))
        resid = float(np.sqrt(np.mean((amplitude * np.exp(slope * t) - n) ** 2)))
        return DecayFit(tau=math.inf, tau_uncertainty=math.inf,
                        amplitude=amplitude, residual_norm=resid)

    tau0 = -1.0 / slope
    a0 = math.exp(intercept)
    try:
        popt, pcov = curve_fit(
            lambda tt, a, tau: a * np.exp(-tt / tau), t, n,
            p0=(a0, tau0), maxfev=10000,
        )
        a_fit, tau_fit = popt
        tau_err = float(math.sqrt(max(pcov[1, 1], 0.0)))
    except RuntimeError:
        a_fit, tau_fit = a0, tau0
        residuals = np.log(n) - (intercept + slope * t)
        var_slope = residuals.var(ddof=2) / ((t - t.mean()) ** 2).sum()
        tau_err = float(math.sqrt(var_slope) / slope**2)
    resid = float(np.sqrt(np.mean((a_fit * np.exp(-t / tau_fit) - n) ** 2)))
    return DecayFit(tau=float(tau_fit), tau_uncertainty=tau_err,
                    amplitude=float(a_fit), residual_norm=resid)


def storage_decay_series(timeline, initial_state, params):
    """Run the storage phase and return the (t, N2) series for fitting."""
    observables, _, _ = run_protocol(timeline, initial_state, params)
    return observables.times, observables.n2


def _sweep_worker(args):
    bias, timeline, initial_state, params, skip_before = args
    swept = replace(timeline, bias_schedule=((0.0, bias),))
    times, n2 = storage_decay_series(swept, initial_state, params)
    return bias, fit_exponential_decay(times, n2, skip_before=skip_before)


def sweep_bias_field(bias_values, timeline, initial_state, params,
                     skip_before=0.0, jobs=1):
    """Storage-decay fits across bias fields; rows sorted by field.

    Each field value runs an independent storage simulation (the ground
    state is field-independent because the real scattering lengths are).
    """
    bias_values = [float(b) for b in bias_values]
    if len(bias_values) < 2:
        raise ValueError("a bias sweep needs at least 2 field values")
    lo, hi = params.scattering.window_gauss
    for b in bias_values:
        if not lo <= b <= hi:
            raise ValueError(f"bias {b} G outside the scattering window [{lo}, {hi}] G")
    work = [(b, timeline, initial_state, params, skip_before) for b in bias_values]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_worker, work))
    else:
        rows = [_sweep_worker(item) for item in work]
    return sorted(rows, key=lambda row: row[0])


def argmax_decay_field(rows):
    """Field value with the largest fitted decay time."""
    return max(rows, key=lambda row: row[1].tau)[0]


def control_without_reservoir(timeline, initial_state, params, restored=False):
    """Control experiment: host reservoir parked in a spectator state.

    With ``restored=False`` no stimulated conversion is possible and the
    regenerated proxy is exactly zero; with ``restored=True`` the
    relabeling round trip reproduces the unflagged run bit for bit.
    """
    flagged = replace(timeline, reservoir_removed=True,
                      reservoir_restored=restored)
    return run_protocol(flagged, initial_state, params)
