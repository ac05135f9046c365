"""Run configuration: strict, unit-suffixed, typo-rejecting.

The format is INI with one rule added: every dimensional value carries an
explicit unit, either as a suffix in the value ("132.4 G", "3 us") or
baked into the key name ("a11_nm = 2.8").  Dimensionless quantities
(counts, fractions, flags) are plain.  Unknown sections or keys are hard
errors so a typo can never silently fall back to a default.

``default_config()`` reproduces the published experiment: the sodium
pancake condensate, the 4/8/12 MHz pulses, the 132.4 G working point, the
200 mG/cm steering gradient.  Calibration constants (the loss-model slope,
the photon normalization) are frozen here; see the keys' comments in
``data/default.cfg``.
"""

import configparser
import io
import math
from dataclasses import dataclass
from importlib import resources

from .constants import BOHR_MAGNETON_PER_GAUSS, SODIUM
from .eit import BeamGeometry, ImprintPlacement, PulseSpec
from .grids import Grid
from .potentials import DipoleBeams, TrapConfig
from .protocol import ProtocolParams, ProtocolTimeline, ReadoutModel, WriteSettings
from .scattering import ScatteringModel, line_reduction_factor, pancake_reduction_factor
from .units import UnitError, parse_quantity, parse_rabi


class ConfigError(ValueError):
    """Configuration file is malformed; message names the offending key."""


# value kinds: how to turn the raw string into a number
#   quantity  -> unit-suffixed value, optional allowed-unit restriction
#   rabi      -> frequency suffix, returned as angular rad/s
#   unit_in_key -> bare float, unit documented by the key name
#   float/int/bool/str -> plain
_SCHEMA = {
    "grid": {
        "dims": ("int",),
        "extent_x": ("quantity", ("m", "mm", "um", "µm")),
        "extent_z": ("quantity", ("m", "mm", "um", "µm")),
        "points_x": ("int",),
        "points_z": ("int",),
    },
    "trap": {
        "frequency_x": ("quantity", ("Hz", "kHz")),
        "frequency_z": ("quantity", ("Hz", "kHz")),
        "atom_number": ("float",),
        "thickness_y": ("quantity", ("m", "um", "µm")),
        "mu2_bohr_magnetons": ("float",),
        "asymmetry_x_hz_per_um": ("float",),
        "use_dipole_beams": ("bool",),
        "beam_power": ("quantity", ("W", "mW")),
        "beam_waist": ("quantity", ("m", "um", "µm")),
        "beam_wavelength": ("quantity", ("m", "nm")),
    },
    "scattering": {
        "a11_nm": ("unit_in_key",),
        "a22_nm": ("unit_in_key",),
        "a12_nm": ("unit_in_key",),
        "b0_gauss": ("unit_in_key",),
        "ima12_slope_nm_per_gauss": ("unit_in_key",),
        "ima12_curv": ("unit_in_key",),  # nm per gauss^2
        "window_min": ("quantity", ("G", "mG", "T")),
        "window_max": ("quantity", ("G", "mG", "T")),
    },
    "pulses": {
        "probe_rabi_mhz": ("unit_in_key",),
        "coupling_rabi_mhz": ("unit_in_key",),
        "read_coupling_rabi_mhz": ("unit_in_key",),
        "probe_duration_us": ("unit_in_key",),
        "envelope": ("str", ("gaussian", "raised_cosine", "square")),
        "placement_z_um": ("unit_in_key",),
        "transverse_sigma": ("quantity_or_none", ("m", "um", "µm")),
        "group_velocity": ("quantity", ("m/s",)),
        "beam_dk_rad_per_m": ("unit_in_key",),
        "eta_geom": ("float",),
        "photon_norm": ("float",),
        "readout_transmission_full_column": ("float",),
        "probe_transmission_full_column": ("float",),
    },
    "timeline": {
        "storage": ("quantity", ("s", "ms", "us", "µs")),
        "bias_field": ("quantity", ("G", "mG", "T")),
        "gradient": ("quantity", ("G/m", "G/cm", "mG/cm", "T/m")),
        "dt": ("quantity", ("s", "ms", "us", "µs")),
        "observable_interval": ("quantity", ("s", "ms", "us", "µs")),
    },
    "output": {
        "directory": ("str", None),
        "snapshot_every": ("quantity_or_none", ("s", "ms", "us", "µs")),
        "ground_state_tolerance": ("float",),
    },
}


@dataclass(frozen=True)
class RunConfig:
    """Parsed and validated configuration plus its canonical text."""

    values: dict
    canonical_text: str

    def __getitem__(self, section_key):
        section, key = section_key
        return self.values[section][key]

    # --- builders for the domain objects --------------------------------

    def grid(self):
        v = self.values["grid"]
        if v["dims"] == 1:
            return Grid(extents=(v["extent_z"],), points=(v["points_z"],))
        return Grid(extents=(v["extent_x"], v["extent_z"]),
                    points=(v["points_x"], v["points_z"]))

    def sigma_y(self):
        # out-of-plane gaussian width matched to the pancake thickness
        return self.values["trap"]["thickness_y"] / 4.0

    def reduction_factor(self):
        if self.values["grid"]["dims"] == 1:
            # symmetric transverse profile with the pancake width
            sigma = self.sigma_y()
            return line_reduction_factor(sigma, sigma)
        return pancake_reduction_factor(self.sigma_y())

    def trap(self, gradient_gauss_per_m=0.0):
        v = self.values["trap"]
        mu2 = v["mu2_bohr_magnetons"] * BOHR_MAGNETON_PER_GAUSS
        slope = v["asymmetry_x_hz_per_um"] * 2 * math.pi * SODIUM.hbar / 1e-6
        if v["use_dipole_beams"]:
            return TrapConfig(
                dipole=DipoleBeams(power=v["beam_power"], waist=v["beam_waist"],
                                   wavelength=v["beam_wavelength"]),
                gradient_gauss_per_m=gradient_gauss_per_m,
                mu2=mu2, asymmetry_slope_x=slope,
            )
        omega_x = 2 * math.pi * v["frequency_x"]
        omega_z = 2 * math.pi * v["frequency_z"]
        freqs = (omega_z,) if self.values["grid"]["dims"] == 1 else (omega_x, omega_z)
        return TrapConfig(frequencies=freqs, gradient_gauss_per_m=gradient_gauss_per_m,
                          mu2=mu2, asymmetry_slope_x=slope)

    def atom_number(self):
        return self.values["trap"]["atom_number"]

    def scattering_model(self):
        v = self.values["scattering"]
        return ScatteringModel(
            a11=v["a11_nm"] * 1e-9,
            a22=v["a22_nm"] * 1e-9,
            a12=v["a12_nm"] * 1e-9,
            zero_crossing_gauss=v["b0_gauss"],
            ima12_slope=v["ima12_slope_nm_per_gauss"] * 1e-9,
            ima12_curvature=v["ima12_curv"] * 1e-9,
            window_gauss=(v["window_min"], v["window_max"]),
        )

    def beam_geometry(self):
        return BeamGeometry(dk=(0.0, 0.0, self.values["pulses"]["beam_dk_rad_per_m"]))

    def write_settings(self):
        v = self.values["pulses"]
        probe = PulseSpec(peak_rabi=2 * math.pi * v["probe_rabi_mhz"] * 1e6,
                          duration=v["probe_duration_us"] * 1e-6,
                          envelope=v["envelope"])
        coupling = PulseSpec(peak_rabi=2 * math.pi * v["coupling_rabi_mhz"] * 1e6,
                             duration=v["probe_duration_us"] * 1e-6,
                             envelope=v["envelope"])
        placement = ImprintPlacement(
            center_z=v["placement_z_um"] * 1e-6,
            group_velocity=v["group_velocity"],
            transverse_sigma=v["transverse_sigma"],
            geometry=self.beam_geometry(),
        )
        return WriteSettings(probe=probe, coupling=coupling, placement=placement)

    def readout_model(self, attenuation_alpha):
        v = self.values["pulses"]
        coupling = PulseSpec(
            peak_rabi=2 * math.pi * v["read_coupling_rabi_mhz"] * 1e6,
            duration=v["probe_duration_us"] * 1e-6,
            envelope=v["envelope"],
        )
        return ReadoutModel(
            coupling=coupling,
            conversion_efficiency=v["eta_geom"],
            attenuation_alpha=attenuation_alpha,
            photon_norm=v["photon_norm"],
        )

    def timeline(self, readout, storage=None, bias=None, gradient=None,
                 snapshot_times=()):
        v = self.values["timeline"]
        return ProtocolTimeline(
            write=self.write_settings(),
            storage_duration=v["storage"] if storage is None else storage,
            readout=readout,
            bias_schedule=((0.0, v["bias_field"] if bias is None else bias),),
            gradient_schedule=((0.0, v["gradient"] if gradient is None else gradient),),
            snapshot_times=snapshot_times,
        )

    def protocol_params(self):
        v = self.values["timeline"]
        return ProtocolParams(
            trap=self.trap(),
            scattering=self.scattering_model(),
            reduction_factor=self.reduction_factor(),
            dt=v["dt"],
            observable_interval=v["observable_interval"],
        )


def _parse_value(section, key, raw, kind):
    tag = f"[{section}] {key}"
    try:
        if kind[0] == "quantity":
            return parse_quantity(raw, expect=kind[1])
        if kind[0] == "quantity_or_none":
            if raw.strip().lower() in ("none", "off"):
                return None
            return parse_quantity(raw, expect=kind[1])
        if kind[0] == "rabi":
            return parse_rabi(raw)
        if kind[0] == "unit_in_key":
            return float(raw)
        if kind[0] == "float":
            return float(raw)
        if kind[0] == "int":
            return int(raw)
        if kind[0] == "bool":
            lowered = raw.strip().lower()
            if lowered in ("true", "yes", "1", "on"):
                return True
            if lowered in ("false", "no", "0", "off"):
                return False
            raise ConfigError(f"{tag}: expected a boolean, got {raw!r}")
        if kind[0] == "str":
            value = raw.strip()
            if kind[1] is not None and value not in kind[1]:
                raise ConfigError(f"{tag}: {value!r} not one of {kind[1]}")
            return value
    except UnitError as err:
        raise ConfigError(f"{tag}: {err}") from None
    except ValueError as err:
        if isinstance(err, ConfigError):
            raise
        raise ConfigError(f"{tag}: {err}") from None
    raise ConfigError(f"{tag}: unhandled kind {kind!r}")


def _default_text():
    return resources.files("stoplight").joinpath("data/default.cfg").read_text()


def parse_config(path=None, text=None):
    """Load, validate, and normalize a configuration.

    Unset keys fall back to the shipped defaults; unknown sections or keys
    raise :class:`ConfigError` naming the offender.
    """
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.read_string(_default_text(), source="default.cfg")
    if text is not None:
        user = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        try:
            user.read_string(text, source=str(path or "<config>"))
        except configparser.Error as err:
            raise ConfigError(f"cannot parse config: {err}") from None
    elif path is not None:
        user = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        try:
            with open(path) as fh:
                user.read_string(fh.read(), source=str(path))
        except OSError as err:
            raise ConfigError(f"cannot read config {path}: {err}") from None
        except configparser.Error as err:
            raise ConfigError(f"cannot parse config: {err}") from None
    else:
        user = None

    if user is not None:
        for section in user.sections():
            if section not in _SCHEMA:
                raise ConfigError(f"unknown config section [{section}]")
            for key in user[section]:
                if key not in _SCHEMA[section]:
                    raise ConfigError(f"unknown key {key!r} in section [{section}]")
                parser[section][key] = user[section][key]

    values = {}
    for section, keys in _SCHEMA.items():
        if not parser.has_section(section):
            raise ConfigError(f"missing config section [{section}]")
        for key in parser[section]:
            if key not in keys:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
        values[section] = {
            key: _parse_value(section, key, parser[section][key], kind)
            for key, kind in keys.items()
        }

    if values["grid"]["dims"] not in (1, 2):
        raise ConfigError("[grid] dims: must be 1 or 2")

    canonical = io.StringIO()
    for section in sorted(values):
        canonical.write(f"[{section}]\n")
        for key in sorted(values[section]):
            canonical.write(f"{key} = {values[section][key]!r}\n")
    return RunConfig(values=values, canonical_text=canonical.getvalue())


def default_config():
    return parse_config()
