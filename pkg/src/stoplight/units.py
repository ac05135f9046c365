"""Unit-suffixed quantity parsing for configuration values.

Internally everything is SI; config files write physical values with an
explicit unit suffix ("132.4 G", "3 us", "200 mG/cm").  A bare number is
rejected for dimensional quantities so that magnitude bugs cannot slip in
silently.  Frequencies parse to Hz (cycles per second); callers that need
an angular frequency multiply by 2*pi at their own boundary.
"""

import math
import re

# suffix -> factor converting the stated unit to SI
_UNIT_FACTORS = {
    # length
    "m": 1.0,
    "cm": 1e-2,
    "mm": 1e-3,
    "um": 1e-6,
    "µm": 1e-6,
    "nm": 1e-9,
    "pm": 1e-12,
    # time
    "s": 1.0,
    "ms": 1e-3,
    "us": 1e-6,
    "µs": 1e-6,
    "ns": 1e-9,
    # magnetic field (internal unit for fields is gauss, not tesla)
    "G": 1.0,
    "mG": 1e-3,
    "T": 1e4,
    # field gradient, to gauss per metre
    "G/m": 1.0,
    "G/cm": 1e2,
    "mG/cm": 1e-1,
    "T/m": 1e4,
    # frequency, to Hz
    "Hz": 1.0,
    "kHz": 1e3,
    "MHz": 1e6,
    "GHz": 1e9,
    # power
    "W": 1.0,
    "mW": 1e-3,
    # velocity
    "m/s": 1.0,
    # scattering-length slope
    "nm/G": 1e-9,
    "pm/G": 1e-12,
}

_QUANTITY_RE = re.compile(r"^\s*([-+0-9.eE]+)\s*([^\s]+)\s*$")


class UnitError(ValueError):
    """A config value is missing its unit or carries an unknown one."""


def parse_quantity(text, expect=None):
    """Parse ``"<number> <unit>"`` into an SI/internal float.

    Parameters
    ----------
    text : str
        Value string with mandatory unit suffix.
    expect : iterable of str, optional
        Restrict accepted units (e.g. ``("G", "mG", "T")`` for a field).

    Raises
    ------
    UnitError
        Missing, unknown, or disallowed unit; or a non-numeric magnitude.
    """
    if isinstance(text, (int, float)):
        raise UnitError(f"bare number {text!r}: physical values need a unit suffix")
    match = _QUANTITY_RE.match(text)
    if match is None:
        raise UnitError(f"cannot parse quantity {text!r} (expected '<number> <unit>')")
    magnitude, unit = match.groups()
    try:
        value = float(magnitude)
    except ValueError:
        raise UnitError(f"bad numeric magnitude in {text!r}") from None
    if unit not in _UNIT_FACTORS:
        raise UnitError(f"unknown unit {unit!r} in {text!r}")
    if expect is not None and unit not in tuple(expect):
        raise UnitError(
            f"unit {unit!r} not valid here (expected one of {tuple(expect)})"
        )
    return value * _UNIT_FACTORS[unit]


def parse_rabi(text):
    """Parse a Rabi frequency given in cycles ("4 MHz" means omega/2pi)."""
    return 2.0 * math.pi * parse_quantity(text, expect=("Hz", "kHz", "MHz", "GHz"))


def rad_per_s_to_mhz(omega):
    return omega / (2.0 * math.pi * 1e6)
