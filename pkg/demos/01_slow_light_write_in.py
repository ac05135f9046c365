"""Slow light numbers and the matter-wave imprint of a stopped pulse.

The probe pulse never propagates explicitly: its temporal envelope is laid
into the condensate along z at the group velocity, with amplitude set by
the dark-state ratio of the probe and coupling fields.  This script prints
the headline slow-light figures and draws the resulting two-component
state on a 1D cut.
"""

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from stoplight.eit import (
    ImprintPlacement,
    PulseSpec,
    compression_from_group_velocity,
    group_velocity_from_compression,
    write_imprint,
)
from stoplight.grids import ComplexField, make_grid, norm

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

# headline numbers: a 3e7 compression factor means ~10 m/s light
print(f"compression 3e7     -> v_g = {group_velocity_from_compression(3e7):.3f} m/s")
print(f"v_g 10 m/s          -> compression {compression_from_group_velocity(10.0):.3e}")
print(f"pulse length in the cloud: 10 m/s * 3 us = {10.0 * 3e-6 * 1e6:.0f} um")

# a 1D host cloud and the published pulse parameters
grid = make_grid(1, [200e-6], [1024])
z = grid.axes[0]
host = ComplexField(grid, np.sqrt(np.clip(1 - (z / 40e-6) ** 2, 0, None)).astype(complex))
host = ComplexField(grid, host.values * math.sqrt(3e6 / norm(host)))

probe = PulseSpec(peak_rabi=2 * math.pi * 4e6, duration=3e-6)
coupling = PulseSpec(peak_rabi=2 * math.pi * 8e6, duration=3e-6)
placement = ImprintPlacement(center_z=0.0, group_velocity=10.0)
psi1, psi2 = write_imprint(host, probe, coupling, placement)

print(f"host atoms {norm(host):.3e} -> psi1 {norm(psi1):.3e} + psi2 {norm(psi2):.3e}")
occupied = host.density() > 0
transfer = psi2.density()[occupied] / host.density()[occupied]
print(f"peak transfer fraction: {transfer.max():.3f} (= (4 MHz / 8 MHz)^2)")

fig, ax = plt.subplots(figsize=(7, 4))
ax.plot(z * 1e6, host.density() * 1e-12, "k--", lw=1, label="host before write-in")
ax.plot(z * 1e6, psi1.density() * 1e-12, label="component 1 after write-in")
ax.plot(z * 1e6, psi2.density() * 1e-12, label="component 2 (imprint)")
ax.set_xlabel("z (um)")
ax.set_ylabel("line density (atoms/pm)")
ax.set_title("30 um matter-wave copy of a 3 us probe pulse")
ax.legend()
fig.tight_layout()
fig.savefig(OUT / "01_write_in.png", dpi=150)
print(f"figure -> {OUT / '01_write_in.png'}")
