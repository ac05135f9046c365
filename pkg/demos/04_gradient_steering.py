"""Steer the stored imprint to the cloud edge with a 200 mG/cm gradient.

The magnetically sensitive component feels a linear tilt; immiscibility
expels it from the host, and the gradient picks which edge it settles at.
Flipping the gradient sign mirrors the trajectory.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from stoplight.config import parse_config
from stoplight.gpe import ground_state
from stoplight.protocol import run_protocol
from stoplight.scattering import coupling_coefficients, scattering_at_field

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

cfg = parse_config(text="""
[grid]
points_x = 96
points_z = 96
[timeline]
dt = 10 us
""")
couplings = coupling_coefficients(
    scattering_at_field(cfg.scattering_model(), 132.4),
    reduction_factor=cfg.reduction_factor(),
)
host = ground_state(cfg.grid(), cfg.trap(), couplings, cfg.atom_number(),
                    tolerance=1e-9)
readout = cfg.readout_model(0.0)

fig, ax = plt.subplots(figsize=(7, 4))
for sign, style in ((+1, "C0-"), (-1, "C3--")):
    timeline = cfg.timeline(readout, storage=0.3, gradient=sign * 20.0)
    observables, _, _ = run_protocol(timeline, host, cfg.protocol_params())
    ax.plot(observables.times * 1e3, observables.com_z2 * 1e6, style,
            label=f"{sign * 200:+d} mG/cm")
    print(f"gradient {sign*200:+d} mG/cm: final COM_z = "
          f"{observables.com_z2[-1]*1e6:+.1f} um")
ax.axhline(0, color="k", lw=0.5)
ax.set_xlabel("storage time (ms)")
ax.set_ylabel("imprint centre of mass, z (um)")
ax.set_title("imprint migration under the steering gradient")
ax.legend()
fig.tight_layout()
fig.savefig(OUT / "04_steering.png", dpi=150)
print(f"figure -> {OUT / '04_steering.png'}")
