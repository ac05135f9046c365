"""Store, wait, read out: revival fidelity versus storage time.

Each storage time is a separate protocol run ending in the accounting
read-out; the regenerated pulse profile is the imprint's z profile mapped
back to time at the (faster) read-out group velocity.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from stoplight.config import parse_config
from stoplight.eit import calibrate_attenuation
from stoplight.gpe import ground_state
from stoplight.protocol import central_column, run_protocol
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
alpha = calibrate_attenuation(
    central_column(host, cfg.reduction_factor()),
    cfg["pulses", "readout_transmission_full_column"],
)
readout = cfg.readout_model(alpha)

# a short-front of the published sequence keeps the demo quick;
# pass the full list to the CLI for the complete curve
storage_times = (10e-6, 0.05, 0.1, 0.2, 0.4)
fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4))
fidelities = []
for storage in storage_times:
    timeline = cfg.timeline(readout, storage=storage)
    _, revival, _ = run_protocol(timeline, host, cfg.protocol_params())
    fidelities.append(revival.fidelity)
    ax2.plot(revival.profile_times * 1e6, revival.profile_power / 1e9,
             label=f"{storage*1e3:g} ms")
    print(f"storage {storage*1e3:8.2f} ms: fidelity {revival.fidelity:.4%}, "
          f"stored atoms {revival.n2_at_read:.0f}")

ax1.semilogx(np.array(storage_times) * 1e3, np.array(fidelities) * 100, "o-")
ax1.set_xlabel("storage time (ms)")
ax1.set_ylabel("revival fidelity (%)")
ax2.set_xlabel("time after read-out trigger (us)")
ax2.set_ylabel("power proxy (arb.)")
ax2.legend(fontsize=8, title="storage")
fig.tight_layout()
fig.savefig(OUT / "06_revival.png", dpi=150)
print(f"figure -> {OUT / '06_revival.png'}")
