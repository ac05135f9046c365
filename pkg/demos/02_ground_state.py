"""Relax the pancake condensate and check its size.

Imaginary-time propagation with per-step renormalization, starting from a
Thomas-Fermi guess.  The default trap frequencies are calibrated so that
3 million atoms form an 80 um cloud.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from stoplight.config import parse_config
from stoplight.gpe import ground_state, width_at_fraction
from stoplight.grids import norm
from stoplight.scattering import coupling_coefficients, scattering_at_field

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

# a reduced grid keeps this demo under half a minute
cfg = parse_config(text="[grid]\npoints_x = 96\npoints_z = 96\n")
grid = cfg.grid()
couplings = coupling_coefficients(
    scattering_at_field(cfg.scattering_model(), 132.4),
    reduction_factor=cfg.reduction_factor(),
)

log = []
psi = ground_state(grid, cfg.trap(), couplings, cfg.atom_number(),
                   tolerance=1e-10, convergence_log=log)
print(f"converged in {log[-1][0]} iterations, N = {norm(psi):.6g}")
print(f"cloud width at 1% density: {width_at_fraction(psi, 0.01)*1e6:.1f} um (target 80 um)")

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
im = ax1.imshow(psi.density().T * 1e-15, origin="lower",
                extent=[-60, 60, -60, 60], cmap="magma")
ax1.set_xlabel("x (um)")
ax1.set_ylabel("z (um)")
ax1.set_title("ground-state density")
fig.colorbar(im, ax=ax1, label="atoms / (1000 um^2)")

iterations = [row[0] for row in log]
changes = [row[2] for row in log]
ax2.semilogy(iterations, changes)
ax2.set_xlabel("iteration")
ax2.set_ylabel("relative energy change per step")
ax2.set_title("imaginary-time convergence")
fig.tight_layout()
fig.savefig(OUT / "02_ground_state.png", dpi=150)
print(f"figure -> {OUT / '02_ground_state.png'}")
