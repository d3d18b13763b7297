# Diabatic content P_3m(t, phi) = |<m|E_3(t)>|^2 of the middle adiabatic state.
import numpy as np

from fluxdelta import phase_sweep, preset_schedule

s = preset_schedule("fig3")
phis = np.linspace(-np.pi, np.pi, 9)
t = np.linspace(0, 6, 7)
surface = phase_sweep(s, phis, t, k=3)

for i, phi in enumerate(surface.phis):
    row = "  ".join(f"{p[1]:.3f}" for p in surface.probabilities[i])
    print(f"phi = {phi:+.3f}  P_31(t) = {row}")

# phi = pi/2 carries |0> into |1>; at t = 3 all three bare states contribute
quarter = phase_sweep(s, [np.pi / 2], [0.0, 3.0, 6.0]).probabilities[0]
print("phi = pi/2, t = 0, 3, 6:\n", np.round(quarter, 4))
print("masked points:", int(surface.masked.sum()))
