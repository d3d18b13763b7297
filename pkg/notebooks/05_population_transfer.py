# Propagating |0> through the three pulses and comparing with a fixed-step oracle.
import numpy as np

from fluxdelta import preset_schedule, propagate, transfer_fidelity
from fluxdelta.dynamics import midpoint_extrapolated

s = preset_schedule("fig3", np.pi / 2)
traj = propagate(s, [1, 0, 0])
print("final populations:", traj.populations[-1])
print("norm drift:", traj.norm_drift, " rhs evaluations:", traj.nfev)
print("oracle:           ", midpoint_extrapolated(s, [1, 0, 0]))

# the state stays on |E_3> throughout
print("min overlap with E3:", np.nanmin(traj.frame_overlaps[:, 2]))

# fidelity against pulse area; at Omega0 tau = 20 both phases transfer
for phi in (np.pi / 2, np.pi):
    for omega0 in (20, 10, 5, 4, 3, 2):
        run = propagate(preset_schedule("fig3", phi, omega0=omega0), [1, 0, 0], overlaps=False)
        print(f"phi = {phi:.3f}  Omega0 tau = {omega0:2d}  P1 = {transfer_fidelity(run, [0, 1, 0]):.6f}")
