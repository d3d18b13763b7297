# Instantaneous levels of the driven Delta atom and the nonadiabatic couplings F_kl.
import numpy as np

from fluxdelta import adiabatic_frame, analytic_eigenvalues, coupling_profile, preset_schedule

# three choices of the 1<-0 pulse centre; the 2<-1 and 2<-0 pulses sit at 2 and 4
for name in ("fig2a-dashdot", "fig2a-solid", "fig2a-dotted"):
    s = preset_schedule(name)
    t = np.linspace(1, 5, 81)
    e = analytic_eigenvalues(s, t)
    gap = np.minimum(e[:, 0] - e[:, 2], e[:, 2] - e[:, 1])
    print(f"{name:14s} t10 = {s.pulse_10.center}  smallest gap on [1, 5]: {gap.min():.3f}")

# at t = 3 the gaps close (nearly) where the total phase is 0 or pi
s = preset_schedule("fig2b")
for phi in np.linspace(-np.pi, np.pi, 9):
    e = analytic_eigenvalues(s.with_total_phase(phi), 3.0)
    print(f"phi = {phi:+.3f}  E = {np.round(e, 3)}")

# a quarter-turn phase keeps a zero level and small couplings
t = np.linspace(0, 6, 241)
for phi in (np.pi / 2, np.pi):
    values, _ = coupling_profile(preset_schedule("fig3", phi), t)
    print(f"phi = {phi:.4f}: max F = {np.nanmax(values):.4f} at t = {t[np.nanargmax(values)]:.3f}")

frame = adiabatic_frame(preset_schedule("fig3", np.pi), 3.0)
print("F_kl at t = 3, phi = pi (analytic):\n", np.round(frame.couplings, 5))
print("relative difference to finite differences:", frame.method_discrepancy)
