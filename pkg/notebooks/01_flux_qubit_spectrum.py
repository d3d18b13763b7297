# Energy levels of the three-junction loop near half a flux quantum.
#
# Levels are in units of E_J; alpha = 0.8 and E_J/E_c = 40 throughout.
import numpy as np

from fluxdelta import CircuitParams, ratio_table, spectrum, sweep_spectrum

base = CircuitParams(alpha=0.8, ej_over_ec=40.0, f=0.5, cutoff=12)
f = np.linspace(0.48, 0.52, 9)
table = sweep_spectrum(base, f, k=6)

print(" f       eps0     eps1     eps2     eps1-eps0")
for fi, lv in zip(table.f, table.levels):
    print(f"{fi:.3f}  {lv[0]:.5f}  {lv[1]:.5f}  {lv[2]:.5f}  {lv[1] - lv[0]:.5f}")

# the qubit gap is smallest at the symmetric point
print("min gap at f =", table.f[np.argmin(table.levels[:, 1] - table.levels[:, 0])])

# f -> 1 - f leaves the spectrum unchanged
mirror = sweep_spectrum(base, 1 - f, k=6)
print("max |levels(f) - levels(1-f)| =", np.abs(table.levels - mirror.levels).max())

# transition-frequency ratios D20, D21, D10 away from f = 0.5
for fi in (0.490, 0.496, 0.499):
    lv = spectrum(base.with_flux(fi), 6).levels
    print(f"f = {fi}:  D20, D21, D10 =", np.round(ratio_table(lv), 4))

# truncation check: N = 12 versus N = 16
coarse = spectrum(base.with_flux(0.496), 6).levels
fine = spectrum(CircuitParams(alpha=0.8, ej_over_ec=40.0, f=0.496, cutoff=16), 6).levels
print("cutoff shift:", np.abs(coarse - fine).max())
