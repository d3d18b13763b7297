# Microwave selection rules: |<i| sin(2 pi f + phi1 - phi2) |j>| for the lowest three states.
import numpy as np

from fluxdelta import CircuitParams, classify_structure, spectrum
from fluxdelta.circuit import parities
from fluxdelta.transitions import current_operator, parity_selection_defect, transitions_at

base = CircuitParams(alpha=0.8, ej_over_ec=40.0, f=0.5, cutoff=12)

print(" f       s01      s12      s02       structure")
for f in (0.490, 0.494, 0.496, 0.498, 0.500, 0.502):
    t = transitions_at(base.with_flux(f))
    print(f"{f:.3f}  {t.s01:.5f}  {t.s12:.5f}  {t.s02:.2e}  {classify_structure(t)}")

# At f = 0.5 every eigenstate is even or odd under n1 <-> n2 (phi_m -> -phi_m),
# and the drive is odd, so same-parity states do not couple.
eig = spectrum(base, 6)
p = parities(eig, "swap")
print("parities:", p)
print("largest same-parity element:", parity_selection_defect(eig, current_operator(base), p[:3]))
