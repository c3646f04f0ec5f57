"""
The smallest black hole allowed by quantum delocalization.

A maximally collapsed mass is still spread over a few Compton lengths
a = hbar / (m c); taking the collapse radius as R0 = 2a, the mass fits
inside its own horizon R_g = 2 G m / c^2 only when m exceeds the Planck
mass.  This script finds that threshold by root search on R0(m) = R_g(m),
compares it with sqrt(hbar c / G), and looks at the collapsed profile of a
mass just above the bound.
"""
import numpy as np

from qhydro import blackhole as bh
from qhydro.core import PhysicalConstants
from qhydro.dynamics import classical_infall_acceleration

for label, k in (("natural", PhysicalConstants.natural()), ("SI", PhysicalConstants.si())):
    found = bh.critical_mass_by_search(k, tol=1e-12)
    print(f"{label:8s} search {found:.15e}   sqrt(hbar c/G) {bh.min_mass(k):.15e}")

print("\n m / m_p   black hole?   hbar/(m c R_g)")
for m in (0.5, 0.9, 1.0, 1.1, 2.0):
    v = bh.is_black_hole(m)
    print(f"  {m:4.1f}       {str(v.is_black_hole):5s}        {v.ratio:.4f}")

sc = bh.critical_scenario()
zero = bh.solve_radial_profile(sc, correction=False)
near = bh.solve_radial_profile(sc, correction=True)
print(f"\nm = {sc.mass:.2f} m_p: R0 = {sc.R0:.4f}, R_g = {sc.R_g:.4f}")
print(f"density inside R0, gaussian profile:        {zero.enclosed_fraction_at_R0:.6f}")
print(f"density inside R0, near-horizon correction: {near.enclosed_fraction_at_R0:.6f}")
print(f"L2 distance between the two profiles:       {near.zero_order_deviation:.6f}")

ratio = bh.band_median_vqu(sc) / sc.rest_energy
print(f"median curved |V_qu| between R0 and R_g: {ratio:.3f} m c^2")

r = np.geomspace(1.0, 1e-6, 7)
print("\nclassical dust shell at rest, inward acceleration:")
for ri, a in zip(r, classical_infall_acceleration(r, 0.0, 2.0)):
    print(f"  r = {ri:.0e}   {a:.3e}")
