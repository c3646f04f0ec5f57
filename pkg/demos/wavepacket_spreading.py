"""
Free wave-packet spreading driven by the quantum force.

With no external potential the only force acting on the fluid is the quantum
one, -dV_qu/dq, which pushes outward from a density peak.  The packet width
must follow sigma(t)^2 = sigma0^2 (1 + (hbar t / 2 m sigma0^2)^2).  This
script evolves the packet, compares the width with that law, and recovers
the acceleration of the width from the quantum force alone.
"""
import math

import numpy as np

from qhydro.core import make_uniform_grid
from qhydro.dynamics import HydroState, evolve_trajectory, quantum_force

grid = make_uniform_grid(-60.0, 60.0, 4096)
x = grid.points
sigma0 = 1.0
psi0 = (2 * math.pi * sigma0**2) ** -0.25 * np.exp(-x**2 / (4 * sigma0**2))
state = HydroState.from_wavefunction(grid, psi0)

traj = evolve_trajectory(state, None, dt=0.005, steps=1000, record_every=200)
print("   t      width       closed form      norm")
for s in traj:
    law = sigma0 * math.sqrt(1 + (s.time / (2 * sigma0**2)) ** 2)
    print(f"{s.time:5.2f}   {s.width():.10f}   {law:.10f}   {s.norm:.12f}")

# Bohm trajectories of a Gaussian scale with sigma(t), so the quantum force
# per unit displacement equals sigma''/sigma
s = traj[3]
F = quantum_force(s.amplitude, 1.0)
inner = (np.abs(x) > 0.2) & (np.abs(x) < s.width())
sigma = s.width()
sigma_dd = 1.0 / (4 * sigma**3)
print(f"\nat t = {s.time:.1f}: mean F/x = {np.mean(F[inner] / x[inner]):.6f},"
      f" sigma''/sigma = {sigma_dd / sigma:.6f}")
