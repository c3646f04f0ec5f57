"""
Harmonic oscillator states seen as hydrodynamic equilibria.

A stationary state carries no flow, so the classical force -dV/dq has to be
cancelled everywhere by the quantum force -dV_qu/dq.  This script solves the
lowest levels, prints their energies, and then shows that the cancellation
is a property of the true eigenstates only: a Gaussian of the wrong width
leaves a large net force.

Run with ``python3 demos/oscillator_equilibrium.py``.
"""
import numpy as np

from qhydro.core import ScalarField, make_uniform_grid
from qhydro.eigensolver import (
    energy_identity_residual,
    equilibrium_residual,
    solve_eigenstates,
    vqu_eigenstate_reference,
)

grid = make_uniform_grid(-10.0, 10.0, 2001)
x = grid.points
V = ScalarField(grid, 0.5 * x**2)

states = solve_eigenstates(V, m=1.0, n_max=5)

print(" n    E_n (solver)        E_n - (n + 1/2)    net force   |V + V_qu - E|/E")
for s in states:
    print(f"{s.index:2d}  {s.energy:.12f}   {s.energy - (s.index + 0.5):+.2e}"
          f"    {s.equilibrium_residual:.1e}     {energy_identity_residual(s, V):.1e}")

# V_qu of each state is an inverted parabola shifted up by E_n: the quantum
# potential is exactly what is needed to flatten V + V_qu.
print("\nV_qu at a few positions (state n = 2):")
s2 = states[2]
for q in (0.0, 1.0, 2.0, 3.0):
    i = int(np.argmin(np.abs(x - q)))
    print(f"  q = {q:3.1f}   computed {s2.vqu.values[i]:+.6f}   closed form {vqu_eigenstate_reference(2, x[i]):+.6f}")

# control: a Gaussian twice as wide as the ground state
wrong = ScalarField(grid, np.exp(-x**2 / 8.0))
print(f"\nnet force on a too-wide Gaussian: {equilibrium_residual(wrong, V, m=1.0):.2f}"
      f"  (ground state: {states[0].equilibrium_residual:.1e})")
