"""
Hydrodynamic eigenstates.

A stationary state in the hydrodynamic picture has zero velocity field and a
quantum potential that exactly balances the external one,
``V_qu[R_n] = E_n - V``.  With the nonrelativistic quantum potential this is
the stationary Schrodinger equation, so the states are computed from the
linear problem ``-(hbar**2/2m) R'' + V R = E R`` discretized as a symmetric
tridiagonal matrix.  The hydrodynamic conditions (pointwise energy identity,
zero net force) are then checked on the result rather than assumed.

Energies are refined by one Richardson step between the grid and its
half-spacing refinement; the raw second-order eigenvalue is kept in
:attr:`Eigenstate.discrete_energy`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Union

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import eigh_tridiagonal

from .core import Grid1D, ScalarField, first_derivative_values, trapezoid
from .qpotential import QuantumPotentialField, vqu_nonrel

CONFINEMENT_TOL = 1e-6


class NotConfinedError(RuntimeError):
    """Eigenfunction leaks to the grid boundary; its eigenvalue is untrusted."""


@dataclass(frozen=True)
class Eigenstate:
    """One stationary hydrodynamic state.

    Attributes
    ----------
    index : int
        Number of nodes.
    energy : float
        Richardson-refined eigenvalue.
    discrete_energy : float
        Eigenvalue of the second-order discrete problem on ``grid``.
    wavefunction : ScalarField
        Signed real eigenfunction, normalized to one on the grid.
    vqu : QuantumPotentialField
        Nonrelativistic quantum potential of the state.
    equilibrium_residual : float
        Normalized maximum net force, see :func:`equilibrium_residual`.
    """

    index: int
    energy: float
    discrete_energy: float
    wavefunction: ScalarField
    vqu: QuantumPotentialField
    equilibrium_residual: float
    mass: float = 1.0
    hbar: float = 1.0

    @property
    def amplitude(self) -> ScalarField:
        """Hydrodynamic amplitude ``|psi| >= 0``."""
        return self.wavefunction.with_values(np.abs(self.wavefunction.values))

    @property
    def grid(self) -> Grid1D:
        return self.wavefunction.grid

    @property
    def density(self) -> np.ndarray:
        return self.wavefunction.values**2

    @property
    def node_mask(self) -> np.ndarray:
        """``True`` where the quantum potential is defined."""
        return self.vqu.mask


PotentialLike = Union[ScalarField, Callable[[np.ndarray], np.ndarray]]


def _sample_potential(V: PotentialLike, grid: Grid1D, base: Optional[Grid1D] = None) -> np.ndarray:
    if callable(V) and not isinstance(V, ScalarField):
        return np.asarray(V(grid.points), dtype=float) * np.ones(grid.n_points)
    if base is None or grid == V.grid:
        return np.asarray(V.values, dtype=float)
    return CubicSpline(V.grid.points, V.values)(grid.points)


def _tridiagonal_spectrum(v: np.ndarray, h: float, m: float, hbar: float, n_max: int):
    # Dirichlet rows: the two edge points are pinned to zero
    kin = hbar**2 / (2.0 * m * h**2)
    diag = 2.0 * kin + v[1:-1]
    off = -kin * np.ones(diag.size - 1)
    return eigh_tridiagonal(diag, off, select="i", select_range=(0, n_max))


def solve_eigenstates(V: PotentialLike, m: float = 1.0, n_max: int = 0, *,
                      grid: Optional[Grid1D] = None, hbar: float = 1.0,
                      hard_walls: bool = False, extrapolate: bool = True) -> List[Eigenstate]:
    """Lowest ``n_max + 1`` bound states of the potential ``V``.

    Parameters
    ----------
    V : ScalarField or callable
        External potential.  A callable is evaluated on ``grid`` (and on its
        refinement when extrapolating); a field is spline-interpolated onto
        the refined grid.
    m : float
        Particle mass.
    n_max : int
        Highest state index to return.
    grid : Grid1D, optional
        Required when ``V`` is a callable.
    hard_walls : bool
        Treat the grid edges as infinite walls (particle in a box).  When
        false, the solver verifies that every state has decayed below
        ``CONFINEMENT_TOL`` of its peak at the boundary.
    extrapolate : bool
        Refine energies with one Richardson step.

    Returns
    -------
    list of Eigenstate
    """
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    if isinstance(V, ScalarField):
        grid = V.grid if grid is None else grid
    elif grid is None:
        raise ValueError("grid is required when V is a callable")
    if n_max + 1 > grid.n_points - 2:
        raise ValueError("not enough grid points for the requested states")

    v = _sample_potential(V, grid)
    h = grid.spacing
    w, vecs = _tridiagonal_spectrum(v, h, m, hbar, n_max)

    if extrapolate:
        fine = grid.refined()
        w_fine, _ = _tridiagonal_spectrum(_sample_potential(V, fine, base=grid), fine.spacing,
                                          m, hbar, n_max)
        energies = (4.0 * w_fine - w) / 3.0
    else:
        energies = w

    potential = ScalarField(grid, v)
    states = []
    for n in range(n_max + 1):
        psi = np.zeros(grid.n_points)
        psi[1:-1] = vecs[:, n]
        peak = np.abs(psi).max()
        if not hard_walls:
            edge = max(abs(psi[1]), abs(psi[-2]))
            if edge > CONFINEMENT_TOL * peak:
                raise NotConfinedError(
                    f"state {n} has boundary amplitude {edge / peak:.3e} of its peak; "
                    "widen the grid or raise the potential at the edges"
                )
        tail = psi[np.abs(psi) > 1e-3 * peak][-1]
        psi *= math.copysign(1.0, tail) / math.sqrt(trapezoid(psi**2, grid))
        wf = ScalarField(grid, psi)
        vqu = vqu_nonrel(wf, m, hbar)
        res = _force_residual(vqu, v, h)
        states.append(Eigenstate(n, float(energies[n]), float(w[n]), wf, vqu, res, m, hbar))

    if np.any(np.diff([s.energy for s in states]) <= 0):
        raise RuntimeError("eigenvalues are not strictly increasing; spectrum is degenerate on this grid")
    return states


def _force_residual(vqu: QuantumPotentialField, v: np.ndarray, h: float) -> float:
    total = v + vqu.values
    force = np.gradient(total, h, edge_order=2) if total.size >= 3 else np.zeros_like(total)
    ok = vqu.mask & np.isfinite(force)
    if not ok.any():
        return 0.0
    scale = np.abs(first_derivative_values(v, h)).max()
    if scale == 0.0:
        scale = 1.0
    return float(np.abs(force[ok]).max() / scale)


def equilibrium_residual(state: Union[Eigenstate, ScalarField], V: ScalarField,
                         m: Optional[float] = None, hbar: float = 1.0) -> float:
    """Net hydrodynamic force on a stationary state.

    Returns ``max |d(V + V_qu)/dq|`` over valid points, divided by
    ``max |dV/dq|`` (by one when ``V`` is flat).  Points next to a masked
    point are skipped because their force stencil is undefined.

    ``state`` is an :class:`Eigenstate` or a bare amplitude field; the latter
    needs ``m``.
    """
    if isinstance(state, Eigenstate):
        R, m, hbar = state.wavefunction, state.mass, state.hbar
    else:
        if m is None:
            raise ValueError("mass is required for a bare amplitude")
        R = state
    if R.grid != V.grid:
        raise ValueError("state and potential live on different grids")
    return _force_residual(vqu_nonrel(R, m, hbar), np.asarray(V.values), V.grid.spacing)


def energy_identity_residual(state: Eigenstate, V: ScalarField) -> float:
    """``max |V_qu + V - E_n| / |E_n|`` over valid points."""
    total = state.vqu.values + np.asarray(V.values) - state.energy
    return float(np.nanmax(np.abs(total[state.vqu.mask])) / abs(state.energy))


def vqu_eigenstate_reference(n: int, q, m: float = 1.0, omega: float = 1.0, hbar: float = 1.0):
    """Closed-form oscillator quantum potential ``-m w^2 q^2/2 + (n + 1/2) hbar w``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    q = np.asarray(q, dtype=float)
    out = -0.5 * m * omega**2 * q**2 + (n + 0.5) * hbar * omega
    return out if out.ndim else float(out)


def hermite_reference(n: int, x, m: float = 1.0, omega: float = 1.0, hbar: float = 1.0):
    """Polynomial family from ``H[k+1] = (m w/hbar) x H[k] - 2k H[k-1]``, ``H[0] = 1``.

    This is the physicists' Hermite polynomial evaluated at
    ``(m w / 2 hbar) x``; :func:`oscillator_eigenfunction` applies the
    matching argument.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    x = np.asarray(x, dtype=float)
    scale = m * omega / hbar
    prev, cur = np.zeros_like(x), np.ones_like(x)
    for k in range(n):
        prev, cur = cur, scale * x * cur - 2.0 * k * prev
    return cur if cur.ndim else float(cur)


def oscillator_eigenfunction(n: int, q, m: float = 1.0, omega: float = 1.0, hbar: float = 1.0):
    """Normalized analytic oscillator eigenfunction built from :func:`hermite_reference`."""
    q = np.asarray(q, dtype=float)
    alpha = m * omega / hbar
    xi = math.sqrt(alpha) * q
    # hermite_reference(n, x) = H_n(alpha x / 2), so x = 2 xi / alpha
    hn = hermite_reference(n, 2.0 * xi / alpha, m, omega, hbar)
    norm = (alpha / math.pi) ** 0.25 / math.sqrt(2.0**n * math.factorial(n))
    return norm * hn * np.exp(-0.5 * xi**2)
