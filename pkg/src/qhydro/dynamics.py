"""
Hydrodynamic kinematics and dynamics.

The state of a particle is the pair ``(R, S)``: amplitude ``R = |psi|`` and
action ``S``, with momentum ``p = dS/dq`` and current ``J = R^2 p / m``.
Time evolution of the coupled continuity / quantum Hamilton-Jacobi system is
carried out on the equivalent wavefunction ``psi = R exp(iS/hbar)`` with a
Strang split-step Fourier scheme, after which ``(R, S)`` are re-extracted
(the phase is unwrapped from the left boundary).

The split-step propagator is unitary, so there is no stability restriction
on ``dt``; the enforced bound ``dt * max|V| / hbar <= pi`` keeps the
potential phase per step resolvable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .blackhole import HorizonError, exterior_metric_gradient
from .core import Grid1D, PhysicalConstants, ScalarField, first_derivative_values, trapezoid
from .qpotential import QuantumPotentialField, vqu_nonrel, vqu_rel_static

NORM_DRIFT_TOL = 1e-6


class ImaginaryRestEnergyError(ValueError):
    """``V_qu > m c^2``: the rest term under the square root is negative."""


class NormDriftError(RuntimeError):
    """Norm changed by more than the tolerance during an evolution."""


class StabilityError(ValueError):
    """Time step violates the documented bound."""


@dataclass(frozen=True)
class HydroState:
    """Amplitude and action on a grid at time ``time``."""

    amplitude: ScalarField
    action: ScalarField
    time: float = 0.0

    def __post_init__(self):
        if self.amplitude.grid != self.action.grid:
            raise ValueError("amplitude and action must share a grid")
        if np.any(self.amplitude.values < 0):
            raise ValueError("amplitude must be non-negative")

    @property
    def grid(self) -> Grid1D:
        return self.amplitude.grid

    @property
    def density(self) -> np.ndarray:
        return self.amplitude.values**2

    @property
    def norm(self) -> float:
        return trapezoid(self.density, self.grid)

    def wavefunction(self, hbar: float = 1.0) -> np.ndarray:
        return self.amplitude.values * np.exp(1j * self.action.values / hbar)

    @classmethod
    def from_wavefunction(cls, grid: Grid1D, psi: np.ndarray, time: float = 0.0,
                          hbar: float = 1.0) -> "HydroState":
        psi = np.asarray(psi, dtype=complex)
        S = hbar * np.unwrap(np.angle(psi))
        return cls(ScalarField(grid, np.abs(psi)), ScalarField(grid, S), time)

    def width(self) -> float:
        """Standard deviation of the density."""
        x = self.grid.points
        n = self.density
        norm = trapezoid(n, self.grid)
        mean = trapezoid(x * n, self.grid) / norm
        return math.sqrt(trapezoid((x - mean) ** 2 * n, self.grid) / norm)


def momentum_field(S: ScalarField) -> ScalarField:
    """Spatial momentum ``p = dS/dq`` by central differences."""
    return S.with_values(first_derivative_values(S.values, S.grid.spacing))


def energy_readoff(earlier: HydroState, later: HydroState) -> ScalarField:
    """Local energy ``E = -dS/dt`` from two states of the same evolution."""
    dt = later.time - earlier.time
    if dt == 0:
        raise ValueError("states must be at different times")
    return earlier.action.with_values(-(later.action.values - earlier.action.values) / dt)


def current_density(R: ScalarField, S: ScalarField, m: float) -> ScalarField:
    """Probability current ``J = R^2 dS/dq / m``."""
    return R.with_values(R.values**2 * momentum_field(S).values / m)


def dispersion_energy(p, vqu, m: float, constants: PhysicalConstants = PhysicalConstants(),
                      antiparticle: bool = False):
    """Energy ``sqrt(m^2 c^4 (1 - V_qu/m c^2) + p^2 c^2)``, negative for antiparticles.

    Raises :class:`ImaginaryRestEnergyError` when ``V_qu > m c^2``.
    """
    c = constants.c
    mc2 = m * c**2
    p = np.asarray(p, dtype=float)
    vqu = np.asarray(vqu, dtype=float)
    if np.any(vqu > mc2):
        raise ImaginaryRestEnergyError("V_qu exceeds m c^2; no real rest term")
    e = np.sqrt(mc2**2 * (1.0 - vqu / mc2) + (p * c) ** 2)
    if antiparticle:
        e = -e
    return e if e.ndim else float(e)


def quantum_force(R: ScalarField, m: float, hbar: float = 1.0) -> np.ndarray:
    """``-dV_qu/dq`` of the nonrelativistic quantum potential (``nan`` where undefined)."""
    vqu = vqu_nonrel(R, m, hbar)
    return -np.gradient(vqu.values, R.grid.spacing, edge_order=2)


# ---------------------------------------------------------------------------
# evolution


def _wavenumbers(grid: Grid1D) -> np.ndarray:
    # the sampled points are treated as one period of a periodic domain
    return 2.0 * math.pi * np.fft.fftfreq(grid.n_points, d=grid.spacing)


def evolve_nonrel(state: HydroState, V: Optional[ScalarField], dt: float, steps: int,
                  m: float = 1.0, hbar: float = 1.0) -> HydroState:
    """Advance ``(R, S)`` under the nonrelativistic hydrodynamic equations.

    Parameters
    ----------
    state : HydroState
        Initial state; the sampled points are treated as one period of a
        periodic domain.
    V : ScalarField or None
        External potential (``None`` for a free particle).
    dt, steps : float, int
        Time step and number of steps.

    Raises
    ------
    NormDriftError
        If the norm changes by more than ``1e-6`` over the run.
    StabilityError
        If ``dt * max|V| / hbar > pi``.
    """
    return evolve_trajectory(state, V, dt, steps, m, hbar, record_every=0)[-1]


def evolve_trajectory(state: HydroState, V: Optional[ScalarField], dt: float, steps: int,
                      m: float = 1.0, hbar: float = 1.0, record_every: int = 1) -> List[HydroState]:
    """Like :func:`evolve_nonrel` but returns the states every ``record_every`` steps.

    The initial state is the first entry.
    """
    if steps < 0:
        raise ValueError("steps must be non-negative")
    if record_every <= 0:
        record_every = max(steps, 1)
    grid = state.grid
    v = np.zeros(grid.n_points) if V is None else np.asarray(V.values, dtype=float)
    if V is not None and V.grid != grid:
        raise ValueError("state and potential live on different grids")
    vmax = np.abs(v).max()
    if dt * vmax / hbar > math.pi:
        raise StabilityError(
            f"dt * max|V| / hbar = {dt * vmax / hbar:.3g} exceeds pi; reduce dt"
        )

    k = _wavenumbers(grid)
    half_v = np.exp(-0.5j * dt * v / hbar)
    kinetic = np.exp(-0.5j * dt * hbar * k**2 / m)
    psi = state.wavefunction(hbar)
    norm0 = trapezoid(np.abs(psi) ** 2, grid)

    out = [state]
    for i in range(1, steps + 1):
        psi = half_v * np.fft.ifft(kinetic * np.fft.fft(half_v * psi))
        if i % record_every == 0 or i == steps:
            out.append(HydroState.from_wavefunction(grid, psi, state.time + i * dt, hbar))
    drift = abs(trapezoid(np.abs(psi) ** 2, grid) - norm0)
    if drift > NORM_DRIFT_TOL * max(norm0, 1.0):
        raise NormDriftError(f"norm drifted by {drift:.3e} over {steps} steps (dt={dt})")
    return out


def density_distance(a: HydroState, b: HydroState) -> float:
    """L2 distance between two densities on a common grid."""
    return math.sqrt(trapezoid((a.density - b.density) ** 2, a.grid))


# ---------------------------------------------------------------------------
# relativistic checks


def hje_residual(state: HydroState, m: float, energy,
                 constants: PhysicalConstants = PhysicalConstants(),
                 vqu: Optional[QuantumPotentialField] = None, edge: int = 1) -> float:
    """Violation of the relativistic hydrodynamic Hamilton-Jacobi equation.

    Evaluates ``|(E/c)^2 - p^2 - m^2 c^2 (1 - V_qu / m c^2)| / (m c)^2`` with the
    static relativistic quantum potential and returns its maximum over valid
    points.  ``energy`` is ``-dS/dt`` (a number for stationary states, or a
    field).  The ``edge`` outermost points on each side, where the one-sided
    stencils apply, are excluded.
    """
    c = constants.c
    if vqu is None:
        vqu = vqu_rel_static(state.amplitude, m, constants.hbar)
    p = momentum_field(state.action).values
    E = energy.values if isinstance(energy, ScalarField) else np.asarray(energy, dtype=float)
    mc = m * c
    res = np.abs((E / c) ** 2 - p**2 - mc**2 * (1.0 - vqu.values / (m * c**2))) / mc**2
    ok = vqu.mask.copy()
    if edge:
        ok[:edge] = ok[-edge:] = False
    if not ok.any():
        return 0.0
    return float(np.max(res[ok]))


@dataclass(frozen=True)
class StressTensorSample:
    """Diagonal energy-impulse components at one grid point of a static state.

    ``t00, t11`` are the quantum tensor itself; ``t00_total, t11_total`` add
    the completion ``(m R^2 c^2) delta`` that restores the dust form in the
    classical limit, and ``lambda_term`` is ``(8 pi G / c^4) m R^2 c^2``.
    ``error`` is set (and components are ``nan``) where ``V_qu > m c^2``.
    """

    position: float
    t00: float
    t11: float
    t00_total: float
    t11_total: float
    lambda_term: float
    error: Optional[str] = None


def stress_tensor_static(R: ScalarField, vqu: QuantumPotentialField, m: float,
                         sign: str = "matter",
                         constants: PhysicalConstants = PhysicalConstants()) -> List[StressTensorSample]:
    """Energy-impulse tensor density of a static state, ``u = (1, 0, 0, 0)``.

    With ``gamma = 1`` the tensor ``(m c^2 R^2) sqrt(1 - V_qu/m c^2) (u u - delta)``
    has ``T^0_0 = 0`` and ``T^1_1 = -m c^2 R^2 sqrt(1 - V_qu/m c^2)``.
    ``sign="antimatter"`` flips every output.  Masked points of ``vqu`` are
    treated as ``V_qu = 0`` (they carry negligible density).
    """
    if sign not in ("matter", "antimatter"):
        raise ValueError("sign must be 'matter' or 'antimatter'")
    s = 1.0 if sign == "matter" else -1.0
    c, G = constants.c, constants.G
    mc2 = m * c**2
    dust = mc2 * R.values**2
    kappa = 8.0 * math.pi * G / c**4
    v = np.where(vqu.mask, vqu.values, 0.0)
    out = []
    for x, d, vq in zip(R.grid.points, dust, v):
        if vq > mc2:
            nan = float("nan")
            out.append(StressTensorSample(float(x), nan, nan, nan, nan, nan, "V_qu exceeds m c^2"))
            continue
        root = math.sqrt(1.0 - vq / mc2)
        t00 = 0.0
        t11 = -d * root
        out.append(StressTensorSample(
            float(x),
            s * t00,
            s * t11,
            s * (t00 + d),
            s * (t11 + d),
            s * kappa * d,
        ))
    return out


def classical_infall_acceleration(r, u1, R_g: float, constants: PhysicalConstants = PhysicalConstants()):
    """Radial acceleration of the last collapsing dust shell.

    Returns ``-c^2 [ (1/2) dg00/dr (u^0)^2 + (1/2) dg11/dr (u^1)^2 ]`` with
    ``u^0 = sqrt(1 + (u^1)^2)``.  Negative values point inward; for ``u1 = 0``
    and ``r >> R_g`` this is the Newtonian ``-c^2 R_g / (2 r^2)``.  The
    magnitude diverges as ``r -> 0``.
    """
    r = np.asarray(r, dtype=float)
    u1 = np.asarray(u1, dtype=float)
    if np.any(r <= 0):
        raise ValueError("r must be positive")
    if np.any((r == R_g) & (u1 != 0)):
        raise HorizonError("moving shell at r = R_g: metric gradient is singular")
    dg00, dg11 = exterior_metric_gradient(r, R_g)
    u0_sq = 1.0 + u1**2
    kinetic = np.where(u1 == 0, 0.0, 0.5 * dg11 * u1**2)
    acc = -constants.c**2 * (0.5 * dg00 * u0_sq + kinetic)
    return acc if acc.ndim else float(acc)
