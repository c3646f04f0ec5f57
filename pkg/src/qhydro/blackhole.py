"""
Exterior Schwarzschild geometry, the maximally collapsed quantum profile and
the minimum black-hole mass.

A mass ``m`` has gravitational radius ``R_g = 2 G m / c**2`` and Compton
length ``a = hbar / (m c)``.  The maximally collapsed stationary state keeps
its mass inside ``R0 = 2 a``; a black hole needs ``R0 <= R_g``, which first
holds at the Planck mass ``sqrt(hbar c / G)``.

Typical use::

    >>> from qhydro.core import PhysicalConstants
    >>> k = PhysicalConstants.natural()
    >>> critical_mass_by_search(k, 1e-12)   # doctest: +ELLIPSIS
    1.0...
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Union

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.optimize import brentq

from .core import PhysicalConstants, RadialGrid, ScalarField, first_derivative_values, trapezoid
from .qpotential import QuantumPotentialField, vqu_curved_radial_metric, vqu_rel_static


class HorizonError(ValueError):
    """Metric factors requested exactly at ``r = R_g``."""


class IntegrationConstant(enum.Enum):
    """Exact limits of the integration constant ``C_n``."""

    MINUS_INFINITY = "-inf"

    def __repr__(self):
        return "C_n=-inf"


CN_MINUS_INFINITY = IntegrationConstant.MINUS_INFINITY

CnLike = Union[float, IntegrationConstant]


def gravitational_radius(m: float, constants: PhysicalConstants = PhysicalConstants()) -> float:
    if not m > 0:
        raise ValueError("mass must be positive")
    return 2.0 * constants.G * m / constants.c**2


def compton_length(m: float, constants: PhysicalConstants = PhysicalConstants()) -> float:
    if not m > 0:
        raise ValueError("mass must be positive")
    return constants.hbar / (m * constants.c)


def collapse_radius(m: float, constants: PhysicalConstants = PhysicalConstants(),
                    factor: float = 2.0) -> float:
    """Radius ``factor * a`` of the maximally collapsed state (posited, ``factor = 2``)."""
    return factor * compton_length(m, constants)


class MetricFactors(NamedTuple):
    g00: float
    g11: float
    interior: bool


def exterior_metric(r, R_g: float) -> MetricFactors:
    """Vacuum Schwarzschild factors ``g00 = 1 - R_g/r``, ``g11 = -1/(1 - R_g/r)``.

    Inside the horizon the same expressions are returned (both change sign)
    with ``interior`` set; no physical claim is attached to that region.
    Accepts scalars or arrays; ``interior`` is then true if any point is
    inside.
    """
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr <= 0):
        raise ValueError("r must be positive")
    f = 1.0 - R_g / r_arr
    if np.any(f == 0.0):
        raise HorizonError("metric factors are singular at r = R_g")
    g00, g11 = f, -1.0 / f
    interior = bool(np.any(r_arr < R_g))
    if r_arr.ndim == 0:
        return MetricFactors(float(g00), float(g11), interior)
    return MetricFactors(g00, g11, interior)


def exterior_metric_gradient(r, R_g: float):
    """Radial derivatives ``(dg00/dr, dg11/dr)`` of :func:`exterior_metric`."""
    r = np.asarray(r, dtype=float)
    dg00 = R_g / r**2
    with np.errstate(divide="ignore"):
        dg11 = R_g / (r - R_g) ** 2
    return dg00, dg11


def vacuum_residuals(grid: RadialGrid, R_g: float):
    """Discrete residuals of the two vacuum field equations on ``grid``.

    With ``e^-lam = 1 - R_g/r`` and ``nu = -lam = ln(1 - R_g/r)``::

        -e^-lam (nu'/r + 1/r^2) + 1/r^2
        -e^-lam (1/r^2 - lam'/r) + 1/r^2

    ``nu'`` and ``lam'`` are finite differences, so both residuals vanish up
    to discretization error.  The grid must lie entirely outside ``R_g``.
    """
    r = grid.points
    if r[0] <= R_g:
        raise ValueError("vacuum residuals are evaluated outside the horizon only")
    nu = np.log(1.0 - R_g / r)
    lam = -nu
    h = grid.spacing
    e_mlam = np.exp(-lam)
    res_rr = -e_mlam * (first_derivative_values(nu, h) / r + 1.0 / r**2) + 1.0 / r**2
    res_tt = -e_mlam * (1.0 / r**2 - first_derivative_values(lam, h) / r) + 1.0 / r**2
    return res_rr, res_tt


def vqu_exterior_profile(r, R_g: float, C_n: CnLike, m: float,
                         constants: PhysicalConstants = PhysicalConstants()):
    """Exterior quantum potential ``m c^2 (1 - exp[-(1 - R_g/r) + C_n])``.

    ``C_n`` is a float or :data:`CN_MINUS_INFINITY`; the latter gives
    ``m c^2`` exactly at every radius.
    """
    mc2 = m * constants.c**2
    r = np.asarray(r, dtype=float)
    if C_n is CN_MINUS_INFINITY or C_n == -math.inf:
        out = np.full(r.shape, mc2)
    else:
        out = mc2 * (1.0 - np.exp(-(1.0 - R_g / r) + C_n))
    return out if out.ndim else float(out)


def min_mass(constants: PhysicalConstants = PhysicalConstants()) -> float:
    """Planck mass ``sqrt(hbar c / G)``."""
    return math.sqrt(constants.hbar * constants.c / constants.G)


class BlackHoleVerdict(NamedTuple):
    is_black_hole: bool
    ratio: float


def is_black_hole(m: float, constants: PhysicalConstants = PhysicalConstants()) -> BlackHoleVerdict:
    """Whether the collapsed state fits inside the horizon.

    ``ratio = hbar / (m c R_g) = m_p^2 / (2 m^2)``; the predicate is
    ``ratio < 1/2``.
    """
    R_g = gravitational_radius(m, constants)
    ratio = constants.hbar / (m * constants.c * R_g)
    return BlackHoleVerdict(ratio < 0.5, ratio)


def critical_mass_by_search(constants: PhysicalConstants = PhysicalConstants(),
                            tol: float = 1e-10, r0_factor: float = 2.0) -> float:
    """Smallest mass with ``R0(m) <= R_g(m)``, found by root bracketing.

    Only :func:`compton_length` and :func:`gravitational_radius` are used.
    The search runs on ``ln(R0/R_g)`` as a function of ``ln m``, which is
    well scaled in any unit system.
    """
    if not 1e-14 < tol < 1e-2:
        raise ValueError("tol must lie in (1e-14, 1e-2)")

    def excess(log_m):
        m = math.exp(log_m)
        return math.log(collapse_radius(m, constants, r0_factor)) - math.log(gravitational_radius(m, constants))

    lo = hi = 0.0
    for _ in range(400):
        if excess(lo) > 0:
            break
        lo -= 1.0
    for _ in range(400):
        if excess(hi) < 0:
            break
        hi += 1.0
    if not (excess(lo) > 0 > excess(hi)):
        raise RuntimeError("could not bracket the critical mass")
    # relative tolerance on m equals absolute tolerance on ln m
    log_m = brentq(excess, lo, hi, xtol=tol * 1e-2, rtol=4 * np.finfo(float).eps, maxiter=500)
    return math.exp(log_m)


# ---------------------------------------------------------------------------
# collapse profile


@dataclass(frozen=True)
class BlackHoleScenario:
    """A mass ``m`` with its radial grid and integration constant.

    Derived lengths are properties, so they are never stale.
    """

    mass: float
    constants: PhysicalConstants = field(default_factory=PhysicalConstants.natural)
    C_n: CnLike = CN_MINUS_INFINITY
    grid: Optional[RadialGrid] = None
    horizon_margin: float = 2.0

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError("mass must be positive")
        if not self.horizon_margin >= 0:
            raise ValueError("horizon_margin must be non-negative")
        if self.grid is None:
            R_g, a = self.R_g, self.a
            object.__setattr__(self, "grid", RadialGrid(1e-6 * a, 3.0 * max(R_g, 2.0 * a), 6001))

    @property
    def R_g(self) -> float:
        return gravitational_radius(self.mass, self.constants)

    @property
    def a(self) -> float:
        return compton_length(self.mass, self.constants)

    @property
    def R0(self) -> float:
        return collapse_radius(self.mass, self.constants)

    @property
    def rest_energy(self) -> float:
        return self.mass * self.constants.c**2

    def horizon_clearance(self) -> float:
        """Distance from ``R_g`` to the nearest grid point, in grid spacings."""
        r = self.grid.points
        return float(np.abs(r - self.R_g).min() / self.grid.spacing)

    def horizon_mask(self) -> np.ndarray:
        """True at nodes at least ``horizon_margin`` spacings away from ``R_g``."""
        return np.abs(self.grid.points - self.R_g) >= self.horizon_margin * self.grid.spacing


def critical_scenario(constants: PhysicalConstants = PhysicalConstants(), excess: float = 0.05,
                      n_points: int = 8001) -> BlackHoleScenario:
    """Scenario with ``m = (1 + excess) m_p``, just past the critical mass.

    The grid is shifted so that ``R_g`` sits midway between two nodes.
    """
    m = (1.0 + excess) * min_mass(constants)
    R_g = gravitational_radius(m, constants)
    a = compton_length(m, constants)
    r_max = 2.5 * R_g
    h = r_max / n_points
    r_min = R_g - h * (math.floor(R_g / h) - 0.5)
    if r_min < 0.01 * a:
        r_min += h
    grid = RadialGrid(r_min, r_min + (n_points - 1) * h, n_points)
    return BlackHoleScenario(m, constants, CN_MINUS_INFINITY, grid)


@dataclass(frozen=True)
class CollapseProfile:
    """Radial amplitude of the maximally collapsed state and its diagnostics."""

    amplitude: ScalarField
    R0: float
    enclosed_fraction_at_R0: float
    vqu_at_center_scale: float
    zero_order_deviation: float
    regime_ratio: np.ndarray = field(repr=False)
    correction: bool = True


def log_amplitude_slope(r, m: float, R_g: float, constants: PhysicalConstants, correction: bool = True):
    """``d ln R / dr = -(2 / a^2) r (1 + (r - R_g)/R_g)`` near the horizon.

    With ``correction=False`` only the zero-order term ``-(2/a^2) r`` is kept,
    whose solution is ``exp(-r^2/a^2)``.
    """
    k2 = (m * constants.c / constants.hbar) ** 2
    r = np.asarray(r, dtype=float)
    slope = -2.0 * k2 * r
    if correction:
        slope = slope * (1.0 + (r - R_g) / R_g)
    return slope


def normalize_radial(values: np.ndarray, grid: RadialGrid) -> np.ndarray:
    """Scale ``values`` so that ``integral 4 pi r^2 R^2 dr = 1`` on ``grid``."""
    r = grid.points
    return values / math.sqrt(trapezoid(values**2, grid, 4.0 * math.pi * r**2))


def enclosed_fraction(amplitude: ScalarField, radius: float) -> float:
    """Fraction of ``integral 4 pi r^2 R^2`` lying inside ``radius``."""
    r = amplitude.grid.points
    dens = 4.0 * math.pi * r**2 * amplitude.values**2
    total = trapezoid(dens, amplitude.grid)
    inside = r <= radius
    return float(np.trapezoid(dens[inside], r[inside]) / total)


def regime_ratio(r, R_g: float):
    """Dimensionless check of the near-horizon approximation.

    ``R_g |d/dr(r^2 (R_g/r - 1))| / |r^2 (R_g/r - 1)|``; large values mean the
    derivative term dominates as assumed.
    """
    r = np.asarray(r, dtype=float)
    f = R_g * r - r**2
    with np.errstate(divide="ignore"):
        return R_g * np.abs(R_g - 2.0 * r) / np.abs(f)


def solve_radial_profile(scenario: BlackHoleScenario, correction: bool = True) -> CollapseProfile:
    """Integrate the log-amplitude equation outward from the inner grid edge.

    The result is normalized over the grid and compared with the zero-order
    Gaussian ``exp(-r^2/a^2)`` (``zero_order_deviation`` is the L2 distance
    between the two normalized profiles).
    """
    grid = scenario.grid
    r = grid.points
    m, k = scenario.mass, scenario.constants
    R_g, a = scenario.R_g, scenario.a
    if r[0] <= 0 or a <= 0 or R_g <= 0:
        raise ValueError("profile integration needs positive radii and lengths")

    # integrate in units of a so the solver sees O(1) numbers
    def rhs(x, y):
        return a * log_amplitude_slope(x * a, m, R_g, k, correction)

    x = r / a
    sol = solve_ivp(rhs, (x[0], x[-1]), [0.0], method="DOP853", t_eval=x,
                    rtol=1e-13, atol=1e-13)
    if not sol.success:
        raise RuntimeError(f"profile integration failed: {sol.message}")
    log_R = sol.y[0] - sol.y[0].max()
    amp = normalize_radial(np.exp(log_R), grid)
    gauss = normalize_radial(np.exp(-(r / a) ** 2), grid)
    deviation = math.sqrt(trapezoid((amp - gauss) ** 2, grid, 4.0 * math.pi * r**2))

    field_R = ScalarField(grid, amp)
    center = vqu_rel_static(field_R, m, k.hbar)
    return CollapseProfile(
        amplitude=field_R,
        R0=scenario.R0,
        enclosed_fraction_at_R0=enclosed_fraction(field_R, scenario.R0),
        vqu_at_center_scale=float(center.values[0]),
        zero_order_deviation=deviation,
        regime_ratio=regime_ratio(r, R_g),
        correction=correction,
    )


def gaussian_enclosed_fraction(x: float) -> float:
    """Fraction of ``4 pi r^2 exp(-2 r^2/a^2)`` inside ``r = x a``, by quadrature."""
    num = quad(lambda s: s**2 * math.exp(-2.0 * s**2), 0.0, x, epsabs=0, epsrel=1e-13)[0]
    den = quad(lambda s: s**2 * math.exp(-2.0 * s**2), 0.0, math.inf, epsabs=0, epsrel=1e-13)[0]
    return num / den


def curved_vqu_on_profile(scenario: BlackHoleScenario,
                          amplitude: Optional[ScalarField] = None) -> QuantumPotentialField:
    """Curved-space quantum potential of a radial amplitude on the exterior metric.

    Defaults to the zero-order Gaussian ``exp(-r^2/a^2)``.  Inside ``R_g`` the
    analytically continued metric factors are used (``sqrt(|g00 g11|) = 1``,
    ``e^-lam = 1 - R_g/r``).  Nodes closer to ``R_g`` than
    ``scenario.horizon_margin`` spacings are masked out of the result.

    Raises
    ------
    HorizonError
        If a node coincides with ``R_g``.
    """
    grid = scenario.grid
    r = grid.points
    if amplitude is None:
        amplitude = ScalarField(grid, np.exp(-(r / scenario.a) ** 2))
    g00, g11, _ = exterior_metric(r, scenario.R_g)
    vqu = vqu_curved_radial_metric(amplitude, g00, g11, scenario.mass, scenario.constants.hbar)
    keep = vqu.mask & scenario.horizon_mask()
    return QuantumPotentialField(grid, np.where(keep, vqu.values, np.nan), keep, vqu.convention)


def band_median_vqu(scenario: BlackHoleScenario) -> float:
    """Median of ``|V_qu|`` over ``R0 < r <= R_g`` for the zero-order profile."""
    vqu = curved_vqu_on_profile(scenario)
    r = scenario.grid.points
    band = (r > scenario.R0) & (r <= scenario.R_g) & vqu.mask
    if not band.any():
        raise ValueError("no grid points in R0 < r <= R_g; the scenario is below the critical mass")
    return float(np.median(np.abs(vqu.values[band])))
