"""
Grids, fields, physical constants and finite-difference primitives.

Everything else in the package is built on the types defined here.  All
objects are immutable: field values are stored as read-only numpy arrays and
every operation returns a new object.

Stencils
--------
Derivatives use second-order central differences in the interior and
second-order one-sided differences on the two boundary points, so the
documented order of accuracy is 2 everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
import scipy.constants as const

#: Relative amplitude floor below which a point is excluded from any
#: quantity that divides by the amplitude.
AMPLITUDE_FLOOR = 1e-12

MIN_POINTS = 8


class GridError(ValueError):
    """Raised when a discretization cannot be used."""


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid on ``[x_min, x_max]`` with ``n_points`` nodes."""

    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max)):
            raise GridError(f"grid bounds must be finite, got {self.x_min}, {self.x_max}")
        if int(self.n_points) != self.n_points or self.n_points < MIN_POINTS:
            raise GridError(f"need an integer n_points >= {MIN_POINTS}, got {self.n_points}")
        if not self.x_max > self.x_min:
            raise GridError(f"x_max must exceed x_min, got [{self.x_min}, {self.x_max}]")
        object.__setattr__(self, "n_points", int(self.n_points))

    @property
    def spacing(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @property
    def points(self) -> np.ndarray:
        x = np.linspace(self.x_min, self.x_max, self.n_points)
        x.flags.writeable = False
        return x

    @property
    def span(self) -> float:
        return self.x_max - self.x_min

    def __len__(self):
        return self.n_points

    def refined(self) -> "Grid1D":
        """Grid with the same bounds and half the spacing."""
        return replace(self, n_points=2 * self.n_points - 1)


@dataclass(frozen=True)
class RadialGrid(Grid1D):
    """Uniform grid in the radial coordinate, strictly excluding ``r = 0``."""

    def __post_init__(self):
        super().__post_init__()
        if not self.x_min > 0:
            raise GridError(f"radial grid needs r_min > 0, got {self.x_min}")

    @property
    def r_min(self) -> float:
        return self.x_min

    @property
    def r_max(self) -> float:
        return self.x_max


def make_uniform_grid(x_min: float, x_max: float, n: int) -> Grid1D:
    """Build a :class:`Grid1D`, validating bounds and point count."""
    return Grid1D(float(x_min), float(x_max), n)


def make_radial_grid(r_min: float, r_max: float, n: int) -> RadialGrid:
    return RadialGrid(float(r_min), float(r_max), n)


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class ScalarField:
    """Real function sampled on a grid.

    Parameters
    ----------
    grid : Grid1D
        The sampling grid (a :class:`RadialGrid` for radial quantities).
    values : array_like
        One finite value per grid point.
    """

    grid: Grid1D
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = _frozen(self.values)
        if values.shape != (self.grid.n_points,):
            raise GridError(
                f"field has shape {values.shape}, grid has {self.grid.n_points} points"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("field values must be finite")
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, grid: Grid1D, func) -> "ScalarField":
        return cls(grid, func(grid.points))

    @property
    def points(self) -> np.ndarray:
        return self.grid.points

    def with_values(self, values) -> "ScalarField":
        return ScalarField(self.grid, values)


def _require_uniform(f: ScalarField) -> None:
    if not isinstance(f.grid, Grid1D):
        raise GridError("finite differences need a uniform Grid1D")
    x = f.grid.points
    dx = np.diff(x)
    # linspace rounding scales with |x|, not with the spacing
    slack = 64 * np.finfo(float).eps * np.abs(x).max()
    if not np.allclose(dx, f.grid.spacing, rtol=1e-9, atol=slack):
        raise GridError("grid is not uniform")


def first_derivative_values(values: np.ndarray, h: float) -> np.ndarray:
    """Second-order first derivative of sampled values (one-sided at edges)."""
    return np.gradient(np.asarray(values, dtype=float), h, edge_order=2)


def second_derivative_values(values: np.ndarray, h: float) -> np.ndarray:
    """Second-order second derivative of sampled values.

    Interior points use ``(f[i+1] - 2 f[i] + f[i-1]) / h**2``; the two edge
    points use the one-sided stencil ``(2, -5, 4, -1) / h**2``.
    """
    f = np.asarray(values, dtype=float)
    d2 = np.empty_like(f)
    d2[1:-1] = f[2:] - 2.0 * f[1:-1] + f[:-2]
    d2[0] = 2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]
    d2[-1] = 2.0 * f[-1] - 5.0 * f[-2] + 4.0 * f[-3] - f[-4]
    return d2 / h**2


def first_derivative(f: ScalarField) -> ScalarField:
    _require_uniform(f)
    return f.with_values(first_derivative_values(f.values, f.grid.spacing))


def second_derivative(f: ScalarField) -> ScalarField:
    """Second derivative of ``f``, accurate to O(h**2) at every point."""
    _require_uniform(f)
    return f.with_values(second_derivative_values(f.values, f.grid.spacing))


def weighted_divergence_values(
    values: np.ndarray, r: np.ndarray, h: float, inner: np.ndarray, outer: np.ndarray
) -> np.ndarray:
    """Evaluate ``(1/outer) d/dr (inner * df/dr)`` by the product rule."""
    df = first_derivative_values(values, h)
    d2f = second_derivative_values(values, h)
    dinner = first_derivative_values(inner, h)
    return (inner * d2f + dinner * df) / outer


def radial_laplacian(f: ScalarField) -> ScalarField:
    """Spherically symmetric Laplacian ``(1/r**2) d/dr (r**2 df/dr)``."""
    if not isinstance(f.grid, RadialGrid):
        raise GridError("radial_laplacian needs a RadialGrid with r_min > 0")
    _require_uniform(f)
    h = f.grid.spacing
    r = f.grid.points
    lap = second_derivative_values(f.values, h) + 2.0 * first_derivative_values(f.values, h) / r
    return f.with_values(lap)


def laplacian_values(f: ScalarField) -> np.ndarray:
    """Flat-space Laplacian matching the grid geometry (1D or radial)."""
    if isinstance(f.grid, RadialGrid):
        return radial_laplacian(f).values
    return second_derivative(f).values


def amplitude_mask(values: np.ndarray, floor: float = AMPLITUDE_FLOOR) -> np.ndarray:
    """Boolean mask of points whose ``|amplitude|`` clears the relative floor."""
    a = np.abs(np.asarray(values, dtype=float))
    peak = a.max() if a.size else 0.0
    if peak == 0.0:
        return np.zeros(a.shape, dtype=bool)
    return a >= floor * peak


def trapezoid(values: np.ndarray, grid: Grid1D, weight: Optional[np.ndarray] = None) -> float:
    y = np.asarray(values, dtype=float)
    if weight is not None:
        y = y * weight
    return float(np.trapezoid(y, dx=grid.spacing))


# ---------------------------------------------------------------------------
# constants and scenarios


@dataclass(frozen=True)
class PhysicalConstants:
    """Reduced Planck constant, speed of light, Newton constant, Boltzmann constant."""

    hbar: float = 1.0
    c: float = 1.0
    G: float = 1.0
    k_B: float = 1.0

    def __post_init__(self):
        for name in ("hbar", "c", "G", "k_B"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be finite and positive, got {value}")

    @classmethod
    def natural(cls) -> "PhysicalConstants":
        return cls(1.0, 1.0, 1.0, 1.0)

    @classmethod
    def si(cls) -> "PhysicalConstants":
        """CODATA values as shipped with :mod:`scipy.constants`."""
        return cls(const.hbar, const.c, const.G, const.k)

    @property
    def is_natural(self) -> bool:
        return self.hbar == self.c == self.G == self.k_B == 1.0

    # Planck scales in the units of this constant set
    @property
    def planck_mass(self) -> float:
        return math.sqrt(self.hbar * self.c / self.G)

    @property
    def planck_length(self) -> float:
        return math.sqrt(self.hbar * self.G / self.c**3)

    @property
    def planck_time(self) -> float:
        return self.planck_length / self.c

    @property
    def planck_temperature(self) -> float:
        return self.planck_mass * self.c**2 / self.k_B


UNITS_MODES = ("natural", "SI")


@dataclass(frozen=True)
class Scenario:
    """A particle of mass ``mass`` with optional oscillator frequency and temperature.

    ``units_mode`` is ``"natural"`` (Planck units, all constants 1) or
    ``"SI"``.  Use :meth:`to_natural` / :meth:`to_si` to convert.
    """

    mass: float
    oscillator_freq: Optional[float] = None
    temperature: Optional[float] = None
    units_mode: str = "natural"
    constants: PhysicalConstants = None

    def __post_init__(self):
        if self.units_mode not in UNITS_MODES:
            raise ValueError(f"units_mode must be one of {UNITS_MODES}")
        if self.constants is None:
            consts = PhysicalConstants.natural() if self.units_mode == "natural" else PhysicalConstants.si()
            object.__setattr__(self, "constants", consts)
        if self.units_mode == "natural" and not self.constants.is_natural:
            raise ValueError("natural units require hbar = c = G = k_B = 1")
        if not self.mass > 0:
            raise ValueError(f"mass must be positive, got {self.mass}")
        if self.oscillator_freq is not None and not self.oscillator_freq > 0:
            raise ValueError("oscillator_freq must be positive")
        if self.temperature is not None and not self.temperature >= 0:
            raise ValueError("temperature must be non-negative")

    def to_natural(self) -> "Scenario":
        if self.units_mode == "natural":
            return self
        k = self.constants
        return Scenario(
            mass=self.mass / k.planck_mass,
            oscillator_freq=None if self.oscillator_freq is None else self.oscillator_freq * k.planck_time,
            temperature=None if self.temperature is None else self.temperature / k.planck_temperature,
            units_mode="natural",
        )

    def to_si(self, constants: Optional[PhysicalConstants] = None) -> "Scenario":
        if self.units_mode == "SI":
            return self
        k = constants or PhysicalConstants.si()
        return Scenario(
            mass=self.mass * k.planck_mass,
            oscillator_freq=None if self.oscillator_freq is None else self.oscillator_freq / k.planck_time,
            temperature=None if self.temperature is None else self.temperature * k.planck_temperature,
            units_mode="SI",
            constants=k,
        )

