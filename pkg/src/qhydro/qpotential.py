"""
Quantum potential in its flat nonrelativistic, flat static relativistic and
curved radial forms, plus the quantum-potential energy functional.

The two flat normalizations differ by a factor of two and are kept as
separate, explicitly named conventions:

========================  ===============================================
``"nonrel"``              ``-(hbar**2 / 2m) lap(R) / R``
``"rel_static"``          ``-(hbar**2 / m) lap(R) / R``
``"curved_radial"``       ``-(hbar**2 / m) (1/(R sqrt(-g))) d_r(sqrt(-g) e^-lam d_r R)``
========================  ===============================================

``lap`` is the second derivative on a :class:`~qhydro.core.Grid1D` and the
radial Laplacian on a :class:`~qhydro.core.RadialGrid`.  The sign is chosen
so that a localized density peak produces a positive (repulsive) potential
at its center.

Amplitudes may be passed signed (e.g. an excited eigenfunction); the ratio
``lap(R)/R`` is insensitive to the overall sign and stays smooth through
nodes.  Points where ``|R|`` falls below ``AMPLITUDE_FLOOR * max|R|`` are
masked and carry ``nan``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import (
    AMPLITUDE_FLOOR,
    Grid1D,
    RadialGrid,
    ScalarField,
    amplitude_mask,
    laplacian_values,
    trapezoid,
    weighted_divergence_values,
)

CONVENTIONS = ("nonrel", "rel_static", "curved_radial")


class MaskedAmplitudeError(ValueError):
    """Every grid point lies below the amplitude floor."""


@dataclass(frozen=True)
class QuantumPotentialField:
    """Quantum potential on a grid, ``nan`` at masked points.

    ``mask`` is ``True`` where the value is valid.
    """

    grid: Grid1D
    values: np.ndarray = field(repr=False)
    mask: np.ndarray = field(repr=False)
    convention: str = "nonrel"

    def __post_init__(self):
        if self.convention not in CONVENTIONS:
            raise ValueError(f"unknown convention {self.convention!r}")
        values = np.array(self.values, dtype=float)
        mask = np.array(self.mask, dtype=bool)
        values[~mask] = np.nan
        values.flags.writeable = False
        mask.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "mask", mask)

    @property
    def points(self) -> np.ndarray:
        return self.grid.points

    @property
    def valid_values(self) -> np.ndarray:
        return self.values[self.mask]

    def scaled(self, factor: float) -> "QuantumPotentialField":
        return QuantumPotentialField(self.grid, self.values * factor, self.mask, self.convention)


def _checked_mask(R: ScalarField, floor: float) -> np.ndarray:
    mask = amplitude_mask(R.values, floor)
    if not mask.any():
        raise MaskedAmplitudeError("amplitude is below the floor at every grid point")
    return mask


def _ratio(numerator: np.ndarray, R: np.ndarray, mask: np.ndarray) -> np.ndarray:
    out = np.full(R.shape, np.nan)
    out[mask] = numerator[mask] / R[mask]
    return out


def vqu_nonrel(R: ScalarField, m: float, hbar: float = 1.0,
               floor: float = AMPLITUDE_FLOOR) -> QuantumPotentialField:
    """Nonrelativistic quantum potential ``-(hbar**2/2m) lap(R)/R``.

    Parameters
    ----------
    R : ScalarField
        Amplitude ``sqrt(n)``; a signed real eigenfunction is also accepted.
    m : float
        Particle mass.
    hbar : float
        Reduced Planck constant in the chosen units.

    Returns
    -------
    QuantumPotentialField
        Convention ``"nonrel"``.
    """
    mask = _checked_mask(R, floor)
    lap = laplacian_values(R)
    values = -(hbar**2 / (2.0 * m)) * _ratio(lap, R.values, mask)
    return QuantumPotentialField(R.grid, values, mask, "nonrel")


def vqu_rel_static(R: ScalarField, m: float, hbar: float = 1.0,
                   floor: float = AMPLITUDE_FLOOR) -> QuantumPotentialField:
    """Static relativistic quantum potential ``-(hbar**2/m) lap(R)/R``.

    For a time-independent amplitude the d'Alembertian reduces to minus the
    spatial Laplacian.  The result is exactly twice :func:`vqu_nonrel`.
    """
    mask = _checked_mask(R, floor)
    lap = laplacian_values(R)
    values = -(hbar**2 / m) * _ratio(lap, R.values, mask)
    return QuantumPotentialField(R.grid, values, mask, "rel_static")


def vqu_curved_radial_metric(R: ScalarField, g00: np.ndarray, g11: np.ndarray, m: float,
                             hbar: float = 1.0,
                             floor: float = AMPLITUDE_FLOOR) -> QuantumPotentialField:
    """Curved radial quantum potential from the metric components directly.

    Uses ``sqrt(-g) / sin(theta) = sqrt(|g00 g11|) r**2`` and
    ``e^-lam = -1/g11``, which stays finite where the logarithmic metric
    exponents do not (inside the horizon).
    """
    if not isinstance(R.grid, RadialGrid):
        raise TypeError("curved radial quantum potential needs a RadialGrid")
    g00 = np.broadcast_to(np.asarray(g00, dtype=float), R.values.shape)
    g11 = np.broadcast_to(np.asarray(g11, dtype=float), R.values.shape)
    if not (np.all(np.isfinite(g00)) and np.all(np.isfinite(g11))) or np.any(g11 == 0):
        raise ValueError("metric components must be finite and g11 non-zero on the grid")
    mask = _checked_mask(R, floor)
    r = R.grid.points
    vol = np.sqrt(np.abs(g00 * g11)) * r**2
    inner = vol * (-1.0 / g11)
    div = weighted_divergence_values(R.values, r, R.grid.spacing, inner, vol)
    values = -(hbar**2 / m) * _ratio(div, R.values, mask)
    return QuantumPotentialField(R.grid, values, mask, "curved_radial")


def vqu_curved_radial(R: ScalarField, nu: ScalarField, lam: ScalarField, m: float,
                      hbar: float = 1.0,
                      floor: float = AMPLITUDE_FLOOR) -> QuantumPotentialField:
    """Quantum potential in a static central-symmetric metric.

    The metric is ``ds^2 = e^nu c^2 dt^2 - r^2 dOmega^2 - e^lam dr^2``; the
    returned field is

    ``-(hbar**2/m) / (R e^((nu+lam)/2) r^2) * d_r[e^((nu+lam)/2) r^2 e^-lam d_r R]``.

    With ``nu = lam = 0`` this coincides with :func:`vqu_rel_static` on the
    same radial grid.
    """
    nu_v = np.asarray(nu.values)
    lam_v = np.asarray(lam.values)
    if not (np.all(np.isfinite(nu_v)) and np.all(np.isfinite(lam_v))):
        raise ValueError("metric exponents must be finite on the grid")
    return vqu_curved_radial_metric(R, np.exp(nu_v), -np.exp(lam_v), m, hbar=hbar, floor=floor)


def quantum_energy(R: ScalarField, m: float, hbar: float = 1.0,
                   floor: float = AMPLITUDE_FLOOR,
                   weight: Optional[np.ndarray] = None) -> float:
    """Quantum-potential energy ``integral n * V_qu`` (nonrelativistic form).

    The integrand is evaluated as ``-(hbar**2/2m) R lap(R)``, which equals
    ``n * V_qu`` on valid points without dividing by ``R``; masked points
    contribute zero.  Pass ``weight = 4 pi r**2`` for a radial volume
    integral.
    """
    mask = _checked_mask(R, floor)
    norm = trapezoid(R.values**2, R.grid, weight)
    if not np.isfinite(norm):
        raise ValueError("density is not normalizable on this grid")
    integrand = -(hbar**2 / (2.0 * m)) * R.values * laplacian_values(R)
    integrand = np.where(mask, integrand, 0.0)
    return trapezoid(integrand, R.grid, weight)
