"""
Spatially correlated vacuum fluctuations.

A fluctuation of wavenumber ``k`` costs quantum-potential energy
``hbar^2 k^2 / 2m``; weighting each mode with its Boltzmann factor gives the
non-white spectrum ``S(k) = exp[-(k lambda_c / 2)^2]`` whose Fourier
transform is the Gaussian correlation ``G(d) = exp[-(d / lambda_c)^2]``.
Here ``lambda_c = 2 hbar / sqrt(2 m k_B T)`` is the thermal de Broglie
wavelength.

Fields are drawn by spectral synthesis on a periodic grid: real white noise
is transformed, multiplied by ``sqrt(S(k))`` and transformed back, then
scaled so that the point variance equals ``amplitude``.  Wavenumbers are
angular (``k = 2 pi / wavelength``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
from scipy.optimize import curve_fit

from .core import Grid1D, PhysicalConstants, ScalarField

MIN_ENSEMBLE = 100


class ResolutionError(ValueError):
    """Grid does not resolve, or does not contain, the correlation length."""


def thermal_wavelength(m: float, T: float, constants: PhysicalConstants = PhysicalConstants()) -> float:
    """Correlation length ``2 hbar / sqrt(2 m k_B T)``.

    ``T = 0`` returns ``inf``: the correlation length diverges in the
    deterministic limit.
    """
    if not m > 0:
        raise ValueError("mass must be positive")
    if T < 0:
        raise ValueError("temperature must be non-negative")
    if T == 0:
        return math.inf
    return 2.0 * constants.hbar / math.sqrt(2.0 * m * constants.k_B * T)


def spectrum(k, lambda_c: float):
    """Spectral weight ``exp[-(k lambda_c / 2)^2]``."""
    if not lambda_c > 0:
        raise ValueError("lambda_c must be positive")
    k = np.asarray(k, dtype=float)
    out = np.exp(-((k * lambda_c / 2.0) ** 2))
    return out if out.ndim else float(out)


def boltzmann_weight(k, m: float, T: float, constants: PhysicalConstants = PhysicalConstants()):
    """``exp[-V_qu(k) / k_B T]`` with ``V_qu(k) = hbar^2 k^2 / 2m``."""
    k = np.asarray(k, dtype=float)
    out = np.exp(-(constants.hbar * k) ** 2 / (2.0 * m) / (constants.k_B * T))
    return out if out.ndim else float(out)


def correlation_theory(d, lambda_c: float):
    """Gaussian correlation ``exp[-(d / lambda_c)^2]``."""
    d = np.asarray(d, dtype=float)
    return np.exp(-((d / lambda_c) ** 2))


@dataclass(frozen=True)
class NoiseSpec:
    """Gaussian random field with correlation length ``lambda_c`` on ``grid``."""

    lambda_c: float
    grid: Grid1D
    amplitude: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if not self.lambda_c > 0:
            raise ResolutionError("lambda_c must be positive")
        if self.grid.span < 10.0 * self.lambda_c:
            raise ResolutionError(
                f"grid span {self.grid.span:g} is shorter than 10 lambda_c = {10 * self.lambda_c:g}"
            )
        if self.grid.spacing > self.lambda_c / 8.0:
            raise ResolutionError(
                f"spacing {self.grid.spacing:g} exceeds lambda_c/8 = {self.lambda_c / 8:g}"
            )
        if not self.amplitude > 0:
            raise ValueError("amplitude must be positive")

    @property
    def wavenumbers(self) -> np.ndarray:
        return 2.0 * math.pi * np.fft.rfftfreq(self.grid.n_points, d=self.grid.spacing)


def _full_weights(n: int, h: float, weight: np.ndarray) -> np.ndarray:
    """Expand rfft-ordered weights to a full length-n spectrum (for Parseval sums)."""
    full_k = 2.0 * math.pi * np.fft.fftfreq(n, d=h)
    return np.interp(np.abs(full_k), 2.0 * math.pi * np.fft.rfftfreq(n, d=h), weight)


def spectral_variance(spec: NoiseSpec, spectrum_fn: Optional[Callable] = None) -> float:
    """Point variance of the unscaled synthesis, ``(1/n) sum_k S(k)``."""
    weight = _weights(spec, spectrum_fn)
    n = spec.grid.n_points
    return float(_full_weights(n, spec.grid.spacing, weight).sum() / n)


def _weights(spec: NoiseSpec, spectrum_fn: Optional[Callable]) -> np.ndarray:
    k = spec.wavenumbers
    if spectrum_fn is None:
        return spectrum(k, spec.lambda_c)
    return np.asarray(spectrum_fn(k), dtype=float) * np.ones_like(k)


def _synthesize(spec: NoiseSpec, rng: np.random.Generator, weight: np.ndarray, scale: float) -> np.ndarray:
    n = spec.grid.n_points
    white = rng.standard_normal(n)
    return scale * np.fft.irfft(np.fft.rfft(white) * np.sqrt(weight), n=n)


def sample_field(spec: NoiseSpec, spectrum_fn: Optional[Callable] = None,
                 rng: Optional[np.random.Generator] = None) -> ScalarField:
    """Draw one zero-mean Gaussian field with point variance ``spec.amplitude``.

    Deterministic given ``spec.seed`` unless an explicit ``rng`` is passed.
    ``spectrum_fn`` overrides the Gaussian spectrum (``lambda k: 1.0`` gives
    white noise).
    """
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    weight = _weights(spec, spectrum_fn)
    scale = math.sqrt(spec.amplitude / spectral_variance(spec, spectrum_fn))
    return ScalarField(spec.grid, _synthesize(spec, rng, weight, scale))


def sample_ensemble(spec: NoiseSpec, n_samples: int,
                    spectrum_fn: Optional[Callable] = None) -> list:
    """``n_samples`` fields, field ``i`` drawn from the stream seeded by ``(seed, i)``."""
    weight = _weights(spec, spectrum_fn)
    scale = math.sqrt(spec.amplitude / spectral_variance(spec, spectrum_fn))
    out = []
    for i in range(n_samples):
        rng = np.random.default_rng(np.random.SeedSequence([spec.seed, i]))
        out.append(ScalarField(spec.grid, _synthesize(spec, rng, weight, scale)))
    return out


def empirical_correlation(fields: Sequence[ScalarField], max_lag_points: Optional[int] = None) -> ScalarField:
    """Ensemble-averaged two-point function normalized to ``G(0) = 1``.

    Averages ``f(x) f(x + d)`` over all fields and all positions, treating
    each field as periodic.  The result lives on a lag grid ``0 .. d_max``
    with the field spacing.
    """
    if len(fields) < MIN_ENSEMBLE:
        raise ValueError(f"need at least {MIN_ENSEMBLE} fields, got {len(fields)}")
    grid = fields[0].grid
    if any(f.grid != grid for f in fields):
        raise ValueError("all fields must share one grid")
    data = np.stack([f.values for f in fields])
    n = grid.n_points
    spec = np.fft.rfft(data, axis=1)
    acov = np.fft.irfft((np.abs(spec) ** 2).mean(axis=0), n=n) / n
    n_lag = n // 2 + 1 if max_lag_points is None else min(max_lag_points, n // 2 + 1)
    n_lag = max(n_lag, 8)
    lag_grid = Grid1D(0.0, (n_lag - 1) * grid.spacing, n_lag)
    return ScalarField(lag_grid, acov[:n_lag] / acov[0])


def fit_correlation_width(G: ScalarField, max_lag: Optional[float] = None) -> float:
    """Least-squares width ``w`` of ``G(d) ~ exp[-(d/w)^2]``.

    Only lags up to ``max_lag`` (default: where ``G`` first drops below
    ``e^-4``) enter the fit.
    """
    d = G.grid.points
    g = G.values
    if max_lag is None:
        below = np.nonzero(g < math.exp(-4.0))[0]
        max_lag = d[below[0]] if below.size else d[-1]
    sel = d <= max_lag
    guess_idx = np.nonzero(g < math.exp(-1.0))[0]
    guess = d[guess_idx[0]] if guess_idx.size else d[-1]
    (w,), _ = curve_fit(lambda x, w: np.exp(-((x / w) ** 2)), d[sel], g[sel], p0=[guess])
    return float(abs(w))


def correlation_table(G: ScalarField, lambda_c: float) -> np.ndarray:
    """Columns ``(lag, G_empirical, G_theory)``."""
    d = G.grid.points
    return np.column_stack([d, G.values, correlation_theory(d, lambda_c)])
