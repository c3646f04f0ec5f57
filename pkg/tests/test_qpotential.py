import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from qhydro.core import ScalarField, make_radial_grid, make_uniform_grid
from qhydro.eigensolver import oscillator_eigenfunction
from qhydro.qpotential import (
    MaskedAmplitudeError,
    QuantumPotentialField,
    quantum_energy,
    vqu_curved_radial,
    vqu_curved_radial_metric,
    vqu_nonrel,
    vqu_rel_static,
)


def gaussian_field(sigma=1.0, n=2001, half_width=5.0):
    g = make_uniform_grid(-half_width * sigma, half_width * sigma, n)
    return ScalarField(g, np.exp(-g.points**2 / (2 * sigma**2)))


class TestNonrel:
    def test_constant_is_zero(self):
        R = ScalarField(make_uniform_grid(-1, 1, 101), np.full(101, 0.3))
        v = vqu_nonrel(R, 1.0)
        assert v.mask.all()
        assert np.abs(v.valid_values).max() < 1e-9

    @pytest.mark.parametrize("lam", [1.0, 0.5, 0.25])
    def test_cosine_constant(self, lam):
        g = make_uniform_grid(0, 2, 4001)
        R = ScalarField(g, np.cos(2 * math.pi * g.points / lam))
        v = vqu_nonrel(R, 1.0)
        target = 0.5 * (2 * math.pi / lam) ** 2
        assert v.valid_values == pytest.approx(target, rel=1e-3)

    def test_gaussian_closed_form(self):
        sigma = 0.7
        R = gaussian_field(sigma)
        x = R.points
        v = vqu_nonrel(R, 1.0)
        exact = 0.5 * (1 / sigma**2 - x**2 / sigma**4)
        inner = np.abs(x) <= 3 * sigma
        assert np.abs(v.values[inner] - exact[inner]).max() < 1e-4
        assert v.values[len(x) // 2] == pytest.approx(1 / (2 * sigma**2), rel=1e-5)

    @pytest.mark.parametrize("s", [2.0, 4.0])
    def test_scaling_law(self, s):
        base = gaussian_field(1.0)
        g = make_uniform_grid(base.grid.x_min * s, base.grid.x_max * s, base.grid.n_points)
        stretched = ScalarField(g, np.exp(-(g.points / s) ** 2 / 2))
        a = vqu_nonrel(base, 1.0).values
        b = vqu_nonrel(stretched, 1.0).values
        assert b == pytest.approx(a / s**2, rel=1e-6)

    @settings(max_examples=25, deadline=None)
    @given(st.floats(0.1, 50.0))
    def test_mass_law(self, m):
        R = gaussian_field(1.0, n=301)
        assert vqu_nonrel(R, m).values == pytest.approx(vqu_nonrel(R, 1.0).values / m, rel=1e-13)

    def test_hbar_law(self):
        R = gaussian_field(1.0, n=301)
        assert vqu_nonrel(R, 1.0, hbar=3.0).values == pytest.approx(9 * vqu_nonrel(R, 1.0).values)

    def test_node_masking(self):
        g = make_uniform_grid(-6, 6, 1201)
        R = ScalarField(g, oscillator_eigenfunction(1, g.points))
        v = vqu_nonrel(R, 1.0)
        node = np.argmin(np.abs(g.points))
        assert not v.mask[node]
        assert np.isnan(v.values[node])
        assert np.all(np.isfinite(v.valid_values))
        # mask matches the amplitude floor exactly
        peak = np.abs(R.values).max()
        assert np.array_equal(v.mask, np.abs(R.values) >= 1e-12 * peak)

    def test_all_zero_raises(self):
        with pytest.raises(MaskedAmplitudeError):
            vqu_nonrel(ScalarField(make_uniform_grid(0, 1, 11), np.zeros(11)), 1.0)

    def test_unknown_convention(self):
        g = make_uniform_grid(0, 1, 11)
        with pytest.raises(ValueError):
            QuantumPotentialField(g, np.zeros(11), np.ones(11, bool), "weird")


class TestRelStatic:
    def test_twice_nonrel(self):
        R = gaussian_field(1.3, n=501)
        assert vqu_rel_static(R, 2.0).values == pytest.approx(2 * vqu_nonrel(R, 2.0).values, rel=1e-14)

    def test_constant_is_zero(self):
        R = ScalarField(make_radial_grid(0.1, 1, 101), np.ones(101))
        assert np.abs(vqu_rel_static(R, 1.0).valid_values).max() < 1e-9

    def test_compton_gaussian_center(self):
        # natural units m = 1, a = 1: V(0) = 6 m c^2
        g = make_radial_grid(1e-4, 4.0, 8001)
        R = ScalarField(g, np.exp(-g.points**2))
        v = vqu_rel_static(R, 1.0)
        assert v.values[1] == pytest.approx(6.0, rel=1e-4)


def symbolic_curved_vqu(radii, R_g, a, m=1.0):
    r = sp.symbols("r", positive=True)
    amp = sp.exp(-r**2 / a**2)
    f = 1 - R_g / r
    vol = r**2  # sqrt(|g00 g11|) = 1 on the exterior solution
    expr = -(1 / m) * sp.diff(vol * f * sp.diff(amp, r), r) / (amp * vol)
    fn = sp.lambdify(r, sp.simplify(expr), "math")
    return [fn(x) for x in radii]


class TestCurved:
    def test_flat_reduces_to_rel_static(self):
        g = make_radial_grid(0.01, 4, 2001)
        R = ScalarField(g, np.exp(-g.points**2))
        zero = ScalarField(g, np.zeros(g.n_points))
        assert vqu_curved_radial(R, zero, zero, 1.0).values == pytest.approx(
            vqu_rel_static(R, 1.0).values, rel=1e-12, abs=1e-12)

    def test_constant_is_zero(self):
        g = make_radial_grid(3, 10, 201)
        R_g = 2.0
        f = 1 - R_g / g.points
        R = ScalarField(g, np.ones(g.n_points))
        v = vqu_curved_radial(R, ScalarField(g, np.log(f)), ScalarField(g, -np.log(f)), 1.0)
        assert np.abs(v.valid_values).max() < 1e-10

    def test_schwarzschild_against_symbolic(self):
        R_g, a = 2.1, 1.0 / 1.05
        g = make_radial_grid(2.3, 6.0, 20001)
        r = g.points
        f = 1 - R_g / r
        R = ScalarField(g, np.exp(-r**2 / a**2))
        v = vqu_curved_radial(R, ScalarField(g, np.log(f)), ScalarField(g, -np.log(f)), 1.05)
        radii = [2.5, 3.0, 3.5]
        idx = [int(np.argmin(np.abs(r - x))) for x in radii]
        expect = symbolic_curved_vqu([r[i] for i in idx], R_g, a, 1.05)
        assert [v.values[i] for i in idx] == pytest.approx(expect, rel=1e-5)

    def test_metric_form_matches_exponent_form(self):
        R_g = 1.0
        g = make_radial_grid(1.5, 5.0, 1001)
        f = 1 - R_g / g.points
        R = ScalarField(g, np.exp(-g.points**2 / 4))
        v1 = vqu_curved_radial(R, ScalarField(g, np.log(f)), ScalarField(g, -np.log(f)), 1.0)
        v2 = vqu_curved_radial_metric(R, f, -1 / f, 1.0)
        assert v1.values == pytest.approx(v2.values, rel=1e-12)

    def test_needs_radial_grid(self):
        g = make_uniform_grid(1, 2, 11)
        with pytest.raises(TypeError):
            vqu_curved_radial_metric(ScalarField(g, np.ones(11)), 1.0, -1.0, 1.0)


class TestQuantumEnergy:
    def test_constant_zero(self):
        R = ScalarField(make_uniform_grid(0, 1, 101), np.ones(101))
        assert abs(quantum_energy(R, 1.0)) < 1e-9

    def test_cosine_integer_periods(self):
        lam = 0.5
        g = make_uniform_grid(0, 2, 8001)
        R = ScalarField(g, np.cos(2 * math.pi * g.points / lam))
        expected = 0.5 * (2 * math.pi / lam) ** 2 * np.trapezoid(R.values**2, dx=g.spacing)
        assert quantum_energy(R, 1.0) == pytest.approx(expected, rel=1e-5)

    def test_oscillator_ground_quarter(self):
        g = make_uniform_grid(-10, 10, 4001)
        R = ScalarField(g, oscillator_eigenfunction(0, g.points))
        assert quantum_energy(R, 1.0) == pytest.approx(0.25, rel=1e-5)
