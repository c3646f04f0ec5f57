import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qhydro.core import (
    AMPLITUDE_FLOOR,
    Grid1D,
    GridError,
    PhysicalConstants,
    RadialGrid,
    ScalarField,
    Scenario,
    amplitude_mask,
    first_derivative,
    make_radial_grid,
    make_uniform_grid,
    radial_laplacian,
    second_derivative,
    trapezoid,
)


class TestGrid:
    def test_spacing_unit_interval(self):
        assert make_uniform_grid(0, 1, 11).spacing == pytest.approx(0.1, rel=1e-15)

    def test_spacing_symmetric(self):
        assert make_uniform_grid(-5, 5, 1001).spacing == pytest.approx(0.01, rel=1e-14)

    def test_reversed_bounds_rejected(self):
        with pytest.raises(GridError):
            make_uniform_grid(1, 0, 11)

    @pytest.mark.parametrize("n", [0, 7, 10.5])
    def test_too_few_or_fractional_points(self, n):
        with pytest.raises(GridError):
            Grid1D(0.0, 1.0, n)

    def test_nonfinite_bounds(self):
        with pytest.raises(GridError):
            Grid1D(0.0, math.inf, 11)

    def test_points_read_only(self):
        g = make_uniform_grid(0, 1, 11)
        with pytest.raises(ValueError):
            g.points[0] = 3.0

    def test_refined_halves_spacing(self):
        g = make_uniform_grid(-2, 3, 51)
        assert g.refined().spacing == pytest.approx(g.spacing / 2)
        assert g.refined().points[::2] == pytest.approx(g.points)

    def test_radial_grid_excludes_origin(self):
        with pytest.raises(GridError):
            make_radial_grid(0.0, 1.0, 11)
        g = make_radial_grid(0.1, 1.0, 10)
        assert isinstance(g, RadialGrid) and g.r_min == 0.1 and g.r_max == 1.0


class TestScalarField:
    def test_shape_checked(self):
        with pytest.raises(GridError):
            ScalarField(make_uniform_grid(0, 1, 11), np.zeros(10))

    def test_nonfinite_rejected(self):
        v = np.zeros(11)
        v[3] = np.nan
        with pytest.raises(ValueError):
            ScalarField(make_uniform_grid(0, 1, 11), v)

    def test_immutable_copy(self):
        src = np.arange(11.0)
        f = ScalarField(make_uniform_grid(0, 1, 11), src)
        src[0] = 99.0
        assert f.values[0] == 0.0
        with pytest.raises(ValueError):
            f.values[1] = 5.0


class TestDerivatives:
    def test_quadratic_exact(self):
        f = ScalarField.from_function(make_uniform_grid(-1, 1, 41), lambda x: x**2)
        assert second_derivative(f).values == pytest.approx(2.0, abs=1e-9)

    def test_constant_zero(self):
        f = ScalarField(make_uniform_grid(-1, 1, 41), np.full(41, 3.7))
        assert np.abs(second_derivative(f).values).max() < 1e-10

    def test_sine_second_order(self):
        errors = []
        for n in (201, 401):
            g = make_uniform_grid(0, math.pi, n)
            f = ScalarField.from_function(g, lambda x: np.sin(2 * x))
            errors.append(np.abs(second_derivative(f).values + 4 * np.sin(2 * g.points)).max())
        assert errors[0] < 1e-2
        # documented order 2: error ratio 4 within 20%
        assert errors[0] / errors[1] == pytest.approx(4.0, rel=0.2)

    def test_first_derivative_order(self):
        g = make_uniform_grid(0, 2, 401)
        f = ScalarField.from_function(g, np.exp)
        assert first_derivative(f).values == pytest.approx(np.exp(g.points), rel=1e-4)

    def test_radial_laplacian_r_squared(self):
        f = ScalarField.from_function(make_radial_grid(0.1, 2, 191), lambda r: r**2)
        assert radial_laplacian(f).values == pytest.approx(6.0, rel=1e-9)

    def test_radial_laplacian_harmonic(self):
        g = make_radial_grid(0.5, 3.0, 2001)
        f = ScalarField.from_function(g, lambda r: 2.0 + 3.0 / r)
        lap = radial_laplacian(f).values
        assert np.abs(lap[1:-1]).max() < 1e-4

    def test_radial_laplacian_gaussian(self):
        g = make_radial_grid(0.01, 4.0, 4001)
        r = g.points
        f = ScalarField(g, np.exp(-r**2))
        exact = (4 * r**2 - 6) * np.exp(-r**2)
        assert np.abs(radial_laplacian(f).values - exact).max() < 1e-3

    def test_radial_laplacian_needs_radial_grid(self):
        with pytest.raises(GridError):
            radial_laplacian(ScalarField(make_uniform_grid(0, 1, 11), np.ones(11)))

    @settings(max_examples=30, deadline=None)
    @given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3))
    def test_quadratics_exact_property(self, a, b, c):
        g = make_uniform_grid(-1, 2, 31)
        f = ScalarField(g, a + b * g.points + c * g.points**2)
        assert second_derivative(f).values == pytest.approx(2 * c, abs=1e-8)


class TestHelpers:
    def test_amplitude_mask_floor(self):
        v = np.array([1.0, 0.5 * AMPLITUDE_FLOOR, 2 * AMPLITUDE_FLOOR, 0.0, -1.0])
        assert amplitude_mask(v).tolist() == [True, False, True, False, True]

    def test_amplitude_mask_all_zero(self):
        assert not amplitude_mask(np.zeros(5)).any()

    def test_trapezoid_gaussian(self):
        g = make_uniform_grid(-10, 10, 2001)
        assert trapezoid(np.exp(-g.points**2), g) == pytest.approx(math.sqrt(math.pi), rel=1e-12)


class TestConstants:
    def test_natural(self):
        k = PhysicalConstants.natural()
        assert k.is_natural and k.planck_mass == 1.0 and k.planck_length == 1.0

    def test_si_planck_mass(self):
        k = PhysicalConstants.si()
        assert k.planck_mass == pytest.approx(2.176434e-8, rel=1e-6)
        assert k.planck_length == pytest.approx(1.616255e-35, rel=1e-6)

    def test_units_round_trip(self):
        s = Scenario(9.109e-31, oscillator_freq=1e15, temperature=300.0, units_mode="SI")
        back = s.to_natural().to_si()
        assert back.mass == pytest.approx(s.mass, rel=1e-12)
        assert back.oscillator_freq == pytest.approx(s.oscillator_freq, rel=1e-12)
        assert back.temperature == pytest.approx(s.temperature, rel=1e-12)

    def test_scenario_validation(self):
        with pytest.raises(ValueError):
            Scenario(-1.0)
        with pytest.raises(ValueError):
            Scenario(1.0, units_mode="cgs")
        with pytest.raises(ValueError):
            Scenario(1.0, constants=PhysicalConstants.si())
