import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qhydro.blackhole import HorizonError
from qhydro.core import PhysicalConstants, ScalarField, make_uniform_grid
from qhydro.dynamics import (
    HydroState,
    ImaginaryRestEnergyError,
    StabilityError,
    classical_infall_acceleration,
    current_density,
    density_distance,
    dispersion_energy,
    energy_readoff,
    evolve_nonrel,
    evolve_trajectory,
    hje_residual,
    momentum_field,
    quantum_force,
    stress_tensor_static,
)
from qhydro.eigensolver import solve_eigenstates
from qhydro.qpotential import QuantumPotentialField, vqu_rel_static


def plane_wave_state(k=1.5, t=0.0, E=0.0, n=401):
    g = make_uniform_grid(-2, 2, n)
    S = -E * t + k * g.points
    return HydroState(ScalarField(g, np.full(n, 0.5)), ScalarField(g, S), t)


def free_gaussian(sigma0=1.0):
    g = make_uniform_grid(-60, 60, 4096)
    x = g.points
    psi = (2 * math.pi * sigma0**2) ** -0.25 * np.exp(-x**2 / (4 * sigma0**2))
    return HydroState.from_wavefunction(g, psi)


class TestKinematics:
    def test_constant_action(self):
        s = plane_wave_state(k=0.0)
        assert np.abs(momentum_field(s.action).values).max() == 0.0

    def test_plane_wave_momentum(self):
        s = plane_wave_state(k=1.5)
        assert momentum_field(s.action).values == pytest.approx(1.5, rel=1e-12)

    def test_energy_readoff(self):
        a = plane_wave_state(k=1.5, t=0.0, E=2.0)
        b = plane_wave_state(k=1.5, t=0.1, E=2.0)
        assert energy_readoff(a, b).values == pytest.approx(2.0, rel=1e-12)
        assert momentum_field(b.action).values == pytest.approx(1.5, rel=1e-12)

    def test_energy_readoff_same_time(self):
        a = plane_wave_state()
        with pytest.raises(ValueError):
            energy_readoff(a, a)

    def test_current_real_and_plane_wave(self):
        s = plane_wave_state(k=0.0)
        assert np.abs(current_density(s.amplitude, s.action, 1.0).values).max() == 0.0
        s = plane_wave_state(k=1.5)
        assert current_density(s.amplitude, s.action, 2.0).values == pytest.approx(0.25 * 1.5 / 2.0)

    def test_eigenstate_current_vanishes(self):
        g = make_uniform_grid(-10, 10, 2001)
        st_ = solve_eigenstates(lambda x: 0.5 * x**2, 1.0, 2, grid=g)[2]
        # a real eigenfunction carries a constant action
        J = current_density(st_.amplitude, ScalarField(g, np.zeros(g.n_points)), 1.0).values
        assert np.abs(J).max() == 0.0

    def test_negative_amplitude_rejected(self):
        g = make_uniform_grid(0, 1, 11)
        with pytest.raises(ValueError):
            HydroState(ScalarField(g, -np.ones(11)), ScalarField(g, np.zeros(11)))


class TestDispersion:
    def test_rest(self):
        assert dispersion_energy(0.0, 0.0, 1.0) == 1.0

    def test_vqu_equals_rest_energy(self):
        assert dispersion_energy(0.0, 1.0, 1.0) == 0.0

    def test_relativistic(self):
        assert dispersion_energy(1.0, 0.0, 1.0) == pytest.approx(math.sqrt(2))

    def test_antiparticle(self):
        assert dispersion_energy(1.0, 0.0, 1.0, antiparticle=True) == pytest.approx(-math.sqrt(2))

    def test_imaginary(self):
        with pytest.raises(ImaginaryRestEnergyError):
            dispersion_energy(0.0, 1.5, 1.0)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(-10, 10), st.floats(-5, 1), st.floats(0.1, 10))
    def test_identity(self, p, vq_frac, m):
        vq = vq_frac * m
        E = dispersion_energy(p, vq, m)
        assert E**2 - p**2 - m**2 * (1 - vq / m) == pytest.approx(0.0, abs=1e-10 * max(1.0, E**2))


class TestEvolution:
    def test_ground_state_stationary(self):
        g = make_uniform_grid(-10, 10, 1024)
        V = ScalarField(g, 0.5 * g.points**2)
        psi = solve_eigenstates(V, 1.0, 0)[0].wavefunction.values
        s0 = HydroState.from_wavefunction(g, psi)
        steps = 1000
        s1 = evolve_nonrel(s0, V, 2 * math.pi / steps, steps)
        assert density_distance(s0, s1) <= 1e-6
        assert abs(s1.norm - s0.norm) <= 1e-6

    def test_free_spreading(self):
        s0 = free_gaussian(1.0)
        traj = evolve_trajectory(s0, None, 0.005, 1000, record_every=250)
        assert [round(s.time, 10) for s in traj] == [0.0, 1.25, 2.5, 3.75, 5.0]
        for s in traj:
            sigma = math.sqrt(1 + (s.time / 2) ** 2)
            assert s.width() == pytest.approx(sigma, rel=1e-4)
            assert s.norm == pytest.approx(1.0, abs=1e-6)

    def test_uniform_unchanged(self):
        g = make_uniform_grid(0, 1, 64)
        s0 = HydroState(ScalarField(g, np.ones(64)), ScalarField(g, np.zeros(64)))
        s1 = evolve_nonrel(s0, None, 0.01, 100)
        assert s1.amplitude.values == pytest.approx(1.0, abs=1e-12)
        assert np.abs(s1.action.values).max() < 1e-12
        assert s1.time == pytest.approx(1.0)

    def test_stability_bound(self):
        g = make_uniform_grid(-10, 10, 256)
        V = ScalarField(g, 0.5 * g.points**2)
        s0 = HydroState.from_wavefunction(g, np.exp(-g.points**2))
        with pytest.raises(StabilityError):
            evolve_nonrel(s0, V, 0.1, 10)

    def test_quantum_force_drives_spreading(self):
        # Bohm trajectories of the free packet scale with sigma(t), so
        # F(x) / (m x) must equal sigma'' / sigma
        s0 = free_gaussian(1.0)
        dt = 0.005
        traj = evolve_trajectory(s0, None, dt, 502, record_every=1)
        widths = [s.width() for s in traj[499:502]]
        accel = (widths[0] - 2 * widths[1] + widths[2]) / dt**2
        mid = traj[500]
        x = mid.grid.points
        F = quantum_force(mid.amplitude, 1.0)
        sel = (np.abs(x) > 0.2) & (np.abs(x) < widths[1])
        ratio = F[sel] / x[sel]
        assert ratio == pytest.approx(accel / widths[1], rel=1e-3)


class TestHJE:
    def test_plane_wave_on_shell(self):
        s = plane_wave_state(k=0.8)
        E = dispersion_energy(0.8, 0.0, 1.0)
        assert hje_residual(s, 1.0, E) <= 1e-10

    def test_static_rest_energy_balance(self):
        n = 201
        g = make_uniform_grid(-1, 1, n)
        h = g.spacing
        k = math.acos(1 - h**2 / 2) / h  # discrete V_qu = m c^2 exactly
        s = HydroState(ScalarField(g, np.cos(k * g.points)), ScalarField(g, np.zeros(n)))
        assert hje_residual(s, 1.0, 0.0) <= 1e-10

    def test_oscillator_like_state_reported(self):
        g = make_uniform_grid(-8, 8, 1601)
        s = HydroState(ScalarField(g, np.exp(-g.points**2 / 2)), ScalarField(g, np.zeros(1601)))
        res = hje_residual(s, 1.0, 0.0)
        # V_qu = 1 - x^2 on the Gaussian, so the residual is max x^2 over valid points
        valid = s.amplitude.values >= 1e-12
        assert res == pytest.approx((g.points[valid] ** 2).max(), rel=1e-3)


class TestStressTensor:
    def make(self, values, vq):
        g = make_uniform_grid(-1, 1, len(values))
        R = ScalarField(g, values)
        return R, QuantumPotentialField(g, vq, np.ones(len(values), bool), "rel_static")

    def test_dust_limit(self):
        R, vq = self.make(np.linspace(0.1, 1, 11), np.zeros(11))
        for smp, r in zip(stress_tensor_static(R, vq, 2.0), R.values):
            assert smp.t00_total == pytest.approx(2.0 * r**2)
            assert smp.t11_total == pytest.approx(0.0, abs=1e-15)
            assert smp.lambda_term == pytest.approx(8 * math.pi * 2.0 * r**2)

    def test_rest_energy_vanishing(self):
        R, vq = self.make(np.ones(11), np.ones(11))
        for smp in stress_tensor_static(R, vq, 1.0):
            assert smp.t11 == 0.0 and smp.t00 == 0.0

    def test_antimatter_flip(self):
        g = make_uniform_grid(-4, 4, 401)
        R = ScalarField(g, np.exp(-g.points**2 / 2))
        vq = vqu_rel_static(R, 3.0)
        a = stress_tensor_static(R, vq, 3.0, "matter")
        b = stress_tensor_static(R, vq, 3.0, "antimatter")
        for p, q in zip(a, b):
            assert (q.t00, q.t11, q.t00_total, q.t11_total, q.lambda_term) == (
                -p.t00, -p.t11, -p.t00_total, -p.t11_total, -p.lambda_term)

    def test_over_rest_energy_tagged(self):
        R, vq = self.make(np.ones(11), np.r_[np.zeros(5), 2.0, np.zeros(5)])
        out = stress_tensor_static(R, vq, 1.0)
        assert out[5].error is not None and math.isnan(out[5].t11)
        assert all(s.error is None for i, s in enumerate(out) if i != 5)

    def test_oscillator_ground_profile(self):
        # V_qu = 1 - x^2 for R = pi^-1/4 exp(-x^2/2), so T11 = -R^2 |x|
        g = make_uniform_grid(-6, 6, 6001)
        x = g.points
        R = ScalarField(g, math.pi**-0.25 * np.exp(-x**2 / 2))
        out = stress_tensor_static(R, vqu_rel_static(R, 1.0), 1.0)
        sel = [i for i in range(1, len(x) - 1) if 0.5 < abs(x[i]) < 3]
        t11 = np.array([out[i].t11 for i in sel])
        assert t11 == pytest.approx(-R.values[sel] ** 2 * np.abs(x[sel]), rel=1e-5)

    def test_bad_sign(self):
        R, vq = self.make(np.ones(11), np.zeros(11))
        with pytest.raises(ValueError):
            stress_tensor_static(R, vq, 1.0, "dark")


class TestInfall:
    def test_newtonian_limit(self):
        r = np.array([1e3, 1e4])
        assert classical_infall_acceleration(r, 0.0, 2.0) == pytest.approx(-2.0 / (2 * r**2), rel=1e-12)

    @pytest.mark.parametrize("u1", [0.0, 0.3])
    def test_halving_increases_magnitude(self, u1):
        r = np.geomspace(5.0, 100.0, 20)
        a = np.abs(classical_infall_acceleration(r, u1, 2.0))
        b = np.abs(classical_infall_acceleration(r / 2, u1, 2.0))
        assert np.all(b > a)

    def test_unbounded(self):
        r = np.geomspace(1.0, 1e-6, 61)
        mag = np.abs(classical_infall_acceleration(r, 0.0, 2.0))
        assert np.all(np.diff(mag) > 0)
        assert mag[-1] > 1e6

    def test_horizon_moving_shell(self):
        with pytest.raises(HorizonError):
            classical_infall_acceleration(2.0, 0.1, 2.0)

    def test_si_units(self):
        k = PhysicalConstants.si()
        R_g = 2953.0
        r = 1e9
        assert classical_infall_acceleration(r, 0.0, R_g, k) == pytest.approx(-k.c**2 * R_g / (2 * r**2))
