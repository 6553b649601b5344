import numpy as np
import pytest

from hyperwave.chart import FoliationParams
from hyperwave.diagnostics import (
    EnergyMonitor,
    boundary_flux_rate,
    cosine_moments,
    energy,
    l2_error,
    l2_norm,
    potential_energy,
    radial_integral,
    radial_weights,
    sphere_integral,
)
from hyperwave.discretization import FULL3D, SO_REDUCED, build_grid
from hyperwave.evolve import EvolutionConfig, Solver, exact_linear_state, static_initial_data
from hyperwave.exact_solutions import LinearModeSpec, spherical_harmonic


class TestRadialIntegral:
    def test_weight_sum_is_exact(self):
        for num in (100, 125, 1000):
            g = build_grid(3, SO_REDUCED, num, 4)
            assert radial_integral(np.ones(num), g.h_r) == pytest.approx(1.0, abs=1e-12)

    def test_even_quadratic(self):
        g = build_grid(3, SO_REDUCED, 100, 4)
        val = radial_integral(g.r**2, g.h_r)
        assert val == pytest.approx(1.0 / 3.0, abs=1e-8)

    @pytest.mark.parametrize("num_pair", [(100, 200), (125, 250)])
    def test_refinement_order(self, num_pair):
        errs = []
        for num in num_pair:
            g = build_grid(3, SO_REDUCED, num, 4)
            u = 3 * g.r**2 * (1.0 - g.r**2 + 0.25 * g.r**4)
            exact = 3 * (1 / 3 - 1 / 5 + 0.25 / 7)
            errs.append(abs(radial_integral(u, g.h_r) - exact))
        assert np.log2(errs[0] / errs[1]) >= 3.5

    def test_even_smooth_refinement(self):
        errs = []
        for num in (100, 200):
            g = build_grid(3, SO_REDUCED, num, 4)
            u = np.cos(np.pi * g.r**2)
            from scipy.integrate import quad

            exact = quad(lambda x: np.cos(np.pi * x**2), 0, 1, epsabs=1e-14)[0]
            errs.append(abs(radial_integral(u, g.h_r) - exact))
        assert errs[0] / errs[1] >= 14.0

    def test_printed_leading_weights(self):
        g = build_grid(3, SO_REDUCED, 100, 4)
        w = radial_weights(g)
        h = g.h_r
        assert w[0] == pytest.approx(h / 3 * 27 / 8)
        assert w[1] == pytest.approx(h / 3 * 17 / 8)
        assert w[2] == pytest.approx(h / 3 * 4)
        assert w[-1] == pytest.approx(h / 3)


class TestSphereIntegral:
    def test_unit_two_sphere(self):
        g = build_grid(3, FULL3D, 16, 8, 8)
        val = sphere_integral(np.ones((8, 8)), g)
        assert val == pytest.approx(4 * np.pi, rel=1e-13)

    def test_unit_reduced_spheres(self):
        # total areas: S^2 -> 4 pi, S^4 -> 8 pi^2 / 3
        g3 = build_grid(3, SO_REDUCED, 16, 8)
        assert sphere_integral(np.ones(8), g3) == pytest.approx(4 * np.pi, rel=1e-12)
        g5 = build_grid(5, SO_REDUCED, 16, 8)
        assert sphere_integral(np.ones(8), g5) == pytest.approx(8 * np.pi**2 / 3, rel=1e-12)

    def test_hand_computed_moments(self):
        m = cosine_moments(3, 3)
        assert m[0] == pytest.approx(4.0 / 3.0, abs=1e-12)
        assert m[1] == pytest.approx(0.0, abs=1e-12)
        assert m[2] == pytest.approx(-4.0 / 5.0, abs=1e-12)

    @pytest.mark.parametrize("n", [3, 5])
    @pytest.mark.parametrize("l", [1, 2, 3])
    def test_harmonics_integrate_to_zero(self, n, l):
        g = build_grid(n, SO_REDUCED, 16, 12)
        val = sphere_integral(spherical_harmonic(n, l, g.theta), g)
        assert abs(val) < 1e-10

    def test_per_radius_broadcast(self):
        g = build_grid(3, SO_REDUCED, 16, 8)
        field = np.outer(g.r, np.ones(8))
        vals = sphere_integral(field, g)
        assert vals.shape == (16,)
        assert np.allclose(vals, 4 * np.pi * g.r, rtol=1e-12)

    @pytest.mark.parametrize("n,num_theta", [(3, 8), (3, 16), (5, 12)])
    def test_quadrature_weights_positive(self, n, num_theta):
        # the induced nodal weights must be positive so that integrals of
        # squares are nonnegative
        g = build_grid(n, SO_REDUCED, 16, num_theta)
        eye = np.eye(num_theta)
        w = np.array([float(sphere_integral(eye[j], g)) for j in range(num_theta)])
        assert np.all(w > 0)


class TestEnergy:
    def test_zero_state(self):
        fol = FoliationParams(3)
        g = build_grid(3, SO_REDUCED, 64, 8)
        z = np.zeros(g.field_shape)
        assert energy(z, z, g, fol) == 0.0
        assert potential_energy(z, g, fol, 5, -1) == 0.0

    def test_focusing_defocusing_ordering(self):
        fol = FoliationParams(3)
        g = build_grid(3, SO_REDUCED, 400, 16)
        st = static_initial_data([(2, 12.0), (3, 12.0)], 0.3, 0.07, g, fol)
        ep = energy(st.phi, st.pi, g, fol, p=5, mu=1)
        em = energy(st.phi, st.pi, g, fol, p=5, mu=-1)
        assert ep > em

    def test_potential_sign_follows_mu(self):
        fol = FoliationParams(3)
        g = build_grid(3, SO_REDUCED, 128, 8)
        st = static_initial_data([(2, 2.0)], 0.3, 0.1, g, fol)
        assert potential_energy(st.phi, g, fol, 5, 1) > 0
        assert potential_energy(st.phi, g, fol, 5, -1) < 0
        assert potential_energy(st.phi, g, fol, 5, 0) == 0.0

    def test_flux_rate_nonpositive_random(self):
        fol = FoliationParams(3)
        g = build_grid(3, SO_REDUCED, 16, 8)
        rng = np.random.default_rng(8)
        for _ in range(1000):
            phi = rng.standard_normal(g.field_shape)
            pi = rng.standard_normal(g.field_shape)
            assert boundary_flux_rate(phi, pi, g, fol) <= 1e-14

    def test_flux_zero_when_derivative_matches_pi(self):
        # at the boundary, flux ~ (phi_rt - pi)^2: equality kills it
        fol = FoliationParams(3)
        g = build_grid(3, SO_REDUCED, 64, 8)
        phi = np.outer(g.r**2, np.ones(8))
        from hyperwave.discretization import radial_d1

        pi = radial_d1(phi, g)
        assert boundary_flux_rate(phi, pi, g, fol) == pytest.approx(0.0, abs=1e-20)


class TestL2:
    def test_identical_states(self):
        g = build_grid(3, SO_REDUCED, 64, 8)
        f = np.outer(np.sin(g.r), np.cos(g.theta))
        assert l2_error(f, f, g) == 0.0

    @pytest.mark.parametrize("n", [3, 5])
    def test_constant_harmonic_offset(self, n):
        # exact + c Y_0: the error is |c| sqrt(int rt^(n-1)) = |c|/sqrt(n)
        g = build_grid(n, SO_REDUCED, 200, 8)
        c = 0.37
        diff = c * spherical_harmonic(n, 0, g.theta) * np.ones((200, 1))
        assert l2_norm(diff, g) == pytest.approx(abs(c) / np.sqrt(n), rel=1e-6)


class TestEnergyBalance:
    def test_linear_balance_and_refinement(self):
        resids = []
        for num in (200, 400):
            fol = FoliationParams(3, 1.0)
            g = build_grid(3, SO_REDUCED, num, 8)
            sol = Solver(EvolutionConfig(fol, g, mu=0))
            st = exact_linear_state(-5.0, g, fol,
                                    [LinearModeSpec(1), LinearModeSpec(2)])
            mon = EnergyMonitor(g, fol)
            sol.run(st, 5.0, sinks=[mon], cadence=10)
            e = np.array([r.total for r in mon.records])
            f = np.array([r.flux_cumulative for r in mon.records])
            resid = np.array([r.residual for r in mon.records])
            assert mon.records[0].residual == 0.0
            assert np.all(np.diff(e) <= 1e-12)  # energy only decreases
            assert np.all(np.diff(f) <= 1e-15)  # outflow accumulates
            resids.append(np.max(np.abs(resid)) / e[0])
        assert resids[0] < 1e-3
        assert np.log2(resids[0] / resids[1]) >= 2.0

    def test_monitor_record_fields(self):
        fol = FoliationParams(3)
        g = build_grid(3, SO_REDUCED, 100, 8)
        sol = Solver(EvolutionConfig(fol, g, p=5, mu=-1))
        st = static_initial_data([(2, 2.0)], 0.3, 0.1, g, fol)
        mon = EnergyMonitor(g, fol, p=5, mu=-1)
        sol.run(st, 20 * sol.dt, sinks=[mon], cadence=10)
        assert len(mon.records) == 3
        r0 = mon.records[0]
        assert r0.time == 0.0 and r0.flux_cumulative == 0.0 and r0.residual == 0.0
        assert all(r.flux_rate <= 0.0 for r in mon.records)
        assert all(r.potential < 0.0 for r in mon.records)
