import dataclasses

import numpy as np
import pytest

from kortsolve import (BoundaryTrace, Case, ConsistencyError, TangentialMode,
                       VerticalProfile, assembled_formula_check, boundary_residuals,
                       classify, compute_roots, pde_residual, solve_mode)
from kortsolve.modes import default_sample_points

from tests.conftest import CASE_PARAMS, random_mode_values, random_trace

PDE_TOL = 1e-10
BOUNDARY_TOL = 1e-12


def _solve(triple, xi, lam, g, h):
    p = classify(*triple)
    mode = TangentialMode(xi=np.atleast_1d(xi), lam=lam, dim=np.atleast_1d(xi).size + 1)
    trace = BoundaryTrace(g, np.atleast_1d(h))
    return p, mode, trace, solve_mode(p, mode, trace)


class TestSolveMode:
    def test_zero_trace_gives_zero_solution(self, params_by_case):
        for p in params_by_case.values():
            mode = TangentialMode(xi=[0.7], lam=1.0 + 0.5j)
            sol = solve_mode(p, mode, BoundaryTrace(0.0, [0.0]))
            x = np.linspace(0, 10, 21)
            assert np.max(np.abs(sol.rho.evaluate(x))) == 0.0
            assert all(np.max(np.abs(u.evaluate(x))) == 0.0 for u in sol.u)

    def test_case_one_example_coefficients(self):
        # beta_N = lambda L11 g / det L for pure-g data
        p, mode, trace, sol = _solve((1, 1, 2), 1.0, 1.0, 1.0, 0.0)
        r = compute_roots(p, mode)
        from kortsolve import boundary_matrix, det_L
        L11 = -r.t1 * (r.t2 * r.omega - 1.0)
        expect = mode.lam * L11 / det_L(p, mode)
        assert sol.coeffs.beta[-1] == pytest.approx(expect, rel=1e-12)
        assert sol.rho.derivative_at_zero() == pytest.approx(-1.0, rel=1e-12)
        rep = pde_residual(p, mode, sol)
        assert rep.pde_max <= PDE_TOL

    def test_case_five_unit_example(self):
        # omega = 1, beta_N = -1/2, u_N = -x e^{-x} / 2, dN rho(0) = -1
        p, mode, trace, sol = _solve((1, 1, 1), 0.0, 1.0, 1.0, 0.0)
        assert sol.coeffs.beta[-1] == pytest.approx(-0.5)
        x = np.linspace(0, 5, 11)
        np.testing.assert_allclose(sol.u[-1].evaluate(x), -0.5 * x * np.exp(-x),
                                   rtol=0, atol=1e-15)
        assert sol.rho.derivative_at_zero() == pytest.approx(-1.0)
        # rho = (1/2) e^{-x} - (1/2) x e^{-x} per the closed-form coefficients
        np.testing.assert_allclose(sol.rho.evaluate(x), 0.5 * np.exp(-x) * (1 - x),
                                   rtol=0, atol=1e-15)

    def test_divergence_and_mass_identities(self, params_by_case, rng):
        for p in params_by_case.values():
            for xi, lam in random_mode_values(rng, 6):
                g, h = random_trace(rng)
                mode = TangentialMode(xi=xi, lam=lam)
                sol = solve_mode(p, mode, BoundaryTrace(g, h))
                rep = pde_residual(p, mode, sol)
                assert rep.per_equation["mass"] <= 1e-12
                assert rep.per_equation["divergence"] <= 1e-12

    def test_char_operator_annihilates_phi(self, params_by_case, rng):
        # P_lambda(d_N) phi = 0 as a profile identity
        from kortsolve import char_poly
        for p in params_by_case.values():
            xi, lam = random_mode_values(rng, 1)[0]
            mode = TangentialMode(xi=xi, lam=lam)
            sol = solve_mode(p, mode, BoundaryTrace(1.0, [0.5 - 0.25j]))
            phi = sol.phi
            mu_nu = p.mu + p.nu
            lap = phi.differentiate(2) + phi.scaled(-mode.xi_sq)
            lap2 = lap.differentiate(2) + lap.scaled(-mode.xi_sq)
            combo = phi.scaled(lam * lam) + lap.scaled(-lam * mu_nu) + lap2.scaled(p.kappa)
            x = default_sample_points(p, mode)
            scale = sum(abs(c) for c, _, _ in combo.terms()) * (abs(lam) + mode.xi_sq) ** 2
            assert np.max(np.abs(combo.evaluate(x))) <= 1e-12 * max(scale, 1e-300)

    def test_full_sweep_all_cases(self, rng):
        for name, triple in CASE_PARAMS.items():
            p = classify(*triple)
            for xi, lam in random_mode_values(rng, 20):
                g, h = random_trace(rng)
                mode = TangentialMode(xi=xi, lam=lam)
                trace = BoundaryTrace(g, h)
                sol = solve_mode(p, mode, trace)
                rep = pde_residual(p, mode, sol)
                assert rep.pde_max <= PDE_TOL, (name, xi, lam)
                bres = boundary_residuals(p, mode, sol, trace)
                assert max(bres.values()) <= BOUNDARY_TOL, (name, xi, lam)

    def test_linearity(self, params_by_case, rng):
        p = params_by_case["II"]
        mode = TangentialMode(xi=[0.9], lam=2.0 - 0.7j)
        g1, h1 = random_trace(rng)
        g2, h2 = random_trace(rng)
        a, b = 2.0 - 1.0j, -0.3 + 0.8j
        s1 = solve_mode(p, mode, BoundaryTrace(g1, h1))
        s2 = solve_mode(p, mode, BoundaryTrace(g2, h2))
        s3 = solve_mode(p, mode, BoundaryTrace(a * g1 + b * g2, a * h1 + b * h2))
        for attr in ("alpha", "beta", "gamma"):
            lhs = getattr(s3.coeffs, attr)
            rhs = a * getattr(s1.coeffs, attr) + b * getattr(s2.coeffs, attr)
            np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-12 * np.abs(rhs).max())

    def test_homogeneity_of_u_coefficients(self, params_by_case):
        # With traces held fixed, both the g-driven and the h-driven parts of
        # beta_N are invariant under (xi, lam) -> (r xi, r^2 lam): the degree
        # bookkeeping is lam(2) L11(3) / detL(5) = 0 and t1 t2 L12 xi(4+1)
        # / detL(5) = 0.  The u profiles then transform as u(x) -> u(r x).
        p = params_by_case["I"]
        for r in (0.125, 8.0):
            m1 = TangentialMode(xi=[0.8], lam=1.5 + 0.5j)
            m2 = TangentialMode(xi=[0.8 * r], lam=(1.5 + 0.5j) * r * r)
            sg1 = solve_mode(p, m1, BoundaryTrace(1.0, [0.0]))
            sg2 = solve_mode(p, m2, BoundaryTrace(1.0, [0.0]))
            assert sg2.coeffs.beta[-1] == pytest.approx(sg1.coeffs.beta[-1], rel=1e-11)
            sh1 = solve_mode(p, m1, BoundaryTrace(0.0, [1.0]))
            sh2 = solve_mode(p, m2, BoundaryTrace(0.0, [1.0]))
            assert sh2.coeffs.beta[-1] == pytest.approx(sh1.coeffs.beta[-1], rel=1e-11)
            x = np.linspace(0.0, 4.0, 9)
            np.testing.assert_allclose(sh2.u[-1].evaluate(x / r), sh1.u[-1].evaluate(x),
                                       rtol=1e-11)

    def test_three_dimensional_modes(self, params_by_case, rng):
        for name in ("I", "III", "IV", "V"):
            p = params_by_case[name]
            xi = np.array([0.8, -0.5])
            mode = TangentialMode(xi=xi, lam=1.2 + 0.4j, dim=3)
            trace = BoundaryTrace(1.0 - 0.5j, [0.3, -0.7j])
            sol = solve_mode(p, mode, trace)
            rep = pde_residual(p, mode, sol)
            assert rep.pde_max <= PDE_TOL
            assert max(boundary_residuals(p, mode, sol, trace).values()) <= BOUNDARY_TOL
            assert assembled_formula_check(p, mode, trace) <= 1e-8

    def test_case_boundary_continuity_ii_to_iv(self):
        # case II parameters just off the eta = 0 manifold vs case IV on it
        eps = 1e-6
        p_near = classify(3, 1, 4 * (1 - eps))
        p_on = classify(3, 1, 4)
        assert p_near.case is Case.II and p_on.case is Case.IV
        mode = TangentialMode(xi=[0.8], lam=1.3 + 0.6j)
        trace = BoundaryTrace(1.0, [0.5 - 0.2j])
        x = default_sample_points(p_on, mode)
        a = solve_mode(p_near, mode, trace)
        b = solve_mode(p_on, mode, trace)
        scale = max(np.max(np.abs(b.rho.evaluate(x))),
                    max(np.max(np.abs(u.evaluate(x))) for u in b.u))
        worst = max(np.max(np.abs(a.rho.evaluate(x) - b.rho.evaluate(x))),
                    max(np.max(np.abs(ua.evaluate(x) - ub.evaluate(x)))
                        for ua, ub in zip(a.u, b.u)))
        assert worst / scale <= 1e-3

    def test_case_boundary_continuity_i_to_v(self):
        eps = 1e-6
        p_near = classify(1, 1, 1 + eps)  # eta < 0: case I
        p_on = classify(1, 1, 1)
        assert p_near.case is Case.I and p_on.case is Case.V
        mode = TangentialMode(xi=[1.1], lam=0.9 - 0.4j)
        trace = BoundaryTrace(0.7 + 0.1j, [1.0])
        x = default_sample_points(p_on, mode)
        a = solve_mode(p_near, mode, trace)
        b = solve_mode(p_on, mode, trace)
        scale = max(np.max(np.abs(b.rho.evaluate(x))),
                    max(np.max(np.abs(u.evaluate(x))) for u in b.u))
        worst = max(np.max(np.abs(a.rho.evaluate(x) - b.rho.evaluate(x))),
                    max(np.max(np.abs(ua.evaluate(x) - ub.evaluate(x)))
                        for ua, ub in zip(a.u, b.u)))
        assert worst / scale <= 1e-3


class TestAssembledFormulas:
    def test_cases_one_two_random(self, rng):
        for name in ("I", "II"):
            p = classify(*CASE_PARAMS[name])
            for xi, lam in random_mode_values(rng, 8):
                g, h = random_trace(rng)
                mode = TangentialMode(xi=xi, lam=lam)
                worst = assembled_formula_check(p, mode, BoundaryTrace(g, h))
                assert worst <= 1e-10, (name, xi, lam)

    def test_case_four_exercises_linear_kernels(self, params_by_case, rng):
        p = params_by_case["IV"]
        for xi, lam in random_mode_values(rng, 8):
            mode = TangentialMode(xi=xi, lam=lam)
            g, h = random_trace(rng)
            assert assembled_formula_check(p, mode, BoundaryTrace(g, h)) <= 1e-10

    def test_case_three_pure_g_reduction(self, params_by_case):
        # at xi = 0 the h-terms carry xi factors and drop out
        p = params_by_case["III"]
        mode = TangentialMode(xi=[0.0], lam=2.0 + 1.0j)
        worst = assembled_formula_check(p, mode, BoundaryTrace(1.0, [123.0]))
        assert worst <= 1e-12

    def test_case_five_random(self, params_by_case, rng):
        p = params_by_case["V"]
        for xi, lam in random_mode_values(rng, 6):
            mode = TangentialMode(xi=xi, lam=lam)
            g, h = random_trace(rng)
            assert assembled_formula_check(p, mode, BoundaryTrace(g, h)) <= 1e-10

    def test_transcription_failure_raises(self, params_by_case):
        p = params_by_case["I"]
        mode = TangentialMode(xi=[1.0], lam=1.0)
        with pytest.raises(ConsistencyError):
            assembled_formula_check(p, mode, BoundaryTrace(1.0, [0.5]), fail_above=1e-18)


class TestResiduals:
    def test_zero_solution_nonzero_trace_flags_boundary(self, params_by_case):
        p = params_by_case["I"]
        mode = TangentialMode(xi=[1.0], lam=1.0)
        zero = VerticalProfile.zero()
        sol = solve_mode(p, mode, BoundaryTrace(0.0, [0.0]))
        sol = dataclasses.replace(sol, rho=zero, u=(zero, zero), phi=zero)
        bres = boundary_residuals(p, mode, sol, BoundaryTrace(2.0, [3.0]))
        # defects equal the trace magnitudes, normalized by the trace scale 3
        assert bres["u_1(0)-h_1"] == pytest.approx(3.0 / 3.0)
        assert bres["dN_rho(0)+g"] == pytest.approx(2.0 / 3.0)

    def test_perturbed_coefficient_detected(self, params_by_case):
        p = params_by_case["I"]
        mode = TangentialMode(xi=[1.0], lam=1.0)
        sol = solve_mode(p, mode, BoundaryTrace(1.0, [0.5]))
        r = compute_roots(p, mode)
        a = sol.coeffs.alpha[-1]
        b = sol.coeffs.beta[-1] * 1.01
        c = sol.coeffs.gamma[-1]
        u_bad = list(sol.u)
        u_bad[-1] = VerticalProfile([(a - b - c, 0, r.omega), (b, 0, r.t1), (c, 0, r.t2)])
        bad = dataclasses.replace(sol, u=tuple(u_bad))
        rep = pde_residual(p, mode, bad)
        assert rep.pde_max > 1e-6
        assert rep.worst_equation() in ("momentum_N", "mass", "divergence")

    def test_sample_ladder_shape(self, params_by_case):
        p = params_by_case["I"]
        mode = TangentialMode(xi=[1.0], lam=1.0)
        pts = default_sample_points(p, mode)
        assert pts[0] == 0.0
        assert len(pts) == 13
