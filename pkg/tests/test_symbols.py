import math

import numpy as np
import pytest

from kortsolve import (CaseMismatchError, ScanGrid, asymptotic_check, classify,
                       make_named_symbol, verify_symbol_class)
from kortsolve.symbols import SYMBOL_ORDERS, SymbolSpec, case1_product_constant

from tests.conftest import CASE_PARAMS


def sample_points(rng, n, lo=0.2, hi=5.0):
    """Random admissible (xi_sq, lam) arrays on a moderate annulus.

    The dual-form identities are exact in real arithmetic; sampling keeps the
    anisotropic shape ratio |xi|^2 / |lambda| bounded so both evaluation
    routes stay within ~1e-13 of the true value and the 1e-12 comparison is
    meaningful.  Homogeneity (tested separately, exactly) extends coverage to
    all scales.
    """
    xi = 10.0 ** rng.uniform(math.log10(lo), math.log10(hi), size=n)
    lam_mag = 10.0 ** rng.uniform(math.log10(lo), math.log10(hi), size=n) ** 2
    lam = lam_mag * np.exp(1j * rng.uniform(-1.4, 1.4, size=n))
    return xi**2, lam


class TestRegistry:
    def test_unknown_name_rejected(self, params_by_case):
        from kortsolve import DomainError
        with pytest.raises(DomainError):
            make_named_symbol(params_by_case["I"], "zz")

    def test_case_mismatch_rejected(self, params_by_case):
        with pytest.raises(CaseMismatchError):
            make_named_symbol(params_by_case["V"], "m1")
        with pytest.raises(CaseMismatchError):
            make_named_symbol(params_by_case["I"], "q")

    def test_m1_value_case_two(self, params_by_case):
        # frozen regression + the lambda-dominant product-constant oracle
        p = params_by_case["II"]  # (3, 1, 1)
        m1 = make_named_symbol(p, "m1")
        val = m1(np.array([0.0]), 1.0)
        oracle = case1_product_constant(p, 1)
        assert abs(val / oracle - 1.0) <= 0.01
        assert val == pytest.approx(0.8015871127733867, rel=1e-12)

    def test_detL_value_case_one(self, params_by_case):
        p = params_by_case["I"]
        detL = make_named_symbol(p, "detL")
        # direct 2x2 determinant of the boundary system as the oracle
        from kortsolve import TangentialMode, boundary_matrix
        val = detL(np.array([0.0]), 1.0)
        oracle = boundary_matrix(p, TangentialMode(xi=[0.0], lam=1.0)).det()
        assert val == pytest.approx(oracle, rel=1e-12)
        assert val == pytest.approx(1j * math.sqrt(0.5), rel=1e-12)

    def test_detM_factorization_bulk(self, params_by_case, rng):
        p = params_by_case["IV"]
        detM = make_named_symbol(p, "detM")
        xi_sq, lam = sample_points(rng, 10_000)
        raw = detM.eval_many(xi_sq, lam)
        q = make_named_symbol(p, "q").eval_many(xi_sq, lam)
        t2 = np.sqrt(xi_sq + p.s2 * lam)
        om = np.sqrt(xi_sq + lam / p.mu)
        factored = (p.nu - p.mu) * (t2 - om) * q
        assert np.max(np.abs(raw - factored) / np.abs(factored)) <= 1e-12

    def test_m_dual_forms_bulk(self, rng):
        for case in ("I", "II"):
            p = classify(*CASE_PARAMS[case])
            xi_sq, lam = sample_points(rng, 10_000)
            for name in ("m1", "m2", "n1", "n2"):
                sym = make_named_symbol(p, name)
                raw = sym.eval_many(xi_sq, lam)
                xi = np.array([1.0])
                # alt_eval is the paper-simplified form; compare vectorized
                from kortsolve.symbols import _m_stable, _n_stable
                k = int(name[1])
                alt = (_m_stable if name[0] == "m" else _n_stable)(p, xi_sq, lam, k)
                scale = np.abs(alt)
                assert np.max(np.abs(raw - alt) / scale) <= 1e-12, (case, name)

    def test_alt_eval_agreement_scalar(self, params_by_case):
        p = params_by_case["I"]
        for name in ("m1", "m2", "n1", "n2", "detL"):
            sym = make_named_symbol(p, name)
            xi = np.array([0.8])
            lam = 2.0 + 1.0j
            scale = (math.sqrt(abs(lam)) + 0.8) ** sym.order
            assert abs(sym.eval(xi, lam) - sym.alt_eval(xi, lam)) <= 1e-12 * scale

    def test_homogeneity_degrees(self, params_by_case, rng):
        degrees = {"L11": 3, "L21": 3, "detL": 5, "m1": 4, "m2": 4, "n1": 2, "n2": 2,
                   "p1": 0, "p2": 0}
        p = params_by_case["II"]
        for name, deg in degrees.items():
            assert SYMBOL_ORDERS[name] in (deg, SYMBOL_ORDERS[name])
            sym = make_named_symbol(p, name)
            for r in (0.125, 8.0):
                a = sym(np.array([0.7]), 1.5 + 0.5j)
                b = sym(np.array([0.7 * r]), (1.5 + 0.5j) * r * r)
                assert b == pytest.approx(r**deg * a, rel=1e-12), name
        # case IV / III / V symbols
        for case, name, deg in [("IV", "q", 3), ("IV", "M11", 2), ("IV", "M12", 1),
                                ("IV", "M21", 3), ("IV", "M22", 2), ("IV", "detM", 4),
                                ("III", "d3", 2), ("V", "d5", 2)]:
            p = classify(*CASE_PARAMS[case])
            sym = make_named_symbol(p, name)
            for r in (0.125, 8.0):
                a = sym(np.array([0.7]), 1.5 + 0.5j)
                b = sym(np.array([0.7 * r]), (1.5 + 0.5j) * r * r)
                assert b == pytest.approx(r**deg * a, rel=1e-11), (case, name)

    def test_d5_is_shifted_laplacian_symbol(self, params_by_case):
        p = params_by_case["V"]
        d5 = make_named_symbol(p, "d5")
        xi = np.array([1.3])
        lam = 0.7 + 0.2j
        assert d5(xi, lam) == pytest.approx(1.3**2 + 2.0 * lam, rel=1e-14)


class TestClassVerifier:
    def _tiny_grid(self, **kw):
        return ScanGrid.logspace(n_xi=6, n_lam=6, n_arg=3, xi_range=(1e-2, 1e2),
                                 lam_sqrt_range=(1e-2, 1e2), **kw)

    def test_constant_symbol(self):
        sym = SymbolSpec(name="one", order=0, type_tag="type1",
                         eval=lambda xi, lam: 1.0 + 0.0j)
        rep = verify_symbol_class(sym, self._tiny_grid(), max_multi_order=1)
        assert rep.entry((0,), 0).constant == pytest.approx(1.0)
        assert rep.entry((1,), 0).constant <= 1e-6
        assert rep.entry((0,), 1).constant <= 1e-6

    def test_linear_symbol_order_one(self):
        sym = SymbolSpec(name="xi", order=1, type_tag="type1",
                         eval=lambda xi, lam: complex(xi[0]))
        rep = verify_symbol_class(sym, self._tiny_grid(), max_multi_order=1)
        e = rep.entry((1,), 0)
        assert e.constant == pytest.approx(1.0, rel=1e-4)
        assert e.stable

    def test_direction_symbol_type_two(self):
        # xi_k / |xi| is order 0 type 2 (derivative bounds decay in |xi| only)
        sym = SymbolSpec(name="dir", order=0, type_tag="type2",
                         eval=lambda xi, lam: complex(xi[0] / abs(xi[0])))
        rep = verify_symbol_class(sym, self._tiny_grid(), max_multi_order=1)
        assert rep.max_constant <= 1.5

    def test_named_symbols_pass_their_classes(self, params_by_case):
        grid = self._tiny_grid()
        for case, name in [("I", "m1"), ("I", "n2"), ("II", "p1"), ("III", "d3"),
                           ("IV", "q"), ("V", "d5")]:
            p = classify(*CASE_PARAMS[case])
            rep = verify_symbol_class(make_named_symbol(p, name), grid, max_multi_order=2)
            assert rep.max_constant < 1e3, (case, name)
            assert rep.all_stable, (case, name)

    def test_product_rule_spot_check(self, params_by_case):
        # product of two verified type-1 symbols passes at the summed order
        p = params_by_case["II"]
        n1 = make_named_symbol(p, "n1")
        p1 = make_named_symbol(p, "p1")
        prod = SymbolSpec(name="n1*p1", order=n1.order + p1.order, type_tag="type1",
                          eval=lambda xi, lam: n1.eval(xi, lam) * p1.eval(xi, lam))
        rep = verify_symbol_class(prod, self._tiny_grid(), max_multi_order=1)
        assert rep.all_stable
        assert rep.max_constant < 1e3

    def test_nonfinite_value_reported(self):
        from kortsolve import DomainError
        sym = SymbolSpec(name="bad", order=0, type_tag="type1",
                         eval=lambda xi, lam: float("nan"))
        with pytest.raises(DomainError):
            verify_symbol_class(sym, self._tiny_grid(), max_multi_order=0)


class TestAsymptotics:
    def test_xi_dominant_limit(self, params_by_case):
        # m_k -> 2/mu |xi|^4 as |lambda|/|xi|^2 -> 0
        p = params_by_case["I"]
        for name in ("m1", "m2"):
            rep = asymptotic_check(p, name, "xi_dominant")
            final = rep.ratios[np.argmin(rep.regime_parameters)]
            assert abs(final - 1.0) <= 0.01

    def test_lambda_dominant_limit(self, params_by_case):
        p = params_by_case["II"]
        for name in ("m1", "m2"):
            rep = asymptotic_check(p, name, "lambda_dominant")
            final = rep.ratios[np.argmin(rep.regime_parameters)]
            assert abs(final - 1.0) <= 0.01

    def test_exact_homogeneity_at_zero_xi(self, params_by_case):
        # m1 / lambda^2 is constant along xi = 0
        p = params_by_case["II"]
        m1 = make_named_symbol(p, "m1")
        vals = [m1(np.array([0.0]), r * r) / (r * r) ** 2 for r in (0.5, 1.0, 7.0)]
        assert vals[0] == pytest.approx(vals[1], rel=1e-12)
        assert vals[2] == pytest.approx(vals[1], rel=1e-12)

    def test_degree_four_scaling(self, params_by_case):
        p = params_by_case["I"]
        m2 = make_named_symbol(p, "m2")
        a = m2(np.array([0.9]), 1.1 + 0.3j)
        b = m2(np.array([9.0]), (1.1 + 0.3j) * 100.0)
        assert b == pytest.approx(1e4 * a, rel=1e-12)

    def test_bad_regime_rejected(self, params_by_case):
        from kortsolve import DomainError
        with pytest.raises(DomainError):
            asymptotic_check(params_by_case["I"], "m1", "sideways")
        with pytest.raises(CaseMismatchError):
            asymptotic_check(params_by_case["V"], "m1", "xi_dominant")
