import csv
import io

import numpy as np
import pytest

from conftest import PD_ELLS, PERIOD_THREE
from oracles import alpha_from_cascade
from renormlab.combinatorics import PERIOD_DOUBLING, OrderType, superstable_parameters
from renormlab.errors import CombinatoricsError, NoConvergenceError, ValidationError
from renormlab.funcspace import SeriesMap
from renormlab.renorm import (
    FixedPointSolution,
    H_extended,
    fixed_point_b0,
    quadratic_map,
    renormalize,
    residual_sup,
    resolve_precision,
    solve_fixed_point,
    sweep,
)


def test_period_doubling_alpha_matches_cascade_oracle(pd2_deg40):
    oracle = alpha_from_cascade()
    assert abs(abs(pd2_deg40.alpha) - oracle) <= 1e-6
    assert pd2_deg40.alpha < 0
    assert pd2_deg40.tau == pytest.approx(6.26454, abs=1e-4)
    assert abs(pd2_deg40.tau - pd2_deg40.alpha**2) <= 1e-12 * pd2_deg40.tau


def test_normalization_and_closest_return(pd2, p3):
    for sol in (pd2, p3):
        assert sol.H(0.0) == pytest.approx(1.0, abs=1e-12)
        assert sol.H(sol.x0) <= 1e-20
        y = 1.0
        for _ in range(sol.p - 1):
            y = sol.H(y)
        assert y == pytest.approx(1.0 / sol.tau, abs=1e-10)


def test_continuation_to_ell_four(pd2):
    s4 = solve_fixed_point(4.0, PERIOD_DOUBLING, degree=64, tol=1e-11, init=pd2)
    assert s4.residual <= 1e-11
    assert s4.tau > pd2.tau


def test_solution_invariants(pd_sweep, p3, p3_ell4):
    for sol in pd_sweep.solutions + [p3, p3_ell4]:
        assert sol.residual <= 1e-11
        assert sol.tau > 1.0
        assert abs(abs(sol.alpha) ** sol.ell - sol.tau) <= 1e-12 * sol.tau
        assert 0.0 < sol.x0 < 1.0


def test_period_three_solution(p3):
    # seeds from the superstable period-3 map; the orbit type is enforced
    assert p3.order_type == PERIOD_THREE
    assert p3.alpha == pytest.approx(-9.2773411, abs=1e-6)


def test_residual_sensitivity_and_refinement(pd2):
    base = residual_sup(pd2, 64)
    assert base <= 1e-11
    c = pd2.E.coeffs.copy()
    c[3] += 1e-3
    bumped = FixedPointSolution(SeriesMap((0.0, 1.0), c), pd2.ell, pd2.alpha, pd2.tau, pd2.x0,
                                0.0, pd2.order_type)
    assert residual_sup(bumped, 64) >= 1e-5
    fine = residual_sup(pd2, 1024)
    assert fine < 10 * max(base, 1e-15)
    assert residual_sup(bumped, 1024) < 10 * residual_sup(bumped, 64)


def test_renormalize_reproduces_fixed_point(pd_sweep, p3):
    for sol in pd_sweep.solutions[:4] + [p3]:
        m2, alpha = renormalize(sol.map, sol.order_type)
        assert np.max(np.abs(m2.E.coeffs - sol.E.coeffs)) <= 1e-10
        assert alpha == pytest.approx(sol.alpha, rel=1e-12)


def test_renormalize_twice_equals_period_four(pd2):
    # two period-doubling steps form one step with the period-4 type of the cascade
    m1, a1 = renormalize(pd2.map, PERIOD_DOUBLING)
    m2, a2 = renormalize(m1, PERIOD_DOUBLING)
    t4 = OrderType((2, 4, 1, 3))
    m4, a4 = renormalize(pd2.map, t4)
    assert a4 == pytest.approx(a1 * a2, rel=1e-10)
    assert np.max(np.abs(m4.E.coeffs - m2.E.coeffs)) <= 1e-10


def test_one_step_from_quadratic_family():
    # the period-2 superstable map has E(1) = 0, so alpha = 1/E(1) is infinite;
    # the period-8 superstable parameter gives a finite first step
    lam8 = min(lam for lam, t in superstable_parameters(8) if lam > 1.38)
    m, alpha = renormalize(quadratic_map(lam8), PERIOD_DOUBLING)
    assert abs(alpha - (-2.50)) <= 0.15 * 2.50
    assert abs(alpha - 1.0 / (1.0 - lam8)) <= 1e-12


def test_renormalize_rejects_wrong_combinatorics(p3):
    with pytest.raises(CombinatoricsError):
        renormalize(p3.map, PERIOD_DOUBLING)
    with pytest.raises(CombinatoricsError):
        renormalize(quadratic_map(1.0), PERIOD_DOUBLING)


def test_repelling_fixed_point_beyond_one(pd_sweep, p3):
    for sol in pd_sweep.solutions + [p3]:
        b0 = fixed_point_b0(sol)
        assert 1.0 < b0 < sol.tau
        h = 1e-6
        slope = (H_extended(sol, np.array([b0 + h])) - H_extended(sol, np.array([b0 - h])))[0] / (2 * h)
        assert slope > 1.0


def test_even_form_doubling_identity(pd_sweep):
    # f(y) = E(|y|^ell) satisfies f = alpha^n o f^(2^n) o alpha^-n for n = 1, 2
    ys = np.linspace(-1.0, 1.0, 41)
    for sol in pd_sweep.solutions[:4]:
        f = lambda y: sol.E(np.minimum(np.abs(y) ** sol.ell, 1.0))
        for n in (1, 2):
            y = ys / sol.alpha**n
            for _ in range(2**n):
                y = f(y)
            assert np.max(np.abs(sol.alpha**n * y - f(ys))) <= 1e-9


def test_errors():
    with pytest.raises(ValidationError):
        solve_fixed_point(1.0, PERIOD_DOUBLING)
    with pytest.raises(ValidationError):
        solve_fixed_point(2.0, PERIOD_DOUBLING, degree=8)
    with pytest.raises(CombinatoricsError):
        solve_fixed_point(2.0, OrderType((3, 1, 2, 4)), degree=40)
    with pytest.raises(ValidationError):
        sweep(PERIOD_DOUBLING, [4.0, 2.0])


def test_under_resolved_series_is_rejected(pd128):
    with pytest.raises(NoConvergenceError) as info:
        solve_fixed_point(256.0, PERIOD_DOUBLING, degree=64, tol=1e-11, init=pd128)
    assert info.value.residual > 1e-11


def test_sweep_table(pd_sweep, pd2):
    taus = pd_sweep.taus
    assert np.all(np.diff(taus) > 0)
    assert 25.0 <= pd_sweep.extrapolated_tau_inf <= 35.0
    for ell, tau, alpha, res, its in pd_sweep.rows:
        assert abs(abs(alpha) ** ell - tau) <= 1e-12 * tau
        assert res <= 1e-11
    rows = list(csv.reader(io.StringIO(pd_sweep.to_csv(footer=False))))
    assert rows[0] == ["ell", "tau", "alpha", "residual", "iters"]
    assert [float(r[0]) for r in rows[1:]] == PD_ELLS
    assert float(rows[1][1]) == pd2.tau


def test_single_element_sweep_equals_solve(pd2):
    table = sweep(PERIOD_DOUBLING, [2.0], degree=64, tol=1e-11)
    assert table.rows[0][1] == pd2.tau and table.rows[0][2] == pd2.alpha


def test_solution_json_round_trip(pd128):
    back = FixedPointSolution.from_json(pd128.to_json())
    assert back.alpha == pd128.alpha and back.alpha_lo == pd128.alpha_lo
    assert back.E.coeffs.tolist() == pd128.E.coeffs.tolist()
    assert back.E.coeffs_lo.tolist() == pd128.E.coeffs_lo.tolist()
    assert back.order_type == pd128.order_type


def test_precision_resolution(monkeypatch):
    monkeypatch.delenv("RENORM_PRECISION", raising=False)
    assert resolve_precision(None, 2.0) == "double"
    assert resolve_precision(None, 128.0) == "dd"
    monkeypatch.setenv("RENORM_PRECISION", "double")
    assert resolve_precision(None, 128.0) == "double"
    with pytest.raises(ValidationError):
        resolve_precision("quad", 2.0)


def test_double_double_used_at_top_end(pd_sweep):
    assert pd_sweep.solutions[-1].precision == "dd"
    assert pd_sweep.solutions[-1].E.coeffs_lo is not None
