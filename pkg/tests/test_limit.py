import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import PD_ELLS
from renormlab.errors import (
    BranchError,
    DataError,
    DomainError,
    NotNearParabolicError,
    RangeError,
    SamplingError,
    ValidationError,
)
from renormlab.limit import (
    abel_coefficients,
    abel_residual,
    build_G,
    diagnostics,
    diagnostics_csv,
    extrapolate_limit,
    fatou_fit,
    fatou_from_germ,
    germ_coefficients,
    inverse_branch_P,
    multiplier_check,
    parabolic_fit,
    presentation_intervals,
)
from renormlab.funcspace import derivative_at
from renormlab.renorm import H_extended, residual_sup


@pytest.fixture(scope="module")
def pd_diagnostics(pd_sweep):
    return [diagnostics(s) for s in pd_sweep.solutions]


# -- the map G ---------------------------------------------------------------

def test_G_fixes_critical_point_and_normalizes(pd_sweep, p3):
    for sol in pd_sweep.solutions + [p3]:
        G = build_G(sol)
        assert abs(G(sol.x0) - sol.x0) <= 1e-9
        if sol.p == 2:
            assert G(0.0) == pytest.approx(1.0, abs=1e-12)
        xs = np.linspace(0.0, 1.0, 64)
        # E(x) = alpha E(G x)
        assert np.max(np.abs(sol.E(xs) - sol.alpha * sol.E(G(xs)))) <= 1e-9


def test_multiplier_identity(pd2, pd128):
    meas, pred = multiplier_check(pd2)
    assert meas == pytest.approx(0.39953, abs=1e-4)
    assert abs(meas - pred) <= 1e-6
    meas, pred = multiplier_check(pd128)
    assert 0.97 < pred < 1.0 and meas < 1.0
    assert abs(meas - pred) <= 1e-6


def test_multiplier_stencil_domain(pd2):
    with pytest.raises(DomainError):
        multiplier_check(pd2, h=0.3)


# -- parabolic fit -----------------------------------------------------------

def test_parabolic_fit_synthetic():
    x0 = 0.4
    fit = parabolic_fit(lambda x: x - 2.0 * (x - x0) ** 3, x0, squared=True)
    assert fit.epsilon == pytest.approx(2.0, abs=1e-8)
    assert not fit.degenerate
    ident = parabolic_fit(lambda x: np.asarray(x, dtype=float), x0, squared=True)
    assert ident.degenerate


def test_parabolic_fit_guard(pd2):
    with pytest.raises(NotNearParabolicError):
        parabolic_fit(build_G(pd2), pd2.x0)


def test_parabolic_fit_near_limit(pd256):
    fit = parabolic_fit(build_G(pd256), pd256.x0)
    assert abs(fit.derivative - 1.0) <= 0.05
    assert fit.epsilon > 0.0


def test_germ_of_known_map():
    coef = germ_coefficients(lambda z: z + 0.5 * z**3 - z**4, 0.0, iterate=1)
    assert np.allclose(coef, [0, 1, 0, 0.5, -1.0, 0, 0], atol=1e-9)


# -- singular expansion ------------------------------------------------------

@settings(max_examples=30, deadline=None)
@given(st.floats(-5.0, -0.1), st.floats(-3.0, 3.0), st.floats(-3.0, 3.0), st.floats(-2.0, 2.0))
def test_fatou_fit_recovers_planted_coefficients(C0, C1, C2, const):
    x0 = 0.4
    logH = lambda x: C0 / (x - x0) ** 2 + C1 / (x - x0) + C2 * np.log(np.abs(x - x0)) + const
    fit = fatou_fit(logH, x0)
    assert fit.C0 == pytest.approx(C0, abs=1e-8)
    assert fit.C1 == pytest.approx(C1, abs=1e-6)
    assert fit.C2 == pytest.approx(C2, abs=1e-6)
    assert fit.residual <= 1e-10


def test_fatou_fit_errors():
    with pytest.raises(ValidationError):
        fatou_fit(lambda x: x)
    with pytest.raises(SamplingError):
        fatou_fit(lambda x: -1.0 / x**2, 0.0)


def test_fatou_from_germ_solves_abel_equation():
    a, b, c = -0.8, 0.3, 0.2
    A, B, C = (v / -2.0 for v in fatou_from_germ(a, b, c, 1.0))
    phi = lambda w: A / w**2 + B / w + C * np.log(w)
    g = lambda w: w + a * w**3 + b * w**4 + c * w**5
    errs = [abs(phi(g(w)) - phi(w) - 1.0) for w in (4e-2, 2e-2, 1e-2)]
    assert errs[2] < errs[1] < errs[0] and errs[2] <= 0.05


def test_fit_on_solutions_trends(pd_sweep):
    # direct fit of log H is far from the asymptotic regime, but its C0 is
    # negative and grows in size with ell
    fits = [fatou_fit(s, window=(0.05, 0.35), bounds=(0.0, 1.0)) for s in pd_sweep.solutions[-2:]]
    assert fits[1].C0 < 0.0 and abs(fits[1].C0) > abs(fits[0].C0)


def test_abel_route_settles(pd_diagnostics):
    C0 = np.array([d.C0 for d in pd_diagnostics])
    assert np.all(C0[2:] < 0.0)
    steps = np.abs(np.diff(C0[-4:]))
    assert np.all(np.diff(steps) < 0)


# -- Abel equation -----------------------------------------------------------

def test_abel_residual_real_and_complex(pd_sweep, p3):
    for sol in pd_sweep.solutions + [p3]:
        grid = np.linspace(0.0, 1.0, 64)
        grid = grid[np.abs(grid - sol.x0) > 1e-3]
        assert abel_residual(sol, grid) <= 1e-9
    sol = pd_sweep.solutions[0]
    cgrid = np.linspace(0.05, 0.95, 64) + 0.01j
    assert abel_residual(sol, cgrid) <= 1e-7


def test_abel_residual_tracks_functional_defect(pd2):
    grid = np.linspace(0.0, 1.0, 64)
    grid = grid[pd2.H(grid) >= 0.1]
    assert abel_residual(pd2, grid) <= 10 * max(residual_sup(pd2, 64), 1e-14) / 0.1


def test_abel_residual_sees_wrong_tau(pd2):
    grid = np.linspace(0.0, 0.3, 16)
    assert abel_residual(pd2, grid, tau=1.01 * pd2.tau) == pytest.approx(math.log(1.01), abs=1e-9)


def test_abel_residual_branch_errors(pd2):
    with pytest.raises(BranchError):
        # a point where E is purely imaginary, so E^2 lies on the cut
        z = complex(pd2.x0)
        for _ in range(30):
            z -= (pd2.E(z) - 0.05j) / derivative_at(pd2.E, z)
        abel_residual(pd2, np.array([z]))
    with pytest.raises(DomainError):
        abel_residual(pd2, np.array([1.5]))


# -- inverse branches --------------------------------------------------------

def test_inverse_branch_P(pd2):
    assert inverse_branch_P(pd2, 1, 0.0) == pytest.approx(0.0, abs=1e-15)
    for w in (-0.5, -2.0, -5.0, -1.9):
        for sign in (1, -1):
            if sign < 0 and w > 2 * math.log(abs(1 / pd2.alpha)):
                with pytest.raises(RangeError):
                    inverse_branch_P(pd2, sign, w)
                continue
            x = inverse_branch_P(pd2, sign, w)
            assert pd2.H(x) == pytest.approx(math.exp(w), abs=1e-12)
            assert (x < pd2.x0) == (sign > 0)
    # E(1) = 1/alpha < 0, so the minus branch hits 1 at w = -log tau
    assert inverse_branch_P(pd2, -1, -math.log(pd2.tau)) == pytest.approx(1.0, abs=1e-12)
    z = inverse_branch_P(pd2, 1, -0.5 + 0.2j)
    e = pd2.E(z)
    assert abs(np.power(e * e, pd2.ell / 2) - np.exp(-0.5 + 0.2j)) <= 1e-10
    with pytest.raises(ValidationError):
        inverse_branch_P(pd2, 0, -1.0)


# -- presentation intervals --------------------------------------------------

def _disjoint(intervals, tol=1e-9):
    order = sorted(intervals)
    return all(b1 + tol < a2 for (_, b1), (a2, _) in zip(order, order[1:]))


def test_presentation_intervals_period_two(pd2):
    pi = presentation_intervals(pd2)
    assert len(pi.J) == 2 and _disjoint(pi.Jcal)
    assert pi.J[0][0] == 0.0 and pi.J[1][0] < pd2.x0 < pi.J[1][1]
    assert 1.0 <= pi.Rprime < pi.b0


def test_presentation_intervals_period_three(p3):
    pi = presentation_intervals(p3)
    assert len(pi.J) == 3 and _disjoint(pi.Jcal)
    # H maps J_3 onto J_1 and J_2 into J_3
    a, b = pi.J[2]
    xs = np.linspace(a, b, 101)
    h = p3.H(np.clip(xs, 0.0, 1.0))
    assert h.max() == pytest.approx(pi.J[0][1], rel=1e-8)
    lo, hi = sorted(H_extended(p3, np.array(pi.J[1])))
    assert pi.J[2][0] - 1e-9 <= lo and hi <= pi.J[2][1] + 1e-9


# -- extrapolation -----------------------------------------------------------

def test_extrapolated_limit(pd_sweep, pd_diagnostics):
    est = extrapolate_limit(pd_sweep, pd_diagnostics)
    assert 25.0 <= est.tau <= 35.0
    assert est.C0 < 0.0 and est.epsilon > 0.0
    assert 0.0 < est.x0 < pd_sweep.solutions[-1].x0
    assert est.source_ells == tuple(PD_ELLS)


def test_extrapolation_errors(pd_sweep, pd_diagnostics):
    with pytest.raises(DataError):
        extrapolate_limit(pd_sweep.solutions[:3], pd_diagnostics[:3])
    with pytest.raises(DataError):
        extrapolate_limit(pd_sweep, pd_diagnostics[::-1])


def test_diagnostics_csv(pd_diagnostics):
    lines = diagnostics_csv(pd_diagnostics).strip().splitlines()
    assert lines[0].startswith("ell,x0,tau,C0")
    assert len(lines) == 1 + len(PD_ELLS)


def test_abel_coefficients_match_diagnostics(pd128, pd_diagnostics):
    C0, C1, C2 = abel_coefficients(pd128)
    assert C0 == pytest.approx(pd_diagnostics[-1].C0, rel=1e-12)
