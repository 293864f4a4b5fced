"""Large-criticality structure of renormalization fixed points.

Tools here act on solved fixed points: the map ``G(x) = H^(p-1)(x / tau)``,
its multiplier and parabolic germ at ``x0``, the singular expansion of
``log H`` at ``x0``, Abel's equation ``log H(G z) = log H(z) - log tau``,
the inverse branches of ``H``, the presentation intervals, and the
extrapolation of all of these to ``ell = infinity``.

Singular coefficients are obtained in two ways.  :func:`fatou_fit` fits
``log H`` directly; at finite ``ell`` the fit is dominated by the
``|x - x0|**ell`` layer next to ``x0``, so it only exposes a trend.
:func:`abel_coefficients` instead reads them off the Taylor germ of ``G^2``
via the formal Fatou coordinate, which converges smoothly in ``1/ell``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import (
    BranchError,
    DataError,
    DegeneracyError,
    DomainError,
    GeometryError,
    NotNearParabolicError,
    RangeError,
    SamplingError,
    ValidationError,
)
from .funcspace import eval_series, derivative_at
from .renorm import FixedPointSolution, SweepTable, extend_E, extrapolate_inverse_ell, fixed_point_b0


# ---------------------------------------------------------------------------
# the map G

def _H_complex(sol: FixedPointSolution, z):
    """Principal-branch ``(E(z)^2)^(ell/2)``; real arguments give ``|E|^ell``."""
    if not np.iscomplexobj(z):
        return np.abs(eval_series(sol.E, np.clip(z, 0.0, 1.0))) ** sol.ell
    e = eval_series(sol.E, z)
    sq = e * e
    if np.any((sq.real < 0) & (np.abs(sq.imag) <= 1e-15 * np.abs(sq))):
        raise BranchError("E(z)^2 on the negative real axis")
    return np.power(sq, sol.ell / 2.0)


def build_G(sol: FixedPointSolution, samples: int = 2049) -> Callable:
    """``G(x) = H^(p-1)(x / tau)`` as a vectorised real/complex callable."""
    p = sol.p
    y = np.linspace(0.0, 1.0, samples) / sol.tau
    for n in range(1, p - 1):
        y = sol.H(y)
        if y.min() <= sol.x0 <= y.max():
            raise DegeneracyError(f"H^{n}([0, 1/tau]) contains the critical point")

    def G(z):
        w = np.asarray(z) / sol.tau
        for _ in range(p - 1):
            w = _H_complex(sol, w)
        return w.item() if np.ndim(z) == 0 else w

    return G


def multiplier_check(sol: FixedPointSolution, h: float = 1e-3) -> tuple[float, float]:
    """``(|G'(x0)|`` by a five-point stencil, ``tau^(-1/ell))``."""
    if sol.x0 - 2 * h < 0.0 or sol.x0 + 2 * h > 1.0:
        raise DomainError("stencil leaves [0, 1]")
    G = build_G(sol)
    x = sol.x0 + h * np.array([-2.0, -1.0, 1.0, 2.0])
    g = G(x)
    d = (g[0] - 8 * g[1] + 8 * g[2] - g[3]) / (12 * h)
    return float(abs(d)), float(sol.tau ** (-1.0 / sol.ell))


@dataclass(frozen=True)
class ParabolicFit:
    epsilon: float
    residual: float
    derivative: float
    degenerate: bool


def parabolic_fit(G: Callable, x0: float, squared: bool = False, guard: float = 0.05,
                  window: tuple[float, float] = (1e-3, 3e-2), n: int = 24) -> ParabolicFit:
    """Cubic coefficient ``-epsilon`` of ``G^2(x) - x`` around ``x0``.

    ``G^2(x) - x`` is fitted on a log-spaced two-sided stencil against
    ``w, w^2, ..., w^5`` (``w = x - x0``); lower and higher powers absorb the
    finite-``ell`` deviation from an exact parabolic germ.  Pass
    ``squared=True`` when ``G`` already is the second iterate.
    """
    G2 = G if squared else (lambda x: G(G(x)))
    d = np.geomspace(window[0], window[1], n)
    w = np.concatenate([-d[::-1], d])
    x = x0 + w
    y = np.asarray(G2(x), dtype=float) - x
    h = 1e-4
    deriv = float((np.asarray(G2(np.array([x0 - 2 * h, x0 - h, x0 + h, x0 + 2 * h])))
                   @ np.array([1.0, -8.0, 8.0, -1.0])) / (12 * h))
    if abs(deriv - 1.0) > guard:
        raise NotNearParabolicError(f"(G^2)'(x0) = {deriv:.6f} is not within {guard} of 1")
    powers = np.arange(1, 6)
    scale = window[1] ** powers
    A = (w[:, None] / window[1]) ** powers[None, :]
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    coef = coef / scale
    eps = float(-coef[2])
    resid = float(np.max(np.abs(A @ (coef * scale) - y))) if y.size else 0.0
    degenerate = abs(eps) < 1e-10
    return ParabolicFit(eps, resid, deriv, degenerate)


def germ_coefficients(G: Callable, x0: float, order: int = 6, radius: float = 0.05,
                      points: int = 64, iterate: int = 2) -> np.ndarray:
    """Taylor coefficients of ``G^iterate`` at ``x0`` by a Cauchy integral (FFT)."""
    theta = 2 * np.pi * np.arange(points) / points
    z = x0 + radius * np.exp(1j * theta)
    for _ in range(iterate):
        z = G(z)
    a = np.fft.fft(z) / points
    k = np.arange(order + 1)
    coef = a[: order + 1] / radius**k
    return coef.real


# ---------------------------------------------------------------------------
# singular expansion of log H

@dataclass(frozen=True)
class FatouFit:
    C0: float
    C1: float
    C2: float
    residual: float


def fatou_fit(source, x0: float | None = None, window: tuple[float, float] = (1e-4, 1e-1),
              n: int = 40, scale: float = 1.0, bounds: tuple[float, float] = (0.0, 1.0)) -> FatouFit:
    """Fit ``log H(x0 + d) = C0 d^-2 + C1 d^-1 + C2 log|d| + const_(side)``.

    The returned residual is the largest misfit scaled by ``d^2``.

    ``source`` is a :class:`FixedPointSolution` or a callable returning
    ``log H``.  Each side of ``x0`` gets its own constant since the
    holomorphic factor need not agree across the critical point.
    """
    if isinstance(source, FixedPointSolution):
        sol = source
        x0 = sol.x0 if x0 is None else x0

        def logH(x):
            with np.errstate(divide="ignore"):
                return sol.ell * np.log(np.abs(eval_series(sol.E, x)))
    else:
        if x0 is None:
            raise ValidationError("x0 is required with a callable source")
        logH = source
    d = np.geomspace(window[0] * scale, window[1] * scale, n)
    left = -d[x0 - d > bounds[0]]
    right = d[x0 + d < bounds[1]]
    delta = np.concatenate([left[::-1], right])
    if left.size < 3 or right.size < 3:
        raise SamplingError("too few samples on one side of x0")
    with np.errstate(all="ignore"):
        y = np.asarray(logH(x0 + delta), dtype=float)
    if not np.all(np.isfinite(y)):
        raise SamplingError("log H is not finite at a sample (H <= 0)")
    A = np.column_stack([delta**-2.0, delta**-1.0, np.log(np.abs(delta)),
                         (delta < 0).astype(float), (delta > 0).astype(float)])
    # rows weighted by d^2 so that every sample carries comparable rounding error
    wts = delta**2
    Aw = A * wts[:, None]
    colscale = np.max(np.abs(Aw), axis=0)
    coef, *_ = np.linalg.lstsq(Aw / colscale, y * wts, rcond=None)
    coef = coef / colscale
    resid = float(np.max(np.abs((A @ coef - y) * wts)))
    return FatouFit(float(coef[0]), float(coef[1]), float(coef[2]), resid)


def fatou_from_germ(a: float, b: float, c: float, log_tau: float) -> tuple[float, float, float]:
    """Singular coefficients of ``h = log H`` from ``G^2(w) = w + a w^3 + b w^4 + c w^5``.

    The Fatou coordinate ``Phi = A w^-2 + B w^-1 + C log w`` of the germ
    satisfies ``Phi(G^2) = Phi + 1``, and ``h = -2 log(tau) Phi``.
    """
    if a == 0.0:
        raise DegeneracyError("vanishing cubic term: no parabolic expansion")
    A = -1.0 / (2.0 * a)
    B = b / a**2
    Cc = (B * b - A * (3.0 * a**2 - 2.0 * c)) / a
    k = -2.0 * log_tau
    return k * A, k * B, k * Cc


def abel_coefficients(sol: FixedPointSolution, radius: float = 0.05) -> tuple[float, float, float]:
    coef = germ_coefficients(build_G(sol), sol.x0, order=6, radius=radius)
    return fatou_from_germ(coef[3], coef[4], coef[5], math.log(sol.tau))


def abel_residual(sol: FixedPointSolution, grid: Sequence[complex], tau: float | None = None) -> float:
    """sup over ``grid`` of ``|log H(G z) - log H(z) + log tau|``.

    ``log H`` is ``(ell/2) Log(E^2)`` with the principal logarithm.  ``tau``
    overrides the scaling in the additive constant only.
    """
    z = np.asarray(grid)
    G = build_G(sol)
    tau = sol.tau if tau is None else float(tau)
    with np.errstate(divide="ignore"):
        if np.iscomplexobj(z):
            e1 = eval_series(sol.E, z) ** 2
            e2 = eval_series(sol.E, G(z)) ** 2
            for e in (e1, e2):
                if np.any((e.real <= 0) & (np.abs(e.imag) <= 1e-12 * np.abs(e))):
                    raise BranchError("E^2 crosses the branch cut of Log on the grid")
            val = 0.5 * sol.ell * (np.log(e2) - np.log(e1)) + math.log(tau)
        else:
            if np.any(z < 0.0) or np.any(z > 1.0):
                raise DomainError("real grid must lie in [0, 1]")
            h1 = sol.ell * np.log(np.abs(eval_series(sol.E, z)))
            h2 = sol.ell * np.log(np.abs(eval_series(sol.E, G(z))))
            val = h2 - h1 + math.log(tau)
    val = np.abs(val)
    if not np.all(np.isfinite(val)):
        raise BranchError("log H undefined at a grid point (H = 0)")
    return float(np.max(val))


# ---------------------------------------------------------------------------
# inverse branches and presentation intervals

def _invert_E(sol: FixedPointSolution, y: float, upper: float) -> float:
    """Root of ``E_ext(x) = y`` in [0, upper], E continued beyond 1."""
    f = lambda x: float(extend_E(sol, np.array([x]))[0] - y)
    fa, fb = f(0.0), f(upper)
    if fa * fb > 0:
        raise RangeError(f"value {y} outside the range of E on [0, {upper}]")
    if fa == 0.0:
        return 0.0
    return float(brentq(f, 0.0, upper, xtol=1e-16, rtol=1e-15))


def inverse_branch_P(sol: FixedPointSolution, sign: int, w: complex, upper: float | None = None):
    """``E^{-1}(sign * exp(w / ell))``, the branch of ``H^{-1}(exp w)``.

    Real ``w`` is inverted by bracketing on [0, upper] (default [0, 1]);
    complex ``w`` is polished by Newton's method from the real solution at
    ``Re w``.
    """
    if sign not in (1, -1):
        raise ValidationError("sign must be +1 or -1")
    upper = 1.0 if upper is None else float(upper)
    if np.isreal(w):
        return _invert_E(sol, sign * math.exp(float(np.real(w)) / sol.ell), upper)
    w = complex(w)
    target = sign * np.exp(w / sol.ell)
    z = complex(_invert_E(sol, sign * math.exp(w.real / sol.ell), upper))
    for _ in range(50):
        r = eval_series(sol.E, z) - target
        step = r / derivative_at(sol.E, z)
        z -= step
        if abs(step) < 1e-15 * max(1.0, abs(z)):
            break
    if abs(eval_series(sol.E, z) - target) > 1e-10 * max(1.0, abs(target)):
        raise RangeError(f"no preimage of {target} near the real branch")
    return z


@dataclass
class PresentationIntervals:
    J: list[tuple[float, float]]
    Jcal: list[tuple[float, float]]
    Rprime: float
    b0: float


def _preimage_interval(sol, interval, side, upper):
    """Component of ``H^{-1}(interval)`` on the given side of x0 (interval in [0, inf))."""
    lo, hi = interval
    r_lo = lo ** (1.0 / sol.ell)
    r_hi = hi ** (1.0 / sol.ell)
    if side < 0:   # E > 0, E decreasing: larger |E| is further left
        return (_invert_E(sol, r_hi, upper), _invert_E(sol, r_lo, upper))
    return (_invert_E(sol, -r_lo, upper), _invert_E(sol, -r_hi, upper))


def _critical_interval(sol, v, upper):
    """``H^{-1}([0, v))``: the component around x0."""
    r = v ** (1.0 / sol.ell)
    return (_invert_E(sol, r, upper), _invert_E(sol, -r, upper))


def presentation_intervals(sol: FixedPointSolution, tol: float = 1e-9) -> PresentationIntervals:
    """Intervals ``J_q`` and their shrunk versions carrying the presentation function.

    ``J_1 = (0, b0/tau)``, ``J_p`` is the component of ``H^{-1}(J_1)`` about
    x0, and for ``1 < q < p`` ``J_q`` is the component of ``H^{q-p}(J_p)``
    containing ``H^{q-1}(J_1)``.  The same construction from
    ``(0, R'/tau)`` gives the shrunk intervals.
    """
    p = sol.p
    b0 = fixed_point_b0(sol)
    upper = b0

    def build(top):
        J = [None] * p
        J[0] = (0.0, top / sol.tau)
        J[p - 1] = _critical_interval(sol, top / sol.tau, upper)
        mid = 0.5 * J[0][1]
        marks = [mid]
        for _ in range(p - 1):
            marks.append(float(sol.H(marks[-1])))
        for q in range(p - 1, 1, -1):   # 1-based q; J[q-1]
            side = -1 if marks[q - 1] < sol.x0 else 1
            J[q - 1] = _preimage_interval(sol, J[q], side, upper)
        return J

    J = build(b0)
    sup_end = max(iv[1] for iv in J)
    Rp = 0.5 * (max(1.0, sup_end) + b0)
    Jcal = build(Rp)
    for q in range(p):
        a, b = Jcal[q]
        A, B = J[q]
        if a < A - tol or b > B + tol:
            raise GeometryError(f"shrunk interval {q + 1} not inside J_{q + 1}")
        if a < -tol or b > Rp + tol:
            raise GeometryError(f"shrunk interval {q + 1} not inside (0, R')")
    order = sorted(Jcal)
    for (a1, b1), (a2, b2) in zip(order, order[1:]):
        if b1 > a2 - tol:
            raise GeometryError("presentation intervals overlap")
    return PresentationIntervals(J, Jcal, Rp, b0)


# ---------------------------------------------------------------------------
# extrapolation

@dataclass(frozen=True)
class EWLimitEstimate:
    x0: float
    tau: float
    C0: float
    C1: float
    C2: float
    epsilon: float
    fit_residual: float
    source_ells: tuple[float, ...]

    def to_json(self) -> str:
        d = asdict(self)
        d["source_ells"] = list(self.source_ells)
        return json.dumps({k: (repr(v) if isinstance(v, float) else v) for k, v in d.items()}, indent=1)


@dataclass(frozen=True)
class LimitDiagnostics:
    ell: float
    x0: float
    tau: float
    C0: float
    C1: float
    C2: float
    epsilon: float
    mult_measured: float
    mult_predicted: float


def diagnostics(sol: FixedPointSolution) -> LimitDiagnostics:
    G = build_G(sol)
    coef = germ_coefficients(G, sol.x0)
    C0, C1, C2 = fatou_from_germ(coef[3], coef[4], coef[5], math.log(sol.tau))
    meas, pred = multiplier_check(sol)
    return LimitDiagnostics(sol.ell, sol.x0, sol.tau, C0, C1, C2, float(-coef[3]), meas, pred)


def diagnostics_csv(rows: Sequence[LimitDiagnostics]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["ell", "x0", "tau", "C0", "C1", "C2", "mult_measured", "mult_predicted"])
    for r in rows:
        w.writerow([repr(v) for v in (r.ell, r.x0, r.tau, r.C0, r.C1, r.C2, r.mult_measured, r.mult_predicted)])
    return buf.getvalue()


def extrapolate_limit(sweep: SweepTable | Sequence[FixedPointSolution],
                      fits: Sequence[LimitDiagnostics] | None = None,
                      window: int = 4) -> EWLimitEstimate:
    """Extrapolate per-ell data to ell = infinity with ``q_inf + A/ell + B/ell^2``."""
    sols = sweep.solutions if isinstance(sweep, SweepTable) else list(sweep)
    if fits is None:
        fits = [diagnostics(s) for s in sols]
    fits = list(fits)
    if len(fits) < 4:
        raise DataError("extrapolation needs at least four ell values")
    ells = np.array([f.ell for f in fits])
    if np.any(np.diff(ells) <= 0):
        raise DataError("ell values must be strictly increasing")
    tail = slice(-window, None)
    taus = np.array([f.tau for f in fits])
    x0s = np.array([f.x0 for f in fits])
    if np.any(np.diff(taus[tail]) <= 0) or np.any(np.diff(x0s[tail]) >= 0):
        raise DataError("tau must increase and x0 decrease over the extrapolation window")
    est = {}
    misfit = 0.0
    for name in ("x0", "tau", "C0", "C1", "C2", "epsilon"):
        vals = np.array([getattr(f, name) for f in fits])
        est[name], m = extrapolate_inverse_ell(ells, vals, window)
        misfit = max(misfit, m)
    out = EWLimitEstimate(fit_residual=misfit, source_ells=tuple(float(e) for e in ells), **est)
    if not out.tau > 1.0:
        raise DataError(f"extrapolated tau = {out.tau} does not exceed 1")
    if not out.C0 < 0.0:
        raise DataError(f"extrapolated C0 = {out.C0} is not negative")
    if not out.epsilon > 0.0:
        raise DataError(f"extrapolated epsilon = {out.epsilon} is not positive")
    return out
