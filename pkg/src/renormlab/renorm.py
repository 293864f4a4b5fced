"""Renormalization fixed points ``tau * H^p(x) = H(tau * x)``.

The unknowns are the Chebyshev coefficients of ``E`` on [0, 1] together with
the scaling ``alpha`` of the even form; ``tau = |alpha|**ell``.  Writing
``G(x) = H^(p-1)(x / tau)`` the fixed-point equation is equivalent to

    E(x) = alpha * E(G(x)),   x in [0, 1],   E(0) = 1,

which is collocated at the Chebyshev extreme points of [0, 1] and solved by
damped Newton iteration.  In double-double mode the residual is evaluated
in extended precision while the Jacobian stays in double (iterative
refinement), which lets large ``ell`` reach residuals well below 1e-14.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from numpy.polynomial import chebyshev as C
from scipy.optimize import brentq

from . import dd
from .combinatorics import OrderType, critical_orbit_type, superstable_parameter, validate_admissible
from .errors import (
    CombinatoricsError,
    EscapeError,
    NoConvergenceError,
    RenormError,
    ValidationError,
    WrongBranchError,
)
from .funcspace import (
    SeriesMap,
    UnimodalMap,
    eval_series,
    fit_function,
    lobatto_nodes,
    values_to_coeffs,
)

MAX_ITER = 60
MAX_HALVINGS = 20
DD_THRESHOLD_ELL = 64.0
SEED_FRACTIONS = (0.1, 0.2, 0.05, 0.4, 0.55, 0.3, 0.7, 0.02)


def resolve_precision(precision: str | None, ell: float) -> str:
    """Map ``None``/``"auto"``/env setting to ``"double"`` or ``"dd"``."""
    if precision is None:
        precision = os.environ.get("RENORM_PRECISION", "auto")
    precision = precision.lower()
    if precision == "auto":
        return "dd" if ell >= DD_THRESHOLD_ELL else "double"
    if precision not in ("double", "dd"):
        raise ValidationError(f"unknown precision mode {precision!r}")
    return precision


@dataclass(frozen=True, eq=False)
class FixedPointSolution:
    E: SeriesMap
    ell: float
    alpha: float
    tau: float
    x0: float
    residual: float
    order_type: OrderType
    iterations: int = 0
    precision: str = "double"
    alpha_lo: float = 0.0

    @property
    def p(self) -> int:
        return self.order_type.p

    @property
    def map(self) -> UnimodalMap:
        return UnimodalMap(self.E, self.ell, self.x0)

    def H(self, x):
        return np.abs(eval_series(self.E, x)) ** self.ell

    def to_dict(self) -> dict:
        return {
            "ell": repr(self.ell),
            "alpha": dd.to_decimal_string(self.alpha, self.alpha_lo),
            "tau": repr(self.tau),
            "x0": repr(self.x0),
            "residual": repr(self.residual),
            "order_type": list(self.order_type.perm),
            "iterations": self.iterations,
            "precision": self.precision,
            "E": self.E.to_dict(),
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "FixedPointSolution":
        try:
            a_hi, a_lo = dd.from_decimal_string(str(obj["alpha"]))
            return cls(
                E=SeriesMap.from_dict(obj["E"]),
                ell=float(obj["ell"]),
                alpha=a_hi,
                alpha_lo=a_lo,
                tau=float(obj["tau"]),
                x0=float(obj["x0"]),
                residual=float(obj["residual"]),
                order_type=OrderType(tuple(obj["order_type"])),
                iterations=int(obj.get("iterations", 0)),
                precision=str(obj.get("precision", "double")),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ValidationError(f"malformed solution object: {exc}") from exc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_json(cls, text: str) -> "FixedPointSolution":
        return cls.from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# collocation system

def _residual(V: np.ndarray, ell: float, p: int, nodes: np.ndarray) -> np.ndarray:
    """Residuals for a batch of unknown vectors ``V`` of shape (K, N+2)."""
    c = V[:, :-1].T[:, :, None]           # (N+1, K, 1)
    alpha = V[:, -1][:, None]             # (K, 1)
    with np.errstate(all="ignore"):
        tau = np.abs(alpha) ** ell
        t = 2.0 * (nodes[None, :] / tau) - 1.0
        for _ in range(p - 1):
            t = 2.0 * np.abs(C.chebval(t, c, tensor=False)) ** ell - 1.0
        lhs = alpha * C.chebval(t, c, tensor=False)
        rhs = C.chebval(2.0 * nodes - 1.0, c[:, :, 0], tensor=True)
        e0 = C.chebval(-1.0, c[:, :, 0])
    return np.concatenate([lhs - rhs, (e0 - 1.0)[:, None]], axis=1)


def _residual_dd(v: dd.DD, ell: float, p: int, nodes: np.ndarray) -> np.ndarray:
    E = SeriesMap((0.0, 1.0), v.hi[:-1], v.lo[:-1])
    alpha = v[-1:]
    tau = abs(alpha) ** ell
    y = dd.DD(nodes) / tau
    with np.errstate(all="ignore"):
        for _ in range(p - 1):
            y = abs(_clenshaw_unchecked(E, y)) ** ell
        lhs = alpha * _clenshaw_unchecked(E, y)
        rhs = _clenshaw_unchecked(E, dd.DD(nodes))
        e0 = _clenshaw_unchecked(E, dd.DD(np.zeros(1)))
    r = lhs - rhs
    return np.concatenate([r.hi + r.lo, (e0 - 1.0).to_float()])


def _clenshaw_unchecked(E: SeriesMap, x: dd.DD) -> dd.DD:
    # iterates of a poor Newton trial may leave [0, 1]; the residual then
    # measures the defect of the polynomial continuation, which is harmless
    return _clenshaw(E, dd.DD(np.clip(x.hi, -2.0, 3.0), x.lo))


def _clenshaw(E: SeriesMap, x: dd.DD) -> dd.DD:
    t = x * 2.0 - 1.0
    c = E.dd_coeffs()
    b1 = dd.DD(np.zeros_like(t.hi))
    b2 = dd.DD(np.zeros_like(t.hi))
    t2 = t * 2.0
    for k in range(E.degree, 0, -1):
        b1, b2 = t2 * b1 - b2 + c[k], b1
    return t * b1 - b2 + c[0]


def _jacobian(v: np.ndarray, r: np.ndarray, ell: float, p: int, nodes: np.ndarray) -> np.ndarray:
    h = 1e-7 * np.maximum(1.0, np.abs(v))
    V = np.tile(v, (v.size, 1)) + np.diag(h)
    R = _residual(V, ell, p, nodes)
    return ((R - r[None, :]) / h[:, None]).T


def _newton(v: dd.DD, ell: float, p: int, nodes: np.ndarray, tol: float, precision: str):
    """Damped Newton iteration; returns (v, residual_norm, iterations).

    In double-double mode the iteration first runs in double and only the
    final refinement steps use the extended-precision residual.
    """
    if precision != "dd":
        return _newton_stage(v, ell, p, nodes, tol, "double")
    try:
        v, _, its = _newton_stage(v, ell, p, nodes, max(tol, 1e-13), "double")
    except NoConvergenceError as exc:
        if not exc.residual < 1e-8 or exc.best is None:
            raise
        v, its = exc.best, exc.iterations
    v, nr, more = _newton_stage(v, ell, p, nodes, tol, "dd")
    return v, nr, its + more


def _newton_stage(v: dd.DD, ell: float, p: int, nodes: np.ndarray, tol: float, precision: str):

    def res(w: dd.DD) -> np.ndarray:
        if precision == "dd":
            return _residual_dd(w, ell, p, nodes)
        return _residual(w.hi[None, :], ell, p, nodes)[0]

    def norm(r):
        n = np.max(np.abs(r))
        return n if np.isfinite(n) else np.inf

    r = res(v)
    nr = norm(r)
    polish = 0
    for it in range(1, MAX_ITER + 1):
        if nr <= tol:
            polish += 1
            if polish > 3:
                return v, nr, it - 1
        J = _jacobian(v.hi, _residual(v.hi[None, :], ell, p, nodes)[0], ell, p, nodes)
        if not np.all(np.isfinite(J)):
            raise NoConvergenceError(f"non-finite Jacobian at ell={ell}",
                                     residual=nr, iterations=it, ell=ell)
        try:
            dv = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError:
            dv = np.linalg.lstsq(J, -r, rcond=None)[0]
        step = 1.0
        for _ in range(MAX_HALVINGS):
            w = v + dv * step
            rw = res(w)
            nw = norm(rw)
            if nw < nr:
                break
            step *= 0.5
        else:
            if nr <= tol:
                return v, nr, it - 1
            exc = NoConvergenceError(
                f"line search failed at ell={ell}", residual=nr, iterations=it, ell=ell)
            exc.best = v
            raise exc
        if nr <= tol and nw > 0.1 * nr:
            # polishing no longer pays off
            if nw < nr:
                v, r, nr = w, rw, nw
            return v, nr, it
        v, r, nr = w, rw, nw
    if nr <= tol:
        return v, nr, MAX_ITER
    exc = NoConvergenceError(
        f"Newton did not converge at ell={ell} (residual {nr:.3e})",
        residual=nr, iterations=MAX_ITER, ell=ell)
    exc.best = v
    raise exc


def _make_solution(v: dd.DD, ell: float, t: OrderType, iterations: int, precision: str) -> FixedPointSolution:
    E = SeriesMap((0.0, 1.0), v.hi[:-1], v.lo[:-1] if precision == "dd" else None)
    alpha = v[-1:]
    tau = float((abs(alpha) ** ell).to_float()[0])
    m = UnimodalMap(E, ell)
    sol = FixedPointSolution(
        E=E, ell=float(ell), alpha=float(alpha.hi[0]), alpha_lo=float(alpha.lo[0]) if precision == "dd" else 0.0,
        tau=tau, x0=m.x0, residual=0.0, order_type=t, iterations=iterations, precision=precision)
    return replace(sol, residual=residual_sup(sol, 64))


def _accept(sol: FixedPointSolution, tol: float) -> FixedPointSolution:
    # the collocation residual can be tiny while the series is under-resolved;
    # the functional-equation defect between the nodes exposes that
    if not sol.residual <= tol:
        raise NoConvergenceError(
            f"functional-equation residual {sol.residual:.3e} exceeds tol at ell={sol.ell}"
            " (series degree too low?)", residual=sol.residual, ell=sol.ell)
    return sol


def _resample(coeffs: np.ndarray, degree: int) -> np.ndarray:
    out = np.zeros(degree + 1)
    n = min(degree + 1, coeffs.size)
    out[:n] = coeffs[:n]
    return out


def _orbit_ok(sol: FixedPointSolution, t: OrderType) -> bool:
    try:
        return critical_orbit_type(sol.map, t.p) == t
    except RenormError:
        return False


def _seed(t: OrderType, degree: int, tol: float, precision: str) -> FixedPointSolution:
    """Solve at ell = 2 starting from quadratic maps x -> 1 - lam x^2."""
    if not validate_admissible(t):
        raise CombinatoricsError(f"order type {t} is not admissible")
    lam_sup = superstable_parameter(t)
    nodes = lobatto_nodes((0.0, 1.0), degree)
    last_error: Exception | None = None
    wrong = False
    for frac in SEED_FRACTIONS:
        lam = lam_sup + (2.0 - lam_sup) * frac
        c0 = _resample(np.array([1.0 - 0.5 * lam, -0.5 * lam]), degree)
        y = 0.0
        for _ in range(t.p - 1):
            y = (1.0 - lam * y) ** 2
        alpha0 = 1.0 / (1.0 - lam * y)
        for a in (alpha0, -alpha0):
            v = dd.DD(np.append(c0, a))
            try:
                v, nr, its = _newton(v, 2.0, t.p, nodes, tol, precision)
                sol = _accept(_make_solution(v, 2.0, t, its, precision), tol)
            except RenormError as exc:
                last_error = exc
                continue
            if abs(sol.alpha) > 1.0 and _orbit_ok(sol, t):
                return sol
            wrong = True
    if wrong:
        raise WrongBranchError(f"seeds converged only to fixed points of other type than {t}")
    raise NoConvergenceError(
        f"no seed converged for {t} at ell=2: {last_error}",
        residual=getattr(last_error, "residual", float("nan")), ell=2.0)


def _unknowns(sol: FixedPointSolution, degree: int) -> dd.DD:
    lo = sol.E.coeffs_lo if sol.E.coeffs_lo is not None else np.zeros_like(sol.E.coeffs)
    return dd.DD(np.append(_resample(sol.E.coeffs, degree), sol.alpha),
                 np.append(_resample(lo, degree), sol.alpha_lo))


def _predict(hist: list[FixedPointSolution], ell: float, degree: int) -> dd.DD:
    """Linear extrapolation in log(ell) of the coefficients and of log(tau)."""
    s1 = hist[-1]
    v1 = _unknowns(s1, degree).hi
    if len(hist) < 2:
        c = v1[:-1]
        log_tau = math.log(s1.tau)
    else:
        s0 = hist[-2]
        v0 = _unknowns(s0, degree).hi
        w = (math.log(ell) - math.log(s1.ell)) / (math.log(s1.ell) - math.log(s0.ell))
        c = v1[:-1] + w * (v1[:-1] - v0[:-1])
        log_tau = math.log(s1.tau) + w * (math.log(s1.tau) - math.log(s0.tau))
    alpha = math.copysign(math.exp(log_tau / ell), s1.alpha)
    return dd.DD(np.append(c, alpha))


def _continue(hist: list[FixedPointSolution], target: float, degree: int, tol: float,
              precision: str | None, t: OrderType) -> list[FixedPointSolution]:
    """Extend ``hist`` by ell-continuation until ``target`` is reached."""
    nodes = lobatto_nodes((0.0, 1.0), degree)
    factor = 2.0 if target >= hist[-1].ell else 0.5
    while hist[-1].ell != target:
        cur = hist[-1].ell
        nxt = min(target, cur * factor) if factor > 1 else max(target, cur * factor)
        mode = resolve_precision(precision, nxt)
        try:
            v, nr, its = _newton(_predict(hist, nxt, degree), nxt, t.p, nodes, tol, mode)
            sol = _accept(_make_solution(v, nxt, t, its, mode), tol)
            if not _orbit_ok(sol, t):
                raise WrongBranchError(f"continuation to ell={nxt} changed the combinatorics")
            hist.append(sol)
        except RenormError as exc:
            factor = math.sqrt(factor)
            if abs(math.log(factor)) < math.log(1.01):
                if isinstance(exc, NoConvergenceError):
                    exc.ell = nxt
                raise
    return hist


def _check_inputs(ell: float, t: OrderType, degree: int, tol: float) -> None:
    if not ell > 1.0:
        raise ValidationError(f"criticality must exceed 1, got {ell}")
    if not 16 <= degree <= 128:
        raise ValidationError(f"degree must lie in [16, 128], got {degree}")
    if not 1e-14 <= tol <= 1e-6:
        raise ValidationError(f"tolerance must lie in [1e-14, 1e-6], got {tol}")
    if not isinstance(t, OrderType):
        raise ValidationError("order type expected")


def solve_fixed_point(ell: float, t: OrderType, degree: int = 64, tol: float = 1e-11,
                      init: FixedPointSolution | None = None,
                      precision: str | None = None) -> FixedPointSolution:
    """Fixed point of the renormalization operator with combinatorics ``t``.

    Without ``init`` the solution is seeded at ``ell = 2`` from the quadratic
    family and continued in ``ell``; otherwise continuation starts at
    ``init``.
    """
    ell = float(ell)
    _check_inputs(ell, t, degree, tol)
    if init is None:
        hist = [_seed(t, degree, tol, resolve_precision(precision, 2.0))]
    else:
        if init.order_type != t:
            raise CombinatoricsError(f"initial solution has type {init.order_type}, not {t}")
        hist = [init]
    if hist[-1].ell == ell and (init is None or init.E.degree == degree):
        return hist[-1]
    if hist[-1].ell == ell:
        hist.append(_refit(hist[-1], degree, tol, precision))
        return hist[-1]
    return _continue(hist, ell, degree, tol, precision, t)[-1]


def _refit(sol: FixedPointSolution, degree: int, tol: float, precision: str | None) -> FixedPointSolution:
    nodes = lobatto_nodes((0.0, 1.0), degree)
    mode = resolve_precision(precision, sol.ell)
    v, nr, its = _newton(_unknowns(sol, degree), sol.ell, sol.p, nodes, tol, mode)
    return _accept(_make_solution(v, sol.ell, sol.order_type, its, mode), tol)


# ---------------------------------------------------------------------------
# evaluation helpers

def H_iterate(sol: FixedPointSolution, x, n: int):
    y = np.asarray(x, dtype=float)
    for _ in range(n):
        y = sol.H(np.clip(y, 0.0, 1.0))
    return y


def G_map(sol: FixedPointSolution, x):
    return H_iterate(sol, np.asarray(x, dtype=float) / sol.tau, sol.p - 1)


def residual_sup(sol: FixedPointSolution, grid_size: int = 64) -> float:
    """sup of ``|tau H^p(x) - H(tau x)|`` over a uniform grid of [0, 1/tau].

    Evaluated in double-double arithmetic so the figure reflects the stored
    coefficients rather than rounding in the check itself.
    """
    if grid_size < 2:
        raise ValidationError("grid_size must be at least 2")
    x = dd.DD(np.linspace(0.0, 1.0, grid_size)) / sol.tau
    alpha = dd.DD(sol.alpha, sol.alpha_lo)
    tau = abs(alpha) ** sol.ell
    with np.errstate(all="ignore"):
        y = x
        for _ in range(sol.p):
            y = abs(_clenshaw(sol.E, y)) ** sol.ell
        lhs = tau * y
        rhs = abs(_clenshaw(sol.E, x * tau)) ** sol.ell
    r = (lhs - rhs).to_float()
    return float(np.max(np.abs(r)))


def renormalize(m: UnimodalMap, t: OrderType, degree: int | None = None) -> tuple[UnimodalMap, float]:
    """Rescaled ``p``-th return map in the E-coordinate.

    ``E'(u) = alpha * E(H^(p-1)(u / tau))`` with ``alpha = 1 / E(H^(p-1)(0))``.
    """
    if m.E.domain != (0.0, 1.0):
        raise ValidationError("renormalize expects E on [0, 1]")
    if critical_orbit_type(m, t.p) != t:
        raise CombinatoricsError(f"critical orbit does not realize {t}")
    y = 0.0
    for _ in range(t.p - 1):
        y = float(m.H(y))
    e = float(eval_series(m.E, y))
    if e == 0.0:
        raise CombinatoricsError("critical point is periodic: the return map degenerates")
    alpha = 1.0 / e
    tau = abs(alpha) ** m.ell
    if tau <= 1.0:
        raise CombinatoricsError("scaling factor does not exceed 1")
    degree = m.E.degree if degree is None else degree
    nodes = lobatto_nodes((0.0, 1.0), degree)
    y = nodes / tau
    for _ in range(t.p - 1):
        if np.any(y < -1e-12) or np.any(y > 1.0 + 1e-12):
            raise EscapeError("return orbit leaves [0, 1]")
        y = m.H(np.clip(y, 0.0, 1.0))
    if np.any(y < -1e-12) or np.any(y > 1.0 + 1e-12):
        raise EscapeError("return orbit leaves [0, 1]")
    steps = np.diff(y)
    if not (np.all(steps >= 0) or np.all(steps <= 0)):
        raise CombinatoricsError(f"map is not renormalizable with type {t}: the return branch folds")
    vals = alpha * eval_series(m.E, np.clip(y, 0.0, 1.0))
    E_new = SeriesMap((0.0, 1.0), values_to_coeffs(vals))
    return UnimodalMap(E_new, m.ell), alpha


def quadratic_map(lam: float, degree: int = 16) -> UnimodalMap:
    """The family member x -> 1 - lam x^2 written as E(u) = 1 - lam u, ell = 2."""
    return UnimodalMap(fit_function(lambda u: 1.0 - lam * u, degree), 2.0)


def extend_E(sol: FixedPointSolution, x):
    """E continued beyond [0, 1] through ``E(x) = alpha E(G(x))``.

    Valid on [0, tau] since G maps [0, tau] into [0, 1].
    """
    x = np.asarray(x, dtype=float)
    inside = (x >= 0.0) & (x <= 1.0)
    out = np.empty_like(x)
    out[inside] = eval_series(sol.E, x[inside])
    if np.any(~inside):
        xo = x[~inside]
        if np.any(xo < 0.0) or np.any(xo > sol.tau * (1 + 1e-12)):
            raise EscapeError("extension of E is only available on [0, tau]")
        out[~inside] = sol.alpha * eval_series(sol.E, np.clip(G_map(sol, xo), 0.0, 1.0))
    return out


def H_extended(sol: FixedPointSolution, x):
    return np.abs(extend_E(sol, x)) ** sol.ell


def fixed_point_b0(sol: FixedPointSolution) -> float:
    """Repelling fixed point ``b0 > 1`` of the extended map H."""
    xs = np.linspace(1.0, sol.tau, 4001)
    f = H_extended(sol, xs) - xs
    idx = np.nonzero((f[:-1] < 0) & (f[1:] >= 0))[0]
    if idx.size == 0:
        raise EscapeError("no fixed point of H found in (1, tau]")
    i = idx[0]
    return float(brentq(lambda x: float(H_extended(sol, np.array([x]))[0] - x),
                        xs[i], xs[i + 1], xtol=1e-15, rtol=1e-15))


# ---------------------------------------------------------------------------
# sweeps

@dataclass
class SweepTable:
    rows: list[tuple[float, float, float, float, int]]
    order_type: OrderType
    extrapolated_tau_inf: float
    extrapolation_residual: float
    solutions: list[FixedPointSolution] = field(default_factory=list, repr=False)

    @property
    def ells(self) -> np.ndarray:
        return np.array([r[0] for r in self.rows])

    @property
    def taus(self) -> np.ndarray:
        return np.array([r[1] for r in self.rows])

    def to_csv(self, footer: bool = True) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["ell", "tau", "alpha", "residual", "iters"])
        for ell, tau, alpha, res, its in self.rows:
            w.writerow([repr(ell), repr(tau), repr(alpha), repr(res), its])
        if footer:
            buf.write(f"tau_inf={self.extrapolated_tau_inf!r}\n")
        return buf.getvalue()


def extrapolate_inverse_ell(ells: Sequence[float], values: Sequence[float],
                            window: int = 4) -> tuple[float, float]:
    """Limit of ``q(ell) ~ q_inf + A/ell + B/ell^2`` from the largest ``window`` ells.

    Returns ``(q_inf, max_misfit)``; fewer points reduce the model order.
    """
    ells = np.asarray(ells, dtype=float)
    vals = np.asarray(values, dtype=float)
    if ells.size == 0:
        raise ValidationError("nothing to extrapolate")
    order = np.argsort(ells)[-window:]
    x = 1.0 / ells[order]
    y = vals[order]
    k = min(3, x.size)
    A = np.vander(x, k, increasing=True)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    return float(coef[0]), float(np.max(np.abs(A @ coef - y)))


def sweep(t: OrderType, ells: Sequence[float], degree: int = 64, tol: float = 1e-11,
          precision: str | None = None) -> SweepTable:
    ells = [float(e) for e in ells]
    if not ells:
        raise ValidationError("empty ell list")
    if any(b <= a for a, b in zip(ells, ells[1:])):
        raise ValidationError("ell values must be strictly increasing")
    for e in ells:
        _check_inputs(e, t, degree, tol)
    sols: list[FixedPointSolution] = []
    hist: list[FixedPointSolution] = []
    for e in ells:
        try:
            if not hist:
                hist = [_seed(t, degree, tol, resolve_precision(precision, 2.0))]
                if e < 2.0:
                    hist = _continue(hist, e, degree, tol, precision, t)
            if hist[-1].ell != e:
                hist = _continue(hist, e, degree, tol, precision, t)
        except RenormError as exc:
            exc.ell = e
            exc.partial = _table(sols, t)
            exc.args = (f"{exc.args[0] if exc.args else exc} (at ell={e})",)
            raise
        sols.append(hist[-1])
    return _table(sols, t)


def _table(sols: list[FixedPointSolution], t: OrderType) -> SweepTable:
    rows = [(s.ell, s.tau, s.alpha, s.residual, s.iterations) for s in sols]
    if sols:
        tau_inf, misfit = extrapolate_inverse_ell([s.ell for s in sols], [s.tau for s in sols])
    else:
        tau_inf, misfit = float("nan"), float("nan")
    return SweepTable(rows, t, tau_inf, misfit, list(sols))
