"""Chebyshev series on an interval and unimodal maps H(x) = |E(x)|**ell.

The diffeomorphic factor ``E`` is stored as a Chebyshev series on a real
interval.  Coefficients are float64 with an optional low-order correction
array, so a series produced by the double-double solver keeps its extra
digits through serialization.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import chebyshev as C

from . import dd
from .errors import (
    ArityError,
    BranchError,
    DegenerateDerivativeError,
    DomainError,
    MonotonicityError,
    RangeError,
    ValidationError,
)

DOMAIN_TOL = 1e-12
TRUST_RHO = 1.5


@dataclass(frozen=True, eq=False)
class SeriesMap:
    """Chebyshev series ``sum c_k T_k(t)`` with ``t`` the affine image of x in [-1, 1]."""

    domain: tuple[float, float]
    coeffs: np.ndarray
    coeffs_lo: np.ndarray | None = None

    def __post_init__(self):
        lo, hi = (float(v) for v in self.domain)
        if not hi > lo:
            raise ValidationError(f"empty domain [{lo}, {hi}]")
        c = np.array(self.coeffs, dtype=float).ravel()
        if c.size == 0 or not np.all(np.isfinite(c)):
            raise ValidationError("coefficients must be a non-empty finite array")
        object.__setattr__(self, "domain", (lo, hi))
        object.__setattr__(self, "coeffs", c)
        if self.coeffs_lo is not None:
            cl = np.array(self.coeffs_lo, dtype=float).ravel()
            if cl.shape != c.shape:
                raise ValidationError("coeffs_lo must match coeffs in length")
            object.__setattr__(self, "coeffs_lo", None if not np.any(cl) else cl)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def to_unit(self, x):
        lo, hi = self.domain
        return (2.0 * x - (lo + hi)) / (hi - lo)

    def __call__(self, x):
        return eval_series(self, x)

    def derivative(self, order: int = 1) -> "SeriesMap":
        lo, hi = self.domain
        c = C.chebder(self.coeffs, m=order, scl=2.0 / (hi - lo))
        return SeriesMap(self.domain, c if c.size else np.zeros(1))

    def dd_coeffs(self) -> dd.DD:
        lo = np.zeros_like(self.coeffs) if self.coeffs_lo is None else self.coeffs_lo
        return dd.DD(self.coeffs, lo)

    def to_dict(self) -> dict:
        lo = np.zeros_like(self.coeffs) if self.coeffs_lo is None else self.coeffs_lo
        return {
            "domain": [repr(self.domain[0]), repr(self.domain[1])],
            "coeffs": [dd.to_decimal_string(h, l) for h, l in zip(self.coeffs, lo)],
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "SeriesMap":
        try:
            lo, hi = (float(v) for v in obj["domain"])
            pairs = [dd.from_decimal_string(str(s)) for s in obj["coeffs"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed series object: {exc}") from exc
        his = np.array([p[0] for p in pairs])
        los = np.array([p[1] for p in pairs])
        return cls((lo, hi), his, los if np.any(los) else None)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "SeriesMap":
        return cls.from_dict(json.loads(text))


def lobatto_nodes(domain: Sequence[float], degree: int) -> np.ndarray:
    """Chebyshev extreme points of the interval, in increasing order."""
    lo, hi = domain
    k = np.arange(degree + 1)
    t = -np.cos(np.pi * k / degree) if degree > 0 else np.zeros(1)
    return 0.5 * (lo + hi) + 0.5 * (hi - lo) * t


def bernstein_rho(t):
    """Parameter of the Bernstein ellipse through ``t`` (foci at -1 and 1)."""
    t = np.asarray(t, dtype=complex)
    s = np.sqrt(t - 1.0) * np.sqrt(t + 1.0)
    return np.maximum(np.abs(t + s), np.abs(t - s))


def eval_series(s: SeriesMap, x, trust: float = TRUST_RHO):
    """Evaluate the series at real or complex ``x`` (scalar or array).

    Real arguments must lie in the domain up to ``DOMAIN_TOL``; complex ones
    inside the Bernstein ellipse of parameter ``trust``.
    """
    scalar = np.ndim(x) == 0
    xa = np.asarray(x)
    t = s.to_unit(xa.astype(complex) if np.iscomplexobj(xa) else xa.astype(float))
    if np.iscomplexobj(t):
        bad = bernstein_rho(t) > trust
        if np.any(bad):
            raise DomainError(f"complex argument outside trust ellipse rho={trust}")
    else:
        lo, hi = s.domain
        tol = DOMAIN_TOL * max(1.0, hi - lo)
        if np.any(xa < lo - tol) or np.any(xa > hi + tol) or np.any(np.isnan(xa)):
            raise DomainError(f"argument outside domain [{lo}, {hi}]")
        t = np.clip(t, -1.0, 1.0)
    out = C.chebval(t, s.coeffs)
    return out.item() if scalar else out


def eval_series_dd(s: SeriesMap, x: dd.DD) -> dd.DD:
    """Clenshaw recurrence in double-double arithmetic (real arguments only)."""
    lo, hi = s.domain
    if np.any(x.hi < lo - DOMAIN_TOL) or np.any(x.hi > hi + DOMAIN_TOL):
        raise DomainError(f"argument outside domain [{lo}, {hi}]")
    t = (x * 2.0 - (lo + hi)) / (hi - lo)
    c = s.dd_coeffs()
    b1 = dd.DD(np.zeros_like(t.hi))
    b2 = dd.DD(np.zeros_like(t.hi))
    t2 = t * 2.0
    for k in range(s.degree, 0, -1):
        b1, b2 = t2 * b1 - b2 + c[k], b1
    return t * b1 - b2 + c[0]


def fit_series(samples, degree: int, domain: Sequence[float] | None = None) -> SeriesMap:
    """Interpolate samples taken at the ``degree + 1`` Chebyshev extreme points.

    ``samples`` is a sequence of ``(x, y)`` pairs or a pair of arrays.
    """
    arr = np.asarray(samples, dtype=float)
    if arr.ndim == 2 and arr.shape[0] == 2 and arr.shape[1] != 2:
        xs, ys = arr
    elif arr.ndim == 2 and arr.shape[1] == 2:
        xs, ys = arr[:, 0], arr[:, 1]
    else:
        raise ArityError("samples must be (x, y) pairs")
    if degree < 0 or xs.size != degree + 1:
        raise ArityError(f"expected {degree + 1} samples, got {xs.size}")
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
        raise ValueError("non-finite sample")
    order = np.argsort(xs)
    xs, ys = xs[order], ys[order]
    if domain is None:
        domain = (xs[0], xs[-1]) if degree > 0 else (xs[0] - 1.0, xs[0] + 1.0)
    nodes = lobatto_nodes(domain, degree)
    if degree > 0 and np.max(np.abs(nodes - xs)) > 1e-12 * max(1.0, domain[1] - domain[0]):
        raise ArityError("sample abscissae are not the Chebyshev extreme points")
    return SeriesMap(tuple(domain), values_to_coeffs(ys))


def values_to_coeffs(values: np.ndarray) -> np.ndarray:
    """Chebyshev coefficients from values at increasing Lobatto points (DCT-I)."""
    v = np.asarray(values, dtype=float)[::-1]  # cos ordering: t_k = cos(pi k/N)
    n = v.size - 1
    if n == 0:
        return v.copy()
    ext = np.concatenate([v, v[-2:0:-1]])
    c = np.fft.rfft(ext).real / n
    c = c[: n + 1]
    c[0] /= 2.0
    c[n] /= 2.0
    return c


def fit_function(f: Callable, degree: int, domain: Sequence[float] = (0.0, 1.0)) -> SeriesMap:
    xs = lobatto_nodes(domain, degree)
    return SeriesMap(tuple(domain), values_to_coeffs(np.asarray(f(xs), dtype=float)))


def derivative_at(s: SeriesMap, x, order: int = 1):
    return eval_series(s.derivative(order), x)


def schwarzian(s: SeriesMap, x: float) -> float:
    d1 = derivative_at(s, x, 1)
    if np.any(np.abs(d1) < 1e-14):
        raise DegenerateDerivativeError(f"s'(x) vanishes at x={x}")
    d2 = derivative_at(s, x, 2)
    d3 = derivative_at(s, x, 3)
    return d3 / d1 - 1.5 * (d2 / d1) ** 2


def invert_monotone(s: SeriesMap, y: float, samples: int = 257) -> float:
    """Solve ``s(x) = y`` for a strictly monotone series."""
    lo, hi = s.domain
    grid = np.linspace(lo, hi, samples)
    vals = eval_series(s, grid)
    diffs = np.diff(vals)
    if not (np.all(diffs > 0) or np.all(diffs < 0)):
        raise MonotonicityError("series is not strictly monotone on its domain")
    increasing = diffs[0] > 0
    vmin, vmax = (vals[0], vals[-1]) if increasing else (vals[-1], vals[0])
    scale = max(1.0, np.max(np.abs(vals)))
    tol = 1e-13 * scale
    if y < vmin - tol or y > vmax + tol:
        raise RangeError(f"value {y} outside range [{vmin}, {vmax}]")
    # bracket on the sample grid, then bisect down to a short interval
    idx = np.searchsorted(vals if increasing else -vals, y if increasing else -y)
    idx = int(np.clip(idx, 1, samples - 1))
    a, b = grid[idx - 1], grid[idx]
    fa = eval_series(s, a) - y
    for _ in range(30):
        m = 0.5 * (a + b)
        fm = eval_series(s, m) - y
        if fm == 0.0:
            return float(m)
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    x = 0.5 * (a + b)
    ds = s.derivative()
    for _ in range(8):
        r = eval_series(s, x) - y
        if abs(r) <= 0.1 * tol:
            break
        x_new = x - r / eval_series(ds, x)
        x = float(np.clip(x_new, lo, hi))
    return float(x)


@dataclass(frozen=True, eq=False)
class UnimodalMap:
    """``H(x) = |E(x)|**ell`` with ``E`` decreasing and ``E(0) = 1``."""

    E: SeriesMap
    ell: float
    x0: float = field(default=float("nan"))

    def __post_init__(self):
        if not float(self.ell) > 1.0:
            raise ValidationError(f"criticality must exceed 1, got {self.ell}")
        object.__setattr__(self, "ell", float(self.ell))
        if np.isnan(self.x0):
            object.__setattr__(self, "x0", invert_monotone(self.E, 0.0))

    def H(self, x):
        return eval_H(self, x)


def eval_H(m: UnimodalMap, z, trust: float = TRUST_RHO):
    """``|E(z)|**ell`` for real z; principal ``(E(z)**2)**(ell/2)`` for complex z."""
    if not np.iscomplexobj(z):
        return np.abs(eval_series(m.E, z)) ** m.ell
    e = np.asarray(eval_series(m.E, z, trust=trust))
    sq = e * e
    on_cut = (sq.real <= 0) & (np.abs(sq.imag) <= 1e-15 * np.maximum(np.abs(sq), 1e-300))
    on_cut &= np.abs(sq) > 0
    if np.any(on_cut):
        raise BranchError("E(z) is purely imaginary: E(z)^2 lies on the slit")
    out = np.power(sq, m.ell / 2.0)
    return out.item() if np.ndim(z) == 0 else out


def eval_H_dd(m: UnimodalMap, x: dd.DD) -> dd.DD:
    return abs(eval_series_dd(m.E, x)) ** m.ell


def validate_unimodal(m: UnimodalMap, grid_size: int = 1024) -> list[str]:
    """Return a list of violated invariants (empty when the map is valid)."""
    problems = []
    lo, hi = m.E.domain
    if lo <= 0.0 <= hi and abs(eval_series(m.E, 0.0) - 1.0) > 1e-12:
        problems.append("E(0) != 1")
    nodes = lobatto_nodes(m.E.domain, max(m.E.degree, 2))
    if np.any(derivative_at(m.E, nodes) >= 0):
        problems.append("E not strictly decreasing at the nodes")
    if not lo < m.x0 < hi:
        problems.append("x0 not interior")
    xs = np.linspace(lo, hi, grid_size)
    slope = np.sign(np.diff(eval_H(m, xs)))
    slope = slope[slope != 0]
    if np.count_nonzero(np.diff(slope)) != 1 or slope[0] > 0:
        problems.append("H is not decreasing-then-increasing")
    return problems
