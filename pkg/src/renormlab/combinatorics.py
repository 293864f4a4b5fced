"""Order types of periodic critical orbits.

An order type records the relative order of the points of a periodic orbit
listed along the orbit.  Two rank vectors related by the reflection
``r -> p + 1 - r`` describe the same combinatorics, so each class is stored
through a canonical representative.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import (
    DegeneracyError,
    EscapeError,
    UnsupportedPeriodError,
    ValidationError,
)

MAX_PERIOD = 12


def _canonical(perm: tuple[int, ...]) -> tuple[int, ...]:
    p = len(perm)
    flipped = tuple(p + 1 - r for r in perm)
    for a, b in zip(perm[1:], flipped[1:]):
        if a != b:
            return perm if a > b else flipped
    return perm


@dataclass(frozen=True)
class OrderType:
    """Canonical rank vector; ``perm[i]`` is the rank of the i-th orbit point."""

    perm: tuple[int, ...]

    def __post_init__(self):
        perm = tuple(int(r) for r in self.perm)
        p = len(perm)
        if p < 2:
            raise ValidationError("an order type needs period at least 2")
        if sorted(perm) != list(range(1, p + 1)):
            raise ValidationError(f"{list(perm)} is not a permutation of 1..{p}")
        object.__setattr__(self, "perm", _canonical(perm))

    @property
    def p(self) -> int:
        return len(self.perm)

    def to_json(self) -> str:
        return json.dumps(list(self.perm))

    @classmethod
    def parse(cls, text: str) -> "OrderType":
        """Accept ``pd`` or a JSON-style integer list such as ``[2,3,1]``."""
        text = text.strip()
        if text.lower() == "pd":
            return cls((1, 2))
        try:
            values = json.loads(text)
        except json.JSONDecodeError:
            values = [v for v in text.replace("[", "").replace("]", "").split(",") if v.strip()]
        try:
            return cls(tuple(int(v) for v in values))
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"cannot parse order type {text!r}") from exc

    def __str__(self):
        return "[" + ",".join(str(r) for r in self.perm) + "]"


PERIOD_DOUBLING = OrderType((1, 2))


def order_type_of(points: Sequence[float]) -> OrderType:
    pts = np.asarray(points, dtype=float)
    if pts.size < 2:
        raise ValidationError("need at least two points")
    srt = np.sort(pts)
    scale = max(1.0, float(np.max(np.abs(pts))))
    if np.any(np.diff(srt) <= 1e-12 * scale):
        raise DegeneracyError("orbit points coincide within 1e-12")
    ranks = np.empty(pts.size, dtype=int)
    ranks[np.argsort(pts, kind="stable")] = np.arange(1, pts.size + 1)
    return OrderType(tuple(ranks.tolist()))


def _quadratic_iterate(lam, p):
    x = np.zeros_like(lam)
    for _ in range(p):
        x = 1.0 - lam * x * x
    return x


@lru_cache(maxsize=None)
def superstable_parameters(p: int) -> tuple[tuple[float, OrderType], ...]:
    """All parameters in (0, 2] where 0 has exact period ``p`` under x -> 1 - lam x^2.

    Roots of lam -> f_lam^p(0) are bracketed on a grid that is refined
    towards lam = 2, where superstable parameters accumulate, and polished by
    Brent's method.
    """
    if p < 2:
        raise ValidationError("period must be at least 2")
    if p > MAX_PERIOD:
        raise UnsupportedPeriodError(f"period {p} exceeds the supported maximum {MAX_PERIOD}")
    s = np.linspace(0.0, p * np.log(4.0) + 6.0, 2000 * 2**p)
    lam = 2.0 - 2.0 * np.exp(-s)
    # offset keeps lam = 1 (a root for every even p) off the grid
    low = np.linspace(1e-9, 1.0, 2001)[:-1] + 1.23e-4
    lam = np.concatenate([low[low < 1.0], lam[lam > 1.0]])
    vals = _quadratic_iterate(lam, p)
    idx = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    found = []
    for i in idx:
        root = brentq(lambda t: _quadratic_iterate(np.array([t]), p)[0],
                      lam[i], lam[i + 1], xtol=1e-15, rtol=1e-15)
        orbit = [0.0]
        for _ in range(p - 1):
            orbit.append(1.0 - root * orbit[-1] ** 2)
        if min(abs(v) for v in orbit[1:]) < 1e-7:
            continue  # lower exact period
        found.append((float(root), order_type_of(orbit)))
    return tuple(found)


def validate_admissible(t: OrderType) -> bool:
    """True when some superstable quadratic map realizes ``t``."""
    return any(ot == t for _, ot in superstable_parameters(t.p))


def superstable_parameter(t: OrderType) -> float:
    """Smallest quadratic-family parameter whose superstable cycle has type ``t``."""
    for lam, ot in superstable_parameters(t.p):
        if ot == t:
            return lam
    raise ValidationError(f"order type {t} is not admissible")


def critical_orbit_type(m, p: int) -> OrderType:
    """Order type of ``x0, H(x0), ..., H^(p-1)(x0)`` for a unimodal map ``m``."""
    if p < 2:
        raise ValidationError("period must be at least 2")
    lo, hi = m.E.domain
    tol = 1e-12 * max(1.0, hi - lo)
    orbit = [m.x0]
    for _ in range(p - 1):
        x = orbit[-1]
        if not lo - tol <= x <= hi + tol:
            raise EscapeError(f"critical orbit left [{lo}, {hi}] at {x}")
        orbit.append(float(m.H(min(max(x, lo), hi))))
    if not lo - tol <= orbit[-1] <= hi + tol:
        raise EscapeError(f"critical orbit left [{lo}, {hi}] at {orbit[-1]}")
    return order_type_of(orbit)
