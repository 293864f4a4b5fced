"""Dynamics of the flat-exponential family ``f(z) = exp(-c (z - a)^-2)``.

``f`` has an essential singularity at ``a`` and extends analytically to
infinity with ``f(inf) = 1``; its singular values are 0 and 1.  Orbits are
classified with a conservative rule: entering a disk around the attracting
fixed point on which ``|f'| <= 0.9`` proves membership in the basin,
landing on ``a`` or a computed preimage of ``a`` proves membership in the
Julia set, and anything else stays undecided.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import DegenerateBranchError, NumericError, SingularityError, StructureError, ValidationError

JULIA = -1
UNKNOWN = -2
OVERFLOW_EXP = 700.0
HIT_TOL = 1e-14

# default parameters: basin of z0 attracts both singular orbits quickly
DEFAULT_A = 0.2
DEFAULT_C = 0.03


@dataclass(frozen=True)
class FlatExpMap:
    a: float = DEFAULT_A
    c: float = DEFAULT_C

    def __post_init__(self):
        if not (self.a > 0 and self.c > 0 and math.isfinite(self.a) and math.isfinite(self.c)):
            raise ValidationError(f"need a > 0 and c > 0, got a={self.a}, c={self.c}")


def flat_exp_eval(m: FlatExpMap, z, real_extension: bool = False):
    """``exp(-c / (z - a)^2)``; ``inf`` maps to 1 and huge values overflow to ``inf``.

    At ``z = a`` the value is 0 when ``real_extension`` is set (the
    continuous extension along the real line), otherwise an error.
    """
    scalar = np.ndim(z) == 0
    za = np.asarray(z, dtype=complex)
    d = za - m.a
    at_a = d == 0
    if np.any(at_a) and not real_extension:
        raise SingularityError("f is singular at z = a")
    with np.errstate(all="ignore"):
        q = -m.c / np.where(at_a, 1.0, d * d)
        out = np.where(q.real > OVERFLOW_EXP, complex(np.inf, 0.0), np.exp(q))
    out = np.where(np.isinf(za), 1.0 + 0j, out)
    out = np.where(at_a, 0.0 + 0j, out)
    if scalar:
        v = out.item()
        return v.real if np.isreal(z) and v.imag == 0 else v
    return out


def flat_exp_derivative(m: FlatExpMap, z):
    d = np.asarray(z, dtype=complex) - m.a
    with np.errstate(all="ignore"):
        return flat_exp_eval(m, z) * (2.0 * m.c / d**3)


@dataclass(frozen=True)
class FixedPoints:
    b_f: float
    z0: float
    mult_b: float
    mult_z0: float


def find_fixed_points(m: FlatExpMap, grid: int = 20001) -> FixedPoints:
    """Repelling ``b_f`` and attracting ``z0`` with ``a < b_f < z0 < 1``."""
    if m.a >= 1.0:
        raise StructureError("a must lie below 1 for fixed points in (a, 1]")
    F = lambda x: float(np.real(flat_exp_eval(m, x))) - x
    xs = np.linspace(m.a, 1.0, grid)[1:]
    vals = np.exp(-m.c / (xs - m.a) ** 2) - xs
    up = np.nonzero((vals[:-1] < 0) & (vals[1:] >= 0))[0]
    if up.size == 0:
        raise StructureError(f"f(x) - x has no sign change on ({m.a}, 1]: no repelling fixed point")
    i = up[0]
    b = brentq(F, xs[i], xs[i + 1], xtol=1e-15, rtol=1e-15)
    down = np.nonzero((vals[i + 1:-1] > 0) & (vals[i + 2:] <= 0))[0]
    if down.size == 0:
        raise StructureError("no attracting fixed point between b_f and 1")
    j = i + 1 + down[0]
    z0 = brentq(F, xs[j], xs[j + 1], xtol=1e-15, rtol=1e-15)
    mb = abs(flat_exp_derivative(m, b))
    mz = abs(flat_exp_derivative(m, z0))
    if not (mb > 1.0 > mz and m.a < b < z0 < 1.0):
        raise StructureError(f"fixed points b_f={b}, z0={z0} with multipliers {mb}, {mz} "
                             "do not have the expected repelling/attracting structure")
    return FixedPoints(float(b), float(z0), float(mb), float(mz))


def contraction_radius(m: FlatExpMap, z0: float, samples: int = 64, bound: float = 0.9) -> float:
    """Largest ``r <= 0.2 |1 - z0|`` (on a geometric ladder) with ``|f'| <= bound`` on |z - z0| = r."""
    theta = 2 * np.pi * np.arange(samples) / samples
    r = 0.2 * abs(1.0 - z0)
    for _ in range(200):
        ring = z0 + r * np.exp(1j * theta)
        if np.max(np.abs(flat_exp_derivative(m, ring))) <= bound:
            return r
        r *= 0.9
    raise StructureError("no contraction disk found around z0")


def preimages_of_point(m: FlatExpMap, v: complex, branch_indices: Sequence[int] = (0,)) -> list[complex]:
    """All ``w = a +- sqrt(-c / (Log v + 2 pi i k))`` for the given ``k``."""
    if v == 0:
        raise ValidationError("0 is an omitted value of f")
    out = []
    logv = np.log(complex(v))
    for k in branch_indices:
        L = logv + 2j * np.pi * k
        if L == 0:
            raise DegenerateBranchError(f"Log v + 2 pi i k vanishes for v={v}, k={k}")
        s = np.sqrt(-m.c / L)
        out.extend([m.a + s, m.a - s])
    return out


def preimage_tree(m: FlatExpMap, depth: int, K: int = 2) -> list[np.ndarray]:
    """Iterated preimages of ``a``: level ``d`` holds solutions of ``f^d(w) = a``."""
    ks = np.arange(-K, K + 1)
    levels = [np.array([complex(m.a)])]
    for _ in range(depth):
        prev = levels[-1]
        L = np.log(prev)[:, None] + 2j * np.pi * ks[None, :]
        s = np.sqrt(-m.c / L).ravel()
        levels.append(np.concatenate([m.a + s, m.a - s]))
    return levels


@dataclass
class Classifier:
    """Precomputed data for :func:`classify_point`."""

    m: FlatExpMap
    fixed: FixedPoints
    radius: float
    julia_points: np.ndarray

    @classmethod
    def build(cls, m: FlatExpMap, preimage_depth: int = 1, K: int = 2) -> "Classifier":
        fp = find_fixed_points(m)
        r = contraction_radius(m, fp.z0)
        pts = np.concatenate(preimage_tree(m, preimage_depth, K))
        return cls(m, fp, r, pts)


def _iterate_classify(cl: Classifier, z: np.ndarray, budget: int, strict: bool = False) -> np.ndarray:
    m = cl.m
    z = np.array(z, dtype=complex).ravel()
    tags = np.full(z.size, UNKNOWN, dtype=np.int64)
    active = np.arange(z.size)
    cur = z.copy()
    for step in range(budget + 1):
        if active.size == 0:
            break
        w = cur[active]
        fatou = np.abs(w - cl.fixed.z0) < cl.radius
        dist = np.min(np.abs(w[:, None] - cl.julia_points[None, :]), axis=1)
        julia = (dist <= HIT_TOL * np.maximum(1.0, np.abs(w))) & ~fatou
        tags[active[fatou]] = step
        tags[active[julia]] = JULIA
        keep = ~(fatou | julia)
        active = active[keep]
        if step == budget or active.size == 0:
            break
        w = w[keep]
        if strict and np.any(~np.isfinite(w)):
            raise NumericError("iterate overflowed")
        with np.errstate(all="ignore"):
            nxt = flat_exp_eval(m, np.where(np.isfinite(w), w, np.inf))
        cur[active] = nxt
    return tags


def classify_point(m: FlatExpMap | Classifier, z: complex, budget: int = 2000):
    """``("Fatou", steps)``, ``("Julia", None)`` or ``("Unknown", None)``."""
    cl = m if isinstance(m, Classifier) else Classifier.build(m)
    tag = int(_iterate_classify(cl, np.array([z]), budget)[0])
    if tag >= 0:
        return ("Fatou", tag)
    return ("Julia", None) if tag == JULIA else ("Unknown", None)


@dataclass
class JuliaRaster:
    viewport: tuple[float, float, float, float]
    width: int
    height: int
    cells: np.ndarray
    budget: int

    @property
    def unknown_fraction(self) -> float:
        return float(np.mean(self.cells == UNKNOWN))

    def gray(self) -> np.ndarray:
        g = np.where(self.cells == JULIA, 0,
                     np.where(self.cells == UNKNOWN, 128, 255 - np.minimum(self.cells, 254)))
        return g.astype(np.uint8)

    def to_pgm(self) -> bytes:
        header = f"P5\n{self.width} {self.height}\n255\n".encode("ascii")
        return header + self.gray().tobytes()


def default_viewport(m: FlatExpMap) -> tuple[float, float, float, float]:
    return (m.a - 1.0, 1.5, -1.0, 1.0)


def pixel_centers(viewport, width: int, height: int) -> np.ndarray:
    """Pixel centres placed symmetrically about the viewport centre; row 0 is the top."""
    xmin, xmax, ymin, ymax = viewport
    if not (xmax > xmin and ymax > ymin and width > 0 and height > 0):
        raise ValidationError("empty viewport or raster")
    sx = (xmax - xmin) / width
    sy = (ymax - ymin) / height
    cx, cy = 0.5 * (xmin + xmax), 0.5 * (ymin + ymax)
    xs = cx + (np.arange(width) - (width - 1) / 2.0) * sx
    ys = cy - (np.arange(height) - (height - 1) / 2.0) * sy
    return xs[None, :] + 1j * ys[:, None]


def render_julia(m: FlatExpMap, viewport=None, width: int = 200, height: int = 160,
                 budget: int = 2000, classifier: Classifier | None = None) -> JuliaRaster:
    cl = classifier or Classifier.build(m)
    viewport = default_viewport(m) if viewport is None else tuple(viewport)
    z = pixel_centers(viewport, width, height)
    tags = _iterate_classify(cl, z, budget).reshape(height, width)
    return JuliaRaster(viewport, width, height, tags, budget)


def singular_orbits_converge(m: FlatExpMap, budget: int = 2000) -> bool:
    """Both singular values (0 and 1) enter the contraction disk of z0.

    Every attracting cycle attracts a singular value, so this rules out a
    second attracting basin.
    """
    cl = Classifier.build(m)
    tags = _iterate_classify(cl, np.array([0.0, 1.0]), budget)
    return bool(np.all(tags >= 0))


def julia_samples(m: FlatExpMap, count: int, steps: int = 12, K: int = 2,
                  rng: np.random.Generator | None = None) -> np.ndarray:
    """Points of J_f by random backward iteration from the repelling fixed point."""
    rng = np.random.default_rng(0) if rng is None else rng
    b = find_fixed_points(m).b_f
    z = np.full(count, complex(b))
    for _ in range(steps):
        k = rng.integers(-K, K + 1, size=count)
        sgn = rng.choice([-1.0, 1.0], size=count)
        z = m.a + sgn * np.sqrt(-m.c / (np.log(z) + 2j * np.pi * k))
    return z


def preimage_density_probe(m: FlatExpMap, depth: int, samples: int = 200, K: int = 2,
                           points: np.ndarray | None = None, seed: int = 0) -> dict:
    """Distances from Julia-set samples to the iterated preimages of ``a``.

    Preimages up to ``depth`` (with ``|k| <= K``) are pooled together with
    ``a`` itself.  Returns max/median distance and the worst forward-chain
    error ``|f^d(w) - a|`` over the computed preimages.
    """
    if not 0 <= depth <= 4:
        raise ValidationError("depth must lie in [0, 4]")
    if points is None:
        if samples < 100:
            raise ValidationError("at least 100 samples are required")
        points = julia_samples(m, samples, rng=np.random.default_rng(seed))
    levels = preimage_tree(m, depth, K)
    pool = np.concatenate(levels)
    dist = np.array([np.min(np.abs(pool - p)) for p in np.atleast_1d(points)])
    chain_err = 0.0
    for d, lev in enumerate(levels[1:], start=1):
        w = lev.copy()
        for _ in range(d - 1):
            w = flat_exp_eval(m, w)
        # final step lands on a; compare images of the last preimage layer
        chain_err = max(chain_err, float(np.max(np.abs(flat_exp_eval(m, w) - m.a))))
    return {
        "depth": depth,
        "preimages": int(pool.size),
        "samples": int(np.size(points)),
        "max_distance": float(np.max(dist)),
        "median_distance": float(np.median(dist)),
        "chain_error": chain_err,
    }


# ---------------------------------------------------------------------------
# towers

def tower_map_eval(base: Callable, tau: float, n: int, z):
    """``H_n(z) = tau^n base(z / tau^n)``."""
    s = tau ** n
    return s * base(np.asarray(z) / s)


def tower_density_probe(K: np.ndarray, tau: float, N: int, viewport=(-40.0, 40.0, -40.0, 40.0),
                        grid: int = 81, delta: float = 1.0) -> list[float]:
    """Fraction of a coarse grid within ``delta`` of ``U_{n<=N} tau^n K``, for each N."""
    pts = pixel_centers(viewport, grid, grid).ravel()
    near = np.zeros(pts.size, dtype=bool)
    out = []
    for n in range(N + 1):
        layer = (tau ** n) * np.asarray(K, dtype=complex)
        for chunk in np.array_split(layer, max(1, layer.size // 512)):
            near |= np.min(np.abs(pts[:, None] - chunk[None, :]), axis=1) <= delta
        out.append(float(np.mean(near)))
    return out


def sidecar(m: FlatExpMap, raster: JuliaRaster) -> str:
    fp = find_fixed_points(m)
    return json.dumps({
        "a": m.a, "c": m.c,
        "b_f": fp.b_f, "z0": fp.z0, "mult_b": fp.mult_b, "mult_z0": fp.mult_z0,
        "viewport": list(raster.viewport), "width": raster.width, "height": raster.height,
        "budget": raster.budget, "unknown_fraction": raster.unknown_fraction,
    }, indent=1)
