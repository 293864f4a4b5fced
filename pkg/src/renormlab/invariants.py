"""Invariant checks for a stored fixed-point solution."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .combinatorics import critical_orbit_type
from .errors import RenormError
from .funcspace import lobatto_nodes, schwarzian, validate_unimodal
from .limit import abel_residual, build_G, multiplier_check, presentation_intervals
from .renorm import FixedPointSolution, H_extended, H_iterate, fixed_point_b0, renormalize, residual_sup


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str


def _run(name, fn) -> Check:
    try:
        ok, detail = fn()
    except RenormError as exc:
        return Check(name, False, f"{type(exc).__name__}: {exc}")
    return Check(name, bool(ok), detail)


def check_solution(sol: FixedPointSolution, tol: float = 1e-10) -> list[Check]:
    """Evaluate the solution invariants; ``tol`` bounds the functional-equation defect."""
    checks = []

    def tau_identity():
        rel = abs(abs(sol.alpha) ** sol.ell - sol.tau) / sol.tau
        return rel <= 1e-12 and sol.tau > 1.0, f"rel={rel:.2e}, tau={sol.tau:.10g}"

    def residual():
        r = residual_sup(sol, 64)
        return r <= tol, f"residual_sup={r:.3e}"

    def normalization():
        errs = (abs(sol.H(0.0) - 1.0), float(sol.H(sol.x0)),
                abs(float(H_iterate(sol, 1.0, sol.p - 1)) - 1.0 / sol.tau))
        return max(errs) <= 10 * tol, "H(0)-1, H(x0), H^(p-1)(1)-1/tau = " + ", ".join(f"{e:.1e}" for e in errs)

    def unimodal():
        problems = validate_unimodal(sol.map)
        return not problems, "; ".join(problems) or "ok"

    def schwarz():
        s = float(np.max(schwarzian(sol.E, lobatto_nodes((0.0, 1.0), sol.E.degree)[1:-1])))
        return s <= 1e-8, f"max S(E)={s:.3e}"

    def combinatorics():
        t = critical_orbit_type(sol.map, sol.p)
        return t == sol.order_type, f"orbit type {t}, stored {sol.order_type}"

    def fixed_point():
        m2, alpha = renormalize(sol.map, sol.order_type)
        d = float(np.max(np.abs(m2.E.coeffs - sol.E.coeffs)))
        return d <= 10 * tol, f"coefficient distance {d:.2e}"

    def multiplier():
        meas, pred = multiplier_check(sol)
        return abs(meas - pred) <= 1e-6, f"measured={meas:.10f}, predicted={pred:.10f}"

    def g_fixed():
        G = build_G(sol)
        xs = np.linspace(0.0, 1.0, 64)
        ident = float(np.max(np.abs(sol.H(xs) / sol.tau - sol.H(G(xs)))))
        err = abs(G(sol.x0) - sol.x0)
        return err <= 1e-9 and ident <= 1e-9, f"|G(x0)-x0|={err:.1e}, identity defect={ident:.1e}"

    def abel():
        grid = np.linspace(sol.x0, 1.0, 66)[1:-1]
        r = abel_residual(sol, grid)
        return r <= 1e-9, f"abel_residual={r:.3e}"

    def repelling_b0():
        b0 = fixed_point_b0(sol)
        h = 1e-6
        d = float((H_extended(sol, np.array([b0 + h])) - H_extended(sol, np.array([b0 - h])))[0] / (2 * h))
        return b0 > 1.0 and d > 1.0, f"b0={b0:.10f}, H'(b0)={d:.4f}"

    def presentation():
        pi = presentation_intervals(sol)
        return True, f"R'={pi.Rprime:.6f}, intervals {[(round(a, 6), round(b, 6)) for a, b in pi.Jcal]}"

    for name, fn in [("tau=|alpha|^ell", tau_identity), ("functional equation", residual),
                     ("normalization", normalization), ("unimodal", unimodal),
                     ("schwarzian", schwarz), ("combinatorics", combinatorics),
                     ("renormalization fixed point", fixed_point), ("multiplier", multiplier),
                     ("G fixes x0", g_fixed), ("abel equation", abel),
                     ("repelling b0", repelling_b0), ("presentation intervals", presentation)]:
        checks.append(_run(name, fn))
    return checks
