"""Deterministic least-squares primitives.

Inputs are sorted by ascending x (ties broken by y, then weight) before any
summation, so every fit is invariant under reordering of its input points.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateDesign, DegenerateFit, InsufficientData


@dataclass(frozen=True)
class FitDiagnostics:
    coefficients: tuple
    residual_rms: float
    n_points: int
    flags: tuple = ()


@dataclass(frozen=True)
class HingeFit:
    """Continuous two-segment line joined at ``breakpoint``."""

    breakpoint: float
    level: float  # fitted value at the breakpoint
    slope_left: float
    slope_right: float
    residual_rms: float
    n_points: int

    def predict(self, x):
        x = np.asarray(x, dtype=np.float64)
        d = x - self.breakpoint
        return self.level + np.where(d < 0, self.slope_left * d, self.slope_right * d)


def _prepare(xs, ys, weights):
    x = np.asarray(xs, dtype=np.float64).ravel()
    y = np.asarray(ys, dtype=np.float64).ravel()
    if x.shape != y.shape:
        raise ValueError("xs and ys must have the same length")
    if weights is None:
        w = np.ones_like(x)
    else:
        w = np.asarray(weights, dtype=np.float64).ravel()
        if w.shape != x.shape:
            raise ValueError("weights must match xs")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite and non-negative")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("non-finite data")
    order = np.lexsort((w, y, x))
    return x[order], y[order], w[order]


def linfit(xs: Sequence[float], ys: Sequence[float],
           weights: Optional[Sequence[float]] = None) -> FitDiagnostics:
    """Weighted straight line. Coefficients are (slope, intercept)."""
    x, y, w = _prepare(xs, ys, weights)
    if np.count_nonzero(w) < 2:
        raise InsufficientData("linfit needs at least two weighted points")
    wsum = np.sum(w)
    xm = np.sum(w * x) / wsum
    ym = np.sum(w * y) / wsum
    dx = x - xm
    sxx = np.sum(w * dx * dx)
    if not sxx > 0:
        raise DegenerateDesign("all weighted xs are equal")
    slope = np.sum(w * dx * (y - ym)) / sxx
    intercept = ym - slope * xm
    r = y - (slope * x + intercept)
    rms = float(np.sqrt(np.sum(w * r * r) / wsum))
    return FitDiagnostics((float(slope), float(intercept)), rms, int(x.size))


def quadfit_vertex(xs: Sequence[float], ys: Sequence[float],
                   weights: Optional[Sequence[float]] = None,
                   require_positive: bool = False, flat_tol: float = 1e-9) -> FitDiagnostics:
    """Weighted parabola in vertex form a*(x - x_v)**2 + c.

    Coefficients are (a, x_v, c). The fit is done in a centred, scaled
    monomial basis and converted algebraically. A curvature whose total
    contribution over the data span is below ``flat_tol`` of the data scale
    is flagged "flat"; with ``require_positive`` a flat or negative curvature
    raises DegenerateFit.
    """
    x, y, w = _prepare(xs, ys, weights)
    if np.count_nonzero(w) < 3 or np.unique(x[w > 0]).size < 3:
        raise InsufficientData("quadfit_vertex needs three distinct weighted points")
    wsum = np.sum(w)
    centre = np.sum(w * x) / wsum
    scale = np.sqrt(np.sum(w * (x - centre) ** 2) / wsum)
    t = (x - centre) / scale
    sw = np.sqrt(w)
    design = np.column_stack([np.ones_like(t), t, t * t]) * sw[:, None]
    p, *_ = np.linalg.lstsq(design, y * sw, rcond=None)
    p0, p1, p2 = (float(v) for v in p)
    fitted = p0 + p1 * t + p2 * t * t
    r = y - fitted
    rms = float(np.sqrt(np.sum(w * r * r) / wsum))

    tspan = float(np.max(np.abs(t)))
    yscale = max(float(np.max(np.abs(y))), float(np.max(np.abs(fitted))), 1e-300)
    flags = ()
    if abs(p2) * tspan * tspan <= flat_tol * yscale:
        flags = ("flat",)
    if require_positive and (flags or p2 <= 0):
        raise DegenerateFit(f"curvature {p2 / scale**2:.3g} is not positive")
    if p2 == 0.0:
        return FitDiagnostics((0.0, float("nan"), p0), rms, int(x.size), flags)
    a = p2 / (scale * scale)
    xv = centre - p1 / (2.0 * p2) * scale
    c = p0 - p1 * p1 / (4.0 * p2)
    return FitDiagnostics((a, float(xv), c), rms, int(x.size), flags)


def hinge_fit(xs: Sequence[float], ys: Sequence[float], min_side: int = 4) -> HingeFit:
    """Continuous piecewise-linear fit with one breakpoint.

    Every data abscissa with at least ``min_side`` points on each side
    (breakpoint included in both) is tried; the smallest total squared
    residual wins, ties going to the smaller |breakpoint|.
    """
    x, y, _ = _prepare(xs, ys, None)
    n = x.size
    if n < 2 * min_side - 1:
        raise InsufficientData(f"need at least {2 * min_side - 1} points, got {n}")
    best = None
    for k in range(min_side - 1, n - min_side + 1):
        bp = x[k]
        if np.count_nonzero(x <= bp) < min_side or np.count_nonzero(x >= bp) < min_side:
            continue
        d = x - bp
        design = np.column_stack([np.ones_like(x), np.minimum(d, 0.0), np.maximum(d, 0.0)])
        coef, *_ = np.linalg.lstsq(design, y, rcond=None)
        r = y - design @ coef
        ssr = float(np.sum(r * r))
        if best is None:
            best = (ssr, bp, coef)
            continue
        tol = 1e-12 * max(best[0], ssr) + 1e-300
        if ssr < best[0] - tol or (abs(ssr - best[0]) <= tol and abs(bp) < abs(best[1])):
            best = (ssr, bp, coef)
    if best is None:
        raise InsufficientData(f"no breakpoint leaves {min_side} points on each side")
    ssr, bp, coef = best
    return HingeFit(float(bp), float(coef[0]), float(coef[1]), float(coef[2]),
                    float(np.sqrt(ssr / n)), int(n))
