"""Least-squares Lorentzian lineshape fits.

Model: ``y = baseline - depth * (w/2)^2 / ((x - center)^2 + (w/2)^2)``.
A dip has ``depth > 0``, a peak ``depth < 0``. The fit runs a damped
Gauss-Newton (Levenberg-Marquardt) iteration with the analytic Jacobian
on data rescaled to unit span, which makes it equivariant under
rescaling of x.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_ITERATIONS = 200
STEP_TOL = 1e-10


@dataclass(frozen=True)
class LorentzianFit:
    center: float
    fwhm: float
    depth: float
    baseline: float
    rms_residual: float
    converged: bool
    iterations: int
    fwhm_constrained: bool = True

    @property
    def extremum(self) -> float:
        """Model value at the line center."""
        return self.baseline - self.depth

    def evaluate(self, x):
        return lorentzian(np.asarray(x, dtype=float), self.center, self.fwhm,
                          self.depth, self.baseline)


def lorentzian(x, center, fwhm, depth, baseline):
    h2 = (fwhm / 2) ** 2
    return baseline - depth * h2 / ((x - center) ** 2 + h2)


def _model_and_jacobian(p, x):
    c, w, d, b = p
    h = w / 2
    u = x - c
    den = u * u + h * h
    shape = h * h / den
    y = b - d * shape
    jac = np.empty((x.size, 4))
    jac[:, 0] = -d * 2 * h * h * u / den ** 2
    jac[:, 1] = -d * h * u * u / den ** 2
    jac[:, 2] = -shape
    jac[:, 3] = 1.0
    return y, jac


def initial_guess(x, y):
    """Deterministic start: extremum location, outer-decile baseline, half-span width."""
    n = x.size
    k = max(1, int(round(0.05 * n)))
    baseline = float(np.median(np.concatenate([y[:k], y[-k:]])))
    i_min, i_max = int(np.argmin(y)), int(np.argmax(y))
    i = i_min if baseline - y[i_min] >= y[i_max] - baseline else i_max
    return np.array([x[i], (x[-1] - x[0]) / 2, baseline - y[i], baseline])


def _half_max_width(x, y, p):
    """Width of the contiguous region around the extremum beyond half depth."""
    c, _, d, b = p
    i = int(np.argmin(np.abs(x - c)))
    beyond = np.abs(y - b) >= abs(d) / 2
    lo = hi = i
    while lo > 0 and beyond[lo - 1]:
        lo -= 1
    while hi < x.size - 1 and beyond[hi + 1]:
        hi += 1
    spacing = (x[-1] - x[0]) / (x.size - 1)
    return max(x[hi] - x[lo], spacing)


def _levenberg_marquardt(p, xs, ys):
    model, jac = _model_and_jacobian(p, xs)
    r = model - ys
    cost = r @ r
    lam = 1e-3
    converged = False
    iterations = 0
    while iterations < MAX_ITERATIONS:
        iterations += 1
        a = jac.T @ jac
        g = jac.T @ r
        diag = np.diag(a).copy()
        diag = np.maximum(diag, 1e-12 * max(diag.max(), 1e-300))
        improved = False
        while lam < 1e20:
            try:
                step = np.linalg.solve(a + lam * np.diag(diag), -g)
            except np.linalg.LinAlgError:
                lam *= 10
                continue
            trial = p + step
            t_model, t_jac = _model_and_jacobian(trial, xs)
            t_r = t_model - ys
            t_cost = t_r @ t_r
            if t_cost <= cost:
                improved = True
                break
            lam *= 10
        if not improved:
            # no descent direction left at working precision
            converged = True
            break
        p, jac, r, cost = trial, t_jac, t_r, t_cost
        lam = max(lam / 10, 1e-12)
        if np.linalg.norm(step) <= STEP_TOL * (np.linalg.norm(p) + STEP_TOL):
            converged = True
            break
    return p, cost, converged, iterations


def fit_lorentzian(x, y, p0=None) -> LorentzianFit:
    """Fit a single Lorentzian dip or peak to ``(x, y)``.

    Convergence requires a relative parameter change below 1e-10 within
    200 iterations; otherwise the best parameters so far are returned with
    ``converged=False``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-d arrays of equal length")
    if x.size < 5:
        raise ValueError(f"need at least 5 points, got {x.size}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("data must be finite")
    order = np.argsort(x, kind="stable")
    x, y = x[order], y[order]

    x_mid = (x[0] + x[-1]) / 2
    x_scale = (x[-1] - x[0]) / 2
    if x_scale <= 0:
        raise ValueError("x must span a nonzero range")
    y_mid = (np.max(y) + np.min(y)) / 2
    y_scale = (np.max(y) - np.min(y)) / 2
    if y_scale == 0:
        y_scale = max(abs(y_mid), 1.0)
    xs = (x - x_mid) / x_scale
    ys = (y - y_mid) / y_scale

    if p0 is None:
        p = initial_guess(xs, ys)
    else:
        c, w, d, b = p0
        p = np.array([(c - x_mid) / x_scale, w / x_scale, d / y_scale, (b - y_mid) / y_scale])

    p, cost, converged, iterations = _levenberg_marquardt(p, xs, ys)
    if p0 is None:
        # second start with the half-maximum width; narrow lines can stall
        # from the half-span guess
        q = initial_guess(xs, ys)
        q[1] = _half_max_width(xs, ys, q)
        q, q_cost, q_conv, q_iter = _levenberg_marquardt(q, xs, ys)
        if (q_conv and not converged) or (q_conv == converged and q_cost < cost):
            p, cost, converged, iterations = q, q_cost, q_conv, q_iter

    c, w, d, b = p
    center = c * x_scale + x_mid
    fwhm = abs(w) * x_scale
    depth = d * y_scale
    baseline = b * y_scale + y_mid
    rms = float(np.sqrt(cost / x.size) * y_scale)
    constrained = abs(depth) > 1e-9 * max(abs(baseline), np.ptp(y), 1e-300)
    return LorentzianFit(float(center), float(fwhm), float(depth), float(baseline),
                         rms, bool(converged), iterations, bool(constrained))
