"""Exact solver for the cubic-regularized model subproblem

    minimize_h  <v, h> + 0.5 <U h, h> + (M/6) |h|^3.

Strategy: eigendecompose U once and solve the scalar secular equation in the
step length.  The stationarity system is (U + (M/2) s I) h = -v with
s = |h|, which pins s as the root of

    phi(s) = | (U + (M/2) s I)^{-1} v |  -  s,

strictly decreasing on s > s0 = max(0, -2 lmin / M).  Two numerical points
matter:

* the root is found in the shifted variable u = s - s0, so the denominators
  (lj - lmin) + (M/2) u are computed without cancellation and the root is
  resolved to full relative precision even when it sits arbitrarily close to
  the pole (near-hard case);
* when v has (numerically) no component in the bottom eigenspace and the
  interior solution at s0 is short, the minimizer picks up a boundary
  component along the bottom eigenvector (the hard case).

The three optimality conditions -- zero stationarity residual, positive
semidefiniteness of the shifted Hessian, and model decrease of at least
(M/12)|h|^3 -- are asserted after every solve, not merely hoped for.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .linalg import as_vector, eig_sym, sym_matrix

__all__ = ["CubicModel", "CubicSolution", "solve", "model_value"]

# v components below this (relative) size in the bottom eigenspace are
# treated as zero when classifying the hard case; the neglected mass shows up
# in the stationarity residual and stays far below the default tolerance.
_HARD_CASE_TOL = 1e-13


@dataclass(frozen=True)
class CubicModel:
    """Gradient estimate v, Hessian estimate U, cubic penalty M > 0."""

    v: np.ndarray
    U: np.ndarray
    M: float

    def __post_init__(self):
        object.__setattr__(self, "v", as_vector(self.v))
        object.__setattr__(self, "U", sym_matrix(self.U))
        if self.U.shape[0] != self.v.shape[0]:
            raise ValueError("v and U dimensions disagree")
        if not self.M > 0:
            raise ValueError("M must be positive")


@dataclass(frozen=True)
class CubicSolution:
    h: np.ndarray = field(repr=False)
    s: float                  # |h|
    stationarity: float       # |v + U h + (M/2)|h| h|
    eig_slack: float          # lmin(U) + (M/2)|h|   (must be >= -tol)
    model_val: float          # value of the model at h

    @property
    def residuals(self) -> tuple[float, float, float]:
        return (self.stationarity, self.eig_slack, self.model_val)


def model_value(model: CubicModel, h) -> float:
    """<v,h> + 0.5 h^T U h + (M/6)|h|^3, evaluated exactly as written."""
    h = as_vector(h, dim=model.v.shape[0])
    s = float(np.linalg.norm(h))
    return float(model.v @ h + 0.5 * h @ (model.U @ h) + model.M / 6.0 * s ** 3)


def _secular_norm(w2, lam_shift, half_m, u):
    """|h(u)| for denominators d_j = lam_shift_j + (M/2) u (no cancellation)."""
    d = lam_shift + half_m * u
    return float(np.sqrt(np.sum(w2 / d ** 2)))


def solve(model: CubicModel, tol: float | None = None) -> CubicSolution:
    """Global minimizer of the cubic model, with certified residuals.

    Raises ``np.linalg.LinAlgError`` if the eigendecomposition fails and
    ``ArithmeticError`` if the optimality conditions cannot be met within
    tolerance (which would indicate a solver bug, not a property of the
    model: the subproblem always has a global minimizer).
    """
    v, U, M = model.v, model.U, model.M
    norm_v = float(np.linalg.norm(v))
    if tol is None:
        tol = 1e-10 * (1.0 + norm_v)
    if tol <= 0:
        raise ValueError("tol must be positive")

    lam, Q = eig_sym(U)
    lmin = float(lam[0])
    w = Q.T @ v
    w2 = w ** 2
    half_m = M / 2.0

    s0 = max(0.0, -2.0 * lmin / M)
    # cancellation-free shifted spectrum: d_j(u) = shift_j + (M/2) u with
    # shift_j = lam_j - lmin (>= 0) when lmin < 0, else lam_j itself
    shift = (lam - lmin) if lmin < 0 else lam.copy()

    gap_tol = _HARD_CASE_TOL * max(1.0, abs(lmin))
    bottom = shift <= gap_tol
    w_bot = float(np.sqrt(w2[bottom].sum()))
    interior = ~bottom

    def h_from_u(u: float) -> np.ndarray:
        d = shift + half_m * u
        y = np.zeros_like(w)
        y[d > 0] = -w[d > 0] / d[d > 0]
        return Q @ y

    hard_threshold = _HARD_CASE_TOL * (1.0 + norm_v)
    L0 = np.sqrt(np.sum(w2[interior] / shift[interior] ** 2)) if interior.any() else 0.0

    h = None
    if w_bot <= hard_threshold and L0 <= s0:
        # hard case: interior part at the pole plus a boundary component
        # along the bottom eigenvector to stretch the step to length s0
        y = np.zeros_like(w)
        y[interior] = -w[interior] / shift[interior]
        alpha = np.sqrt(max(s0 ** 2 - L0 ** 2, 0.0))
        y[np.argmax(bottom)] += alpha
        h = Q @ y
        s = s0
    else:
        # easy case: bracket the root of phi(u) = |h(u)| - (s0 + u) in u > 0
        def phi_u(u: float) -> float:
            return _secular_norm(w2, shift, half_m, u) - (s0 + u)

        scale = max(1.0, s0, np.sqrt(2.0 * norm_v / M))
        u_hi = scale
        while phi_u(u_hi) > 0.0:
            u_hi *= 2.0
            if u_hi > 1e300:
                raise ArithmeticError("failed to bracket the secular root")
        u_lo = min(1e-3 * scale, 0.5 * u_hi)
        while phi_u(u_lo) <= 0.0:
            u_lo *= 1e-2
            if u_lo < 1e-290:
                # root collapses onto the pole: treat as (near-)hard case
                u_lo = 0.0
                break
        if u_lo == 0.0:
            y = np.zeros_like(w)
            y[interior] = -w[interior] / shift[interior]
            alpha = np.sqrt(max(s0 ** 2 - L0 ** 2, 0.0))
            y[np.argmax(bottom)] += alpha if bottom.any() else 0.0
            h = Q @ y
            s = float(np.linalg.norm(h))
        else:
            u_star = brentq(phi_u, u_lo, u_hi, xtol=1e-300, rtol=8.9e-16,
                            maxiter=200)
            h = h_from_u(u_star)
            s = s0 + u_star

    s_actual = float(np.linalg.norm(h))
    stationarity = float(np.linalg.norm(v + U @ h + half_m * s_actual * h))
    eig_slack = lmin + half_m * s_actual
    m_val = model_value(model, h)

    if stationarity > tol * (1.0 + norm_v):
        raise ArithmeticError(
            f"stationarity residual {stationarity:.3e} exceeds tolerance")
    if eig_slack < -tol:
        raise ArithmeticError(f"shifted Hessian not PSD: slack {eig_slack:.3e}")
    if m_val > -(M / 12.0) * s_actual ** 3 + tol:
        raise ArithmeticError(
            f"model value {m_val:.3e} above the decrease guarantee")
    return CubicSolution(h=h, s=s_actual, stationarity=stationarity,
                         eig_slack=float(eig_slack), model_val=m_val)
