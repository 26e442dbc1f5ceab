"""The smooth chain functions that every hard instance is built from.

``psi`` and ``phi`` are a C-infinity bump/sigmoid pair; ``chain_eval``
combines them into the masked chain objective on R^K whose partial
derivatives vanish beyond the last "discovered" coordinate.  ``soft_clamp``
is the radial squashing map that keeps inputs inside a ball of radius R, and
``hat_f_eval`` composes the chain with a tall orthonormal matrix and the
clamp into the building block of the randomized instances.

All derivative formulas are hand-derived closed forms; each is pinned by a
finite-difference test in the suite.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .linalg import TallOrthogonal, as_vector

__all__ = [
    "SQRT_E",
    "PHI_AT_ZERO",
    "Derivatives",
    "psi",
    "phi",
    "chain_eval",
    "soft_clamp",
    "hat_f_eval",
    "clamp_radius",
]

SQRT_E = float(np.sqrt(np.e))
#: value of the sigmoidal factor at 0 (half the total Gaussian mass, times sqrt(e))
PHI_AT_ZERO = float(np.sqrt(np.pi * np.e / 2.0))

# Below this point psi is exactly 0; the margin keeps the smooth gluing at
# x = 1/2 numerically clean (the true value there underflows anyway).
_PSI_CUTOFF = 0.5 + 1e-8
# exp() underflows to 0 below roughly -745; clamp to avoid spurious warnings
_EXP_FLOOR = -745.0


@dataclass(frozen=True)
class Derivatives:
    """Value + optional gradient + optional Hessian of a scalar function."""

    value: float
    grad: np.ndarray | None = None
    hess: np.ndarray | None = None


def psi(x, order: int = 0):
    """The flat-then-rising bump factor and its derivatives (orders 0..3).

    psi(x) = 0 for x <= 1/2 and exp(1 - 1/(2x-1)^2) otherwise; all orders are
    continuous at x = 1/2 with value 0.
    """
    if order not in (0, 1, 2, 3):
        raise ValueError(f"order must be in 0..3, got {order}")
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    out = np.zeros_like(x)
    m = x > _PSI_CUTOFF
    if np.any(m):
        u = 2.0 * x[m] - 1.0
        val = np.exp(np.maximum(1.0 - u ** -2, _EXP_FLOOR))
        if order == 0:
            out[m] = val
        elif order == 1:
            out[m] = val * 4.0 * u ** -3
        elif order == 2:
            out[m] = val * (16.0 * u ** -6 - 24.0 * u ** -4)
        else:
            out[m] = val * (64.0 * u ** -9 - 288.0 * u ** -7 + 192.0 * u ** -5)
    return float(out[0]) if scalar else out


def phi(x, order: int = 0):
    """The scaled Gaussian integral and its derivatives (orders 0..3).

    phi(x) = sqrt(e) * integral of exp(-t^2/2) from -inf to x.  The value is
    computed through the complementary error function, which preserves
    relative accuracy deep in the left tail.
    """
    if order not in (0, 1, 2, 3):
        raise ValueError(f"order must be in 0..3, got {order}")
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    if order == 0:
        out = PHI_AT_ZERO * erfc(-x / np.sqrt(2.0))
    else:
        g = SQRT_E * np.exp(-0.5 * x * x)
        if order == 1:
            out = g
        elif order == 2:
            out = -x * g
        else:
            out = (x * x - 1.0) * g
    return float(out[0]) if scalar else out


def _check_mask(mask, K: int) -> np.ndarray:
    m = np.asarray(mask, dtype=float)
    if m.shape != (K,):
        raise ValueError(f"mask must have shape ({K},), got {m.shape}")
    if not np.all((m == 0.0) | (m == 1.0)):
        raise ValueError("mask entries must be 0 or 1")
    return m


def chain_eval(K: int, mask, x, order: int = 0) -> Derivatives:
    """Evaluate the masked chain function on R^K up to second order.

    f(x) = -mask_1 * psi(1) * phi(x_1)
           + sum_{k=2..K} mask_k * [psi(-x_{k-1}) phi(-x_k) - psi(x_{k-1}) phi(x_k)]

    Only adjacent coordinates couple, so the Hessian is tridiagonal; it is
    assembled densely here since K stays small at desk scale.
    """
    if order not in (0, 1, 2):
        raise ValueError(f"order must be in 0..2, got {order}")
    x = as_vector(x, dim=K)
    m = _check_mask(mask, K)

    # Precompute psi/phi tables at +-x for all needed orders.
    ps = [psi(x, q) for q in range(order + 1)]
    ns = [psi(-x, q) for q in range(order + 1)]
    pf = [phi(x, q) for q in range(order + 1)]
    nf = [phi(-x, q) for q in range(order + 1)]

    val = -m[0] * pf[0][0]  # psi(1) = 1 exactly
    if K > 1:
        a = slice(0, K - 1)  # index k-1 for terms k = 2..K
        b = slice(1, K)      # index k
        terms = m[1:] * (ns[0][a] * nf[0][b] - ps[0][a] * pf[0][b])
        val += float(terms.sum())
    val = float(val)
    if order == 0:
        return Derivatives(val)

    grad = np.zeros(K)
    grad[0] = -m[0] * pf[1][0]
    if K > 1:
        # d/dx_{k-1}: -psi'(-x_{k-1}) phi(-x_k) - psi'(x_{k-1}) phi(x_k)
        grad[:-1] += m[1:] * (-ns[1][a] * nf[0][b] - ps[1][a] * pf[0][b])
        # d/dx_k:    -psi(-x_{k-1}) phi'(-x_k) - psi(x_{k-1}) phi'(x_k)
        grad[1:] += m[1:] * (-ns[0][a] * nf[1][b] - ps[0][a] * pf[1][b])
    if order == 1:
        return Derivatives(val, grad)

    H = np.zeros((K, K))
    H[0, 0] = -m[0] * pf[2][0]
    if K > 1:
        # d2/dx_{k-1}^2: psi''(-x_{k-1}) phi(-x_k) - psi''(x_{k-1}) phi(x_k)
        d_aa = m[1:] * (ns[2][a] * nf[0][b] - ps[2][a] * pf[0][b])
        # d2/dx_k^2:     psi(-x_{k-1}) phi''(-x_k) - psi(x_{k-1}) phi''(x_k)
        d_bb = m[1:] * (ns[0][a] * nf[2][b] - ps[0][a] * pf[2][b])
        # mixed:         psi'(-x_{k-1}) phi'(-x_k) - psi'(x_{k-1}) phi'(x_k)
        d_ab = m[1:] * (ns[1][a] * nf[1][b] - ps[1][a] * pf[1][b])
        idx = np.arange(K - 1)
        np.add.at(H, (idx, idx), d_aa)
        np.add.at(H, (idx + 1, idx + 1), d_bb)
        np.add.at(H, (idx, idx + 1), d_ab)
        np.add.at(H, (idx + 1, idx), d_ab)
    return Derivatives(val, grad, H)


def clamp_radius(K: int) -> float:
    """The clamp radius paired with a chain of length K in the randomized
    instances: R = 230 * sqrt(K)."""
    if K < 1:
        raise ValueError("K must be >= 1")
    return 230.0 * np.sqrt(K)


def soft_clamp(y, R: float, order: int = 0):
    """The radial squashing map rho(y) = y / sqrt(1 + |y|^2 / R^2).

    Returns ``(rho, jacobian, d2_contract)`` where entries beyond ``order``
    are None.  ``d2_contract(a)`` returns the symmetric matrix
    sum_k a_k * (second-derivative matrix of rho_k at y) -- the bilinear form
    needed for chain-rule Hessian assembly.

    |rho(y)| < R for every y.
    """
    if R <= 0:
        raise ValueError("R must be positive")
    if order not in (0, 1, 2):
        raise ValueError(f"order must be in 0..2, got {order}")
    y = as_vector(y)
    s = 1.0 / np.sqrt(1.0 + (y @ y) / R ** 2)
    rho = s * y
    if order == 0:
        return rho, None, None
    J = s * np.eye(y.size) - (s ** 3 / R ** 2) * np.outer(y, y)
    if order == 1:
        return rho, J, None

    def d2_contract(a) -> np.ndarray:
        a = as_vector(a, dim=y.size)
        ay = float(a @ y)
        M = -(s ** 3 / R ** 2) * (np.outer(a, y) + np.outer(y, a) + ay * np.eye(y.size))
        M += (3.0 * s ** 5 / R ** 4) * ay * np.outer(y, y)
        return M

    return rho, J, d2_contract


def hat_f_eval(K: int, B: TallOrthogonal, y, order: int = 0,
               R: float | None = None) -> Derivatives:
    """The clamped-and-rotated chain block on R^m:

        hat_f(y) = chain(B^T rho(y)) + |y|^2 / 10,

    with B an m x K matrix with orthonormal columns and rho the soft clamp of
    radius R (default 230 sqrt(K)).  Value/gradient/Hessian are assembled by
    the chain rule; the Hessian is

        J_rho B H_chain B^T J_rho + (second-derivative contraction of rho
        against B grad_chain) + I/5.
    """
    if order not in (0, 1, 2):
        raise ValueError(f"order must be in 0..2, got {order}")
    if B.k != K:
        raise ValueError(f"B must have K={K} columns, got {B.k}")
    y = as_vector(y, dim=B.d)
    if R is None:
        R = clamp_radius(K)

    rho, J, d2c = soft_clamp(y, R, order)
    w = B.columns.T @ rho
    ch = chain_eval(K, np.ones(K), w, order)

    val = ch.value + 0.1 * float(y @ y)
    if order == 0:
        return Derivatives(val)

    g_chain = B.columns @ ch.grad  # gradient w.r.t. rho
    grad = J @ g_chain + 0.2 * y   # J is symmetric
    if order == 1:
        return Derivatives(val, grad)

    H = J @ (B.columns @ ch.hess @ B.columns.T) @ J
    H += d2c(g_chain)
    H += 0.2 * np.eye(y.size)
    return Derivatives(val, grad, 0.5 * (H + H.T))
