"""Closed-form scaling calculators for the hard instances.

Given a smoothness level L, an initial optimality gap Delta and a target
accuracy eps, these produce the scaling bundle (lambda, sigma, K, d): lambda
controls the smoothness of the scaled instance, sigma the gradient-norm
floor, and K -- the chain length -- is the largest value compatible with the
gap.  Refusal (chain too short) raises :class:`InstanceTooSmallError`
carrying the smallest workable Delta.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

__all__ = [
    "ell_p",
    "HardInstanceSpec",
    "InstanceTooSmallError",
    "deterministic_params",
    "randomized_params",
    "lemma_d_requirement",
]

MODES = ("deterministic", "randomized-individual", "randomized-third-moment")


def ell_p(p: int) -> float:
    """Explicit smoothness constant of the order-p chain derivatives:
    2^(p+1) * exp(2.5 p + log p + 4 p + 10)."""
    if p < 1:
        raise ValueError("p must be >= 1")
    return 2.0 ** (p + 1) * math.exp(2.5 * p + math.log(p) + 4.0 * p + 10.0)


class InstanceTooSmallError(ValueError):
    """The requested (Delta, L, eps) combination yields an empty chain."""

    def __init__(self, msg: str, min_delta: float):
        super().__init__(msg)
        self.min_delta = min_delta


@dataclass(frozen=True)
class HardInstanceSpec:
    """The scaling bundle shared by all hard-instance constructions."""

    mode: str
    p: int
    n: int
    Delta: float
    L: float
    eps: float
    lam: float
    sigma: float
    K: int
    d: int
    ell: float
    #: informational only -- the dimension the high-probability analysis
    #: would demand (astronomical at desk scale); see lemma_d_requirement
    d_required: float | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.K < 1:
            raise ValueError("K must be >= 1")
        if not (self.sigma > 0 and self.lam > 0):
            raise ValueError("sigma and lambda must be positive")

    def to_dict(self) -> dict:
        return {
            "mode": self.mode, "p": self.p, "n": self.n, "Delta": self.Delta,
            "L": self.L, "eps": self.eps, "lam": self.lam,
            "sigma": self.sigma, "K": self.K, "d": self.d, "ell": self.ell,
            "d_required": self.d_required,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "HardInstanceSpec":
        return cls(**payload)


def _check_positive(**kwargs):
    for name, value in kwargs.items():
        if not value > 0:
            raise ValueError(f"{name} must be positive, got {value}")


def lemma_d_requirement(n: int, K: int, fail_prob: float = 0.1,
                        c0: float = 1.0) -> float:
    """Dimension the high-probability small-inner-product argument asks for:
    c0 * n^3 K^2 * log(n^2 K^2 / fail_prob).

    The constant c0 is not pinned down by the analysis; it is exposed as
    configuration (default 1) and the requirement is only ever reported as a
    warning, never enforced.
    """
    if not 0 < fail_prob < 1:
        raise ValueError("fail_prob must lie in (0, 1)")
    return c0 * n ** 3 * K ** 2 * math.log(n ** 2 * K ** 2 / fail_prob)


def deterministic_params(p: int, n: int, Delta: float, L: float, eps: float,
                         budget: int | None = None) -> HardInstanceSpec:
    """Scalings for the adaptive (resisting-oracle) construction.

    K + 1 = floor( (Delta/192) (L/ell_p)^(1/p) eps^(-(p+1)/p) ),
    lambda = L / ell_p,  sigma = (4 eps ell_p / L)^(1/p).

    The ambient dimension must dominate the chain length plus however many
    iterates the game will archive (each one constrains the adversary's
    remaining directions), so d = K + 1 + budget with a generous default
    budget of 2 n (K + 2) queries.
    """
    _check_positive(p=p, n=n, Delta=Delta, L=L, eps=eps)
    ell = ell_p(p)
    lam = L / ell
    sigma = (4.0 * eps * ell / L) ** (1.0 / p)
    k_plus_1 = math.floor((Delta / 192.0) * (L / ell) ** (1.0 / p)
                          * eps ** (-(p + 1.0) / p))
    if k_plus_1 < 2:
        min_delta = 2.0 * 192.0 * (ell / L) ** (1.0 / p) * eps ** ((p + 1.0) / p)
        raise InstanceTooSmallError(
            f"chain would be empty (K+1 = {k_plus_1} < 2); "
            f"smallest workable Delta is {min_delta:.6g}", min_delta)
    K = k_plus_1 - 1
    if budget is None:
        budget = 2 * n * (K + 2)
    d = K + 1 + int(budget)
    return HardInstanceSpec(mode="deterministic", p=p, n=n, Delta=Delta, L=L,
                            eps=eps, lam=lam, sigma=sigma, K=K, d=d, ell=ell)


def randomized_params(mode: str, p: int, n: int, Delta: float, L: float,
                      eps: float, ell_hat: float | None = None,
                      d: int | None = None, fail_prob: float = 0.1,
                      c0: float = 1.0) -> HardInstanceSpec:
    """Scalings for the randomized hard distribution.

    mode "randomized-individual" (any p >= 1):
        K = floor( (Delta/192) (L/ell_hat)^(1/p) n^(-(p+1)/(2p)) eps^(-(p+1)/p) )
        sigma = (4 sqrt(n) eps ell_hat / L)^(1/p),   lambda = L / ell_hat

    mode "randomized-third-moment" (p = 2 only):
        K = floor( (Delta / (96 n^(7/12))) (L/ell_hat)^(1/2) eps^(-3/2) )
        sigma = (4 eps ell_hat n^(1/6) / L)^(1/2),   lambda = L / ell_hat

    ell_hat is the smoothness constant of the unscaled clamped-chain block,
    which the underlying analysis does not make explicit; when omitted it is
    estimated empirically (times a 1.5 safety factor) by the verification
    module.  The default ambient dimension is the smallest legal one,
    d = n^2 K (d divisible by n with d/n >= nK columns to draw).
    """
    _check_positive(p=p, n=n, Delta=Delta, L=L, eps=eps)
    if mode not in ("randomized-individual", "randomized-third-moment"):
        raise ValueError(f"unknown randomized mode {mode!r}")
    if mode == "randomized-third-moment" and p != 2:
        raise ValueError("third-moment mode is defined for p = 2")
    if ell_hat is None:
        from ..verify import default_ell_hat  # lazy: avoids an import cycle
        ell_hat = default_ell_hat(p)
    _check_positive(ell_hat=ell_hat)

    lam = L / ell_hat
    if mode == "randomized-individual":
        sigma = (4.0 * math.sqrt(n) * eps * ell_hat / L) ** (1.0 / p)
        K = math.floor((Delta / 192.0) * (L / ell_hat) ** (1.0 / p)
                       * n ** (-(p + 1.0) / (2.0 * p))
                       * eps ** (-(p + 1.0) / p))
        min_delta = 192.0 * (ell_hat / L) ** (1.0 / p) \
            * n ** ((p + 1.0) / (2.0 * p)) * eps ** ((p + 1.0) / p)
    else:
        sigma = math.sqrt(4.0 * eps * ell_hat * n ** (1.0 / 6.0) / L)
        K = math.floor((Delta / (96.0 * n ** (7.0 / 12.0)))
                       * math.sqrt(L / ell_hat) * eps ** -1.5)
        min_delta = 96.0 * n ** (7.0 / 12.0) * math.sqrt(ell_hat / L) * eps ** 1.5
    if K < 1:
        raise InstanceTooSmallError(
            f"chain would be empty (K = {K} < 1); "
            f"smallest workable Delta is {min_delta:.6g}", min_delta)

    if d is None:
        d = n * n * K
    if d % n != 0:
        raise ValueError(f"d = {d} must be divisible by n = {n}")
    if d // n < n * K:
        raise ValueError(
            f"d/n = {d // n} too small to draw {n * K} orthonormal columns")
    d_req = lemma_d_requirement(n, K, fail_prob=fail_prob, c0=c0)
    return HardInstanceSpec(mode=mode, p=p, n=n, Delta=Delta, L=L, eps=eps,
                            lam=lam, sigma=sigma, K=K, d=d, ell=ell_hat,
                            d_required=d_req)
