"""Variance-reduced cubic regularization (SVRC) and full-information baselines.

The SVRC loop runs S epochs of T steps.  Each epoch anchors at a snapshot
where the exact full gradient and Hessian are computed (and every component's
data at the snapshot is cached); each step builds semi-stochastic estimators
of the gradient and Hessian from fresh i.i.d. batches, then moves by the
global minimizer of the cubic-regularized second-order model.

Oracle accounting follows the "charge every access, then credit snapshot
re-reads" convention: the ledger's raw total for a full run is
S*n + S*T*(b_g + b_h) + S*T*b_g, and its adjusted total (re-reads credited)
is S*n + S*T*(b_g + b_h).  Hessian-estimator reads at the snapshot are served
from the snapshot cache and recorded as zero-cost cache hits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cubic import CubicModel, solve
from .linalg import as_rng, as_vector, eig_sym
from .oracle import FiniteSumFunction, OracleLedger, query, record_iterate

__all__ = [
    "C_M",
    "SvrcParams",
    "TrajectoryRecord",
    "svrc_default_params",
    "svrc_gradient_estimator",
    "svrc_hessian_estimator",
    "svrc_run",
    "mu",
    "baseline_full_gd",
    "baseline_full_cubic",
]

#: cubic regularization strength in units of the Hessian-smoothness constant
C_M = 150.0


def _iceil(x: float) -> int:
    """Ceil with a guard against float noise pushing exact integers up."""
    return int(math.ceil(x - 1e-9 * max(1.0, abs(x))))


@dataclass(frozen=True)
class SvrcParams:
    """Schedule and batch sizes for one SVRC run."""

    M: float
    b_g: int
    b_h: int
    S: int
    T: int
    eps: float
    Delta: float
    L2: float
    seed: int = 0
    #: deterministic one-pass-over-all-n batches instead of i.i.d. sampling
    full_batch: bool = False

    def __post_init__(self):
        if not self.M > 0:
            raise ValueError("M must be positive")
        if self.b_g < 1 or self.b_h < 1:
            raise ValueError("batch sizes must be at least 1")
        if self.S < 1 or self.T < 1:
            raise ValueError("S and T must be at least 1")
        if not (self.eps > 0 and self.Delta > 0 and self.L2 > 0):
            raise ValueError("eps, Delta and L2 must be positive")


@dataclass(frozen=True)
class TrajectoryRecord:
    """One optimizer iteration: position stats plus cumulative query counts."""

    epoch: int
    step: int
    f: float
    grad_norm: float
    mu: float | None
    h_norm: float
    counters: dict = field(repr=False)
    i_queried: int | None = None


def svrc_default_params(n: int, d: int, Delta: float, L2: float,
                        eps: float, seed: int = 0) -> SvrcParams:
    """The theory schedule, with fractional counts rounded up.

    M = 150 L2;  T = max(2, n^(1/5));  S = max(1, 240 C_M^2 sqrt(L2) Delta
    n^(-1/5) eps^(-3/2));  b_g = 5 max(n^(4/5), 16);
    b_h = 3000 max(4, n^(2/5)) log^3 d.
    """
    for name, v in (("n", n), ("d", d), ("Delta", Delta), ("L2", L2),
                    ("eps", eps)):
        if not v > 0:
            raise ValueError(f"{name} must be positive")
    T = _iceil(max(2.0, float(n) ** 0.2))
    S = _iceil(max(1.0, 240.0 * C_M ** 2 * math.sqrt(L2) * Delta
                   * float(n) ** -0.2 * eps ** -1.5))
    b_g = _iceil(5.0 * max(float(n) ** 0.8, 16.0))
    b_h = max(1, _iceil(3000.0 * max(4.0, float(n) ** 0.4)
                        * math.log(d) ** 3))
    return SvrcParams(M=150.0 * L2, b_g=b_g, b_h=b_h, S=S, T=T,
                      eps=eps, Delta=Delta, L2=L2, seed=seed)


def _batch_counts(batch) -> tuple[np.ndarray, np.ndarray, int]:
    idx = np.asarray(batch, dtype=int).ravel()
    if idx.size == 0:
        raise ValueError("batch must be non-empty")
    uniq, counts = np.unique(idx, return_counts=True)
    return uniq, counts, idx.size


def svrc_gradient_estimator(F: FiniteSumFunction, ledger: OracleLedger,
                            x, x_hat, g_s, H_s, batch) -> np.ndarray:
    """Semi-stochastic gradient with first-order (Hessian) correction:

    v = (1/b) sum_i [grad f_i(x) - grad f_i(xh)] + g_s
        - ((1/b) sum_i hess f_i(xh) - H_s)(x - xh)

    Charges b gradient queries at x and b (order-2, re-read) queries at the
    snapshot; repeated indices in the batch are charged per draw but
    evaluated once.
    """
    x = as_vector(x, dim=F.d)
    x_hat = as_vector(x_hat, dim=F.d)
    uniq, counts, b = _batch_counts(batch)
    dx = x - x_hat
    diff = np.zeros(F.d)
    hdx = np.zeros(F.d)
    for i, c in zip(uniq, counts):
        at_x = query(ledger, F, int(i), x, order=1, count=int(c))
        at_hat = query(ledger, F, int(i), x_hat, order=2, count=int(c),
                       requery=True)
        w = c / b
        diff += w * (at_x.grad - at_hat.grad)
        hdx += w * (at_hat.hess @ dx)
    return diff + g_s - (hdx - H_s @ dx)


def svrc_hessian_estimator(F: FiniteSumFunction, ledger: OracleLedger,
                           x, x_hat, H_s, batch,
                           snapshot_cache: dict | None = None) -> np.ndarray:
    """Semi-stochastic Hessian:  U = (1/b) sum_j [hess f_j(x) - hess f_j(xh)]
    + H_s.

    Charges b Hessian queries at x; snapshot-point Hessians come from
    ``snapshot_cache`` (zero-cost hits) when available, else are charged as
    re-reads.
    """
    x = as_vector(x, dim=F.d)
    x_hat = as_vector(x_hat, dim=F.d)
    uniq, counts, b = _batch_counts(batch)
    diff = np.zeros((F.d, F.d))
    for j, c in zip(uniq, counts):
        at_x = query(ledger, F, int(j), x, order=2, count=int(c))
        if snapshot_cache is not None and int(j) in snapshot_cache:
            hess_hat = snapshot_cache[int(j)][1]
            ledger.record_cache_hit(int(c))
        else:
            hess_hat = query(ledger, F, int(j), x_hat, order=2, count=int(c),
                             requery=True).hess
        diff += (c / b) * (at_x.hess - hess_hat)
    U = diff + H_s
    return 0.5 * (U + U.T)


def mu(F: FiniteSumFunction, x, L2: float) -> float:
    """Combined stationarity measure:
    max(|grad F|^(3/2), -lambda_min(hess F)^3 / L2^(3/2)).

    Uses the free measurement channel; zero iff x is an exact second-order
    stationary point.
    """
    if not L2 > 0:
        raise ValueError("L2 must be positive")
    der = F.full(x, order=2)
    gnorm = float(np.linalg.norm(der.grad))
    lam_min = float(eig_sym(der.hess)[0][0])
    return max(gnorm ** 1.5, -(lam_min ** 3) / L2 ** 1.5)


def _measure(F, x, L2):
    der = F.full(x, order=2)
    gnorm = float(np.linalg.norm(der.grad))
    lam_min = float(eig_sym(der.hess)[0][0])
    m = max(gnorm ** 1.5, -(lam_min ** 3) / L2 ** 1.5)
    return float(der.value), gnorm, m


def svrc_run(F: FiniteSumFunction, params: SvrcParams, eps: float | None = None,
             x0=None, ledger: OracleLedger | None = None,
             budget: int | None = None
             ) -> tuple[np.ndarray, list[TrajectoryRecord]]:
    """Run the full S x T schedule; returns (x_out, trajectory).

    x_out is drawn uniformly from all post-step iterates with the run's own
    seeded RNG.  A cubic-solver failure aborts with the partial trajectory;
    an optional raw-query budget stops the run before the step that would
    exceed it.  Stats in the trajectory (f, gradient norm, mu) come from the
    free measurement channel and charge nothing.
    """
    if eps is None:
        eps = params.eps
    n, d = F.n, F.d
    if ledger is None:
        ledger = OracleLedger(n=n, eps=eps)
    elif ledger.eps is None:
        ledger.eps = eps
    rng = as_rng(params.seed)
    x = np.zeros(d) if x0 is None else as_vector(x0, dim=d).copy()

    trajectory: list[TrajectoryRecord] = []
    iterates: list[np.ndarray] = []
    step_cost = 2 * params.b_g + params.b_h
    aborted = False
    for s in range(params.S):
        if budget is not None and ledger.total + n > budget:
            break
        # snapshot pass: exact g, H and the per-component cache
        x_hat = x.copy()
        g_sum = np.zeros(d)
        h_sum = np.zeros((d, d))
        cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}
        for i in range(n):
            der = query(ledger, F, i, x_hat, order=2)
            cache[i] = (der.grad, der.hess)
            g_sum += der.grad
            h_sum += der.hess
        g_s = g_sum / n
        H_s = h_sum / n

        for t in range(params.T):
            if budget is not None and ledger.total + step_cost > budget:
                aborted = True
                break
            if params.full_batch:
                batch_g = np.arange(n)
                batch_h = np.arange(n)
            else:
                batch_g = rng.integers(0, n, size=params.b_g)
                batch_h = rng.integers(0, n, size=params.b_h)
            v = svrc_gradient_estimator(F, ledger, x, x_hat, g_s, H_s, batch_g)
            U = svrc_hessian_estimator(F, ledger, x, x_hat, H_s, batch_h,
                                       snapshot_cache=cache)
            try:
                sol = solve(CubicModel(v=v, U=U, M=params.M))
            except ArithmeticError:
                aborted = True
                break
            x = x + sol.h
            iterates.append(x.copy())
            f_val, gnorm, m = _measure(F, x, params.L2)
            record_iterate(ledger, gnorm)
            trajectory.append(TrajectoryRecord(
                epoch=s, step=t, f=f_val, grad_norm=gnorm, mu=m,
                h_norm=float(np.linalg.norm(sol.h)),
                counters=ledger.counters()))
        if aborted:
            break
        # next epoch anchors at the last iterate of this one

    if iterates:
        x_out = iterates[int(rng.integers(0, len(iterates)))].copy()
    else:
        x_out = x.copy()
    return x_out, trajectory


def _resolve_step(step_rule, t, x, grad):
    if callable(step_rule):
        return float(step_rule(t, x, grad))
    return float(step_rule)


def baseline_full_gd(F: FiniteSumFunction, step_rule, budget: int,
                     x0=None, ledger: OracleLedger | None = None,
                     eps: float | None = None, L2: float | None = None
                     ) -> list[TrajectoryRecord]:
    """Full gradient descent; each iteration pays one order-1 pass (n queries).

    ``step_rule`` is a constant or a callable (t, x, grad) -> step size.
    Runs until the next pass would exceed the query budget.
    """
    if budget <= 0:
        raise ValueError("budget must be positive")
    n, d = F.n, F.d
    if ledger is None:
        ledger = OracleLedger(n=n, eps=eps)
    x = np.zeros(d) if x0 is None else as_vector(x0, dim=d).copy()
    trajectory: list[TrajectoryRecord] = []
    t = 0
    while ledger.total + n <= budget:
        g_sum = np.zeros(d)
        val = 0.0
        for i in range(n):
            der = query(ledger, F, i, x, order=1)
            g_sum += der.grad
            val += der.value
        grad = g_sum / n
        gnorm = float(np.linalg.norm(grad))
        record_iterate(ledger, gnorm)
        m = mu(F, x, L2) if L2 is not None else None
        step = _resolve_step(step_rule, t, x, grad)
        h = -step * grad
        trajectory.append(TrajectoryRecord(
            epoch=0, step=t, f=val / n, grad_norm=gnorm, mu=m,
            h_norm=float(np.linalg.norm(h)), counters=ledger.counters()))
        x = x + h
        t += 1
    return trajectory


def baseline_full_cubic(F: FiniteSumFunction, M: float, budget: int,
                        x0=None, ledger: OracleLedger | None = None,
                        eps: float | None = None, L2: float | None = None
                        ) -> list[TrajectoryRecord]:
    """Cubic-regularized Newton with exact derivatives; one order-1 pass plus
    one order-2 pass (2n queries) per iteration."""
    if budget <= 0:
        raise ValueError("budget must be positive")
    if not M > 0:
        raise ValueError("M must be positive")
    n, d = F.n, F.d
    if ledger is None:
        ledger = OracleLedger(n=n, eps=eps)
    x = np.zeros(d) if x0 is None else as_vector(x0, dim=d).copy()
    trajectory: list[TrajectoryRecord] = []
    t = 0
    while ledger.total + 2 * n <= budget:
        g_sum = np.zeros(d)
        val = 0.0
        for i in range(n):
            der = query(ledger, F, i, x, order=1)
            g_sum += der.grad
            val += der.value
        h_sum = np.zeros((d, d))
        for i in range(n):
            h_sum += query(ledger, F, i, x, order=2).hess
        grad = g_sum / n
        hess = h_sum / n
        gnorm = float(np.linalg.norm(grad))
        record_iterate(ledger, gnorm)
        m = mu(F, x, L2) if L2 is not None else None
        try:
            sol = solve(CubicModel(v=grad, U=0.5 * (hess + hess.T), M=M))
        except ArithmeticError:
            break
        trajectory.append(TrajectoryRecord(
            epoch=0, step=t, f=val / n, grad_norm=gnorm, mu=m,
            h_norm=float(np.linalg.norm(sol.h)), counters=ledger.counters()))
        x = x + sol.h
        t += 1
    return trajectory
