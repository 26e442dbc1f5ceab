"""The incremental component oracle: finite-sum objectives queried one
component at a time, with exact per-index / per-derivative-order accounting
and first-hit tracking for the query-complexity measure.

Monitoring quantities (the full gradient norm logged every iteration, the
stationarity measure, trajectory rows) are computed through a separate
"measurement" path that never touches the counters: the ledger measures what
the *algorithm* consumed, not what the experimenter looked at.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .chains import Derivatives
from .linalg import as_rng, as_vector, sym_matrix

__all__ = [
    "FiniteSumFunction",
    "CallableFiniteSum",
    "quadratic_cosine_sum",
    "OracleLedger",
    "query",
    "record_iterate",
]


class FiniteSumFunction:
    """A finite sum F = (1/n) * sum_i f_i with components on R^d answering
    value/gradient/Hessian queries.

    Subclasses implement :meth:`component`.  Component indices are 0-based.
    """

    n: int
    d: int

    def component(self, i: int, x, order: int = 2) -> Derivatives:
        raise NotImplementedError

    def check_index(self, i: int) -> int:
        i = int(i)
        if not 0 <= i < self.n:
            raise ValueError(f"component index {i} out of range [0, {self.n})")
        return i

    def full(self, x, order: int = 1) -> Derivatives:
        """Average of all components -- the free measurement side channel.

        Never goes through a ledger; use :func:`query` for charged access.
        """
        x = as_vector(x, dim=self.d)
        val = 0.0
        grad = np.zeros(self.d) if order >= 1 else None
        hess = np.zeros((self.d, self.d)) if order >= 2 else None
        for i in range(self.n):
            der = self.component(i, x, order)
            val += der.value
            if order >= 1:
                grad += der.grad
            if order >= 2:
                hess += der.hess
        val /= self.n
        if order >= 1:
            grad /= self.n
        if order >= 2:
            hess /= self.n
        return Derivatives(val, grad, hess)


class CallableFiniteSum(FiniteSumFunction):
    """Finite sum built from a list of ``f(x, order) -> Derivatives``."""

    def __init__(self, components, d: int):
        self._components = list(components)
        self.n = len(self._components)
        self.d = int(d)
        if self.n < 1:
            raise ValueError("need at least one component")

    def component(self, i: int, x, order: int = 2) -> Derivatives:
        i = self.check_index(i)
        x = as_vector(x, dim=self.d)
        return self._components[i](x, order)


def quadratic_cosine_sum(n: int, d: int, seed, *, curvature: float = 1.0,
                         ripple: float = 1.0) -> CallableFiniteSum:
    """A smooth non-convex synthetic benchmark sum.

    Component i is  0.5 x^T A_i x + c_i * cos(<b_i, x>) + <r_i, x>  with a
    positive-semidefinite A_i.  Every derivative of order >= 3 lives in the
    cosine term, so the Hessian-difference Lipschitz constant of component i
    is exactly |c_i| * |b_i|^3, which makes the sum a convenient target for
    smoothness estimation with a known ground truth.
    """
    rng = as_rng(seed)
    comps = []
    for _ in range(n):
        G = rng.standard_normal((d, d)) / np.sqrt(d)
        A = curvature * (G @ G.T)
        b = rng.standard_normal(d)
        b *= rng.uniform(0.5, 1.5) / np.linalg.norm(b)
        c = ripple * rng.uniform(0.5, 1.5)
        r = 0.3 * rng.standard_normal(d)

        def make(A=A, b=b, c=c, r=r):
            def f(x, order=2):
                t = float(b @ x)
                Ax = A @ x
                val = 0.5 * float(x @ Ax) + c * np.cos(t) + float(r @ x)
                if order == 0:
                    return Derivatives(val)
                grad = Ax - c * np.sin(t) * b + r
                if order == 1:
                    return Derivatives(val, grad)
                hess = A - c * np.cos(t) * np.outer(b, b)
                return Derivatives(val, grad, hess)
            return f

        comps.append(make())
    return CallableFiniteSum(comps, d)


@dataclass
class OracleLedger:
    """Exact query accounting for one run.

    ``per_index[i]`` counts queries to component i (one per draw, so batched
    repetitions of the same index all count); the per-order counters count
    the derivative orders actually returned.  ``cache_hits`` counts
    snapshot-cache lookups that were served at zero query cost.  First-hit
    tracking records the first recorded iterate whose (externally measured)
    full-gradient norm fell to ``eps`` or below.
    """

    n: int
    eps: float | None = None
    per_index: np.ndarray = field(default=None, repr=False)
    value_queries: int = 0
    grad_queries: int = 0
    hess_queries: int = 0
    cache_hits: int = 0
    requery_queries: int = 0
    first_hit: int | None = None
    first_hit_queries: int | None = None
    iterates_recorded: int = 0

    def __post_init__(self):
        if self.per_index is None:
            self.per_index = np.zeros(self.n, dtype=np.int64)

    @property
    def total(self) -> int:
        return int(self.per_index.sum())

    @property
    def adjusted_total(self) -> int:
        """Query count with snapshot-point re-queries treated as free.

        ``total`` charges every oracle access, including re-reading component
        data at the snapshot point inside an estimator; this view instead
        credits those against the full pass the snapshot already paid for.
        """
        return self.total - self.requery_queries

    def charge(self, i: int, order: int, count: int = 1,
               requery: bool = False) -> None:
        if count < 0:
            raise ValueError("count must be non-negative")
        self.per_index[i] += count
        self.value_queries += count
        if order >= 1:
            self.grad_queries += count
        if order >= 2:
            self.hess_queries += count
        if requery:
            self.requery_queries += count

    def record_cache_hit(self, count: int = 1) -> None:
        """A lookup served from a snapshot cache at zero query cost."""
        if count < 0:
            raise ValueError("count must be non-negative")
        self.cache_hits += count

    def counters(self) -> dict:
        return {
            "total": self.total,
            "adjusted_total": self.adjusted_total,
            "value": self.value_queries,
            "grad": self.grad_queries,
            "hess": self.hess_queries,
            "cache_hits": self.cache_hits,
            "requeries": self.requery_queries,
        }


def query(ledger: OracleLedger, F: FiniteSumFunction, i: int, x,
          order: int = 2, *, count: int = 1,
          requery: bool = False) -> Derivatives:
    """Charged oracle access to component i of F at x.

    Returns f_i(x) and derivatives up to ``order`` and charges the ledger.
    ``count > 1`` records `count` i.i.d. repetitions of the identical query
    (the answer is deterministic, so it is evaluated once); this keeps the
    accounting exact while letting batch samplers aggregate repeated draws.
    ``requery`` marks the charge as a snapshot-point re-read so the ledger
    can report both raw and cache-adjusted totals.
    """
    if order not in (0, 1, 2):
        raise ValueError(f"order must be in 0..2, got {order}")
    i = F.check_index(i)
    der = F.component(i, x, order)
    if der.hess is not None:
        # returned Hessians are symmetric by contract
        sym_matrix(der.hess)
    ledger.charge(i, order, count, requery=requery)
    return der


def record_iterate(ledger: OracleLedger, full_gradient_norm: float,
                   t: int | None = None) -> OracleLedger:
    """Record one produced iterate and its externally measured full-gradient
    norm; latches the first index at which the norm reached eps.

    The measurement itself consumes no oracle budget.  Idempotent after the
    first hit.
    """
    if t is None:
        t = ledger.iterates_recorded
    ledger.iterates_recorded = max(ledger.iterates_recorded, t + 1)
    if ledger.eps is not None and ledger.first_hit is None \
            and full_gradient_norm <= ledger.eps:
        ledger.first_hit = t
        ledger.first_hit_queries = ledger.total
    return ledger
