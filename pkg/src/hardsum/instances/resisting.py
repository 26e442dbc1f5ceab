"""The adaptive adversary for deterministic algorithms.

The adversary answers component queries with a *truncated* chain function
whose active terms only involve directions it has already committed to.
Play proceeds in rounds: a round ends once queries have touched ceil(n/2)
distinct component indices, at which point the adversary (a) marks the
components that were *not* queried this round as carrying the round's chain
term and (b) commits a fresh unit direction drawn orthogonal to every
direction committed so far *and* to every iterate archived so far.  Because
each response only ever depends on directions committed before the current
round, the finalized function reproduces every answer given during the game,
and the last committed direction is orthogonal to the entire query history.

After the final round the game is over; the function is frozen at its
finalized form and keeps answering consistently (queries are no longer
archived -- there is nothing left to certify about them).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..chains import Derivatives, chain_eval
from ..linalg import as_rng, as_vector
from ..oracle import FiniteSumFunction
from .params import HardInstanceSpec

__all__ = ["ResistingOracle", "ResistingCertificate", "NotFinalizedError"]

_ORTHO_TOL = 1e-10


class NotFinalizedError(RuntimeError):
    """Raised when a certificate is requested from an unfinished game."""


@dataclass
class _ArchivedQuery:
    t: int
    i: int
    x: np.ndarray
    order: int
    response: Derivatives
    round: int


@dataclass(frozen=True)
class ResistingCertificate:
    """Post-game audit of the adversary's play.

    For every archived query: the inner product of the iterate with the last
    committed direction, the finalized full-gradient norm at the iterate
    (against the lower bound lam * sigma^p / 4), and the worst relative
    deviation between the recorded response and a replay against the
    finalized function.  An empty game certifies vacuously.
    """

    num_queries: int
    rounds_closed: int
    bound: float
    inner_products: np.ndarray = field(repr=False)
    grad_norms: np.ndarray = field(repr=False)
    max_inner_product: float
    min_grad_norm: float
    all_orthogonal: bool
    all_above_bound: bool
    max_replay_rel_err: float
    replay_consistent: bool

    @property
    def passed(self) -> bool:
        return self.all_orthogonal and self.all_above_bound and self.replay_consistent

    def to_dict(self) -> dict:
        return {
            "num_queries": self.num_queries,
            "rounds_closed": self.rounds_closed,
            "bound": self.bound,
            "max_inner_product": self.max_inner_product,
            "min_grad_norm": self.min_grad_norm,
            "all_orthogonal": self.all_orthogonal,
            "all_above_bound": self.all_above_bound,
            "max_replay_rel_err": self.max_replay_rel_err,
            "replay_consistent": self.replay_consistent,
            "passed": self.passed,
        }


class ResistingOracle(FiniteSumFunction):
    """Stateful adversary; also usable directly as a finite-sum objective.

    ``component`` answers *and* advances the game, so a single oracle
    instance serves exactly one algorithm run.  ``full`` is the measurement
    side channel: it averages the current (truncated or finalized) responses
    without archiving anything or advancing rounds.
    """

    def __init__(self, spec: HardInstanceSpec, seed):
        if spec.mode != "deterministic":
            raise ValueError("ResistingOracle requires a deterministic-mode spec")
        self.spec = spec
        self.n = spec.n
        self.d = spec.d
        self._K = spec.K
        if self.d < self._K + 1:
            raise ValueError("d must be at least K + 1")
        self._rng = as_rng(seed)
        self._half = math.ceil(self.n / 2)

        self._V = np.zeros((self.d, self._K + 1))
        self._delta = np.zeros((self.n, self._K + 1))
        self._delta[: self._half, 0] = 1.0

        # orthonormal basis of span(committed directions + archived iterates)
        self._basis = np.zeros((self.d, self.d))
        self._nbasis = 0

        self._round = 2
        self._rounds_closed = 0
        self._round_seen: set[int] = set()
        self._archive: list[_ArchivedQuery] = []
        self.finalized = False

        self._V[:, 0] = self._draw_direction()

    # -- orthonormal bookkeeping ------------------------------------------

    def _project_out(self, x: np.ndarray) -> np.ndarray:
        r = x.astype(float, copy=True)
        B = self._basis[:, : self._nbasis]
        for _ in range(2):  # re-orthogonalize once for ~machine orthogonality
            if self._nbasis:
                r -= B @ (B.T @ r)
        return r

    def _insert_basis(self, x: np.ndarray) -> None:
        nx = np.linalg.norm(x)
        if nx == 0.0:
            return
        r = self._project_out(x)
        nr = np.linalg.norm(r)
        if nr > 1e-12 * nx:
            if self._nbasis >= self.d:
                raise RuntimeError(
                    "adversary ran out of dimensions while archiving an "
                    "iterate; rebuild the instance with a larger budget/d")
            self._basis[:, self._nbasis] = r / nr
            self._nbasis += 1

    def _draw_direction(self) -> np.ndarray:
        if self._nbasis >= self.d:
            raise RuntimeError(
                "orthogonal complement exhausted: every dimension is pinned "
                "by committed directions or archived iterates; rebuild the "
                "instance with a larger query budget (hence larger d)")
        for _ in range(8):
            g = self._rng.standard_normal(self.d)
            r = self._project_out(g)
            nr = np.linalg.norm(r)
            if nr > 1e-8 * np.linalg.norm(g):
                v = r / nr
                self._basis[:, self._nbasis] = v
                self._nbasis += 1
                return v
        raise RuntimeError("failed to draw a direction in the orthogonal "
                           "complement (d too small for the query volume)")

    # -- the masked, scaled chain ------------------------------------------

    def _masked_component(self, i: int, x: np.ndarray, order: int,
                          active: int) -> Derivatives:
        """Scaled chain response using the first ``active`` directions."""
        spec = self.spec
        Vk = self._V[:, :active]
        w = (Vk.T @ x) / spec.sigma
        ch = chain_eval(active, self._delta[i, :active], w, order)
        p = spec.p
        a = spec.lam * spec.sigma ** (p + 1)
        val = a * ch.value
        if order == 0:
            return Derivatives(val)
        grad = (a / spec.sigma) * (Vk @ ch.grad)
        if order == 1:
            return Derivatives(val, grad)
        hess = (a / spec.sigma ** 2) * (Vk @ ch.hess @ Vk.T)
        return Derivatives(val, grad, hess)

    # -- game play -----------------------------------------------------------

    def component(self, i: int, x, order: int = 2) -> Derivatives:
        i = self.check_index(i)
        x = as_vector(x, dim=self.d)
        if self.finalized:
            return self._masked_component(i, x, order, self._K + 1)

        r = self._round
        der = self._masked_component(i, x, order, r - 1)
        self._archive.append(_ArchivedQuery(len(self._archive), i,
                                            x.copy(), order, der, r))
        self._insert_basis(x)
        if i not in self._round_seen:
            self._round_seen.add(i)
            if len(self._round_seen) == self._half:
                self._close_round()
        return der

    def _close_round(self) -> None:
        r = self._round
        unqueried = np.ones(self.n, dtype=bool)
        unqueried[list(self._round_seen)] = False
        self._delta[unqueried, r - 1] = 1.0
        self._V[:, r - 1] = self._draw_direction()
        self._rounds_closed += 1
        self._round_seen = set()
        if r == self._K + 1:
            self.finalized = True
        else:
            self._round = r + 1

    def finalize(self) -> None:
        """Force-close all remaining rounds (e.g. after an early stop).

        Rounds never played mark every component and commit directions
        orthogonal to the whole archive, so the certificate's guarantees
        hold for whatever prefix of the game was actually played.
        """
        while not self.finalized:
            self._close_round()

    def full(self, x, order: int = 1) -> Derivatives:
        """Measurement side channel; never archives or advances the game.

        During play this reflects the current truncated responses (what the
        algorithm could reconstruct); after finalization it is the true
        finalized objective.
        """
        x = as_vector(x, dim=self.d)
        active = self._K + 1 if self.finalized else self._round - 1
        val, grad, hess = 0.0, None, None
        if order >= 1:
            grad = np.zeros(self.d)
        if order >= 2:
            hess = np.zeros((self.d, self.d))
        for i in range(self.n):
            der = self._masked_component(i, x, order, active)
            val += der.value
            if order >= 1:
                grad += der.grad
            if order >= 2:
                hess += der.hess
        n = float(self.n)
        return Derivatives(val / n,
                           None if grad is None else grad / n,
                           None if hess is None else hess / n)

    @property
    def rounds_closed(self) -> int:
        return self._rounds_closed

    @property
    def num_archived(self) -> int:
        return len(self._archive)

    @property
    def directions(self) -> np.ndarray:
        """The committed direction matrix (columns committed so far)."""
        return self._V.copy()

    # -- certification ------------------------------------------------------

    def certificate(self, tol: float = _ORTHO_TOL) -> ResistingCertificate:
        if not self.finalized:
            raise NotFinalizedError(
                "certificate requested before the game was finalized")
        spec = self.spec
        bound = spec.lam * spec.sigma ** spec.p / 4.0
        v_last = self._V[:, self._K]

        inner, gnorms = [], []
        max_replay = 0.0
        for rec in self._archive:
            inner.append(abs(float(v_last @ rec.x)))
            gnorms.append(float(np.linalg.norm(self.full(rec.x, order=1).grad)))
            replay = self._masked_component(rec.i, rec.x, rec.order, self._K + 1)
            err = abs(replay.value - rec.response.value) / max(1.0, abs(replay.value))
            if rec.order >= 1:
                err = max(err, np.linalg.norm(replay.grad - rec.response.grad)
                          / max(1.0, np.linalg.norm(replay.grad)))
            if rec.order >= 2:
                err = max(err, np.linalg.norm(replay.hess - rec.response.hess)
                          / max(1.0, np.linalg.norm(replay.hess)))
            max_replay = max(max_replay, float(err))

        inner = np.asarray(inner)
        gnorms = np.asarray(gnorms)
        empty = len(self._archive) == 0
        return ResistingCertificate(
            num_queries=len(self._archive),
            rounds_closed=self._rounds_closed,
            bound=bound,
            inner_products=inner,
            grad_norms=gnorms,
            max_inner_product=0.0 if empty else float(inner.max()),
            min_grad_norm=math.inf if empty else float(gnorms.min()),
            all_orthogonal=bool(empty or inner.max() <= tol),
            all_above_bound=bool(empty or gnorms.min() > bound),
            max_replay_rel_err=max_replay,
            replay_consistent=bool(max_replay <= tol),
        )
