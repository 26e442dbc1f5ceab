"""Property checks: derivative correctness, the zero-chain property,
empirical smoothness constants, estimator deviation bounds, gradient floors
and suboptimality gaps.

Every check returns a small report object (JSON-serializable, stable field
order) rather than raising, so a battery run can aggregate pass/fail/skip
statuses.  All sampling is seed-deterministic, and sample streams are
prefix-extendable: growing the sample count keeps the earlier samples.

Relative errors throughout are ||a - b|| / max(1, ||a||): absolute near the
origin, relative at scale.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .chains import Derivatives, chain_eval, clamp_radius, hat_f_eval
from .instances.params import HardInstanceSpec
from .instances.randomized import RandomizedHardInstance
from .instances.resisting import ResistingCertificate, ResistingOracle
from .linalg import (as_rng, as_vector, finite_diff_gradient,
                     finite_diff_jacobian, sample_orthonormal_columns)
from .oracle import FiniteSumFunction, OracleLedger, quadratic_cosine_sum
from .optim import (SvrcParams, svrc_gradient_estimator,
                    svrc_hessian_estimator)

__all__ = [
    "DerivativeCheckReport",
    "ZeroChainReport",
    "SmoothnessReport",
    "EstimatorBoundsReport",
    "LargeGradientReport",
    "SuboptimalityReport",
    "BatteryCheck",
    "check_derivatives",
    "check_zero_chain",
    "estimate_smoothness",
    "verify_estimator_bounds",
    "verify_large_gradient",
    "verify_suboptimality",
    "default_ell_hat",
    "run_battery",
]


def _rel(diff_norm: float, ref_norm: float) -> float:
    return diff_norm / max(1.0, ref_norm)


# ---------------------------------------------------------------------------
# derivative checks


@dataclass(frozen=True)
class DerivativeCheckReport:
    passed: bool
    max_rel_err: float
    tol: float
    num_points: int
    worst: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"passed": self.passed, "max_rel_err": self.max_rel_err,
                "tol": self.tol, "num_points": self.num_points,
                "worst": dict(self.worst)}


def check_derivatives(F: FiniteSumFunction, num_points: int, tol: float,
                      seed=0) -> DerivativeCheckReport:
    """Analytic gradients/Hessians of every component against central
    differences at ``num_points`` random points per component.

    Gradients are differenced from values; Hessians are differenced from the
    analytic gradient (a value-based second difference would drown in noise
    wherever third derivatives are large, as they are for the chain bumps).
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    rng = as_rng(seed)
    scales = (0.25, 0.5, 1.0, 2.0)
    worst = {"rel_err": 0.0}
    checked = 0
    for t in range(num_points):
        x = rng.standard_normal(F.d) * scales[t % len(scales)]
        for i in range(F.n):
            der = F.component(i, x, order=2)
            g_fd = finite_diff_gradient(
                lambda z, i=i: F.component(i, z, order=0).value, x)
            e_g = _rel(np.linalg.norm(der.grad - g_fd),
                       np.linalg.norm(der.grad))
            H_fd = finite_diff_jacobian(
                lambda z, i=i: F.component(i, z, order=1).grad, x)
            e_h = _rel(np.linalg.norm(der.hess - H_fd),
                       np.linalg.norm(der.hess))
            err, which = max((e_g, "grad"), (e_h, "hess"))
            if err > worst["rel_err"]:
                worst = {"rel_err": float(err), "component": i,
                         "point_index": t, "which": which}
            checked += 1
    return DerivativeCheckReport(
        passed=bool(worst["rel_err"] <= tol),
        max_rel_err=float(worst["rel_err"]), tol=tol,
        num_points=num_points, worst=worst)


@dataclass(frozen=True)
class ZeroChainReport:
    passed: bool
    K: int
    num_samples: int
    checked: int
    skipped: int
    max_partial: float
    max_value_change: float

    def to_dict(self) -> dict:
        return {"passed": self.passed, "K": self.K,
                "num_samples": self.num_samples, "checked": self.checked,
                "skipped": self.skipped, "max_partial": self.max_partial,
                "max_value_change": self.max_value_change}


def check_zero_chain(K: int, num_samples: int, seed=0,
                     tol: float = 1e-12) -> ZeroChainReport:
    """One-coordinate-per-round discovery: if all coordinates from position m
    on are below 1/2 in magnitude, the chain has no partial derivative beyond
    position m+1 and zeroing everything beyond m+1 leaves the value unchanged.

    Trials whose sampled prefix covers the whole chain are vacuous and
    counted as skipped.
    """
    if K < 2:
        raise ValueError("K must be >= 2")
    rng = as_rng(seed)
    mask = np.ones(K)
    max_partial = 0.0
    max_change = 0.0
    checked = skipped = 0
    for _ in range(num_samples):
        m = int(rng.integers(0, K + 1))  # length of the "discovered" prefix
        x = rng.uniform(-0.45, 0.45, size=K)
        x[:m] = rng.uniform(-2.5, 2.5, size=m)
        if m >= K:
            skipped += 1
            continue
        der = chain_eval(K, mask, x, order=1)
        if m + 1 < K:
            max_partial = max(max_partial,
                              float(np.abs(der.grad[m + 1:]).max()))
        x_zeroed = x.copy()
        x_zeroed[m + 1:] = 0.0
        val_zeroed = chain_eval(K, mask, x_zeroed, order=0).value
        max_change = max(max_change, abs(der.value - val_zeroed))
        checked += 1
    return ZeroChainReport(
        passed=bool(max_partial <= tol and max_change <= tol),
        K=K, num_samples=num_samples, checked=checked, skipped=skipped,
        max_partial=max_partial, max_value_change=max_change)


# ---------------------------------------------------------------------------
# smoothness estimation

_SMOOTHNESS_MODES = ("individual", "mean-squared", "third-moment")
_PAIR_SCHEME = ("cycled kinds: global / local 1e-3 / local 1e-1 / local 1 / "
                "collinear ray / coordinate block")


@dataclass(frozen=True)
class SmoothnessReport:
    """Empirical smoothness constant: the max observed difference ratio.

    This is a lower bound on the true constant -- sampling can only exhibit,
    never certify.  Consumers that need an upper-bound-style default should
    apply a safety factor (see :func:`default_ell_hat`).
    """

    mode: str
    constant: float
    num_pairs: int
    scheme: str = _PAIR_SCHEME
    seed: int = 0

    def __post_init__(self):
        if self.mode not in _SMOOTHNESS_MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.constant < 0:
            raise ValueError("constant must be non-negative")

    def to_dict(self) -> dict:
        return {"mode": self.mode, "constant": self.constant,
                "num_pairs": self.num_pairs, "scheme": self.scheme,
                "seed": self.seed}


def _pair_stream(d: int, num_pairs: int, rng):
    """Deterministic, prefix-extendable (x, y) pairs mixing global draws,
    local perturbations at three length scales, far collinear ray pairs and
    coordinate-block perturbations."""
    kinds = ("global", "loc-3", "loc-1", "loc0", "ray", "block")
    for t in range(num_pairs):
        # draw the same fields every iteration so prefixes are stable
        base = rng.standard_normal(d) * 2.0
        other = rng.standard_normal(d) * 2.0
        u = rng.standard_normal(d)
        u /= np.linalg.norm(u)
        radius = rng.uniform(1.0, 8.0)
        start = int(rng.integers(0, d))
        width = int(2 ** rng.integers(0, max(1, int(math.log2(d)) + 1)))
        kind = kinds[t % len(kinds)]
        if kind == "global":
            yield base, other
        elif kind.startswith("loc"):
            dist = {"loc-3": 1e-3, "loc-1": 1e-1, "loc0": 1.0}[kind]
            yield base, base + dist * u
        elif kind == "ray":
            x = radius * u
            yield x, x + 0.5 * u
        else:  # block: perturb a contiguous window of coordinates
            delta = np.zeros(d)
            stop = min(d, start + width)
            delta[start:stop] = u[start:stop]
            nrm = np.linalg.norm(delta)
            if nrm == 0.0:
                delta[start % d] = 1.0
                nrm = 1.0
            yield base, base + 0.3 * delta / nrm


def _op_norm(A: np.ndarray) -> float:
    return float(np.abs(np.linalg.eigvalsh(0.5 * (A + A.T))).max())


def estimate_smoothness(F: FiniteSumFunction, mode: str, num_pairs: int,
                        seed=0) -> SmoothnessReport:
    """Max difference ratio over sampled pairs.

    individual:    max_i ||hess f_i(x) - hess f_i(y)|| / ||x - y||
    mean-squared:  sqrt(mean_i ||grad f_i(x) - grad f_i(y)||^2) / ||x - y||
    third-moment:  (mean_i ||hess f_i(x) - hess f_i(y)||^3)^(1/3) / ||x - y||

    Matrix norms are operator norms.  For a fixed seed the pair stream is
    prefix-extendable, so the estimate is monotone in ``num_pairs``.
    """
    if mode not in _SMOOTHNESS_MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if num_pairs < 1:
        raise ValueError("num_pairs must be >= 1")
    rng = as_rng(seed)
    order = 1 if mode == "mean-squared" else 2
    best = 0.0
    for x, y in _pair_stream(F.d, num_pairs, rng):
        dist = float(np.linalg.norm(x - y))
        if dist == 0.0:
            continue
        if mode == "mean-squared":
            acc = 0.0
            for i in range(F.n):
                dg = F.component(i, x, order).grad - F.component(i, y, order).grad
                acc += float(dg @ dg)
            ratio = math.sqrt(acc / F.n) / dist
        else:
            norms = np.empty(F.n)
            for i in range(F.n):
                dH = F.component(i, x, order).hess - F.component(i, y, order).hess
                norms[i] = _op_norm(dH)
            if mode == "individual":
                ratio = float(norms.max()) / dist
            else:
                ratio = float((norms ** 3).mean()) ** (1.0 / 3.0) / dist
        best = max(best, ratio)
    return SmoothnessReport(mode=mode, constant=best, num_pairs=num_pairs,
                            seed=int(seed) if isinstance(seed, int) else 0)


@lru_cache(maxsize=8)
def default_ell_hat(p: int) -> float:
    """Empirical smoothness constant of the unscaled clamped-chain block,
    times a 1.5 safety factor.

    The underlying analysis never makes this constant explicit (only the
    un-clamped chain's enormous closed-form bound), so instance scalings
    default to this estimate.  Probe: a fixed single-component instance with
    K = 2, measured over a fixed pair stream.
    """
    if p not in (1, 2):
        raise ValueError("ell_hat estimation supports p in {1, 2}; "
                         "pass ell_hat explicitly for higher orders")
    spec = HardInstanceSpec(mode="randomized-individual", p=p, n=1,
                            Delta=1.0, L=1.0, eps=1.0, lam=1.0, sigma=1.0,
                            K=2, d=2, ell=1.0)
    B = sample_orthonormal_columns(2, 2, seed=20240817)
    probe = RandomizedHardInstance(spec, B, scaled=False)
    mode = "mean-squared" if p == 1 else "individual"
    report = estimate_smoothness(probe, mode, num_pairs=300, seed=20240817)
    return 1.5 * report.constant


# ---------------------------------------------------------------------------
# estimator deviation bounds


@dataclass(frozen=True)
class EstimatorBoundsReport:
    passed: bool
    trials: int
    dist: float
    L2_hat: float
    grad_mean: float
    grad_bound: float
    grad_pass: bool
    hess_mean: float
    hess_bound: float
    hess_pass: bool
    slack: float
    premise_ok: bool
    cross_check_rel_err: float

    def to_dict(self) -> dict:
        return {"passed": self.passed, "trials": self.trials,
                "dist": self.dist, "L2_hat": self.L2_hat,
                "grad_mean": self.grad_mean, "grad_bound": self.grad_bound,
                "grad_pass": self.grad_pass, "hess_mean": self.hess_mean,
                "hess_bound": self.hess_bound, "hess_pass": self.hess_pass,
                "slack": self.slack, "premise_ok": self.premise_ok,
                "cross_check_rel_err": self.cross_check_rel_err}


def verify_estimator_bounds(instance: FiniteSumFunction, x_hat, x,
                            params: SvrcParams, trials: int, seed=0,
                            L2_hat: float | None = None,
                            slack: float = 0.1) -> EstimatorBoundsReport:
    """Monte-Carlo means of the estimator deviations against their bounds:

    E ||grad F(x) - v||^(3/2)  <=  2 L2^(3/2) b_g^(-3/4) ||x - xh||^3
    E ||hess F(x) - U||^3      <=  15000 L2^3 (log d / b_h)^(3/2) ||x - xh||^3

    Pass iff each mean is at most bound * (1 + slack).  The Hessian bound's
    premise (b_h >= 12000 log^3 d) is reported, not enforced.  A handful of
    trials are cross-checked against the real estimator code path; the bulk
    runs through a vectorized equivalent.
    """
    if trials < 1000:
        raise ValueError("trials must be at least 10^3")
    n, d = instance.n, instance.d
    x = as_vector(x, dim=d)
    x_hat = as_vector(x_hat, dim=d)
    if L2_hat is None:
        L2_hat = estimate_smoothness(instance, "individual", 150,
                                     seed=int(seed) + 1 if isinstance(seed, int) else 1
                                     ).constant
    rng = as_rng(seed)
    dist = float(np.linalg.norm(x - x_hat))

    # per-component tables (evaluated once; the MC only re-weights them)
    G_x = np.empty((n, d)); G_h = np.empty((n, d))
    H_x = np.empty((n, d, d)); H_h = np.empty((n, d, d))
    for i in range(n):
        a = instance.component(i, x, 2)
        b = instance.component(i, x_hat, 2)
        G_x[i], H_x[i] = a.grad, a.hess
        G_h[i], H_h[i] = b.grad, b.hess
    gF, HF = G_x.mean(axis=0), H_x.mean(axis=0)
    g_s, H_s = G_h.mean(axis=0), H_h.mean(axis=0)
    dx = x - x_hat
    dG = G_x - G_h                       # (n, d)
    Hdx = H_h @ dx                       # (n, d)
    dH = H_x - H_h                       # (n, d, d)

    def grad_dev(counts: np.ndarray) -> float:
        v = (counts @ dG) / params.b_g + g_s \
            - ((counts @ Hdx) / params.b_g - H_s @ dx)
        return float(np.linalg.norm(gF - v))

    def hess_dev(counts: np.ndarray) -> float:
        U = np.tensordot(counts, dH, axes=1) / params.b_h + H_s
        return _op_norm(HF - U)

    g_moments = np.empty(trials)
    h_moments = np.empty(trials)
    cross_err = 0.0
    n_cross = min(8, trials)
    for t in range(trials):
        if params.full_batch:
            idx_g = np.arange(n, dtype=np.int64)
            idx_h = np.arange(n, dtype=np.int64)
            cg = np.ones(n); ch = np.ones(n)
            # full batch means b = n regardless of params
            v = dG.mean(axis=0) + g_s - (Hdx.mean(axis=0) - H_s @ dx)
            g_moments[t] = float(np.linalg.norm(gF - v)) ** 1.5
            h_moments[t] = _op_norm(HF - (dH.mean(axis=0) + H_s)) ** 3
        else:
            idx_g = rng.integers(0, n, size=params.b_g)
            idx_h = rng.integers(0, n, size=params.b_h)
            cg = np.bincount(idx_g, minlength=n).astype(float)
            ch = np.bincount(idx_h, minlength=n).astype(float)
            g_moments[t] = grad_dev(cg) ** 1.5
            h_moments[t] = hess_dev(ch) ** 3
        if t < n_cross:
            led = OracleLedger(n=n)
            v_ref = svrc_gradient_estimator(instance, led, x, x_hat,
                                            g_s, H_s, idx_g)
            U_ref = svrc_hessian_estimator(instance, led, x, x_hat,
                                           H_s, idx_h)
            dev_g, dev_h = g_moments[t], h_moments[t]
            cross_err = max(
                cross_err,
                _rel(abs(float(np.linalg.norm(gF - v_ref)) ** 1.5 - dev_g),
                     abs(dev_g)),
                _rel(abs(_op_norm(HF - U_ref) ** 3 - dev_h), abs(dev_h)))

    grad_bound = 2.0 * L2_hat ** 1.5 * params.b_g ** -0.75 * dist ** 3
    hess_bound = 15000.0 * L2_hat ** 3 \
        * (math.log(d) / params.b_h) ** 1.5 * dist ** 3
    if params.full_batch:
        grad_bound = 2.0 * L2_hat ** 1.5 * n ** -0.75 * dist ** 3
        hess_bound = 15000.0 * L2_hat ** 3 * (math.log(d) / n) ** 1.5 * dist ** 3
    grad_mean = float(g_moments.mean())
    hess_mean = float(h_moments.mean())
    grad_pass = grad_mean <= grad_bound * (1.0 + slack)
    hess_pass = hess_mean <= hess_bound * (1.0 + slack)
    premise_ok = params.b_h >= 12000.0 * math.log(d) ** 3
    return EstimatorBoundsReport(
        passed=bool(grad_pass and hess_pass and cross_err <= 1e-9),
        trials=trials, dist=dist, L2_hat=float(L2_hat),
        grad_mean=grad_mean, grad_bound=float(grad_bound),
        grad_pass=bool(grad_pass), hess_mean=hess_mean,
        hess_bound=float(hess_bound), hess_pass=bool(hess_pass),
        slack=slack, premise_ok=bool(premise_ok),
        cross_check_rel_err=float(cross_err))


# ---------------------------------------------------------------------------
# gradient floors and suboptimality


@dataclass(frozen=True)
class LargeGradientReport:
    passed: bool
    kind: str
    bound: float
    min_grad_norm: float
    num_points: int
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"passed": self.passed, "kind": self.kind, "bound": self.bound,
                "min_grad_norm": self.min_grad_norm,
                "num_points": self.num_points, "details": dict(self.details)}


def verify_large_gradient(subject, seed=0) -> LargeGradientReport:
    """Gradient floor of the hard construction.

    For a randomized instance: in unscaled units, the full gradient norm
    exceeds 1/(4 sqrt(n)) at the origin and at any point supported on
    already-discovered columns (block inner products with undiscovered
    columns are then exactly zero, keeping every chain unfinished).

    For the adaptive game, delegates to the adversary's own certificate
    (the bound there is lam * sigma^p / 4 in scaled units).
    """
    if isinstance(subject, ResistingOracle):
        subject = subject.certificate()
    if isinstance(subject, ResistingCertificate):
        cert = subject
        return LargeGradientReport(
            passed=cert.passed, kind="resisting-certificate",
            bound=cert.bound, min_grad_norm=cert.min_grad_norm,
            num_points=cert.num_queries, details=cert.to_dict())
    if not isinstance(subject, RandomizedHardInstance):
        raise TypeError("expected a RandomizedHardInstance, ResistingOracle "
                        "or ResistingCertificate")
    inst = subject.unscaled_view()
    spec = inst.spec
    n, K, m = spec.n, spec.K, inst.d // spec.n
    bound = 1.0 / (4.0 * math.sqrt(n))
    rng = as_rng(seed)
    points = [np.zeros(inst.d)]
    for prefix in range(K):
        for scale in (0.5, 2.0, 8.0):
            x = np.zeros(inst.d)
            for i in range(n):
                if prefix == 0:
                    break
                w = rng.standard_normal(prefix)
                w *= scale / np.linalg.norm(w)
                slot = inst.B.columns[:, i * K:i * K + prefix] @ w
                if inst.C is None:
                    x[i * m:(i + 1) * m] = slot
                else:
                    x += inst.C.columns[:, i * m:(i + 1) * m] @ slot
            points.append(x)
            if prefix == 0:
                break
    norms = [float(np.linalg.norm(inst.full(x, 1).grad)) for x in points]
    min_norm = min(norms)
    return LargeGradientReport(
        passed=bool(min_norm > bound), kind="randomized-instance",
        bound=bound, min_grad_norm=min_norm, num_points=len(points),
        details={"n": n, "K": K})


@dataclass(frozen=True)
class SuboptimalityReport:
    passed: bool
    f_origin: float
    best_found: float
    gap: float
    bound: float
    num_starts: int

    def to_dict(self) -> dict:
        return {"passed": self.passed, "f_origin": self.f_origin,
                "best_found": self.best_found, "gap": self.gap,
                "bound": self.bound, "num_starts": self.num_starts}


def _gd_backtracking(F: FiniteSumFunction, x0: np.ndarray,
                     iters: int = 200) -> float:
    x = x0.copy()
    der = F.full(x, 1)
    f_val, g = der.value, der.grad
    for _ in range(iters):
        gnorm2 = float(g @ g)
        if gnorm2 < 1e-18:
            break
        step = 1.0
        for _ in range(40):
            cand = x - step * g
            f_new = F.full(cand, 0).value
            if f_new <= f_val - 1e-4 * step * gnorm2:
                break
            step *= 0.5
        else:
            break
        x = x - step * g
        der = F.full(x, 1)
        f_val, g = der.value, der.grad
    return f_val


def verify_suboptimality(instance: RandomizedHardInstance,
                         num_starts: int = 100, gd_iters: int = 200,
                         seed=0) -> SuboptimalityReport:
    """One-sided check of the chain's bounded optimality gap: in unscaled
    units, f(0) minus the best multistart local-search value is at most 12K.

    Multistart gradient descent with backtracking is only an inf *upper*
    bound oracle, so the check can never spuriously fail on the inf side;
    it fails only if f(0) - inf genuinely exceeds the bound.
    """
    inst = instance.unscaled_view()
    rng = as_rng(seed)
    f0 = inst.full(np.zeros(inst.d), 0).value
    best = f0
    scales = (0.5, 2.0, 5.0)
    for s in range(num_starts):
        x0 = rng.standard_normal(inst.d) * scales[s % len(scales)]
        best = min(best, _gd_backtracking(inst, x0, iters=gd_iters))
    best = min(best, _gd_backtracking(inst, np.zeros(inst.d), iters=gd_iters))
    gap = f0 - best
    bound = 12.0 * inst.spec.K
    return SuboptimalityReport(passed=bool(gap <= bound + 1e-9),
                               f_origin=float(f0), best_found=float(best),
                               gap=float(gap), bound=bound,
                               num_starts=num_starts)


# ---------------------------------------------------------------------------
# the battery


@dataclass(frozen=True)
class BatteryCheck:
    name: str
    status: str  # "passed" | "failed" | "skipped"
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"name": self.name, "status": self.status,
                "details": dict(self.details)}


def _status(passed: bool) -> str:
    return "passed" if passed else "failed"


def _chain_component(K: int):
    mask = np.ones(K)

    def f(x, order=2):
        return chain_eval(K, mask, x, order)
    return f


def _hat_component(K: int, m: int, seed: int):
    B = sample_orthonormal_columns(m, K, seed=seed)
    R = clamp_radius(K)

    def f(y, order=2):
        return hat_f_eval(K, B, y, order, R=R)
    return f


def run_battery(num_points: int = 60, zero_chain_samples: int = 500,
                pairs: int = 120, trials: int = 2000, starts: int = 20,
                seed: int = 0) -> list[BatteryCheck]:
    """The default desk-scale verification battery.

    Any sample count set to zero skips the corresponding check.  The result
    is a list of named checks with statuses; a run passes iff no check
    failed (skips are allowed).
    """
    from .oracle import CallableFiniteSum  # local import keeps module order

    checks: list[BatteryCheck] = []

    if num_points <= 0:
        checks.append(BatteryCheck("check_derivatives", "skipped"))
    else:
        synth = quadratic_cosine_sum(4, 6, seed=seed)
        rep = check_derivatives(synth, num_points, 1e-6, seed=seed)
        checks.append(BatteryCheck("check_derivatives",
                                   _status(rep.passed), rep.to_dict()))
        chain = CallableFiniteSum([_chain_component(4)], d=4)
        rep = check_derivatives(chain, num_points, 1e-6, seed=seed + 1)
        checks.append(BatteryCheck("check_derivatives_chain",
                                   _status(rep.passed), rep.to_dict()))
        comp = CallableFiniteSum([_hat_component(3, 12, seed=seed + 2)], d=12)
        rep = check_derivatives(comp, num_points, 1e-6, seed=seed + 2)
        checks.append(BatteryCheck("check_derivatives_composite",
                                   _status(rep.passed), rep.to_dict()))

    for K in (2, 4, 8):
        name = f"check_zero_chain_K{K}"
        if zero_chain_samples <= 0:
            checks.append(BatteryCheck(name, "skipped"))
        else:
            rep = check_zero_chain(K, zero_chain_samples, seed=seed)
            checks.append(BatteryCheck(name, _status(rep.passed),
                                       rep.to_dict()))

    if pairs <= 0:
        checks.append(BatteryCheck("smoothness_power_mean", "skipped"))
    else:
        synth = quadratic_cosine_sum(8, 6, seed=seed + 3)
        ind = estimate_smoothness(synth, "individual", pairs, seed=seed)
        third = estimate_smoothness(synth, "third-moment", pairs, seed=seed)
        ok = third.constant <= ind.constant * (1 + 1e-12)
        checks.append(BatteryCheck(
            "smoothness_power_mean", _status(ok),
            {"individual": ind.constant, "third_moment": third.constant}))

    if trials <= 0:
        checks.append(BatteryCheck("estimator_bounds", "skipped"))
    else:
        inst = quadratic_cosine_sum(64, 8, seed=seed + 4)
        params = SvrcParams(M=1.0, b_g=16, b_h=64, S=1, T=1, eps=1.0,
                            Delta=1.0, L2=1.0, seed=seed)
        rng = as_rng(seed + 5)
        x_hat = rng.standard_normal(8)
        x = x_hat + 0.5 * rng.standard_normal(8)
        rep = verify_estimator_bounds(inst, x_hat, x, params,
                                      max(1000, trials), seed=seed)
        checks.append(BatteryCheck("estimator_bounds",
                                   _status(rep.passed), rep.to_dict()))

    if starts <= 0:
        checks.append(BatteryCheck("large_gradient", "skipped"))
        checks.append(BatteryCheck("suboptimality", "skipped"))
    else:
        from .instances import randomized_params, sample_randomized_instance
        ell_hat = default_ell_hat(2)
        K_target, n, eps = 3, 4, 0.25
        Delta = (K_target + 0.5) * 192.0 * math.sqrt(ell_hat) \
            * n ** 0.75 * eps ** 1.5
        spec = randomized_params("randomized-individual", p=2, n=n,
                                 Delta=Delta, L=1.0, eps=eps,
                                 ell_hat=ell_hat)
        inst = sample_randomized_instance(spec, seed=seed + 6)
        rep = verify_large_gradient(inst, seed=seed + 7)
        checks.append(BatteryCheck("large_gradient", _status(rep.passed),
                                   rep.to_dict()))
        rep2 = verify_suboptimality(inst, num_starts=starts, seed=seed + 8)
        checks.append(BatteryCheck("suboptimality", _status(rep2.passed),
                                   rep2.to_dict()))

    return checks
