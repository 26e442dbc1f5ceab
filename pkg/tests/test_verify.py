import math

import numpy as np
import pytest

import hardsum.chains
from hardsum.chains import Derivatives, chain_eval
from hardsum.instances import (
    ResistingOracle,
    deterministic_params,
    ell_p,
    randomized_params,
    sample_randomized_instance,
)
from hardsum.oracle import CallableFiniteSum, quadratic_cosine_sum
from hardsum.optim import SvrcParams
from hardsum.verify import (
    SmoothnessReport,
    check_derivatives,
    check_zero_chain,
    default_ell_hat,
    estimate_smoothness,
    run_battery,
    verify_estimator_bounds,
    verify_large_gradient,
    verify_suboptimality,
)


def _cubic_norm_component(c):
    """f(x) = (c/6)|x|^3 -- its Hessian is Lipschitz with constant exactly c,
    attained by collinear pairs at any radius."""
    def f(x, order=2):
        r = float(np.linalg.norm(x))
        v = c / 6.0 * r ** 3
        if order == 0:
            return Derivatives(v)
        g = 0.5 * c * r * x
        if order == 1:
            return Derivatives(v, g)
        if r == 0.0:
            return Derivatives(v, g, np.zeros((x.size, x.size)))
        H = 0.5 * c * (r * np.eye(x.size) + np.outer(x, x) / r)
        return Derivatives(v, g, H)
    return f


def _linear_component(r_vec):
    def f(x, order=2):
        v = float(r_vec @ x)
        if order == 0:
            return Derivatives(v)
        if order == 1:
            return Derivatives(v, r_vec.copy())
        return Derivatives(v, r_vec.copy(), np.zeros((x.size, x.size)))
    return f


class TestCheckDerivatives:
    def test_passes_on_synthetic(self):
        F = quadratic_cosine_sum(3, 4, seed=0)
        rep = check_derivatives(F, num_points=10, tol=1e-6, seed=1)
        assert rep.passed
        assert rep.max_rel_err <= 1e-6

    def test_catches_wrong_gradient(self):
        def broken(x, order=2):
            v = 0.5 * float(x @ x)
            g = 1.05 * x                       # 5% gradient error
            return Derivatives(v, g if order >= 1 else None,
                               np.eye(x.size) if order >= 2 else None)
        F = CallableFiniteSum([broken], d=3)
        rep = check_derivatives(F, num_points=5, tol=1e-6, seed=0)
        assert not rep.passed
        assert rep.max_rel_err > 0.01

    def test_catches_wrong_hessian(self):
        def broken(x, order=2):
            v = 0.5 * float(x @ x)
            return Derivatives(v, x.copy() if order >= 1 else None,
                               1.1 * np.eye(x.size) if order >= 2 else None)
        F = CallableFiniteSum([broken], d=3)
        rep = check_derivatives(F, num_points=5, tol=1e-6, seed=0)
        assert not rep.passed
        assert rep.worst["which"] == "hess"

    def test_report_serializes(self):
        F = quadratic_cosine_sum(2, 3, seed=0)
        d = check_derivatives(F, num_points=2, tol=1e-6).to_dict()
        assert set(d) == {"passed", "max_rel_err", "tol", "num_points", "worst"}

    def test_rejects_bad_tol(self):
        F = quadratic_cosine_sum(2, 3, seed=0)
        with pytest.raises(ValueError):
            check_derivatives(F, num_points=2, tol=0.0)


class TestZeroChain:
    @pytest.mark.parametrize("K", [2, 4, 8])
    def test_passes(self, K):
        rep = check_zero_chain(K, num_samples=300, seed=0)
        assert rep.passed
        assert rep.checked + rep.skipped == 300
        assert rep.max_partial <= 1e-12
        assert rep.max_value_change <= 1e-12

    def test_concrete_point(self):
        # coordinates 3.. are small, so no partial beyond index 2 (0-based)
        K = 5
        x = np.array([2.0, 1.7, 0.3, 0.2, -0.4])
        g = chain_eval(K, np.ones(K), x, 1).grad
        assert np.abs(g[3:]).max() == 0.0
        x2 = x.copy()
        x2[3:] = 0.0
        assert chain_eval(K, np.ones(K), x2, 0).value == \
            chain_eval(K, np.ones(K), x, 0).value

    def test_rejects_small_k(self):
        with pytest.raises(ValueError):
            check_zero_chain(1, 10)


class TestSmoothnessEstimation:
    def test_zero_for_quadratics_in_hessian_modes(self):
        # constant Hessians: second-order smoothness constant is exactly 0
        rng = np.random.default_rng(0)
        comps = []
        for _ in range(3):
            G = rng.standard_normal((4, 4))
            A = G @ G.T

            def f(x, order=2, A=A):
                v = 0.5 * float(x @ (A @ x))
                return Derivatives(v, A @ x if order >= 1 else None,
                                   A.copy() if order >= 2 else None)
            comps.append(f)
        F = CallableFiniteSum(comps, d=4)
        assert estimate_smoothness(F, "individual", 30).constant == 0.0
        assert estimate_smoothness(F, "third-moment", 30).constant == 0.0
        assert estimate_smoothness(F, "mean-squared", 30).constant > 0.0

    def test_zero_for_linear_in_gradient_mode(self, rng):
        F = CallableFiniteSum(
            [_linear_component(rng.standard_normal(4)) for _ in range(3)], d=4)
        assert estimate_smoothness(F, "mean-squared", 30).constant == 0.0

    def test_recovers_known_constant_exactly(self):
        # individual mode on (c_i/6)|x|^3 components: constant = max c_i,
        # attained by the collinear ray pairs in the stream
        cs = [0.5, 2.0, 1.0]
        F = CallableFiniteSum([_cubic_norm_component(c) for c in cs], d=5)
        rep = estimate_smoothness(F, "individual", 60, seed=3)
        assert rep.constant == pytest.approx(max(cs), rel=1e-9)

    def test_third_moment_power_mean_value(self):
        cs = [0.5, 2.0, 1.0]
        F = CallableFiniteSum([_cubic_norm_component(c) for c in cs], d=5)
        rep = estimate_smoothness(F, "third-moment", 60, seed=3)
        expected = (np.mean([c ** 3 for c in cs])) ** (1.0 / 3.0)
        assert rep.constant == pytest.approx(expected, rel=1e-9)

    def test_third_moment_below_individual(self):
        F = quadratic_cosine_sum(6, 5, seed=9)
        ind = estimate_smoothness(F, "individual", 48, seed=2).constant
        third = estimate_smoothness(F, "third-moment", 48, seed=2).constant
        assert third <= ind * (1 + 1e-12)

    def test_monotone_in_pairs(self):
        F = quadratic_cosine_sum(4, 5, seed=11)
        small = estimate_smoothness(F, "individual", 24, seed=5).constant
        large = estimate_smoothness(F, "individual", 96, seed=5).constant
        assert large >= small

    def test_validation(self):
        F = quadratic_cosine_sum(2, 3, seed=0)
        with pytest.raises(ValueError, match="mode"):
            estimate_smoothness(F, "max", 10)
        with pytest.raises(ValueError):
            estimate_smoothness(F, "individual", 0)
        with pytest.raises(ValueError):
            SmoothnessReport(mode="individual", constant=-1.0, num_pairs=1)


class TestDefaultEllHat:
    def test_frozen_values(self):
        assert default_ell_hat(1) == pytest.approx(184.7931992859211, rel=1e-6)
        assert default_ell_hat(2) == pytest.approx(1041.2881460955848, rel=1e-6)

    def test_cached(self):
        assert default_ell_hat(2) is not None
        info = default_ell_hat.cache_info()
        default_ell_hat(2)
        assert default_ell_hat.cache_info().hits > info.hits

    def test_unsupported_order(self):
        with pytest.raises(ValueError, match="ell_hat"):
            default_ell_hat(3)


class TestEstimatorBounds:
    def _params(self, b_g=8, b_h=32, full_batch=False):
        return SvrcParams(M=1.0, b_g=b_g, b_h=b_h, S=1, T=1, eps=1.0,
                          Delta=1.0, L2=1.0, full_batch=full_batch)

    def test_monte_carlo_passes(self, rng):
        F = quadratic_cosine_sum(16, 5, seed=1)
        x_hat = rng.standard_normal(5)
        x = x_hat + 0.4 * rng.standard_normal(5)
        rep = verify_estimator_bounds(F, x_hat, x, self._params(),
                                      trials=1000, seed=2)
        assert rep.passed
        assert rep.cross_check_rel_err <= 1e-9
        assert rep.grad_mean <= rep.grad_bound * 1.1
        assert rep.hess_mean <= rep.hess_bound * 1.1

    def test_zero_distance_is_exact(self, rng):
        F = quadratic_cosine_sum(8, 4, seed=3)
        x = rng.standard_normal(4)
        rep = verify_estimator_bounds(F, x, x, self._params(), trials=1000)
        assert rep.dist == 0.0
        assert rep.grad_mean == 0.0 and rep.hess_mean == 0.0
        assert rep.passed

    def test_full_batch_deviations_vanish(self, rng):
        F = quadratic_cosine_sum(8, 4, seed=4)
        x_hat = rng.standard_normal(4)
        x = x_hat + 0.3 * rng.standard_normal(4)
        rep = verify_estimator_bounds(F, x_hat, x,
                                      self._params(full_batch=True),
                                      trials=1000)
        assert rep.grad_mean <= 1e-20
        assert rep.passed

    def test_premise_flag(self, rng):
        F = quadratic_cosine_sum(8, 4, seed=5)
        x = rng.standard_normal(4)
        rep = verify_estimator_bounds(F, x, x, self._params(b_h=32),
                                      trials=1000)
        assert rep.premise_ok == (32 >= 12000.0 * math.log(4) ** 3)

    def test_requires_1000_trials(self, rng):
        F = quadratic_cosine_sum(8, 4, seed=6)
        x = rng.standard_normal(4)
        with pytest.raises(ValueError, match="10\\^3"):
            verify_estimator_bounds(F, x, x, self._params(), trials=999)


def _tiny_randomized(n=2, K=2, p=1, seed=0):
    Delta = 192.0 * (K + 0.5) * n ** ((p + 1.0) / (2.0 * p))
    spec = randomized_params("randomized-individual", p=p, n=n, Delta=Delta,
                             L=1.0, eps=1.0, ell_hat=1.0)
    assert spec.K == K
    with pytest.warns(UserWarning):
        return sample_randomized_instance(spec, seed=seed)


class TestLargeGradient:
    def test_randomized_instance(self):
        inst = _tiny_randomized(n=4, K=2)
        rep = verify_large_gradient(inst, seed=1)
        assert rep.passed
        assert rep.bound == pytest.approx(1.0 / 8.0)
        assert rep.min_grad_norm > rep.bound

    def test_single_component(self):
        inst = _tiny_randomized(n=1, K=3)
        rep = verify_large_gradient(inst, seed=2)
        assert rep.passed
        assert rep.bound == pytest.approx(0.25)

    def test_resisting_delegation(self, rng):
        spec = deterministic_params(p=1, n=4, Delta=576.0, L=ell_p(1), eps=1.0)
        F = ResistingOracle(spec, seed=3)
        for _ in range(6):
            F.component(int(rng.integers(4)), rng.standard_normal(spec.d), 1)
        F.finalize()
        rep = verify_large_gradient(F)
        assert rep.kind == "resisting-certificate"
        assert rep.passed

    def test_rejects_junk(self):
        with pytest.raises(TypeError):
            verify_large_gradient(object())


class TestSuboptimality:
    def test_gap_within_bound(self):
        inst = _tiny_randomized(n=2, K=2, seed=5)
        rep = verify_suboptimality(inst, num_starts=6, gd_iters=40, seed=6)
        assert rep.passed
        assert rep.bound == 24.0
        assert rep.gap >= 0.0
        assert rep.gap <= rep.bound


class TestBattery:
    def test_small_scale_all_pass(self):
        with pytest.warns(UserWarning):
            checks = run_battery(num_points=6, zero_chain_samples=60,
                                 pairs=24, trials=1000, starts=2, seed=0)
        names = [c.name for c in checks]
        assert "check_derivatives" in names
        assert "check_derivatives_chain" in names
        assert "check_derivatives_composite" in names
        assert {f"check_zero_chain_K{k}" for k in (2, 4, 8)} <= set(names)
        assert "smoothness_power_mean" in names
        assert "estimator_bounds" in names
        assert "large_gradient" in names
        assert "suboptimality" in names
        bad = [c.name for c in checks if c.status == "failed"]
        assert bad == []

    def test_zero_counts_skip(self):
        checks = run_battery(num_points=0, zero_chain_samples=0, pairs=0,
                             trials=0, starts=0)
        assert all(c.status == "skipped" for c in checks)

    def test_sabotaged_chain_derivative_is_caught(self, monkeypatch):
        real_psi = hardsum.chains.psi

        def skewed(x, order=0):
            out = real_psi(x, order)
            return out * 1.3 if order == 1 else out

        monkeypatch.setattr(hardsum.chains, "psi", skewed)
        checks = run_battery(num_points=6, zero_chain_samples=0, pairs=0,
                             trials=0, starts=0, seed=0)
        by_name = {c.name: c.status for c in checks}
        # the synthetic check shares no code with the chain and stays green
        assert by_name["check_derivatives"] == "passed"
        assert by_name["check_derivatives_chain"] == "failed"
        assert by_name["check_derivatives_composite"] == "failed"
