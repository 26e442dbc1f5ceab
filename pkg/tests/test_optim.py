import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hardsum.chains import Derivatives
from hardsum.oracle import CallableFiniteSum, OracleLedger, quadratic_cosine_sum
from hardsum.optim import (
    C_M,
    SvrcParams,
    baseline_full_cubic,
    baseline_full_gd,
    mu,
    svrc_default_params,
    svrc_gradient_estimator,
    svrc_hessian_estimator,
    svrc_run,
)


def _identity_quadratic(d=4, n=3):
    """n copies of 0.5|x|^2: gradient x, Hessian I; SOSP at the origin."""
    def f(x, order=2):
        v = 0.5 * float(x @ x)
        if order == 0:
            return Derivatives(v)
        if order == 1:
            return Derivatives(v, x.copy())
        return Derivatives(v, x.copy(), np.eye(x.size))
    return CallableFiniteSum([f] * n, d=d)


class TestSchedule:
    def test_worked_example_n1024(self):
        p = svrc_default_params(n=1024, d=50, Delta=1.0, L2=1.0, eps=1.0)
        assert p.T == 4                      # ceil(1024^0.2) = 4
        assert p.b_g == 1280                 # 5 * 1024^0.8 = 5 * 256
        assert p.b_h == math.ceil(3000.0 * 1024 ** 0.4 * math.log(50) ** 3 - 1e-6)
        assert p.M == 150.0

    def test_worked_example_n1(self):
        p = svrc_default_params(n=1, d=3, Delta=1.0, L2=1.0, eps=1.0)
        assert p.T == 2                      # floor at 2
        assert p.b_g == 80                   # 5 * max(1, 16)
        assert p.b_h == math.ceil(12000.0 * math.log(3) ** 3 - 1e-6)

    def test_s_floors_at_one(self):
        p = svrc_default_params(n=8, d=5, Delta=1.0, L2=1.0, eps=1e9)
        assert p.S == 1

    def test_s_scaling(self):
        # S = 240 C_M^2 sqrt(L2) Delta n^(-1/5) eps^(-3/2), rounded up
        p = svrc_default_params(n=32, d=5, Delta=2.0, L2=4.0, eps=100.0)
        expected = 240.0 * C_M ** 2 * 2.0 * 2.0 * 32 ** -0.2 / 1000.0
        assert p.S == math.ceil(expected - 1e-9)

    def test_exact_integers_not_bumped(self):
        # 5 * 1024^0.8 is exactly 1280; the ceil guard must not push it to 1281
        p = svrc_default_params(n=1024, d=50, Delta=1.0, L2=1.0, eps=1.0)
        assert p.b_g == 1280

    def test_params_validation(self):
        with pytest.raises(ValueError):
            SvrcParams(M=0.0, b_g=1, b_h=1, S=1, T=1, eps=1.0, Delta=1.0, L2=1.0)
        with pytest.raises(ValueError):
            SvrcParams(M=1.0, b_g=0, b_h=1, S=1, T=1, eps=1.0, Delta=1.0, L2=1.0)
        with pytest.raises(ValueError):
            svrc_default_params(n=0, d=3, Delta=1.0, L2=1.0, eps=1.0)


class TestEstimators:
    def _setup(self, n=6, d=5, seed=3):
        F = quadratic_cosine_sum(n, d, seed=seed)
        rng = np.random.default_rng(seed + 1)
        x_hat = rng.standard_normal(d)
        x = x_hat + 0.3 * rng.standard_normal(d)
        full = F.full(x_hat, order=2)
        return F, x, x_hat, full.grad, full.hess

    def test_at_snapshot_point_estimators_are_exact(self):
        F, _, x_hat, g_s, H_s = self._setup()
        led = OracleLedger(n=F.n)
        batch = np.array([0, 2, 2, 5])
        v = svrc_gradient_estimator(F, led, x_hat, x_hat, g_s, H_s, batch)
        U = svrc_hessian_estimator(F, led, x_hat, x_hat, H_s, batch)
        assert np.allclose(v, g_s, atol=1e-13)
        assert np.allclose(U, H_s, atol=1e-13)

    def test_full_batch_gradient_telescopes(self):
        # with the batch equal to {0..n-1} the correction terms cancel and
        # v equals the exact full gradient at x
        F, x, x_hat, g_s, H_s = self._setup()
        led = OracleLedger(n=F.n)
        v = svrc_gradient_estimator(F, led, x, x_hat, g_s, H_s, np.arange(F.n))
        assert np.allclose(v, F.full(x, 1).grad, atol=1e-12)

    def test_full_batch_hessian_telescopes(self):
        F, x, x_hat, g_s, H_s = self._setup()
        led = OracleLedger(n=F.n)
        U = svrc_hessian_estimator(F, led, x, x_hat, H_s, np.arange(F.n))
        assert np.allclose(U, F.full(x, 2).hess, atol=1e-12)

    def test_gradient_estimator_charging(self):
        F, x, x_hat, g_s, H_s = self._setup()
        led = OracleLedger(n=F.n)
        batch = np.array([1, 1, 1, 4])      # 4 draws, 2 unique
        svrc_gradient_estimator(F, led, x, x_hat, g_s, H_s, batch)
        # b charged at x (order 1) + b re-reads at the snapshot (order 2)
        assert led.total == 8
        assert led.requery_queries == 4
        assert led.adjusted_total == 4
        assert led.grad_queries == 8
        assert led.hess_queries == 4
        assert led.per_index[1] == 6

    def test_hessian_estimator_cache_hits(self):
        F, x, x_hat, g_s, H_s = self._setup()
        cache = {i: (F.component(i, x_hat, 2).grad, F.component(i, x_hat, 2).hess)
                 for i in range(F.n)}
        led = OracleLedger(n=F.n)
        batch = np.array([0, 3, 3])
        svrc_hessian_estimator(F, led, x, x_hat, H_s, batch, snapshot_cache=cache)
        assert led.total == 3               # only the queries at x are charged
        assert led.cache_hits == 3
        assert led.requery_queries == 0

    def test_hessian_estimator_without_cache_charges_requeries(self):
        F, x, x_hat, g_s, H_s = self._setup()
        led = OracleLedger(n=F.n)
        svrc_hessian_estimator(F, led, x, x_hat, H_s, np.array([2, 2]))
        assert led.total == 4
        assert led.requery_queries == 2

    def test_empty_batch_rejected(self):
        F, x, x_hat, g_s, H_s = self._setup()
        led = OracleLedger(n=F.n)
        with pytest.raises(ValueError, match="batch"):
            svrc_gradient_estimator(F, led, x, x_hat, g_s, H_s, [])


class TestMu:
    def test_zero_at_sosp(self):
        F = _identity_quadratic()
        assert mu(F, np.zeros(4), L2=1.0) == 0.0

    def test_saddle_value(self):
        # F = 0.5(x0^2 - x1^2): at 0, grad = 0 and lambda_min = -1
        def f(x, order=2):
            v = 0.5 * (x[0] ** 2 - x[1] ** 2)
            g = np.array([x[0], -x[1]])
            H = np.diag([1.0, -1.0])
            return Derivatives(v, g if order >= 1 else None,
                               H if order >= 2 else None)
        F = CallableFiniteSum([f], d=2)
        assert mu(F, np.zeros(2), L2=1.0) == pytest.approx(1.0, rel=1e-12)
        # larger L2 discounts negative curvature
        assert mu(F, np.zeros(2), L2=4.0) == pytest.approx(0.125, rel=1e-12)

    def test_dominated_by_gradient_term(self, rng):
        F = quadratic_cosine_sum(3, 4, seed=1)
        for _ in range(10):
            x = rng.standard_normal(4)
            g = np.linalg.norm(F.full(x, 1).grad)
            assert mu(F, x, L2=2.0) >= g ** 1.5 - 1e-12

    def test_rejects_bad_l2(self):
        F = _identity_quadratic()
        with pytest.raises(ValueError):
            mu(F, np.zeros(4), L2=0.0)


class TestSvrcRun:
    def _params(self, n, S=2, T=3, **kw):
        base = dict(M=15.0, b_g=4, b_h=4, S=S, T=T, eps=1e-4, Delta=10.0,
                    L2=0.1, seed=0)
        base.update(kw)
        return SvrcParams(**base)

    def test_accounting_invariant_full_batch(self):
        F = quadratic_cosine_sum(5, 4, seed=7)
        n = F.n
        params = self._params(n, S=2, T=3, b_g=n, b_h=n, full_batch=True)
        led = OracleLedger(n=n)
        svrc_run(F, params, ledger=led)
        S, T, b_g, b_h = params.S, params.T, params.b_g, params.b_h
        assert led.total == S * n + S * T * (2 * b_g + b_h)
        assert led.adjusted_total == S * n + S * T * (b_g + b_h)
        assert led.cache_hits == S * T * b_h
        assert led.requery_queries == S * T * b_g

    def test_accounting_invariant_sampled(self):
        F = quadratic_cosine_sum(6, 4, seed=8)
        params = self._params(6, S=2, T=2, b_g=5, b_h=7)
        led = OracleLedger(n=6)
        svrc_run(F, params, ledger=led)
        S, T, b_g, b_h = params.S, params.T, params.b_g, params.b_h
        assert led.total == S * 6 + S * T * (2 * b_g + b_h)
        assert led.cache_hits == S * T * b_h

    def test_frozen_at_exact_sosp(self):
        F = _identity_quadratic(d=4, n=3)
        params = self._params(3, S=1, T=4, b_g=2, b_h=2, M=10.0)
        x_out, traj = svrc_run(F, params, x0=np.zeros(4))
        assert np.allclose(x_out, 0.0)
        assert all(rec.h_norm == 0.0 for rec in traj)

    def test_full_batch_monotone_decrease(self):
        F = quadratic_cosine_sum(6, 5, seed=11, curvature=0.5)
        n = F.n
        params = self._params(n, S=2, T=4, b_g=n, b_h=n, full_batch=True,
                              M=30.0, seed=5)
        rng = np.random.default_rng(2)
        x0 = rng.standard_normal(5)
        _, traj = svrc_run(F, params, x0=x0)
        f0 = F.full(x0, 0).value
        fs = [f0] + [rec.f for rec in traj]
        diffs = np.diff(fs)
        assert np.all(diffs <= 1e-12)
        # cumulative decrease dominates the step-norm certificates
        total_dec = fs[0] - fs[-1]
        cert = params.M / 12.0 * sum(rec.h_norm ** 3 for rec in traj)
        assert total_dec >= cert - 1e-8

    def test_x_out_is_a_recorded_iterate(self):
        F = quadratic_cosine_sum(4, 3, seed=13)
        params = self._params(4, S=1, T=5, b_g=2, b_h=2, seed=9)
        x_out, traj = svrc_run(F, params, x0=np.ones(3))
        assert len(traj) == 5
        # reproducible under the same seed
        x_out2, _ = svrc_run(F, params, x0=np.ones(3))
        assert np.array_equal(x_out, x_out2)

    def test_budget_stops_early(self):
        F = quadratic_cosine_sum(4, 3, seed=14)
        params = self._params(4, S=3, T=3, b_g=3, b_h=3)
        led = OracleLedger(n=4)
        budget = 4 + 2 * (2 * 3 + 3)     # one snapshot + two steps
        _, traj = svrc_run(F, params, ledger=led, budget=budget)
        assert led.total <= budget
        assert len(traj) == 2

    def test_first_hit_recorded(self):
        F = _identity_quadratic(d=3, n=2)
        params = self._params(2, S=1, T=2, b_g=1, b_h=1)
        led = OracleLedger(n=2)
        svrc_run(F, params, eps=1e9, ledger=led)   # trivially hit at step 0
        assert led.first_hit == 0


class TestBaselines:
    def test_gd_on_quadratic_converges_in_one_step(self):
        F = _identity_quadratic(d=4, n=3)
        x0 = np.array([1.0, -2.0, 0.5, 3.0])
        traj = baseline_full_gd(F, step_rule=1.0, budget=4 * 3, x0=x0)
        assert len(traj) == 4
        assert traj[0].grad_norm == pytest.approx(np.linalg.norm(x0))
        assert traj[1].grad_norm == pytest.approx(0.0, abs=1e-14)

    def test_gd_charges_n_per_iteration(self):
        F = _identity_quadratic(d=4, n=3)
        led = OracleLedger(n=3)
        traj = baseline_full_gd(F, step_rule=0.5, budget=10, ledger=led)
        assert len(traj) == 3               # 3 passes of 3 fit in 10
        assert led.total == 9
        assert led.hess_queries == 0

    def test_gd_callable_step_rule(self):
        F = _identity_quadratic(d=2, n=2)
        steps = []

        def rule(t, x, grad):
            steps.append(t)
            return 0.1 / (t + 1)

        baseline_full_gd(F, step_rule=rule, budget=6, x0=np.ones(2))
        assert steps == [0, 1, 2]

    def test_cubic_budget_and_charges(self):
        F = quadratic_cosine_sum(4, 3, seed=21)
        led = OracleLedger(n=4)
        traj = baseline_full_cubic(F, M=20.0, budget=17, ledger=led)
        assert len(traj) == 2               # two 2n-passes fit in 17
        assert led.total == 16
        assert led.grad_queries == 16
        assert led.hess_queries == 8

    def test_cubic_decreases_f(self):
        F = quadratic_cosine_sum(5, 4, seed=22, curvature=0.5)
        rng = np.random.default_rng(3)
        traj = baseline_full_cubic(F, M=30.0, budget=200,
                                   x0=rng.standard_normal(4))
        fs = [rec.f for rec in traj]
        assert fs[-1] <= fs[0] + 1e-12

    def test_mu_reported_only_with_l2(self):
        F = _identity_quadratic(d=2, n=2)
        traj = baseline_full_gd(F, step_rule=0.1, budget=4, x0=np.ones(2))
        assert traj[0].mu is None
        traj = baseline_full_gd(F, step_rule=0.1, budget=4, x0=np.ones(2),
                                L2=1.0)
        assert traj[0].mu is not None

    def test_rejects_bad_budget(self):
        F = _identity_quadratic()
        with pytest.raises(ValueError):
            baseline_full_gd(F, step_rule=0.1, budget=0)
        with pytest.raises(ValueError):
            baseline_full_cubic(F, M=1.0, budget=-1)


@given(st.integers(0, 2_000))
def test_mu_dominates_gradient_norm_property(seed):
    rng = np.random.default_rng(seed)
    F = quadratic_cosine_sum(2, 3, seed=seed)
    x = rng.standard_normal(3)
    g = np.linalg.norm(F.full(x, 1).grad)
    assert mu(F, x, L2=1.0) >= g ** 1.5 - 1e-10


@given(st.integers(2, 600), st.integers(2, 40))
def test_schedule_batch_sizes_property(n, d):
    p = svrc_default_params(n=n, d=d, Delta=1.0, L2=1.0, eps=1.0)
    assert p.T >= 2
    assert p.b_g >= 5 * 16
    assert p.b_h >= 1
    assert p.S >= 1
