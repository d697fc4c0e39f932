import numpy as np
import pytest

from lindyn import tasks
from lindyn.errors import BadRank, DimensionMismatch


class TestMakeTask:
    def test_rank_one_outer_product(self):
        task = tasks.make_task(3, 1, seed=5)
        s = np.linalg.svd(task.a_star, compute_uv=False)
        assert s[1] <= 1e-9 * s[0]

    def test_numerical_rank_K(self):
        task = tasks.make_task(30, 4, seed=1)
        s = np.linalg.svd(task.a_star, compute_uv=False)
        assert s[4] <= 1e-9 * s[0]
        assert s[3] > 1e-3 * s[0]

    def test_determinism(self):
        t1 = tasks.make_task(12, 3, seed=42)
        t2 = tasks.make_task(12, 3, seed=42)
        assert np.array_equal(t1.a_star, t2.a_star)
        assert np.array_equal(t1.noise, t2.noise)
        assert np.array_equal(t1.observed, t2.observed)

    def test_seed_changes_matrices(self):
        t1 = tasks.make_task(12, 3, seed=1)
        t2 = tasks.make_task(12, 3, seed=2)
        assert not np.array_equal(t1.a_star, t2.a_star)

    def test_frobenius_scale(self):
        # ||A*||_F = Theta(d) for the Gaussian-factor construction
        for d in (50, 120):
            task = tasks.make_task(d, 5, seed=0)
            fro = np.linalg.norm(task.a_star)
            assert 0.3 * d <= fro <= 3.0 * d

    def test_noise_operator_norm_concentration(self):
        # E[||E||_op] ~ 2 sqrt(d) for iid Gaussian entries
        d = 200
        for seed in range(20):
            task = tasks.make_task(d, 5, seed=seed)
            opn = np.linalg.norm(task.noise, 2)
            assert 1.5 * np.sqrt(d) <= opn <= 3.0 * np.sqrt(d)

    @pytest.mark.parametrize("K", [0, -1, 11])
    def test_bad_rank(self, K):
        with pytest.raises(BadRank):
            tasks.make_task(10, K, seed=0)

    def test_svals_descending(self):
        task = tasks.make_task(25, 6, seed=3)
        assert np.all(np.diff(task.target_svals) <= 0)
        assert len(task.target_svals) == 6


class TestDeterministicTask:
    def test_spectrum_matches_a_list(self):
        task = tasks.make_task_from_svals(20, [2.0, 2.0, 1.0], seed=0)
        assert np.allclose(task.target_svals, [40.0, 40.0, 20.0])
        s = np.linalg.svd(task.a_star, compute_uv=False)
        assert np.allclose(s[:3], [40.0, 40.0, 20.0])
        assert np.allclose(s[3:], 0.0)

    def test_rejects_increasing(self):
        with pytest.raises(BadRank):
            tasks.make_task_from_svals(10, [1.0, 2.0], seed=0)


class TestScalingPoint:
    def test_fig1_exponents_active(self):
        sp = tasks.scaling_point(200, 2.25, -1.85)
        assert sp.is_active and not sp.is_lazy
        assert sp.region_flags()["finite_variance"]

    def test_width_one(self):
        sp = tasks.scaling_point(100, 0.0, 0.0)
        assert sp.w == 1 and sp.sigma2 == 1.0
        assert not sp.overparametrized and sp.degenerate

    def test_lazy_rule_arithmetic(self):
        # w = 1e4, sigma2 = 0.1 -> eta = 1e4 / (50 * 1e3) = 0.2
        sp = tasks.scaling_point(100, 2.0, -0.5)
        assert sp.w == 10_000
        assert sp.sigma2 == pytest.approx(0.1)
        assert sp.eta == pytest.approx(0.2)

    def test_active_rule_needs_task(self):
        sp = tasks.scaling_point(100, 2.0, -1.5)
        assert sp.eta is None
        sp = tasks.scaling_point(100, 2.0, -1.5, a_star_op=40.0)
        assert sp.eta == pytest.approx(100 ** 2 / (50.0 * 40.0))

    def test_region_partition(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            gw = rng.uniform(-1, 3)
            gs2 = rng.uniform(-3, 1)
            sp = tasks.scaling_point(50, gw, gs2)
            assert sp.is_lazy + sp.is_active + sp.is_boundary == 1

    def test_boundary(self):
        sp = tasks.scaling_point(50, 2.0, -1.0)
        assert sp.is_boundary and not sp.is_lazy and not sp.is_active


class TestCostSurface:
    def test_grad_zero_at_minimizer(self):
        task = tasks.make_task(8, 2, seed=0)
        assert np.all(tasks.grad_cost(task.observed, task) == 0.0)

    def test_grad_hand_value(self):
        task = tasks.make_task_from_svals(2, [0.5], seed=0)
        task = tasks.Task(d=2, K=1, seed=0, a_star=task.a_star,
                          noise=np.eye(2) - task.a_star, observed=np.eye(2),
                          target_svals=task.target_svals, target_svd=task.target_svd)
        G = tasks.grad_cost(np.zeros((2, 2)), task)
        assert np.allclose(G, [[-0.5, 0.0], [0.0, -0.5]])

    def test_grad_linearity(self):
        task = tasks.make_task(6, 2, seed=1)
        rng = np.random.default_rng(2)
        A1, A2 = rng.standard_normal((2, 6, 6))
        lhs = tasks.grad_cost(A1, task) + tasks.grad_cost(A2, task)
        rhs = 2.0 * tasks.grad_cost(0.5 * (A1 + A2), task)
        assert np.allclose(lhs, rhs, atol=1e-15)

    def test_grad_is_gradient_of_train(self):
        h = 1e-5
        for s in range(10):
            task = tasks.make_task(5, 2, seed=s)
            A = np.random.default_rng(50 + s).standard_normal((5, 5))
            G = tasks.grad_cost(A, task)
            for idx in [(0, 0), (2, 3), (4, 1)]:
                Ap, Am = A.copy(), A.copy()
                Ap[idx] += h
                Am[idx] -= h
                num = (tasks.eval_errors(Ap, task)[0]
                       - tasks.eval_errors(Am, task)[0]) / (2 * h)
                assert num == pytest.approx(G[idx], rel=1e-5, abs=1e-12)

    def test_eval_errors_identities(self):
        task = tasks.make_task(9, 3, seed=4)
        inv = 1.0 / 81.0
        tr, te = tasks.eval_errors(task.a_star, task)
        assert te == 0.0
        assert tr == pytest.approx(inv * np.sum(task.noise ** 2))
        tr, te = tasks.eval_errors(task.observed, task)
        assert tr == 0.0
        assert te == pytest.approx(inv * np.sum(task.noise ** 2))
        tr, te = tasks.eval_errors(np.zeros((9, 9)), task)
        assert te == pytest.approx(inv * np.sum(task.a_star ** 2))
        assert tr >= 0.0 and te >= 0.0

    def test_dimension_mismatch(self):
        task = tasks.make_task(5, 2, seed=0)
        with pytest.raises(DimensionMismatch):
            tasks.grad_cost(np.zeros((4, 4)), task)
        with pytest.raises(DimensionMismatch):
            tasks.eval_errors(np.zeros((6, 5)), task)


def test_save_load_roundtrip(tmp_path):
    task = tasks.make_task(10, 2, seed=9)
    path = tmp_path / "task.npz"
    tasks.save_task(task, str(path))
    back = tasks.load_task(str(path))
    assert back.d == 10 and back.K == 2 and back.seed == 9
    assert np.array_equal(back.a_star, task.a_star)
    assert np.array_equal(back.noise, task.noise)
    assert np.array_equal(back.observed, task.observed)
