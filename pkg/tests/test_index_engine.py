import numpy as np
import pytest

import oracles
from vvindex import (IndexTask, Jet, OddInsertion, adjoint_rep, character_jets,
                     dilog, enumerate_t0, fit_polynomial,
                     flag_poincare, flag_rhs_sum, hessian, log_chi,
                     master_potential, newton_correct, odd_cofactor, rhs_sum,
                     theta_inverse, vanishing_check, verlinde_su2)
from vvindex.errors import ConfigError, SingularEvaluationError
from vvindex.fixed_points import hessian_matrix


class TestHessian:
    def test_det_norm_is_one_at_origin_of_parameters(self, a1, a2):
        for rsd, h in [(a1, 1), (a1, 3), (a2, 1), (a2, 4)]:
            fps = enumerate_t0(rsd, h)
            for p in fps.paths:
                hf = hessian(rsd, p.start, 0.0, h=h)
                assert abs(complex(hf.det_norm) - 1.0) <= 1e-12

    def test_matches_finite_difference_jacobian(self, a1):
        xi = np.array([1j * np.pi / 3])
        hf = hessian(a1, xi, -0.5, h=1)
        fd = oracles.central_gradient(lambda x: log_chi(a1, x, -0.5, h=1)[0], xi)
        assert np.max(np.abs(fd - np.asarray(hf.matrix)[0])) < 1e-6

    def test_positive_definite_on_path_points(self, a1, tracked_cache):
        tracked = tracked_cache(a1, 3, t_end=-0.9)
        for t in (-0.9, -0.5, -0.1):
            for p in tracked.regular_representatives:
                s = min(p.samples, key=lambda q: abs(q.t - t))
                H = np.asarray(hessian_matrix(a1, s.xi, s.t, h=3), dtype=complex)
                assert np.linalg.eigvalsh(0.5 * (H.real + H.real.T)).min() > 0


class TestTheta:
    def test_hand_values_a1_h1(self, a1):
        # |1 - e^{2 pi i/3}|^2 = 3 so theta^{-1} = 6/3 = 2 at both alcove points
        for y in (1 / 6, 1 / 3):
            xi = np.array([2j * np.pi * y])
            th = theta_inverse(a1, xi, 0.0, h=1)
            assert abs(th - 2.0) < 1e-12

    def test_weyl_invariance(self, a2):
        fps = enumerate_t0(a2, 4)
        by_orbit = {}
        for p in fps.paths:
            if not p.regular_t0:
                continue
            th = complex(theta_inverse(a2, p.start, 0.0, h=4))
            by_orbit.setdefault(p.orbit_id, []).append(th)
        for vals in by_orbit.values():
            assert np.ptp(np.abs(vals)) < 1e-10 * max(np.abs(vals))

    def test_singular_point_rejected(self, a1):
        with pytest.raises(SingularEvaluationError):
            theta_inverse(a1, np.zeros(1, dtype=complex), 0.0, h=1)


class TestRhsSum:
    def test_su2_genus2_level1_is_four(self, a1):
        fps = enumerate_t0(a1, 1)
        task = IndexTask(rsd=a1, g=2, h=1)
        val = rhs_sum(a1, task, fps.paths, 0.0)
        assert abs(complex(val) - 4.0) < 1e-12

    @pytest.mark.parametrize("g", [2, 3, 4])
    @pytest.mark.parametrize("h", [1, 2, 3, 4])
    def test_su2_verlinde_grid(self, a1, g, h):
        fps = enumerate_t0(a1, h)
        val = complex(rhs_sum(a1, IndexTask(rsd=a1, g=g, h=h), fps.paths, 0.0))
        oracle = oracles.verlinde_su2(g, h)
        assert abs(val.real - oracle) <= 1e-9 * abs(oracle)
        assert abs(val.imag) <= 1e-9 * abs(oracle)

    def test_t0_sum_real_positive(self, a2):
        fps = enumerate_t0(a2, 2)
        val = complex(rhs_sum(a2, IndexTask(rsd=a2, g=2, h=2), fps.paths, 0.0))
        assert val.real > 0 and abs(val.imag) < 1e-9 * val.real

    def test_missing_path_data_raises(self, a1):
        fps = enumerate_t0(a1, 1)
        with pytest.raises(ConfigError):
            rhs_sum(a1, IndexTask(rsd=a1, g=2, h=1), fps.paths, -0.25)


class TestOddCofactor:
    def test_empty_is_one(self, a1):
        hf = hessian(a1, np.array([0.25j * np.pi]), -0.2, h=3)
        assert odd_cofactor(a1, np.array([0.25j * np.pi]), (), None, hf) == 1.0

    def test_two_insertions_scalar_case(self, a1):
        adj = adjoint_rep(a1)
        xi = np.array([1j * np.pi / 4])
        hf = hessian(a1, xi, -0.3, h=3)
        ins = (OddInsertion(adj, "a"), OddInsertion(adj, "b"))
        M = np.array([[0, 1], [-1, 0]])
        got = odd_cofactor(a1, xi, ins, M, hf)
        _, dtr, _ = character_jets(adj, xi)
        manual = dtr @ np.linalg.solve(np.asarray(hf.matrix), dtr)
        assert abs(got - manual) < 1e-10 * max(1.0, abs(manual))

    def test_four_insertions_match_bruteforce(self, a2):
        adj = adjoint_rep(a2)
        fund = (OddInsertion(adj, "a"), OddInsertion(adj, "b"),
                OddInsertion(adj, "c"), OddInsertion(adj, "d"))
        M = np.array([[0, 1, 2, -1], [-1, 0, 3, 1], [-2, -3, 0, 2], [1, -1, -2, 0]])
        xi = np.array([0.31j, 0.17j])
        hf = hessian(a2, xi, -0.4, h=4)
        got = odd_cofactor(a2, xi, fund, M, hf)
        grads = [character_jets(i.rep, xi)[1] for i in fund]
        P = {(i, j): grads[i] @ np.linalg.solve(np.asarray(hf.matrix), grads[j])
             for i in range(4) for j in range(i + 1, 4)}
        brute = oracles.matching_sum_bruteforce(4, M, P)
        assert abs(got - brute) < 1e-10 * max(1.0, abs(brute))

    def test_odd_count_rejected(self, a1):
        adj = adjoint_rep(a1)
        with pytest.raises(ConfigError):
            IndexTask(rsd=a1, g=2, h=3, odd=(OddInsertion(adj, "a"),),
                      intersection=np.zeros((1, 1), dtype=int))

    def test_rhs_with_insertions_runs(self, a1, tracked_cache, fit_nodes):
        adj = adjoint_rep(a1)
        tracked = tracked_cache(a1, 3, t_end=-0.9, nodes=fit_nodes)
        task = IndexTask(rsd=a1, g=2, h=3,
                         odd=(OddInsertion(adj, "a"), OddInsertion(adj, "b")),
                         intersection=np.array([[0, 1], [-1, 0]]))
        val = complex(rhs_sum(a1, task, tracked.paths, float(fit_nodes[3])))
        assert np.isfinite(val.real) and np.isfinite(val.imag)


class TestFlagVariant:
    def test_a1_identity_with_fiber(self, a1, tracked_cache, fit_nodes):
        tracked = tracked_cache(a1, 2, t_end=-0.9, nodes=fit_nodes)
        plain = IndexTask(rsd=a1, g=2, h=2)
        flag = IndexTask(rsd=a1, g=2, h=2, flag_weight=np.zeros(1, dtype=int),
                         fiber_differentials=True)
        for t in fit_nodes:
            a = complex(rhs_sum(a1, plain, tracked.paths, float(t)))
            b = complex(flag_rhs_sum(a1, flag, tracked.paths, float(t)))
            assert abs(b - a * (1.0 - t)) <= 1e-9 * max(1.0, abs(b))

    def test_a1_t0_without_fiber_equals_plain(self, a1):
        fps = enumerate_t0(a1, 2)
        plain = IndexTask(rsd=a1, g=2, h=2)
        flag = IndexTask(rsd=a1, g=2, h=2, flag_weight=np.zeros(1, dtype=int))
        a = complex(rhs_sum(a1, plain, fps.paths, 0.0))
        b = complex(flag_rhs_sum(a1, flag, fps.paths, 0.0))
        assert abs(a - b) < 1e-10 * abs(a)

    def test_a2_matches_weyl_poincare_factor(self, a2, tracked_cache, fit_nodes):
        tracked = tracked_cache(a2, 4, t_end=-0.9, nodes=fit_nodes)
        plain = IndexTask(rsd=a2, g=2, h=4)
        flag = IndexTask(rsd=a2, g=2, h=4, flag_weight=np.zeros(2, dtype=int),
                         fiber_differentials=True)
        for t in fit_nodes[::3]:
            a = complex(rhs_sum(a2, plain, tracked.paths, float(t)))
            b = complex(flag_rhs_sum(a2, flag, tracked.paths, float(t)))
            w = complex(flag_poincare(a2, float(t)))
            assert abs(b - a * w) <= 1e-9 * max(1.0, abs(b))

    def test_nonzero_borel_weight_runs(self, a1):
        fps = enumerate_t0(a1, 2)
        flag = IndexTask(rsd=a1, g=2, h=2, flag_weight=np.array([1]))
        val = complex(flag_rhs_sum(a1, flag, fps.paths, 0.0))
        assert np.isfinite(val.real)


class TestFit:
    def test_a1_g2_h3(self, a1, controls):
        task = IndexTask(rsd=a1, g=2, h=3)
        res = fit_polynomial(task, controls=controls)
        assert res.degree == 3
        assert res.snapped
        assert res.residual < 1e-8
        # constant term is the closed-form value at t = 0
        assert abs(res.value_t0.real - oracles.verlinde_su2(2, 3)) < 1e-9 * 20
        assert res.vanishing_order >= 1
        coeffs = res.polynomial[0]
        assert np.max(np.abs(coeffs - np.round(coeffs.real))) <= 1e-6

    def test_degenerate_node_set_rejected(self, a1):
        task = IndexTask(rsd=a1, g=2, h=3)
        with pytest.raises(ConfigError):
            fit_polynomial(task, nodes=np.linspace(-0.5, 0.0, 3))

    def test_vanishing_check_passes_and_reports(self, a1, controls):
        task = IndexTask(rsd=a1, g=3, h=3)
        order = vanishing_check(task, controls=controls)
        assert order >= 2


class TestMasterPotential:
    def test_gradient_matches_log_chi(self, a1, a2):
        rng = np.random.default_rng(17)
        for rsd in (a1, a2):
            adj = adjoint_rep(rsd)
            for _ in range(3):
                xi = 0.7j * rng.normal(size=rsd.rank) + 0.05 * rng.normal(size=rsd.rank)
                t, s = -0.45, 0.1

                def pot(x):
                    return master_potential(rsd, x, t, s, h=2, v=adj)

                grad = oracles.central_gradient(pot, xi)
                lc = log_chi(rsd, xi, t, s=s, h=2, v=adj)
                assert np.max(np.abs(grad - lc)) < 1e-6 * max(1.0, np.max(np.abs(lc)))

    def test_hessian_matches_assembled_matrix(self, a1, a2):
        rng = np.random.default_rng(23)
        for rsd in (a1, a2):
            adj = adjoint_rep(rsd)
            xi = 0.6j * rng.normal(size=rsd.rank)
            t, s = -0.35, 0.07

            def pot(x):
                return master_potential(rsd, x, t, s, h=2, v=adj)

            fd = oracles.central_hessian(pot, xi, eps=1e-4)
            H = np.asarray(hessian_matrix(rsd, xi, t, s=s, h=2, v=adj), dtype=complex)
            assert np.max(np.abs(fd - H)) < 1e-5 * max(1.0, np.max(np.abs(H)))

    def test_value_at_origin(self, a2):
        t = -0.6
        v0 = master_potential(a2, np.zeros(2), t, 0.0, h=3)
        assert abs(v0 - a2.n_roots * dilog(-t)) < 1e-12


class TestDilog:
    def test_known_values(self):
        assert abs(dilog(0.5) - (np.pi**2 / 12 - np.log(2) ** 2 / 2)) < 1e-14
        assert abs(dilog(-1.0) + np.pi**2 / 12) < 1e-14
        assert abs(dilog(1.0) - np.pi**2 / 6) < 1e-14

    def test_against_series_oracle(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            z = (rng.uniform(-0.9, 0.9) + 1j * rng.uniform(-0.9, 0.9)) * 0.7
            assert abs(dilog(z) - oracles.dilog_series(z)) < 1e-12


class TestJetsThroughTheEngine:
    def test_jet_constant_part_matches_plain_run(self, a1, tracked_cache, fit_nodes):
        adj = adjoint_rep(a1)
        tracked = tracked_cache(a1, 3, t_end=-0.9, nodes=fit_nodes)
        t = float(fit_nodes[5])
        vj = rhs_sum(a1, IndexTask(rsd=a1, g=2, h=3, v=adj, s_order=2), tracked.paths, t)
        v0 = rhs_sum(a1, IndexTask(rsd=a1, g=2, h=3), tracked.paths, t)
        assert isinstance(vj, Jet)
        assert abs(vj.c[0] - complex(v0)) < 1e-10

    def test_jet_first_order_matches_finite_difference(self, a1, tracked_cache, fit_nodes):
        adj = adjoint_rep(a1)
        tracked = tracked_cache(a1, 3, t_end=-0.9, nodes=fit_nodes)
        t = float(fit_nodes[5])
        task = IndexTask(rsd=a1, g=2, h=3, v=adj, s_order=1)
        vj = rhs_sum(a1, task, tracked.paths, t)

        def rhs_numeric_s(sval):
            total = 0.0
            reps = [p for p in tracked.paths if p.is_representative and p.regular_t0]
            for p in sorted(reps, key=lambda q: q.branch):
                pt = newton_correct(a1, 3, p.xi_at(t), t, p.branch, tol=1e-13,
                                    s=sval, v=adj)
                total += theta_inverse(a1, pt.xi, t, s=sval, h=3, v=adj)
            return (1 + t) ** 1 * total

        eps = 1e-6
        fd = (rhs_numeric_s(eps) - rhs_numeric_s(-eps)) / (2 * eps)
        assert abs(vj.c[1] - fd) < 1e-6 * max(1.0, abs(fd))


class TestTaskValidation:
    def test_bad_genus(self, a1):
        with pytest.raises(ConfigError):
            IndexTask(rsd=a1, g=1, h=3)

    def test_s_order_needs_v(self, a1):
        with pytest.raises(ConfigError):
            IndexTask(rsd=a1, g=2, h=3, s_order=1)

    def test_fiber_needs_flag(self, a1):
        with pytest.raises(ConfigError):
            IndexTask(rsd=a1, g=2, h=3, fiber_differentials=True)

    def test_intersection_must_be_antisymmetric(self, a1):
        adj = adjoint_rep(a1)
        with pytest.raises(ConfigError):
            IndexTask(rsd=a1, g=2, h=3,
                      odd=(OddInsertion(adj, "a"), OddInsertion(adj, "b")),
                      intersection=np.array([[0, 1], [1, 0]]))

    def test_degree_bound(self, a1, a2):
        assert IndexTask(rsd=a1, g=2, h=3).degree_bound() == 3
        assert IndexTask(rsd=a2, g=2, h=4).degree_bound() == 8
        flag = IndexTask(rsd=a2, g=2, h=4, flag_weight=np.zeros(2, dtype=int),
                         fiber_differentials=True)
        assert flag.degree_bound() == 8 + 3


def test_verlinde_closed_form_helper_matches_oracle():
    for g in (2, 3, 4):
        for h in (1, 2, 3, 4):
            assert abs(verlinde_su2(g, h) - oracles.verlinde_su2(g, h)) < 1e-10
