import itertools

import numpy as np
import pytest

from spdmeans import (
    IterationConfig,
    MatrixTuple,
    MeanKind,
    OpCounters,
    alm_mean,
    bmp_mean,
    bmp_step,
    diag_spd,
    identity_spd,
    limit_iterate,
    mean_by_kind,
    new_mean4,
    new_mean_recursive,
    palfia_mean,
    palfia_step,
    sharp,
)
from spdmeans.lab import SpdSampler, sample_tuples
from spdmeans.perm import _all_permutations


def rel_err(x, y):
    scale = max(np.max(np.abs(x)), np.max(np.abs(y)), 1e-300)
    return np.max(np.abs(np.asarray(x) - np.asarray(y))) / scale


def diag_tuple(*diags):
    return MatrixTuple([diag_spd(d) for d in diags])


class TestLimitIterate:
    def test_scalar_tuple_fixed_in_one_iteration(self, spread):
        a = spread[2]
        start = MatrixTuple([a, a, a])
        result, report = limit_iterate(palfia_step, start)
        assert report.outer_iters <= 1
        assert report.converged
        assert rel_err(result.values, a.values) < 1e-12

    def test_circular_map_commuting_two_matrices(self):
        start = diag_tuple([1.0, 1.0], [8.0, 64.0])
        result, report = limit_iterate(palfia_step, start)
        assert report.converged
        # n = 2 reduces to the two-matrix geometric mean
        assert rel_err(result.values, np.diag([np.sqrt(8.0), 8.0])) < 1e-10

    def test_cubic_map_commuting_powers(self):
        m = np.array([1.0, 2.0, 3.0])
        start = diag_tuple(m**-2, m, m**2)
        result, report = limit_iterate(bmp_step, start)
        assert report.converged
        # scalar oracle per eigenvalue: (m^-2 * m * m^2)^(1/3) = m^(1/3)
        assert rel_err(result.values, np.diag(m ** (1.0 / 3.0))) < 1e-10

    def test_non_convergence_reports_instead_of_raising(self, spread):
        cfg = IterationConfig(tol=1e-13, max_iter=2)
        result, report = limit_iterate(palfia_step, spread, cfg)
        assert not report.converged
        assert report.outer_iters == 2
        assert report.final_residual > 1e-13
        assert result.dim == 3


class TestAlmMean:
    def test_scalar_consistency(self, spread):
        a = spread[3]
        result, report = alm_mean(MatrixTuple([a, a, a]))
        assert report.converged and report.outer_iters <= 1
        assert rel_err(result.values, a.values) < 1e-12

    def test_commuting_triple_oracle(self):
        d = np.array([[1.0, 2.0, 3.0], [5.0, 0.5, 1.0], [2.0, 8.0, 0.25]])
        result, _ = alm_mean(diag_tuple(*d))
        want = np.prod(d, axis=0) ** (1.0 / 3.0)
        assert rel_err(result.values, np.diag(want)) < 1e-10

    def test_determinant_oracle(self):
        tup = sample_tuples(SpdSampler(seed=101, dim=3, count=3), n=3, k=1)[0]
        result, _ = alm_mean(tup)
        want = np.prod([np.linalg.det(m.values) for m in tup]) ** (1.0 / 3.0)
        assert abs(np.linalg.det(result.values) - want) / want <= 1e-9

    def test_two_matrices_is_sharp(self, spread):
        a, b = spread[0], spread[1]
        result, report = alm_mean(MatrixTuple([a, b]))
        assert rel_err(result.values, sharp(a, b).values) < 1e-14
        assert report.outer_iters == 0

    def test_count_model_n3(self, spread):
        # each iteration of the 3-matrix recursion costs 3 two-matrix means
        tup = MatrixTuple([spread[0], spread[1], spread[2]])
        counters = OpCounters()
        _, report = alm_mean(tup, counters=counters)
        assert counters.sqrt_count == 3 * report.outer_iters
        assert counters.proot_count == 0

    def test_permutation_sweep_n3(self):
        tup = sample_tuples(SpdSampler(seed=104, dim=3, count=3), n=3, k=1)[0]
        base, _ = alm_mean(tup)
        for sigma in _all_permutations(3):
            permuted, _ = alm_mean(tup.permuted(sigma))
            assert rel_err(permuted.values, base.values) <= 1e-10

    def test_permutation_sweep_n4(self):
        # exhaustive but slow: every permutation re-runs the nested recursion
        tup = sample_tuples(SpdSampler(seed=105, dim=3, count=4), n=4, k=1)[0]
        base, _ = alm_mean(tup)
        worst = 0.0
        for sigma in _all_permutations(4):
            permuted, _ = alm_mean(tup.permuted(sigma))
            worst = max(worst, rel_err(permuted.values, base.values))
        assert worst <= 1e-10


class TestBmpMean:
    def test_scalar_consistency(self, spread):
        a = spread[1]
        result, report = bmp_mean(MatrixTuple([a] * 4))
        assert report.converged and report.outer_iters <= 1
        assert rel_err(result.values, a.values) < 1e-12

    def test_commuting_four_oracle(self):
        d = np.array(
            [[1.0, 2.0], [3.0, 0.5], [0.2, 8.0], [5.0, 1.0]]
        )
        result, _ = bmp_mean(diag_tuple(*d))
        want = np.prod(d, axis=0) ** 0.25
        assert rel_err(result.values, np.diag(want)) < 1e-10

    def test_benchmark_tuple_table_counts(self, spread):
        # frozen benchmark-table values: 4 outer iterations, 40 inner total
        # (avg 2.5), 120 square roots, 136 p-th roots
        counters = OpCounters()
        _, report = bmp_mean(spread, counters=counters)
        assert report.converged
        assert abs(report.outer_iters - 4) <= 1
        inner_total = report.inner_total
        assert counters.sqrt_count == 3 * inner_total
        assert counters.proot_count == 3 * inner_total + 4 * report.outer_iters
        if report.outer_iters == 4:
            assert (counters.sqrt_count, counters.proot_count) == (120, 136)
            assert report.inner_avg == pytest.approx(2.5)

    def test_count_model_n3(self, spread):
        tup = MatrixTuple([spread[1], spread[2], spread[3]])
        counters = OpCounters()
        _, report = bmp_mean(tup, counters=counters)
        assert counters.sqrt_count == 3 * report.outer_iters
        assert counters.proot_count == 3 * report.outer_iters

    def test_initial_anchor_variant_is_not_a_mean(self):
        # the pull-back must target the current iterate; anchoring on the
        # starting matrices drifts away from the geometric mean
        d = np.array([[1.0, 2.0], [4.0, 0.5], [0.25, 4.0]])
        cfg = IterationConfig(bmp_anchor="initial")
        result, _ = bmp_mean(diag_tuple(*d), cfg)
        want = np.prod(d, axis=0) ** (1.0 / 3.0)
        assert rel_err(result.values, np.diag(want)) > 1e-3

    def test_permutation_sweep_n3(self):
        tup = sample_tuples(SpdSampler(seed=102, dim=3, count=3), n=3, k=1)[0]
        base, _ = bmp_mean(tup)
        for sigma in _all_permutations(3):
            permuted, _ = bmp_mean(tup.permuted(sigma))
            assert rel_err(permuted.values, base.values) <= 1e-10

    def test_permutation_sweep_n4(self):
        tup = sample_tuples(SpdSampler(seed=106, dim=3, count=4), n=4, k=1)[0]
        base, _ = bmp_mean(tup)
        for sigma in _all_permutations(4):
            permuted, _ = bmp_mean(tup.permuted(sigma))
            assert rel_err(permuted.values, base.values) <= 1e-10


class TestPalfiaMean:
    def test_scalar_consistency(self, spread):
        a = spread[0]
        result, report = palfia_mean(MatrixTuple([a, a, a]))
        assert report.converged
        assert rel_err(result.values, a.values) < 1e-12

    def test_commuting_uniform_log_average(self):
        d = np.array([[1.0, 4.0], [2.0, 1.0], [8.0, 2.0], [0.5, 0.25]])
        result, _ = palfia_mean(diag_tuple(*d))
        # circulant averaging of the logs converges to the uniform average
        want = np.prod(d, axis=0) ** 0.25
        assert rel_err(result.values, np.diag(want)) < 1e-10

    def test_not_permutation_invariant_on_benchmark_tuple(self, spread):
        base, _ = palfia_mean(spread)
        worst = 0.0
        for sigma in _all_permutations(4):
            permuted, _ = palfia_mean(spread.permuted(sigma))
            worst = max(worst, float(np.max(np.abs(permuted.values - base.values))))
        assert worst > 1e-6

    def test_counts_n_sqrts_per_iteration(self, spread):
        counters = OpCounters()
        _, report = palfia_mean(spread, counters=counters)
        assert counters.sqrt_count == 4 * report.outer_iters
        assert counters.proot_count == 0


class TestNewMean4:
    def test_scalar_consistency(self, spread):
        a = spread[2]
        result, report = new_mean4(a, a, a, a)
        assert report.converged
        assert rel_err(result.values, a.values) < 1e-12

    def test_benchmark_tuple_table_counts(self, spread):
        # frozen benchmark-table values: one inner limit process with 3
        # iterations, 18 square roots, 9 p-th roots
        counters = OpCounters()
        _, report = new_mean4(*spread.items, counters=counters)
        assert report.converged
        assert report.outer_iters == 0
        assert len(report.inner_iter_log) == 1
        inner = report.inner_iter_log[0]
        assert abs(inner - 3) <= 1
        assert counters.sqrt_count == 9 + 3 * inner
        assert counters.proot_count == 3 * inner
        if inner == 3:
            assert (counters.sqrt_count, counters.proot_count) == (18, 9)

    def test_determinant_accuracy(self, spread):
        result, _ = new_mean4(*spread.items)
        dets = np.prod([np.linalg.det(m.values) for m in spread])
        assert abs(np.linalg.det(result.values) - dets**0.25) <= 1e-11

    def test_permutation_sweep(self, spread):
        base, _ = new_mean4(*spread.items)
        for sigma in _all_permutations(4):
            permuted = spread.permuted(sigma)
            got, _ = new_mean4(*permuted.items)
            assert rel_err(got.values, base.values) <= 1e-10

    def test_alm_inner_selectable(self, spread):
        counters = OpCounters()
        result, report = new_mean4(*spread.items, inner=MeanKind.ALM, counters=counters)
        assert report.converged
        # linear inner recursion: many more iterations, no p-th roots
        assert report.inner_iter_log[0] > 3
        assert counters.proot_count == 0
        dets = np.prod([np.linalg.det(m.values) for m in spread])
        assert abs(np.linalg.det(result.values) - dets**0.25) <= 1e-11

    def test_linear_and_cubic_recursions_differ(self, spread):
        # the two 3-matrix recursions define genuinely different means on
        # well-separated inputs
        tup = MatrixTuple([spread[0], spread[1], spread[2]])
        a, _ = alm_mean(tup)
        b, _ = bmp_mean(tup)
        assert np.max(np.abs(a.values - b.values)) > 1e-4

    def test_rejects_bad_inner(self, spread):
        with pytest.raises(ValueError):
            new_mean4(*spread.items, inner=MeanKind.PALFIA)


class TestNewMeanRecursive:
    def test_scalar_five(self):
        tup = MatrixTuple([identity_spd(3)] * 5)
        result, report = new_mean_recursive(tup)
        assert report.converged
        assert rel_err(result.values, np.eye(3)) < 1e-12

    def test_commuting_five_oracle(self):
        d = np.array(
            [[1.0, 2.0], [3.0, 0.5], [0.2, 8.0], [5.0, 1.0], [2.0, 2.0]]
        )
        result, _ = new_mean_recursive(diag_tuple(*d))
        want = np.prod(d, axis=0) ** 0.2
        assert rel_err(result.values, np.diag(want)) < 1e-10

    def test_small_arities_delegate(self, spread):
        a, b, c = spread[0], spread[1], spread[2]
        two, _ = new_mean_recursive(MatrixTuple([a, b]))
        assert rel_err(two.values, sharp(a, b).values) < 1e-14
        three, _ = new_mean_recursive(MatrixTuple([a, b, c]))
        bmp3, _ = bmp_mean(MatrixTuple([a, b, c]))
        assert rel_err(three.values, bmp3.values) < 1e-14

    def test_permutation_sweep_five(self):
        tup = sample_tuples(SpdSampler(seed=103, dim=3, count=5), n=5, k=1)[0]
        base, _ = new_mean_recursive(tup)
        worst = 0.0
        for sigma in _all_permutations(5):
            got, _ = new_mean_recursive(tup.permuted(sigma))
            worst = max(worst, rel_err(got.values, base.values))
        assert worst <= 1e-10


class TestConvergenceOrdering:
    def test_cubic_beats_linear_on_all_triples(self, spread):
        for drop in range(4):
            items = [m for k, m in enumerate(spread) if k != drop]
            tup = MatrixTuple(items)
            _, bmp_report = bmp_mean(tup)
            _, alm_report = alm_mean(tup)
            assert bmp_report.converged and alm_report.converged
            assert bmp_report.outer_iters <= alm_report.outer_iters


class TestMeanByKind:
    @pytest.mark.parametrize("kind", list(MeanKind))
    def test_dispatch_scalar_tuple(self, kind):
        tup = MatrixTuple([identity_spd(2)] * 4)
        result, report = mean_by_kind(kind, tup)
        assert report.converged
        assert rel_err(result.values, np.eye(2)) < 1e-12

    def test_new_dispatches_to_composed_mean(self, spread):
        counters = OpCounters()
        mean_by_kind(MeanKind.NEW, spread, counters=counters)
        direct = OpCounters()
        new_mean4(*spread.items, counters=direct)
        assert counters == direct
