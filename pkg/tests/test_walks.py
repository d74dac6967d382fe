"""Running maxima of partial sums, the optimized gap bound, half-normal KS."""

import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.stats import kstest

from lindeberg_lab.core import test_function as named_g
from lindeberg_lab.core import InfiniteGammaError
from lindeberg_lab.distributions import GAUSSIAN, RADEMACHER, pareto, \
    third_abs_moment
from lindeberg_lab.rng import RandomStream
from lindeberg_lab.smoothmax import estimate_family_lambda, k_constant, \
    optimized_max_bound
from lindeberg_lab.walks import (
    erdos_kac_bound,
    erdos_kac_experiment,
    half_normal_reference,
    ks_to_half_normal,
    max_partial_sums,
    walk_family,
)

SIN = named_g("sin")


class TestMaxPartialSums:
    def test_all_up_steps(self):
        for n in (1, 5, 49):
            assert max_partial_sums(np.ones(n)) == pytest.approx(
                math.sqrt(n), rel=1e-14)

    def test_all_down_steps(self):
        for n in (1, 4, 30):
            assert max_partial_sums(-np.ones(n)) == pytest.approx(
                -1.0 / math.sqrt(n), rel=1e-14)

    def test_hand_prefix_oracle(self):
        # prefixes of (1, -2, 2): 1, -1, 1 -> max 1, normalized by sqrt(3)
        got = max_partial_sums(np.array([1.0, -2.0, 2.0]))
        assert got == pytest.approx(1.0 / math.sqrt(3.0), rel=1e-15)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            max_partial_sums(np.array([]))

    def test_equals_family_hard_max(self):
        n = 12
        fam = walk_family(n)
        gen = RandomStream(3, "walk-test").replicate(0)
        for _ in range(5):
            x = gen.standard_normal(n)
            hard = max(f.value(x) for f in fam.iter_members())
            assert max_partial_sums(x) == pytest.approx(hard, rel=1e-13)


class TestWalkFamily:
    def test_influence_is_exact(self):
        n = 16
        fam = walk_family(n)
        gen = RandomStream(4, "walk-lam").replicate(0)
        pts = [gen.standard_normal(n) for _ in range(3)]
        est = estimate_family_lambda(fam, pts)
        assert est.lambda3 == pytest.approx(n**-1.5, rel=1e-14)
        assert est.lambda2 == pytest.approx(1.0 / n, rel=1e-14)

    def test_family_metadata(self):
        fam = walk_family(9)
        assert fam.size == 9
        assert fam.c1 == pytest.approx(1.0 / 3.0)
        assert fam.lambda3 == pytest.approx(9.0**-1.5)

    def test_smoothed_influence_of_prefix_family(self):
        from lindeberg_lab.smoothmax import smoothed_lambda_bounds

        n, alpha = 25, 3.0
        l2, l3 = smoothed_lambda_bounds(walk_family(n), alpha)
        assert l2 == pytest.approx(3.0 * alpha / n, rel=1e-14)
        assert l3 == pytest.approx(13.0 * alpha**2 * n**-1.5, rel=1e-14)


class TestBound:
    def test_routes_through_optimized_max_bound(self):
        for n in (16, 400):
            for gamma in (1.0, 1.6):
                assert erdos_kac_bound(SIN, gamma, n) == pytest.approx(
                    optimized_max_bound(SIN, gamma, n, walk_family(n)),
                    rel=1e-12)

    def test_closed_form_at_sin(self):
        # K(sin) = 19/3 + 13 + 13/3 = 71/3; the two channels in brackets
        n, gamma = 400, 1.0
        got = erdos_kac_bound(SIN, gamma, n)
        expect = (71.0 / 3.0) * (
            n**(-1.0 / 6.0) * math.log(n) ** (2.0 / 3.0) + n**-0.5)
        assert got == pytest.approx(expect, rel=1e-13)
        assert k_constant(SIN) == pytest.approx(71.0 / 3.0)

    def test_decreasing_in_n(self):
        vals = [erdos_kac_bound(SIN, 1.3, n) for n in (50, 200, 800, 3200)]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_refuses_infinite_gamma(self):
        with pytest.raises(InfiniteGammaError):
            erdos_kac_bound(SIN, third_abs_moment(pareto(2.5)), 100)


class TestHalfNormalReference:
    def test_edges(self):
        assert half_normal_reference(0.0) == 0.0
        assert half_normal_reference(-3.0) == 0.0
        assert half_normal_reference(40.0) == pytest.approx(1.0, abs=1e-15)

    def test_unit_point_matches_quadrature(self):
        phi = lambda t: math.exp(-t * t / 2.0) / math.sqrt(2.0 * math.pi)
        oracle = 2.0 * quad(phi, 0.0, 1.0)[0]
        assert half_normal_reference(1.0) == pytest.approx(oracle, rel=1e-12)
        assert half_normal_reference(1.0) == pytest.approx(
            0.6826894921370859, rel=1e-14)

    def test_vectorized(self):
        t = np.array([-1.0, 0.0, 1.0, 2.0])
        vals = half_normal_reference(t)
        assert vals.shape == (4,)
        assert vals[0] == 0.0
        assert np.all(np.diff(vals) >= 0.0)


class TestKsStatistic:
    def test_matches_scipy_oracle(self):
        gen = RandomStream(9, "ks-test").replicate(0)
        sample = np.abs(gen.standard_normal(500))
        ours = ks_to_half_normal(sample)
        oracle = kstest(sample, half_normal_reference).statistic
        assert ours == pytest.approx(oracle, rel=1e-12)

    def test_degenerate_sample(self):
        with pytest.raises(ValueError):
            ks_to_half_normal(np.array([]))


class TestExperiment:
    def test_small_run_passes(self):
        report = erdos_kac_experiment(RADEMACHER, GAUSSIAN, 64, SIN,
                                      replicates=400, master_seed=6)
        assert report.passed
        assert report.report.theoretical_bound == pytest.approx(
            erdos_kac_bound(SIN, third_abs_moment(GAUSSIAN), 64), rel=1e-13)
        assert 0.0 < report.ks_distance < 0.25

    def test_csv_row_shape(self):
        report = erdos_kac_experiment(RADEMACHER, GAUSSIAN, 32, SIN,
                                      replicates=150, master_seed=2)
        row = report.csv_row()
        assert len(row) == len(report.CSV_COLUMNS)
        assert row[0] == 32

    def test_deterministic(self):
        a = erdos_kac_experiment(RADEMACHER, GAUSSIAN, 32, SIN,
                                 replicates=150, master_seed=2)
        b = erdos_kac_experiment(RADEMACHER, GAUSSIAN, 32, SIN,
                                 replicates=150, master_seed=2)
        assert a == b
