import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from beamtrain.errors import DegenerateProfileError, InsufficientBudgetError, InsufficientDataError
from beamtrain.montecarlo import (
    BLOCK_TRIALS,
    MisalignmentEstimate,
    Scenario,
    estimate_misalignment,
    fit_exponent,
    sweep,
    wilson_interval,
)

TIED_PHI = math.asin(0.5)  # the two beams of a 2-beam DFT codebook see equal gain


def est(p, trials=1000):
    lo, hi = wilson_interval(round(p * trials), trials)
    return MisalignmentEstimate(p, trials, lo, hi, 0, round(p * trials))


class TestEstimate:
    def test_noise_free_limit(self):
        for alg in ("exhaustive", "adaptive"):
            e = estimate_misalignment(Scenario(snr_db=200.0, algorithm=alg), 2000, 1)
            assert e.p_hat == 0.0 and e.ci_low == 0.0 and e.misaligned == 0

    def test_deterministic_across_workers(self):
        sc = Scenario(snr_db=0.0, algorithm="adaptive", l_beams=16, budget=200)
        trials = 2 * BLOCK_TRIALS + 17
        a = estimate_misalignment(sc, trials, 42, workers=1)
        b = estimate_misalignment(sc, trials, 42, workers=3)
        assert a == b and a.trials == trials

    def test_seed_changes_draws(self):
        sc = Scenario(snr_db=-5.0, algorithm="exhaustive")
        assert estimate_misalignment(sc, 3000, 1) != estimate_misalignment(sc, 3000, 2)

    def test_degenerate_rejected_up_front(self):
        with pytest.raises(DegenerateProfileError):
            estimate_misalignment(Scenario(l_beams=2, phi=TIED_PHI, budget=20), 10, 0)

    def test_insufficient_budget(self):
        with pytest.raises(InsufficientBudgetError):
            estimate_misalignment(Scenario(l_beams=8, budget=7), 10, 0)

    def test_symmetric_pair_is_a_coin_flip(self):
        sc = Scenario(l_beams=2, phi=TIED_PHI, snr_db=0.0, budget=20, algorithm="exhaustive")
        e = estimate_misalignment(sc, 100_000, 5, allow_degenerate=True)
        assert abs(e.p_hat - 0.5) < 4 * math.sqrt(0.25 / e.trials)

    def test_interval_coverage(self):
        sc = Scenario(l_beams=2, phi=TIED_PHI, snr_db=0.0, budget=20, algorithm="adaptive")
        covered = 0
        for seed in range(200):
            e = estimate_misalignment(sc, 300, seed, allow_degenerate=True)
            covered += e.ci_low <= 0.5 <= e.ci_high
        assert covered >= 180


class TestSweep:
    def test_singleton(self):
        sc = Scenario(snr_db=-4.0, algorithm="exhaustive")
        assert sweep([sc], 2000, 9).estimates[0] == estimate_misalignment(sc, 2000, 9)

    def test_permutation_equivariance(self):
        scs = [Scenario(snr_db=s, algorithm=a, l_beams=16, budget=160)
               for s in (-6.0, 0.0) for a in ("exhaustive", "adaptive")]
        perm = [2, 0, 3, 1]
        base = sweep(scs, 1500, 3).estimates
        moved = sweep([scs[i] for i in perm], 1500, 3).estimates
        assert moved == [base[i] for i in perm]

    def test_snr_trend(self):
        snrs = [-8.0, -4.0, 0.0, 4.0]
        for alg in ("exhaustive", "adaptive"):
            res = sweep([Scenario(snr_db=s, algorithm=alg) for s in snrs], 4000, 11).estimates
            for a, b in zip(res, res[1:]):
                assert b.p_hat <= a.ci_high

    def test_budget_trend(self):
        budgets = [640, 1280, 2560, 5120]
        for alg in ("exhaustive", "adaptive"):
            res = sweep([Scenario(budget=n, algorithm=alg) for n in budgets], 4000, 12).estimates
            for a, b in zip(res, res[1:]):
                assert b.ci_low <= a.ci_high
            assert res[-1].p_hat < res[0].p_hat

    def test_errors_carry_scenario(self):
        bad = Scenario(l_beams=2, phi=TIED_PHI, budget=20)
        with pytest.raises(DegenerateProfileError, match="scenario 1"):
            sweep([Scenario(), bad], 10, 0)
        res = sweep([Scenario(snr_db=20.0), bad], 10, 0, keep_going=True)
        assert res.estimates[1] is None and "Degenerate" in res.errors[1]
        assert res.estimates[0] is not None

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            sweep([], 10, 0)


class TestFit:
    def test_exact_exponential(self):
        c = 3.7e-4
        pts = [(n, est(math.exp(-c * n))) for n in (1000, 3000, 5000, 9000)]
        fit = fit_exponent(pts)
        assert fit.slope == pytest.approx(-c, rel=1e-9)
        assert fit.intercept == pytest.approx(0.0, abs=1e-9)
        assert fit.residual < 1e-20

    def test_zero_points_excluded(self):
        pts = [(100, est(0.2)), (200, est(0.05)), (300, est(0.0))]
        fit = fit_exponent(pts)
        assert fit.excluded == (300,) and len(fit.points) == 2
        assert fit.slope == pytest.approx((math.log(0.05) - math.log(0.2)) / 100)

    def test_insufficient(self):
        with pytest.raises(InsufficientDataError):
            fit_exponent([(100, est(0.2)), (200, est(0.0))])


@given(st.integers(1, 5000).flatmap(lambda n: st.tuples(st.integers(0, n), st.just(n))))
def test_wilson_brackets_estimate(case):
    k, n = case
    lo, hi = wilson_interval(k, n)
    assert 0.0 <= lo <= k / n <= hi <= 1.0
