import math

import numpy as np
import pytest
from scipy.optimize import minimize

from boostcraft import (ConfigError, CumulativeTracker, Dataset,
                        MissingDiagnostics, StrategyConfig,
                        TrainingDegenerate, compute_alpha, continuation_check,
                        fit_platt_sigmoid, per_learner_costs, reweight, train,
                        train_stump, training_error_bound,
                        update_cumulative_costs)
from boostcraft.boosting import RoundStats, adacost_betas

from conftest import random_dataset


def stats(**kw):
    base = dict(correct_mass=0.0, wrong_mass=0.0)
    base.update(kw)
    return RoundStats(**base)


class TestComputeAlpha:
    def test_adaboost_quarter_error(self):
        s = stats(correct_mass=0.75, wrong_mass=0.25)
        assert compute_alpha("adaboost", s) == pytest.approx(0.5 * math.log(3),
                                                             abs=1e-12)

    def test_adaboost_half_error_stops(self):
        s = stats(correct_mass=0.5, wrong_mass=0.5)
        assert compute_alpha("adaboost", s) == pytest.approx(0.0)
        assert not continuation_check("adaboost", s)

    def test_adacc2_cost_masses(self):
        s = stats(correct_mass=0.8, wrong_mass=0.2, cost_correct_mass=0.8,
                  cost_wrong_mass=0.2)
        assert compute_alpha("adacc2", s) == pytest.approx(0.5 * math.log(4),
                                                           abs=1e-12)

    def test_adacc1_unit_costs_match_adaboost(self):
        s = stats(correct_mass=0.7, wrong_mass=0.3, cost_correct_mass=0.7,
                  cost_wrong_mass=0.3)
        assert compute_alpha("adacc1", s) == pytest.approx(
            compute_alpha("adaboost", s), abs=1e-12)

    def test_rareboost_pair(self):
        s = stats(tp_mass=0.4, fp_mass=0.1, tn_mass=0.4, fn_mass=0.1)
        a_pos, a_neg = compute_alpha("rareboost", s)
        assert a_pos == pytest.approx(0.5 * math.log(4))
        assert a_neg == pytest.approx(0.5 * math.log(4))


class TestContinuation:
    def test_cost_mass_majority_proceeds(self):
        s = stats(cost_correct_mass=0.6, cost_wrong_mass=0.4)
        assert continuation_check("adacc1", s)
        assert continuation_check("adacc2", s)

    def test_cost_mass_minority_stops(self):
        s = stats(cost_correct_mass=0.4, cost_wrong_mass=0.6)
        assert not continuation_check("adacc1", s)
        assert not continuation_check("adacc2", s)

    def test_rareboost_tp_le_fp_stops(self):
        s = stats(tp_mass=0.3, fp_mass=0.3, tn_mass=0.3, fn_mass=0.1)
        assert not continuation_check("rareboost", s)


class TestReweight:
    def test_adaboost_hand_case(self):
        # uniform pair, alpha = 0.5*ln3, first correct second wrong:
        # unnormalized [0.5*3^-0.5, 0.5*3^0.5] -> [0.25, 0.75]
        alpha = 0.5 * math.log(3)
        out = reweight("adaboost", [0.5, 0.5], None, alpha,
                       np.array([1, 1]), np.array([1, -1]))
        np.testing.assert_allclose(out, [0.25, 0.75], atol=1e-12)

    def test_adacc1_unit_costs_equals_adaboost(self, rng):
        w = rng.uniform(0.1, 1.0, size=6)
        w /= w.sum()
        preds = rng.choice([1, -1], size=6)
        labels = rng.choice([1, -1], size=6)
        out_cc = reweight("adacc1", w, np.ones(6), 0.4, preds, labels)
        out_ab = reweight("adaboost", w, None, 0.4, preds, labels)
        np.testing.assert_allclose(out_cc, out_ab, atol=1e-12)

    def test_adacc2_hand_case(self):
        # independent evaluation of the cost-outside update
        w = np.array([0.5, 0.5])
        costs = np.array([1.4, 1.0])
        alpha = 0.5
        preds = np.array([-1, -1])
        labels = np.array([1, -1])
        raw = np.array([0.5 * 1.4 * math.exp(0.5), 0.5 * math.exp(-0.5)])
        expected = raw / raw.sum()
        out = reweight("adacc2", w, costs, alpha, preds, labels)
        np.testing.assert_allclose(out, expected, atol=1e-12)
        np.testing.assert_allclose(out, [0.79190920341962, 0.2080907965803799],
                                   atol=1e-9)

    def test_csb1_has_no_alpha_in_exponent(self):
        w = np.array([0.5, 0.5])
        costs = np.array([1.0, 0.5])
        preds = np.array([1, 1])
        labels = np.array([1, -1])
        # alpha must not matter for the csb1 update
        out_a = reweight("csb1", w, costs, 0.1, preds, labels)
        out_b = reweight("csb1", w, costs, 5.0, preds, labels)
        np.testing.assert_allclose(out_a, out_b, atol=1e-15)
        raw = np.array([0.5 * 1.0 * math.exp(-1.0), 0.5 * 0.5 * math.exp(1.0)])
        np.testing.assert_allclose(out_a, raw / raw.sum(), atol=1e-12)

    def test_adacost_beta_update(self):
        w = np.array([0.5, 0.5])
        costs = np.array([1.0, 0.5])
        preds = np.array([-1, -1])
        labels = np.array([1, -1])
        alpha = 0.3
        betas = adacost_betas(costs, preds != labels)
        np.testing.assert_allclose(betas, [0.5 * (1 + 1.0), 0.5 * (1 - 0.5)])
        raw = w * np.exp(-alpha * preds * labels * betas)
        out = reweight("adacost", w, costs, alpha, preds, labels)
        np.testing.assert_allclose(out, raw / raw.sum(), atol=1e-12)


class TestCumulativeCosts:
    def make_tracker(self, margins, labels):
        tracker = CumulativeTracker(np.asarray(labels))
        tracker.update(np.asarray(margins, dtype=float))
        return tracker

    def test_equal_rates_give_unit_costs(self):
        labels = np.array([1, 1, -1, -1])
        tracker = self.make_tracker([-1.0, 1.0, 1.0, -1.0], labels)
        assert tracker.rates() == (0.5, 0.5)
        costs = tracker.costs(np.array([True, True, True, True]))
        np.testing.assert_array_equal(costs, np.ones(4))

    def test_fnr_dominant_boosts_misclassified_positives(self):
        labels = np.array([1] * 5 + [-1] * 10)
        # 2 of 5 positives wrong (margin <= 0), 1 of 10 negatives wrong
        margins = np.array([-1.0, -1.0, 1.0, 1.0, 1.0]
                           + [1.0] + [-1.0] * 9)
        tracker = self.make_tracker(margins, labels)
        assert tracker.rates() == (0.4, 0.1)
        miss = np.zeros(15, dtype=bool)
        miss[0] = True   # misclassified positive
        miss[5] = True   # misclassified negative
        costs = tracker.costs(miss)
        assert costs[0] == pytest.approx(1.4)
        assert costs[5] == pytest.approx(1.0)
        assert np.all(costs[1:] == costs[5:6])

    def test_fpr_dominant_boosts_misclassified_negatives(self):
        labels = np.array([1] * 5 + [-1] * 10)
        margins = np.array([1.0] * 5 + [1.0, 1.0, 1.0] + [-1.0] * 7)
        tracker = self.make_tracker(margins, labels)
        assert tracker.rates() == (0.0, 0.3)
        miss = np.zeros(15, dtype=bool)
        miss[5] = True
        costs = tracker.costs(miss)
        assert costs[5] == pytest.approx(1.3)
        assert np.all(costs[:5] == 1.0)

    def test_empty_tracker_gives_unit_costs(self):
        tracker = CumulativeTracker(np.array([1, -1]))
        costs = tracker.costs(np.array([True, True]))
        np.testing.assert_array_equal(costs, [1.0, 1.0])

    def test_update_op_uses_current_learner_misses(self):
        labels = np.array([1, 1, -1, -1])
        tracker = CumulativeTracker(labels)
        preds = np.array([-1, 1, -1, -1])  # one positive missed
        costs = update_cumulative_costs(tracker, 0.7, preds, labels)
        assert tracker.rates() == (0.5, 0.0)
        np.testing.assert_allclose(costs, [1.5, 1.0, 1.0, 1.0])

    def test_costs_in_unit_interval_and_single_class(self, rng):
        # support of costs above 1 is a subset of the current learner's
        # mistakes and always a single class
        ds = random_dataset(rng, n_pos=10, n_neg=40, separation=0.4)
        tracker = CumulativeTracker(ds.labels)
        weights = np.full(ds.n, 1.0 / ds.n)
        for _ in range(10):
            result = train_stump(ds, weights)
            preds = result.stump.predict(ds.features)
            costs = update_cumulative_costs(tracker, 0.5, preds, ds.labels)
            assert np.all((costs >= 1.0) & (costs <= 2.0))
            boosted = costs > 1.0
            assert not np.any(boosted & (preds == ds.labels))
            assert len(set(ds.labels[boosted].tolist())) <= 1
            weights = reweight("adacc1", weights, costs, 0.5, preds, ds.labels)

    def test_per_learner_costs(self):
        labels = np.array([1, 1, -1, -1])
        preds = np.array([-1, 1, -1, -1])
        costs = per_learner_costs(preds, labels)
        np.testing.assert_allclose(costs, [1.5, 1.0, 1.0, 1.0])


class TestTrainLoop:
    def test_separable_stops_after_one_round(self):
        ds = Dataset([[0.0], [1.0], [2.0], [3.0]], [-1, -1, 1, 1])
        ens = train(StrategyConfig("adaboost", 5), ds)
        assert len(ens) == 1
        np.testing.assert_array_equal(ens.predict(ds.features), ds.labels)

    def test_degenerate_first_round(self):
        ds = Dataset([[5.0], [5.0], [5.0], [5.0]], [1, -1, 1, -1])
        with pytest.raises(TrainingDegenerate):
            train(StrategyConfig("adaboost", 5), ds)

    def test_config_validation(self):
        with pytest.raises(ConfigError):
            StrategyConfig("adacc1", 10, fixed_costs=(1.0, 0.5))
        with pytest.raises(ConfigError):
            StrategyConfig("adac1", 10)
        with pytest.raises(ConfigError):
            StrategyConfig("adac1", 10, fixed_costs=(0.5, 1.0))
        with pytest.raises(ConfigError):
            StrategyConfig("nosuch", 10)
        with pytest.raises(ConfigError):
            StrategyConfig("adaboost", 0)

    def test_unit_cost_family_reduces_to_adaboost(self, rng):
        ds = random_dataset(rng, n_pos=12, n_neg=36, separation=0.6)
        base_trace = []
        base = train(StrategyConfig("adaboost", 12), ds,
                     weight_trace=base_trace)
        for sid in ("adac1", "adac2", "adac3", "csb2", "cgada"):
            trace = []
            ens = train(StrategyConfig(sid, 12, fixed_costs=(1.0, 1.0)), ds,
                        weight_trace=trace)
            assert len(ens) == len(base)
            for (a, w), (b, v) in zip(trace, base_trace):
                assert abs(a - b) < 1e-9
                np.testing.assert_allclose(w, v, atol=1e-9)

    def test_forced_unit_costs_reduce_adacc_to_adaboost(self, rng):
        ds = random_dataset(rng, n_pos=12, n_neg=36, separation=0.6)
        base_trace = []
        train(StrategyConfig("adaboost", 12), ds, weight_trace=base_trace)
        for sid in ("adacc1", "adacc2", "adan_cc1", "adan_cc2"):
            trace = []
            train(StrategyConfig(sid, 12), ds, force_unit_costs=True,
                  weight_trace=trace)
            for (a, w), (b, v) in zip(trace, base_trace):
                assert abs(a - b) < 1e-9
                np.testing.assert_allclose(w, v, atol=1e-9)

    def test_adacc_boosts_misclassified_minority_in_round_one(self, rng):
        # 5-vs-20 layout: after round 1 every misclassified minority point
        # outweighs every majority point
        ds = random_dataset(rng, n_pos=5, n_neg=20, separation=0.5)
        for sid in ("adacc1", "adacc2"):
            trace = []
            train(StrategyConfig(sid, 2), ds, weight_trace=trace)
            _, weights = trace[0]
            first = train_stump(ds, np.full(ds.n, 1.0 / ds.n))
            preds = first.stump.predict(ds.features)
            missed_pos = (preds != ds.labels) & (ds.labels == 1)
            if missed_pos.any() and np.sum(missed_pos) / 5 > \
                    np.sum((preds != ds.labels) & (ds.labels == -1)) / 20:
                assert weights[missed_pos].min() > weights[ds.labels == -1].max()

    def test_all_alphas_positive_across_strategies(self, rng):
        ds = random_dataset(rng, n_pos=10, n_neg=40, separation=0.3)
        for sid in ("adaboost", "adacc1", "adacc2", "adan_cc1", "adan_cc2",
                    "rareboost"):
            ens = train(StrategyConfig(sid, 15), ds)
            for member in ens.members:
                assert member.alpha > 0
                if member.alpha_neg is not None:
                    assert member.alpha_neg > 0
        for sid in ("cgada", "csb1", "csb2", "adacost", "adac1", "adac2",
                    "adac3", "adamec"):
            ens = train(StrategyConfig(sid, 15, fixed_costs=(1.0, 0.4)), ds)
            for member in ens.members:
                assert member.alpha > 0

    def test_determinism(self, rng):
        ds = random_dataset(rng, n_pos=8, n_neg=30)
        a = train(StrategyConfig("adacc1", 20), ds).to_json()
        b = train(StrategyConfig("adacc1", 20), ds).to_json()
        assert a == b

    def test_weight_distribution_stays_normalized(self, rng):
        from boostcraft.boosting import FIXED_COST, STRATEGY_IDS
        ds = random_dataset(rng, n_pos=8, n_neg=32, separation=0.4)
        for sid in STRATEGY_IDS:
            costs = (1.0, 0.4) if sid in FIXED_COST else None
            trace = []
            train(StrategyConfig(sid, 10, fixed_costs=costs), ds,
                  weight_trace=trace)
            for _, weights in trace:
                assert abs(weights.sum() - 1.0) < 1e-9, sid
                assert np.all(weights > 0), sid

    def test_adamec_wraps_adaboost_members(self, rng):
        ds = random_dataset(rng, n_pos=10, n_neg=30, separation=0.4)
        base = train(StrategyConfig("adaboost", 10), ds)
        wrapped = train(StrategyConfig("adamec", 10, fixed_costs=(1.0, 0.25)),
                        ds)
        assert [m.stump for m in wrapped.members] == \
               [m.stump for m in base.members]
        assert wrapped.decision_shift == (0.8, 0.2)

    def test_rareboost_confusion_masses(self):
        # one axis split with known confusion: tp=2/6, fp=1/6, tn=2/6, fn=1/6
        X = [[2.0], [2.0], [0.0], [2.0], [0.0], [0.0]]
        y = [1, 1, 1, -1, -1, -1]
        ds = Dataset(X, y)
        ens = train(StrategyConfig("rareboost", 1), ds)
        member = ens.members[0]
        assert member.alpha == pytest.approx(0.5 * math.log(2.0))
        assert member.alpha_neg == pytest.approx(0.5 * math.log(2.0))

    def test_rareboost_decision_uses_both_alphas(self, rng):
        ds = random_dataset(rng, n_pos=10, n_neg=40, separation=0.5)
        ens = train(StrategyConfig("rareboost", 10), ds)
        scores = ens.raw_score(ds.features)
        expected = np.zeros(ds.n)
        for member in ens.members:
            preds = member.stump.predict(ds.features)
            expected += np.where(preds > 0, member.alpha * preds,
                                 member.alpha_neg * preds)
        np.testing.assert_allclose(scores, expected, atol=1e-12)


class TestTrackerEquivalence:
    def test_incremental_equals_replay(self, rng):
        ds = random_dataset(rng, n_pos=10, n_neg=30, separation=0.4)
        ens = train(StrategyConfig("adacc1", 12), ds)
        clone = type(ens).from_json(ens.to_json())
        margin = np.zeros(ds.n)
        replayed = []
        for member in clone.members:
            margin = margin + member.vote(member.stump.predict(ds.features))
            predicted_pos = margin > 0
            fnr = np.sum(~predicted_pos & (ds.labels == 1)) / ds.minority_count
            fpr = np.sum(predicted_pos & (ds.labels == -1)) / ds.majority_count
            replayed.append((float(fnr), float(fpr)))
        logged = [(rec.cum_fnr, rec.cum_fpr) for rec in ens.diagnostics
                  if rec.round >= 1]
        assert logged == replayed


class TestErrorBound:
    def test_bound_holds(self, rng):
        for sid in ("adacc1", "adacc2"):
            for sep in (0.2, 0.6, 1.2):
                ds = random_dataset(rng, n_pos=10, n_neg=50, separation=sep)
                ens = train(StrategyConfig(sid, 25), ds)
                error, product = training_error_bound(ens, ds)
                assert error <= product

    def test_single_round_closed_form(self, rng):
        ds = random_dataset(rng, n_pos=10, n_neg=30, separation=0.3)
        eps = train_stump(ds, np.full(ds.n, 1.0 / ds.n)).weighted_error
        ens = train(StrategyConfig("adacc1", 1), ds, force_unit_costs=True)
        _, product = training_error_bound(ens, ds)
        assert product == pytest.approx(2 * math.sqrt(eps * (1 - eps)),
                                        abs=1e-10)

    def test_missing_diagnostics(self, rng):
        ds = random_dataset(rng)
        ens = train(StrategyConfig("adacc1", 5), ds, record_diagnostics=False)
        with pytest.raises(MissingDiagnostics):
            training_error_bound(ens, ds)


class TestPlatt:
    def test_separated_scores(self):
        scores = np.array([5.0] * 8 + [-5.0] * 8)
        labels = np.array([1] * 8 + [-1] * 8)
        a, b = fit_platt_sigmoid(scores, labels)
        assert a < 0
        p_mid = 1.0 / (1.0 + math.exp(b))
        assert 0.4 <= p_mid <= 0.6

    def test_flat_scores_give_base_rate(self):
        scores = np.zeros(30)
        labels = np.array([1] * 10 + [-1] * 20)
        a, b = fit_platt_sigmoid(scores, labels)
        hi, lo = 11 / 12, 1 / 22
        target_mean = (10 * hi + 20 * lo) / 30
        assert abs(a) < 1e-6
        assert 1.0 / (1.0 + math.exp(b)) == pytest.approx(target_mean,
                                                          abs=1e-4)

    def test_matches_independent_optimizer(self, rng):
        scores = rng.normal(size=60) + np.repeat([1.0, -1.0], 30)
        labels = np.repeat([1, -1], 30)
        a, b = fit_platt_sigmoid(scores, labels)
        n_pos = n_neg = 30
        hi, lo = (n_pos + 1) / (n_pos + 2), 1 / (n_neg + 2)
        target = np.where(labels == 1, hi, lo)

        def nll(theta):
            f = theta[0] * scores + theta[1]
            return float(np.sum(np.logaddexp(0, f) - (1 - target) * f
                                - np.logaddexp(0, f) * 0))

        def nll2(theta):
            f = theta[0] * scores + theta[1]
            # (t-1)f + log(1+exp(f)) summed, the same objective
            return float(np.sum((target - 1) * f + np.logaddexp(0.0, f)))

        res = minimize(nll2, x0=[0.0, 0.0], method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-12,
                                "maxiter": 5000})
        assert a == pytest.approx(res.x[0], abs=1e-3)
        assert b == pytest.approx(res.x[1], abs=1e-3)

    def test_iteration_cap_raises(self):
        from boostcraft import CalibrationFailed
        scores = np.array([1.0, 2.0, -1.0, -2.0])
        labels = np.array([1, 1, -1, -1])
        with pytest.raises(CalibrationFailed):
            fit_platt_sigmoid(scores, labels, max_iter=0)

    def test_calibration_preserves_ranking(self, rng):
        ds = random_dataset(rng, n_pos=15, n_neg=45, separation=0.6)
        ens = train(StrategyConfig("cgada_cal", 10, fixed_costs=(1.0, 0.5)),
                    ds)
        raw = ens.raw_score(ds.features)
        prob = ens.probability(ds.features)
        order = np.argsort(raw)
        assert np.all(np.diff(prob[order]) >= -1e-12)


class TestDiagnosticsLog:
    def test_round_zero_and_columns(self, rng):
        ds = random_dataset(rng, n_pos=10, n_neg=30)
        ens = train(StrategyConfig("adaboost", 5), ds)
        rec0 = ens.diagnostics[0]
        assert rec0.round == 0
        assert rec0.minority_weight_mass == pytest.approx(10 / 40)
        assert rec0.balanced_error == pytest.approx(0.5)
        assert ens.diagnostics[1].round == 1

    def test_csv_round_trip(self, tmp_path, rng):
        from boostcraft import read_diagnostics_csv, write_diagnostics_csv
        ds = random_dataset(rng)
        ens = train(StrategyConfig("adacc1", 8), ds)
        path = tmp_path / "diag.csv"
        write_diagnostics_csv(ens.diagnostics, path)
        back = read_diagnostics_csv(path)
        assert back == list(ens.diagnostics)
