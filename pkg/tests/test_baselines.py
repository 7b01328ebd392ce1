"""Committal baselines: point-utility ranker and the margin classifier."""

from __future__ import annotations

import numpy as np
import pytest

from ordpref.core import Alternative, PreferenceSet, SubsetFamily
from ordpref.lp_engine import Direction
from ordpref.baselines import (
    MarginClassifier,
    PointUtilityModel,
    SvmConfig,
    lpm_fit,
    lpm_predict,
    svm_featurize,
    svm_fit,
    svm_predict,
    svm_rows,
)

import scenarios as sc


class TestPointUtilityModel:
    def test_fit_on_compatible_family_is_consistent(self):
        model = lpm_fit(sc.RANKING_FAMILY, sc.ranking_preferences())
        assert model.consistent
        assert model.residual == pytest.approx(0.0, abs=1e-7)

    def test_consistent_fit_reproduces_every_observed_pair(self):
        prefs = sc.ranking_preferences()
        model = lpm_fit(sc.RANKING_FAMILY, prefs)
        for a, b in prefs:
            assert lpm_predict(model, a, b).direction == Direction.PREFER_FIRST

    def test_fit_on_incompatible_family_reports_slack(self):
        model = lpm_fit(SubsetFamily.singletons(4), sc.ranking_preferences())
        assert not model.consistent
        assert model.residual == pytest.approx(73.0, abs=1e-6)

    def test_identical_alternatives_tie(self):
        model = lpm_fit(sc.CHAIN_FAMILIES[0], sc.chain_preferences())
        a = Alternative.from_string("1110")
        assert lpm_predict(model, a, a).direction == Direction.NO_PREDICTION

    def test_prediction_is_antisymmetric(self):
        prefs = sc.chain_preferences()
        model = lpm_fit(sc.CHAIN_FAMILIES[0], prefs)
        flip = {
            Direction.PREFER_FIRST: Direction.PREFER_SECOND,
            Direction.PREFER_SECOND: Direction.PREFER_FIRST,
            Direction.NO_PREDICTION: Direction.NO_PREDICTION,
        }
        for a, b in prefs:
            fwd = lpm_predict(model, a, b).direction
            assert lpm_predict(model, b, a).direction == flip[fwd]

    def test_commits_where_the_cautious_route_abstains(self):
        # a single fitted vector orders almost everything; that is the
        # point of carrying it as a baseline
        prefs = sc.chain_preferences()
        model = lpm_fit(sc.CHAIN_UNION, prefs)
        a = Alternative.from_string("1000")
        b = Alternative.from_string("0100")
        assert lpm_predict(model, a, b).direction != Direction.NO_PREDICTION


class TestFeaturize:
    def test_layout(self):
        theta = sc.CHAIN_UNION
        a = Alternative.from_string("1010")
        b = Alternative.from_string("0001")
        feats = svm_featurize(theta, a, b)
        assert feats.tolist() == [1, 0, 1, 0, 0, 0, 0, 1]

    def test_rows_mirror_each_pair(self):
        xs, ys = svm_rows(sc.CHAIN_UNION, sc.chain_preferences())
        assert xs.shape == (12, 8)
        assert ys.tolist() == [1, 0] * 6
        half = len(sc.CHAIN_UNION)
        for fwd, bwd in zip(xs[0::2], xs[1::2]):
            assert np.array_equal(fwd[:half], bwd[half:])
            assert np.array_equal(fwd[half:], bwd[:half])

    def test_rows_empty_preferences(self):
        xs, ys = svm_rows(sc.CHAIN_UNION, PreferenceSet.of([]))
        assert xs.shape == (0, 8)
        assert len(ys) == 0


class TestMarginClassifier:
    def test_reproduces_small_training_set(self):
        prefs = sc.chain_preferences()
        clf = svm_fit(svm_rows(sc.CHAIN_UNION, prefs))
        for a, b in prefs:
            verdict = svm_predict(clf, sc.CHAIN_UNION, a, b)
            assert verdict.direction == Direction.PREFER_FIRST

    def test_mostly_reproduces_large_training_set(self):
        prefs = sc.ranking_preferences()
        clf = svm_fit(svm_rows(sc.RANKING_FAMILY, prefs))
        hits = sum(
            svm_predict(clf, sc.RANKING_FAMILY, a, b).direction
            == Direction.PREFER_FIRST
            for a, b in prefs
        )
        assert hits >= 0.9 * len(list(prefs))

    def test_deterministic(self):
        rows = svm_rows(sc.CHAIN_UNION, sc.chain_preferences())
        assert svm_fit(rows).weights == svm_fit(rows).weights

    def test_empty_training_set_never_commits(self):
        clf = svm_fit(svm_rows(sc.CHAIN_UNION, PreferenceSet.of([])))
        a = Alternative.from_string("1100")
        b = Alternative.from_string("0011")
        assert clf.weights == (0.0,) * 8
        verdict = svm_predict(clf, sc.CHAIN_UNION, a, b)
        assert verdict.direction == Direction.NO_PREDICTION

    def test_prediction_is_antisymmetric(self):
        prefs = sc.chain_preferences()
        clf = svm_fit(svm_rows(sc.CHAIN_UNION, prefs))
        flip = {
            Direction.PREFER_FIRST: Direction.PREFER_SECOND,
            Direction.PREFER_SECOND: Direction.PREFER_FIRST,
            Direction.NO_PREDICTION: Direction.NO_PREDICTION,
        }
        alts = [Alternative(bits, 4) for bits in range(16)]
        for a in alts[:6]:
            for b in alts[6:12]:
                fwd = svm_predict(clf, sc.CHAIN_UNION, a, b).direction
                assert svm_predict(clf, sc.CHAIN_UNION, b, a).direction == flip[fwd]

    def test_agreeing_labels_abstain(self):
        # both presentation orders labeled the same way is a non-answer
        clf = MarginClassifier(weights=(0.0,) * 8, bias=1.0)
        a = Alternative.from_string("1100")
        b = Alternative.from_string("0011")
        assert (
            svm_predict(clf, sc.CHAIN_UNION, a, b).direction
            == Direction.NO_PREDICTION
        )

    def test_config_is_carried(self):
        cfg = SvmConfig(regularization=2.0, epochs=50)
        clf = svm_fit(svm_rows(sc.CHAIN_UNION, sc.chain_preferences()), cfg)
        assert clf.config == cfg
