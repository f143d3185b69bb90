import numpy as np
import pytest

from boostcraft import (ConfigError, ResampleConfig, StrategyConfig,
                        resample, train, train_rusboost, train_smoteboost)
from boostcraft.metrics import confusion

from conftest import random_dataset


def counts(ds):
    return ds.minority_count, ds.majority_count


class TestResample:
    def test_balanced_input_is_noop(self, rng):
        ds = random_dataset(rng, n_pos=10, n_neg=10)
        for method in ("ros", "rus", "smote"):
            out = resample(ResampleConfig(method, k_neighbors=3, seed=1), ds)
            assert counts(out) == (10, 10)

    def test_target_counts(self, rng):
        ds = random_dataset(rng, n_pos=5, n_neg=20)
        assert counts(resample(ResampleConfig("ros", seed=3), ds)) == (20, 20)
        assert counts(resample(ResampleConfig("rus", seed=3), ds)) == (5, 5)
        assert counts(resample(ResampleConfig("smote", 3, seed=3), ds)) == (20, 20)

    def test_ros_superset_of_minority(self, rng):
        ds = random_dataset(rng, n_pos=5, n_neg=20)
        out = resample(ResampleConfig("ros", seed=5), ds)
        original = {tuple(row) for row in ds.features[:ds.n].tolist()}
        for row in out.features.tolist():
            assert tuple(row) in original

    def test_rus_subset(self, rng):
        ds = random_dataset(rng, n_pos=5, n_neg=20)
        out = resample(ResampleConfig("rus", seed=5), ds)
        original = {tuple(row) for row in ds.features.tolist()}
        assert all(tuple(row) in original for row in out.features.tolist())
        assert out.n == 10

    def test_smote_preserves_originals_and_interpolates(self, rng):
        ds = random_dataset(rng, n_pos=6, n_neg=18, m=2)
        out = resample(ResampleConfig("smote", k_neighbors=3, seed=9), ds)
        np.testing.assert_array_equal(out.features[:ds.n], ds.features)
        np.testing.assert_array_equal(out.labels[:ds.n], ds.labels)
        x_min = ds.features[ds.labels == 1]
        # each synthetic must sit on a segment from a minority seed to one of
        # its 3 nearest minority neighbors
        diffs = x_min[:, None, :] - x_min[None, :, :]
        dists = np.sqrt((diffs ** 2).sum(axis=2))
        np.fill_diagonal(dists, np.inf)
        nn = np.argsort(dists, axis=1, kind="stable")[:, :3]
        for synth in out.features[ds.n:]:
            ok = False
            for s_i in range(x_min.shape[0]):
                seed_pt = x_min[s_i]
                for v_i in nn[s_i]:
                    nb = x_min[v_i]
                    delta = nb - seed_pt
                    offs = synth - seed_pt
                    nz = np.abs(delta) > 1e-12
                    if not nz.any():
                        continue
                    lam = offs[nz][0] / delta[nz][0]
                    if -1e-9 <= lam < 1.0 and np.allclose(
                            offs, lam * delta, atol=1e-9):
                        ok = True
                        break
                if ok:
                    break
            assert ok, f"synthetic {synth} is not a k-NN interpolation"

    def test_smote_requires_enough_neighbors(self, rng):
        ds = random_dataset(rng, n_pos=3, n_neg=12)
        with pytest.raises(ConfigError):
            resample(ResampleConfig("smote", k_neighbors=3, seed=0), ds)

    def test_determinism(self, rng):
        ds = random_dataset(rng, n_pos=6, n_neg=20)
        a = resample(ResampleConfig("smote", 3, seed=11), ds)
        b = resample(ResampleConfig("smote", 3, seed=11), ds)
        np.testing.assert_array_equal(a.features, b.features)

    def test_unknown_method(self):
        with pytest.raises(ConfigError):
            ResampleConfig("bogus")

    def test_rejects_inverted_class_convention(self, rng):
        ds = random_dataset(rng, n_pos=20, n_neg=10)
        with pytest.raises(ConfigError, match="minority"):
            resample(ResampleConfig("ros", seed=0), ds)
        with pytest.raises(ConfigError, match="minority"):
            train_rusboost(ds, 5, seed=0)


class TestHybridBoosting:
    def test_rusboost_on_balanced_data_matches_adaboost(self, rng):
        ds = random_dataset(rng, n_pos=15, n_neg=15, separation=0.5)
        base = train(StrategyConfig("adaboost", 8), ds)
        hybrid = train_rusboost(ds, 8, seed=3)
        assert [(m.stump, m.alpha) for m in hybrid.members] == \
               [(m.stump, m.alpha) for m in base.members]

    def test_smoteboost_on_balanced_data_matches_adaboost(self, rng):
        ds = random_dataset(rng, n_pos=15, n_neg=15, separation=0.5)
        base = train(StrategyConfig("adaboost", 8), ds)
        hybrid = train_smoteboost(ds, 8, k=5, seed=3)
        assert [(m.stump, m.alpha) for m in hybrid.members] == \
               [(m.stump, m.alpha) for m in base.members]

    def test_rusboost_improves_training_recall(self, rng):
        # overlapping 1:10 blobs where plain boosting cannot fit the minority
        ds = random_dataset(rng, n_pos=50, n_neg=500, m=2, separation=0.4)
        base = train(StrategyConfig("adaboost", 50), ds)
        hybrid = train_rusboost(ds, 50, seed=1)
        tpr = lambda ens: confusion(ens.predict(ds.features), ds.labels).tp \
            / ds.minority_count
        assert tpr(base) < 1.0
        assert tpr(hybrid) >= tpr(base)

    def test_smoteboost_improves_training_recall(self, rng):
        ds = random_dataset(rng, n_pos=50, n_neg=500, m=2, separation=0.4)
        base = train(StrategyConfig("adaboost", 50), ds)
        hybrid = train_smoteboost(ds, 50, k=5, seed=1)
        tpr = lambda ens: confusion(ens.predict(ds.features), ds.labels).tp \
            / ds.minority_count
        assert tpr(base) < 1.0
        assert tpr(hybrid) >= tpr(base)

    def test_smoteboost_k_boundary(self, rng):
        ds = random_dataset(rng, n_pos=6, n_neg=24)
        ens = train_smoteboost(ds, 5, k=5, seed=0)  # k = minority - 1
        assert len(ens) >= 1
        with pytest.raises(ConfigError):
            train_smoteboost(ds, 5, k=6, seed=0)

    def test_determinism(self, rng):
        ds = random_dataset(rng, n_pos=8, n_neg=40)
        a = train_rusboost(ds, 10, seed=4).to_json()
        b = train_rusboost(ds, 10, seed=4).to_json()
        assert a == b
