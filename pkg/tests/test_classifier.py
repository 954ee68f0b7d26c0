import numpy as np
import pytest

from cryptolab.classifier import (
    MODEL_KINDS,
    Dataset,
    aggregate_website,
    evaluate,
    macro_scores,
    predict,
    stratified_split,
    synthetic_dataset,
    train,
)
from cryptolab.classifier.models import LogisticRegression


def blobs(n=30, d=4, gap=6.0, seed=0, k=2):
    rng = np.random.default_rng(seed)
    X = np.vstack([rng.normal(size=(n, d)) + gap * np.eye(d)[c] for c in range(k)])
    y = np.repeat(np.arange(k), n)
    return Dataset(X, y, tuple(f"c{c}" for c in range(k)))


class TestDataset:
    def test_nan_rejected(self):
        with pytest.raises(ValueError):
            Dataset(np.array([[np.nan, 1.0], [1.0, 2.0]]), np.array([0, 1]), ("a", "b"))

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            Dataset(np.zeros((3, 2)), np.array([0, 1]), ("a", "b"))

    def test_from_labelled(self):
        d = Dataset.from_labelled([[1], [2], [3]], ["x", "y", "x"])
        assert d.class_names == ("x", "y")
        assert list(d.labels) == [0, 1, 0]


class TestTrainPredict:
    def test_single_class_rejected(self):
        d = Dataset(np.zeros((4, 2)), np.zeros(4, dtype=int), ("a", "b"))
        with pytest.raises(ValueError):
            train("lr", d)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            train("mlp", blobs())

    def test_lr_loss_decreases_monotonically(self):
        d = blobs()
        model = train("lr", d)
        hist = model.estimator.loss_history
        assert len(hist) > 10
        assert all(b <= a for a, b in zip(hist, hist[1:]))

    def test_lr_stops_on_relative_change(self):
        lr = LogisticRegression(max_iter=5000)
        X = np.array([[0.0], [1.0], [0.1], [0.9]])
        lr.fit(X, np.array([0, 1, 1, 0]), 2)
        assert len(lr.loss_history) <= 5001

    def test_knn_memorizes(self):
        d = blobs(gap=0.5)
        model = train("knn", d, {"k": 1})
        assert np.array_equal(model.predict_many(d.samples), d.labels)

    def test_knn_single_sample_class(self):
        d = Dataset(np.array([[0.0, 0.0], [5.0, 5.0]]), np.array([0, 1]), ("A", "B"))
        model = train("knn", d, {"k": 1})
        assert predict(model, [0.1, -0.2]) == 0
        assert predict(model, [4.0, 6.0]) == 1

    def test_knn_vote_tie_goes_to_lowest_id(self):
        d = Dataset(np.array([[-1.0], [1.0]]), np.array([1, 0]), ("A", "B"))
        model = train("knn", d, {"k": 2})
        assert predict(model, [0.0]) == 0

    @pytest.mark.parametrize("metric", ["euclidean", "manhattan"])
    def test_knn_metrics(self, metric):
        d = blobs()
        model = train("knn", d, {"knn_metric": metric})
        assert (model.predict_many(d.samples) == d.labels).mean() == 1.0

    def test_lda_midpoint_tie(self):
        X = np.array([[-2.0, 0.0], [-1.0, 1.0], [-1.0, -1.0], [2.0, 0.0], [1.0, 1.0], [1.0, -1.0]])
        d = Dataset(X, np.array([0, 0, 0, 1, 1, 1]), ("A", "B"))
        model = train("lda", d)
        assert predict(model, [0.0, 0.0]) == 0
        assert predict(model, [0.5, 0.0]) == 1

    def test_lda_singular_covariance_survives(self):
        X = np.array([[1.0, 2.0, 2.0], [2.0, 4.0, 2.0], [8.0, 16.0, 2.0], [9.0, 18.0, 2.0]])
        d = Dataset(X, np.array([0, 0, 1, 1]), ("a", "b"))
        model = train("lda", d)
        assert list(model.predict_many(X)) == [0, 0, 1, 1]

    def test_rf_deterministic(self):
        d = blobs(gap=1.5)
        m1 = train("rf", d, seed=4)
        m2 = train("rf", d, seed=4)
        q = np.random.default_rng(9).normal(size=(20, 4))
        assert np.array_equal(m1.predict_many(q), m2.predict_many(q))
        assert np.array_equal(m1.predict_many(q), m1.predict_many(q))

    def test_rf_max_depth(self):
        d = blobs(gap=1.0, k=3)
        model = train("rf", d, {"max_depth": 1, "n_trees": 5})
        assert all(len(t.feature) <= 3 for t in model.estimator.trees)

    def test_width_mismatch(self):
        model = train("lr", blobs())
        with pytest.raises(ValueError):
            predict(model, [1.0, 2.0])

    @pytest.mark.parametrize("kind, floor", [("lr", 1.0), ("lda", 1.0), ("knn", 1.0), ("svm", 1.0), ("rf", 1.0)])
    def test_training_accuracy_on_separable(self, kind, floor):
        d = blobs(k=3)
        model = train(kind, d)
        assert (model.predict_many(d.samples) == d.labels).mean() >= floor

    @pytest.mark.parametrize("kind", ["knn", "lr", "lda", "svm"])
    def test_standardization_invariance(self, kind):
        d = blobs(gap=1.2, k=3, seed=2)
        scale = np.array([1e3, 0.01, 7.0, 1.0])
        scaled = Dataset(d.samples * scale, d.labels, d.class_names)
        q = np.random.default_rng(5).normal(size=(40, 4)) * 3
        a = train(kind, d)
        b = train(kind, scaled)
        if kind == "knn":
            assert np.array_equal(a.predict_many(q), b.predict_many(q * scale))
        else:
            da = a.estimator.decision(a.standardizer.transform(q))
            db = b.estimator.decision(b.standardizer.transform(q * scale))
            np.testing.assert_allclose(da, db, atol=1e-6)


class TestEvaluate:
    def test_macro_scores(self):
        s = macro_scores([0, 0, 1, 1], [0, 1, 1, 1], 2)
        # class0: p=1, r=.5, f=2/3; class1: p=2/3, r=1, f=.8
        assert s.precision == pytest.approx((1 + 2 / 3) / 2)
        assert s.recall == pytest.approx(0.75)
        assert s.f1 == pytest.approx((2 / 3 + 0.8) / 2)

    def test_macro_f1_zero_case(self):
        assert macro_scores([0, 0], [1, 1], 2).f1 == 0.0

    def test_macro_f1_between_class_extremes(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            t = rng.integers(0, 3, 30)
            p = rng.integers(0, 3, 30)
            s = macro_scores(t, p, 3)
            f1s = []
            for k in range(3):
                tp = np.sum((p == k) & (t == k))
                prec = tp / max(np.sum(p == k), 1)
                rec = tp / max(np.sum(t == k), 1)
                f1s.append(2 * prec * rec / (prec + rec) if prec + rec else 0.0)
            assert min(f1s) - 1e-12 <= s.f1 <= max(f1s) + 1e-12

    def test_stratified_split(self):
        labels = np.repeat([0, 1, 2], [8, 10, 10])
        tr, te = stratified_split(labels, 0.75, np.random.default_rng(0))
        assert len(set(tr) & set(te)) == 0 and len(tr) + len(te) == 28
        assert list(np.bincount(labels[tr])) == [6, 8, 8]

    def test_separable_gives_perfect_scores(self):
        rep = evaluate(blobs(n=20, k=3, gap=10), kinds=["lr", "lda"], repetitions=5, seed=1)
        for s in rep.scores.values():
            assert (s.precision, s.recall, s.f1) == (1.0, 1.0, 1.0)

    def test_chance_level(self):
        rng = np.random.default_rng(11)
        X = rng.normal(size=(200, 5))
        y = rng.permutation(np.repeat([0, 1], 100))
        rep = evaluate(Dataset(X, y, ("a", "b")), kinds=["lr"], repetitions=20, seed=3)
        assert rep.scores["lr"].f1 == pytest.approx(0.5, abs=0.1)

    def test_deterministic(self):
        d = synthetic_dataset(10, seed=2)
        a = evaluate(d, repetitions=1, seed=7, kinds=["knn", "rf"])
        b = evaluate(d, repetitions=1, seed=7, kinds=["knn", "rf"])
        assert a.scores == b.scores

    def test_parallel_matches_serial(self):
        d = synthetic_dataset(10, seed=2)
        a = evaluate(d, repetitions=4, seed=7, kinds=["lda", "knn"])
        b = evaluate(d, repetitions=4, seed=7, kinds=["lda", "knn"], jobs=3)
        assert a.per_repetition == b.per_repetition

    def test_tiny_class_rejected(self):
        d = Dataset(np.zeros((5, 2)), np.array([0, 0, 0, 0, 1]), ("big", "lonely"))
        with pytest.raises(ValueError, match="lonely"):
            evaluate(d)

    def test_report_csv(self):
        import io

        rep = evaluate(blobs(n=10), kinds=list(MODEL_KINDS), repetitions=1)
        buf = io.StringIO()
        rep.write_csv(buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "model,F1,precision,recall"
        assert [l.split(",")[0] for l in lines[1:]] == ["LR", "LDA", "k-NN", "SVM", "RF"]


def test_website_aggregation():
    agg = aggregate_website([[1.0, 2.0], [3.0, 6.0]])
    assert list(agg) == [2.0, 4.0]
    assert list(aggregate_website([[3.0, 6.0], [1.0, 2.0]])) == [2.0, 4.0]
    with pytest.raises(ValueError):
        aggregate_website([])


def test_synthetic_shape():
    d = synthetic_dataset(40, seed=0)
    assert d.samples.shape == (120, 17)
    assert d.class_names == ("cryptojacking", "malicious", "benign")
