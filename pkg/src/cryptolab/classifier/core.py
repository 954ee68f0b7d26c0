from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import IO, Any, Sequence

import numpy as np

from .models import KNN, LDA, LinearSVM, LogisticRegression, RandomForest

MODEL_KINDS = ("lr", "lda", "knn", "svm", "rf")
MODEL_TITLES = {"lr": "LR", "lda": "LDA", "knn": "k-NN", "svm": "SVM", "rf": "RF"}


@dataclass(frozen=True)
class Dataset:
    samples: np.ndarray
    labels: np.ndarray
    class_names: tuple[str, ...]

    def __post_init__(self):
        X = np.asarray(self.samples, dtype=float)
        y = np.asarray(self.labels, dtype=int)
        if X.ndim != 2:
            raise ValueError("samples must be a 2-D array")
        if len(X) != len(y):
            raise ValueError(f"{len(X)} samples but {len(y)} labels")
        if not np.all(np.isfinite(X)):
            raise ValueError("samples contain NaN or infinite values")
        if len(self.class_names) < 2:
            raise ValueError("a dataset needs at least two classes")
        if len(y) and (y.min() < 0 or y.max() >= len(self.class_names)):
            raise ValueError("label id out of range")
        object.__setattr__(self, "samples", X)
        object.__setattr__(self, "labels", y)

    @classmethod
    def from_labelled(cls, rows: Sequence[Sequence[float]], labels: Sequence[str], class_names=None) -> "Dataset":
        names = tuple(class_names) if class_names is not None else tuple(dict.fromkeys(labels))
        index = {n: i for i, n in enumerate(names)}
        unknown = sorted(set(labels) - set(index))
        if unknown:
            raise ValueError(f"labels not in class list: {unknown}")
        return cls(np.asarray(rows, dtype=float), np.array([index[l] for l in labels]), names)

    def subset(self, idx) -> "Dataset":
        return Dataset(self.samples[idx], self.labels[idx], self.class_names)


@dataclass(frozen=True)
class Standardizer:
    mean: np.ndarray
    scale: np.ndarray

    @classmethod
    def fit(cls, X: np.ndarray) -> "Standardizer":
        mean = X.mean(axis=0)
        scale = X.std(axis=0)
        scale = np.where(scale > 0, scale, 1.0)
        return cls(mean, scale)

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (np.asarray(X, dtype=float) - self.mean) / self.scale


def _make_estimator(kind: str, hp: dict[str, Any]):
    if kind == "lr":
        return LogisticRegression(l2=hp.get("l2", 1e-4), max_iter=hp.get("max_iter", 5000), tol=hp.get("tol", 1e-8))
    if kind == "lda":
        return LDA(ridge=hp.get("ridge", 1e-6))
    if kind == "knn":
        return KNN(k=hp.get("k", 3), metric=hp.get("knn_metric", "euclidean"))
    if kind == "svm":
        return LinearSVM(C=hp.get("C", 1.0), max_iter=hp.get("svm_iter", 1000))
    if kind == "rf":
        return RandomForest(n_trees=hp.get("n_trees", 100), max_depth=hp.get("max_depth"))
    raise ValueError(f"unknown model kind {kind!r}; choose from {', '.join(MODEL_KINDS)}")


@dataclass(frozen=True)
class Model:
    kind: str
    standardizer: Standardizer
    estimator: Any
    n_features: int
    class_names: tuple[str, ...]

    def predict_many(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.n_features:
            raise ValueError(f"expected {self.n_features} features, got {X.shape[1]}")
        return self.estimator.predict(self.standardizer.transform(X))


def train(kind: str, data: Dataset, hyperparameters: dict[str, Any] | None = None, seed: int = 0) -> Model:
    """Fit one model; features are standardized with this dataset's statistics."""
    hp = dict(hyperparameters or {})
    present = np.unique(data.labels)
    if len(present) < 2:
        raise ValueError("training data must contain at least two classes")
    scaler = Standardizer.fit(data.samples)
    est = _make_estimator(kind, hp)
    est.fit(scaler.transform(data.samples), data.labels, len(data.class_names), rng=np.random.default_rng(seed))
    return Model(kind, scaler, est, data.samples.shape[1], data.class_names)


def predict(model: Model, x) -> int:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("predict takes a single feature vector")
    return int(model.predict_many(x[None, :])[0])


@dataclass(frozen=True)
class Scores:
    precision: float
    recall: float
    f1: float


def macro_scores(y_true, y_pred, n_classes: int) -> Scores:
    """Macro precision, recall and F1 (per-class F1 averaged)."""
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    ps, rs, fs = [], [], []
    for k in range(n_classes):
        tp = np.sum((y_pred == k) & (y_true == k))
        pp = np.sum(y_pred == k)
        ap = np.sum(y_true == k)
        p = tp / pp if pp else 0.0
        r = tp / ap if ap else 0.0
        f = 2 * p * r / (p + r) if (p + r) else 0.0
        ps.append(p)
        rs.append(r)
        fs.append(f)
    return Scores(float(np.mean(ps)), float(np.mean(rs)), float(np.mean(fs)))


def stratified_split(labels: np.ndarray, train_frac: float, rng: np.random.Generator):
    train_idx, test_idx = [], []
    for k in np.unique(labels):
        idx = np.flatnonzero(labels == k)
        idx = idx[rng.permutation(len(idx))]
        n_train = int(round(train_frac * len(idx)))
        n_train = min(max(n_train, 1), len(idx) - 1)
        train_idx.extend(idx[:n_train])
        test_idx.extend(idx[n_train:])
    return np.sort(np.array(train_idx)), np.sort(np.array(test_idx))


@dataclass
class EvaluationReport:
    scores: dict[str, Scores]
    repetitions: int
    split: float
    seed: int
    per_repetition: dict[str, list[Scores]] = field(default_factory=dict)

    def rows(self):
        for kind, s in self.scores.items():
            yield MODEL_TITLES.get(kind, kind), s.f1, s.precision, s.recall

    def write_csv(self, out: IO[str]) -> None:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["model", "F1", "precision", "recall"])
        for name, f1, p, r in self.rows():
            w.writerow([name, f"{f1:.4f}", f"{p:.4f}", f"{r:.4f}"])

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "split": self.split,
            "repetitions": self.repetitions,
            "models": {k: vars(s) for k, s in self.scores.items()},
        }


def _one_repetition(data: Dataset, kinds, hp, split, seed, rep):
    rng = np.random.default_rng([seed, rep])
    tr, te = stratified_split(data.labels, split, rng)
    train_set, test_set = data.subset(tr), data.subset(te)
    out = {}
    for kind in kinds:
        model = train(kind, train_set, hp, seed=int(rng.integers(2**31)))
        pred = model.predict_many(test_set.samples)
        out[kind] = macro_scores(test_set.labels, pred, len(data.class_names))
    return out


def evaluate(
    data: Dataset,
    kinds: Sequence[str] = MODEL_KINDS,
    split: float = 0.75,
    repetitions: int = 20,
    seed: int = 0,
    hyperparameters: dict[str, Any] | None = None,
    jobs: int = 1,
) -> EvaluationReport:
    """Repeated stratified holdout; scores are averaged over repetitions."""
    if not 0 < split < 1:
        raise ValueError("split must be in (0, 1)")
    for kind in kinds:
        if kind not in MODEL_KINDS:
            raise ValueError(f"unknown model kind {kind!r}")
    counts = np.bincount(data.labels, minlength=len(data.class_names))
    for name, c in zip(data.class_names, counts):
        if c < 2:
            raise ValueError(f"class {name!r} has {c} sample(s); at least 2 are needed")
    hp = dict(hyperparameters or {})
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda r: _one_repetition(data, kinds, hp, split, seed, r), range(repetitions)))
    else:
        results = [_one_repetition(data, kinds, hp, split, seed, r) for r in range(repetitions)]
    per_rep = {k: [res[k] for res in results] for k in kinds}
    avg = {
        k: Scores(
            float(np.mean([s.precision for s in v])),
            float(np.mean([s.recall for s in v])),
            float(np.mean([s.f1 for s in v])),
        )
        for k, v in per_rep.items()
    }
    return EvaluationReport(avg, repetitions, split, seed, per_rep)


def aggregate_website(vectors: Sequence[Sequence[float]]) -> np.ndarray:
    """Website-level feature vector: element-wise mean over its scripts."""
    arr = np.asarray(vectors, dtype=float)
    if arr.ndim != 2 or len(arr) == 0:
        raise ValueError("need at least one script vector")
    return arr.mean(axis=0)
