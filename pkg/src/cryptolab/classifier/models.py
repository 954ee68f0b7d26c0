"""Five small classifiers in plain numpy.

All estimators take standardized features and integer class ids
0..n_classes-1. Ties in any vote or score go to the lowest class id.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TIE_TOL = 1e-12


def _argmax_low(scores: np.ndarray) -> np.ndarray:
    """Row-wise argmax that treats near-equal scores as tied (lowest id wins)."""
    scores = np.atleast_2d(scores)
    top = scores.max(axis=1, keepdims=True)
    tol = TIE_TOL * np.maximum(1.0, np.abs(top))
    return np.argmax(scores >= top - tol, axis=1)


class LogisticRegression:
    """Multinomial softmax regression fit by gradient descent with backtracking."""

    def __init__(self, l2: float = 1e-4, max_iter: int = 5000, tol: float = 1e-8):
        self.l2 = l2
        self.max_iter = max_iter
        self.tol = tol
        self.loss_history: list[float] = []

    def _loss_grad(self, W, Xb, Y):
        logits = Xb @ W
        logits -= logits.max(axis=1, keepdims=True)
        expz = np.exp(logits)
        P = expz / expz.sum(axis=1, keepdims=True)
        n = Xb.shape[0]
        logp = logits - np.log(expz.sum(axis=1, keepdims=True))
        reg = W[1:]
        loss = -np.sum(Y * logp) / n + 0.5 * self.l2 * np.sum(reg * reg)
        grad = Xb.T @ (P - Y) / n
        grad[1:] += self.l2 * reg
        return loss, grad

    def fit(self, X, y, n_classes, rng=None):
        n, d = X.shape
        Xb = np.hstack([np.ones((n, 1)), X])
        Y = np.eye(n_classes)[y]
        W = np.zeros((d + 1, n_classes))
        loss, grad = self._loss_grad(W, Xb, Y)
        self.loss_history = [loss]
        step = 1.0
        for _ in range(self.max_iter):
            g2 = float(np.sum(grad * grad))
            if g2 == 0.0:
                break
            while True:
                W_new = W - step * grad
                new_loss, new_grad = self._loss_grad(W_new, Xb, Y)
                if new_loss <= loss - 0.5 * step * g2 or step < 1e-12:
                    break
                step *= 0.5
            rel = abs(loss - new_loss) / max(abs(loss), 1e-300)
            W, loss, grad = W_new, new_loss, new_grad
            self.loss_history.append(loss)
            step = min(step * 2.0, 64.0)
            if rel < self.tol:
                break
        self.W = W
        return self

    def decision(self, X):
        return np.hstack([np.ones((X.shape[0], 1)), X]) @ self.W

    def predict(self, X):
        return _argmax_low(self.decision(X))


class LDA:
    """Linear discriminant with a ridge-regularized pooled covariance."""

    def __init__(self, ridge: float = 1e-6):
        self.ridge = ridge

    def fit(self, X, y, n_classes, rng=None):
        n, d = X.shape
        self.means = np.zeros((n_classes, d))
        self.priors = np.zeros(n_classes)
        S = np.zeros((d, d))
        for k in range(n_classes):
            Xk = X[y == k]
            self.priors[k] = len(Xk) / n
            if len(Xk):
                self.means[k] = Xk.mean(axis=0)
                D = Xk - self.means[k]
                S += D.T @ D
        S /= max(n - n_classes, 1)
        tr = np.trace(S)
        eps = self.ridge * (tr / d if tr > 0 else 1.0)
        S += eps * np.eye(d)
        self.coef = np.linalg.solve(S, self.means.T).T  # (K, d)
        with np.errstate(divide="ignore"):
            logp = np.log(self.priors)
        self.intercept = -0.5 * np.sum(self.coef * self.means, axis=1) + logp
        return self

    def decision(self, X):
        return X @ self.coef.T + self.intercept

    def predict(self, X):
        return _argmax_low(self.decision(X))


class KNN:
    def __init__(self, k: int = 3, metric: str = "euclidean"):
        if metric not in ("euclidean", "manhattan"):
            raise ValueError(f"unknown metric {metric!r}")
        self.k = k
        self.metric = metric

    def fit(self, X, y, n_classes, rng=None):
        self.X = np.array(X, dtype=float)
        self.y = np.array(y)
        self.n_classes = n_classes
        return self

    def predict(self, X):
        out = np.empty(len(X), dtype=int)
        k = min(self.k, len(self.X))
        for i, q in enumerate(X):
            diff = self.X - q
            dist = np.abs(diff).sum(axis=1) if self.metric == "manhattan" else np.sqrt((diff * diff).sum(axis=1))
            nearest = np.argsort(dist, kind="stable")[:k]
            votes = np.bincount(self.y[nearest], minlength=self.n_classes)
            out[i] = int(np.argmax(votes))
        return out


class LinearSVM:
    """One-vs-rest linear SVM trained by full-batch subgradient descent on the hinge loss."""

    def __init__(self, C: float = 1.0, max_iter: int = 1000):
        self.C = C
        self.max_iter = max_iter

    def _fit_binary(self, X, t):
        n, d = X.shape
        w = np.zeros(d)
        b = 0.0
        best = (math.inf, w.copy(), b)
        eta0 = 1.0 / (self.C * n)
        for it in range(1, self.max_iter + 1):
            margin = t * (X @ w + b)
            active = margin < 1
            obj = 0.5 * w @ w + self.C * np.sum(1 - margin[active])
            if obj < best[0]:
                best = (obj, w.copy(), b)
            gw = w - self.C * (t[active] @ X[active])
            gb = -self.C * np.sum(t[active])
            eta = eta0 / math.sqrt(it)
            w = w - eta * gw
            b = b - eta * gb
        return best[1], best[2]

    def fit(self, X, y, n_classes, rng=None):
        W = np.zeros((n_classes, X.shape[1]))
        B = np.zeros(n_classes)
        for k in range(n_classes):
            t = np.where(y == k, 1.0, -1.0)
            W[k], B[k] = self._fit_binary(X, t)
        self.W, self.B = W, B
        return self

    def decision(self, X):
        return X @ self.W.T + self.B

    def predict(self, X):
        return _argmax_low(self.decision(X))


@dataclass
class _Tree:
    feature: list[int] = field(default_factory=list)
    threshold: list[float] = field(default_factory=list)
    left: list[int] = field(default_factory=list)
    right: list[int] = field(default_factory=list)
    label: list[int] = field(default_factory=list)

    def add(self, feature=-1, threshold=0.0, label=-1) -> int:
        self.feature.append(feature)
        self.threshold.append(threshold)
        self.left.append(-1)
        self.right.append(-1)
        self.label.append(label)
        return len(self.feature) - 1

    def predict_one(self, x) -> int:
        node = 0
        while self.feature[node] >= 0:
            node = self.left[node] if x[self.feature[node]] <= self.threshold[node] else self.right[node]
        return self.label[node]


def _best_split(X, y, n_classes, features):
    n = len(y)
    best = (math.inf, -1, 0.0)
    for f in features:
        order = np.argsort(X[:, f], kind="stable")
        xs = X[order, f]
        onehot = np.eye(n_classes)[y[order]]
        left = np.cumsum(onehot, axis=0)[:-1]
        right = left[-1] + onehot[-1] - left
        nl = np.arange(1, n)
        nr = n - nl
        gini_l = 1 - np.sum((left / nl[:, None]) ** 2, axis=1)
        gini_r = 1 - np.sum((right / nr[:, None]) ** 2, axis=1)
        score = (nl * gini_l + nr * gini_r) / n
        valid = xs[:-1] < xs[1:]
        if not valid.any():
            continue
        score = np.where(valid, score, math.inf)
        i = int(np.argmin(score))
        if score[i] < best[0]:
            best = (score[i], f, (xs[i] + xs[i + 1]) / 2)
    return best


class RandomForest:
    def __init__(self, n_trees: int = 100, max_depth: int | None = None, max_features: int | None = None):
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.max_features = max_features

    def _grow(self, tree, X, y, depth, rng):
        counts = np.bincount(y, minlength=self.n_classes)
        majority = int(np.argmax(counts))
        if counts.max() == len(y) or (self.max_depth is not None and depth >= self.max_depth):
            return tree.add(label=majority)
        d = X.shape[1]
        m = self.max_features or max(1, int(math.sqrt(d)))
        feats = rng.choice(d, size=min(m, d), replace=False)
        score, f, thr = _best_split(X, y, self.n_classes, feats)
        if f < 0:
            return tree.add(label=majority)
        node = tree.add(feature=int(f), threshold=float(thr))
        mask = X[:, f] <= thr
        tree.left[node] = self._grow(tree, X[mask], y[mask], depth + 1, rng)
        tree.right[node] = self._grow(tree, X[~mask], y[~mask], depth + 1, rng)
        return node

    def fit(self, X, y, n_classes, rng=None):
        rng = rng if rng is not None else np.random.default_rng(0)
        self.n_classes = n_classes
        self.trees = []
        n = len(y)
        for _ in range(self.n_trees):
            idx = rng.integers(0, n, size=n)
            tree = _Tree()
            self._grow(tree, X[idx], y[idx], 0, rng)
            self.trees.append(tree)
        return self

    def predict(self, X):
        out = np.empty(len(X), dtype=int)
        for i, x in enumerate(X):
            votes = np.zeros(self.n_classes, dtype=int)
            for t in self.trees:
                votes[t.predict_one(x)] += 1
            out[i] = int(np.argmax(votes))
        return out
