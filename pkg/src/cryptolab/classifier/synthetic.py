"""Synthetic stand-in for the private script corpus.

Each class is drawn as independent Gaussians per feature, using the
reference per-class mean and standard deviation of the 17 features.
"""
from __future__ import annotations

import numpy as np

from ..jsmetrics import FEATURE_NAMES
from .core import Dataset

# Columns follow FEATURE_NAMES.
CLASS_STATS = {
    "cryptojacking": (
        (130.3, 29.9, 11.3, 88.9, 3026191, 3755.1, 168121, 516.4, 33925, 41.3, 1981.5, 475.1, 1773.6, 53.8, 440.3, 538.1, 64.9),
        (35.9, 8.4, 3.9, 13.8, 1180403, 1109.9, 65577, 185.1, 11856, 3.9, 599.3, 182.8, 519.3, 14.8, 93.2, 126.3, 2.8),
    ),
    "malicious": (
        (18.4, 14, 4.9, 15.5, 284803.7, 1625.2, 15822, 422.9, 14938, 12.8, 900.2, 410.1, 725, 26.2, 153.1, 445, 66.9),
        (31.9, 10.5, 5, 10.8, 364470.8, 1508.9, 20248, 374.8, 15045, 6.9, 834.7, 372.5, 686.6, 72.6, 171.9, 543.5, 24.9),
    ),
    "benign": (
        (1049.4, 48.5, 65.6, 236.1, 52900430, 19049.2, 2938912, 1216, 196814, 52.1, 10428.2, 1163.9, 8621, 449.1, 2217.8, 2537.1, 63.4),
        (694, 17.8, 33.6, 92.8, 44755377, 9151.2, 2486409, 459.8, 100856, 5.3, 4999, 456.7, 4165, 310.3, 1225.4, 1418.2, 4.3),
    ),
}


def synthetic_dataset(per_class: int = 40, seed: int = 0) -> Dataset:
    rng = np.random.default_rng(seed)
    names = tuple(CLASS_STATS)
    rows, labels = [], []
    for k, name in enumerate(names):
        mean, sd = (np.array(v, dtype=float) for v in CLASS_STATS[name])
        assert len(mean) == len(FEATURE_NAMES)
        rows.append(rng.normal(mean, sd, size=(per_class, len(mean))))
        labels += [k] * per_class
    return Dataset(np.vstack(rows), np.array(labels), names)
