"""Per-class Pearson correlation matrices and significant-feature selection."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import IO, Sequence

import numpy as np

from .jsmetrics import FEATURE_NAMES

CLASSES = ("cryptojacking", "malicious", "benign")


@dataclass(frozen=True)
class FeatureMatrix:
    labels: list[str]
    rows: np.ndarray
    feature_names: tuple[str, ...] = FEATURE_NAMES

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=float)
        if rows.ndim != 2 or rows.shape[1] != len(self.feature_names):
            raise ValueError(f"rows must be (n, {len(self.feature_names)}), got {rows.shape}")
        if len(self.labels) != rows.shape[0]:
            raise ValueError("one label per row required")
        object.__setattr__(self, "rows", rows)

    def class_rows(self, label: str) -> np.ndarray:
        mask = np.array([lab == label for lab in self.labels], dtype=bool)
        return self.rows[mask]


@dataclass(frozen=True)
class CorrelationMatrix:
    """Symmetric coefficient matrix; undefined entries hold NaN."""

    values: np.ndarray
    feature_names: tuple[str, ...] = field(default=FEATURE_NAMES)

    @property
    def defined(self) -> np.ndarray:
        return ~np.isnan(self.values)

    def row_means(self) -> np.ndarray:
        """Mean of each row over its defined entries (diagonal included)."""
        out = np.full(len(self.feature_names), math.nan)
        for k, row in enumerate(self.values):
            ok = row[~np.isnan(row)]
            if ok.size:
                out[k] = ok.mean()
        return out


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Pearson coefficient; NaN when either series has zero variance."""
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if xa.shape != ya.shape or xa.ndim != 1:
        raise ValueError(f"series lengths differ: {xa.shape} vs {ya.shape}")
    if xa.size < 2:
        raise ValueError("need at least two observations")
    # the float mean of a constant series can be off by an ulp, so test directly
    if np.all(xa == xa[0]) or np.all(ya == ya[0]):
        return math.nan
    dx = xa - xa.mean()
    dy = ya - ya.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    denom = math.sqrt(sxx) * math.sqrt(syy)
    if denom == 0.0:
        return math.nan
    r = float(dx @ dy) / denom
    return max(-1.0, min(1.0, r))


def correlation_matrix(rows, feature_names: Sequence[str] = FEATURE_NAMES) -> CorrelationMatrix:
    data = np.asarray(rows, dtype=float)
    if data.ndim != 2 or data.shape[0] < 2:
        raise ValueError("correlation needs at least two rows")
    if data.shape[1] != len(feature_names):
        raise ValueError(f"expected {len(feature_names)} columns, got {data.shape[1]}")
    d = data.shape[1]
    out = np.full((d, d), math.nan)
    for i in range(d):
        for j in range(i, d):
            r = pearson(data[:, i], data[:, j])
            if i == j and not math.isnan(r):
                r = 1.0
            out[i, j] = out[j, i] = r
    return CorrelationMatrix(out, tuple(feature_names))


def significant_features(
    C: CorrelationMatrix, M: CorrelationMatrix, B: CorrelationMatrix
) -> list[str]:
    """Features whose cryptojacking row mean stands out from both other classes.

    A feature is kept when both (C - M) and (C - B) strictly exceed (M - B),
    using per-row means of each class matrix.
    """
    if not (C.feature_names == M.feature_names == B.feature_names):
        raise ValueError("correlation matrices disagree on feature names")
    cm, mm, bm = C.row_means(), M.row_means(), B.row_means()
    selected = []
    for k, name in enumerate(C.feature_names):
        c, m, b = cm[k], mm[k], bm[k]
        if math.isnan(c) or math.isnan(m) or math.isnan(b):
            continue
        if (c - m) > (m - b) and (c - b) > (m - b):
            selected.append(name)
    return selected


def per_class_matrices(fm: FeatureMatrix, classes: Sequence[str] = CLASSES) -> dict[str, CorrelationMatrix]:
    out = {}
    for label in classes:
        rows = fm.class_rows(label)
        if rows.shape[0] < 2:
            raise ValueError(f"class {label!r} needs at least two rows, has {rows.shape[0]}")
        out[label] = correlation_matrix(rows, fm.feature_names)
    return out


def write_matrix_csv(cm: CorrelationMatrix, out: IO[str]) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["feature", *cm.feature_names])
    for name, row in zip(cm.feature_names, cm.values):
        writer.writerow([name, *("undefined" if math.isnan(v) else repr(float(v)) for v in row)])


def read_matrix_csv(inp: IO[str]) -> CorrelationMatrix:
    reader = csv.reader(inp)
    header = next(reader)
    names = tuple(header[1:])
    vals = [[math.nan if v == "undefined" else float(v) for v in rec[1:]] for rec in reader if rec]
    return CorrelationMatrix(np.array(vals, dtype=float), names)
