from __future__ import annotations

import csv
import logging
import math
from dataclasses import astuple, dataclass, fields
from typing import IO, Iterable

from .halstead import count_halstead, halstead_suite
from .lexer import tokenize
from .structure import cyclomatic, line_counts

log = logging.getLogger(__name__)

FEATURE_NAMES = (
    "M", "M_d", "B", "D", "E", "c_l", "T", "eta", "V",
    "eta1", "n1", "eta2", "n2", "params", "sloc", "physical", "M_s",
)
CSV_HEADER = ("path", "label") + FEATURE_NAMES


@dataclass(frozen=True)
class Maintainability:
    M_s: float
    M_i: float


def maintainability(V: float, M: float, c_l: float) -> Maintainability:
    """Maintainability score with natural logarithms, plus its 0..1 rescaling."""
    if V <= 0 or c_l <= 0:
        raise ValueError(f"maintainability needs V > 0 and c_l > 0 (got V={V}, c_l={c_l})")
    if M < 1:
        raise ValueError(f"cyclomatic complexity must be >= 1 (got {M})")
    score = 171 - 5.2 * math.log(V) - 0.23 * M - 16.2 * math.log(c_l)
    return Maintainability(M_s=score, M_i=max(0.0, score / 171))


@dataclass(frozen=True)
class FeatureVector:
    """Seventeen static metrics of one script.

    ``M_d`` and ``M_s`` are NaN when the script has no logical lines (or
    zero volume), since both are undefined there.
    """

    M: int
    M_d: float
    B: float
    D: float
    E: float
    c_l: int
    T: float
    eta: int
    V: float
    eta1: int
    n1: int
    eta2: int
    n2: int
    params: int
    sloc: int
    physical: int
    M_s: float

    def as_list(self) -> list[float]:
        return [float(v) for v in astuple(self)]

    @classmethod
    def from_values(cls, values: Iterable[float]) -> "FeatureVector":
        vals = list(values)
        if len(vals) != len(FEATURE_NAMES):
            raise ValueError(f"expected {len(FEATURE_NAMES)} values, got {len(vals)}")
        kinds = {f.name: f.type for f in fields(cls)}
        return cls(*(int(v) if kinds[n] == "int" else float(v) for n, v in zip(FEATURE_NAMES, vals)))


def extract_features(source: str, lenient: bool = False) -> FeatureVector:
    """Compute the full feature vector for one JavaScript source text.

    Lexical errors propagate unless ``lenient`` is set, in which case the
    valid prefix is measured and a warning is logged.
    """
    if not source.strip():
        raise ValueError("cannot extract features from an empty program")
    tokens = tokenize(source, strict=not lenient)
    if tokens.error is not None:
        log.warning("measuring lexically valid prefix only: %s", tokens.error)
    counts = count_halstead(tokens)
    suite = halstead_suite(counts)
    m = cyclomatic(tokens)
    lines = line_counts(source, tokens)
    if lines.c_l > 0 and suite.V > 0:
        m_s = maintainability(suite.V, m, lines.c_l).M_s
    else:
        m_s = math.nan
    return FeatureVector(
        M=m,
        M_d=m / lines.c_l if lines.c_l else math.nan,
        B=suite.B,
        D=suite.D,
        E=suite.E,
        c_l=lines.c_l,
        T=suite.T,
        eta=suite.eta,
        V=suite.V,
        eta1=counts.eta1,
        n1=counts.n1,
        eta2=counts.eta2,
        n2=counts.n2,
        params=lines.params,
        sloc=lines.sloc,
        physical=lines.physical,
        M_s=m_s,
    )


def write_feature_csv(rows: Iterable[tuple[str, str, FeatureVector]], out: IO[str]) -> int:
    """Write one row per script. Plain value sequences (e.g. averaged
    website vectors) are accepted in place of a FeatureVector."""
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    n = 0
    for path, label, fv in rows:
        vals = astuple(fv) if isinstance(fv, FeatureVector) else tuple(fv)
        if len(vals) != len(FEATURE_NAMES):
            raise ValueError(f"{path}: expected {len(FEATURE_NAMES)} values, got {len(vals)}")
        writer.writerow([path, label, *(_fmt(v) for v in vals)])
        n += 1
    return n


def _fmt(v) -> str:
    if isinstance(v, int) and not isinstance(v, bool):
        return str(v)
    return repr(float(v))


def read_feature_csv(inp: IO[str]) -> tuple[list[str], list[str], list[list[float]]]:
    """Return (paths, labels, rows) from a feature CSV."""
    reader = csv.reader(inp)
    header = next(reader, None)
    if header is None:
        raise ValueError("feature CSV is empty")
    header = [h.strip() for h in header]
    if "label" not in header:
        raise ValueError("feature CSV has no 'label' column")
    missing = [f for f in FEATURE_NAMES if f not in header]
    if missing:
        raise ValueError(f"feature CSV is missing columns: {', '.join(missing)}")
    idx = [header.index(f) for f in FEATURE_NAMES]
    li = header.index("label")
    pi = header.index("path") if "path" in header else None
    paths, labels, rows = [], [], []
    for rec in reader:
        if not rec:
            continue
        paths.append(rec[pi] if pi is not None else "")
        labels.append(rec[li])
        rows.append([float(rec[i]) for i in idx])
    return paths, labels, rows
