from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable

from . import table
from .lexer import OPERATOR, Token


@dataclass(frozen=True)
class HalsteadCounts:
    eta1: int = 0  # distinct operators
    eta2: int = 0  # distinct operands
    n1: int = 0  # total operators
    n2: int = 0  # total operands

    def __post_init__(self):
        if min(self.eta1, self.eta2, self.n1, self.n2) < 0:
            raise ValueError("Halstead counts must be non-negative")
        if self.eta1 > self.n1 or self.eta2 > self.n2:
            raise ValueError("distinct counts cannot exceed totals")
        if (self.eta2 == 0) != (self.n2 == 0) or (self.eta1 == 0) != (self.n1 == 0):
            raise ValueError("a nonzero total needs at least one distinct item")


@dataclass(frozen=True)
class HalsteadSuite:
    eta: int
    n: int
    n_c: float  # calculated program length
    V: float
    D: float
    E: float
    T: float
    B: float


def operator_key(tok: Token) -> str:
    return table.OPERATOR_KEY.get(tok.text, tok.text)


def count_halstead(tokens: Iterable[Token]) -> HalsteadCounts:
    operators: Counter[str] = Counter()
    operands: Counter[str] = Counter()
    for tok in tokens:
        if tok.kind == OPERATOR:
            operators[operator_key(tok)] += 1
        elif tok.is_operand:
            operands[tok.text] += 1
    return HalsteadCounts(
        eta1=len(operators),
        eta2=len(operands),
        n1=sum(operators.values()),
        n2=sum(operands.values()),
    )


def _xlog2x(k: int) -> float:
    return k * math.log2(k) if k > 0 else 0.0


def halstead_suite(counts: HalsteadCounts) -> HalsteadSuite:
    """Derived Halstead measures; an empty program gives all zeros."""
    eta = counts.eta1 + counts.eta2
    n = counts.n1 + counts.n2
    if eta == 0:
        return HalsteadSuite(0, 0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    n_c = _xlog2x(counts.eta1) + _xlog2x(counts.eta2)
    volume = n * math.log2(eta)
    difficulty = (counts.eta1 / 2) * (counts.n2 / counts.eta2) if counts.eta2 else 0.0
    effort = difficulty * volume
    return HalsteadSuite(
        eta=eta,
        n=n,
        n_c=n_c,
        V=volume,
        D=difficulty,
        E=effort,
        T=effort / 18,
        B=effort ** (2 / 3) / 3000,
    )
