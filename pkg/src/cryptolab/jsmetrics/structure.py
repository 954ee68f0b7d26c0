"""Cyclomatic complexity and line/parameter counts from the token stream.

There is no parser here. A single bracket-matching pass is enough to find
function parameter lists, do-while tails and statement terminators.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import table
from .lexer import COMMENT, OPERATOR, Token, tokenize


@dataclass(frozen=True)
class LineCounts:
    physical: int
    sloc: int
    c_l: int
    params: int


def _significant(tokens: Sequence[Token]) -> list[Token]:
    return [t for t in tokens if t.kind != COMMENT]


def _match_brackets(toks: Sequence[Token]) -> dict[int, int]:
    """Map each bracket index to its partner; unbalanced brackets are left out."""
    pairs: dict[int, int] = {}
    stack: list[int] = []
    for i, t in enumerate(toks):
        if t.text in table.OPENERS and t.kind == OPERATOR:
            stack.append(i)
        elif t.text in table.CLOSERS and t.kind != COMMENT:
            if stack and table.OPENERS[toks[stack[-1]].text] == t.text:
                j = stack.pop()
                pairs[i] = j
                pairs[j] = i
    return pairs


def _is_op(t: Token, text: str) -> bool:
    return t.kind == OPERATOR and t.text == text


def _do_tails(toks: Sequence[Token], pairs: dict[int, int]) -> set[int]:
    """Indices of `while` tokens that close a do-while loop."""
    tails: set[int] = set()
    depth_stack: list[str] = []
    unbraced: list[int] = []  # opener depth of pending brace-less `do` bodies
    for i, t in enumerate(toks):
        if _is_op(t, "do"):
            nxt = toks[i + 1] if i + 1 < len(toks) else None
            if nxt is not None and _is_op(nxt, "{") and (i + 1) in pairs:
                close = pairs[i + 1]
                if close + 1 < len(toks) and _is_op(toks[close + 1], "while"):
                    tails.add(close + 1)
            else:
                unbraced.append(len(depth_stack))
        if t.text in table.OPENERS and t.kind == OPERATOR:
            depth_stack.append(t.text)
        elif t.text in table.CLOSERS and depth_stack:
            depth_stack.pop()
        elif _is_op(t, ";") and unbraced and unbraced[-1] == len(depth_stack):
            unbraced.pop()
            if i + 1 < len(toks) and _is_op(toks[i + 1], "while"):
                tails.add(i + 1)
    return tails


def _count_params(toks: Sequence[Token], open_i: int, close_i: int) -> int:
    count = 0
    seen = False
    depth = 0
    for t in toks[open_i + 1 : close_i]:
        if t.kind == OPERATOR and t.text in table.OPENERS:
            depth += 1
        elif t.text in table.CLOSERS:
            depth -= 1
        if depth == 0 and _is_op(t, ","):
            count += seen
            seen = False
        else:
            seen = True
    return count + seen


def function_params(tokens: Sequence[Token]) -> list[int]:
    """Formal parameter count for every function definition, in source order."""
    toks = _significant(tokens)
    pairs = _match_brackets(toks)
    out: list[int] = []
    for i, t in enumerate(toks):
        if _is_op(t, "function"):
            j = i + 1
            while j < len(toks) and not _is_op(toks[j], "("):
                if _is_op(toks[j], "{") or _is_op(toks[j], ";"):
                    break
                j += 1
            if j < len(toks) and _is_op(toks[j], "(") and j in pairs:
                out.append(_count_params(toks, j, pairs[j]))
            else:
                out.append(0)
        elif _is_op(t, "=>") and i > 0:
            prev = toks[i - 1]
            if prev.text == ")" and (i - 1) in pairs:
                out.append(_count_params(toks, pairs[i - 1], i - 1))
            else:
                out.append(1 if prev.is_operand else 0)
    return out


def cyclomatic(tokens: Sequence[Token]) -> int:
    """1 for the top level, plus 1 per function, plus 1 per decision point."""
    toks = _significant(tokens)
    if not toks:
        return 1
    tails = _do_tails(toks, _match_brackets(toks))
    m = 1
    for i, t in enumerate(toks):
        if t.kind != OPERATOR:
            continue
        if t.text in ("function", "=>"):
            m += 1
        elif t.text in table.DECISION_WORDS or t.text in table.DECISION_PUNCTUATORS:
            if i not in tails:
                m += 1
    return m


def _physical_lines(source: str) -> int:
    if not source:
        return 0
    lines = source.split("\n")
    return len(lines) - (lines[-1] == "")


def logical_lines(tokens: Sequence[Token]) -> int:
    toks = _significant(tokens)
    pairs = _match_brackets(toks)
    tails = _do_tails(toks, pairs)
    stack: list[str] = []
    count = 0
    for i, t in enumerate(toks):
        if t.kind == OPERATOR and t.text in table.OPENERS:
            stack.append(t.text)
        elif t.text in table.CLOSERS and stack:
            stack.pop()
        elif _is_op(t, ";"):
            # `for (;;)` separators are not statement terminators
            if not stack or stack[-1] == "{":
                count += 1
        elif t.kind == OPERATOR and t.text in table.HEADER_WORDS:
            if i in tails:
                continue
            if t.text == "else" and i + 1 < len(toks) and _is_op(toks[i + 1], "if"):
                continue
            count += 1
        elif _is_op(t, "=>"):
            count += 1
    return count


def line_counts(source: str, tokens: Sequence[Token] | None = None) -> LineCounts:
    if tokens is None:
        tokens = tokenize(source)
    code_lines: set[int] = set()
    for t in tokens:
        if t.kind != COMMENT:
            code_lines.update(range(t.line, t.end_line + 1))
    return LineCounts(
        physical=_physical_lines(source),
        sloc=len(code_lines),
        c_l=logical_lines(tokens),
        params=sum(function_params(tokens)),
    )
