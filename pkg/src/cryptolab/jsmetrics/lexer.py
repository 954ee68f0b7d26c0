"""Lexical pass over JavaScript source.

The lexer is deliberately shallow: it recognises comments, string,
template, numeric and regular-expression literals, identifiers and
punctuators, which is all the metric code needs. Every token remembers
the whitespace that preceded it so the source can be rebuilt exactly.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from . import table

OPERATOR = "operator"
OPERAND = "operand"
COMMENT = "comment"
STRING = "string-literal"
NUMBER = "numeric-literal"
TEMPLATE = "template-literal"
REGEX = "regex-literal"
NOISE = "punctuation-noise"

OPERAND_KINDS = frozenset({OPERAND, STRING, NUMBER, TEMPLATE, REGEX})

_NUMBER_RE = re.compile(
    r"0[xX][0-9a-fA-F_]+n?"
    r"|0[oO][0-7_]+n?"
    r"|0[bB][01_]+n?"
    r"|(?:\d[\d_]*(?:\.[\d_]*)?|\.\d[\d_]*)(?:[eE][+-]?\d[\d_]*)?n?"
)
_LINE_TERMINATORS = "\n\r\u2028\u2029"


class TokenizeError(ValueError):
    """Raised for unterminated strings, comments, templates or regexes."""

    def __init__(self, message: str, line: int, tokens: "TokenList | None" = None):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.tokens = tokens if tokens is not None else TokenList()


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    ws: str = ""

    @property
    def end_line(self) -> int:
        return self.line + self.text.count("\n")

    @property
    def is_operand(self) -> bool:
        return self.kind in OPERAND_KINDS


class TokenList(list):
    """List of tokens plus any whitespace after the last one."""

    def __init__(self, tokens=(), trailing: str = "", error: TokenizeError | None = None):
        super().__init__(tokens)
        self.trailing = trailing
        self.error = error

    def source(self) -> str:
        return "".join(t.ws + t.text for t in self) + self.trailing


def _is_ws(ch: str) -> bool:
    return ch.isspace() or ch == "\ufeff"


def _is_id_start(ch: str) -> bool:
    return ch.isalpha() or ch in "_$" or (ord(ch) > 127 and ch.isidentifier())


def _is_id_part(ch: str) -> bool:
    return ch.isalnum() or ch in "_$\u200c\u200d" or (ord(ch) > 127 and ("a" + ch).isidentifier())


class _Lexer:
    def __init__(self, src: str):
        self.src = src
        self.n = len(src)

    def line_at(self, pos: int) -> int:
        return self.src.count("\n", 0, pos) + 1

    def skip_ws(self, pos: int) -> int:
        while pos < self.n and _is_ws(self.src[pos]):
            pos += 1
        return pos

    def lex_one(self, pos: int, regex_ok: bool) -> tuple[str, int]:
        """Return (raw kind, end offset) for the token starting at pos."""
        src = self.src
        ch = src[pos]
        nxt = src[pos + 1] if pos + 1 < self.n else ""
        if ch == "/" and nxt == "/":
            end = pos
            while end < self.n and src[end] not in _LINE_TERMINATORS:
                end += 1
            return COMMENT, end
        if ch == "/" and nxt == "*":
            end = src.find("*/", pos + 2)
            if end < 0:
                raise TokenizeError("unterminated block comment", self.line_at(pos))
            return COMMENT, end + 2
        if ch == "#" and nxt == "!" and pos == 0:
            end = pos
            while end < self.n and src[end] not in _LINE_TERMINATORS:
                end += 1
            return COMMENT, end
        if ch in "'\"":
            return STRING, self._string_end(pos)
        if ch == "`":
            return TEMPLATE, self._template_end(pos)
        if ch.isdigit() or (ch == "." and nxt.isdigit()):
            m = _NUMBER_RE.match(src, pos)
            return NUMBER, m.end()
        if _is_id_start(ch) or ch == "\\":
            end = pos + 1
            while end < self.n and (_is_id_part(src[end]) or src[end] == "\\"):
                end += 1
            return "word", end
        if ch == "/" and regex_ok:
            return REGEX, self._regex_end(pos)
        for p in table.PUNCTUATORS:
            if src.startswith(p, pos):
                # `?.5` is a conditional followed by a number
                if p == "?." and pos + 2 < self.n and src[pos + 2].isdigit():
                    continue
                return "punct", pos + len(p)
        # unknown character: keep it as noise rather than abort
        return NOISE, pos + 1

    def _string_end(self, pos: int) -> int:
        quote = self.src[pos]
        i = pos + 1
        while i < self.n:
            c = self.src[i]
            if c == "\\":
                i += 2
                continue
            if c == quote:
                return i + 1
            if c in "\n\r":
                break
            i += 1
        raise TokenizeError("unterminated string literal", self.line_at(pos))

    def _template_end(self, pos: int) -> int:
        i = pos + 1
        while i < self.n:
            c = self.src[i]
            if c == "\\":
                i += 2
                continue
            if c == "`":
                return i + 1
            if c == "$" and i + 1 < self.n and self.src[i + 1] == "{":
                i = self._substitution_end(i + 2)
                continue
            i += 1
        raise TokenizeError("unterminated template literal", self.line_at(pos))

    def _substitution_end(self, pos: int) -> int:
        """Skip a `${ ... }` body; pos is just past the `{`."""
        depth = 0
        regex_ok = True
        while True:
            pos = self.skip_ws(pos)
            if pos >= self.n:
                raise TokenizeError("unterminated template literal", self.line_at(pos))
            kind, end = self.lex_one(pos, regex_ok)
            text = self.src[pos:end]
            if kind == "punct" and text == "}":
                if depth == 0:
                    return end
                depth -= 1
            elif kind == "punct" and text == "{":
                depth += 1
            if kind != COMMENT:
                regex_ok = _regex_allowed_after(kind, text)
            pos = end

    def _regex_end(self, pos: int) -> int:
        i = pos + 1
        in_class = False
        while i < self.n:
            c = self.src[i]
            if c in _LINE_TERMINATORS:
                break
            if c == "\\":
                i += 2
                continue
            if c == "[":
                in_class = True
            elif c == "]":
                in_class = False
            elif c == "/" and not in_class:
                i += 1
                while i < self.n and _is_id_part(self.src[i]):
                    i += 1
                return i
            i += 1
        raise TokenizeError("unterminated regular expression", self.line_at(pos))


def _regex_allowed_after(kind: str, text: str) -> bool:
    if kind == "word":
        return text in table.REGEX_PRECEDING_WORDS
    if kind in (STRING, NUMBER, TEMPLATE, REGEX):
        return False
    if kind == "punct":
        return text not in (")", "]", "++", "--")
    return True


def _classify(raw: list[tuple[str, str, int, str]]) -> list[Token]:
    out: list[Token] = []
    depth = 0
    pending_q: list[int] = []  # bracket depth of each unmatched `?`
    prev_sig = ""
    for kind, text, line, ws in raw:
        if kind == "word":
            if prev_sig == "." or prev_sig == "?.":
                kind = OPERAND  # property name
            elif text in table.OPERATOR_WORDS:
                kind = OPERATOR
            else:
                kind = OPERAND
        elif kind == "punct":
            if text in table.OPENERS:
                depth += 1
                kind = OPERATOR
            elif text in table.CLOSERS:
                depth -= 1
                while pending_q and pending_q[-1] > depth:
                    pending_q.pop()
                kind = NOISE
            elif text == "?":
                pending_q.append(depth)
                kind = OPERATOR
            elif text == ":" and pending_q and pending_q[-1] == depth:
                pending_q.pop()
                kind = NOISE
            else:
                kind = OPERATOR
        if kind != COMMENT:
            prev_sig = text
        out.append(Token(kind, text, line, ws))
    return out


def tokenize(source: str, strict: bool = True) -> TokenList:
    """Split JavaScript source into classified tokens.

    With ``strict=False`` a lexical error does not raise; the valid prefix
    is returned and the error is attached as ``TokenList.error``.
    """
    lx = _Lexer(source)
    raw: list[tuple[str, str, int, str]] = []
    pos = 0
    line = 1
    regex_ok = True
    while True:
        start = pos
        pos = lx.skip_ws(pos)
        ws = source[start:pos]
        line += ws.count("\n")
        if pos >= lx.n:
            return TokenList(_classify(raw), trailing=ws)
        try:
            kind, end = lx.lex_one(pos, regex_ok)
        except TokenizeError as exc:
            tokens = TokenList(_classify(raw), trailing=source[start:])
            exc.tokens = tokens
            if strict:
                raise
            tokens.error = exc
            return tokens
        text = source[pos:end]
        raw.append((kind, text, line, ws))
        line += text.count("\n")
        if kind != COMMENT:
            regex_ok = _regex_allowed_after(kind, text)
        pos = end
