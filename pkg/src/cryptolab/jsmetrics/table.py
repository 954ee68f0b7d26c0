"""Operator/operand classification table used by every metric.

Kept in one place so hand-computed oracle values stay stable.
"""

# Punctuators, longest first so the lexer can do maximal munch.
PUNCTUATORS = sorted(
    [
        ">>>=", "...", "===", "!==", "**=", "<<=", ">>=", ">>>", "&&=", "||=", "??=",
        "=>", "==", "!=", "<=", ">=", "&&", "||", "??", "?.", "++", "--",
        "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<", ">>", "**",
        "{", "}", "(", ")", "[", "]", ";", ",", "<", ">", "+", "-", "*", "/",
        "%", "&", "|", "^", "!", "~", "?", ":", "=", ".", "@", "#",
    ],
    key=len,
    reverse=True,
)

OPENERS = {"(": ")", "[": "]", "{": "}"}
CLOSERS = {")", "]", "}"}

# Reserved words that count as operators.
OPERATOR_WORDS = frozenset(
    {
        "var", "let", "const", "if", "else", "for", "while", "do", "switch",
        "case", "default", "return", "function", "new", "typeof", "delete",
        "void", "in", "of", "instanceof", "try", "catch", "finally", "throw",
        "break", "continue", "class", "extends", "yield", "await", "with",
        "debugger", "import", "export",
    }
)

# Words that behave like identifiers for counting purposes.
OPERAND_WORDS = frozenset({"true", "false", "null", "undefined", "this", "super", "NaN", "Infinity"})

# Halstead key for grouped punctuators: a pair counts as one operator.
OPERATOR_KEY = {"(": "()", "[": "[]", "{": "{}", "?": "?:"}

# Decision points for cyclomatic complexity.
DECISION_WORDS = frozenset({"if", "case", "for", "while", "do", "catch"})
DECISION_PUNCTUATORS = frozenset({"?", "&&", "||"})

# Control/function headers that count as a logical line.
HEADER_WORDS = frozenset({"if", "else", "for", "while", "do", "switch", "try", "catch", "finally", "function"})

# After these words a `/` starts a regular expression, not a division.
REGEX_PRECEDING_WORDS = frozenset(
    {
        "return", "typeof", "case", "do", "else", "in", "of", "instanceof",
        "new", "delete", "void", "throw", "yield", "await",
    }
)
