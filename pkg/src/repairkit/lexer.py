"""Java-flavored lexer shared by method extraction, identifier mining, and metrics.

Operates on raw source text and keeps exact line/column positions so callers
can map tokens back to source spans. Comments and string contents are never
confused with code tokens.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass

# Reserved words of the target grammar, single source of truth for both the
# identifier rules here and the keyword-weighted n-gram metric.
JAVA_KEYWORDS = frozenset({
    "abstract", "assert", "boolean", "break", "byte", "case", "catch",
    "char", "class", "const", "continue", "default", "do", "double",
    "else", "enum", "extends", "final", "finally", "float", "for",
    "goto", "if", "implements", "import", "instanceof", "int",
    "interface", "long", "native", "new", "package", "private",
    "protected", "public", "return", "short", "static", "strictfp",
    "super", "switch", "synchronized", "this", "throw", "throws",
    "transient", "try", "void", "volatile", "while",
    "true", "false", "null",
})

_IDENT_RE = re.compile(r"[A-Za-z_$][A-Za-z0-9_$]*")

_OPERATORS = (
    ">>>=", "<<=", ">>=", ">>>", "...", "->", "::", "++", "--", "&&", "||",
    "==", "!=", "<=", ">=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=",
    "<<", ">>",
)


class LexError(Exception):
    """Unterminated string, char, or block comment."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class Token:
    kind: str  # ident | keyword | string | char | number | op
    value: str
    line: int  # 1-based
    col: int   # 0-based


def tokenize(text: str) -> list[Token]:
    """Lex source text into code tokens; comments are skipped entirely."""
    tokens: list[Token] = []
    i, n = 0, len(text)
    line, line_start = 1, 0
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            i += 1
            line_start = i
            continue
        if c in " \t\r\f":
            i += 1
            continue
        col = i - line_start
        if text.startswith("//", i):
            j = text.find("\n", i)
            i = n if j < 0 else j
            continue
        if text.startswith("/*", i):
            j = text.find("*/", i + 2)
            if j < 0:
                raise LexError("unterminated block comment", line)
            line += text.count("\n", i, j)
            i = j + 2
            # line_start is stale after multi-line comments; recompute.
            line_start = text.rfind("\n", 0, i) + 1
            continue
        if c == '"':
            j = _scan_quoted(text, i, '"', line)
            tokens.append(Token("string", text[i:j], line, col))
            i = j
            continue
        if c == "'":
            j = _scan_quoted(text, i, "'", line)
            tokens.append(Token("char", text[i:j], line, col))
            i = j
            continue
        if c.isdigit() or (c == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] in "._xX"):
                j += 1
            tokens.append(Token("number", text[i:j], line, col))
            i = j
            continue
        m = _IDENT_RE.match(text, i)
        if m:
            word = m.group()
            kind = "keyword" if word in JAVA_KEYWORDS else "ident"
            tokens.append(Token(kind, word, line, col))
            i = m.end()
            continue
        for op in _OPERATORS:
            if text.startswith(op, i):
                tokens.append(Token("op", op, line, col))
                i += len(op)
                break
        else:
            tokens.append(Token("op", c, line, col))
            i += 1
    return tokens


def _scan_quoted(text: str, start: int, quote: str, line: int) -> int:
    i = start + 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\\":
            i += 2
            continue
        if c == quote:
            return i + 1
        if c == "\n":
            break
        i += 1
    raise LexError(f"unterminated {quote}...{quote} literal", line)


def blank_comments(text: str) -> str:
    """Replace comment characters with spaces, preserving all positions.

    Newlines inside block comments are kept so line numbers stay valid.
    Lenient: an unterminated comment or string blanks/extends to EOF.
    """
    out = list(text)
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if text.startswith("//", i):
            j = text.find("\n", i)
            j = n if j < 0 else j
            for k in range(i, j):
                out[k] = " "
            i = j
        elif text.startswith("/*", i):
            j = text.find("*/", i + 2)
            j = n - 2 if j < 0 else j
            for k in range(i, j + 2):
                if out[k] != "\n":
                    out[k] = " "
            i = j + 2
        elif c == '"' or c == "'":
            try:
                i = _scan_quoted(text, i, c, 0)
            except LexError:
                i = n
        else:
            i += 1
    return "".join(out)


def _delete_comments(text: str) -> str:
    """Remove comment characters entirely, keeping newlines they spanned."""
    out: list[str] = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if text.startswith("//", i):
            j = text.find("\n", i)
            i = n if j < 0 else j
        elif text.startswith("/*", i):
            j = text.find("*/", i + 2)
            j = n - 2 if j < 0 else j
            out.extend(ch for ch in text[i:j + 2] if ch == "\n")
            i = j + 2
        elif c == '"' or c == "'":
            try:
                end = _scan_quoted(text, i, c, 0)
            except LexError:
                end = n
            out.append(text[i:end])
            i = end
        else:
            out.append(c)
            i += 1
    return "".join(out)


def strip_comments_blanks(method_text: str) -> list[str]:
    """Drop comments and blank lines, keeping code lines otherwise verbatim.

    A block comment sharing a line with code removes only the comment
    portion; the surviving code keeps its indentation.
    """
    cleaned = _delete_comments(method_text)
    lines = []
    for raw in cleaned.split("\n"):
        line = raw.rstrip()
        if line.strip():
            lines.append(line)
    return lines


def collect_identifiers(text: str) -> Counter[str]:
    """Multiset of identifier tokens; keywords, literals, and comment/string
    contents are excluded."""
    counts: Counter[str] = Counter()
    for tok in tokenize(text):
        if tok.kind == "ident":
            counts[tok.value] += 1
    return counts


def code_tokens(text: str) -> list[str]:
    """Token values for n-gram metrics (comments skipped, strings kept whole)."""
    return [tok.value for tok in tokenize(text)]
