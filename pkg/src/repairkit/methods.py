"""Method extraction and verbatim snippet location for Java source files."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .lexer import JAVA_KEYWORDS, LexError, Token, strip_comments_blanks, tokenize

# Keywords that may directly precede '(' without opening a method body.
_CONTROL_BEFORE_PAREN = {
    "if", "for", "while", "switch", "catch", "synchronized", "return",
    "do", "new", "throw", "assert", "super", "this",
}

_PRIMITIVE_TYPES = {"void", "boolean", "byte", "char", "short", "int", "long", "float", "double"}


class ParseError(Exception):
    """Source file could not be analyzed structurally."""

    def __init__(self, message: str, path: str | Path = "<text>", line: int = 0):
        super().__init__(f"{path}:{line}: {message}")
        self.path = str(path)
        self.line = line


@dataclass(frozen=True)
class SourceFile:
    path: Path
    text: str

    @classmethod
    def read(cls, path: Path | str) -> "SourceFile":
        p = Path(path)
        return cls(path=p, text=p.read_text(encoding="utf-8"))


@dataclass
class MethodUnit:
    """One method or constructor, with its comment/blank-stripped body."""

    file_path: Path
    name: str
    signature: str
    header_line: int                 # 1-based line of the method name
    body_lines: list[str] = field(default_factory=list)
    original_span: tuple[int, int] = (0, 0)  # 1-based inclusive file lines

    @property
    def method_id(self) -> str:
        return f"{self.file_path}::{self.name}@{self.header_line}"

    def stripped_text(self) -> str:
        """Canonical stripped rendering: signature, body, closing brace."""
        return "\n".join([self.signature + " {", *self.body_lines, "}"])


def extract_methods(file: SourceFile) -> list[MethodUnit]:
    """All method/constructor declarations of a file, in source order.

    Raises ParseError instead of returning a partial list when the file
    cannot be lexed or braces do not balance.
    """
    try:
        tokens = tokenize(file.text)
    except LexError as exc:
        raise ParseError(str(exc), file.path, exc.line) from exc

    lines = file.text.split("\n")
    methods: list[MethodUnit] = []
    i = 0
    n = len(tokens)
    decl_start = 0  # token index where the current declaration began
    while i < n:
        tok = tokens[i]
        if tok.kind == "op" and tok.value in ";{}":
            decl_start = i + 1
            i += 1
            continue
        if _is_method_header(tokens, i):
            open_idx = _find_body_open(tokens, i)
            close_idx = _match_brace(tokens, open_idx)
            if close_idx is None:
                raise ParseError("unbalanced braces", file.path, tokens[open_idx].line)
            name_tok = tokens[i]
            sig_first = tokens[decl_start] if decl_start < n else name_tok
            signature = _render_signature(tokens[decl_start:open_idx])
            body_text = _slice_lines(lines, tokens[open_idx], tokens[close_idx])
            methods.append(MethodUnit(
                file_path=file.path,
                name=name_tok.value,
                signature=signature,
                header_line=name_tok.line,
                body_lines=strip_comments_blanks(body_text),
                original_span=(sig_first.line, tokens[close_idx].line),
            ))
            i = close_idx + 1
            decl_start = i
            continue
        i += 1

    if _brace_balance(tokens) != 0:
        raise ParseError("unbalanced braces at end of file", file.path,
                         tokens[-1].line if tokens else 0)
    return methods


def find_verbatim(snippet: str, function_text: str) -> tuple[int, int] | None:
    """Locate a snippet inside a function under per-line trimming.

    Returns the 1-based inclusive line span of the first occurrence, or
    None when the snippet does not appear.
    """
    want = [ln.strip() for ln in snippet.split("\n")]
    while want and not want[0]:
        want.pop(0)
    while want and not want[-1]:
        want.pop()
    have = [ln.strip() for ln in function_text.split("\n")]
    if not want:
        return None
    for start in range(len(have) - len(want) + 1):
        if have[start:start + len(want)] == want:
            return (start + 1, start + len(want))
    return None


def _is_method_header(tokens: list[Token], i: int) -> bool:
    tok = tokens[i]
    if tok.kind != "ident":
        return False
    if i + 1 >= len(tokens) or tokens[i + 1].value != "(":
        return False
    prev = tokens[i - 1] if i > 0 else None
    if prev is not None:
        if prev.kind == "keyword" and prev.value in _CONTROL_BEFORE_PAREN:
            return False
        if prev.value in {".", "@", "->", "::"}:
            return False
        # A call like foo(...) appears after operators or '(' or ','; a
        # declaration's name follows a type, modifier, '>', ']', ';{}' or
        # nothing (constructors right after the class header).
        if prev.kind == "op" and prev.value not in {">", "]", "}", "{", ";"}:
            return False
        if prev.kind in {"string", "char", "number"}:
            return False
    close = _match_paren(tokens, i + 1)
    if close is None:
        return False
    j = close + 1
    # Optional throws clause.
    if j < len(tokens) and tokens[j].kind == "keyword" and tokens[j].value == "throws":
        j += 1
        while j < len(tokens) and (tokens[j].kind in {"ident", "keyword"} or tokens[j].value in {",", "."}):
            j += 1
    if j >= len(tokens) or tokens[j].value != "{":
        return False
    # Constructors start a declaration themselves; methods need a preceding
    # type word in the same declaration.
    if prev is None:
        return True
    if prev.kind == "ident" or (prev.kind == "keyword" and (
            prev.value in _PRIMITIVE_TYPES or prev.value in {
                "public", "private", "protected", "static", "final",
                "abstract", "synchronized", "native", "strictfp", "default"})):
        return True
    return prev.value in {">", "]", "}", "{", ";"}


def _find_body_open(tokens: list[Token], name_idx: int) -> int:
    close = _match_paren(tokens, name_idx + 1)
    assert close is not None
    j = close + 1
    if j < len(tokens) and tokens[j].value == "throws":
        j += 1
        while j < len(tokens) and tokens[j].value != "{":
            j += 1
    return j


def _match_paren(tokens: list[Token], open_idx: int) -> int | None:
    depth = 0
    for j in range(open_idx, len(tokens)):
        v = tokens[j].value
        if v == "(":
            depth += 1
        elif v == ")":
            depth -= 1
            if depth == 0:
                return j
    return None


def _match_brace(tokens: list[Token], open_idx: int) -> int | None:
    depth = 0
    for j in range(open_idx, len(tokens)):
        v = tokens[j].value
        if v == "{":
            depth += 1
        elif v == "}":
            depth -= 1
            if depth == 0:
                return j
    return None


def _brace_balance(tokens: list[Token]) -> int:
    bal = 0
    for tok in tokens:
        if tok.value == "{":
            bal += 1
        elif tok.value == "}":
            bal -= 1
    return bal


def _render_signature(tokens: list[Token]) -> str:
    """Single-line signature text with minimal spacing."""
    parts: list[str] = []
    prev: Token | None = None
    for tok in tokens:
        if prev is not None and _needs_space(prev, tok):
            parts.append(" ")
        parts.append(tok.value)
        prev = tok
    return "".join(parts)


_WORDY = re.compile(r"[A-Za-z0-9_$]$")
_WORDY_START = re.compile(r"^[A-Za-z0-9_$]")


def _needs_space(prev: Token, cur: Token) -> bool:
    if _WORDY.search(prev.value) and _WORDY_START.search(cur.value):
        return True
    if prev.value in {",", ")"} and cur.value not in {")", ",", ";", "["}:
        return True
    if prev.kind == "keyword" and cur.value in {"<", "["}:
        return True
    if prev.value in {">", "]"} and _WORDY_START.search(cur.value):
        return True
    return False


def _slice_lines(lines: list[str], open_tok: Token, close_tok: Token) -> str:
    """Text strictly between a '{' token and its matching '}' token."""
    if open_tok.line == close_tok.line:
        return lines[open_tok.line - 1][open_tok.col + 1:close_tok.col]
    first = lines[open_tok.line - 1][open_tok.col + 1:]
    middle = lines[open_tok.line:close_tok.line - 1]
    last = lines[close_tok.line - 1][:close_tok.col]
    return "\n".join([first, *middle, last])
