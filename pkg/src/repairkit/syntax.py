"""Lenient structural parser for Java-like snippets.

Produces a concrete statement/expression tree that is deliberately
approximate: good enough for subtree matching and def-use extraction on
patch-sized snippets, with no symbol resolution. Snippets need not be
complete compilation units; a bare statement list parses directly.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .lexer import LexError, Token, tokenize

_MODIFIERS = {
    "public", "private", "protected", "static", "final", "abstract",
    "synchronized", "native", "strictfp", "transient", "volatile", "default",
}
_PRIMITIVES = {"void", "boolean", "byte", "char", "short", "int", "long", "float", "double"}
_ASSIGN_OPS = {"=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=", ">>>="}
_BINARY_PREC = {
    "||": 3, "&&": 4, "|": 5, "^": 6, "&": 7,
    "==": 8, "!=": 8,
    "<": 9, ">": 9, "<=": 9, ">=": 9, "instanceof": 9,
    "<<": 10, ">>": 10, ">>>": 10,
    "+": 11, "-": 11,
    "*": 12, "/": 12, "%": 12,
}
_UNARY_OPS = {"!", "~", "+", "-", "++", "--"}


class ParseFailure(Exception):
    """Snippet could not be parsed even leniently."""


@dataclass
class Node:
    kind: str
    children: list["Node"] = field(default_factory=list)
    value: str | None = None

    def walk(self):
        yield self
        for child in self.children:
            yield from child.walk()


def parse_snippet(text: str) -> Node:
    """Parse a snippet (statements, a method, or a class body) into a tree."""
    try:
        tokens = tokenize(text)
    except LexError as exc:
        raise ParseFailure(str(exc)) from exc
    parser = _Parser(tokens)
    stmts = parser.parse_statements(stop_at_close=False)
    return Node("program", stmts)


# ---------------------------------------------------------------------------
# tree consumers

def subtree_multiset(tree: Node, min_depth: int = 2) -> Counter[str]:
    """Multiset of anonymized subtree shapes with depth >= min_depth.

    Identifier leaves serialize as ID and literals by their kind only, so
    consistent renames do not change the multiset. The program root itself
    is not counted; it would otherwise make every pair of distinct snippets
    differ by one subtree regardless of content.
    """
    counts: Counter[str] = Counter()

    def serialize(node: Node) -> tuple[str, int]:
        if not node.children:
            if node.kind == "name":
                return "ID", 1
            if node.kind.startswith("lit_"):
                return node.kind.upper(), 1
            label = node.kind if node.value is None else f"{node.kind}:{node.value}"
            return label, 1
        parts = []
        depth = 1
        for child in node.children:
            s, d = serialize(child)
            parts.append(s)
            depth = max(depth, d + 1)
        label = node.kind if node.value is None else f"{node.kind}:{node.value}"
        rendered = f"{label}({','.join(parts)})"
        if depth >= min_depth and node is not tree:
            counts[rendered] += 1
        return rendered, depth

    serialize(tree)
    return counts


def def_use_edges(tree: Node) -> list[tuple[int, int]]:
    """Positionally normalized def-use edges.

    Definitions (declarations, assignments, loop/catch/parameter bindings)
    are numbered in visit order. Every use of a variable with a known
    definition yields an edge (position of the definition being created at
    the use site, or -1 for a bare use, position of the used variable's
    definition).
    """
    env: dict[str, int] = {}
    counter = [0]
    edges: list[tuple[int, int]] = []

    def define(name: str) -> int:
        pos = counter[0]
        counter[0] += 1
        env[name] = pos
        return pos

    def uses_in(node: Node | None, acc: list[int]):
        if node is None:
            return
        if node.kind == "name":
            if node.value in env:
                acc.append(env[node.value])
            return
        if node.kind == "member":
            uses_in(node.children[0], acc)
            return
        if node.kind == "call":
            callee = node.children[0]
            if callee.kind != "name":  # bare name callee is a method, not a var
                uses_in(callee, acc)
            for arg in node.children[1:]:
                uses_in(arg, acc)
            return
        if node.kind == "type":
            return
        for child in node.children:
            uses_in(child, acc)

    def visit(node: Node):
        if node.kind == "var":
            name_node = node.children[0]
            init = node.children[1] if len(node.children) > 1 else None
            used: list[int] = []
            uses_in(init, used)
            pos = define(name_node.value or "")
            edges.extend((pos, u) for u in used)
            return
        if node.kind == "assign":
            target, value = node.children[0], node.children[1]
            used: list[int] = []
            uses_in(value, used)
            if target.kind == "name":
                pos = define(target.value or "")
                edges.extend((pos, u) for u in used)
            else:
                used2: list[int] = []
                uses_in(target, used2)
                edges.extend((-1, u) for u in used2 + used)
            return
        if node.kind in {"param", "bind"}:
            define(node.value or "")
            return
        if node.kind == "name":
            if node.value in env:
                edges.append((-1, env[node.value]))
            return
        if node.kind == "member":
            visit(node.children[0])
            return
        if node.kind == "call":
            callee = node.children[0]
            if callee.kind != "name":
                visit(callee)
            for arg in node.children[1:]:
                visit(arg)
            return
        if node.kind == "type":
            return
        for child in node.children:
            visit(child)

    visit(tree)
    return edges


# ---------------------------------------------------------------------------
# parser internals

class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0

    # -- token helpers ------------------------------------------------------
    def peek(self, offset: int = 0) -> Token | None:
        j = self.i + offset
        return self.toks[j] if j < len(self.toks) else None

    def at(self, value: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.value == value

    def advance(self) -> Token:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def accept(self, value: str) -> bool:
        if self.at(value):
            self.i += 1
            return True
        return False

    # -- statements ---------------------------------------------------------
    def parse_statements(self, stop_at_close: bool) -> list[Node]:
        stmts: list[Node] = []
        while self.peek() is not None:
            if stop_at_close and self.at("}"):
                break
            before = self.i
            stmt = self.parse_statement()
            if stmt is not None:
                stmts.append(stmt)
            if self.i == before:  # always make progress
                self.i += 1
        return stmts

    def parse_statement(self) -> Node | None:
        tok = self.peek()
        if tok is None:
            return None
        v = tok.value
        if v == ";":
            self.advance()
            return None
        if v == "{":
            return self.parse_block()
        if v == "}":
            self.advance()
            return None
        if tok.kind == "keyword":
            handler = {
                "if": self._parse_if, "while": self._parse_while,
                "do": self._parse_do, "for": self._parse_for,
                "switch": self._parse_switch, "try": self._parse_try,
                "return": self._parse_return, "throw": self._parse_throw,
                "break": self._parse_jump, "continue": self._parse_jump,
                "synchronized": self._parse_sync, "assert": self._parse_assert,
                "case": self._parse_case, "default": self._parse_case,
            }.get(v)
            if handler is not None:
                return handler()
            if v in {"class", "interface", "enum"}:
                return self._parse_class_like()
        if self._looks_like_method_header():
            return self._parse_method()
        return self._parse_simple()

    def parse_block(self) -> Node:
        self.accept("{")
        stmts = self.parse_statements(stop_at_close=True)
        self.accept("}")
        return Node("block", stmts)

    def _parse_paren_expr(self) -> Node:
        self.accept("(")
        expr = self.parse_expression()
        self._skip_until({")"})
        self.accept(")")
        return expr

    def _parse_if(self) -> Node:
        self.advance()
        cond = self._parse_paren_expr()
        then = self.parse_statement() or Node("empty")
        children = [cond, then]
        if self.at("else"):
            self.advance()
            children.append(self.parse_statement() or Node("empty"))
        return Node("if", children)

    def _parse_while(self) -> Node:
        self.advance()
        cond = self._parse_paren_expr()
        body = self.parse_statement() or Node("empty")
        return Node("while", [cond, body])

    def _parse_do(self) -> Node:
        self.advance()
        body = self.parse_statement() or Node("empty")
        cond = Node("empty")
        if self.accept("while"):
            cond = self._parse_paren_expr()
        self.accept(";")
        return Node("do", [body, cond])

    def _parse_for(self) -> Node:
        self.advance()
        self.accept("(")
        header = self._collect_group(")")
        body = self.parse_statement() or Node("empty")
        parts = _split_top(header, ";")
        if len(parts) == 1 and _contains_top(header, ":"):
            left, right = _split_once_top(header, ":")
            bind = Node("bind", value=left[-1].value if left else "")
            iterable = _Parser(right).parse_expression()
            return Node("foreach", [bind, iterable, body])
        children: list[Node] = []
        for k, part in enumerate(parts):
            if not part:
                children.append(Node("empty"))
                continue
            sub = _Parser(part)
            node = sub._try_declaration() if k == 0 else None
            if node is None:
                node = sub.parse_expression()
            children.append(node)
        children.append(body)
        return Node("for", children)

    def _parse_switch(self) -> Node:
        self.advance()
        selector = self._parse_paren_expr()
        body = self.parse_block() if self.at("{") else Node("block")
        return Node("switch", [selector, body])

    def _parse_case(self) -> Node:
        label = self.advance().value
        children = []
        if label == "case":
            children.append(self.parse_expression())
        self.accept(":")
        return Node("case", children)

    def _parse_try(self) -> Node:
        self.advance()
        children: list[Node] = []
        if self.at("("):  # try-with-resources
            self.accept("(")
            group = self._collect_group(")")
            for part in _split_top(group, ";"):
                if part:
                    sub = _Parser(part)
                    children.append(sub._try_declaration() or sub.parse_expression())
        children.append(self.parse_block() if self.at("{") else Node("empty"))
        while self.at("catch"):
            self.advance()
            self.accept("(")
            group = self._collect_group(")")
            name = group[-1].value if group else ""
            body = self.parse_block() if self.at("{") else Node("empty")
            children.append(Node("catch", [Node("bind", value=name), body]))
        if self.accept("finally"):
            children.append(Node("finally", [self.parse_block() if self.at("{") else Node("empty")]))
        return Node("try", children)

    def _parse_return(self) -> Node:
        self.advance()
        if self.at(";") or self.peek() is None or self.at("}"):
            self.accept(";")
            return Node("return")
        expr = self.parse_expression()
        self._skip_until({";", "}"})
        self.accept(";")
        return Node("return", [expr])

    def _parse_throw(self) -> Node:
        self.advance()
        expr = self.parse_expression()
        self._skip_until({";", "}"})
        self.accept(";")
        return Node("throw", [expr])

    def _parse_jump(self) -> Node:
        kind = self.advance().value
        tok = self.peek()
        if tok is not None and tok.kind == "ident":
            self.advance()
        self.accept(";")
        return Node(kind)

    def _parse_sync(self) -> Node:
        self.advance()
        children = []
        if self.at("("):
            children.append(self._parse_paren_expr())
        children.append(self.parse_block() if self.at("{") else (self.parse_statement() or Node("empty")))
        return Node("sync", children)

    def _parse_assert(self) -> Node:
        self.advance()
        expr = self.parse_expression()
        self._skip_until({";", "}"})
        self.accept(";")
        return Node("assert", [expr])

    def _parse_class_like(self) -> Node:
        while self.peek() is not None and not self.at("{") and not self.at(";"):
            self.advance()
        body = self.parse_block() if self.at("{") else Node("block")
        self.accept(";")
        return Node("classdecl", [body])

    # -- declarations and methods -------------------------------------------
    def _looks_like_method_header(self) -> bool:
        j = self.i
        toks = self.toks
        while j < len(toks) and toks[j].kind == "keyword" and toks[j].value in _MODIFIERS:
            j += 1
        if j < len(toks) and toks[j].value == "@":
            return False
        start = j
        # type part: primitive or dotted idents with generics/arrays
        j = _scan_type(toks, j)
        if j is None or j == start:
            # constructor: Name ( ... ) {
            j = start
        if j >= len(toks) or toks[j].kind != "ident" or not _next_is(toks, j + 1, "("):
            # constructor form: the type scan consumed the name
            if (start < len(toks) and toks[start].kind == "ident"
                    and _next_is(toks, start + 1, "(")):
                j = start
            else:
                return False
        close = _match_group(toks, j + 1, "(", ")")
        if close is None:
            return False
        k = close + 1
        if k < len(toks) and toks[k].value == "throws":
            while k < len(toks) and toks[k].value != "{":
                k += 1
        return k < len(toks) and toks[k].value == "{"

    def _parse_method(self) -> Node:
        while self.peek() is not None and not (
                self.peek().kind == "ident" and _next_is(self.toks, self.i + 1, "(")):
            self.advance()
        self.advance()  # name
        self.accept("(")
        params_group = self._collect_group(")")
        params = []
        for part in _split_top(params_group, ","):
            if part:
                params.append(Node("param", value=part[-1].value))
        while self.peek() is not None and not self.at("{"):
            self.advance()
        body = self.parse_block() if self.at("{") else Node("block")
        return Node("method", [*params, body])

    def _parse_simple(self) -> Node:
        node = self._try_declaration()
        if node is None:
            node = self.parse_expression()
        self._skip_until({";", "}"})
        self.accept(";")
        return Node("exprstmt", [node]) if node.kind not in {"decl"} else node

    def _try_declaration(self) -> Node | None:
        """Parse `[final] Type name [= expr] (, name [= expr])*` if present."""
        save = self.i
        toks = self.toks
        j = self.i
        while j < len(toks) and toks[j].kind == "keyword" and toks[j].value in _MODIFIERS:
            j += 1
        end = _scan_type(toks, j)
        if end is None or end >= len(toks) or toks[end].kind != "ident":
            return None
        nxt = toks[end + 1].value if end + 1 < len(toks) else ";"
        if nxt not in {"=", ";", ",", ":"} and not (nxt == "[" and _next_is(toks, end + 2, "]")):
            return None
        type_node = Node("type", value=" ".join(t.value for t in toks[j:end]))
        self.i = end
        declarators: list[Node] = [type_node]
        while True:
            name_tok = self.advance()
            while self.accept("["):
                self.accept("]")
            children = [Node("name", value=name_tok.value)]
            if self.accept("="):
                children.append(self.parse_expression())
            declarators.append(Node("var", children))
            if not self.accept(","):
                break
            if self.peek() is None or self.peek().kind != "ident":
                break
        if self.peek() is not None and self.peek().value not in {";", ")", "}", ":"}:
            # not actually a declaration (e.g. `a < b ...`); rewind
            self.i = save
            return None
        return Node("decl", declarators)

    # -- expressions ----------------------------------------------------------
    def parse_expression(self) -> Node:
        return self._parse_assign()

    def _parse_assign(self) -> Node:
        left = self._parse_ternary()
        tok = self.peek()
        if tok is not None and tok.value in _ASSIGN_OPS:
            op = self.advance().value
            right = self._parse_assign()
            return Node("assign", [left, right], value=op)
        return left

    def _parse_ternary(self) -> Node:
        cond = self._parse_binary(0)
        if self.accept("?"):
            then = self.parse_expression()
            self.accept(":")
            other = self.parse_expression()
            return Node("ternary", [cond, then, other])
        return cond

    def _parse_binary(self, min_prec: int) -> Node:
        left = self._parse_unary()
        while True:
            tok = self.peek()
            if tok is None:
                return left
            prec = _BINARY_PREC.get(tok.value)
            if prec is None or prec < min_prec:
                return left
            op = self.advance().value
            if op == "instanceof":
                j = _scan_type(self.toks, self.i)
                if j is not None:
                    self.i = j
                left = Node("binary", [left], value="instanceof")
                continue
            right = self._parse_binary(prec + 1)
            left = Node("binary", [left, right], value=op)

    def _parse_unary(self) -> Node:
        tok = self.peek()
        if tok is not None and tok.value in _UNARY_OPS:
            op = self.advance().value
            return Node("unary", [self._parse_unary()], value=op)
        return self._parse_postfix()

    def _parse_postfix(self) -> Node:
        node = self._parse_primary()
        while True:
            tok = self.peek()
            if tok is None:
                return node
            if tok.value == ".":
                self.advance()
                attr = self.peek()
                name = attr.value if attr is not None else ""
                if attr is not None:
                    self.advance()
                node = Node("member", [node, Node("name", value=name)])
            elif tok.value == "(":
                self.advance()
                args = self._parse_args()
                node = Node("call", [node, *args])
            elif tok.value == "[":
                self.advance()
                idx = self.parse_expression() if not self.at("]") else Node("empty")
                self.accept("]")
                node = Node("index", [node, idx])
            elif tok.value in {"++", "--"}:
                self.advance()
                node = Node("postfix", [node], value=tok.value)
            elif tok.value == "::":
                self.advance()
                if self.peek() is not None:
                    self.advance()
                node = Node("methodref", [node])
            else:
                return node

    def _parse_args(self) -> list[Node]:
        args: list[Node] = []
        if self.accept(")"):
            return args
        while True:
            args.append(self.parse_expression())
            if self.accept(","):
                continue
            self._skip_until({")"})
            self.accept(")")
            return args

    def _parse_primary(self) -> Node:
        tok = self.peek()
        if tok is None:
            return Node("empty")
        v = tok.value
        if v == "(":
            # lambda `(a, b) -> ...` or cast `(Type) expr` or grouping
            close = _match_group(self.toks, self.i, "(", ")")
            if close is not None and _next_is(self.toks, close + 1, "->"):
                self.i = close + 2
                body = self.parse_block() if self.at("{") else self.parse_expression()
                return Node("lambda", [body])
            if close is not None and _is_type_group(self.toks, self.i + 1, close) \
                    and _starts_cast_operand(self.toks, close + 1):
                self.i = close + 1
                return Node("cast", [self._parse_unary()])
            self.advance()
            inner = self.parse_expression()
            self._skip_until({")"})
            self.accept(")")
            return inner
        if v == "{":
            self.advance()
            items: list[Node] = []
            while self.peek() is not None and not self.at("}"):
                items.append(self.parse_expression())
                if not self.accept(","):
                    break
            self._skip_until({"}"})
            self.accept("}")
            return Node("arrayinit", items)
        if tok.kind == "string":
            self.advance()
            return Node("lit_string")
        if tok.kind == "char":
            self.advance()
            return Node("lit_char")
        if tok.kind == "number":
            self.advance()
            return Node("lit_number")
        if tok.kind == "keyword":
            if v in {"true", "false"}:
                self.advance()
                return Node("lit_bool")
            if v == "null":
                self.advance()
                return Node("lit_null")
            if v in {"this", "super"}:
                self.advance()
                return Node("name", value=v)
            if v == "new":
                return self._parse_new()
            if v in _PRIMITIVES:
                self.advance()
                while self.accept("["):
                    self.accept("]")
                return Node("type", value=v)
            self.advance()
            return Node("name", value=v)
        if tok.kind == "ident":
            if _next_is(self.toks, self.i + 1, "->"):
                self.advance()
                self.advance()
                body = self.parse_block() if self.at("{") else self.parse_expression()
                return Node("lambda", [body])
            self.advance()
            return Node("name", value=v)
        self.advance()
        return Node("op", value=v)

    def _parse_new(self) -> Node:
        self.advance()  # new
        j = _scan_type(self.toks, self.i)
        if j is not None:
            self.i = j
        children: list[Node] = []
        if self.accept("("):
            children = self._parse_args()
        elif self.at("["):
            while self.accept("["):
                if not self.at("]"):
                    children.append(self.parse_expression())
                self.accept("]")
            if self.at("{"):
                children.append(self._parse_primary())
        node = Node("new", children)
        if self.at("{"):  # anonymous class body
            node.children.append(self.parse_block())
        return node

    # -- low-level helpers ---------------------------------------------------
    def _collect_group(self, closer: str) -> list[Token]:
        """Consume tokens up to the matching closer, returning the interior."""
        opener = {")": "(", "]": "[", "}": "{"}[closer]
        depth = 1
        out: list[Token] = []
        while self.peek() is not None:
            tok = self.advance()
            if tok.value == opener:
                depth += 1
            elif tok.value == closer:
                depth -= 1
                if depth == 0:
                    return out
            out.append(tok)
        return out

    def _skip_until(self, stops: set[str]):
        depth = 0
        while self.peek() is not None:
            v = self.peek().value
            if depth == 0 and v in stops:
                return
            if v in "([{":
                depth += 1
            elif v in ")]}":
                if depth == 0:
                    return
                depth -= 1
            self.advance()


def _next_is(toks: list[Token], j: int, value: str) -> bool:
    return j < len(toks) and toks[j].value == value


def _match_group(toks: list[Token], open_idx: int, opener: str, closer: str) -> int | None:
    depth = 0
    for j in range(open_idx, len(toks)):
        if toks[j].value == opener:
            depth += 1
        elif toks[j].value == closer:
            depth -= 1
            if depth == 0:
                return j
    return None


def _scan_type(toks: list[Token], j: int) -> int | None:
    """Scan a type occurrence starting at j; return index past it, or None."""
    start = j
    if j >= len(toks):
        return None
    tok = toks[j]
    if tok.kind == "keyword" and tok.value in _PRIMITIVES:
        j += 1
    elif tok.kind == "ident":
        j += 1
        while _next_is(toks, j, ".") and j + 1 < len(toks) and toks[j + 1].kind == "ident":
            j += 2
    else:
        return None
    if _next_is(toks, j, "<"):
        close = _match_angle(toks, j)
        if close is None:
            return j if j > start else None
        j = close + 1
    while _next_is(toks, j, "[") and _next_is(toks, j + 1, "]"):
        j += 2
    return j


def _match_angle(toks: list[Token], open_idx: int) -> int | None:
    depth = 0
    for j in range(open_idx, len(toks)):
        v = toks[j].value
        if v == "<":
            depth += 1
        elif v in {">", ">>", ">>>"}:
            depth -= len(v)
            if depth <= 0:
                return j
        elif v not in {",", ".", "?", "extends", "super", "[", "]"} and toks[j].kind not in {"ident", "keyword"}:
            return None
    return None


def _is_type_group(toks: list[Token], start: int, end: int) -> bool:
    if start >= end:
        return False
    for j in range(start, end):
        tok = toks[j]
        if tok.kind in {"ident"}:
            continue
        if tok.kind == "keyword" and tok.value in _PRIMITIVES:
            continue
        if tok.value in {".", "<", ">", "[", "]", ",", "?", "extends", "super"}:
            continue
        return False
    return True


def _starts_cast_operand(toks: list[Token], j: int) -> bool:
    if j >= len(toks):
        return False
    tok = toks[j]
    if tok.kind in {"ident", "string", "char", "number"}:
        return True
    return tok.value in {"(", "!", "~", "new", "this", "super", "true", "false", "null"}


def _split_top(toks: list[Token], sep: str) -> list[list[Token]]:
    parts: list[list[Token]] = [[]]
    depth = 0
    for tok in toks:
        if tok.value in "([{":
            depth += 1
        elif tok.value in ")]}":
            depth -= 1
        if depth == 0 and tok.value == sep:
            parts.append([])
        else:
            parts[-1].append(tok)
    return parts


def _contains_top(toks: list[Token], value: str) -> bool:
    depth = 0
    for tok in toks:
        if tok.value in "([{":
            depth += 1
        elif tok.value in ")]}":
            depth -= 1
        elif depth == 0 and tok.value == value:
            return True
    return False


def _split_once_top(toks: list[Token], sep: str) -> tuple[list[Token], list[Token]]:
    depth = 0
    for idx, tok in enumerate(toks):
        if tok.value in "([{":
            depth += 1
        elif tok.value in ")]}":
            depth -= 1
        elif depth == 0 and tok.value == sep:
            return toks[:idx], toks[idx + 1:]
    return toks, []
