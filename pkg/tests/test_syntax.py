from collections import Counter

import pytest
from hypothesis import given, strategies as st

from repairkit.syntax import (Node, ParseFailure, def_use_edges, parse_snippet,
                              subtree_multiset)


def kinds(text: str) -> list[str]:
    return [child.kind for child in parse_snippet(text).children]


class TestParseSnippet:
    def test_statement_kinds(self):
        text = """\
int a = 1;
if (a > 0) { a--; }
while (a < 10) a++;
for (int i = 0; i < 3; i++) { run(i); }
return a;
"""
        assert kinds(text) == ["decl", "if", "while", "for", "return"]

    def test_foreach(self):
        tree = parse_snippet("for (String s : items) { use(s); }")
        assert tree.children[0].kind == "foreach"
        assert tree.children[0].children[0].kind == "bind"
        assert tree.children[0].children[0].value == "s"

    def test_try_catch_finally(self):
        tree = parse_snippet(
            "try { risky(); } catch (IOException e) { log(e); } finally { close(); }")
        node = tree.children[0]
        assert node.kind == "try"
        assert [c.kind for c in node.children] == ["block", "catch", "finally"]

    def test_method_declaration_with_params(self):
        tree = parse_snippet("public int add(int a, int b) { return a + b; }")
        method = tree.children[0]
        assert method.kind == "method"
        assert [p.value for p in method.children if p.kind == "param"] == ["a", "b"]

    def test_expression_shapes(self):
        tree = parse_snippet("x = a.b(c)[0] + y * 2;")
        stmt = tree.children[0]
        assert stmt.kind == "exprstmt"
        assign = stmt.children[0]
        assert assign.kind == "assign"
        plus = assign.children[1]
        assert plus.kind == "binary" and plus.value == "+"

    def test_ternary_and_lambda(self):
        tree = parse_snippet("r = flag ? x : () -> compute();")
        assign = tree.children[0].children[0]
        assert assign.children[1].kind == "ternary"
        assert assign.children[1].children[2].kind == "lambda"

    def test_new_and_generics(self):
        tree = parse_snippet("List<String> out = new ArrayList<>();")
        decl = tree.children[0]
        assert decl.kind == "decl"
        assert decl.children[0].value == "List < String >"
        assert decl.children[1].children[1].kind == "new"

    def test_snippet_need_not_be_complete(self):
        # a bare statement list, no class or method wrapper, still parses
        tree = parse_snippet("a.b();\nreturn a;")
        assert [c.kind for c in tree.children] == ["exprstmt", "return"]

    def test_lex_error_becomes_parse_failure(self):
        with pytest.raises(ParseFailure):
            parse_snippet('String s = "broken;')

    def test_garbage_still_yields_tree(self):
        # lenient mode: junk tokens never raise, they degrade
        tree = parse_snippet(") ] } ;")
        assert tree.kind == "program"


class TestSubtreeMultiset:
    def test_leaf_trees_excluded(self):
        counts = subtree_multiset(Node("name", value="x"))
        assert counts == Counter()

    def test_hand_enumerated_shapes(self):
        # decl(type, var(ID, LIT_NUMBER)) yields two subtrees of depth >= 2:
        # the var node and the decl node wrapping it.
        counts = subtree_multiset(parse_snippet("int a = 1;"))
        assert counts == Counter({
            "var(ID,LIT_NUMBER)": 1,
            "decl(type:int,var(ID,LIT_NUMBER))": 1,
        })

    def test_identifier_anonymization(self):
        a = subtree_multiset(parse_snippet("int total = base;"))
        b = subtree_multiset(parse_snippet("int sum = other;"))
        assert a == b

    def test_literal_kind_matters(self):
        a = subtree_multiset(parse_snippet("x = 1;"))
        b = subtree_multiset(parse_snippet('x = "1";'))
        assert a != b

    def test_literal_value_ignored(self):
        a = subtree_multiset(parse_snippet("x = 1;"))
        b = subtree_multiset(parse_snippet("x = 42;"))
        assert a == b

    def test_counts_are_multiset(self):
        single = subtree_multiset(parse_snippet("f(a);"))
        double = subtree_multiset(parse_snippet("f(a); f(b);"))
        for key, count in single.items():
            assert double[key] == 2 * count


class TestDefUseEdges:
    def test_decl_then_use(self):
        assert def_use_edges(parse_snippet("int a = 1; int b = a;")) == [(1, 0)]

    def test_bare_use_in_return(self):
        # a defined at 0 from an unknown name; both return uses are bare
        edges = def_use_edges(parse_snippet("String a = s; return a.trim() + a;"))
        assert edges == [(-1, 0), (-1, 0)]

    def test_chain(self):
        # a(0), b(1) uses a, c(2) uses b
        edges = def_use_edges(parse_snippet("int a = 1; int b = a; int c = b;"))
        assert edges == [(1, 0), (2, 1)]

    def test_reassignment_creates_new_def(self):
        # a(0); a(1) = a(0) + 1 -> edge (1, 0); b(2) = a -> edge (2, 1)
        edges = def_use_edges(parse_snippet("int a = 1; a = a + 1; int b = a;"))
        assert edges == [(1, 0), (2, 1)]

    def test_unknown_names_ignored(self):
        assert def_use_edges(parse_snippet("x = someGlobal;")) == []

    def test_method_callee_not_a_use(self):
        # trim is a bare callee, not a variable use; a.length() uses a
        edges = def_use_edges(parse_snippet("int a = 1; trim(); a.length();"))
        assert edges == [(-1, 0)]

    def test_parameters_are_definitions(self):
        edges = def_use_edges(parse_snippet("void f(int a) { int b = a; }"))
        assert edges == [(1, 0)]

    def test_order_normalization(self):
        # renaming every variable leaves the positional edges unchanged
        left = def_use_edges(parse_snippet("int a = 1; int b = a; return b;"))
        right = def_use_edges(parse_snippet("int x = 1; int y = x; return y;"))
        assert left == right


@given(st.sampled_from([
    "int a = 1;",
    "if (x) { y(); } else { z(); }",
    "for (int i = 0; i < n; i++) sum += i;",
    "return a.b(c, d);",
    "try { f(); } catch (E e) { g(e); }",
]))
def test_parse_is_deterministic(code):
    assert subtree_multiset(parse_snippet(code)) == subtree_multiset(parse_snippet(code))
    assert def_use_edges(parse_snippet(code)) == def_use_edges(parse_snippet(code))
