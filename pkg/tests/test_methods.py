from pathlib import Path

import pytest

from repairkit.methods import ParseError, SourceFile, extract_methods, find_verbatim

DEMO = """\
package demo;

/** Utilities. */
public class Demo {
    private int count; // field

    public Demo(int count) {
        this.count = count;
    }

    public String getString(String key, Properties props) throws IOException {
        String value = props.getProperty(key); // lookup
        if (value == null) {
            return "";
        }
        return value.trim();
    }

    static <T> List<T> wrap(T item) {
        List<T> out = new ArrayList<>();
        out.add(item);
        return out;
    }

    void commentsOnly() {
        // nothing yet
    }
}
"""


def _extract(text: str):
    return extract_methods(SourceFile(Path("Demo.java"), text))


class TestExtractMethods:
    def test_names_and_order(self):
        methods = _extract(DEMO)
        assert [m.name for m in methods] == ["Demo", "getString", "wrap", "commentsOnly"]

    def test_hand_annotated_spans(self):
        methods = {m.name: m for m in _extract(DEMO)}
        assert methods["Demo"].original_span == (7, 9)
        assert methods["Demo"].header_line == 7
        assert methods["getString"].original_span == (11, 17)
        assert methods["wrap"].original_span == (19, 23)

    def test_body_stripping(self):
        methods = {m.name: m for m in _extract(DEMO)}
        assert methods["commentsOnly"].body_lines == []
        assert methods["getString"].body_lines[0].strip() == \
            "String value = props.getProperty(key);"
        assert all(line.strip() for m in _extract(DEMO) for line in m.body_lines)

    def test_control_flow_not_mistaken_for_methods(self):
        text = """\
class A {
    void run(int n) {
        if (n > 0) {
            process(n);
        }
        while (n-- > 0) {
            tick();
        }
        try (Closeable c = open()) {
            use(c);
        } catch (Exception e) {
            log(e);
        }
    }
}
"""
        assert [m.name for m in _extract(text)] == ["run"]

    def test_parse_error_on_unbalanced_braces(self):
        with pytest.raises(ParseError):
            _extract("class A { void f() { }")

    def test_parse_error_on_unterminated_string(self):
        with pytest.raises(ParseError):
            _extract('class A { String s = "; }')

    def test_reextraction_is_stable(self):
        first = _extract(DEMO)
        second = _extract(DEMO)
        assert first == second

    def test_signature_text(self):
        methods = {m.name: m for m in _extract(DEMO)}
        assert methods["getString"].signature == \
            "public String getString(String key, Properties props) throws IOException"


class TestFindVerbatim:
    FUNC = "void f() {\n    int a = 1;\n    int b = 2;\n    return;\n}"

    def test_exact_lines(self):
        assert find_verbatim("    int a = 1;\n    int b = 2;", self.FUNC) == (2, 3)

    def test_reindented_snippet_found(self):
        assert find_verbatim("int a = 1;\nint b = 2;", self.FUNC) == (2, 3)

    def test_absent_snippet(self):
        assert find_verbatim("int c = 3;", self.FUNC) is None

    def test_first_match_wins(self):
        func = "a;\nx;\na;\nx;"
        assert find_verbatim("a;", func) == (1, 1)

    def test_span_lines_match_snippet_after_trim(self):
        span = find_verbatim("int b = 2;", self.FUNC)
        assert span is not None
        start, end = span
        lines = self.FUNC.split("\n")[start - 1:end]
        assert [ln.strip() for ln in lines] == ["int b = 2;"]
