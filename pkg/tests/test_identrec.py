from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, strategies as st

from repairkit.identrec import (MAX_CANDIDATES, VECTOR_DIMS, IdentifierTable,
                                build_identifier_table, build_project_table,
                                chunk_file, cosine, detect_suspects,
                                identifier_similarity, recommend, render_suggestions,
                                subtokens, vectorize_identifier)
from repairkit.methods import SourceFile

CONFIG_FILE = """\
package app;

public class Config {
    private Properties props;
    private int maxRetries;

    public String getString(String key) {
        String value = props.getProperty(key);
        if (value == null) {
            return "";
        }
        return value.trim();
    }

    public int getInt(String key) {
        return Integer.parseInt(getString(key));
    }
}
"""


class TestSubtokens:
    @pytest.mark.parametrize("name,parts", [
        ("getString", ["get", "string"]),
        ("maxRetries", ["max", "retries"]),
        ("HTTPServer", ["http", "server"]),
        ("snake_case_name", ["snake", "case", "name"]),
        ("value2", ["value2"]),
        ("X", ["x"]),
    ])
    def test_splits(self, name, parts):
        assert subtokens(name) == parts


class TestVectors:
    def test_shape_and_dtype(self):
        vec = vectorize_identifier("getString")
        assert vec.shape == (VECTOR_DIMS,)
        assert vec.sum() > 0

    def test_deterministic(self):
        assert np.array_equal(vectorize_identifier("value"),
                              vectorize_identifier("value"))

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            vectorize_identifier("")

    def test_self_similarity_is_one(self):
        vec = vectorize_identifier("props")
        assert cosine(vec, vec) == pytest.approx(1.0)

    def test_shared_subtoken_beats_unrelated(self):
        # the motivating case: get should sit closer to getString than to
        # an identifier sharing no subtokens
        assert identifier_similarity("get", "getString") > \
            identifier_similarity("get", "maxRetries")

    def test_case_insensitive_subtokens(self):
        assert identifier_similarity("GetString", "getString") == pytest.approx(1.0)

    @given(st.text(alphabet="abcdefgXYZ_", min_size=1, max_size=20))
    def test_vectors_are_counts(self, name):
        vec = vectorize_identifier(name)
        assert (vec >= 0).all()
        assert vec.sum() == int(vec.sum())


class TestTables:
    def test_membership(self):
        table = build_identifier_table([CONFIG_FILE], scope="file")
        assert "getString" in table
        assert "props" in table
        assert "phantomName" not in table

    def test_project_table_excludes_tests(self, tmp_path):
        (tmp_path / "Main.java").write_text("class Main { void go() { real(); } }")
        test_dir = tmp_path / "test"
        test_dir.mkdir()
        (test_dir / "MainTest.java").write_text(
            "class MainTest { void t() { onlyInTests(); } }")
        table = build_project_table(tmp_path)
        assert "real" in table
        assert "onlyInTests" not in table


class TestDetectSuspects:
    def setup_method(self):
        self.file_table = build_identifier_table([CONFIG_FILE], scope="file")
        self.project_table = build_identifier_table([CONFIG_FILE], scope="project")

    def test_unknown_identifier_flagged(self):
        patch = "return props.get(key);"  # get is not used anywhere in the project
        assert detect_suspects(patch, self.file_table, self.project_table) == ["get"]

    def test_known_identifiers_pass(self):
        patch = "return props.getProperty(key).trim();"
        assert detect_suspects(patch, self.file_table, self.project_table) == []

    def test_order_and_dedup(self):
        patch = "alpha(); beta(); alpha();"
        assert detect_suspects(patch, self.file_table, self.project_table) == \
            ["alpha", "beta"]


class TestChunkFile:
    def test_even_split(self):
        assert chunk_file(["a", "b", "c", "d"], 2) == ["a\nb", "c\nd"]

    def test_remainder_kept(self):
        assert chunk_file(["a", "b", "c"], 2) == ["a\nb", "c"]

    def test_invalid_length(self):
        with pytest.raises(ValueError):
            chunk_file(["a"], 0)

    @given(st.lists(st.sampled_from(["x", "y", "z"]), min_size=1, max_size=30),
           st.integers(min_value=1, max_value=10))
    def test_partition_property(self, lines, width):
        chunks = chunk_file(lines, width)
        rejoined = [ln for chunk in chunks for ln in chunk.split("\n")]
        assert rejoined == lines
        assert all(len(c.split("\n")) <= width for c in chunks)


class TestRecommend:
    def test_get_maps_to_getstring(self):
        file = SourceFile(path=Path("Config.java"), text=CONFIG_FILE)
        patch = "String value = props.get(key);\nreturn value;"
        suggestion = recommend("get", file, patch)
        assert suggestion.suspect == "get"
        assert suggestion.candidates
        assert len(suggestion.candidates) <= MAX_CANDIDATES
        names = [c.name for c in suggestion.candidates]
        assert "getString" in names[:2]

    def test_candidates_sorted_descending(self):
        file = SourceFile(path=Path("Config.java"), text=CONFIG_FILE)
        suggestion = recommend("get", file, "props.get(key);")
        sims = [c.similarity for c in suggestion.candidates]
        assert sims == sorted(sims, reverse=True)

    def test_no_duplicate_candidates(self):
        file = SourceFile(path=Path("Config.java"), text=CONFIG_FILE)
        suggestion = recommend("valu", file, "return valu;")
        names = [c.name for c in suggestion.candidates]
        assert len(names) == len(set(names))


class TestRenderSuggestions:
    def test_empty(self):
        assert render_suggestions([]) == ""

    def test_layout(self):
        file = SourceFile(path=Path("Config.java"), text=CONFIG_FILE)
        suggestion = recommend("get", file, "props.get(key);")
        text = render_suggestions([suggestion])
        assert text.startswith("Identifier Suggestions:\n")
        assert "`get` may be wrong in this project" in text
