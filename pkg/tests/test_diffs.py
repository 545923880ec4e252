import pytest
from hypothesis import given, strategies as st

from repairkit.diffs import (DiffParseError, PatchApplyError, apply_unified_diff,
                             count_changed_lines, parse_unified_diff)

SIMPLE_DIFF = """\
--- a/src/Main.java
+++ b/src/Main.java
@@ -1,4 +1,4 @@
 int a = 1;
-int b = 2;
+int b = 3;
 int c = 4;
 return a;
"""

OLD_TEXT = "int a = 1;\nint b = 2;\nint c = 4;\nreturn a;"


class TestParseUnifiedDiff:
    def test_paths_and_hunks(self):
        patches = parse_unified_diff(SIMPLE_DIFF)
        assert len(patches) == 1
        patch = patches[0]
        assert patch.old_path == "src/Main.java"
        assert patch.new_path == "src/Main.java"
        assert len(patch.hunks) == 1
        hunk = patch.hunks[0]
        assert (hunk.old_start, hunk.old_len, hunk.new_start, hunk.new_len) == (1, 4, 1, 4)
        assert [tag for tag, _ in hunk.lines] == [" ", "-", "+", " ", " "]

    def test_empty_diff(self):
        assert parse_unified_diff("") == []

    def test_headerless_hunk_accepted(self):
        patches = parse_unified_diff("@@ -1,1 +1,1 @@\n-a\n+b\n")
        assert len(patches) == 1
        assert patches[0].old_path == ""

    def test_git_preamble_skipped(self):
        text = ("diff --git a/F.java b/F.java\nindex 123..456 100644\n"
                + SIMPLE_DIFF)
        assert len(parse_unified_diff(text)) == 1

    def test_length_mismatch_rejected(self):
        bad = "--- a/F\n+++ b/F\n@@ -1,3 +1,1 @@\n-a\n+b\n"
        with pytest.raises(DiffParseError):
            parse_unified_diff(bad)

    def test_plus_without_minus_header(self):
        with pytest.raises(DiffParseError):
            parse_unified_diff("+++ b/F\n@@ -1,1 +1,1 @@\n-a\n+b\n")

    def test_no_newline_marker_tolerated(self):
        text = "--- a/F\n+++ b/F\n@@ -1,1 +1,1 @@\n-a\n+b\n\\ No newline at end of file\n"
        assert count_changed_lines(text) == 2

    def test_multi_file(self):
        text = ("--- a/A.java\n+++ b/A.java\n@@ -1,1 +1,1 @@\n-x\n+y\n"
                "--- a/B.java\n+++ b/B.java\n@@ -1,1 +1,1 @@\n-p\n+q\n")
        patches = parse_unified_diff(text)
        assert [p.old_path for p in patches] == ["A.java", "B.java"]


class TestCountChangedLines:
    def test_hand_counted(self):
        # SIMPLE_DIFF: one deletion plus one addition
        assert count_changed_lines(SIMPLE_DIFF) == 2

    def test_context_excluded(self):
        text = "@@ -1,3 +1,3 @@\n a\n-b\n+c\n d\n"
        assert count_changed_lines(text) == 2

    def test_pure_addition(self):
        text = "@@ -0,0 +1,3 @@\n+a\n+b\n+c\n"
        assert count_changed_lines(text) == 3

    def test_empty(self):
        assert count_changed_lines("") == 0


class TestApplyUnifiedDiff:
    def test_round_trip(self):
        new_text = apply_unified_diff(OLD_TEXT, SIMPLE_DIFF)
        assert new_text == "int a = 1;\nint b = 3;\nint c = 4;\nreturn a;"

    def test_context_mismatch_raises(self):
        with pytest.raises(PatchApplyError):
            apply_unified_diff("completely\ndifferent\ntext\nhere", SIMPLE_DIFF)

    def test_pure_insertion(self):
        diff = "@@ -0,0 +1,1 @@\n+first\n"
        assert apply_unified_diff("old", diff) == "first\nold"

    def test_deletion_only(self):
        diff = "@@ -2,1 +1,0 @@\n-b\n"
        assert apply_unified_diff("a\nb\nc", diff) == "a\nc"

    def test_two_hunks(self):
        old = "\n".join(f"l{i}" for i in range(1, 9))
        diff = ("@@ -2,1 +2,1 @@\n-l2\n+L2\n"
                "@@ -7,1 +7,1 @@\n-l7\n+L7\n")
        assert apply_unified_diff(old, diff) == \
            "l1\nL2\nl3\nl4\nl5\nl6\nL7\nl8"

    @given(st.lists(st.sampled_from(["aa", "bb", "cc", "dd"]), min_size=1, max_size=8),
           st.data())
    def test_single_line_replacement_property(self, lines, data):
        idx = data.draw(st.integers(min_value=0, max_value=len(lines) - 1))
        old = "\n".join(lines)
        diff = f"@@ -{idx + 1},1 +{idx + 1},1 @@\n-{lines[idx]}\n+ZZ\n"
        expected = lines.copy()
        expected[idx] = "ZZ"
        assert apply_unified_diff(old, diff) == "\n".join(expected)
