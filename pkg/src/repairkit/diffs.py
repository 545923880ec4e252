"""Unified diff parsing, changed-line counting, and patch application."""

from __future__ import annotations

import re
from dataclasses import dataclass, field


class DiffParseError(Exception):
    """Text is not a well-formed unified diff."""


class PatchApplyError(Exception):
    """Hunk context does not match the target text."""


_HUNK_RE = re.compile(r"^@@ -(\d+)(?:,(\d+))? \+(\d+)(?:,(\d+))? @@")


@dataclass
class Hunk:
    old_start: int
    old_len: int
    new_start: int
    new_len: int
    lines: list[tuple[str, str]] = field(default_factory=list)  # (tag, text)


@dataclass
class FilePatch:
    old_path: str
    new_path: str
    hunks: list[Hunk] = field(default_factory=list)


def parse_unified_diff(text: str) -> list[FilePatch]:
    """Parse a unified diff into per-file hunk lists. Empty text is valid."""
    patches: list[FilePatch] = []
    current: FilePatch | None = None
    hunk: Hunk | None = None
    remaining_old = remaining_new = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if raw.startswith("--- "):
            current = FilePatch(old_path=_clean_path(raw[4:]), new_path="")
            hunk = None
            continue
        if raw.startswith("+++ "):
            if current is None:
                raise DiffParseError(f"line {lineno}: +++ without ---")
            current.new_path = _clean_path(raw[4:])
            patches.append(current)
            continue
        m = _HUNK_RE.match(raw)
        if m:
            if current is None or current not in patches:
                # headerless diff: allow hunks without ---/+++ lines
                current = FilePatch(old_path="", new_path="")
                patches.append(current)
            hunk = Hunk(
                old_start=int(m.group(1)),
                old_len=int(m.group(2) or "1"),
                new_start=int(m.group(3)),
                new_len=int(m.group(4) or "1"),
            )
            remaining_old = hunk.old_len
            remaining_new = hunk.new_len
            current.hunks.append(hunk)
            continue
        if hunk is None:
            continue  # preamble between files (diff --git, index, ...)
        if remaining_old <= 0 and remaining_new <= 0:
            hunk = None
            continue
        if raw.startswith("+"):
            hunk.lines.append(("+", raw[1:]))
            remaining_new -= 1
        elif raw.startswith("-"):
            hunk.lines.append(("-", raw[1:]))
            remaining_old -= 1
        elif raw.startswith(" ") or raw == "":
            hunk.lines.append((" ", raw[1:]))
            remaining_old -= 1
            remaining_new -= 1
        elif raw.startswith("\\"):
            continue  # "\ No newline at end of file"
        else:
            raise DiffParseError(f"line {lineno}: unexpected line {raw!r}")
    for patch in patches:
        for h in patch.hunks:
            adds = sum(1 for tag, _ in h.lines if tag == "+")
            dels = sum(1 for tag, _ in h.lines if tag == "-")
            ctx = sum(1 for tag, _ in h.lines if tag == " ")
            if dels + ctx != h.old_len or adds + ctx != h.new_len:
                raise DiffParseError(
                    f"hunk @@ -{h.old_start},{h.old_len} +{h.new_start},{h.new_len} @@"
                    " does not match its body")
    return patches


def _clean_path(raw: str) -> str:
    path = raw.split("\t")[0].strip()
    for prefix in ("a/", "b/"):
        if path.startswith(prefix):
            return path[len(prefix):]
    return path


def count_changed_lines(unified_diff: str) -> int:
    """Added plus deleted lines across all hunks; context lines excluded."""
    total = 0
    for patch in parse_unified_diff(unified_diff):
        for hunk in patch.hunks:
            total += sum(1 for tag, _ in hunk.lines if tag in "+-")
    return total


def apply_hunks(old_lines: list[str], hunks: list[Hunk]) -> list[str]:
    """Apply hunks to a list of lines, verifying context exactly."""
    result: list[str] = []
    cursor = 0  # index into old_lines
    for hunk in sorted(hunks, key=lambda h: h.old_start):
        start = hunk.old_start - 1 if hunk.old_len > 0 else hunk.old_start
        if start < cursor:
            raise PatchApplyError("overlapping hunks")
        result.extend(old_lines[cursor:start])
        cursor = start
        for tag, text in hunk.lines:
            if tag == " ":
                if cursor >= len(old_lines) or old_lines[cursor] != text:
                    raise PatchApplyError(
                        f"context mismatch at line {cursor + 1}: "
                        f"expected {text!r}")
                result.append(text)
                cursor += 1
            elif tag == "-":
                if cursor >= len(old_lines) or old_lines[cursor] != text:
                    raise PatchApplyError(
                        f"delete mismatch at line {cursor + 1}: "
                        f"expected {text!r}")
                cursor += 1
            else:
                result.append(text)
    result.extend(old_lines[cursor:])
    return result


def apply_unified_diff(old_text: str, diff_text: str) -> str:
    """Apply a single-file unified diff to text."""
    patches = parse_unified_diff(diff_text)
    hunks = [h for p in patches for h in p.hunks]
    new_lines = apply_hunks(old_text.split("\n"), hunks)
    return "\n".join(new_lines)
