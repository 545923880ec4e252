"""Issue-patch benchmark construction.

Parses issue-tracker exports, links issues to merged pull requests, applies
the candidate filters (closed issue, merged PR, one non-test source file,
at most 22 changed lines), redacts code from comments, locates the buggy
function, and emits line-delimited benchmark records.
"""

from __future__ import annotations

import json
import logging
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .diffs import DiffParseError, PatchApplyError, apply_unified_diff, count_changed_lines, parse_unified_diff
from .methods import MethodUnit, ParseError, SourceFile, extract_methods

log = logging.getLogger(__name__)

MAX_CHANGED_LINES = 22
SOURCE_SUFFIX = ".java"

REDACTION_TOKEN = "[code]"

# fenced markdown blocks and tracker {code}/{noformat} markup
_CODE_BLOCK_RES = (
    re.compile(r"```.*?```", re.DOTALL),
    re.compile(r"\{code(?::[^}]*)?\}.*?\{code\}", re.DOTALL),
    re.compile(r"\{noformat\}.*?\{noformat\}", re.DOTALL),
)

_ISSUE_KEY_RE = re.compile(r"\b[A-Z][A-Z0-9]+-\d+\b")


class FormatError(Exception):
    """Benchmark or export file is malformed."""

    def __init__(self, message: str, path: str | Path = "", line: int = 0):
        locus = f"{path}:{line}: " if path else ""
        super().__init__(f"{locus}{message}")
        self.line = line


@dataclass(frozen=True)
class Comment:
    index: int
    author: str
    timestamp: str
    body: str


@dataclass(frozen=True)
class IssueRecord:
    key: str
    summary: str
    description: str
    status: str  # open | closed | other
    comments: tuple[Comment, ...] = ()

    def __post_init__(self):
        if not self.key:
            raise ValueError("issue key must be non-empty")
        if not self.summary:
            raise ValueError("issue summary must be non-empty")
        for i, comment in enumerate(self.comments):
            if comment.index != i:
                raise ValueError(f"comment indices must be dense, got {comment.index} at {i}")


@dataclass(frozen=True)
class GoldPatch:
    file_path: str
    unified_diff: str
    function_before: str
    function_after: str
    changed_line_count: int


@dataclass(frozen=True)
class BenchmarkEntry:
    issue: IssueRecord
    repo_ref: str
    pr_id: str
    gold: GoldPatch


@dataclass(frozen=True)
class Rejection:
    reason: str


@dataclass(frozen=True)
class PullRequest:
    id: str
    title: str
    body: str
    merged: bool
    files: tuple[str, ...]
    diff: str
    base_commit: str = "worktree"


def redact_code_blocks(body: str) -> str:
    """Replace every fenced or tracker-markup code block with ``[code]``.

    Idempotent; prose outside the blocks is untouched.
    """
    out = body
    for pattern in _CODE_BLOCK_RES:
        out = pattern.sub(REDACTION_TOKEN, out)
    return out


def is_test_file(path: str) -> bool:
    parts = Path(path).parts
    stem = Path(path).stem
    if any(p.lower() in {"test", "tests", "testing"} for p in parts[:-1]):
        return True
    return stem.endswith("Test") or stem.endswith("Tests") or stem.startswith("Test")


def is_source_file(path: str) -> bool:
    return path.endswith(SOURCE_SUFFIX)


def filter_candidate(pr_files: list[str], diff: str, issue_status: str,
                     pr_merged: bool) -> Rejection | None:
    """Apply the benchmark filters in order; None means accept."""
    if issue_status != "closed":
        return Rejection("issue_not_closed")
    if not pr_merged:
        return Rejection("pr_not_merged")
    if len(pr_files) != 1:
        return Rejection("multi_file")
    if not is_source_file(pr_files[0]):
        return Rejection("not_source_file")
    if is_test_file(pr_files[0]):
        return Rejection("test_file")
    try:
        changed = count_changed_lines(diff)
    except DiffParseError:
        return Rejection("diff_unparseable")
    if changed > MAX_CHANGED_LINES:
        return Rejection("too_many_lines")
    if changed == 0:
        return Rejection("empty_diff")
    return None


def link_issue_to_pr(issue: IssueRecord, pr_index: dict[str, list[PullRequest]]) -> str | None:
    """The unique merged PR referencing the issue key, else None."""
    merged = [pr for pr in pr_index.get(issue.key, []) if pr.merged]
    if len(merged) != 1:
        return None
    return merged[0].id


def build_pr_index(pulls: list[PullRequest]) -> dict[str, list[PullRequest]]:
    index: dict[str, list[PullRequest]] = {}
    for pr in pulls:
        for key in set(_ISSUE_KEY_RE.findall(pr.title + "\n" + pr.body)):
            index.setdefault(key, []).append(pr)
    return index


# ---------------------------------------------------------------------------
# locating the buggy function

def locate_changed_function(file_text: str, diff: str) -> tuple[MethodUnit, MethodUnit] | None:
    """Find the single function intersecting all hunks, before and after.

    Returns (before, after) method units, or None when the hunks fall
    outside any method or span more than one.
    """
    sf = SourceFile(path=Path("<before>"), text=file_text)
    try:
        methods = extract_methods(sf)
    except ParseError:
        return None
    hunks = [h for p in parse_unified_diff(diff) for h in p.hunks]
    if not hunks:
        return None
    touched: set[int] = set()
    for hunk in hunks:
        lo = hunk.old_start
        hi = hunk.old_start + max(hunk.old_len, 1) - 1
        for idx, method in enumerate(methods):
            start, end = method.original_span
            if lo <= end and hi >= start:
                touched.add(idx)
    if len(touched) != 1:
        return None
    before = methods[next(iter(touched))]
    try:
        after_text = apply_unified_diff(file_text, diff)
        after_methods = extract_methods(SourceFile(path=Path("<after>"), text=after_text))
    except (PatchApplyError, DiffParseError, ParseError):
        return None
    candidates = [m for m in after_methods if m.name == before.name]
    if not candidates:
        return None
    # closest header line wins when the name is overloaded
    after = min(candidates, key=lambda m: abs(m.header_line - before.header_line))
    return before, after


def function_text(file_text: str, method: MethodUnit) -> str:
    lines = file_text.split("\n")
    start, end = method.original_span
    return "\n".join(lines[start - 1:end])


# ---------------------------------------------------------------------------
# export parsing and ingestion

def load_tracker_export(path: Path | str) -> tuple[list[IssueRecord], list[PullRequest]]:
    """Parse a tracker export: {"issues": [...], "pulls": [...]}."""
    p = Path(path)
    try:
        data = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}", p, exc.lineno) from exc
    if not isinstance(data, dict) or "issues" not in data:
        raise FormatError("export must be an object with an 'issues' list", p)
    issues = []
    for rec in data.get("issues", []):
        comments = tuple(
            Comment(index=i, author=c.get("author", ""),
                    timestamp=c.get("created", ""), body=c.get("body", ""))
            for i, c in enumerate(rec.get("comments", []))
        )
        issues.append(IssueRecord(
            key=rec["key"], summary=rec["summary"],
            description=rec.get("description", ""),
            status=rec.get("status", "other"), comments=comments))
    pulls = [
        PullRequest(
            id=str(rec["id"]), title=rec.get("title", ""), body=rec.get("body", ""),
            merged=bool(rec.get("merged", False)),
            files=tuple(rec.get("files", [])), diff=rec.get("diff", ""),
            base_commit=rec.get("base_commit", "worktree"))
        for rec in data.get("pulls", [])
    ]
    return issues, pulls


@dataclass
class IngestReport:
    accepted: int = 0
    rejections: Counter = field(default_factory=Counter)


def ingest(issues: list[IssueRecord], pulls: list[PullRequest],
           repo_root: Path | str) -> tuple[list[BenchmarkEntry], IngestReport]:
    """Run the full benchmark construction over parsed export data."""
    repo_root = Path(repo_root)
    index = build_pr_index(pulls)
    by_id = {pr.id: pr for pr in pulls}
    entries: list[BenchmarkEntry] = []
    report = IngestReport()
    for issue in issues:
        pr_id = link_issue_to_pr(issue, index)
        if pr_id is None:
            report.rejections["no_unique_pr"] += 1
            continue
        pr = by_id[pr_id]
        rejection = filter_candidate(list(pr.files), pr.diff, issue.status, pr.merged)
        if rejection is not None:
            report.rejections[rejection.reason] += 1
            continue
        file_path = pr.files[0]
        target = repo_root / file_path
        if not target.is_file():
            report.rejections["file_missing"] += 1
            continue
        file_text = target.read_text(encoding="utf-8")
        located = locate_changed_function(file_text, pr.diff)
        if located is None:
            report.rejections["no_single_function"] += 1
            continue
        before, after = located
        after_text = apply_unified_diff(file_text, pr.diff)
        redacted = tuple(
            Comment(c.index, c.author, c.timestamp, redact_code_blocks(c.body))
            for c in issue.comments)
        entries.append(BenchmarkEntry(
            issue=IssueRecord(issue.key, issue.summary,
                              redact_code_blocks(issue.description),
                              issue.status, redacted),
            repo_ref=pr.base_commit,
            pr_id=pr.id,
            gold=GoldPatch(
                file_path=file_path,
                unified_diff=pr.diff,
                function_before=function_text(file_text, before),
                function_after=function_text(after_text, after),
                changed_line_count=count_changed_lines(pr.diff),
            ),
        ))
        report.accepted += 1
    return entries, report


# ---------------------------------------------------------------------------
# on-disk benchmark format: one JSON record per line

def entry_to_dict(entry: BenchmarkEntry) -> dict:
    return {
        "issue": {
            "key": entry.issue.key,
            "summary": entry.issue.summary,
            "description": entry.issue.description,
            "status": entry.issue.status,
            "comments": [
                {"index": c.index, "author": c.author,
                 "timestamp": c.timestamp, "body": c.body}
                for c in entry.issue.comments
            ],
        },
        "repo_ref": entry.repo_ref,
        "pr_id": entry.pr_id,
        "gold": {
            "file_path": entry.gold.file_path,
            "unified_diff": entry.gold.unified_diff,
            "function_before": entry.gold.function_before,
            "function_after": entry.gold.function_after,
            "changed_line_count": entry.gold.changed_line_count,
        },
    }


def entry_from_dict(data: dict) -> BenchmarkEntry:
    issue = data["issue"]
    gold = data["gold"]
    return BenchmarkEntry(
        issue=IssueRecord(
            key=issue["key"], summary=issue["summary"],
            description=issue.get("description", ""),
            status=issue.get("status", "other"),
            comments=tuple(
                Comment(index=c["index"], author=c.get("author", ""),
                        timestamp=c.get("timestamp", ""), body=c.get("body", ""))
                for c in issue.get("comments", [])),
        ),
        repo_ref=data.get("repo_ref", "worktree"),
        pr_id=str(data.get("pr_id", "")),
        gold=GoldPatch(
            file_path=gold["file_path"],
            unified_diff=gold["unified_diff"],
            function_before=gold["function_before"],
            function_after=gold["function_after"],
            changed_line_count=int(gold["changed_line_count"]),
        ),
    )


def _validate_entry(entry: BenchmarkEntry) -> str | None:
    """Invariant check; returns a reason when the entry must be skipped."""
    if entry.issue.status != "closed":
        return "issue_not_closed"
    if not (1 <= entry.gold.changed_line_count <= MAX_CHANGED_LINES):
        return "changed_line_count_out_of_range"
    if not is_source_file(entry.gold.file_path) or is_test_file(entry.gold.file_path):
        return "bad_file_path"
    for comment in entry.issue.comments:
        if redact_code_blocks(comment.body) != comment.body:
            return "unredacted_comment"
    return None


def save_benchmark(entries: list[BenchmarkEntry], path: Path | str):
    with Path(path).open("w", encoding="utf-8") as fh:
        for entry in entries:
            fh.write(json.dumps(entry_to_dict(entry), sort_keys=True, ensure_ascii=False))
            fh.write("\n")


def load_benchmark(path: Path | str) -> list[BenchmarkEntry]:
    """Load and validate benchmark records; invalid entries are skipped
    with a warning."""
    p = Path(path)
    entries: list[BenchmarkEntry] = []
    with p.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
                entry = entry_from_dict(data)
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise FormatError(f"bad record: {exc}", p, lineno) from exc
            reason = _validate_entry(entry)
            if reason is not None:
                log.warning("%s:%d: skipping entry %s (%s)", p, lineno,
                            entry.issue.key, reason)
                continue
            entries.append(entry)
    return entries


BUCKETS = ((1, 5), (5, 10), (10, 15), (15, 20), (20, MAX_CHANGED_LINES + 1))


def bucket_label(lo: int, hi: int) -> str:
    if hi == MAX_CHANGED_LINES + 1:
        return f"[{lo},{MAX_CHANGED_LINES}]"
    return f"[{lo},{hi})"


def changed_line_histogram(counts: list[int]) -> dict[str, int]:
    """Bucket changed-line counts: [1,5), [5,10), [10,15), [15,20), [20,22]."""
    hist = {bucket_label(lo, hi): 0 for lo, hi in BUCKETS}
    for count in counts:
        for lo, hi in BUCKETS:
            if lo <= count < hi:
                hist[bucket_label(lo, hi)] += 1
                break
    return hist
