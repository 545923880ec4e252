"""Error-prone identifier detection and replacement recommendation.

A suspect is an identifier used in a generated patch but absent from the
project's source files. Candidates come from the defective file, ranked by
cosine similarity between deterministic subtoken-trigram vectors.
"""

from __future__ import annotations

import re
import zlib
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .codebleu import codebleu
from .lexer import collect_identifiers
from .methods import SourceFile

VECTOR_DIMS = 512
MAX_CANDIDATES = 6
TOP_SNIPPETS = 3
TOP_PER_SOURCE = 3

_SUBTOKEN_RE = re.compile(r"[A-Z]+(?![a-z])|[A-Z][a-z0-9]*|[a-z0-9]+")


@dataclass(frozen=True)
class IdentifierTable:
    scope: str  # file | project
    counts: Counter

    def __contains__(self, name: str) -> bool:
        return name in self.counts


@dataclass(frozen=True)
class Candidate:
    name: str
    similarity: float
    source: str  # snippet | file


@dataclass(frozen=True)
class IdentifierSuggestion:
    suspect: str
    candidates: tuple[Candidate, ...]


def build_identifier_table(texts: list[str], scope: str) -> IdentifierTable:
    counts: Counter = Counter()
    for text in texts:
        counts.update(collect_identifiers(text))
    return IdentifierTable(scope=scope, counts=counts)


def build_project_table(repo_root: Path | str,
                        exclude_tests: bool = True) -> IdentifierTable:
    from .ingest import is_test_file  # local import to avoid a cycle

    repo_root = Path(repo_root)
    texts = []
    for path in sorted(repo_root.rglob("*.java")):
        rel = str(path.relative_to(repo_root))
        if exclude_tests and is_test_file(rel):
            continue
        texts.append(path.read_text(encoding="utf-8"))
    return IdentifierTable(scope="project", counts=Counter(
        sum((collect_identifiers(t) for t in texts), Counter())))


def subtokens(name: str) -> list[str]:
    """Split camel-case and underscore boundaries, lowercased."""
    return [m.group().lower() for m in _SUBTOKEN_RE.finditer(name)]


def vectorize_identifier(name: str) -> np.ndarray:
    """Deterministic character-trigram hash vector of an identifier.

    Each subtoken is padded with boundary markers, its trigrams hashed into
    512 buckets; components are trigram counts. Never all-zero for a
    non-empty name.
    """
    if not name:
        raise ValueError("identifier must be non-empty")
    vec = np.zeros(VECTOR_DIMS, dtype=np.float64)
    for sub in subtokens(name) or [name.lower()]:
        padded = f"#{sub}#"
        for i in range(len(padded) - 2):
            bucket = zlib.crc32(padded[i:i + 3].encode("utf-8")) % VECTOR_DIMS
            vec[bucket] += 1.0
    return vec


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    denom = float(np.linalg.norm(a) * np.linalg.norm(b))
    if denom == 0.0:
        return 0.0
    return float(np.dot(a, b) / denom)


def identifier_similarity(a: str, b: str) -> float:
    return cosine(vectorize_identifier(a), vectorize_identifier(b))


def detect_suspects(patch_text: str, file_table: IdentifierTable,
                    project_table: IdentifierTable) -> list[str]:
    """Patch identifiers absent from the project, in order of first appearance.

    file_table is accepted for interface symmetry; membership is decided
    against the project table (the defective file is part of the project).
    """
    del file_table
    seen: list[str] = []
    for name in _first_appearance_order(patch_text):
        if name not in project_table and name not in seen:
            seen.append(name)
    return seen


def _first_appearance_order(text: str) -> list[str]:
    from .lexer import tokenize

    order: list[str] = []
    seen: set[str] = set()
    for tok in tokenize(text):
        if tok.kind == "ident" and tok.value not in seen:
            seen.add(tok.value)
            order.append(tok.value)
    return order


def chunk_file(file_lines: list[str], patch_line_count: int) -> list[str]:
    """Consecutive non-overlapping windows of patch_line_count lines.

    A final shorter remainder window is kept so tail identifiers survive.
    """
    if patch_line_count < 1:
        raise ValueError("patch_line_count must be >= 1")
    return ["\n".join(file_lines[i:i + patch_line_count])
            for i in range(0, len(file_lines), patch_line_count)]


def rank_snippets(snippets: list[str], patch_text: str) -> list[str]:
    """Top three snippets by similarity to the patch; ties keep file order."""
    scored = [(codebleu(snippet, patch_text).total, -idx, snippet)
              for idx, snippet in enumerate(snippets)]
    scored.sort(key=lambda item: (item[0], item[1]), reverse=True)
    return [snippet for _, _, snippet in scored[:TOP_SNIPPETS]]


def _top_by_cosine(names: set[str], suspect_vec: np.ndarray, source: str,
                   limit: int) -> list[Candidate]:
    ranked = sorted(
        (Candidate(name=name,
                   similarity=cosine(vectorize_identifier(name), suspect_vec),
                   source=source)
         for name in names),
        key=lambda c: (-c.similarity, c.name))
    return ranked[:limit]


def recommend(suspect: str, file: SourceFile, patch_text: str) -> IdentifierSuggestion:
    """Up to six replacement candidates for a suspect identifier.

    Top three by cosine among identifiers of the three file snippets most
    similar to the patch, plus top three among the file's remaining
    identifiers; merged, deduplicated keeping best similarity, sorted
    descending (ties lexicographic).
    """
    suspect_vec = vectorize_identifier(suspect)
    file_lines = file.text.split("\n")
    patch_len = max(1, len([ln for ln in patch_text.split("\n")]))
    snippets = chunk_file(file_lines, patch_len)
    top_snips = rank_snippets(snippets, patch_text)
    snippet_idents = set()
    for snippet in top_snips:
        snippet_idents.update(collect_identifiers(snippet))
    file_idents = set(collect_identifiers(file.text)) - snippet_idents
    merged: dict[str, Candidate] = {}
    for cand in (_top_by_cosine(snippet_idents, suspect_vec, "snippet", TOP_PER_SOURCE)
                 + _top_by_cosine(file_idents, suspect_vec, "file", TOP_PER_SOURCE)):
        best = merged.get(cand.name)
        if best is None or cand.similarity > best.similarity:
            merged[cand.name] = cand
    ordered = sorted(merged.values(), key=lambda c: (-c.similarity, c.name))
    return IdentifierSuggestion(suspect=suspect,
                                candidates=tuple(ordered[:MAX_CANDIDATES]))


def render_suggestions(suggestions: list[IdentifierSuggestion]) -> str:
    """Identifier-suggestion block for the final prompt; empty when none."""
    lines = []
    for suggestion in suggestions:
        if not suggestion.candidates:
            continue
        options = ", ".join(f"{c.name} ({c.similarity:.2f})"
                            for c in suggestion.candidates)
        lines.append(f"`{suggestion.suspect}` may be wrong in this project; "
                     f"consider: {options}")
    if not lines:
        return ""
    return "Identifier Suggestions:\n" + "\n".join(lines) + "\n\n"
