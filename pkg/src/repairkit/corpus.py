"""Masked fine-tuning corpus construction.

Every eligible method (three or more stripped body lines) yields masked
samples until each body line has been covered at least once. One contiguous
span per sample is replaced by the mask sentinel; span scale is one to
five lines.
"""

from __future__ import annotations

import json
import random
import zlib
from dataclasses import dataclass
from pathlib import Path

from .methods import MethodUnit, ParseError, SourceFile, extract_methods

MASK_SENTINEL = "<extra_id_0>"
MAX_SCALE = 5
MIN_BODY_LINES = 3


@dataclass(frozen=True)
class MaskedSample:
    method_id: str
    masked_text: str
    target_text: str
    masked_range: tuple[int, int]  # (start_idx, end_idx) into body_lines, inclusive
    scale: int

    def reconstruct(self) -> str:
        """Substitute the target back in place of the sentinel."""
        return self.masked_text.replace(MASK_SENTINEL, self.target_text, 1)


@dataclass
class CorpusStats:
    methods_seen: int = 0
    methods_excluded_short: int = 0
    files_skipped_parse: int = 0
    samples_emitted: int = 0
    coverage_complete: bool = True


def method_seed(base_seed: int, method_id: str) -> int:
    """Per-method RNG seed, stable across processes."""
    return base_seed ^ zlib.crc32(method_id.encode("utf-8"))


def build_samples(method: MethodUnit, seed: int) -> list[MaskedSample]:
    """Masked samples covering every body line of one method.

    Each iteration draws a scale uniformly from [1, min(5, n)] and picks
    uniformly among contiguous windows of that length containing at least
    one uncovered line, until no line is uncovered. Deterministic in seed.
    """
    body = method.body_lines
    n = len(body)
    if n < MIN_BODY_LINES:
        raise ValueError(f"method body too short ({n} lines); callers must pre-filter")
    rng = random.Random(seed)
    uncovered = set(range(n))
    samples: list[MaskedSample] = []
    header = method.signature + " {"
    while uncovered:
        scale = rng.randint(1, min(MAX_SCALE, n))
        windows = [s for s in range(n - scale + 1)
                   if any(s <= i < s + scale for i in uncovered)]
        start = rng.choice(windows)
        end = start + scale - 1
        masked_body = [*body[:start], MASK_SENTINEL, *body[end + 1:]]
        samples.append(MaskedSample(
            method_id=method.method_id,
            masked_text="\n".join([header, *masked_body, "}"]),
            target_text="\n".join(body[start:end + 1]),
            masked_range=(start, end),
            scale=scale,
        ))
        uncovered -= set(range(start, end + 1))
    return samples


def iter_source_files(project_root: Path) -> list[Path]:
    return sorted(project_root.rglob("*.java"))


def build_corpus(project_root: Path | str, seed: int,
                 out_path: Path | str) -> CorpusStats:
    """Stream masked samples for a whole project to a line-delimited file."""
    project_root = Path(project_root)
    stats = CorpusStats()
    with Path(out_path).open("w", encoding="utf-8") as fh:
        for path in iter_source_files(project_root):
            try:
                methods = extract_methods(SourceFile.read(path))
            except ParseError:
                stats.files_skipped_parse += 1
                continue
            for method in methods:
                stats.methods_seen += 1
                if len(method.body_lines) < MIN_BODY_LINES:
                    stats.methods_excluded_short += 1
                    continue
                rel_id = f"{path.relative_to(project_root)}::{method.name}@{method.header_line}"
                unit = MethodUnit(
                    file_path=Path(str(path.relative_to(project_root))),
                    name=method.name, signature=method.signature,
                    header_line=method.header_line,
                    body_lines=method.body_lines,
                    original_span=method.original_span)
                for sample in build_samples(unit, method_seed(seed, rel_id)):
                    fh.write(json.dumps({
                        "method_id": sample.method_id,
                        "masked_text": sample.masked_text,
                        "target_text": sample.target_text,
                        "masked_range": list(sample.masked_range),
                        "scale": sample.scale,
                    }, sort_keys=True, ensure_ascii=False))
                    fh.write("\n")
                    stats.samples_emitted += 1
    return stats


def load_corpus(path: Path | str) -> list[MaskedSample]:
    samples = []
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            data = json.loads(line)
            samples.append(MaskedSample(
                method_id=data["method_id"],
                masked_text=data["masked_text"],
                target_text=data["target_text"],
                masked_range=tuple(data.get("masked_range", (0, 0))),
                scale=int(data.get("scale", 1)),
            ))
    return samples
