"""Five-stage repair orchestration.

Draft prompt -> snippet/patch pairs -> project-knowledge feedback
(reference patch per pair, identifier suggestions) -> self-reflective
final prompt -> final pairs applied to the buggy function. The three
ablation variants drop exactly one feedback block each.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path

from .gateway import ChatMessage, Gateway, GatewayError, PromptRequest, replay_key
from .identrec import (Candidate, IdentifierSuggestion, IdentifierTable,
                       build_identifier_table, detect_suspects, recommend,
                       render_suggestions)
from .ingest import BenchmarkEntry
from .methods import SourceFile, find_verbatim
from .rationale import DesignRationale, load_template, render_dr_section
from .refpatch import ReferencePatch, generate_reference, mask_defective_span

log = logging.getLogger(__name__)

DR_HEADER = "Design Rationale:"
REFERENCE_HEADER = "Reference Patches:"
SUGGESTION_HEADER = "Identifier Suggestions:"


class ParseError(Exception):
    """No snippet/patch pairs recoverable from model output."""


class OverlapError(Exception):
    """Two pairs' spans overlap inside the buggy function."""


@dataclass(frozen=True)
class SnippetPatchPair:
    buggy_snippet: str
    patch: str
    span: tuple[int, int]  # 1-based inclusive lines within the buggy function

    def __post_init__(self):
        if not self.patch.strip():
            raise ValueError("patch must be non-empty")


@dataclass(frozen=True)
class PipelineConfig:
    use_dr: bool = True
    use_reference: bool = True
    use_identifiers: bool = True
    model_id: str = "gpt-4"
    max_tokens: int = 2048

    @property
    def variant(self) -> str:
        if self.use_dr and self.use_reference and self.use_identifiers:
            return "full"
        if not self.use_dr:
            return "-DR"
        if not self.use_reference:
            return "-PF"
        return "-ID"


@dataclass
class ProjectContext:
    """Project-level inputs a task needs beyond its benchmark entry."""
    defective_file: SourceFile
    project_table: IdentifierTable
    reference_provider: object | None = None


@dataclass
class RepairTask:
    entry: BenchmarkEntry
    buggy_function: str
    dr: DesignRationale
    config: PipelineConfig

    @property
    def task_id(self) -> str:
        return self.entry.issue.key


@dataclass
class RepairOutcome:
    task_id: str
    draft_pairs: list[SnippetPatchPair]
    references: list[ReferencePatch | None]
    suggestions: list[IdentifierSuggestion]
    final_pairs: list[SnippetPatchPair]
    repaired_function: str
    transcript: list[tuple[str, str]] = field(default_factory=list)
    fallback_used: bool = False


# ---------------------------------------------------------------------------
# prompt assembly

def assemble_draft_prompt(task: RepairTask) -> PromptRequest:
    """Five-section draft prompt; the rationale section is omitted entirely
    when disabled or empty."""
    dr_text = render_dr_section(task.dr) if task.config.use_dr else ""
    dr_section = dr_text + "\n" if dr_text else ""
    dr_hint = " and the design rationale from the discussion" if dr_text else ""
    prompt = load_template("draft.txt").format(
        summary=task.entry.issue.summary,
        buggy_code=task.buggy_function,
        dr_section=dr_section,
        dr_hint=dr_hint,
    )
    return PromptRequest(messages=(ChatMessage("user", prompt),),
                         model_id=task.config.model_id,
                         max_tokens=task.config.max_tokens,
                         request_tag="draft")


_PAIR_RE = re.compile(
    r"<buggy_snippet>\s*\n(.*?)\n?\s*</buggy_snippet>\s*<patch>\s*\n(.*?)\n?\s*</patch>",
    re.DOTALL)
_FENCE_RE = re.compile(r"^```[a-zA-Z]*\n(.*?)\n?```$", re.DOTALL)


def _unfence(text: str) -> str:
    m = _FENCE_RE.match(text.strip())
    return m.group(1) if m else text


def parse_draft_output(model_text: str, buggy_function: str) -> list[SnippetPatchPair]:
    """Extract ordered pairs; unlocatable snippets are dropped with a warning.

    Raises ParseError when nothing is recoverable and OverlapError when two
    located spans overlap.
    """
    raw_pairs = _PAIR_RE.findall(model_text)
    if not raw_pairs:
        raise ParseError("no <buggy_snippet>/<patch> pairs in model output")
    pairs: list[SnippetPatchPair] = []
    for snippet, patch in raw_pairs:
        snippet = _unfence(snippet)
        patch = _unfence(patch)
        if not patch.strip():
            log.warning("dropping pair with empty patch")
            continue
        span = find_verbatim(snippet, buggy_function)
        if span is None:
            log.warning("dropping pair whose snippet is not verbatim in the function")
            continue
        pairs.append(SnippetPatchPair(buggy_snippet=snippet, patch=patch, span=span))
    if not pairs:
        raise ParseError("no pair with a locatable snippet")
    _check_disjoint(pairs)
    return pairs


def _check_disjoint(pairs: list[SnippetPatchPair]):
    spans = sorted(p.span for p in pairs)
    for (s1, e1), (s2, _e2) in zip(spans, spans[1:]):
        if s2 <= e1:
            raise OverlapError(f"spans {(s1, e1)} and starting {s2} overlap")


def render_reference_section(references: list[ReferencePatch | None]) -> str:
    blocks = []
    for i, ref in enumerate(references, start=1):
        if ref is None:
            continue
        blocks.append(f"For draft pair {i}:\n```java\n{ref.text}\n```")
    if not blocks:
        return ""
    return REFERENCE_HEADER + "\n" + "\n".join(blocks) + "\n\n"


def assemble_final_prompt(task: RepairTask, draft_request: PromptRequest,
                          draft_response: str,
                          references: list[ReferencePatch | None],
                          suggestions: list[IdentifierSuggestion]) -> PromptRequest:
    """Dialogue-format refinement: draft exchange replayed, then feedback."""
    reference_section = (render_reference_section(references)
                         if task.config.use_reference else "")
    identifier_section = (render_suggestions(suggestions)
                          if task.config.use_identifiers else "")
    prompt = load_template("final.txt").format(
        reference_section=reference_section,
        identifier_section=identifier_section,
    )
    return PromptRequest(
        messages=(*draft_request.messages,
                  ChatMessage("assistant", draft_response),
                  ChatMessage("user", prompt)),
        model_id=task.config.model_id,
        max_tokens=task.config.max_tokens,
        request_tag="final")


# ---------------------------------------------------------------------------
# patch application

def apply_patch(buggy_function: str, pairs: list[SnippetPatchPair]) -> str:
    """Replace each pair's span with its patch lines, bottom-up.

    Patch lines carrying no indentation inherit the first replaced line's.
    """
    _check_disjoint(pairs)
    lines = buggy_function.split("\n")
    for pair in sorted(pairs, key=lambda p: p.span[0], reverse=True):
        start, end = pair.span
        original_first = lines[start - 1]
        indent = original_first[:len(original_first) - len(original_first.lstrip())]
        patch_lines = pair.patch.split("\n")
        if all(ln == ln.lstrip() for ln in patch_lines if ln.strip()):
            patch_lines = [indent + ln if ln.strip() else ln for ln in patch_lines]
        lines[start - 1:end] = patch_lines
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# the run

def _complete_with_retry(gateway: Gateway, request: PromptRequest,
                         buggy_function: str, transcript: list[tuple[str, str]],
                         stage: str) -> list[SnippetPatchPair] | None:
    """One attempt plus one reformat retry; None when both fail to parse."""
    text = gateway.complete(request)
    transcript.append((stage, replay_key(request)))
    try:
        return parse_draft_output(text, buggy_function)
    except (ParseError, OverlapError) as exc:
        log.warning("%s output unusable (%s); retrying with reformat", stage, exc)
    retry = PromptRequest(
        messages=(*request.messages,
                  ChatMessage("assistant", text),
                  ChatMessage("user", load_template("reformat.txt"))),
        model_id=request.model_id, max_tokens=request.max_tokens,
        request_tag=f"{stage}-retry")
    retry_text = gateway.complete(retry)
    transcript.append((f"{stage}-retry", replay_key(retry)))
    try:
        return parse_draft_output(retry_text, buggy_function)
    except (ParseError, OverlapError) as exc:
        log.warning("%s retry still unusable (%s)", stage, exc)
        return None


def run_pipeline(task: RepairTask, gateway: Gateway,
                 context: ProjectContext) -> RepairOutcome:
    """Execute draft -> feedback -> final for one task.

    A final stage that stays unparseable after its retry falls back to the
    draft pairs (flagged). A draft stage that fails is a task error.
    """
    transcript: list[tuple[str, str]] = []
    draft_request = assemble_draft_prompt(task)
    draft_response = gateway.complete(draft_request)
    transcript.append(("draft", replay_key(draft_request)))
    try:
        draft_pairs = parse_draft_output(draft_response, task.buggy_function)
    except (ParseError, OverlapError) as exc:
        log.warning("draft output unusable for %s (%s); retrying", task.task_id, exc)
        retry = _reformat_request(draft_request, draft_response)
        retry_text = gateway.complete(retry)
        transcript.append(("draft-retry", replay_key(retry)))
        try:
            draft_pairs = parse_draft_output(retry_text, task.buggy_function)
        except (ParseError, OverlapError) as exc2:
            raise GatewayError(
                f"draft output unusable for {task.task_id} after retry") from exc2

    references: list[ReferencePatch | None] = [None] * len(draft_pairs)
    if task.config.use_reference and context.reference_provider is not None:
        references = []
        for pair in draft_pairs:
            query = mask_defective_span(task.buggy_function, pair.span,
                                        task_id=task.task_id)
            references.append(generate_reference(query, context.reference_provider))

    suggestions: list[IdentifierSuggestion] = []
    if task.config.use_identifiers:
        file_table = build_identifier_table([context.defective_file.text], "file")
        scan_texts = [p.patch for p in draft_pairs]
        scan_texts += [r.text for r in references if r is not None]
        seen: set[str] = set()
        for text in scan_texts:
            for suspect in detect_suspects(text, file_table, context.project_table):
                if suspect in seen:
                    continue
                seen.add(suspect)
                suggestion = recommend(suspect, context.defective_file,
                                       "\n".join(scan_texts))
                if suggestion.candidates:
                    suggestions.append(suggestion)

    final_request = assemble_final_prompt(task, draft_request, draft_response,
                                          references, suggestions)
    fallback = False
    final_pairs = _complete_with_retry(gateway, final_request,
                                       task.buggy_function, transcript, "final")
    if final_pairs is None:
        final_pairs = draft_pairs
        fallback = True

    repaired = apply_patch(task.buggy_function, final_pairs)
    return RepairOutcome(
        task_id=task.task_id,
        draft_pairs=draft_pairs,
        references=references,
        suggestions=suggestions,
        final_pairs=final_pairs,
        repaired_function=repaired,
        transcript=transcript,
        fallback_used=fallback,
    )


def _reformat_request(request: PromptRequest, response: str) -> PromptRequest:
    return PromptRequest(
        messages=(*request.messages,
                  ChatMessage("assistant", response),
                  ChatMessage("user", load_template("reformat.txt"))),
        model_id=request.model_id, max_tokens=request.max_tokens,
        request_tag=f"{request.request_tag}-retry")


# ---------------------------------------------------------------------------
# outcome serialization (line-delimited, byte-stable)

def outcome_to_dict(outcome: RepairOutcome) -> dict:
    return {
        "task_id": outcome.task_id,
        "draft_pairs": [_pair_dict(p) for p in outcome.draft_pairs],
        "references": [
            None if r is None else
            {"text": r.text, "provider_id": r.provider_id, "score": round(r.score, 6)}
            for r in outcome.references],
        "suggestions": [
            {"suspect": s.suspect,
             "candidates": [{"name": c.name, "similarity": round(c.similarity, 6),
                             "source": c.source} for c in s.candidates]}
            for s in outcome.suggestions],
        "final_pairs": [_pair_dict(p) for p in outcome.final_pairs],
        "repaired_function": outcome.repaired_function,
        "transcript": [[stage, key] for stage, key in outcome.transcript],
        "fallback_used": outcome.fallback_used,
    }


def _pair_dict(pair: SnippetPatchPair) -> dict:
    return {"buggy_snippet": pair.buggy_snippet, "patch": pair.patch,
            "span": list(pair.span)}


def outcome_from_dict(data: dict) -> RepairOutcome:
    def pair(d):
        return SnippetPatchPair(d["buggy_snippet"], d["patch"], tuple(d["span"]))

    return RepairOutcome(
        task_id=data["task_id"],
        draft_pairs=[pair(d) for d in data["draft_pairs"]],
        references=[
            None if r is None else ReferencePatch(r["text"], r["provider_id"], r["score"])
            for r in data["references"]],
        suggestions=[
            IdentifierSuggestion(
                suspect=s["suspect"],
                candidates=tuple(
                    Candidate(name=c["name"], similarity=c["similarity"],
                              source=c["source"])
                    for c in s.get("candidates", [])))
            for s in data["suggestions"]],
        final_pairs=[pair(d) for d in data["final_pairs"]],
        repaired_function=data["repaired_function"],
        transcript=[(stage, key) for stage, key in data["transcript"]],
        fallback_used=data.get("fallback_used", False),
    )


def save_outcomes(outcomes: list[RepairOutcome], path: Path | str):
    with Path(path).open("w", encoding="utf-8") as fh:
        for outcome in outcomes:
            fh.write(json.dumps(outcome_to_dict(outcome), sort_keys=True,
                                ensure_ascii=False))
            fh.write("\n")


def load_outcomes(path: Path | str) -> list[RepairOutcome]:
    outcomes = []
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                outcomes.append(outcome_from_dict(json.loads(line)))
    return outcomes
