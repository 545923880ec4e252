"""Design-rationale extraction from issue discussions via the LLM gateway.

A design rationale pairs proposed solutions with the arguments developers
made for or against them, each attributed to the comment it came from.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources

from .gateway import ChatMessage, Gateway, PromptRequest
from .ingest import IssueRecord


class DrParseError(Exception):
    """Model output not parseable as a rationale listing, even after retry."""


@dataclass(frozen=True)
class Solution:
    text: str
    comment_index: int


@dataclass(frozen=True)
class Argument:
    text: str
    comment_index: int
    stance: str  # supports | opposes
    solution_ref: int  # index into the solutions list


@dataclass(frozen=True)
class DesignRationale:
    issue_key: str
    solutions: tuple[Solution, ...] = ()
    arguments: tuple[Argument, ...] = ()

    def __post_init__(self):
        for arg in self.arguments:
            if not (0 <= arg.solution_ref < len(self.solutions)):
                raise ValueError(f"argument references missing solution {arg.solution_ref}")

    @property
    def empty(self) -> bool:
        return not self.solutions


def load_template(name: str) -> str:
    return resources.files("repairkit.templates").joinpath(name).read_text(encoding="utf-8")


_SOLUTION_RE = re.compile(r"^SOLUTION\s+(\d+)\s*\(comment\s+(\d+)\)\s*:\s*(.+)$")
_ARGUMENT_RE = re.compile(
    r"^ARGUMENT\s*(?:\((\w+)\))?\s*SOLUTION\s+(\d+)\s*\(comment\s+(\d+)\)\s*:\s*(.+)$")


def extraction_request(issue: IssueRecord, model_id: str) -> PromptRequest:
    comments = "\n".join(
        f"[{c.index}] {c.author}: {c.body}" for c in issue.comments)
    prompt = load_template("dr_extract.txt").format(
        key=issue.key, summary=issue.summary,
        description=issue.description or "(none)",
        comments=comments or "(none)")
    return PromptRequest(
        messages=(ChatMessage("user", prompt),),
        model_id=model_id, request_tag="dr-extract")


def parse_dr_output(text: str, issue: IssueRecord) -> DesignRationale:
    """Parse the strict SOLUTION/ARGUMENT listing. Raises DrParseError."""
    n_comments = len(issue.comments)
    solutions: list[Solution] = []
    numbers: dict[int, int] = {}  # model's solution number -> list index
    arguments: list[Argument] = []
    meaningful = 0
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line == "NONE":
            meaningful += 1
            continue
        m = _SOLUTION_RE.match(line)
        if m:
            number, cidx, body = int(m.group(1)), int(m.group(2)), m.group(3).strip()
            if not body or not (0 <= cidx < n_comments):
                continue
            numbers[number] = len(solutions)
            solutions.append(Solution(text=body, comment_index=cidx))
            meaningful += 1
            continue
        m = _ARGUMENT_RE.match(line)
        if m:
            stance, number, cidx, body = m.group(1), int(m.group(2)), int(m.group(3)), m.group(4).strip()
            stance = stance.lower() if stance else "supports"
            if stance not in {"supports", "opposes"}:
                stance = "supports"  # unparseable stance defaults to supports
            if number not in numbers or not body or not (0 <= cidx < n_comments):
                continue
            arguments.append(Argument(text=body, comment_index=cidx,
                                      stance=stance, solution_ref=numbers[number]))
            meaningful += 1
            continue
    if meaningful == 0:
        raise DrParseError(f"no SOLUTION/ARGUMENT lines found in: {text[:120]!r}")
    return DesignRationale(issue_key=issue.key, solutions=tuple(solutions),
                           arguments=tuple(arguments))


def extract_dr(issue: IssueRecord, gateway: Gateway, model_id: str = "gpt-4") -> DesignRationale:
    """Extract the design rationale of an issue; empty DR when it has no comments.

    One reformat retry when the model's structured output does not parse.
    """
    if not issue.comments:
        return DesignRationale(issue_key=issue.key)
    req = extraction_request(issue, model_id)
    text = gateway.complete(req)
    try:
        return parse_dr_output(text, issue)
    except DrParseError:
        retry = PromptRequest(
            messages=(*req.messages,
                      ChatMessage("assistant", text),
                      ChatMessage("user", load_template("reformat.txt"))),
            model_id=model_id, request_tag="dr-extract-retry")
        return parse_dr_output(gateway.complete(retry), issue)


def render_dr_section(dr: DesignRationale) -> str:
    """Human-readable rationale block for the draft prompt.

    Empty string for an empty rationale, in which case the prompt omits
    the section entirely.
    """
    if dr.empty:
        return ""
    lines = ["Design Rationale:"]
    for i, solution in enumerate(dr.solutions):
        lines.append(f"Solution {i + 1}: {solution.text}")
        for arg in dr.arguments:
            if arg.solution_ref == i:
                lines.append(f"  Argument ({arg.stance}): {arg.text}")
    return "\n".join(lines) + "\n"
