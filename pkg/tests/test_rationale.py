import pytest

from repairkit.gateway import ChatMessage, Gateway, GatewayConfig, PromptRequest
from repairkit.ingest import Comment, IssueRecord
from repairkit.rationale import (Argument, DesignRationale, DrParseError, Solution,
                                 extract_dr, extraction_request, parse_dr_output,
                                 render_dr_section)


def make_issue(n_comments=2):
    comments = tuple(
        Comment(i, f"dev{i}", "2024-01-01", f"comment body {i}")
        for i in range(n_comments))
    return IssueRecord(key="APP-1", summary="bug summary",
                       description="bug description", status="closed",
                       comments=comments)


class ScriptedGateway:
    """Stands in for Gateway; returns queued responses in order."""

    def __init__(self, responses):
        self.responses = list(responses)
        self.requests = []

    def complete(self, req):
        self.requests.append(req)
        return self.responses.pop(0)


class TestParseDrOutput:
    def test_solutions_and_arguments(self):
        text = ("SOLUTION 1 (comment 0): trim the value before returning\n"
                "ARGUMENT (supports) SOLUTION 1 (comment 1): avoids breaking callers\n")
        dr = parse_dr_output(text, make_issue())
        assert dr.solutions == (Solution("trim the value before returning", 0),)
        assert dr.arguments == (
            Argument("avoids breaking callers", 1, "supports", 0),)

    def test_opposing_argument(self):
        text = ("SOLUTION 1 (comment 0): rewrite the parser\n"
                "ARGUMENT (opposes) SOLUTION 1 (comment 1): too invasive\n")
        dr = parse_dr_output(text, make_issue())
        assert dr.arguments[0].stance == "opposes"

    def test_unlabeled_stance_defaults_to_supports(self):
        text = ("SOLUTION 1 (comment 0): cache it\n"
                "ARGUMENT SOLUTION 1 (comment 1): it is hot code\n")
        dr = parse_dr_output(text, make_issue())
        assert dr.arguments[0].stance == "supports"

    def test_none_marker(self):
        dr = parse_dr_output("NONE", make_issue())
        assert dr.empty

    def test_garbage_raises(self):
        with pytest.raises(DrParseError):
            parse_dr_output("I think the bug is in the parser.", make_issue())

    def test_out_of_range_comment_index_dropped(self):
        text = ("SOLUTION 1 (comment 9): phantom\n"
                "SOLUTION 2 (comment 0): real\n")
        dr = parse_dr_output(text, make_issue(n_comments=2))
        assert [s.text for s in dr.solutions] == ["real"]

    def test_argument_to_unknown_solution_dropped(self):
        text = ("SOLUTION 1 (comment 0): real\n"
                "ARGUMENT (supports) SOLUTION 5 (comment 1): dangling\n")
        dr = parse_dr_output(text, make_issue())
        assert dr.arguments == ()

    def test_solution_numbering_is_positional(self):
        # the model may number solutions arbitrarily; refs follow its numbers
        text = ("SOLUTION 3 (comment 0): first listed\n"
                "SOLUTION 7 (comment 1): second listed\n"
                "ARGUMENT (supports) SOLUTION 7 (comment 0): backs the second\n")
        dr = parse_dr_output(text, make_issue())
        assert dr.arguments[0].solution_ref == 1


class TestDesignRationale:
    def test_dangling_ref_rejected(self):
        with pytest.raises(ValueError):
            DesignRationale(issue_key="X-1", solutions=(),
                            arguments=(Argument("a", 0, "supports", 0),))

    def test_empty_property(self):
        assert DesignRationale(issue_key="X-1").empty
        assert not DesignRationale(issue_key="X-1",
                                   solutions=(Solution("s", 0),)).empty


class TestExtractionRequest:
    def test_prompt_contains_issue_fields(self):
        req = extraction_request(make_issue(), "gpt-4")
        prompt = req.messages[0].content
        assert "APP-1" in prompt
        assert "bug summary" in prompt
        assert "[0] dev0: comment body 0" in prompt
        assert req.request_tag == "dr-extract"


class TestExtractDr:
    def test_no_comments_short_circuits(self):
        gw = ScriptedGateway([])
        issue = make_issue(n_comments=0)
        dr = extract_dr(issue, gw)
        assert dr.empty
        assert gw.requests == []

    def test_clean_first_pass(self):
        gw = ScriptedGateway(["SOLUTION 1 (comment 0): fix it\n"])
        dr = extract_dr(make_issue(), gw)
        assert len(dr.solutions) == 1
        assert len(gw.requests) == 1

    def test_reformat_retry(self):
        gw = ScriptedGateway([
            "Sure! I think you should fix it.",
            "SOLUTION 1 (comment 0): fix it\n",
        ])
        dr = extract_dr(make_issue(), gw)
        assert len(dr.solutions) == 1
        assert len(gw.requests) == 2
        retry = gw.requests[1]
        assert retry.request_tag == "dr-extract-retry"
        # the retry replays the failed exchange before asking to reformat
        assert retry.messages[1].role == "assistant"
        assert retry.messages[1].content == "Sure! I think you should fix it."

    def test_double_failure_raises(self):
        gw = ScriptedGateway(["nope", "still nope"])
        with pytest.raises(DrParseError):
            extract_dr(make_issue(), gw)
        assert len(gw.requests) == 2


class TestRenderDrSection:
    def test_empty_renders_empty(self):
        assert render_dr_section(DesignRationale(issue_key="X-1")) == ""

    def test_layout(self):
        dr = DesignRationale(
            issue_key="X-1",
            solutions=(Solution("trim the value", 0), Solution("cache it", 1)),
            arguments=(Argument("safe change", 1, "supports", 0),
                       Argument("adds state", 0, "opposes", 1)))
        text = render_dr_section(dr)
        assert text.splitlines() == [
            "Design Rationale:",
            "Solution 1: trim the value",
            "  Argument (supports): safe change",
            "Solution 2: cache it",
            "  Argument (opposes): adds state",
        ]
        assert text.endswith("\n")
