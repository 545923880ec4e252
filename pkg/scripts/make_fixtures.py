#!/usr/bin/env python3
"""Regenerate the deterministic test fixtures under tests/fixtures/generated/.

Produces, from the static mini repo in tests/fixtures/repo/:

  * tracker_export.json  - five synthetic issues with merged PRs whose diffs
                           are computed against the repo files
  * benchmark.jsonl      - the ingested issue-patch benchmark
  * corpus.jsonl         - the masked infill corpus of the repo
  * cache/               - replay cache holding every scripted LLM response
  * golden/outcomes_*.jsonl - frozen pipeline outcomes for the four configs

The scripted model is a pure function of the prompt, so reruns are
byte-identical. Run from the repository root:

    python3 scripts/make_fixtures.py
"""

from __future__ import annotations

import difflib
import json
import shutil
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from repairkit.cli import DEFAULT_SEED  # noqa: E402
from repairkit.corpus import build_corpus, load_corpus  # noqa: E402
from repairkit.gateway import Gateway, GatewayConfig  # noqa: E402
from repairkit.identrec import build_project_table  # noqa: E402
from repairkit.ingest import ingest, load_tracker_export, save_benchmark  # noqa: E402
from repairkit.methods import SourceFile  # noqa: E402
from repairkit.pipeline import (PipelineConfig, ProjectContext, RepairTask,  # noqa: E402
                                run_pipeline, save_outcomes)
from repairkit.rationale import DesignRationale, extract_dr  # noqa: E402
from repairkit.refpatch import RetrievalProvider  # noqa: E402

FIXTURES = ROOT / "tests" / "fixtures"
REPO = FIXTURES / "repo"
GENERATED = FIXTURES / "generated"

# ---------------------------------------------------------------------------
# issue catalogue: (key, summary, description, comments, file, replacement)

GOLD_EDITS = {
    "APP-1": ("src/app/Config.java",
              "        return value;",
              "        return value.trim();"),
    "APP-2": ("src/app/Parser.java",
              "        return Integer.parseInt(text);",
              "        if (text == null) {\n"
              "            return 0;\n"
              "        }\n"
              "        return Integer.parseInt(text.trim());"),
    "APP-3": ("src/app/Cache.java",
              "    public Object fetch(String key) {\n"
              "        Object value = store.get(key);",
              "    public Object fetch(String key) {\n"
              "        Object value = lookupValue(key);"),
    "APP-4": ("src/app/Retry.java",
              "        boolean retry = attempts < maxRetries - 1;",
              "        boolean retry = attempts <= maxRetries;"),
    "APP-5": ("src/app/Format.java",
              "        String label = name + \":\" + value;",
              "        if (name.isEmpty()) {\n"
              "            return value;\n"
              "        }\n"
              "        String label = name + \": \" + value;"),
}

ISSUES = [
    {
        "key": "APP-1",
        "summary": "getString returns values with surrounding whitespace",
        "description": "Config values read from properties files keep their "
                       "trailing spaces, which breaks downstream comparisons.",
        "status": "closed",
        "comments": [
            {"author": "mara", "created": "2024-03-02T10:00:00Z",
             "body": "We should trim before returning, e.g. "
                     "{code}return value.trim();{code}"},
            {"author": "jonas", "created": "2024-03-02T11:30:00Z",
             "body": "Agreed, trimming at the boundary keeps callers simple."},
        ],
    },
    {
        "key": "APP-2",
        "summary": "parseAmount crashes on null and padded input",
        "description": "Amounts arriving from the HTTP layer are sometimes "
                       "null or padded with spaces; parseAmount throws.",
        "status": "closed",
        "comments": [
            {"author": "mara", "created": "2024-03-10T09:00:00Z",
             "body": "Guard against null first, then trim before parsing."},
            {"author": "li", "created": "2024-03-10T09:40:00Z",
             "body": "Callers pass values straight from the network, so the "
                     "guard belongs here rather than in every caller."},
        ],
    },
    {
        "key": "APP-3",
        "summary": "Cache.fetch bypasses the default value",
        "description": "fetch reads the raw store and returns null for "
                       "missing keys instead of applying the default.",
        "status": "closed",
        "comments": [
            {"author": "jonas", "created": "2024-04-01T14:00:00Z",
             "body": "fetch should route through lookupValue so defaults "
                     "apply consistently."},
        ],
    },
    {
        "key": "APP-4",
        "summary": "Retry gives up one attempt too early",
        "description": "With maxRetries = 3 only two retries happen because "
                       "of the off-by-one in shouldRetry.",
        "status": "closed",
        "comments": [],
    },
    {
        "key": "APP-5",
        "summary": "renderLabel produces ':value' for empty names",
        "description": "Labels with an empty name render a dangling colon "
                       "and there is no space after the separator.",
        "status": "closed",
        "comments": [
            {"author": "li", "created": "2024-04-20T16:00:00Z",
             "body": "Skip the name prefix entirely when it is empty, and "
                     "put a space after the colon."},
        ],
    },
]


def unified_diff(path: str, before: str, after: str) -> str:
    # one context line keeps each hunk inside the changed method's span
    lines = difflib.unified_diff(
        before.split("\n"), after.split("\n"),
        fromfile=f"a/{path}", tofile=f"b/{path}", lineterm="", n=1)
    return "\n".join(lines) + "\n"


def build_tracker_export() -> dict:
    pulls = []
    for i, issue in enumerate(ISSUES, start=1):
        key = issue["key"]
        path, old, new = GOLD_EDITS[key]
        before = (REPO / path).read_text(encoding="utf-8")
        assert before.count(old) == 1, f"{key}: edit anchor not unique in {path}"
        after = before.replace(old, new)
        pulls.append({
            "id": str(100 + i),
            "title": f"{key} fix",
            "body": f"Fixes {key}.",
            "merged": True,
            "files": [path],
            "diff": unified_diff(path, before, after),
            "base_commit": "fixture",
        })
    return {"issues": ISSUES, "pulls": pulls}


# ---------------------------------------------------------------------------
# the scripted model

PAIR = "<buggy_snippet>\n{snippet}\n</buggy_snippet>\n<patch>\n{patch}\n</patch>"

DR_ANSWERS = {
    "APP-1": ("SOLUTION 1 (comment 0): trim the looked-up value before returning it\n"
              "ARGUMENT (supports) SOLUTION 1 (comment 1): trimming at the boundary keeps callers simple"),
    "APP-2": ("SOLUTION 1 (comment 0): guard against null input and trim before parsing\n"
              "ARGUMENT (supports) SOLUTION 1 (comment 1): callers pass values straight from the network"),
    "APP-3": "SOLUTION 1 (comment 0): route fetch through lookupValue so defaults apply",
    "APP-5": "SOLUTION 1 (comment 0): skip the name prefix when empty and add a space after the colon",
}

DRAFTS = {
    "APP-1": PAIR.format(snippet="        return value;",
                         patch="        return value.trim();"),
    "APP-2": PAIR.format(snippet="        return Integer.parseInt(text);",
                         patch="        return Integer.parseInt(text.trim());"),
    "APP-3": PAIR.format(snippet="        Object value = store.get(key);",
                         patch="        Object value = getValue(key);"),
    "APP-4": PAIR.format(snippet="        boolean retry = attempts < maxRetries - 1;",
                         patch="        boolean retry = attempts < maxRetries;"),
    "APP-5": PAIR.format(snippet="        String label = name + \":\" + value;",
                         patch="        String label = name + \": \" + value;"),
}

# final-stage answers and the feedback each one depends on; without its cue
# in the dialogue the model just repeats its draft
FINALS = {
    "APP-1": (None, DRAFTS["APP-1"]),
    "APP-2": ("Design Rationale:",
              PAIR.format(snippet="        return Integer.parseInt(text);",
                          patch="        if (text == null) {\n"
                                "            return 0;\n"
                                "        }\n"
                                "        return Integer.parseInt(text.trim());")),
    "APP-3": ("Identifier Suggestions:",
              PAIR.format(snippet="        Object value = store.get(key);",
                          patch="        Object value = lookupValue(key);")),
    "APP-4": ("Reference Patches:",
              PAIR.format(snippet="        boolean retry = attempts < maxRetries - 1;",
                          patch="        boolean retry = attempts <= maxRetries;")),
    "APP-5": ("Design Rationale:",
              PAIR.format(snippet="        String label = name + \":\" + value;",
                          patch="        if (name.isEmpty()) {\n"
                                "            return value;\n"
                                "        }\n"
                                "        String label = name + \": \" + value;")),
}

SUMMARY_TO_KEY = {issue["summary"]: issue["key"] for issue in ISSUES}


def issue_key_of(messages: list[dict]) -> str:
    text = "\n".join(m["content"] for m in messages)
    for summary, key in SUMMARY_TO_KEY.items():
        if summary in text:
            return key
    raise AssertionError("no known issue summary in prompt")


def scripted_model(messages: list[dict]) -> str:
    last = messages[-1]["content"]
    key = issue_key_of(messages)
    if "extract every proposed solution" in messages[0]["content"]:
        return DR_ANSWERS[key]
    if "Output Instruction:" in last:
        return DRAFTS[key]
    if "Follow my tips" in last:
        cue, answer = FINALS[key]
        dialogue = "\n".join(m["content"] for m in messages)
        if cue is None or cue in dialogue:
            return answer
        return DRAFTS[key]
    raise AssertionError(f"unrecognized prompt stage: {last[:80]!r}")


def scripted_transport(endpoint, payload, headers, timeout):
    text = scripted_model(payload["messages"])
    return 200, json.dumps({"choices": [{"message": {"content": text}}]})


# ---------------------------------------------------------------------------

VARIANTS = {
    "full": PipelineConfig(),
    "noDR": PipelineConfig(use_dr=False),
    "noPF": PipelineConfig(use_reference=False),
    "noID": PipelineConfig(use_identifiers=False),
}


def main():
    if GENERATED.exists():
        shutil.rmtree(GENERATED)
    GENERATED.mkdir(parents=True)
    cache_dir = GENERATED / "cache"
    cache_dir.mkdir()
    golden_dir = GENERATED / "golden"
    golden_dir.mkdir()

    export = build_tracker_export()
    export_path = GENERATED / "tracker_export.json"
    export_path.write_text(json.dumps(export, indent=2, sort_keys=True) + "\n",
                           encoding="utf-8")

    issues, pulls = load_tracker_export(export_path)
    entries, report = ingest(issues, pulls, REPO)
    assert report.accepted == len(ISSUES), f"ingest report: {report}"
    save_benchmark(entries, GENERATED / "benchmark.jsonl")

    corpus_path = GENERATED / "corpus.jsonl"
    build_corpus(REPO, DEFAULT_SEED, corpus_path)
    provider = RetrievalProvider(load_corpus(corpus_path))
    project_table = build_project_table(REPO)

    gw_cfg = GatewayConfig(provider_kind="http", cache_dir=cache_dir,
                           endpoint="https://fixture.invalid/v1/chat")
    gateway = Gateway(gw_cfg, transport=scripted_transport)

    for name, cfg in VARIANTS.items():
        outcomes = []
        for entry in entries:
            dr = (extract_dr(entry.issue, gateway, cfg.model_id)
                  if cfg.use_dr else DesignRationale(issue_key=entry.issue.key))
            task = RepairTask(entry=entry, buggy_function=entry.gold.function_before,
                              dr=dr, config=cfg)
            context = ProjectContext(
                defective_file=SourceFile.read(REPO / entry.gold.file_path),
                project_table=project_table,
                reference_provider=provider if cfg.use_reference else None)
            outcomes.append(run_pipeline(task, gateway, context))
        save_outcomes(outcomes, golden_dir / f"outcomes_{name}.jsonl")
        n_cache = len(list(cache_dir.glob("*.json")))
        print(f"{name}: {len(outcomes)} outcomes, cache now {n_cache} entries")

    print(f"fixtures regenerated under {GENERATED}")


if __name__ == "__main__":
    main()
