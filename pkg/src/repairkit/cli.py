"""Command-line entry point.

Subcommands: ingest, corpus, repair, eval, score. A flat key=value config
file supplies defaults; command-line flags win. Exit codes: 0 success,
1 empty or degenerate result, 2 configuration or input error.
"""

from __future__ import annotations

import json
import logging
import os
import sys
from pathlib import Path

import click

from . import corpus as corpus_mod
from . import evaluate, ingest as ingest_mod, pipeline as pipeline_mod
from .codebleu import codebleu
from .gateway import Gateway, GatewayConfig, GatewayError, TransportError
from .identrec import build_project_table
from .ingest import FormatError, load_benchmark, load_tracker_export, save_benchmark
from .methods import SourceFile
from .rationale import DesignRationale, extract_dr
from .refpatch import RemoteProvider, RetrievalProvider

DEFAULT_SEED = 20240901

log = logging.getLogger(__name__)


def load_config(path: Path | str | None) -> dict[str, str]:
    """Flat `key = value` file; '#' starts a comment."""
    config: dict[str, str] = {}
    if path is None:
        return config
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FormatError(f"expected key = value, got {raw!r}", path, lineno)
        key, value = line.split("=", 1)
        config[key.strip()] = value.strip()
    return config


def _fail(message: str, code: int):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Enable debug logging.")
def main(verbose: bool):
    """Issue-driven program repair toolkit."""
    logging.basicConfig(level=logging.DEBUG if verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")


@main.command("ingest")
@click.argument("tracker_export", type=click.Path(exists=True, dir_okay=False))
@click.argument("repo_path", type=click.Path(exists=True, file_okay=False))
@click.option("-o", "--out", required=True, type=click.Path(),
              help="Benchmark output file (line-delimited records).")
def cmd_ingest(tracker_export: str, repo_path: str, out: str):
    """Build the issue-patch benchmark from a tracker export and a repo clone."""
    try:
        issues, pulls = load_tracker_export(tracker_export)
    except FormatError as exc:
        _fail(str(exc), 2)
    entries, report = ingest_mod.ingest(issues, pulls, repo_path)
    save_benchmark(entries, out)
    rejection_path = Path(out).with_suffix(".rejections.json")
    rejection_path.write_text(json.dumps(
        {"accepted": report.accepted, "rejections": dict(sorted(report.rejections.items()))},
        indent=2, sort_keys=True) + "\n", encoding="utf-8")
    click.echo(f"accepted {report.accepted} entries "
               f"({sum(report.rejections.values())} rejected) -> {out}")
    if report.accepted == 0:
        sys.exit(1)


@main.command("corpus")
@click.argument("repo_path", type=click.Path(exists=True, file_okay=False))
@click.option("-o", "--out", required=True, type=click.Path(),
              help="Corpus output file (line-delimited records).")
@click.option("--seed", default=DEFAULT_SEED, show_default=True, type=int)
def cmd_corpus(repo_path: str, out: str, seed: int):
    """Build the masked fine-tuning corpus from a project's source files."""
    stats = corpus_mod.build_corpus(repo_path, seed, out)
    stats_path = Path(out).with_suffix(".stats.json")
    stats_path.write_text(json.dumps({
        "methods_seen": stats.methods_seen,
        "methods_excluded_short": stats.methods_excluded_short,
        "files_skipped_parse": stats.files_skipped_parse,
        "samples_emitted": stats.samples_emitted,
        "coverage_complete": stats.coverage_complete,
    }, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    click.echo(f"emitted {stats.samples_emitted} samples "
               f"from {stats.methods_seen} methods -> {out}")
    if stats.samples_emitted == 0:
        sys.exit(1)


@main.command("repair")
@click.argument("benchmark", type=click.Path(exists=True, dir_okay=False))
@click.option("-c", "--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              help="key = value configuration file.")
@click.option("-o", "--out", required=True, type=click.Path())
@click.option("--provider", type=click.Choice(["http", "replay"]), default=None,
              help="Gateway provider kind (overrides config).")
@click.option("--no-dr", is_flag=True, help="Ablation: omit design rationale.")
@click.option("--no-reference", is_flag=True, help="Ablation: omit reference patches.")
@click.option("--no-identifiers", is_flag=True, help="Ablation: omit identifier suggestions.")
@click.option("--limit", type=int, default=None, help="Process at most N tasks.")
@click.option("--jobs", type=int, default=1, show_default=True,
              help="Task parallelism (1 keeps logs bit-stable).")
def cmd_repair(benchmark: str, config_path: str | None, out: str,
               provider: str | None, no_dr: bool, no_reference: bool,
               no_identifiers: bool, limit: int | None, jobs: int):
    """Run the repair pipeline over a benchmark file."""
    del jobs  # sequential execution keeps outcome files bit-stable
    config = load_config(config_path)
    provider_kind = provider or config.get("provider", "replay")
    cache_dir = Path(config.get("cache_dir", "cache"))
    if provider_kind == "http":
        api_key_env = config.get("api_key_env", "")
        if api_key_env and not os.environ.get(api_key_env):
            _fail(f"environment variable {api_key_env} is not set", 2)
        if not config.get("endpoint"):
            _fail("http provider requires endpoint in config", 2)
        cache_dir.mkdir(parents=True, exist_ok=True)
    try:
        gw_cfg = GatewayConfig(
            provider_kind=provider_kind,
            cache_dir=cache_dir,
            endpoint=config.get("endpoint", ""),
            api_key_env=config.get("api_key_env", ""),
            timeout=float(config.get("timeout", "60")),
            max_retries=int(config.get("max_retries", "2")),
        )
    except ValueError as exc:
        _fail(str(exc), 2)
    if provider_kind == "replay":
        def _no_network(*_args, **_kwargs):
            raise TransportError("replay mode must not touch the network")
        gateway = Gateway(gw_cfg, transport=_no_network)
    else:
        gateway = Gateway(gw_cfg)

    pipe_cfg = pipeline_mod.PipelineConfig(
        use_dr=not no_dr,
        use_reference=not no_reference,
        use_identifiers=not no_identifiers,
        model_id=config.get("model_id", "gpt-4"),
    )
    repo_path = config.get("repo_path")
    if not repo_path or not Path(repo_path).is_dir():
        _fail("config must set repo_path to the project clone", 2)
    project_table = build_project_table(repo_path)

    reference_provider = None
    if pipe_cfg.use_reference:
        if config.get("infill_endpoint"):
            reference_provider = RemoteProvider(config["infill_endpoint"])
        elif config.get("corpus_path"):
            reference_provider = RetrievalProvider(
                corpus_mod.load_corpus(config["corpus_path"]))

    entries = load_benchmark(benchmark)
    if limit is not None:
        entries = entries[:limit]
    outcomes = []
    errors = []
    for entry in entries:
        file_path = Path(repo_path) / entry.gold.file_path
        if not file_path.is_file():
            errors.append({"task_id": entry.issue.key, "error": "defective file missing"})
            continue
        context = pipeline_mod.ProjectContext(
            defective_file=SourceFile.read(file_path),
            project_table=project_table,
            reference_provider=reference_provider,
        )
        try:
            dr = (extract_dr(entry.issue, gateway, pipe_cfg.model_id)
                  if pipe_cfg.use_dr else DesignRationale(issue_key=entry.issue.key))
            task = pipeline_mod.RepairTask(entry=entry,
                                           buggy_function=entry.gold.function_before,
                                           dr=dr, config=pipe_cfg)
            outcomes.append(pipeline_mod.run_pipeline(task, gateway, context))
        except GatewayError as exc:
            log.error("task %s failed: %s", entry.issue.key, exc)
            errors.append({"task_id": entry.issue.key, "error": str(exc)})
    pipeline_mod.save_outcomes(outcomes, out)
    errors_path = Path(str(out) + ".errors")
    if errors:
        errors_path.write_text(
            "\n".join(json.dumps(e, sort_keys=True) for e in errors) + "\n",
            encoding="utf-8")
    elif errors_path.exists():
        errors_path.unlink()
    click.echo(f"{len(outcomes)} outcomes ({len(errors)} errors) -> {out}")
    if not outcomes:
        sys.exit(1)


@main.command("eval")
@click.argument("outcomes", type=click.Path(exists=True, dir_okay=False))
@click.argument("benchmark", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--out", required=True, type=click.Path(),
              help="Report basename; writes <out>.txt and <out>.jsonl.")
def cmd_eval(outcomes: str, benchmark: str, out: str):
    """Score outcomes against gold patches and write a run report."""
    entries = {e.issue.key: e for e in load_benchmark(benchmark)}
    results = []
    for outcome in pipeline_mod.load_outcomes(outcomes):
        entry = entries.get(outcome.task_id)
        if entry is None:
            log.warning("outcome %s has no benchmark entry; skipped", outcome.task_id)
            continue
        results.append(evaluate.evaluate_outcome(
            outcome.task_id, outcome.repaired_function,
            entry.gold.function_after, outcome.fallback_used))
    if not results:
        _fail("no outcomes to evaluate", 1)
    summary = evaluate.summarize(
        results, [entries[r.task_id] for r in results])
    table = evaluate.render_summary_table({"run": summary})
    hist = evaluate.render_histogram(summary.bucket_histogram)
    Path(f"{out}.txt").write_text(table + "\n\n" + hist + "\n", encoding="utf-8")
    with Path(f"{out}.jsonl").open("w", encoding="utf-8") as fh:
        for r in results:
            fh.write(json.dumps({
                "task_id": r.task_id, "full_match": r.full_match,
                "codebleu": round(r.codebleu.total, 6),
                "ngram": round(r.codebleu.ngram, 6),
                "weighted_ngram": round(r.codebleu.weighted_ngram, 6),
                "ast_match": round(r.codebleu.ast_match, 6),
                "dataflow_match": round(r.codebleu.dataflow_match, 6),
                "fallback_used": r.fallback_used,
            }, sort_keys=True))
            fh.write("\n")
    click.echo(table)
    errors_path = Path(str(outcomes) + ".errors")
    if errors_path.exists() and errors_path.read_text(encoding="utf-8").strip():
        _fail("run contained fatally errored tasks", 3)


@main.command("score")
@click.argument("candidate_file", type=click.Path(exists=True, dir_okay=False))
@click.argument("reference_file", type=click.Path(exists=True, dir_okay=False))
def cmd_score(candidate_file: str, reference_file: str):
    """Print the composite similarity score of two code files."""
    candidate = Path(candidate_file).read_text(encoding="utf-8")
    reference = Path(reference_file).read_text(encoding="utf-8")
    score = codebleu(candidate, reference)
    click.echo(f"ngram           {score.ngram:.4f}")
    click.echo(f"weighted_ngram  {score.weighted_ngram:.4f}")
    click.echo(f"ast_match       {score.ast_match:.4f}")
    click.echo(f"dataflow_match  {score.dataflow_match:.4f}")
    click.echo(f"total           {score.total:.4f}")
    if score.flags:
        click.echo(f"flags           {','.join(score.flags)}")


if __name__ == "__main__":
    main()
