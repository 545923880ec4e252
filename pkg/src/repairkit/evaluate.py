"""Outcome scoring and run aggregation.

Full-match compares functions after per-line trimming and blank-line
removal; CodeBLEU is computed over the whole repaired function. Summaries
carry the changed-line histogram and render ratios at two decimals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import ROUND_DOWN, ROUND_HALF_DOWN, Decimal

from .codebleu import CodeBleuScore, CodeBleuWeights, codebleu
from .ingest import BenchmarkEntry, changed_line_histogram


class EmptyRun(Exception):
    pass


@dataclass
class EvalOutcome:
    task_id: str
    full_match: bool
    codebleu: CodeBleuScore
    fallback_used: bool = False


@dataclass
class RunSummary:
    n_tasks: int
    n_full_match: int
    full_match_ratio: float
    mean_codebleu: float
    bucket_histogram: dict[str, int] = field(default_factory=dict)


def normalize_function(text: str) -> list[str]:
    return [line.strip() for line in text.split("\n") if line.strip()]


def full_match(candidate_function: str, gold_function: str) -> bool:
    """Equality after per-line trim and blank-line removal."""
    return normalize_function(candidate_function) == normalize_function(gold_function)


def evaluate_outcome(task_id: str, repaired_function: str, gold_function: str,
                     fallback_used: bool = False,
                     weights: CodeBleuWeights = CodeBleuWeights()) -> EvalOutcome:
    return EvalOutcome(
        task_id=task_id,
        full_match=full_match(repaired_function, gold_function),
        codebleu=codebleu(repaired_function, gold_function, weights),
        fallback_used=fallback_used,
    )


def render_percent(ratio: float) -> str:
    """Two-decimal percentage matching the reporting convention of the
    reference result tables.

    The value is truncated to three decimals first and the third decimal
    then rounds half-down, so 0.152661 -> "15.27" while 0.080357 -> "8.03".
    """
    pct = Decimal(str(ratio)) * Decimal(100)
    pct = pct.quantize(Decimal("0.001"), rounding=ROUND_DOWN)
    return str(pct.quantize(Decimal("0.01"), rounding=ROUND_HALF_DOWN))


def summarize(outcomes: list[EvalOutcome],
              entries: list[BenchmarkEntry] | None = None) -> RunSummary:
    if not outcomes:
        raise EmptyRun("no outcomes to summarize")
    n = len(outcomes)
    n_match = sum(1 for o in outcomes if o.full_match)
    mean = sum(o.codebleu.total for o in outcomes) / n
    hist: dict[str, int] = {}
    if entries:
        hist = changed_line_histogram([e.gold.changed_line_count for e in entries])
    return RunSummary(n_tasks=n, n_full_match=n_match,
                      full_match_ratio=n_match / n, mean_codebleu=mean,
                      bucket_histogram=hist)


def drop_ratio(base: float, variant: float) -> float:
    """(base - variant) / base; positive means the variant degraded."""
    if base == 0:
        raise ZeroDivisionError("base metric is zero")
    return (base - variant) / base


def render_summary_table(rows: dict[str, RunSummary]) -> str:
    """Aligned-text table, one row per configuration."""
    header = f"{'Approach':<16} {'Full-Match':>18} {'CodeBLEU':>10}"
    lines = [header, "-" * len(header)]
    for name, summary in rows.items():
        fm = f"{summary.n_full_match}({render_percent(summary.full_match_ratio)}%)"
        lines.append(f"{name:<16} {fm:>18} {summary.mean_codebleu:>10.3f}")
    return "\n".join(lines)


def render_histogram(hist: dict[str, int]) -> str:
    total = sum(hist.values())
    lines = [f"{'Changed lines':<12} {'Count':>8} {'Share':>9}"]
    for label, count in hist.items():
        share = render_percent(count / total) if total else "0.00"
        lines.append(f"{label:<12} {count:>8} {share:>8}%")
    lines.append(f"{'Total':<12} {total:>8}")
    return "\n".join(lines)
