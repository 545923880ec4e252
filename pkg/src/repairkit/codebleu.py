"""Composite code-similarity metric.

Four components combined by configurable weights:

  * clipped n-gram precision with brevity penalty
  * keyword-weighted n-gram precision
  * anonymized AST subtree match
  * def-use dataflow match

Snippets that fail to parse fall back to the n-gram score for the
syntactic components, with the fallback recorded on the result.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

from .lexer import JAVA_KEYWORDS, LexError, code_tokens
from .syntax import ParseFailure, def_use_edges, parse_snippet, subtree_multiset

MAX_NGRAM = 4
DEFAULT_KEYWORD_WEIGHT = 5.0


@dataclass(frozen=True)
class CodeBleuWeights:
    ngram: float = 0.25
    weighted: float = 0.25
    ast: float = 0.25
    dataflow: float = 0.25

    def __post_init__(self):
        total = self.ngram + self.weighted + self.ast + self.dataflow
        if any(w < 0 for w in (self.ngram, self.weighted, self.ast, self.dataflow)):
            raise ValueError("weights must be non-negative")
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {total}")


@dataclass
class CodeBleuScore:
    ngram: float
    weighted_ngram: float
    ast_match: float
    dataflow_match: float
    total: float
    flags: list[str] = field(default_factory=list)


def _tokens(text: str) -> list[str]:
    try:
        return code_tokens(text)
    except LexError:
        # model output may contain broken literals; degrade to split tokens
        return text.split()


def _ngrams(tokens: list[str], n: int) -> Counter[tuple[str, ...]]:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def _brevity_penalty(cand_len: int, ref_len: int) -> float:
    if cand_len == 0:
        return 0.0
    if cand_len > ref_len:
        return 1.0
    return math.exp(1.0 - ref_len / cand_len)


def _precision_fractions(candidate: list[str], reference: list[str],
                         weight_fn) -> list[tuple[float, float]]:
    """(numerator, denominator) per order n, for orders both sides support."""
    fractions = []
    for n in range(1, MAX_NGRAM + 1):
        if len(candidate) < n or len(reference) < n:
            break
        cand_counts = _ngrams(candidate, n)
        ref_counts = _ngrams(reference, n)
        num = 0.0
        den = 0.0
        for gram, count in cand_counts.items():
            w = weight_fn(gram)
            den += w * count
            num += w * min(count, ref_counts.get(gram, 0))
        fractions.append((num, den))
    return fractions


def _bleu(candidate: list[str], reference: list[str], weight_fn) -> float:
    if not candidate and not reference:
        return 1.0
    if not candidate or not reference:
        return 0.0
    fractions = _precision_fractions(candidate, reference, weight_fn)
    if not fractions:
        return 0.0
    smooth = any(num == 0 for num, _ in fractions)
    log_sum = 0.0
    for n, (num, den) in enumerate(fractions, start=1):
        if smooth and n >= 2:
            num, den = num + 1.0, den + 1.0
        if num == 0 or den == 0:
            return 0.0
        log_sum += math.log(num / den)
    geo = math.exp(log_sum / len(fractions))
    return _brevity_penalty(len(candidate), len(reference)) * geo


def ngram_bleu(candidate: str, reference: str, max_n: int = MAX_NGRAM) -> float:
    """Geometric mean of clipped 1..max_n-gram precisions with brevity penalty.

    Add-one smoothing applies to orders >= 2 only when some precision is zero.
    """
    del max_n  # fixed at module level; kept for call-site clarity
    return _bleu(_tokens(candidate), _tokens(reference), lambda gram: 1.0)


def weighted_ngram_bleu(candidate: str, reference: str,
                        keyword_set: frozenset[str] = JAVA_KEYWORDS,
                        keyword_weight: float = DEFAULT_KEYWORD_WEIGHT) -> float:
    """As ngram_bleu, but n-grams opening with a reserved word count extra."""
    def weight(gram: tuple[str, ...]) -> float:
        return keyword_weight if gram[0] in keyword_set else 1.0
    return _bleu(_tokens(candidate), _tokens(reference), weight)


def ast_match(candidate: str, reference: str) -> float:
    """Fraction of the reference's anonymized subtrees found in the candidate.

    Raises ParseFailure when either side cannot be parsed; codebleu() turns
    that into an n-gram fallback.
    """
    ref_counts = subtree_multiset(parse_snippet(reference))
    cand_counts = subtree_multiset(parse_snippet(candidate))
    return _multiset_ratio(ref_counts, cand_counts)


def dataflow_match(candidate: str, reference: str) -> float:
    """Matched def-use edges over total reference edges.

    Both sides empty scores 1.0 (straight-line code with no variable flow).
    """
    ref_edges = Counter(def_use_edges(parse_snippet(reference)))
    cand_edges = Counter(def_use_edges(parse_snippet(candidate)))
    return _multiset_ratio(ref_edges, cand_edges)


def _multiset_ratio(ref: Counter, cand: Counter) -> float:
    total = sum(ref.values())
    if total == 0:
        return 1.0 if sum(cand.values()) == 0 else 0.0
    matched = sum(min(count, cand.get(key, 0)) for key, count in ref.items())
    return matched / total


def codebleu(candidate: str, reference: str,
             weights: CodeBleuWeights = CodeBleuWeights()) -> CodeBleuScore:
    """Compute all four components and their weighted total."""
    ngram = ngram_bleu(candidate, reference)
    weighted = weighted_ngram_bleu(candidate, reference)
    flags: list[str] = []
    try:
        ast = ast_match(candidate, reference)
    except ParseFailure:
        ast = ngram
        flags.append("ast_fallback")
    try:
        dataflow = dataflow_match(candidate, reference)
    except ParseFailure:
        dataflow = ngram
        flags.append("dataflow_fallback")
    total = (weights.ngram * ngram + weights.weighted * weighted
             + weights.ast * ast + weights.dataflow * dataflow)
    return CodeBleuScore(ngram=ngram, weighted_ngram=weighted, ast_match=ast,
                         dataflow_match=dataflow, total=total, flags=flags)
