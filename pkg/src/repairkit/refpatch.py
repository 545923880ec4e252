"""Reference-patch generation for a masked defective span.

Providers are pluggable: a remote infill model behind a tiny HTTP contract,
or the built-in deterministic retrieval provider that fills from the most
similar masked-corpus record. A missing reference is a normal outcome, not
an error; the pipeline proceeds without feedback.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass

from .codebleu import ngram_bleu
from .corpus import MASK_SENTINEL, MaskedSample

log = logging.getLogger(__name__)


class SpanOutOfRange(Exception):
    pass


class EmptyCorpus(Exception):
    pass


@dataclass(frozen=True)
class MaskedQuery:
    function_text_masked: str
    defective_span: tuple[int, int]  # 1-based inclusive lines of the original
    task_id: str = ""


@dataclass(frozen=True)
class ReferencePatch:
    text: str
    provider_id: str  # remote_model | retrieval
    score: float


def mask_defective_span(function_text: str, span: tuple[int, int],
                        task_id: str = "") -> MaskedQuery:
    """Replace the span's lines with a single sentinel line."""
    lines = function_text.split("\n")
    start, end = span
    if not (1 <= start <= end <= len(lines)):
        raise SpanOutOfRange(f"span {span} invalid for {len(lines)}-line function")
    indent = lines[start - 1][:len(lines[start - 1]) - len(lines[start - 1].lstrip())]
    masked = [*lines[:start - 1], indent + MASK_SENTINEL, *lines[end:]]
    return MaskedQuery(function_text_masked="\n".join(masked),
                       defective_span=span, task_id=task_id)


def unmask(query: MaskedQuery, original_span_text: str) -> str:
    """Inverse of mask_defective_span, for round-trip checks."""
    lines = query.function_text_masked.split("\n")
    idx = next(i for i, ln in enumerate(lines) if ln.strip() == MASK_SENTINEL)
    return "\n".join([*lines[:idx], *original_span_text.split("\n"), *lines[idx + 1:]])


class RetrievalProvider:
    """Deterministic infill from the masked corpus.

    Returns the target text of the record whose masked context is most
    similar to the query (token 4-gram overlap); ties break to the
    lexicographically smallest method_id.
    """

    provider_id = "retrieval"

    def __init__(self, corpus: list[MaskedSample]):
        self.corpus = corpus

    def infill(self, query: MaskedQuery) -> ReferencePatch:
        if not self.corpus:
            raise EmptyCorpus("retrieval corpus has no records")
        best: tuple[float, str] | None = None  # (-score, method_id)
        best_record: MaskedSample | None = None
        for record in self.corpus:
            score = ngram_bleu(query.function_text_masked, record.masked_text)
            key = (-score, record.method_id)
            if best is None or key < best:
                best = key
                best_record = record
        assert best is not None and best_record is not None
        return ReferencePatch(text=best_record.target_text,
                              provider_id=self.provider_id, score=-best[0])


class RemoteProvider:
    """HTTP infill endpoint: POST {masked_text} -> {fill_text}."""

    provider_id = "remote_model"

    def __init__(self, endpoint: str, timeout: float = 10.0, retries: int = 1,
                 transport=None):
        self.endpoint = endpoint
        self.timeout = timeout
        self.retries = retries
        self.transport = transport or self._post

    def _post(self, endpoint: str, payload: dict, timeout: float) -> tuple[int, str]:
        import requests
        resp = requests.post(endpoint, json=payload, timeout=timeout)
        return resp.status_code, resp.text

    def infill(self, query: MaskedQuery) -> ReferencePatch:
        payload = {"masked_text": query.function_text_masked}
        last: Exception | None = None
        for _ in range(self.retries + 1):
            try:
                status, body = self.transport(self.endpoint, payload, self.timeout)
            except Exception as exc:  # noqa: BLE001 - provider errors degrade to none upstream
                last = exc
                continue
            if status != 200:
                last = RuntimeError(f"infill endpoint returned {status}")
                continue
            fill = json.loads(body).get("fill_text", "")
            if not fill:
                raise ValueError("provider declined (empty fill)")
            return ReferencePatch(text=fill, provider_id=self.provider_id, score=1.0)
        raise RuntimeError(f"remote infill failed: {last}")


def generate_reference(query: MaskedQuery, provider) -> ReferencePatch | None:
    """Value-or-none: provider failures are logged, never raised."""
    if provider is None:
        return None
    try:
        return provider.infill(query)
    except Exception as exc:  # noqa: BLE001 - contract: degrade, don't fail the task
        log.warning("reference provider unavailable for %s: %s", query.task_id, exc)
        return None
