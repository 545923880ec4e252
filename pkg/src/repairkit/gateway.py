"""Chat-completion gateway with content-addressed response caching.

Two provider kinds:

  * ``http``   — POSTs a chat-completion request, caching every response
                 under the request's digest before returning it.
  * ``replay`` — serves cached responses only and raises ReplayMiss on a
                 gap; it performs zero network operations by construction.

Cache entries are one UTF-8 JSON file per request digest, holding both the
request and the response so fixtures stay inspectable.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path


class GatewayError(Exception):
    pass


class TransportError(GatewayError):
    """Network failure or timeout after all retries."""


class ProviderError(GatewayError):
    """Non-2xx provider response."""

    def __init__(self, status: int, body: str):
        super().__init__(f"provider returned {status}: {body[:200]}")
        self.status = status
        self.body = body


class ReplayMiss(GatewayError):
    """Replay mode has no cached response for this request: a fixture gap."""


VALID_ROLES = ("system", "user", "assistant")


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str

    def __post_init__(self):
        if self.role not in VALID_ROLES:
            raise ValueError(f"invalid role {self.role!r}")
        if not self.content:
            raise ValueError("message content must be non-empty")


@dataclass(frozen=True)
class PromptRequest:
    messages: tuple[ChatMessage, ...]
    model_id: str
    temperature: float = 0.0
    max_tokens: int = 2048
    request_tag: str = ""  # pipeline stage label; metadata, not identity

    def __post_init__(self):
        if not self.messages:
            raise ValueError("at least one message required")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.max_tokens <= 0:
            raise ValueError("max_tokens must be positive")
        system_positions = [i for i, m in enumerate(self.messages) if m.role == "system"]
        if system_positions and system_positions != [0]:
            raise ValueError("a system message may only appear once, first")


@dataclass(frozen=True)
class GatewayConfig:
    provider_kind: str  # "http" | "replay"
    cache_dir: Path
    endpoint: str = ""
    api_key_env: str = ""
    timeout: float = 60.0
    max_retries: int = 2
    max_concurrency: int = 4

    def __post_init__(self):
        if self.provider_kind not in ("http", "replay"):
            raise ValueError(f"unknown provider kind {self.provider_kind!r}")
        if self.provider_kind == "http" and not self.endpoint:
            raise ValueError("http provider requires an endpoint")
        if self.provider_kind == "replay" and not Path(self.cache_dir).is_dir():
            raise ValueError(f"replay mode requires existing cache_dir {self.cache_dir}")


def replay_key(req: PromptRequest) -> str:
    """Stable 64-char hex digest of the request identity.

    request_tag is excluded; the float temperature is rendered at fixed
    precision so digests match across platforms.
    """
    canonical = json.dumps(
        {
            "messages": [[m.role, m.content] for m in req.messages],
            "model_id": req.model_id,
            "temperature": f"{req.temperature:.6f}",
            "max_tokens": req.max_tokens,
        },
        sort_keys=True,
        separators=(",", ":"),
        ensure_ascii=True,
    )
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _default_transport(endpoint: str, payload: dict, headers: dict,
                       timeout: float) -> tuple[int, str]:
    import requests

    try:
        resp = requests.post(endpoint, json=payload, headers=headers, timeout=timeout)
    except requests.RequestException as exc:
        raise TransportError(str(exc)) from exc
    return resp.status_code, resp.text


class Gateway:
    """Thread-safe gateway; cache writes are atomic (write-temp-then-rename)."""

    def __init__(self, cfg: GatewayConfig, transport=None):
        self.cfg = cfg
        self.transport = transport or _default_transport
        self._semaphore = threading.Semaphore(cfg.max_concurrency)

    def complete(self, req: PromptRequest) -> str:
        key = replay_key(req)
        cached = self._read_cache(key)
        if cached is not None:
            return cached
        if self.cfg.provider_kind == "replay":
            raise ReplayMiss(f"no cached response for {key} (tag={req.request_tag})")
        text = self._call_provider(req)
        self._write_cache(key, req, text)
        return text

    # -- cache ---------------------------------------------------------------
    def _cache_path(self, key: str) -> Path:
        return Path(self.cfg.cache_dir) / f"{key}.json"

    def _read_cache(self, key: str) -> str | None:
        path = self._cache_path(key)
        if not path.is_file():
            return None
        entry = json.loads(path.read_text(encoding="utf-8"))
        return entry["response"]

    def _write_cache(self, key: str, req: PromptRequest, response: str):
        path = self._cache_path(key)
        path.parent.mkdir(parents=True, exist_ok=True)
        entry = {
            "request": {
                "messages": [{"role": m.role, "content": m.content} for m in req.messages],
                "model_id": req.model_id,
                "temperature": req.temperature,
                "max_tokens": req.max_tokens,
                "request_tag": req.request_tag,
            },
            "response": response,
        }
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(entry, fh, ensure_ascii=False, indent=2, sort_keys=True)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    # -- network -------------------------------------------------------------
    def _call_provider(self, req: PromptRequest) -> str:
        payload = {
            "model": req.model_id,
            "messages": [{"role": m.role, "content": m.content} for m in req.messages],
            "temperature": req.temperature,
            "max_tokens": req.max_tokens,
        }
        headers = {"Content-Type": "application/json"}
        api_key = os.environ.get(self.cfg.api_key_env, "") if self.cfg.api_key_env else ""
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        last_error: Exception | None = None
        for attempt in range(self.cfg.max_retries + 1):
            try:
                with self._semaphore:
                    status, body = self.transport(
                        self.cfg.endpoint, payload, headers, self.cfg.timeout)
            except TransportError as exc:
                last_error = exc
                if attempt < self.cfg.max_retries:
                    time.sleep(min(2.0 ** attempt * 0.1, 2.0))
                continue
            if status // 100 != 2:
                raise ProviderError(status, body)
            return _extract_text(body)
        raise TransportError(f"all retries failed: {last_error}")


def _extract_text(body: str) -> str:
    """Pull the completion text out of a chat-completion style response."""
    data = json.loads(body)
    if isinstance(data, dict):
        choices = data.get("choices")
        if isinstance(choices, list) and choices:
            message = choices[0].get("message", {})
            if isinstance(message, dict) and "content" in message:
                return message["content"]
            if "text" in choices[0]:
                return choices[0]["text"]
        if "text" in data:
            return data["text"]
    raise ProviderError(200, f"unrecognized response shape: {body[:200]}")
