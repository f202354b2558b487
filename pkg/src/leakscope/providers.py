"""Intention providers and the inference entry point.

Three interchangeable providers produce answer text in the canonical
pattern format: a remote chat-completion model, a deterministic rule table,
and a canned-fixture table for tests.  Downstream analysis depends only on
the parsed :class:`IntentionSet`, never on which provider produced it.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import threading
import time
import uuid
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

import requests

from .errors import FixtureLookupError, ProviderError, ProviderTransportError
from .intentions import Intention, IntentionKind, IntentionSet, parse_answer, render_answer
from .javasrc import (
    IfStmt,
    MethodSnippet,
    SimpleStmt,
    iter_statements,
)
from .prompting import TEMPLATE_ID, render_prompt, request_for

log = logging.getLogger(__name__)

API_KEY_ENV = "LEAKSCOPE_API_KEY"
DEFAULT_ENDPOINT = "https://api.openai.com/v1/chat/completions"

PROVIDER_KINDS = ("remote-chat", "rule-based", "fixture")


@dataclass
class ProviderConfig:
    kind: str = "rule-based"
    endpoint: str = DEFAULT_ENDPOINT
    model: str = "gpt-4"
    temperature: float = 0.0
    timeout: float = 60.0
    max_retries: int = 3
    cache_dir: str | Path | None = None
    fixture_file: str | Path | None = None
    rate_limit_per_minute: int | None = None
    retry_base_delay: float = 1.0
    api_key_env: str = API_KEY_ENV

    def __post_init__(self):
        if self.kind not in PROVIDER_KINDS:
            raise ValueError(f"unknown provider kind {self.kind!r}")
        if self.kind == "remote-chat" and self.temperature != 0.0:
            raise ValueError("the remote provider runs at temperature 0")


def snippet_hash(snippet: MethodSnippet) -> str:
    digest = hashlib.sha256(f"{snippet.first_line}\n{snippet.source}".encode()).hexdigest()
    return digest


class _RateLimiter:
    """Global requests-per-minute throttle shared by all remote providers."""

    def __init__(self):
        self._lock = threading.Lock()
        self._sent: deque[float] = deque()

    def wait(self, per_minute: int):
        while True:
            with self._lock:
                now = time.monotonic()
                while self._sent and now - self._sent[0] > 60.0:
                    self._sent.popleft()
                if len(self._sent) < per_minute:
                    self._sent.append(now)
                    return
                delay = 60.0 - (now - self._sent[0])
            time.sleep(max(delay, 0.05))


_RATE_LIMITER = _RateLimiter()


class RemoteChatProvider:
    """Generic chat-completion HTTP client with retries and backoff."""

    def __init__(self, config: ProviderConfig):
        self.config = config

    def answer(self, snippet: MethodSnippet, prompt: str, request_id: str) -> str:
        cfg = self.config
        api_key = os.environ.get(cfg.api_key_env)
        if not api_key:
            raise ProviderError(
                f"no API credential found in ${cfg.api_key_env}", request_id=request_id
            )
        payload = {
            "model": cfg.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": cfg.temperature,
        }
        headers = {"Authorization": f"Bearer {api_key}"}
        last_error: Exception | None = None
        for attempt in range(cfg.max_retries):
            if cfg.rate_limit_per_minute:
                _RATE_LIMITER.wait(cfg.rate_limit_per_minute)
            try:
                resp = requests.post(
                    cfg.endpoint, json=payload, headers=headers, timeout=cfg.timeout
                )
                if resp.status_code == 200:
                    return resp.json()["choices"][0]["message"]["content"]
                last_error = ProviderError(
                    f"provider returned HTTP {resp.status_code}", request_id=request_id
                )
            except requests.RequestException as exc:
                last_error = exc
            if attempt + 1 < cfg.max_retries:
                time.sleep(cfg.retry_base_delay * (2**attempt))
        raise ProviderTransportError(
            f"provider unreachable after {cfg.max_retries} attempts"
            f" (request {request_id}): {last_error}",
            request_id=request_id,
        )


class FixtureProvider:
    """Canned answers keyed by snippet hash, method name, or ``default``."""

    def __init__(self, table: dict[str, str] | None = None, path: str | Path | None = None):
        if table is None:
            if path is None:
                raise ValueError("fixture provider needs a table or a file")
            table = json.loads(Path(path).read_text())
        self.table = dict(table)

    def answer(self, snippet: MethodSnippet, prompt: str, request_id: str) -> str:
        for key in (snippet_hash(snippet), snippet.method_name, "default"):
            if key in self.table:
                return self.table[key]
        raise FixtureLookupError(
            f"no fixture answer for method {snippet.method_name!r}", request_id=request_id
        )


# ---------------------------------------------------------------------------
# Rule-based provider


@dataclass(frozen=True)
class KnowledgeTable:
    """Syntactic patterns mapping code shapes to intentions."""

    acquire_type_suffixes: tuple[str, ...]
    acquire_factory_methods: tuple[str, ...]
    acquire_instance_methods: tuple[str, ...]
    release_methods: tuple[str, ...]
    release_helper_methods: tuple[str, ...]
    validate_methods: tuple[str, ...]


DEFAULT_KNOWLEDGE_TABLE = KnowledgeTable(
    acquire_type_suffixes=(
        "Stream", "Reader", "Writer", "Socket", "Connection", "Client",
        "Cursor", "Channel", "Statement", "ResultSet", "Scanner",
        "RandomAccessFile", "ZipFile", "JarFile",
    ),
    acquire_factory_methods=(
        "newInstance", "open", "openConnection", "openStream", "connect",
        "accept", "rawQuery", "query", "getWritableDatabase", "getReadableDatabase",
    ),
    acquire_instance_methods=("lock", "lockInterruptibly", "acquire", "acquireUninterruptibly"),
    release_methods=("close", "unlock", "release", "disconnect", "shutdown", "recycle"),
    release_helper_methods=("closeQuietly",),
    validate_methods=(
        "isClosed", "isOpen", "isValid", "isConnected", "isActive",
        "isDisabled", "isShutdown", "isTerminated", "isLocked",
    ),
)

_ASSIGN_RE = re.compile(
    r"^(?:final\s+)?(?:[\w$][\w$.<>\[\],\s]*\s+)?([\w$]+(?:\.[\w$]+)*)\s*=\s*(.+)$",
    re.DOTALL,
)
_CALL_RE = re.compile(r"^((?:[\w$]+\s*\.\s*)*[\w$]+)\s*\.\s*([\w$]+)\s*\(")
_NEW_RE = re.compile(r"\bnew\s+(?:[\w$]+\s*\.\s*)*([\w$]+)\s*[(<]")
_FACTORY_RE = re.compile(r"\.\s*([\w$]+)\s*\(")
_NULL_CHECK_RE = re.compile(r"(?:\bnull\s*[!=]=\s*([\w$.]+)|([\w$.]+)\s*[!=]=\s*null)")
_HELPER_RE = re.compile(r"\b([\w$]+)\s*\(\s*([\w$.]+)\s*\)")


def rule_based_infer(
    snippet: MethodSnippet, table: KnowledgeTable = DEFAULT_KNOWLEDGE_TABLE
) -> IntentionSet:
    """Infer intentions by syntactic pattern matching over the parse tree.

    Deterministic and offline; the default table covers common stream,
    lock, and connection idioms plus null-check reachability validation.
    """
    found: list[Intention] = []
    for stmt in iter_statements(snippet.body):
        if isinstance(stmt, IfStmt):
            found.extend(_match_condition(stmt.cond_text, stmt.cond_start, table))
        elif isinstance(stmt, SimpleStmt):
            found.extend(_match_statement(stmt.text, stmt.start, table))
    for res in _resource_decls(snippet):
        found.extend(_match_statement(res.text, res.line, table))
    return IntentionSet(found)


def _resource_decls(snippet: MethodSnippet):
    from .javasrc import TryStmt

    for stmt in iter_statements(snippet.body):
        if isinstance(stmt, TryStmt):
            yield from stmt.resources


def _match_statement(text: str, line: int, table: KnowledgeTable) -> list[Intention]:
    text = text.strip().rstrip(";").strip()
    out: list[Intention] = []
    assign = _ASSIGN_RE.match(text)
    if assign:
        lhs, rhs = assign.group(1), assign.group(2)
        new_match = _NEW_RE.search(rhs)
        if new_match and new_match.group(1).endswith(tuple(table.acquire_type_suffixes)):
            out.append(Intention(IntentionKind.ACQUIRE, lhs, line, rhs.strip()))
        else:
            factory = _FACTORY_RE.search(rhs)
            if factory and factory.group(1) in table.acquire_factory_methods:
                out.append(Intention(IntentionKind.ACQUIRE, lhs, line, rhs.strip()))
        return out
    call = _CALL_RE.match(text)
    if call:
        receiver = call.group(1).replace(" ", "")
        method = call.group(2)
        if method in table.release_helper_methods:
            helper = _HELPER_RE.search(text)
            if helper:
                out.append(Intention(IntentionKind.RELEASE, helper.group(2), line, text))
            return out
        if method in table.release_methods:
            out.append(Intention(IntentionKind.RELEASE, receiver, line, text))
        elif method in table.acquire_instance_methods:
            out.append(Intention(IntentionKind.ACQUIRE, receiver, line, text))
    return out


def _match_condition(cond: str, line: int, table: KnowledgeTable) -> list[Intention]:
    out = []
    for m in _NULL_CHECK_RE.finditer(cond):
        var = m.group(1) or m.group(2)
        out.append(Intention(IntentionKind.VALIDATE, var, line, cond.strip()))
    for m in re.finditer(r"([\w$.]+)\.([\w$]+)\s*\(", cond):
        if m.group(2) in table.validate_methods:
            out.append(Intention(IntentionKind.VALIDATE, m.group(1), line, cond.strip()))
    return out


class RuleBasedProvider:
    def __init__(self, table: KnowledgeTable = DEFAULT_KNOWLEDGE_TABLE):
        self.table = table

    def answer(self, snippet: MethodSnippet, prompt: str, request_id: str) -> str:
        return render_answer(rule_based_infer(snippet, self.table))


def make_provider(config: ProviderConfig):
    if config.kind == "remote-chat":
        return RemoteChatProvider(config)
    if config.kind == "fixture":
        return FixtureProvider(path=config.fixture_file)
    return RuleBasedProvider()


# ---------------------------------------------------------------------------
# Cached inference


def _cache_key(config: ProviderConfig, snippet: MethodSnippet) -> str:
    raw = "\0".join((TEMPLATE_ID, snippet_hash(snippet), config.model))
    return hashlib.sha256(raw.encode()).hexdigest()


def infer(
    snippet: MethodSnippet,
    config: ProviderConfig,
    provider=None,
) -> IntentionSet:
    """Render the prompt, obtain an answer, and parse it into intentions.

    Answers are cached under ``config.cache_dir`` keyed by template, snippet
    hash, and model; a warm cache never contacts the provider.  An empty
    parsed set is a valid result, not an error.
    """
    cache_file = None
    if config.cache_dir is not None:
        cache_file = Path(config.cache_dir) / f"{_cache_key(config, snippet)}.txt"
        if cache_file.exists():
            return parse_answer(cache_file.read_text())
    if provider is None:
        provider = make_provider(config)
    request_id = uuid.uuid4().hex
    prompt = render_prompt(request_for(snippet))
    answer = provider.answer(snippet, prompt, request_id)
    if cache_file is not None:
        cache_file.parent.mkdir(parents=True, exist_ok=True)
        tmp = cache_file.with_suffix(f".{request_id}.tmp")
        tmp.write_text(answer)
        os.replace(tmp, cache_file)  # concurrent writers: last write wins
    return parse_answer(answer)
