"""Chat-completion providers.

`ChatProvider.complete` owns the retry policy; subclasses only send one
request. Timeouts, connection failures, 429 and 5xx are transient and retried
with the configured backoff; any other non-200 status fails at once.
"""
import logging
import os
import threading
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Union

import requests

from config import ProviderConfig
from ir.errors import ProviderError

from .prompts import extract_example_model

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RawReply:
    status: Optional[int]
    text: str = ""
    usage: Dict[str, int] = field(default_factory=dict)
    error: str = ""


@dataclass(frozen=True)
class ProviderResponse:
    text: str
    attempts: int
    latency_seconds: float
    usage: Dict[str, int] = field(default_factory=dict)


def is_transient(status: Optional[int]) -> bool:
    return status is None or status == 429 or status >= 500


class ChatProvider(ABC):
    reports_latency = True

    def __init__(self, config: ProviderConfig, sleep: Callable[[float], None] = time.sleep):
        self.config = config
        self.sleep = sleep

    @abstractmethod
    def send(self, system: str, user: str) -> RawReply:
        """One request; status None means the request never got a response"""

    def complete(self, system: str, user: str) -> ProviderResponse:
        started = time.monotonic()
        reply = None
        for attempt in range(1, self.config.max_attempts + 1):
            reply = self.send(system, user)
            if reply.status == 200:
                latency = time.monotonic() - started if self.reports_latency else 0.0
                return ProviderResponse(reply.text, attempt, latency, dict(reply.usage))
            if not is_transient(reply.status):
                raise ProviderError(f"Request rejected: {reply.error or reply.text[:200]}", reply.status, attempt, False)
            if attempt < self.config.max_attempts:
                delay = self.config.backoff_for(attempt)
                logger.info("Transient provider failure (%s), retry %d in %.1fs", reply.status or reply.error, attempt, delay)
                self.sleep(delay)
        raise ProviderError(
            f"Giving up after {self.config.max_attempts} attempts: {reply.error or 'transient failure'}",
            reply.status, self.config.max_attempts, True,
        )


class HttpChatProvider(ChatProvider):
    """OpenAI-style chat-completions endpoint over HTTPS"""

    def __init__(self, config: ProviderConfig, session: Optional[requests.Session] = None, **kwargs):
        super().__init__(config, **kwargs)
        self.session = session or requests.Session()

    def _headers(self) -> Dict[str, str]:
        credential = os.environ.get(self.config.credential_env)
        if not credential:
            raise ProviderError(f"Environment variable {self.config.credential_env} is not set", None, 0, False)
        value = f"{self.config.auth_scheme} {credential}" if self.config.auth_scheme else credential
        return {self.config.auth_header: value, "Content-Type": "application/json"}

    def payload(self, system: str, user: str) -> dict:
        payload = {
            "model": self.config.model,
            "messages": [
                {"role": "system", "content": system},
                {"role": "user", "content": user},
            ],
            "temperature": self.config.temperature,
        }
        if self.config.structured_output:
            payload["response_format"] = {"type": "json_object"}
        if self.config.disable_reasoning:
            payload["reasoning"] = {"enabled": False}
        payload.update(self.config.extra_options)
        return payload

    def send(self, system: str, user: str) -> RawReply:
        try:
            response = self.session.post(
                self.config.endpoint,
                json=self.payload(system, user),
                headers=self._headers(),
                timeout=self.config.timeout_seconds,
            )
        except requests.exceptions.Timeout:
            return RawReply(None, error=f"timeout after {self.config.timeout_seconds}s")
        except requests.exceptions.ConnectionError as e:
            return RawReply(None, error=f"connection error: {e}")

        if response.status_code != 200:
            return RawReply(response.status_code, response.text, error=f"HTTP {response.status_code}")
        try:
            body = response.json()
            text = body["choices"][0]["message"]["content"] or ""
        except (ValueError, KeyError, IndexError, TypeError) as e:
            raise ProviderError(f"Unexpected response body: {e}", response.status_code, 1, False) from e
        usage = {key: value for key, value in (body.get("usage") or {}).items() if isinstance(value, int)}
        return RawReply(200, text, usage)


Responder = Callable[[str, str], str]


def echo_example_responder(system: str, user: str) -> str:
    """Answers with the example model embedded in the prompt"""
    return extract_example_model(user)


class StubProvider(ChatProvider):
    """Offline provider; `script` lists statuses to return before answering.

    Each script entry is an HTTP status (int) or None for a timeout; once the
    script is exhausted every request answers with `responder(system, user)`.
    """
    reports_latency = False

    def __init__(
        self,
        config: Optional[ProviderConfig] = None,
        responder: Union[Responder, str] = echo_example_responder,
        script: Sequence[Optional[int]] = (),
        **kwargs,
    ):
        kwargs.setdefault("sleep", lambda _: None)
        super().__init__(config or ProviderConfig(), **kwargs)
        self.responder = (lambda system, user: responder) if isinstance(responder, str) else responder
        self.script: List[Optional[int]] = list(script)
        self.calls = 0
        self._lock = threading.Lock()

    def send(self, system: str, user: str) -> RawReply:
        with self._lock:
            self.calls += 1
            status = self.script.pop(0) if self.script else 200
        if status != 200:
            return RawReply(status, error="scripted timeout" if status is None else f"scripted HTTP {status}")
        return RawReply(200, self.responder(system, user))


def request_generation(system: str, user: str, config: ProviderConfig, provider: Optional[ChatProvider] = None) -> ProviderResponse:
    provider = provider or HttpChatProvider(config)
    return provider.complete(system, user)
