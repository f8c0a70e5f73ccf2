"""Remote-service clients: rate limiting, retrying HTTP transport, mocks.

The LLM wire protocol is a single HTTP POST with JSON body
{model, messages: [{role, content}], max_tokens} answered by {content}.
The shape-judge protocol is identical except message content carries two
base64-encoded PNG attachments. API keys come from an environment
variable, never from config files.
"""

from __future__ import annotations

import base64
import hashlib
import os
import threading
import time
from collections import deque
from pathlib import Path
from typing import Callable, Optional, Protocol

from ..errors import LlmTransportError, RateLimitedError

JUDGE_QUESTION = "Do these two images represent the same 3D object?"

DEFAULT_API_KEY_ENV = "CADKIT_API_KEY"
MAX_TRANSPORT_RETRIES = 5


class LlmClient(Protocol):
    def complete(self, messages: list[dict], max_tokens: int = 2048) -> str: ...


class ShapeJudgeClient(Protocol):
    def compare(self, image_a_png: bytes, image_b_png: bytes, prompt: str = JUDGE_QUESTION) -> str: ...


class RateLimiter:
    """Sliding 60-second window over request and token budgets.

    Thread-safe; the clock and sleep hooks are injectable so tests can run
    on a fake timeline.
    """

    WINDOW = 60.0

    def __init__(
        self,
        requests_per_minute: int,
        tokens_per_minute: Optional[int] = None,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ):
        if requests_per_minute < 1:
            raise ValueError("requests_per_minute must be >= 1")
        self.requests_per_minute = requests_per_minute
        self.tokens_per_minute = tokens_per_minute
        self._clock = clock
        self._sleep = sleep
        self._events: deque[tuple[float, int]] = deque()
        self._lock = threading.Lock()

    def acquire(self, tokens: int = 0) -> None:
        """Block until issuing a request with `tokens` stays inside budget."""
        while True:
            with self._lock:
                now = self._clock()
                self._prune(now)
                over_requests = len(self._events) >= self.requests_per_minute
                over_tokens = (
                    self.tokens_per_minute is not None
                    and self._events
                    and sum(t for _, t in self._events) + tokens > self.tokens_per_minute
                )
                if not over_requests and not over_tokens:
                    self._events.append((now, tokens))
                    return
                wait = self._events[0][0] + self.WINDOW - now
            self._sleep(max(wait, 1e-3))

    def _prune(self, now: float) -> None:
        while self._events and self._events[0][0] <= now - self.WINDOW:
            self._events.popleft()


def http_post_json(url: str, payload: dict, headers: dict, timeout: float):
    """Default transport: (status_code, parsed JSON body)."""
    import requests

    response = requests.post(url, json=payload, headers=headers, timeout=timeout)
    try:
        body = response.json()
    except ValueError:
        body = {"error": response.text}
    return response.status_code, body


class HttpLlmClient:
    """Chat-completion client with backoff retries and optional rate limits."""

    def __init__(
        self,
        endpoint: str,
        model_name: str,
        api_key_env: str = DEFAULT_API_KEY_ENV,
        rate_limiter: Optional[RateLimiter] = None,
        timeout: float = 60.0,
        transport: Callable = http_post_json,
        sleep: Callable[[float], None] = time.sleep,
        token_estimator: Optional[Callable[[str], int]] = None,
    ):
        self.endpoint = endpoint
        self.model_name = model_name
        self.api_key_env = api_key_env
        self.rate_limiter = rate_limiter
        self.timeout = timeout
        self._transport = transport
        self._sleep = sleep
        self._token_estimator = token_estimator

    def _headers(self) -> dict:
        headers = {"Content-Type": "application/json"}
        key = os.environ.get(self.api_key_env)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        return headers

    def _estimate_tokens(self, messages: list[dict]) -> int:
        if self._token_estimator is None:
            return 0
        return sum(
            self._token_estimator(m["content"])
            for m in messages
            if isinstance(m.get("content"), str)
        )

    def complete(self, messages: list[dict], max_tokens: int = 2048) -> str:
        payload = {"model": self.model_name, "messages": messages, "max_tokens": max_tokens}
        last_error = "no attempt made"
        for attempt in range(MAX_TRANSPORT_RETRIES + 1):
            if self.rate_limiter is not None:
                self.rate_limiter.acquire(self._estimate_tokens(messages))
            try:
                status, body = self._transport(self.endpoint, payload, self._headers(), self.timeout)
            except OSError as exc:  # connection-level failure: transient
                last_error = str(exc)
                status, body = None, None
            if status is not None:
                if status == 200 and isinstance(body, dict) and "content" in body:
                    return body["content"]
                if status == 429:
                    retry_after = float((body or {}).get("retry_after", 2.0**attempt))
                    if attempt == MAX_TRANSPORT_RETRIES:
                        raise RateLimitedError(retry_after)
                    self._sleep(retry_after)
                    continue
                if 400 <= status < 500:
                    raise LlmTransportError(
                        f"LLM endpoint rejected request ({status}): {body}"
                    )
                last_error = f"status {status}: {body}"
            if attempt == MAX_TRANSPORT_RETRIES:
                break
            self._sleep(min(0.5 * 2.0**attempt, 30.0))
        raise LlmTransportError(
            f"LLM endpoint unreachable after {MAX_TRANSPORT_RETRIES + 1} attempts: {last_error}"
        )


class HttpShapeJudgeClient(HttpLlmClient):
    """Judge variant: two PNG attachments plus the comparison question."""

    def compare(self, image_a_png: bytes, image_b_png: bytes, prompt: str = JUDGE_QUESTION) -> str:
        content = [
            {"type": "text", "text": prompt},
            {"type": "image", "media_type": "image/png",
             "data": base64.b64encode(image_a_png).decode()},
            {"type": "image", "media_type": "image/png",
             "data": base64.b64encode(image_b_png).decode()},
        ]
        return self.complete([{"role": "user", "content": content}])


def scripted_response_key(user_message: str) -> str:
    return hashlib.sha1(user_message.encode()).hexdigest()[:16]


class DirectoryMockTransport:
    """Offline transport reading scripted responses from a directory.

    The response for a request is <sha1[:16] of the last user message>.txt,
    falling back to default.txt. Missing files surface as HTTP 404.
    """

    def __init__(self, directory):
        self.directory = Path(directory)
        self.requests: list[dict] = []

    def __call__(self, url: str, payload: dict, headers: dict, timeout: float):
        self.requests.append(payload)
        last_user = ""
        for message in payload.get("messages", []):
            if message.get("role") == "user" and isinstance(message.get("content"), str):
                last_user = message["content"]
        path = self.directory / f"{scripted_response_key(last_user)}.txt"
        if not path.exists():
            path = self.directory / "default.txt"
        if not path.exists():
            return 404, {"error": "no scripted response"}
        return 200, {"content": path.read_text()}

    def add_response(self, user_message: str, response_text: str) -> Path:
        self.directory.mkdir(parents=True, exist_ok=True)
        path = self.directory / f"{scripted_response_key(user_message)}.txt"
        path.write_text(response_text)
        return path
