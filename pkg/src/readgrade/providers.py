"""Text-generation, log-probability and embedding providers.

The core never talks to a network directly. Anything that needs a model goes
through one of the small protocols below; :class:`MockProvider` and
:class:`HashedBowEmbedder` make every code path runnable offline.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import os
import random
import re
import threading
import time
import urllib.error
import urllib.request
from typing import Callable, Protocol, Sequence

from .errors import ConfigError, ProviderError
from .textstats import tokenize_words

log = logging.getLogger(__name__)

__all__ = [
    "TextProvider",
    "LogprobProvider",
    "Embedder",
    "TokenBucket",
    "RetryingProvider",
    "MockProvider",
    "OpenAIChatProvider",
    "HashedBowEmbedder",
    "FunctionEmbedder",
    "provider_from_config",
]


class TextProvider(Protocol):
    def complete(self, prompt: str) -> str: ...


class LogprobProvider(Protocol):
    def token_logprobs(self, text: str) -> Sequence[float]:
        """Natural-log probability of each token of ``text`` given its prefix."""
        ...


class Embedder(Protocol):
    def embed(self, texts: Sequence[str]) -> list[list[float]]: ...


class TokenBucket:
    """Blocking rate limiter: ``rate`` tokens per second, bursts up to ``capacity``."""

    def __init__(
        self,
        rate: float,
        capacity: float | None = None,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ) -> None:
        if rate <= 0:
            raise ConfigError("rate must be positive")
        self.rate = rate
        self.capacity = capacity if capacity is not None else max(1.0, rate)
        self._tokens = self.capacity
        self._clock = clock
        self._sleep = sleep
        self._last = clock()
        self._lock = threading.Lock()

    def acquire(self) -> None:
        with self._lock:
            while True:
                now = self._clock()
                self._tokens = min(self.capacity, self._tokens + (now - self._last) * self.rate)
                self._last = now
                if self._tokens >= 1:
                    self._tokens -= 1
                    return
                self._sleep((1 - self._tokens) / self.rate)


class RetryingProvider:
    """Wraps a provider with retries, exponential backoff and optional rate limiting."""

    def __init__(
        self,
        inner: TextProvider,
        attempts: int = 3,
        base_delay: float = 1.0,
        limiter: TokenBucket | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ) -> None:
        if attempts < 1:
            raise ConfigError("attempts must be >= 1")
        self.inner = inner
        self.attempts = attempts
        self.base_delay = base_delay
        self.limiter = limiter
        self._sleep = sleep

    def complete(self, prompt: str) -> str:
        last: Exception | None = None
        for attempt in range(self.attempts):
            if attempt:
                self._sleep(self.base_delay * 2 ** (attempt - 1))
            if self.limiter is not None:
                self.limiter.acquire()
            try:
                return self.inner.complete(prompt)
            except (ProviderError, OSError) as exc:
                last = exc
                log.warning("provider attempt %d/%d failed: %s", attempt + 1, self.attempts, exc)
        raise ProviderError(f"gave up after {self.attempts} attempts: {last}")


_CAP_RE = re.compile(r"maximum of (\d+) words per sentence")


class MockProvider:
    """Deterministic offline provider.

    The reply depends only on the seed and the prompt. When the prompt carries
    a grade phrase and a sentence-length cap, the reply is synthetic text
    aimed at that band, so classification downstream behaves sensibly.
    """

    def __init__(self, seed: int = 0, sentences: int = 6) -> None:
        self.seed = seed
        self.sentences = sentences

    def _rng(self, prompt: str) -> random.Random:
        digest = hashlib.sha256(f"{self.seed}\x00{prompt}".encode()).digest()
        return random.Random(int.from_bytes(digest[:8], "big"))

    def complete(self, prompt: str) -> str:
        from .prompts import band_for_prompt
        from .synthetic import synthetic_text

        rng = self._rng(prompt)
        band = band_for_prompt(prompt)
        m = _CAP_RE.search(prompt)
        cap = int(m.group(1)) if m else None
        return synthetic_text(band or 3, rng, sentences=self.sentences, max_words=cap)


class OpenAIChatProvider:
    """Minimal client for an OpenAI-compatible ``/chat/completions`` endpoint."""

    def __init__(self, model: str, api_key: str, base_url: str = "https://api.openai.com/v1", timeout: float = 60.0, temperature: float = 0.7) -> None:
        if not model:
            raise ConfigError("provider model is not set")
        if not api_key:
            raise ConfigError("provider API key is not set")
        self.model = model
        self.api_key = api_key
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self.temperature = temperature

    @classmethod
    def from_env(cls, env: dict[str, str] | None = None, **overrides: object) -> "OpenAIChatProvider":
        """Read READGRADE_API_KEY, READGRADE_MODEL and READGRADE_API_BASE."""
        env = os.environ if env is None else env
        settings = {
            "api_key": env.get("READGRADE_API_KEY", ""),
            "model": env.get("READGRADE_MODEL", ""),
            "base_url": env.get("READGRADE_API_BASE", "https://api.openai.com/v1"),
        }
        settings.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**settings)  # type: ignore[arg-type]

    def complete(self, prompt: str) -> str:
        body = json.dumps(
            {
                "model": self.model,
                "messages": [{"role": "user", "content": prompt}],
                "temperature": self.temperature,
            }
        ).encode()
        req = urllib.request.Request(
            f"{self.base_url}/chat/completions",
            data=body,
            headers={"Authorization": f"Bearer {self.api_key}", "Content-Type": "application/json"},
        )
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                payload = json.load(resp)
        except (urllib.error.URLError, TimeoutError, json.JSONDecodeError) as exc:
            raise ProviderError(str(exc)) from exc
        try:
            return payload["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise ProviderError(f"unexpected response shape: {exc}") from exc


def provider_from_config(name: str, seed: int = 0, settings: dict | None = None) -> TextProvider:
    """Build the named provider ("mock" or "openai") wrapped in retry and rate limiting."""
    settings = dict(settings or {})
    if name == "mock":
        return MockProvider(seed=seed)
    if name == "openai":
        inner = OpenAIChatProvider.from_env(
            model=settings.get("model"), base_url=settings.get("base_url")
        )
        rate = float(settings.get("requests_per_second", 2.0))
        return RetryingProvider(inner, attempts=int(settings.get("attempts", 3)), limiter=TokenBucket(rate))
    raise ConfigError(f"unknown provider {name!r}")


class HashedBowEmbedder:
    """Hashed bag-of-words term frequencies, L2-normalised.

    Hashing uses blake2b so vectors are stable across processes and runs.
    """

    def __init__(self, dim: int = 512) -> None:
        if dim < 1:
            raise ConfigError("dim must be >= 1")
        self.dim = dim

    def _vector(self, text: str) -> list[float]:
        vec = [0.0] * self.dim
        for tok in tokenize_words(text):
            h = hashlib.blake2b(tok.lower().encode(), digest_size=8).digest()
            vec[int.from_bytes(h, "big") % self.dim] += 1.0
        norm = math.sqrt(sum(v * v for v in vec))
        return [v / norm for v in vec] if norm else vec

    def embed(self, texts: Sequence[str]) -> list[list[float]]:
        return [self._vector(t) for t in texts]


class FunctionEmbedder:
    """Adapts a one-text-to-one-vector function to the :class:`Embedder` protocol."""

    def __init__(self, fn: Callable[[str], Sequence[float]]) -> None:
        self.fn = fn

    def embed(self, texts: Sequence[str]) -> list[list[float]]:
        return [[float(x) for x in self.fn(t)] for t in texts]
