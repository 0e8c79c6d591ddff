"""LLM backends: fixture-replay mock and an HTTP chat-completions client."""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from pathlib import Path

from ..errors import BackendError, MissingFixture

DEFAULT_LLM_MODEL = "meta-llama/Llama-3.1-8B-Instruct"


@dataclass(frozen=True)
class LlmCompletion:
    text: str
    backend_id: str
    token_logprobs: tuple[tuple[str, float], ...] | None = None

    def __post_init__(self):
        if self.token_logprobs is not None:
            for tok, lp in self.token_logprobs:
                if lp > 0:
                    raise ValueError(f"log-probability {lp} of token {tok!r} is positive")

    @property
    def logprob(self) -> float | None:
        if self.token_logprobs is None:
            return None
        return float(sum(lp for _, lp in self.token_logprobs))


def fixture_key(role: str, prompt: str) -> str:
    return hashlib.sha256(f"{role}\x1f{prompt}".encode("utf-8")).hexdigest()[:24]


def _completion_from_entry(entry, backend_id) -> LlmCompletion:
    if isinstance(entry, str):
        return LlmCompletion(entry, backend_id)
    lps = entry.get("token_logprobs")
    if lps is not None:
        lps = tuple((str(t), float(lp)) for t, lp in lps)
    return LlmCompletion(entry["text"], backend_id, lps)


class MockLLM:
    """Replays completions from a JSON file mapping fixture_key -> entry.

    An entry is either the completion text or an object with ``text`` and
    optional ``role`` / ``token_logprobs``.
    """

    backend_id = "mock-fixture"

    def __init__(self, fixtures=None):
        if fixtures is None:
            fixtures = {}
        elif not isinstance(fixtures, dict):
            path = Path(fixtures)
            try:
                fixtures = json.loads(path.read_text(encoding="utf-8"))
            except (OSError, ValueError) as exc:
                raise BackendError(f"cannot read LLM fixtures {path}: {exc}") from exc
        self.fixtures = fixtures

    def complete(self, prompt: str, role: str = "default") -> LlmCompletion:
        key = fixture_key(role, prompt)
        if key not in self.fixtures:
            raise MissingFixture(key, role)
        return _completion_from_entry(self.fixtures[key], self.backend_id)


class RemoteLLM:
    """OpenAI-style ``POST {base_url}/chat/completions`` client."""

    def __init__(self, base_url, model=DEFAULT_LLM_MODEL, api_key_env="TOXTRAJ_API_KEY",
                 timeout=60.0, temperature=0.0, transport=None):
        import httpx

        headers = {}
        key = os.environ.get(api_key_env)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        self.model = model
        self.temperature = temperature
        self.backend_id = f"remote:{model}"
        self._client = httpx.Client(base_url=base_url.rstrip("/"), headers=headers,
                                    timeout=timeout, transport=transport)

    def complete(self, prompt: str, role: str = "default") -> LlmCompletion:
        import httpx

        body = {
            "model": self.model,
            "messages": [
                {"role": "system", "content": f"You are the {role} agent."},
                {"role": "user", "content": prompt},
            ],
            "temperature": self.temperature,
            "logprobs": True,
        }
        try:
            resp = self._client.post("/chat/completions", json=body)
            resp.raise_for_status()
            choice = resp.json()["choices"][0]
            text = choice["message"]["content"]
        except httpx.HTTPStatusError as exc:
            raise BackendError(f"chat completion returned HTTP {exc.response.status_code}") from exc
        except (httpx.HTTPError, KeyError, IndexError, ValueError) as exc:
            raise BackendError(f"chat completion failed: {exc}") from exc
        lps = None
        content = (choice.get("logprobs") or {}).get("content")
        if content:
            lps = tuple((c["token"], min(float(c["logprob"]), 0.0)) for c in content)
        return LlmCompletion(text, self.backend_id, lps)


class FixtureRecorder:
    """Wraps a responder callable and records every call as a mock fixture."""

    backend_id = "recorder"

    def __init__(self, responder):
        self.responder = responder
        self.fixtures = {}

    def complete(self, prompt: str, role: str = "default") -> LlmCompletion:
        text = self.responder(prompt, role)
        self.fixtures[fixture_key(role, prompt)] = {"role": role, "text": text}
        return LlmCompletion(text, self.backend_id)

    def dump(self, path) -> None:
        Path(path).write_text(
            json.dumps(self.fixtures, indent=1, sort_keys=True, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )


def llm_call(prompt: str, backend, role: str = "default") -> LlmCompletion:
    if not prompt:
        raise ValueError("prompt must be non-empty")
    return backend.complete(prompt, role=role)
