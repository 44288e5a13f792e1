"""Endpoint configuration for hosted chat/completion models."""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from pathlib import Path


class CredentialError(RuntimeError):
    """The configured credential environment variable is unset."""


@dataclass(frozen=True)
class EndpointConfig:
    base_url: str
    model: str
    temperature: float = 0.7
    top_logprobs: int = 10
    timeout: float = 60.0
    max_retries: int = 3
    retry_backoff: float = 0.5
    credential_env: str = "RULELAB_API_KEY"
    max_sets: int | None = None  # cap for short-context models
    rate_limit_per_s: float | None = None

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.top_logprobs < 1:
            raise ValueError("top_logprobs must be >= 1")

    def credential(self) -> str:
        value = os.environ.get(self.credential_env)
        if not value:
            raise CredentialError(
                f"credential environment variable {self.credential_env!r} is not set"
            )
        return value

    def cache_key(self) -> str:
        """Hash of the fields that determine a response, for cache addressing."""
        doc = {
            "base_url": self.base_url,
            "model": self.model,
            "temperature": self.temperature,
            "top_logprobs": self.top_logprobs,
        }
        return hashlib.sha256(json.dumps(doc, sort_keys=True).encode()).hexdigest()

    def public_fields(self) -> dict:
        """Everything except credentials, for embedding in transcripts."""
        return {
            "base_url": self.base_url,
            "model": self.model,
            "temperature": self.temperature,
            "top_logprobs": self.top_logprobs,
            "max_sets": self.max_sets,
        }


def load_endpoint_config(path: str | Path) -> EndpointConfig:
    doc = json.loads(Path(path).read_text())
    known = {
        "base_url",
        "model",
        "temperature",
        "top_logprobs",
        "timeout",
        "max_retries",
        "retry_backoff",
        "credential_env",
        "max_sets",
        "rate_limit_per_s",
    }
    unknown = set(doc) - known
    if unknown:
        raise ValueError(f"unknown endpoint config keys: {sorted(unknown)}")
    return EndpointConfig(**doc)
