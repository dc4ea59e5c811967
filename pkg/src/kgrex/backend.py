"""Generation backends: a table-lookup stub and a remote HTTP client.

Wire protocol (JSON, UTF-8)::

    POST <endpoint>/generate
    {"inputs": [...], "decoding": {"strategy": "greedy" | "topk_nucleus",
                                   "top_k": ..., "top_p": ...,
                                   "max_new_tokens": ..., "seed": ...}}
    -> {"outputs": [...]}        # position-aligned with inputs

Greedy requests omit the sampling fields; ``seed`` is present only when
set.  The response must contain exactly one output per input.
"""

from __future__ import annotations

import json
import logging
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Protocol, Sequence

import requests

log = logging.getLogger(__name__)

STRATEGIES = ("greedy", "topk_nucleus")


class BackendError(RuntimeError):
    pass


class ProtocolError(BackendError):
    pass


@dataclass(frozen=True)
class DecodingConfig:
    strategy: str = "greedy"
    top_k: int = 20
    top_p: float = 0.95
    max_new_tokens: int = 128
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.strategy not in STRATEGIES:
            raise ValueError(f"strategy must be one of {STRATEGIES}")
        if not 0.0 < self.top_p <= 1.0:
            raise ValueError("top_p must lie in (0, 1]")
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")
        if self.max_new_tokens < 1:
            raise ValueError("max_new_tokens must be >= 1")

    def to_wire(self) -> dict:
        wire: dict = {"strategy": self.strategy, "max_new_tokens": self.max_new_tokens}
        if self.strategy == "topk_nucleus":
            wire["top_k"] = self.top_k
            wire["top_p"] = self.top_p
        if self.seed is not None:
            wire["seed"] = self.seed
        return wire


class GenerationBackend(Protocol):
    def generate(self, inputs: Sequence[str], config: DecodingConfig) -> list[str]:
        """Return one output per input, position-aligned."""


def stub_generate(inputs: Sequence[str], table: Mapping[str, str]) -> list[str]:
    """Exact table lookup; inputs missing from the table map to ''."""
    return [table.get(x, "") for x in inputs]


class StubBackend:
    """Deterministic lookup backend for tests and oracle pipeline runs."""

    def __init__(self, table: Mapping[str, str]):
        self.table = dict(table)

    @classmethod
    def from_model_inputs(cls, path: str | Path) -> "StubBackend":
        """Build the oracle table (templated input -> gold target) from a
        model-input JSONL file."""
        table = {}
        with open(path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, start=1):
                if not line.strip():
                    continue
                try:
                    row = json.loads(line)
                    table[row["input"]] = row["target"]
                except (KeyError, ValueError) as exc:
                    raise ValueError(f"{path}:{lineno}: malformed model-input row "
                                     f"({exc})") from None
        return cls(table)

    def generate(self, inputs: Sequence[str], config: DecodingConfig) -> list[str]:
        return stub_generate(inputs, self.table)


class RemoteBackend:
    """HTTP client for the generation service.

    Safe to call from multiple workers; a semaphore caps in-flight requests
    and there is no shared mutable state beyond the connection pool.
    Transport failures are retried with exponential backoff.
    """

    def __init__(self, endpoint: str, *, max_batch: int = 32, max_in_flight: int = 4,
                 timeout: float = 120.0, max_retries: int = 3, backoff: float = 0.5,
                 session: requests.Session | None = None):
        if max_batch < 1:
            raise ValueError("max_batch must be >= 1")
        self.endpoint = endpoint.rstrip("/")
        self.max_batch = max_batch
        self.timeout = timeout
        self.max_retries = max_retries
        self.backoff = backoff
        self._session = session or requests.Session()
        self._slots = threading.Semaphore(max_in_flight)

    def generate(self, inputs: Sequence[str], config: DecodingConfig) -> list[str]:
        outputs: list[str] = []
        for offset in range(0, len(inputs), self.max_batch):
            chunk = list(inputs[offset:offset + self.max_batch])
            outputs.extend(self._post(chunk, config))
        return outputs

    def _post(self, chunk: list[str], config: DecodingConfig) -> list[str]:
        body = {"inputs": chunk, "decoding": config.to_wire()}
        url = f"{self.endpoint}/generate"
        last_error: Exception | None = None
        for attempt in range(self.max_retries + 1):
            if attempt:
                time.sleep(self.backoff * (2 ** (attempt - 1)))
            with self._slots:
                try:
                    response = self._session.post(url, json=body, timeout=self.timeout)
                except requests.RequestException as exc:
                    last_error = exc
                    continue
            if response.status_code >= 500:
                last_error = BackendError(f"{url}: server error {response.status_code}")
                continue
            if response.status_code != 200:
                raise BackendError(f"{url}: HTTP {response.status_code}: {response.text[:200]}")
            try:
                outputs = response.json()["outputs"]
            except (ValueError, KeyError) as exc:
                raise ProtocolError(f"{url}: response is not {{'outputs': [...]}}: {exc}") from None
            if not isinstance(outputs, list) or len(outputs) != len(chunk):
                raise ProtocolError(
                    f"{url}: got {len(outputs) if isinstance(outputs, list) else '?'} "
                    f"outputs for {len(chunk)} inputs")
            return [str(o) for o in outputs]
        raise BackendError(f"giving up on {url} after {self.max_retries + 1} attempts: {last_error}")
