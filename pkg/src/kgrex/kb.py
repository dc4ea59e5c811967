"""Resolve KB entity identifiers to type labels, with caching.

A snapshot is a JSON-Lines file, one entity per line::

    {"kb_id": "Q23991129", "label": "Peter Parker",
     "instance_of": ["fictional human"], "subclass_of": []}

Entities can also be fetched from a remote endpoint speaking
``GET <endpoint>/entity/<kb_id>`` returning the same JSON object; fetched
entries are cached to a local snapshot file so repeat runs stay offline.

Type disambiguation: when an entity carries several candidate type labels,
the one with the highest frequency over the training split wins.  Equal
frequencies (including all-zero) are broken lexicographically on the label,
which keeps resolution deterministic and auditable.
"""

from __future__ import annotations

import json
import logging
import time
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Mapping, Sequence

import requests

from .ingest import ELFile, LinkedMention

log = logging.getLogger(__name__)


class TypeProperty(Enum):
    """Which KB property supplies the type label; nominal-entity corpora
    (SemEval-style) use SUBCLASS_OF, the rest use INSTANCE_OF."""

    INSTANCE_OF = "instance_of"
    SUBCLASS_OF = "subclass_of"

    @classmethod
    def parse(cls, value: str) -> "TypeProperty":
        try:
            return cls(value.lower())
        except ValueError:
            raise ValueError(f"unknown type property {value!r}") from None


@dataclass(frozen=True)
class KBEntry:
    kb_id: str
    label: str
    instance_of: tuple[str, ...] = ()
    subclass_of: tuple[str, ...] = ()

    def candidates(self, prop: TypeProperty) -> tuple[str, ...]:
        return self.instance_of if prop is TypeProperty.INSTANCE_OF else self.subclass_of


KBSnapshot = dict[str, KBEntry]


def load_snapshot(path: str | Path) -> KBSnapshot:
    snapshot: KBSnapshot = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
                entry = KBEntry(kb_id=raw["kb_id"], label=raw.get("label", raw["kb_id"]),
                                instance_of=tuple(raw.get("instance_of", ())),
                                subclass_of=tuple(raw.get("subclass_of", ())))
            except (KeyError, ValueError, TypeError) as exc:
                raise ValueError(f"{path}:{lineno}: malformed snapshot entry: {exc}") from None
            snapshot[entry.kb_id] = entry
    return snapshot


def save_snapshot(snapshot: KBSnapshot, path: str | Path) -> None:
    """Write entries sorted by kb_id so rewrites are byte-identical."""
    with open(path, "w", encoding="utf-8") as f:
        for kb_id in sorted(snapshot):
            entry = snapshot[kb_id]
            f.write(json.dumps({"kb_id": entry.kb_id, "label": entry.label,
                                "instance_of": list(entry.instance_of),
                                "subclass_of": list(entry.subclass_of)},
                               ensure_ascii=False, separators=(",", ":")) + "\n")


@dataclass(frozen=True)
class GroundedFact:
    """One external fact: a linked mention together with its resolved type
    label and the KB entity label."""

    mention: LinkedMention
    type_label: str
    kb_label: str


GroundedKnowledge = dict[str, list[GroundedFact]]


@dataclass
class GroundingDiagnostics:
    mentions: int = 0
    grounded: int = 0
    dropped_missing_entity: int = 0
    dropped_untyped: int = 0

    def to_dict(self) -> dict:
        return {"mentions": self.mentions, "grounded": self.grounded,
                "dropped_missing_entity": self.dropped_missing_entity,
                "dropped_untyped": self.dropped_untyped}


def build_type_frequency(train_el: ELFile, snapshot: KBSnapshot,
                         prop: TypeProperty) -> Counter[str]:
    """Count candidate type labels over every linked mention of the training
    split; a mention contributes one count per candidate label.  Entities
    missing from the snapshot contribute nothing."""
    freq: Counter[str] = Counter()
    for mentions in train_el.values():
        for mention in mentions:
            entry = snapshot.get(mention.kb_id)
            if entry is None:
                continue
            freq.update(entry.candidates(prop))
    return freq


def resolve_types(el: ELFile, snapshot: KBSnapshot, prop: TypeProperty,
                  freq: Mapping[str, int]) -> tuple[GroundedKnowledge, GroundingDiagnostics]:
    """Assign each linked mention exactly one type label.

    The winning label is the candidate with the highest training frequency;
    ties, and candidates unseen in training, fall back to lexicographic
    order.  Mentions whose entity is missing from the snapshot or has no
    candidate types are dropped and counted in the diagnostics.
    """
    knowledge: GroundedKnowledge = {}
    diag = GroundingDiagnostics()
    for example_id, mentions in el.items():
        facts = []
        for mention in mentions:
            diag.mentions += 1
            entry = snapshot.get(mention.kb_id)
            if entry is None:
                diag.dropped_missing_entity += 1
                continue
            candidates = entry.candidates(prop)
            if not candidates:
                diag.dropped_untyped += 1
                continue
            winner = min(candidates, key=lambda label: (-freq.get(label, 0), label))
            facts.append(GroundedFact(mention=mention, type_label=winner,
                                      kb_label=entry.label))
            diag.grounded += 1
        if facts:
            knowledge[example_id] = facts
    return knowledge, diag


# ---------------------------------------------------------------------------
# Grounded-knowledge JSONL IO ({example_id, facts: [...]})


def write_grounded(knowledge: GroundedKnowledge, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for example_id, facts in knowledge.items():
            row = {"example_id": example_id, "facts": [
                {"surface": g.mention.surface, "start": g.mention.start,
                 "end": g.mention.end, "kb_id": g.mention.kb_id,
                 "score": g.mention.score, "type": g.type_label, "label": g.kb_label}
                for g in facts]}
            f.write(json.dumps(row, ensure_ascii=False, separators=(",", ":")) + "\n")


def read_grounded(path: str | Path) -> GroundedKnowledge:
    knowledge: GroundedKnowledge = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
                facts = [GroundedFact(
                    mention=LinkedMention(surface=g["surface"], start=g["start"],
                                          end=g["end"], kb_id=g["kb_id"],
                                          score=g["score"]),
                    type_label=g["type"], kb_label=g["label"])
                    for g in raw["facts"]]
                knowledge[raw["example_id"]] = facts
            except (KeyError, ValueError, TypeError) as exc:
                raise ValueError(f"{path}:{lineno}: malformed grounded entry: {exc}") from None
    return knowledge


# ---------------------------------------------------------------------------
# Remote fetch with on-disk cache


class KBFetchError(RuntimeError):
    pass


def fetch_remote(kb_ids: Sequence[str], endpoint: str, cache_path: str | Path,
                 *, timeout: float = 10.0, max_retries: int = 3,
                 backoff: float = 0.5,
                 session: requests.Session | None = None) -> KBSnapshot:
    """Fetch entity entries, consulting and updating the on-disk cache.

    Already-cached ids cost no network call.  Ids the endpoint does not know
    are omitted from the result (and logged).  Transport failures are retried
    with exponential backoff up to ``max_retries``; on a final failure the
    entries fetched so far are still written to the cache before raising.

    Returns the snapshot fragment covering the requested ids.
    """
    cache_path = Path(cache_path)
    cache = load_snapshot(cache_path) if cache_path.exists() else {}
    wanted = [k for k in dict.fromkeys(kb_ids) if k not in cache]
    fragment = {k: cache[k] for k in kb_ids if k in cache}
    if not wanted:
        return fragment

    own_session = session is None
    sess = session or requests.Session()
    fetched: KBSnapshot = {}
    try:
        for kb_id in wanted:
            entry = _fetch_one(sess, endpoint, kb_id, timeout, max_retries, backoff)
            if entry is None:
                log.warning("kb endpoint has no entry for %s", kb_id)
                continue
            fetched[kb_id] = entry
            fragment[kb_id] = entry
    finally:
        if fetched:
            cache.update(fetched)
            save_snapshot(cache, cache_path)
        if own_session:
            sess.close()
    return fragment


def _fetch_one(session: requests.Session, endpoint: str, kb_id: str,
               timeout: float, max_retries: int, backoff: float) -> KBEntry | None:
    url = f"{endpoint.rstrip('/')}/entity/{kb_id}"
    last_error: Exception | None = None
    for attempt in range(max_retries + 1):
        if attempt:
            time.sleep(backoff * (2 ** (attempt - 1)))
        try:
            response = session.get(url, timeout=timeout)
        except requests.RequestException as exc:
            last_error = exc
            continue
        if response.status_code == 404:
            return None
        if response.status_code >= 500:
            last_error = KBFetchError(f"{url}: server error {response.status_code}")
            continue
        response.raise_for_status()
        raw = response.json()
        return KBEntry(kb_id=raw.get("kb_id", kb_id), label=raw.get("label", kb_id),
                       instance_of=tuple(raw.get("instance_of", ())),
                       subclass_of=tuple(raw.get("subclass_of", ())))
    raise KBFetchError(f"giving up on {url} after {max_retries + 1} attempts: {last_error}")
