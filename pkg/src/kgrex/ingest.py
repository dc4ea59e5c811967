"""Readers for benchmark dumps and precomputed entity-linking output.

Supported corpus formats:

``canonical``
    The pipeline's own JSONL (see :mod:`kgrex.model`).
``tacred``
    A JSON array of instances with token lists and inclusive token-index
    spans (``subj_start``/``subj_end``/...).  Instances labelled with the
    null relation are dropped, remaining instances are grouped by sentence
    into one example carrying all of that sentence's triples, and relation
    names have ``:`` normalized to ``_`` so they stay single tokens.
``nyt`` / ``webnlg``
    JSONL or a JSON array; records either ``{"sentText", "relationMentions":
    [{"em1Text", "label", "em2Text"}]}`` or ``{"text", "triple_list":
    [[s, r, o], ...]}``.  Task is JREE, no gold entities.
``ace``
    Pre-sentence-split JSONL ``{"id"?, "text", "triples": [{"subject",
    "relation", "object"}]}``; sentences without valid triples are dropped.

EL file format (JSONL): ``{"example_id", "mentions": [{"surface", "start",
"end", "kb_id", "score"}]}``.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .model import Example, EntityMention, RelationTriple, TaskKind, read_corpus

log = logging.getLogger(__name__)

CORPUS_FORMATS = ("canonical", "tacred", "nyt", "webnlg", "ace")

DEFAULT_EL_THRESHOLD = -4.5
DEFAULT_EL_TOP_K = 1


class IngestError(ValueError):
    pass


@dataclass(frozen=True)
class LinkedMention:
    """Entity-linker output for one mention, before type resolution."""

    surface: str
    start: int
    end: int
    kb_id: str
    score: float


ELFile = dict[str, list[LinkedMention]]


def load_corpus(path: str | Path, fmt: str, *,
                keep_negatives: bool = False) -> list[Example]:
    """Read a corpus dump into canonical examples.

    ``keep_negatives`` retains TACRED sentences whose every instance carries
    the null relation (as examples with empty triples); the default mirrors
    the reported benchmark statistics, which count only triple-bearing
    sentences.
    """
    if fmt not in CORPUS_FORMATS:
        raise IngestError(f"unknown corpus format {fmt!r}; expected one of {CORPUS_FORMATS}")
    if fmt == "canonical":
        return read_corpus(path)
    if fmt == "tacred":
        return _load_tacred(path, keep_negatives=keep_negatives)
    if fmt == "ace":
        return _load_ace(path)
    return _load_pairs_format(path, fmt)


def _dedup_triples(triples: Sequence[RelationTriple], example_id: str) -> tuple[RelationTriple, ...]:
    seen = set()
    out = []
    for t in triples:
        if t.as_tuple() in seen:
            log.warning("example %s: duplicate gold triple %s dropped", example_id, t.as_tuple())
            continue
        seen.add(t.as_tuple())
        out.append(t)
    return tuple(out)


def _iter_records(path: str | Path):
    """Yield (lineno, record) from a JSONL file or a single JSON array."""
    text = Path(path).read_text(encoding="utf-8")
    stripped = text.lstrip()
    if stripped.startswith("["):
        for i, record in enumerate(json.loads(text), start=1):
            yield i, record
        return
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            yield lineno, json.loads(line)
        except json.JSONDecodeError as exc:
            raise IngestError(f"{path}:{lineno}: invalid JSON: {exc}") from None


def _token_offsets(tokens: Sequence[str]) -> list[tuple[int, int]]:
    offsets = []
    pos = 0
    for tok in tokens:
        offsets.append((pos, pos + len(tok)))
        pos += len(tok) + 1  # single joining space
    return offsets


def _normalize_tacred_relation(relation: str) -> str:
    return relation.replace(":", "_")


def _load_tacred(path: str | Path, *, keep_negatives: bool) -> list[Example]:
    null_labels = {"no_relation", "NA"}
    sentences: dict[tuple[str, ...], dict] = {}
    order: list[tuple[str, ...]] = []
    for lineno, rec in _iter_records(path):
        try:
            tokens = tuple(rec["token"])
            relation = rec["relation"]
            spans = {side: (int(rec[f"{side}_start"]), int(rec[f"{side}_end"]))
                     for side in ("subj", "obj")}
        except (KeyError, TypeError, ValueError) as exc:
            raise IngestError(f"{path}:{lineno}: malformed tacred record ({exc})") from None
        key = tokens
        if key not in sentences:
            sentences[key] = {"id": str(rec.get("id", f"sent_{len(order)}")),
                              "entities": {}, "triples": [], "positive": False}
            order.append(key)
        group = sentences[key]
        offsets = _token_offsets(tokens)
        text = " ".join(tokens)
        arguments = {}
        for side in ("subj", "obj"):
            t_start, t_end = spans[side]
            if not (0 <= t_start <= t_end < len(tokens)):
                raise IngestError(f"{path}:{lineno}: field {side}_start/{side}_end out of range")
            start = offsets[t_start][0]
            end = offsets[t_end][1]
            mention = EntityMention(surface=text[start:end], start=start, end=end,
                                    entity_type=rec.get(f"{side}_type"))
            group["entities"][(start, end)] = mention
            arguments[side] = mention.surface
        if relation in null_labels:
            continue
        group["positive"] = True
        group["triples"].append(RelationTriple(
            arguments["subj"], _normalize_tacred_relation(relation), arguments["obj"]))

    corpus = []
    for key in order:
        group = sentences[key]
        if not group["positive"] and not keep_negatives:
            continue
        text = " ".join(key)
        mentions = tuple(sorted(group["entities"].values(), key=lambda m: (m.start, m.end)))
        corpus.append(Example(
            id=group["id"], text=text, gold_entities=mentions,
            gold_triples=_dedup_triples(group["triples"], group["id"]),
            task=TaskKind.ETRC))
    return corpus


def _load_pairs_format(path: str | Path, fmt: str) -> list[Example]:
    stem = Path(path).stem.split(".")[0]
    corpus = []
    index = 0
    for lineno, rec in _iter_records(path):
        if "sentText" in rec:
            text = rec["sentText"]
            try:
                triples = [RelationTriple(m["em1Text"], m["label"], m["em2Text"])
                           for m in rec.get("relationMentions", ())]
            except KeyError as exc:
                raise IngestError(f"{path}:{lineno}: relationMentions missing field {exc}") from None
        elif "text" in rec:
            text = rec["text"]
            raw_triples = rec.get("triple_list", ())
            triples = []
            for item in raw_triples:
                if len(item) != 3:
                    raise IngestError(f"{path}:{lineno}: field triple_list expects [s, r, o]")
                triples.append(RelationTriple(*item))
        else:
            raise IngestError(f"{path}:{lineno}: field sentText/text missing")
        example_id = str(rec.get("id", f"{stem}_{index}"))
        corpus.append(Example(id=example_id, text=text,
                              gold_triples=_dedup_triples(triples, example_id),
                              task=TaskKind.JREE))
        index += 1
    return corpus


def _load_ace(path: str | Path) -> list[Example]:
    stem = Path(path).stem.split(".")[0]
    corpus = []
    index = 0
    for lineno, rec in _iter_records(path):
        if "text" not in rec:
            raise IngestError(f"{path}:{lineno}: field text missing")
        triples = []
        for tri in rec.get("triples", ()):
            try:
                triples.append(RelationTriple(tri["subject"], tri["relation"], tri["object"]))
            except (KeyError, TypeError) as exc:
                raise IngestError(f"{path}:{lineno}: triple missing field {exc}") from None
        index += 1
        if not triples:
            continue  # only triple-bearing sentences are kept
        example_id = str(rec.get("id", f"{stem}_{index - 1}"))
        corpus.append(Example(id=example_id, text=rec["text"],
                              gold_triples=_dedup_triples(triples, example_id),
                              task=TaskKind.JREE))
    return corpus


# ---------------------------------------------------------------------------
# Entity-linking output


def load_el(path: str | Path, *, score_threshold: float = DEFAULT_EL_THRESHOLD,
            top_k: int = DEFAULT_EL_TOP_K,
            corpus: Sequence[Example] | None = None) -> ELFile:
    """Read linker output, dropping low-confidence and surplus candidates.

    Mentions scoring below ``score_threshold`` are dropped, then at most
    ``top_k`` candidates are kept per mention span (highest score first).
    When ``corpus`` is given, records whose example_id is unknown are skipped
    with a warning, as are mentions whose span does not reproduce the
    corpus text.
    """
    if not math.isfinite(score_threshold):
        raise ValueError("score_threshold must be finite")
    if top_k < 1:
        raise ValueError("top_k must be >= 1")
    texts = {ex.id: ex.text for ex in corpus} if corpus is not None else None

    el: ELFile = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
                example_id = raw["example_id"]
                mentions = [LinkedMention(surface=m["surface"], start=int(m["start"]),
                                          end=int(m["end"]), kb_id=m["kb_id"],
                                          score=float(m["score"]))
                            for m in raw.get("mentions", ())]
            except (KeyError, ValueError, TypeError) as exc:
                raise IngestError(f"{path}:{lineno}: malformed EL record ({exc})") from None
            for m in mentions:
                if m.end <= m.start:
                    raise IngestError(f"{path}:{lineno}: mention span end <= start")
                if not math.isfinite(m.score):
                    raise IngestError(f"{path}:{lineno}: mention score not finite")
            if texts is not None:
                if example_id not in texts:
                    log.warning("%s:%d: unknown example_id %r, record skipped",
                                path, lineno, example_id)
                    continue
                kept = []
                for m in mentions:
                    if texts[example_id][m.start:m.end] != m.surface:
                        log.warning("%s:%d: mention %r does not match text span, dropped",
                                    path, lineno, m.surface)
                        continue
                    kept.append(m)
                mentions = kept
            el.setdefault(example_id, []).extend(mentions)

    return {example_id: _filter_mentions(mentions, score_threshold, top_k)
            for example_id, mentions in el.items()}


def _filter_mentions(mentions: Sequence[LinkedMention], score_threshold: float,
                     top_k: int) -> list[LinkedMention]:
    by_span: dict[tuple[int, int], list[LinkedMention]] = {}
    span_order = []
    for m in mentions:
        if m.score < score_threshold:
            continue
        span = (m.start, m.end)
        if span not in by_span:
            by_span[span] = []
            span_order.append(span)
        by_span[span].append(m)
    kept = []
    for span in span_order:
        ranked = sorted(by_span[span], key=lambda m: (-m.score, m.kb_id))
        kept.extend(ranked[:top_k])
    kept.sort(key=lambda m: (m.start, m.end, -m.score, m.kb_id))
    return kept
