"""Linearize gold triples into target strings and parse generated text back.

Target format: triples rendered ``subject relation object`` and joined with
`` ; ``.  Parsing splits on ``;``, then locates a schema relation inside each
segment as a whitespace-delimited infix.  Among schema relations present in a
segment the longest surface wins, ties broken by leftmost occurrence; this
keeps e.g. ``member_of`` from losing to an accidental shorter match.
Malformed output degrades to per-segment rejections, never exceptions.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .model import RelationSchema, RelationTriple

SEPARATOR = " ; "

NO_RELATION_FOUND = "no_relation_found"
EMPTY_SUBJECT = "empty_subject"
EMPTY_OBJECT = "empty_object"

_TOKEN_RE = re.compile(r"\S+")


def linearize(triples: Sequence[RelationTriple]) -> str:
    """Render triples in the given order; an empty list yields ''."""
    return SEPARATOR.join(f"{t.subject} {t.relation} {t.object}" for t in triples)


@dataclass(frozen=True)
class ParsedCandidate:
    """One ``;``-separated segment of generated output, parsed or rejected."""

    raw: str
    parsed: RelationTriple | None = None
    reject_reason: str | None = None

    def __post_init__(self) -> None:
        if (self.parsed is None) == (self.reject_reason is None):
            raise ValueError("exactly one of parsed/reject_reason must be set")


def _find_relation(segment: str, schema: RelationSchema) -> tuple[str, int, int] | None:
    """Locate the best schema relation in ``segment``.

    Returns (relation, char_start, char_end) of the winning occurrence, or
    None.  Relations must match whole whitespace-delimited tokens; multiword
    surfaces match consecutive tokens.
    """
    tokens = [(m.group(), m.start(), m.end()) for m in _TOKEN_RE.finditer(segment)]
    if not tokens:
        return None
    words = [t[0] for t in tokens]
    best: tuple[int, int, str, int, int] | None = None  # (-len, token_pos, rel, cs, ce)
    for rel in schema.relations:
        rel_tokens = rel.split()
        if not rel_tokens:
            continue
        n = len(rel_tokens)
        for pos in range(len(words) - n + 1):
            if words[pos:pos + n] == rel_tokens:
                key = (-len(rel), pos, rel, tokens[pos][1], tokens[pos + n - 1][2])
                if best is None or key[:2] < best[:2]:
                    best = key
                break  # leftmost occurrence of this relation
    if best is None:
        return None
    return best[2], best[3], best[4]


def parse_generated(output: str, schema: RelationSchema) -> list[ParsedCandidate]:
    """Split generated text on ``;`` and parse each segment into a triple.

    Whitespace-only segments (e.g. from a trailing separator) are skipped.
    Duplicate parsed triples are dropped, keeping the first occurrence;
    rejected segments are all kept, with a reason.
    """
    candidates: list[ParsedCandidate] = []
    seen: set[tuple[str, str, str]] = set()
    for segment in output.split(";"):
        raw = segment.strip()
        if not raw:
            continue
        found = _find_relation(segment, schema)
        if found is None:
            candidates.append(ParsedCandidate(raw, reject_reason=NO_RELATION_FOUND))
            continue
        relation, char_start, char_end = found
        subject = segment[:char_start].strip()
        obj = segment[char_end:].strip()
        if not subject:
            candidates.append(ParsedCandidate(raw, reject_reason=EMPTY_SUBJECT))
            continue
        if not obj:
            candidates.append(ParsedCandidate(raw, reject_reason=EMPTY_OBJECT))
            continue
        triple = RelationTriple(subject, relation, obj)
        if triple.as_tuple() in seen:
            continue
        seen.add(triple.as_tuple())
        candidates.append(ParsedCandidate(raw, parsed=triple))
    return candidates


def parsed_triples(candidates: Iterable[ParsedCandidate]) -> list[RelationTriple]:
    return [c.parsed for c in candidates if c.parsed is not None]


@dataclass(frozen=True)
class AugmentedPair:
    """A (model input, target triples) pair; ``source`` points at the
    original corpus index for shuffled copies, None for originals."""

    input: str
    triples: tuple[RelationTriple, ...]
    source: int | None = None


def _shuffled_copy(triples: tuple[RelationTriple, ...],
                   rng: random.Random) -> tuple[RelationTriple, ...]:
    order = list(triples)
    for _ in range(100):
        rng.shuffle(order)
        if tuple(order) != triples:
            return tuple(order)
    # all-equal-but-not-constant lists cannot reach here; rotating a
    # non-constant sequence by one always changes it
    return tuple(order[1:] + order[:1])


def augment(corpus: Sequence[tuple[str, Sequence[RelationTriple]]],
            seed: int, copies: int = 1) -> list[AugmentedPair]:
    """Append shuffled-target copies of every multi-triple example.

    For each example with at least two triples and at least one ordering
    different from the original, ``copies`` new pairs are appended whose
    triple order is a seeded random permutation distinct from the original.
    Inputs are never modified; single-triple and empty examples are never
    duplicated.  Fixed seed means byte-identical output across runs.
    """
    if copies < 0:
        raise ValueError("copies must be >= 0")
    rng = random.Random(seed)
    result = [AugmentedPair(inp, tuple(triples)) for inp, triples in corpus]
    extra: list[AugmentedPair] = []
    for idx, pair in enumerate(result):
        if len(pair.triples) < 2 or all(t == pair.triples[0] for t in pair.triples):
            continue
        for _ in range(copies):
            extra.append(AugmentedPair(pair.input, _shuffled_copy(pair.triples, rng),
                                       source=idx))
    return result + extra
