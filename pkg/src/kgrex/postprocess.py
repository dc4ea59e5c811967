"""Resolve parsed candidate triples against gold entities or text sub-spans.

Position-aware tasks (RC/ETRC) match generated entities to the gold mention
surfaces; below-threshold candidates delete the whole triple, otherwise each
side is replaced by the most similar gold surface.  The position-absent task
(JREE) replaces each generated entity with the most similar contiguous word
sub-span of the text, with an exact-substring short-circuit.

Similarity is character-level Levenshtein over comparison-normalized strings
(casefold + whitespace collapse by default); replacement always uses the
original-cased gold or sub-span surface.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import editdist
from .codec import ParsedCandidate
from .model import EntityMention, RelationTriple

_WORD_RE = re.compile(r"\w+|[^\w\s]", re.UNICODE)

NORMALIZATION_MODES = ("none", "casefold_ws")


@dataclass(frozen=True)
class SimilarityConfig:
    epsilon: float = 0.85
    max_subspan_words: int = 10
    normalization: str = "casefold_ws"
    # the deletion threshold is specified for the position-aware tasks only;
    # an optional JREE-side threshold is provided but disabled by default
    jree_epsilon: float | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("epsilon must lie in [0, 1]")
        if self.max_subspan_words < 1:
            raise ValueError("max_subspan_words must be >= 1")
        if self.normalization not in NORMALIZATION_MODES:
            raise ValueError(f"normalization must be one of {NORMALIZATION_MODES}")


def normalize_for_comparison(s: str, mode: str = "casefold_ws") -> str:
    if mode == "none":
        return s
    return " ".join(s.casefold().split())


def lev_sim(a: str, b: str, normalization: str = "casefold_ws") -> float:
    """Levenshtein similarity in [0, 1] over comparison-normalized strings."""
    return editdist.similarity(normalize_for_comparison(a, normalization),
                               normalize_for_comparison(b, normalization))


def _dedup(triples: Iterable[RelationTriple]) -> list[RelationTriple]:
    seen: set[tuple[str, str, str]] = set()
    out = []
    for t in triples:
        if t.as_tuple() not in seen:
            seen.add(t.as_tuple())
            out.append(t)
    return out


def resolve_rc(candidates: Sequence[ParsedCandidate],
               gold_entities: Sequence[EntityMention],
               cfg: SimilarityConfig = SimilarityConfig()) -> list[RelationTriple]:
    """Replace generated entities by their closest gold surface.

    A triple is deleted when either side's best similarity falls below
    ``cfg.epsilon``.  Ties between equally similar gold mentions go to the
    earliest mention offset.  Duplicates are dropped after replacement.
    """
    if not gold_entities:
        raise ValueError("resolve_rc requires at least one gold entity")
    ordered = sorted(gold_entities, key=lambda m: (m.start, m.end))
    normalized = [normalize_for_comparison(m.surface, cfg.normalization) for m in ordered]

    def best_gold(generated: str) -> tuple[float, str]:
        query = normalize_for_comparison(generated, cfg.normalization)
        best_score, best_surface = -1.0, ""
        for mention, norm in zip(ordered, normalized):
            score = editdist.similarity(query, norm)
            if score > best_score:
                best_score, best_surface = score, mention.surface
        return best_score, best_surface

    resolved = []
    for cand in candidates:
        if cand.parsed is None:
            continue
        subj_score, subj = best_gold(cand.parsed.subject)
        obj_score, obj = best_gold(cand.parsed.object)
        if subj_score < cfg.epsilon or obj_score < cfg.epsilon:
            continue
        resolved.append(RelationTriple(subj, cand.parsed.relation, obj))
    return _dedup(resolved)


def enumerate_subspans(text: str, max_words: int) -> list[tuple[int, int]]:
    """Character spans of all contiguous word runs up to ``max_words`` words.

    Words are whitespace- and punctuation-delimited; a span runs from the
    first word's start to the last word's end, so inner punctuation and
    spacing are preserved.
    """
    words = [(m.start(), m.end()) for m in _WORD_RE.finditer(text)]
    spans = []
    for i in range(len(words)):
        for j in range(i, min(i + max_words, len(words))):
            spans.append((words[i][0], words[j][1]))
    return spans


def resolve_jree(candidates: Sequence[ParsedCandidate], text: str,
                 cfg: SimilarityConfig = SimilarityConfig()) -> list[RelationTriple]:
    """Replace generated entities by the most similar sub-span of the text.

    Entities that already occur verbatim in the text are kept unchanged.
    Ties go to the shortest span, then the leftmost.  No deletion threshold
    is applied unless ``cfg.jree_epsilon`` is set.
    """
    spans = enumerate_subspans(text, cfg.max_subspan_words)
    surfaces = [text[a:b] for a, b in spans]
    normalized = [normalize_for_comparison(s, cfg.normalization) for s in surfaces]
    cache: dict[str, tuple[float, str]] = {}

    def best_span(generated: str) -> tuple[float, str]:
        if generated in cache:
            return cache[generated]
        if generated in text:
            result = (1.0, generated)
        elif not spans:
            result = (0.0, generated)
        else:
            query = normalize_for_comparison(generated, cfg.normalization)
            best = None  # (-score, span char length, start, surface)
            for (a, b), surface, norm in zip(spans, surfaces, normalized):
                key = (-editdist.similarity(query, norm), b - a, a, surface)
                if best is None or key[:3] < best[:3]:
                    best = key
            result = (-best[0], best[3])
        cache[generated] = result
        return result

    resolved = []
    for cand in candidates:
        if cand.parsed is None:
            continue
        subj_score, subj = best_span(cand.parsed.subject)
        obj_score, obj = best_span(cand.parsed.object)
        if cfg.jree_epsilon is not None and (subj_score < cfg.jree_epsilon
                                             or obj_score < cfg.jree_epsilon):
            continue
        resolved.append(RelationTriple(subj, cand.parsed.relation, obj))
    return _dedup(resolved)
