"""Build knowledge-enhanced model inputs from text and grounded facts.

Two template families:

* position-aware (T1): each gold mention is wrapped in place, ``[es]``
  before the surface and ``[gr] <type>`` after it, all other characters of
  the text preserved;
* position-absent (T2): grounded facts are appended after the text as
  ``[gr] <label> is an instance of <type>`` segments, in mention order.

The "is an instance of" phrasing is fixed verbatim regardless of which KB
property supplied the type; the property only changes the lookup.
Stripping the inserted markers (T1) or the appended suffix (T2) must
recover the original text exactly, so texts already containing a marker
token are refused.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from .kb import GroundedFact, GroundedKnowledge
from .model import Example, TaskKind

log = logging.getLogger(__name__)

ABLATION_MODES = ("full", "no_kg", "no_text")
INSTANCE_PHRASE = "is an instance of"

#: inputs longer than this many whitespace tokens exceed what typical
#: encoder limits will keep; the builder warns, the backend truncates
SOURCE_TOKEN_WARN_LIMIT = 1024


class TemplateError(ValueError):
    pass


@dataclass(frozen=True)
class TemplateConfig:
    entity_start_token: str = "[es]"
    grounding_token: str = "[gr]"
    task_prefix: str | None = None
    ablation_mode: str = "full"
    use_kb_labels: bool = True  # T2 suffix labels: KB entity label vs mention surface

    def __post_init__(self) -> None:
        if not self.entity_start_token or not self.grounding_token:
            raise ValueError("marker tokens must be non-empty")
        if self.entity_start_token == self.grounding_token:
            raise ValueError("marker tokens must be distinct")
        if self.ablation_mode not in ABLATION_MODES:
            raise ValueError(f"ablation_mode must be one of {ABLATION_MODES}")


def _check_markers(text: str, cfg: TemplateConfig) -> None:
    for token in (cfg.entity_start_token, cfg.grounding_token):
        if token in text:
            raise TemplateError(f"text already contains the marker token {token!r}")


def _apply_prefix(body: str, cfg: TemplateConfig) -> str:
    if cfg.task_prefix:
        return f"{cfg.task_prefix} {body}"
    return body


def _warn_if_long(example_id: str, output: str) -> None:
    n = len(output.split())
    if n > SOURCE_TOKEN_WARN_LIMIT:
        log.warning("example %s: templated input has %d whitespace tokens "
                    "(> %d); the backend will truncate", example_id, n,
                    SOURCE_TOKEN_WARN_LIMIT)


def _facts_for(example: Example, kg: GroundedKnowledge) -> list[GroundedFact]:
    return kg.get(example.id, [])


def build_t1(example: Example, kg: GroundedKnowledge, cfg: TemplateConfig) -> str:
    """Position-aware template: mark every gold mention in place.

    In ``no_kg`` mode the type insertions are omitted but the entity-start
    markers are retained.  Mentions with no grounded type get the start
    marker only.  Overlapping mention spans cannot be nested and raise.
    """
    if example.task not in (TaskKind.ETRC, TaskKind.RC):
        raise TemplateError(f"T1 requires entity positions; task is {example.task.value}")
    if cfg.ablation_mode == "no_text":
        raise TemplateError("no_text ablation is only defined for T2")
    _check_markers(example.text, cfg)

    mentions = sorted(example.gold_entities, key=lambda m: (m.start, m.end))
    for prev, curr in zip(mentions, mentions[1:]):
        if curr.start < prev.end:
            raise TemplateError(
                f"overlapping mention spans ({prev.start},{prev.end}) and "
                f"({curr.start},{curr.end}) cannot be marked")

    types = {}
    if cfg.ablation_mode != "no_kg":
        for fact in _facts_for(example, kg):
            types.setdefault((fact.mention.start, fact.mention.end), fact.type_label)

    out = example.text
    for m in reversed(mentions):
        marked = f"{cfg.entity_start_token} {m.surface}"
        type_label = types.get((m.start, m.end))
        if type_label is not None:
            marked += f" {cfg.grounding_token} {type_label}"
        out = out[:m.start] + marked + out[m.end:]
    out = _apply_prefix(out, cfg)
    _warn_if_long(example.id, out)
    return out


def build_t2(example: Example, kg: GroundedKnowledge, cfg: TemplateConfig) -> str:
    """Position-absent template: append grounded facts after the text.

    Facts are appended in mention order (start offset); several mentions of
    the same KB entity contribute one segment.  ``no_text`` keeps only the
    knowledge suffix, ``no_kg`` keeps only the bare text.
    """
    if cfg.ablation_mode != "no_text":
        _check_markers(example.text, cfg)

    segments: list[str] = []
    if cfg.ablation_mode != "no_kg":
        seen_entities: set[str] = set()
        for fact in sorted(_facts_for(example, kg),
                           key=lambda f: (f.mention.start, f.mention.end)):
            if fact.mention.kb_id in seen_entities:
                continue
            seen_entities.add(fact.mention.kb_id)
            label = fact.kb_label if cfg.use_kb_labels and fact.kb_label else fact.mention.surface
            segments.append(f"{cfg.grounding_token} {label} {INSTANCE_PHRASE} {fact.type_label}")

    if cfg.ablation_mode == "no_text":
        out = " ".join(segments)
    elif segments:
        out = example.text + " " + " ".join(segments)
    else:
        out = example.text
    out = _apply_prefix(out, cfg)
    _warn_if_long(example.id, out)
    return out


def build_input(example: Example, kg: GroundedKnowledge, cfg: TemplateConfig,
                template: str) -> str:
    if template == "t1":
        return build_t1(example, kg, cfg)
    if template == "t2":
        return build_t2(example, kg, cfg)
    raise TemplateError(f"unknown template {template!r}; expected 't1' or 't2'")
