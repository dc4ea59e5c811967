"""Core domain types shared by every pipeline stage.

All types are immutable value objects and safe to share across threads.

Corpus file format (canonical JSON-Lines, one example per line)::

    {"id": ..., "text": ...,
     "entities": [{"surface": ..., "start": ..., "end": ..., "type": ...}],
     "triples":  [{"subject": ..., "relation": ..., "object": ...}],
     "task": "ETRC" | "RC" | "JREE"}

Offsets are character offsets into the raw text; ``end`` is exclusive.
Word indices are always derived, never stored.  Examples whose only gold
label is the null relation carry an empty ``triples`` list.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence


class TaskKind(enum.Enum):
    """Extraction settings, from most to least dataset-provided knowledge."""

    ETRC = "ETRC"  # entity positions and types given
    RC = "RC"  # entity positions given
    JREE = "JREE"  # plain text only

    @classmethod
    def parse(cls, value: str) -> "TaskKind":
        try:
            return cls(value.upper())
        except ValueError:
            raise ValueError(f"unknown task kind {value!r}; expected one of "
                             f"{[k.value for k in cls]}") from None


@dataclass(frozen=True)
class EntityMention:
    """A gold entity span; ``text[start:end] == surface`` must hold."""

    surface: str
    start: int
    end: int
    entity_type: str | None = None


@dataclass(frozen=True)
class RelationTriple:
    subject: str
    relation: str
    object: str

    def as_tuple(self) -> tuple[str, str, str]:
        return (self.subject, self.relation, self.object)


@dataclass(frozen=True)
class Example:
    """One input text with optional gold entity spans and gold triples."""

    id: str
    text: str
    gold_entities: tuple[EntityMention, ...] = ()
    gold_triples: tuple[RelationTriple, ...] = ()
    task: TaskKind = TaskKind.JREE


@dataclass(frozen=True)
class RelationSchema:
    """The closed relation set, plus the optional null ("no relation") label.

    The null relation never appears in gold triples; it is modelled as
    "no triple emitted" at generation time.
    """

    relations: tuple[str, ...]
    null_relation: str | None = None

    def __post_init__(self) -> None:
        seen = set()
        for rel in self.relations:
            if not rel:
                raise ValueError("relation surfaces must be non-empty")
            if rel in seen:
                raise ValueError(f"duplicate relation surface {rel!r}")
            seen.add(rel)
        object.__setattr__(self, "_lookup", frozenset(seen))

    def known(self, relation: str) -> bool:
        """True if ``relation`` belongs to the schema (null label included)."""
        return relation in self._lookup or relation == self.null_relation

    @classmethod
    def from_file(cls, path: str | Path) -> "RelationSchema":
        with open(path, encoding="utf-8") as f:
            raw = json.load(f)
        return cls(relations=tuple(raw["relations"]),
                   null_relation=raw.get("null_relation"))

    def to_file(self, path: str | Path) -> None:
        payload = {"relations": list(self.relations)}
        if self.null_relation is not None:
            payload["null_relation"] = self.null_relation
        Path(path).write_text(json.dumps(payload, ensure_ascii=False, indent=2) + "\n",
                              encoding="utf-8")


# ---------------------------------------------------------------------------
# Canonical JSONL serialization


def example_to_dict(example: Example) -> dict:
    entities = []
    for m in example.gold_entities:
        ent = {"surface": m.surface, "start": m.start, "end": m.end}
        if m.entity_type is not None:
            ent["type"] = m.entity_type
        entities.append(ent)
    return {
        "id": example.id,
        "text": example.text,
        "entities": entities,
        "triples": [
            {"subject": t.subject, "relation": t.relation, "object": t.object}
            for t in example.gold_triples
        ],
        "task": example.task.value,
    }


def example_from_dict(raw: dict) -> Example:
    for key in ("id", "text", "task"):
        if key not in raw:
            raise ValueError(f"missing field {key!r}")
    entities = []
    for ent in raw.get("entities", ()):
        for key in ("surface", "start", "end"):
            if key not in ent:
                raise ValueError(f"entity missing field {key!r}")
        entities.append(EntityMention(surface=ent["surface"], start=int(ent["start"]),
                                      end=int(ent["end"]), entity_type=ent.get("type")))
    triples = []
    for tri in raw.get("triples", ()):
        for key in ("subject", "relation", "object"):
            if key not in tri:
                raise ValueError(f"triple missing field {key!r}")
        triples.append(RelationTriple(tri["subject"], tri["relation"], tri["object"]))
    return Example(
        id=str(raw["id"]),
        text=raw["text"],
        gold_entities=tuple(entities),
        gold_triples=tuple(triples),
        task=TaskKind.parse(raw["task"]),
    )


def dump_jsonl_line(obj: dict) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def read_corpus(path: str | Path) -> list[Example]:
    """Read a canonical JSONL corpus; errors name the offending line."""
    corpus = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                corpus.append(example_from_dict(json.loads(line)))
            except (ValueError, KeyError, TypeError) as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    return corpus


def write_corpus(corpus: Iterable[Example], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for example in corpus:
            f.write(dump_jsonl_line(example_to_dict(example)) + "\n")


# ---------------------------------------------------------------------------
# Validation


#: violation kinds reported by validate_corpus
BAD_SPAN = "bad_span"
UNKNOWN_RELATION = "unknown_relation"
DUPLICATE_ID = "duplicate_id"
ARGUMENT_NOT_IN_TEXT = "argument_not_in_text"
SEPARATOR_IN_ARGUMENT = "separator_in_argument"
EMPTY_FIELD = "empty_field"
MISSING_POSITIONS = "missing_positions"
MISSING_ENTITY_TYPE = "missing_entity_type"


@dataclass(frozen=True)
class Violation:
    example_id: str
    kind: str
    message: str


@dataclass
class ValidationReport:
    examples: int = 0
    triples: int = 0
    violations: list[Violation] = field(default_factory=list)

    @property
    def mean_triple_size(self) -> float:
        return self.triples / self.examples if self.examples else 0.0

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "examples": self.examples,
            "triples": self.triples,
            "mean_triple_size": round(self.mean_triple_size, 4),
            "violations": [
                {"example_id": v.example_id, "kind": v.kind, "message": v.message}
                for v in self.violations
            ],
        }


def validate_corpus(corpus: Sequence[Example], schema: RelationSchema) -> ValidationReport:
    """Check every domain invariant; problems are reported, never raised."""
    report = ValidationReport(examples=len(corpus))
    seen_ids: set[str] = set()
    for ex in corpus:
        report.triples += len(ex.gold_triples)
        if ex.id in seen_ids:
            report.violations.append(Violation(ex.id, DUPLICATE_ID,
                                               f"id {ex.id!r} appears more than once"))
        seen_ids.add(ex.id)

        if ex.task in (TaskKind.ETRC, TaskKind.RC) and not ex.gold_entities:
            report.violations.append(Violation(
                ex.id, MISSING_POSITIONS,
                f"task {ex.task.value} requires entity positions"))
        for m in ex.gold_entities:
            if not (0 <= m.start < m.end <= len(ex.text)) or ex.text[m.start:m.end] != m.surface:
                report.violations.append(Violation(
                    ex.id, BAD_SPAN,
                    f"span ({m.start}, {m.end}) does not match surface {m.surface!r}"))
            if ex.task is TaskKind.ETRC and m.entity_type is None:
                report.violations.append(Violation(
                    ex.id, MISSING_ENTITY_TYPE,
                    f"ETRC mention {m.surface!r} has no entity type"))
        for t in ex.gold_triples:
            if not t.subject or not t.object or not t.relation:
                report.violations.append(Violation(
                    ex.id, EMPTY_FIELD, f"triple {t.as_tuple()!r} has an empty field"))
                continue
            if not schema.known(t.relation):
                report.violations.append(Violation(
                    ex.id, UNKNOWN_RELATION,
                    f"relation {t.relation!r} is not in the relation set"))
            for side, value in (("subject", t.subject), ("object", t.object)):
                if value not in ex.text:
                    report.violations.append(Violation(
                        ex.id, ARGUMENT_NOT_IN_TEXT,
                        f"{side} {value!r} is not a substring of the text"))
                if ";" in value:
                    # the linearized target uses ";" as the triple separator
                    report.violations.append(Violation(
                        ex.id, SEPARATOR_IN_ARGUMENT,
                        f"{side} {value!r} contains the triple separator ';'"))
    return report
