"""Score predicted triples against gold and produce diagnostic breakdowns.

A predicted triple is correct iff its (subject, relation, object) exactly
matches a gold triple of the same example, each gold triple matchable once;
precision/recall/F1 are micro-aggregated over the whole corpus.  Comparison
is case-sensitive by default (post-processing has already canonicalized
entities to gold or sub-span surfaces); ``casefold=True`` is available for
ablations.
"""

from __future__ import annotations

import csv
import statistics
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .kb import GroundedKnowledge
from .model import Example, RelationTriple


@dataclass(frozen=True)
class BucketScore:
    precision: float
    recall: float
    f1: float
    examples: int
    correct: int
    spurious: int
    missed: int

    def to_dict(self) -> dict:
        return {"precision": self.precision, "recall": self.recall, "f1": self.f1,
                "examples": self.examples, "correct": self.correct,
                "spurious": self.spurious, "missed": self.missed}


@dataclass
class EvalReport:
    precision: float
    recall: float
    f1: float
    correct: int
    spurious: int
    missed: int
    per_triple_size: dict[int, BucketScore] = field(default_factory=dict)
    found_info_ratio: float | None = None

    def to_dict(self) -> dict:
        out = {"precision": self.precision, "recall": self.recall, "f1": self.f1,
               "correct": self.correct, "spurious": self.spurious, "missed": self.missed,
               "per_triple_size": {str(k): v.to_dict()
                                   for k, v in sorted(self.per_triple_size.items())}}
        if self.found_info_ratio is not None:
            out["found_info_ratio"] = self.found_info_ratio
        return out

    def render_table(self) -> str:
        rows = [("overall", self.precision, self.recall, self.f1,
                 self.correct + self.missed)]
        for size, bucket in sorted(self.per_triple_size.items()):
            rows.append((f"T={size}", bucket.precision, bucket.recall, bucket.f1,
                         bucket.correct + bucket.missed))
        lines = [f"{'bucket':<10} {'P':>8} {'R':>8} {'F1':>8} {'gold':>6}"]
        for name, p, r, f1, gold in rows:
            lines.append(f"{name:<10} {p:>8.4f} {r:>8.4f} {f1:>8.4f} {gold:>6}")
        return "\n".join(lines)


def _prf(correct: int, predicted: int, gold: int) -> tuple[float, float, float]:
    p = correct / predicted if predicted else 0.0
    r = correct / gold if gold else 0.0
    f1 = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return p, r, f1


def _as_tuples(triples: Iterable[RelationTriple], casefold: bool) -> list[tuple[str, str, str]]:
    if casefold:
        return [(t.subject.casefold(), t.relation.casefold(), t.object.casefold())
                for t in triples]
    return [t.as_tuple() for t in triples]


def _match_counts(predicted: Sequence[RelationTriple], gold: Sequence[RelationTriple],
                  casefold: bool) -> tuple[int, int, int]:
    gold_pool = Counter(_as_tuples(gold, casefold))
    correct = 0
    for t in _as_tuples(predicted, casefold):
        if gold_pool[t] > 0:
            gold_pool[t] -= 1
            correct += 1
    return correct, len(predicted) - correct, len(gold) - correct


def check_aligned_ids(predictions: Mapping[str, Sequence[RelationTriple]],
                      gold: Mapping[str, Sequence[RelationTriple]]) -> None:
    missing = sorted(set(gold) - set(predictions))
    extra = sorted(set(predictions) - set(gold))
    problems = []
    if missing:
        problems.append(f"ids missing from predictions: {', '.join(missing[:10])}"
                        + (" ..." if len(missing) > 10 else ""))
    if extra:
        problems.append(f"ids missing from gold: {', '.join(extra[:10])}"
                        + (" ..." if len(extra) > 10 else ""))
    if problems:
        raise ValueError("; ".join(problems))


def micro_prf(predictions: Mapping[str, Sequence[RelationTriple]],
              gold: Mapping[str, Sequence[RelationTriple]],
              *, casefold: bool = False) -> EvalReport:
    """Micro precision/recall/F1 over the pooled triples of all examples."""
    check_aligned_ids(predictions, gold)
    correct = spurious = missed = 0
    for example_id, gold_triples in gold.items():
        c, s, m = _match_counts(predictions[example_id], gold_triples, casefold)
        correct += c
        spurious += s
        missed += m
    p, r, f1 = _prf(correct, correct + spurious, correct + missed)
    report = EvalReport(precision=p, recall=r, f1=f1, correct=correct,
                        spurious=spurious, missed=missed)
    report.per_triple_size = triple_size_breakdown(predictions, gold, casefold=casefold)
    return report


def triple_size_breakdown(predictions: Mapping[str, Sequence[RelationTriple]],
                          gold: Mapping[str, Sequence[RelationTriple]],
                          *, casefold: bool = False) -> dict[int, BucketScore]:
    """Bucket examples by gold triple count; micro scores per bucket."""
    check_aligned_ids(predictions, gold)
    tallies: dict[int, list[int]] = {}
    for example_id, gold_triples in gold.items():
        size = len(gold_triples)
        c, s, m = _match_counts(predictions[example_id], gold_triples, casefold)
        bucket = tallies.setdefault(size, [0, 0, 0, 0])
        bucket[0] += c
        bucket[1] += s
        bucket[2] += m
        bucket[3] += 1
    out = {}
    for size, (c, s, m, n) in tallies.items():
        p, r, f1 = _prf(c, c + s, c + m)
        out[size] = BucketScore(precision=p, recall=r, f1=f1, examples=n,
                                correct=c, spurious=s, missed=m)
    return out


def found_info_ratio(kg: GroundedKnowledge, corpus: Sequence[Example]) -> float | None:
    """Grounded external facts per gold entity over a split.

    For position-aware examples the gold entity count is the number of gold
    mentions; for position-absent ones the distinct gold triple arguments
    stand in for the entity set.  A ratio above 1 means the linker found
    more facts than there are gold entities.  Returns None when the split
    has no gold entities at all.
    """
    facts = 0
    entities = 0
    for ex in corpus:
        facts += len(kg.get(ex.id, ()))
        if ex.gold_entities:
            entities += len(ex.gold_entities)
        else:
            arguments = {t.subject for t in ex.gold_triples}
            arguments.update(t.object for t in ex.gold_triples)
            entities += len(arguments)
    if entities == 0:
        return None
    return facts / entities


def combine_reports(reports: Sequence[EvalReport]) -> dict:
    """Mean/stddev of P/R/F1 across runs (e.g. multiple seeds)."""
    if not reports:
        raise ValueError("no reports to combine")

    def agg(values: list[float]) -> dict:
        return {"mean": statistics.fmean(values),
                "stdev": statistics.stdev(values) if len(values) > 1 else 0.0}

    return {"runs": len(reports),
            "precision": agg([r.precision for r in reports]),
            "recall": agg([r.recall for r in reports]),
            "f1": agg([r.f1 for r in reports])}


def write_breakdown_csv(report: EvalReport, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["triple_size", "precision", "recall", "f1",
                         "examples", "correct", "spurious", "missed"])
        for size, bucket in sorted(report.per_triple_size.items()):
            writer.writerow([size, f"{bucket.precision:.6f}", f"{bucket.recall:.6f}",
                             f"{bucket.f1:.6f}", bucket.examples, bucket.correct,
                             bucket.spurious, bucket.missed])
