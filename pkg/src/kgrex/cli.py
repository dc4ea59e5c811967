"""Pipeline orchestration as composable subcommands over files.

Usage::

    kgrex ingest --input raw.jsonl --format webnlg --out corpus.jsonl
    kgrex ground --corpus corpus.jsonl --el el.jsonl --snapshot kb.jsonl \
        --out grounded.jsonl
    kgrex template --corpus corpus.jsonl --grounded grounded.jsonl \
        --out inputs.jsonl
    kgrex generate --inputs inputs.jsonl --backend stub --out gens.jsonl
    kgrex postprocess --generations gens.jsonl --corpus corpus.jsonl \
        --schema schema.json --out preds.jsonl
    kgrex evaluate --predictions preds.jsonl --corpus corpus.jsonl \
        --out report.json
    kgrex run-all --input corpus.jsonl --format canonical --el el.jsonl \
        --snapshot kb.jsonl --out-dir run/

Every stage writes its JSONL artifact plus ``<artifact>.manifest.json``
(input hashes, config, versions) and is restartable from its predecessor's
files alone.  A JSON config file (``--config``) mirrors all flags with
underscores; explicit flags override it.  Stages fail with a one-line cause
and a non-zero exit, leaving no partial outputs.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Iterable, Sequence

from . import codec, evaluate, kb, manifest, postprocess, templates
from .backend import DecodingConfig, GenerationBackend, RemoteBackend, StubBackend
from .ingest import (DEFAULT_EL_THRESHOLD, DEFAULT_EL_TOP_K, CORPUS_FORMATS,
                     load_corpus, load_el)
from .model import (Example, RelationSchema, RelationTriple, TaskKind,
                    dump_jsonl_line, read_corpus, validate_corpus, write_corpus)

log = logging.getLogger(__name__)


def _read_jsonl(path: str | Path) -> Iterable[tuple[int, dict]]:
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                yield lineno, json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: invalid JSON: {exc}") from None


def read_model_inputs(path: str | Path) -> list[dict]:
    rows = []
    for lineno, row in _read_jsonl(path):
        for key in ("id", "input", "target"):
            if key not in row:
                raise ValueError(f"{path}:{lineno}: model-input row missing {key!r}")
        rows.append(row)
    return rows


def read_generations(path: str | Path) -> list[dict]:
    rows = []
    for lineno, row in _read_jsonl(path):
        for key in ("id", "output"):
            if key not in row:
                raise ValueError(f"{path}:{lineno}: generation row missing {key!r}")
        rows.append(row)
    return rows


def read_predictions(path: str | Path) -> dict[str, list[RelationTriple]]:
    predictions: dict[str, list[RelationTriple]] = {}
    for lineno, row in _read_jsonl(path):
        if "id" not in row or "triples" not in row:
            raise ValueError(f"{path}:{lineno}: prediction row missing id/triples")
        predictions[row["id"]] = [
            RelationTriple(t["subject"], t["relation"], t["object"])
            for t in row["triples"]]
    return predictions


def _write_jsonl(path: str | Path, rows: Iterable[dict]) -> None:
    with manifest.atomic_output(path) as tmp:
        with open(tmp, "w", encoding="utf-8") as f:
            for row in rows:
                f.write(dump_jsonl_line(row) + "\n")


def _parallel_map(fn: Callable, items: Sequence, jobs: int) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def derive_schema(corpus: Sequence[Example]) -> RelationSchema:
    relations = sorted({t.relation for ex in corpus for t in ex.gold_triples})
    return RelationSchema(relations=tuple(relations))


# ---------------------------------------------------------------------------
# Stage implementations (argparse-independent, reusable from tests)


def run_ingest(input_path: str | Path, fmt: str, out: str | Path, *,
               task: str | None = None, keep_negatives: bool = False,
               schema_out: str | Path | None = None) -> list[Example]:
    corpus = load_corpus(input_path, fmt, keep_negatives=keep_negatives)
    if task is not None:
        kind = TaskKind.parse(task)
        corpus = [Example(id=ex.id, text=ex.text, gold_entities=ex.gold_entities,
                          gold_triples=ex.gold_triples, task=kind) for ex in corpus]
    with manifest.atomic_output(out) as tmp:
        write_corpus(corpus, tmp)
    manifest.write_manifest("ingest", out, {"input": input_path},
                            {"format": fmt, "task": task,
                             "keep_negatives": keep_negatives})
    if schema_out is not None:
        schema = derive_schema(corpus)
        with manifest.atomic_output(schema_out) as tmp:
            schema.to_file(tmp)
    return corpus


def run_ground(corpus_path: str | Path, el_path: str | Path,
               snapshot_path: str | Path, out: str | Path, *,
               train_el_path: str | Path | None = None,
               type_property: str = "instance_of",
               el_threshold: float = DEFAULT_EL_THRESHOLD,
               el_top_k: int = DEFAULT_EL_TOP_K) -> kb.GroundedKnowledge:
    corpus = read_corpus(corpus_path)
    snapshot = kb.load_snapshot(snapshot_path)
    prop = kb.TypeProperty.parse(type_property)
    el = load_el(el_path, score_threshold=el_threshold, top_k=el_top_k, corpus=corpus)
    if train_el_path is None or Path(train_el_path) == Path(el_path):
        train_el = el
        train_el_path = el_path
    else:
        train_el = load_el(train_el_path, score_threshold=el_threshold, top_k=el_top_k)
    freq = kb.build_type_frequency(train_el, snapshot, prop)
    knowledge, diag = kb.resolve_types(el, snapshot, prop, freq)
    with manifest.atomic_output(out) as tmp:
        kb.write_grounded(knowledge, tmp)
    manifest.write_manifest("ground", out,
                            {"corpus": corpus_path, "el": el_path,
                             "snapshot": snapshot_path, "train_el": train_el_path},
                            {"type_property": prop.value, "el_threshold": el_threshold,
                             "el_top_k": el_top_k, "diagnostics": diag.to_dict()})
    return knowledge


def run_template(corpus_path: str | Path, grounded_path: str | Path,
                 out: str | Path, *, template: str | None = None,
                 ablation: str = "full", es_token: str = "[es]",
                 gr_token: str = "[gr]", prefix: str | None = None,
                 surface_labels: bool = False) -> list[dict]:
    corpus = read_corpus(corpus_path)
    knowledge = kb.read_grounded(grounded_path)
    if template is None:
        position_aware = all(ex.task in (TaskKind.ETRC, TaskKind.RC) for ex in corpus)
        template = "t1" if position_aware and corpus else "t2"
    cfg = templates.TemplateConfig(entity_start_token=es_token, grounding_token=gr_token,
                                   task_prefix=prefix, ablation_mode=ablation,
                                   use_kb_labels=not surface_labels)
    rows = [{"id": ex.id,
             "input": templates.build_input(ex, knowledge, cfg, template),
             "target": codec.linearize(ex.gold_triples)}
            for ex in corpus]
    _write_jsonl(out, rows)
    manifest.write_manifest("template", out,
                            {"corpus": corpus_path, "grounded": grounded_path},
                            {"template": template, "ablation": ablation,
                             "entity_start_token": es_token, "grounding_token": gr_token,
                             "task_prefix": prefix, "use_kb_labels": not surface_labels})
    return rows


def run_augment(inputs_path: str | Path, corpus_path: str | Path, out: str | Path,
                *, copies: int = 1, seed: int = 0) -> list[dict]:
    rows = read_model_inputs(inputs_path)
    triples_by_id = {ex.id: ex.gold_triples for ex in read_corpus(corpus_path)}
    missing = [row["id"] for row in rows if row["id"] not in triples_by_id]
    if missing:
        raise ValueError(f"model inputs reference ids absent from corpus: {missing[:5]}")
    pairs = [(row["input"], triples_by_id[row["id"]]) for row in rows]
    augmented = codec.augment(pairs, seed=seed, copies=copies)
    out_rows = []
    counters: dict[str, int] = {}
    for pair in augmented:
        if pair.source is None:
            original = rows[len(out_rows)]
            out_rows.append({"id": original["id"], "input": pair.input,
                             "target": codec.linearize(pair.triples)})
        else:
            source_id = rows[pair.source]["id"]
            counters[source_id] = counters.get(source_id, 0) + 1
            out_rows.append({"id": f"{source_id}#aug{counters[source_id]}",
                             "input": pair.input,
                             "target": codec.linearize(pair.triples),
                             "augmented": True})
    _write_jsonl(out, out_rows)
    manifest.write_manifest("augment", out,
                            {"inputs": inputs_path, "corpus": corpus_path},
                            {"copies": copies, "seed": seed})
    return out_rows


def make_backend(name: str, *, stub_table: str | Path | None = None,
                 inputs_path: str | Path | None = None,
                 endpoint: str | None = None, max_batch: int = 32,
                 jobs: int = 1) -> GenerationBackend:
    if name == "stub":
        table_path = stub_table if stub_table is not None else inputs_path
        if table_path is None:
            raise ValueError("stub backend needs --stub-table (or an inputs file)")
        return StubBackend.from_model_inputs(table_path)
    if name == "remote":
        if not endpoint:
            raise ValueError("remote backend needs --endpoint")
        return RemoteBackend(endpoint, max_batch=max_batch,
                             max_in_flight=max(jobs, 1))
    raise ValueError(f"unknown backend {name!r}; expected stub or remote")


def run_generate(inputs_path: str | Path, out: str | Path, *,
                 backend: str = "stub", stub_table: str | Path | None = None,
                 endpoint: str | None = None, strategy: str = "greedy",
                 top_k: int = 20, top_p: float = 0.95, max_new_tokens: int = 128,
                 seed: int | None = None, max_batch: int = 32,
                 jobs: int = 1) -> list[dict]:
    rows = read_model_inputs(inputs_path)
    decoding = DecodingConfig(strategy=strategy, top_k=top_k, top_p=top_p,
                              max_new_tokens=max_new_tokens, seed=seed)
    gen = make_backend(backend, stub_table=stub_table, inputs_path=inputs_path,
                       endpoint=endpoint, max_batch=max_batch, jobs=jobs)
    inputs = [row["input"] for row in rows]
    if backend == "remote" and jobs > 1:
        chunks = [inputs[i:i + max_batch] for i in range(0, len(inputs), max_batch)]
        outputs = [o for chunk_out in
                   _parallel_map(lambda c: gen.generate(c, decoding), chunks, jobs)
                   for o in chunk_out]
    else:
        outputs = gen.generate(inputs, decoding)
    if len(outputs) != len(inputs):
        raise RuntimeError(f"backend returned {len(outputs)} outputs for "
                           f"{len(inputs)} inputs")
    out_rows = [{"id": row["id"], "output": output}
                for row, output in zip(rows, outputs)]
    _write_jsonl(out, out_rows)
    inputs_for_manifest = {"inputs": inputs_path}
    if backend == "stub" and stub_table is not None:
        inputs_for_manifest["stub_table"] = stub_table
    manifest.write_manifest("generate", out, inputs_for_manifest,
                            {"backend": backend, "endpoint": endpoint,
                             "decoding": decoding.to_wire()})
    return out_rows


def run_postprocess(generations_path: str | Path, corpus_path: str | Path,
                    out: str | Path, *, schema_path: str | Path | None = None,
                    epsilon: float = 0.85, max_subspan_words: int = 10,
                    jree_epsilon: float | None = None, jobs: int = 1) -> list[dict]:
    corpus = {ex.id: ex for ex in read_corpus(corpus_path)}
    if schema_path is not None:
        schema = RelationSchema.from_file(schema_path)
    else:
        log.warning("no --schema given; deriving the relation set from the corpus")
        schema = derive_schema(corpus.values())
    cfg = postprocess.SimilarityConfig(epsilon=epsilon,
                                       max_subspan_words=max_subspan_words,
                                       jree_epsilon=jree_epsilon)
    rows = read_generations(generations_path)
    unknown = [row["id"] for row in rows if row["id"] not in corpus]
    if unknown:
        raise ValueError(f"generations reference ids absent from corpus: {unknown[:5]}")

    def resolve(row: dict) -> dict:
        example = corpus[row["id"]]
        candidates = codec.parse_generated(row["output"], schema)
        if example.task in (TaskKind.ETRC, TaskKind.RC) and example.gold_entities:
            triples = postprocess.resolve_rc(candidates, example.gold_entities, cfg)
        else:
            triples = postprocess.resolve_jree(candidates, example.text, cfg)
        return {"id": example.id,
                "triples": [{"subject": t.subject, "relation": t.relation,
                             "object": t.object} for t in triples],
                "rejected": [{"raw": c.raw, "reason": c.reject_reason}
                             for c in candidates if c.reject_reason is not None]}

    out_rows = _parallel_map(resolve, rows, jobs)
    _write_jsonl(out, out_rows)
    inputs_for_manifest = {"generations": generations_path, "corpus": corpus_path}
    if schema_path is not None:
        inputs_for_manifest["schema"] = schema_path
    manifest.write_manifest("postprocess", out, inputs_for_manifest,
                            {"epsilon": epsilon, "max_subspan_words": max_subspan_words,
                             "jree_epsilon": jree_epsilon})
    return out_rows


def run_evaluate(predictions_path: str | Path, corpus_path: str | Path, *,
                 out: str | Path | None = None, csv_out: str | Path | None = None,
                 casefold: bool = False, grounded_path: str | Path | None = None,
                 quiet: bool = False) -> evaluate.EvalReport:
    corpus = read_corpus(corpus_path)
    gold = {ex.id: list(ex.gold_triples) for ex in corpus}
    predictions = read_predictions(predictions_path)
    report = evaluate.micro_prf(predictions, gold, casefold=casefold)
    if grounded_path is not None:
        knowledge = kb.read_grounded(grounded_path)
        report.found_info_ratio = evaluate.found_info_ratio(knowledge, corpus)
    if out is not None:
        with manifest.atomic_output(out) as tmp:
            tmp.write_text(json.dumps(report.to_dict(), ensure_ascii=False,
                                      indent=2, sort_keys=True) + "\n",
                           encoding="utf-8")
        inputs_for_manifest = {"predictions": predictions_path, "corpus": corpus_path}
        if grounded_path is not None:
            inputs_for_manifest["grounded"] = grounded_path
        manifest.write_manifest("evaluate", out, inputs_for_manifest,
                                {"casefold": casefold})
    if csv_out is not None:
        with manifest.atomic_output(csv_out) as tmp:
            evaluate.write_breakdown_csv(report, tmp)
    if not quiet:
        print(report.render_table())
    return report


def run_stats(corpus_path: str | Path, *, grounded_path: str | Path | None = None,
              schema_path: str | Path | None = None,
              out: str | Path | None = None, quiet: bool = False) -> dict:
    corpus = read_corpus(corpus_path)
    if schema_path is not None:
        schema = RelationSchema.from_file(schema_path)
    else:
        schema = derive_schema(corpus)
    stats = validate_corpus(corpus, schema).to_dict()
    if grounded_path is not None:
        knowledge = kb.read_grounded(grounded_path)
        stats["found_info_ratio"] = evaluate.found_info_ratio(knowledge, corpus)
        stats["grounded_facts"] = sum(len(v) for v in knowledge.values())
    if out is not None:
        with manifest.atomic_output(out) as tmp:
            tmp.write_text(json.dumps(stats, ensure_ascii=False, indent=2,
                                      sort_keys=True) + "\n", encoding="utf-8")
        inputs_for_manifest = {"corpus": corpus_path}
        if grounded_path is not None:
            inputs_for_manifest["grounded"] = grounded_path
        manifest.write_manifest("stats", out, inputs_for_manifest, {})
    if not quiet:
        print(json.dumps(stats, ensure_ascii=False, indent=2, sort_keys=True))
    return stats


def run_all(input_path: str | Path, out_dir: str | Path, *, fmt: str = "canonical",
            el_path: str | Path, snapshot_path: str | Path,
            schema_path: str | Path | None = None, task: str | None = None,
            keep_negatives: bool = False, train_el_path: str | Path | None = None,
            type_property: str = "instance_of",
            el_threshold: float = DEFAULT_EL_THRESHOLD,
            el_top_k: int = DEFAULT_EL_TOP_K, template: str | None = None,
            ablation: str = "full", es_token: str = "[es]", gr_token: str = "[gr]",
            prefix: str | None = None, surface_labels: bool = False,
            augment_copies: int = 0, backend: str = "stub",
            stub_table: str | Path | None = None, endpoint: str | None = None,
            strategy: str = "greedy", top_k: int = 20, top_p: float = 0.95,
            max_new_tokens: int = 128, seed: int = 0, epsilon: float = 0.85,
            max_subspan_words: int = 10, jree_epsilon: float | None = None,
            casefold: bool = False, max_batch: int = 32, jobs: int = 1,
            quiet: bool = False) -> evaluate.EvalReport:
    """Chain every stage over one corpus, writing artifacts into ``out_dir``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    corpus_path = out_dir / "corpus.jsonl"
    corpus = run_ingest(input_path, fmt, corpus_path, task=task,
                        keep_negatives=keep_negatives)

    if schema_path is None:
        schema = derive_schema(corpus)
        schema_path = out_dir / "schema.json"
        with manifest.atomic_output(schema_path) as tmp:
            schema.to_file(tmp)

    grounded_path = out_dir / "grounded.jsonl"
    run_ground(corpus_path, el_path, snapshot_path, grounded_path,
               train_el_path=train_el_path, type_property=type_property,
               el_threshold=el_threshold, el_top_k=el_top_k)

    inputs_path = out_dir / "model_inputs.jsonl"
    run_template(corpus_path, grounded_path, inputs_path, template=template,
                 ablation=ablation, es_token=es_token, gr_token=gr_token,
                 prefix=prefix, surface_labels=surface_labels)

    if augment_copies > 0:
        augmented_path = out_dir / "model_inputs_augmented.jsonl"
        run_augment(inputs_path, corpus_path, augmented_path,
                    copies=augment_copies, seed=seed)
        inputs_path = augmented_path
        # augmented rows share their source's text and gold triples downstream
        by_id = {ex.id: ex for ex in corpus}
        extended = list(corpus)
        for row in read_model_inputs(inputs_path):
            if row.get("augmented"):
                source = by_id[row["id"].split("#aug")[0]]
                extended.append(Example(id=row["id"], text=source.text,
                                        gold_entities=source.gold_entities,
                                        gold_triples=source.gold_triples,
                                        task=source.task))
        corpus_path = out_dir / "corpus_augmented.jsonl"
        with manifest.atomic_output(corpus_path) as tmp:
            write_corpus(extended, tmp)

    generations_path = out_dir / "generations.jsonl"
    run_generate(inputs_path, generations_path, backend=backend,
                 stub_table=stub_table, endpoint=endpoint, strategy=strategy,
                 top_k=top_k, top_p=top_p, max_new_tokens=max_new_tokens,
                 seed=seed if strategy == "topk_nucleus" else None,
                 max_batch=max_batch, jobs=jobs)

    predictions_path = out_dir / "predictions.jsonl"
    run_postprocess(generations_path, corpus_path, predictions_path,
                    schema_path=schema_path, epsilon=epsilon,
                    max_subspan_words=max_subspan_words,
                    jree_epsilon=jree_epsilon, jobs=jobs)

    report_path = out_dir / "report.json"
    report = run_evaluate(predictions_path, corpus_path, out=report_path,
                          csv_out=out_dir / "per_size.csv", casefold=casefold,
                          grounded_path=grounded_path, quiet=quiet)
    return report


# ---------------------------------------------------------------------------
# Argument parsing


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path, encoding="utf-8") as f:
        config = json.load(f)
    if not isinstance(config, dict):
        raise ValueError(f"{path}: config must be a JSON object")
    return config


class _Opt:
    """Resolve option values: explicit flag > config file > default."""

    def __init__(self, args: argparse.Namespace, config: dict):
        self.args = args
        self.config = config

    def __call__(self, name: str, default=None):
        value = getattr(self.args, name, None)
        if value is not None:
            return value
        if name in self.config:
            return self.config[name]
        return default


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file mirroring the flags")
    p.add_argument("--jobs", type=int, help="parallel workers within a stage")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kgrex", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="read a benchmark dump into the canonical corpus")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=CORPUS_FORMATS)
    p.add_argument("--task", choices=[k.value for k in TaskKind])
    p.add_argument("--keep-negatives", action="store_true", default=None)
    p.add_argument("--schema-out")
    p.add_argument("--out", required=True)
    _add_common(p)

    p = sub.add_parser("ground", help="resolve linked entities to type labels")
    p.add_argument("--corpus", required=True)
    p.add_argument("--el", required=True)
    p.add_argument("--snapshot", required=True)
    p.add_argument("--train-el")
    p.add_argument("--property", dest="type_property",
                   choices=[t.value for t in kb.TypeProperty])
    p.add_argument("--el-threshold", type=float)
    p.add_argument("--el-top-k", type=int)
    p.add_argument("--out", required=True)
    _add_common(p)

    p = sub.add_parser("template", help="build knowledge-enhanced model inputs")
    p.add_argument("--corpus", required=True)
    p.add_argument("--grounded", required=True)
    p.add_argument("--template", choices=["t1", "t2"])
    p.add_argument("--ablation", choices=templates.ABLATION_MODES)
    p.add_argument("--es-token")
    p.add_argument("--gr-token")
    p.add_argument("--prefix")
    p.add_argument("--surface-labels", action="store_true", default=None)
    p.add_argument("--out", required=True)
    _add_common(p)

    p = sub.add_parser("augment", help="append shuffled-target training copies")
    p.add_argument("--inputs", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--copies", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    _add_common(p)

    p = sub.add_parser("generate", help="run the generation backend over inputs")
    p.add_argument("--inputs", required=True)
    p.add_argument("--backend", choices=["stub", "remote"])
    p.add_argument("--stub-table")
    p.add_argument("--endpoint")
    p.add_argument("--strategy", choices=["greedy", "topk_nucleus"])
    p.add_argument("--top-k", type=int)
    p.add_argument("--top-p", type=float)
    p.add_argument("--max-new-tokens", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--max-batch", type=int)
    p.add_argument("--out", required=True)
    _add_common(p)

    p = sub.add_parser("postprocess", help="parse and resolve generated triples")
    p.add_argument("--generations", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--schema")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--max-subspan-words", type=int)
    p.add_argument("--jree-epsilon", type=float)
    p.add_argument("--out", required=True)
    _add_common(p)

    p = sub.add_parser("evaluate", help="score predictions against gold triples")
    p.add_argument("--predictions", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--grounded")
    p.add_argument("--casefold", action="store_true", default=None)
    p.add_argument("--csv")
    p.add_argument("--out")
    _add_common(p)

    p = sub.add_parser("stats", help="corpus validation and grounding statistics")
    p.add_argument("--corpus", required=True)
    p.add_argument("--grounded")
    p.add_argument("--schema")
    p.add_argument("--out")
    _add_common(p)

    p = sub.add_parser("run-all", help="chain every stage over one corpus")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=CORPUS_FORMATS)
    p.add_argument("--task", choices=[k.value for k in TaskKind])
    p.add_argument("--keep-negatives", action="store_true", default=None)
    p.add_argument("--el", required=True)
    p.add_argument("--snapshot", required=True)
    p.add_argument("--schema")
    p.add_argument("--train-el")
    p.add_argument("--property", dest="type_property",
                   choices=[t.value for t in kb.TypeProperty])
    p.add_argument("--el-threshold", type=float)
    p.add_argument("--el-top-k", type=int)
    p.add_argument("--template", choices=["t1", "t2"])
    p.add_argument("--ablation", choices=templates.ABLATION_MODES)
    p.add_argument("--es-token")
    p.add_argument("--gr-token")
    p.add_argument("--prefix")
    p.add_argument("--surface-labels", action="store_true", default=None)
    p.add_argument("--augment-copies", type=int)
    p.add_argument("--backend", choices=["stub", "remote"])
    p.add_argument("--stub-table")
    p.add_argument("--endpoint")
    p.add_argument("--strategy", choices=["greedy", "topk_nucleus"])
    p.add_argument("--top-k", type=int)
    p.add_argument("--top-p", type=float)
    p.add_argument("--max-new-tokens", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--max-subspan-words", type=int)
    p.add_argument("--jree-epsilon", type=float)
    p.add_argument("--casefold", action="store_true", default=None)
    p.add_argument("--max-batch", type=int)
    p.add_argument("--out-dir", required=True)
    _add_common(p)

    return parser


def _dispatch(args: argparse.Namespace) -> int:
    opt = _Opt(args, _load_config(getattr(args, "config", None)))
    if opt("verbose", False):
        logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")

    if args.command == "ingest":
        run_ingest(args.input, opt("format", "canonical"), args.out,
                   task=opt("task"), keep_negatives=opt("keep_negatives", False),
                   schema_out=opt("schema_out"))
    elif args.command == "ground":
        run_ground(args.corpus, args.el, args.snapshot, args.out,
                   train_el_path=opt("train_el"),
                   type_property=opt("type_property", "instance_of"),
                   el_threshold=opt("el_threshold", DEFAULT_EL_THRESHOLD),
                   el_top_k=opt("el_top_k", DEFAULT_EL_TOP_K))
    elif args.command == "template":
        run_template(args.corpus, args.grounded, args.out,
                     template=opt("template"), ablation=opt("ablation", "full"),
                     es_token=opt("es_token", "[es]"), gr_token=opt("gr_token", "[gr]"),
                     prefix=opt("prefix"),
                     surface_labels=opt("surface_labels", False))
    elif args.command == "augment":
        run_augment(args.inputs, args.corpus, args.out,
                    copies=opt("copies", 1), seed=opt("seed", 0))
    elif args.command == "generate":
        run_generate(args.inputs, args.out, backend=opt("backend", "stub"),
                     stub_table=opt("stub_table"), endpoint=opt("endpoint"),
                     strategy=opt("strategy", "greedy"), top_k=opt("top_k", 20),
                     top_p=opt("top_p", 0.95),
                     max_new_tokens=opt("max_new_tokens", 128), seed=opt("seed"),
                     max_batch=opt("max_batch", 32), jobs=opt("jobs", 1))
    elif args.command == "postprocess":
        run_postprocess(args.generations, args.corpus, args.out,
                        schema_path=opt("schema"), epsilon=opt("epsilon", 0.85),
                        max_subspan_words=opt("max_subspan_words", 10),
                        jree_epsilon=opt("jree_epsilon"), jobs=opt("jobs", 1))
    elif args.command == "evaluate":
        run_evaluate(args.predictions, args.corpus, out=opt("out"),
                     csv_out=opt("csv"), casefold=opt("casefold", False),
                     grounded_path=opt("grounded"))
    elif args.command == "stats":
        run_stats(args.corpus, grounded_path=opt("grounded"),
                  schema_path=opt("schema"), out=opt("out"))
    elif args.command == "run-all":
        report = run_all(
            args.input, args.out_dir, fmt=opt("format", "canonical"),
            el_path=args.el, snapshot_path=args.snapshot, schema_path=opt("schema"),
            task=opt("task"), keep_negatives=opt("keep_negatives", False),
            train_el_path=opt("train_el"),
            type_property=opt("type_property", "instance_of"),
            el_threshold=opt("el_threshold", DEFAULT_EL_THRESHOLD),
            el_top_k=opt("el_top_k", DEFAULT_EL_TOP_K), template=opt("template"),
            ablation=opt("ablation", "full"), es_token=opt("es_token", "[es]"),
            gr_token=opt("gr_token", "[gr]"), prefix=opt("prefix"),
            surface_labels=opt("surface_labels", False),
            augment_copies=opt("augment_copies", 0), backend=opt("backend", "stub"),
            stub_table=opt("stub_table"), endpoint=opt("endpoint"),
            strategy=opt("strategy", "greedy"), top_k=opt("top_k", 20),
            top_p=opt("top_p", 0.95), max_new_tokens=opt("max_new_tokens", 128),
            seed=opt("seed", 0), epsilon=opt("epsilon", 0.85),
            max_subspan_words=opt("max_subspan_words", 10),
            jree_epsilon=opt("jree_epsilon"), casefold=opt("casefold", False),
            max_batch=opt("max_batch", 32), jobs=opt("jobs", 1))
        print(f"micro-F1 {report.f1:.4f} (P {report.precision:.4f}, "
              f"R {report.recall:.4f})")
    else:  # pragma: no cover - argparse enforces the choices
        raise ValueError(f"unknown command {args.command!r}")
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
