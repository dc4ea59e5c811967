from __future__ import annotations

import json
from pathlib import Path

import pytest

from kgrex import cli, manifest
from kgrex.model import read_corpus


def fixture_args(fixtures_dir, name):
    d = fixtures_dir / name
    return d / "corpus.jsonl", d / "el.jsonl", d / "snapshot.jsonl", d / "schema.json"


def run_all_argv(fixtures_dir, name, out_dir, *extra):
    corpus, el, snap, schema = fixture_args(fixtures_dir, name)
    return ["run-all", "--input", str(corpus), "--format", "canonical",
            "--el", str(el), "--snapshot", str(snap), "--schema", str(schema),
            "--out-dir", str(out_dir), *extra]


class TestStages:
    def test_stagewise_pipeline_matches_run_all(self, fixtures_dir, tmp_path):
        corpus, el, snap, schema = fixture_args(fixtures_dir, "webnlg")
        work = tmp_path / "stages"
        work.mkdir()
        steps = [
            ["ingest", "--input", str(corpus), "--format", "canonical",
             "--out", str(work / "corpus.jsonl")],
            ["ground", "--corpus", str(work / "corpus.jsonl"), "--el", str(el),
             "--snapshot", str(snap), "--out", str(work / "grounded.jsonl")],
            ["template", "--corpus", str(work / "corpus.jsonl"),
             "--grounded", str(work / "grounded.jsonl"),
             "--out", str(work / "inputs.jsonl")],
            ["generate", "--inputs", str(work / "inputs.jsonl"),
             "--backend", "stub", "--out", str(work / "gens.jsonl")],
            ["postprocess", "--generations", str(work / "gens.jsonl"),
             "--corpus", str(work / "corpus.jsonl"), "--schema", str(schema),
             "--out", str(work / "preds.jsonl")],
            ["evaluate", "--predictions", str(work / "preds.jsonl"),
             "--corpus", str(work / "corpus.jsonl"),
             "--out", str(work / "report.json")],
        ]
        for argv in steps:
            assert cli.main(argv) == 0, argv
        report = json.loads((work / "report.json").read_text())
        assert report["f1"] == 1.0
        # every artifact carries a manifest with input hashes
        for artifact in ("corpus.jsonl", "grounded.jsonl", "inputs.jsonl",
                         "gens.jsonl", "preds.jsonl", "report.json"):
            m = json.loads(manifest.manifest_path(work / artifact).read_text())
            assert m["output"]["file"] == artifact
            assert all(len(v["sha256"]) == 64 for v in m["inputs"].values())

    def test_ingest_native_and_schema_out(self, fixtures_dir, tmp_path):
        out = tmp_path / "corpus.jsonl"
        schema_out = tmp_path / "schema.json"
        assert cli.main(["ingest", "--input",
                         str(fixtures_dir / "native" / "nyt_sample.jsonl"),
                         "--format", "nyt", "--out", str(out),
                         "--schema-out", str(schema_out)]) == 0
        corpus = read_corpus(out)
        assert len(corpus) == 3
        schema = json.loads(schema_out.read_text())
        assert "capital_of" in schema["relations"]

    def test_augment_stage(self, fixtures_dir, tmp_path):
        corpus, el, snap, schema = fixture_args(fixtures_dir, "webnlg")
        work = tmp_path
        cli.main(["ground", "--corpus", str(corpus), "--el", str(el),
                  "--snapshot", str(snap), "--out", str(work / "grounded.jsonl")])
        cli.main(["template", "--corpus", str(corpus),
                  "--grounded", str(work / "grounded.jsonl"),
                  "--out", str(work / "inputs.jsonl")])
        assert cli.main(["augment", "--inputs", str(work / "inputs.jsonl"),
                         "--corpus", str(corpus), "--copies", "1",
                         "--seed", "11", "--out", str(work / "aug.jsonl")]) == 0
        rows = cli.read_model_inputs(work / "aug.jsonl")
        plain = [r for r in rows if not r.get("augmented")]
        extra = [r for r in rows if r.get("augmented")]
        n_multi = sum(1 for ex in read_corpus(corpus)
                      if len(set(ex.gold_triples)) > 1)
        assert len(extra) == n_multi
        assert all("#aug" in r["id"] for r in extra)
        by_id = {r["id"]: r for r in plain}
        for r in extra:
            source = by_id[r["id"].split("#aug")[0]]
            assert r["input"] == source["input"]
            assert sorted(r["target"].split(" ; ")) == sorted(
                source["target"].split(" ; "))
            assert r["target"] != source["target"]

    def test_stats_found_info_ratio(self, fixtures_dir, tmp_path, capsys):
        corpus, el, snap, schema = fixture_args(fixtures_dir, "webnlg")
        grounded = tmp_path / "grounded.jsonl"
        cli.main(["ground", "--corpus", str(corpus), "--el", str(el),
                  "--snapshot", str(snap), "--out", str(grounded)])
        assert cli.main(["stats", "--corpus", str(corpus), "--schema",
                         str(schema), "--grounded", str(grounded),
                         "--out", str(tmp_path / "stats.json")]) == 0
        stats = json.loads((tmp_path / "stats.json").read_text())
        # independent hand count over the artifact files
        facts = sum(len(json.loads(line)["facts"])
                    for line in grounded.read_text().splitlines())
        entities = 0
        for ex in read_corpus(corpus):
            args = {t.subject for t in ex.gold_triples}
            args.update(t.object for t in ex.gold_triples)
            entities += len(args)
        assert stats["found_info_ratio"] == pytest.approx(facts / entities)
        assert stats["violations"] == []


class TestRunAll:
    def test_run_all_is_deterministic(self, fixtures_dir, tmp_path):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert cli.main(run_all_argv(fixtures_dir, "webnlg", out_a,
                                     "--augment-copies", "1")) == 0
        assert cli.main(run_all_argv(fixtures_dir, "webnlg", out_b,
                                     "--augment-copies", "1")) == 0
        files_a = sorted(p.name for p in out_a.iterdir())
        assert files_a == sorted(p.name for p in out_b.iterdir())
        for name in files_a:
            assert (out_a / name).read_bytes() == (out_b / name).read_bytes(), name

    def test_run_all_with_augmentation_still_perfect(self, fixtures_dir,
                                                     tmp_path, capsys):
        assert cli.main(run_all_argv(fixtures_dir, "webnlg", tmp_path / "r",
                                     "--augment-copies", "2")) == 0
        report = json.loads((tmp_path / "r" / "report.json").read_text())
        assert report["f1"] == 1.0

    def test_ablation_no_kg_flag(self, fixtures_dir, tmp_path):
        assert cli.main(run_all_argv(fixtures_dir, "webnlg", tmp_path / "r",
                                     "--ablation", "no_kg")) == 0
        rows = cli.read_model_inputs(tmp_path / "r" / "model_inputs.jsonl")
        assert all("[gr]" not in row["input"] for row in rows)


class TestErrorPaths:
    def test_evaluate_mismatched_ids_exits_with_names(self, fixtures_dir,
                                                      tmp_path, capsys):
        corpus, *_ = fixture_args(fixtures_dir, "webnlg")
        preds = tmp_path / "preds.jsonl"
        preds.write_text('{"id": "test_500", "triples": [], "rejected": []}\n')
        code = cli.main(["evaluate", "--predictions", str(preds),
                         "--corpus", str(corpus)])
        assert code == 1
        err = capsys.readouterr().err
        assert err.startswith("error:")
        assert "missing from predictions" in err and "test_501" in err

    def test_unknown_generation_id(self, fixtures_dir, tmp_path, capsys):
        corpus, *_ = fixture_args(fixtures_dir, "webnlg")
        gens = tmp_path / "gens.jsonl"
        gens.write_text('{"id": "ghost", "output": "x"}\n')
        code = cli.main(["postprocess", "--generations", str(gens),
                         "--corpus", str(corpus),
                         "--out", str(tmp_path / "preds.jsonl")])
        assert code == 1
        assert "ghost" in capsys.readouterr().err
        assert not (tmp_path / "preds.jsonl").exists()

    def test_failed_stage_leaves_no_partial_output(self, tmp_path):
        target = tmp_path / "artifact.jsonl"
        with pytest.raises(RuntimeError):
            with manifest.atomic_output(target) as tmp:
                Path(tmp).write_text("partial garbage")
                raise RuntimeError("boom")
        assert not target.exists()
        assert not list(tmp_path.iterdir())


class TestConfigFile:
    def test_flags_override_config(self, fixtures_dir, tmp_path):
        corpus, el, snap, schema = fixture_args(fixtures_dir, "webnlg")
        work = tmp_path
        cli.main(["ground", "--corpus", str(corpus), "--el", str(el),
                  "--snapshot", str(snap), "--out", str(work / "grounded.jsonl")])
        cli.main(["template", "--corpus", str(corpus),
                  "--grounded", str(work / "grounded.jsonl"),
                  "--out", str(work / "inputs.jsonl")])
        cli.main(["generate", "--inputs", str(work / "inputs.jsonl"),
                  "--out", str(work / "gens.jsonl")])
        config = work / "config.json"
        config.write_text(json.dumps({"epsilon": 0.5, "max_subspan_words": 4}))

        cli.main(["postprocess", "--generations", str(work / "gens.jsonl"),
                  "--corpus", str(corpus), "--schema", str(schema),
                  "--config", str(config), "--out", str(work / "p1.jsonl")])
        m1 = json.loads(manifest.manifest_path(work / "p1.jsonl").read_text())
        assert m1["config"]["epsilon"] == 0.5
        assert m1["config"]["max_subspan_words"] == 4

        cli.main(["postprocess", "--generations", str(work / "gens.jsonl"),
                  "--corpus", str(corpus), "--schema", str(schema),
                  "--config", str(config), "--epsilon", "0.9",
                  "--out", str(work / "p2.jsonl")])
        m2 = json.loads(manifest.manifest_path(work / "p2.jsonl").read_text())
        assert m2["config"]["epsilon"] == 0.9
        assert m2["config"]["max_subspan_words"] == 4

    def test_config_must_be_object(self, tmp_path, capsys):
        config = tmp_path / "c.json"
        config.write_text("[1, 2]")
        code = cli.main(["stats", "--corpus", "nowhere.jsonl",
                         "--config", str(config)])
        assert code == 1
        assert "config must be a JSON object" in capsys.readouterr().err
