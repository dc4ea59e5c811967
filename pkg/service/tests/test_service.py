from __future__ import annotations

import json

import jsonschema
import pytest
from fastapi.testclient import TestClient

from relserve.app import create_app
from conftest import wait_for_job

GENERATE_RESPONSE_SCHEMA = {
    "type": "object",
    "required": ["outputs"],
    "properties": {"outputs": {"type": "array", "items": {"type": "string"}}},
    "additionalProperties": False,
}

TRAIN_STATUS_SCHEMA = {
    "type": "object",
    "required": ["job_id", "status", "metrics"],
    "properties": {
        "job_id": {"type": "string"},
        "status": {"enum": ["queued", "running", "finished", "failed"]},
        "metrics": {
            "type": "object",
            "required": ["train_loss", "val_loss"],
            "properties": {"train_loss": {"type": "array",
                                          "items": {"type": "number"}},
                           "val_loss": {"type": "array",
                                        "items": {"type": "number"}}},
        },
        "error": {"type": "string"},
    },
}


@pytest.fixture
def client(tmp_path):
    app = create_app(str(tmp_path / "ckpt"), max_batch_size=3)
    with TestClient(app) as c:
        yield c


def train(client, path, **overrides):
    body = {"train_file": str(path), "learning_rate": 2e-3, "epochs": 5,
            "batch_size": 1, "max_source_length": 32, "max_target_length": 16,
            "seed": 0}
    body.update(overrides)
    response = client.post("/train", json=body)
    assert response.status_code == 200, response.text
    return wait_for_job(client, response.json()["job_id"])


class TestTrainEndpoint:
    def test_missing_file_is_400(self, client):
        response = client.post("/train", json={"train_file": "nowhere.jsonl"})
        assert response.status_code == 400
        assert "file not found" in response.json()["detail"]

    def test_malformed_file_is_400_with_line(self, client, tmp_path):
        bad = tmp_path / "bad.jsonl"
        bad.write_text('{"input": "a", "target": "b"}\nnot json\n')
        response = client.post("/train", json={"train_file": str(bad)})
        assert response.status_code == 400
        assert "bad.jsonl:2" in response.json()["detail"]

    def test_unknown_job_is_404(self, client):
        assert client.get("/train/job-999").status_code == 404

    def test_invalid_hyperparameters_rejected(self, client, tiny_train_file):
        for overrides in ({"epochs": -1}, {"optimizer": "sgd"},
                          {"scheduler": "cosine"}, {"batch_size": 0}):
            body = {"train_file": str(tiny_train_file), **overrides}
            assert client.post("/train", json=body).status_code == 422

    def test_overfit_job_loss_decreases_monotonically(self, client,
                                                      tiny_train_file):
        job = train(client, tiny_train_file, epochs=5)
        assert job["status"] == "finished"
        jsonschema.validate(job, TRAIN_STATUS_SCHEMA)
        losses = job["metrics"]["train_loss"]
        assert len(losses) == 5
        assert all(b < a for a, b in zip(losses, losses[1:]))

    def test_validation_loss_reported_per_epoch(self, client, tiny_train_file):
        job = train(client, tiny_train_file, epochs=3,
                    val_file=str(tiny_train_file))
        assert len(job["metrics"]["val_loss"]) == 3

    def test_epochs_zero_is_noop(self, client, tiny_train_file):
        train(client, tiny_train_file)
        before = client.post("/generate", json={"inputs": ["item red , from box red ."]})
        job = train(client, tiny_train_file, epochs=0, seed=123)
        assert job["status"] == "finished"
        assert job["metrics"]["train_loss"] == []
        after = client.post("/generate", json={"inputs": ["item red , from box red ."]})
        assert after.json() == before.json()  # model unchanged

    def test_checkpoint_persists_across_restart(self, tmp_path, tiny_train_file):
        ckpt = str(tmp_path / "ckpt")
        with TestClient(create_app(ckpt)) as first:
            train(first, tiny_train_file)
            expected = first.post("/generate",
                                  json={"inputs": ["item teal , from box teal ."]}).json()
        with TestClient(create_app(ckpt)) as second:
            assert second.get("/health").json()["model_loaded"] is True
            got = second.post("/generate",
                              json={"inputs": ["item teal , from box teal ."]}).json()
        assert got == expected


class TestGenerateEndpoint:
    def test_generate_without_checkpoint_is_409(self, client):
        response = client.post("/generate", json={"inputs": ["x"]})
        assert response.status_code == 409
        assert "no checkpoint" in response.json()["detail"]

    def test_greedy_is_deterministic(self, client, tiny_train_file):
        train(client, tiny_train_file)
        body = {"inputs": ["item gold , from box gold ."],
                "decoding": {"strategy": "greedy"}}
        first = client.post("/generate", json=body).json()
        second = client.post("/generate", json=body).json()
        assert first == second

    def test_seeded_sampling_is_reproducible(self, client, tiny_train_file):
        train(client, tiny_train_file)
        body = {"inputs": ["item pink , from box pink ."] * 3,
                "decoding": {"strategy": "topk_nucleus", "top_k": 20,
                             "top_p": 0.95, "seed": 7}}
        first = client.post("/generate", json=body).json()
        second = client.post("/generate", json=body).json()
        assert first == second

    def test_batch_alignment_under_internal_batching(self, client,
                                                     tiny_train_file):
        train(client, tiny_train_file, epochs=8)
        inputs = [f"item {w} , from box {w} ." for w in
                  ["red", "blue", "green", "gold", "onyx", "teal", "pink"]]
        # max_batch_size=3 forces three internal chunks
        batched = client.post("/generate", json={"inputs": inputs}).json()["outputs"]
        single = [client.post("/generate",
                              json={"inputs": [s]}).json()["outputs"][0]
                  for s in inputs]
        assert batched == single

    def test_empty_inputs(self, client, tiny_train_file):
        train(client, tiny_train_file)
        assert client.post("/generate", json={"inputs": []}).json() == {"outputs": []}

    def test_max_new_tokens_truncates(self, client, tiny_train_file):
        train(client, tiny_train_file)
        body = {"inputs": ["item red , from box red ."],
                "decoding": {"strategy": "greedy", "max_new_tokens": 2}}
        outputs = client.post("/generate", json=body).json()["outputs"]
        assert len(outputs[0].split()) <= 2

    def test_response_schema_on_fuzzed_valid_requests(self, client,
                                                      tiny_train_file):
        import random
        train(client, tiny_train_file)
        rng = random.Random(0)
        words = ["item", "red", "box", ",", ".", "from", "zzz"]
        for _ in range(25):
            decoding = {"strategy": rng.choice(["greedy", "topk_nucleus"]),
                        "top_k": rng.randint(1, 40),
                        "top_p": rng.choice([0.5, 0.9, 0.95, 1.0]),
                        "max_new_tokens": rng.randint(1, 32),
                        "seed": rng.randint(0, 99)}
            inputs = [" ".join(rng.choices(words, k=rng.randint(1, 8)))
                      for _ in range(rng.randint(0, 4))]
            response = client.post("/generate", json={"inputs": inputs,
                                                      "decoding": decoding})
            assert response.status_code == 200
            payload = response.json()
            jsonschema.validate(payload, GENERATE_RESPONSE_SCHEMA)
            assert len(payload["outputs"]) == len(inputs)

    def test_generate_refused_while_training(self, client, tiny_train_file):
        response = client.post("/train", json={"train_file": str(tiny_train_file),
                                               "epochs": 10, "batch_size": 1,
                                               "learning_rate": 1e-3})
        job_id = response.json()["job_id"]
        refused = False
        for _ in range(200):
            if client.get("/health").json()["training"]:
                reply = client.post("/generate", json={"inputs": ["x"]})
                if reply.status_code == 409:
                    refused = True
                    break
        wait_for_job(client, job_id)
        assert refused, "never observed a 409 during the training window"

    def test_second_train_while_training_is_409(self, client, tiny_train_file):
        body = {"train_file": str(tiny_train_file), "epochs": 10,
                "batch_size": 1, "learning_rate": 1e-3}
        job_id = client.post("/train", json=body).json()["job_id"]
        conflicted = False
        for _ in range(200):
            if client.get("/health").json()["training"]:
                if client.post("/train", json=body).status_code == 409:
                    conflicted = True
                    break
        wait_for_job(client, job_id)
        assert conflicted
