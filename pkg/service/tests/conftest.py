from __future__ import annotations

import json
import socket
import subprocess
import sys
import threading
import time
from pathlib import Path

import pytest

HERE = Path(__file__).resolve().parent
TYPED = HERE / "fixtures" / "typed"


def pytest_runtest_logreport(report):
    if "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.skipped:
        print(f"\nACCEPTANCE {name}: SKIP")
    elif report.when == "call":
        print(f"\nACCEPTANCE {name}: {'PASS' if report.passed else 'FAIL'}")


def run_pipeline_cli(*args: str) -> None:
    """Invoke the extraction pipeline CLI (the service's only client)."""
    subprocess.run([sys.executable, "-m", "kgrex", *args], check=True,
                   capture_output=True, text=True)


@pytest.fixture(scope="session")
def typed_inputs(tmp_path_factory):
    """Model-input files for the type-disambiguation corpus, produced
    through the pipeline CLI: one file with grounded types, one without."""
    work = tmp_path_factory.mktemp("typed")
    run_pipeline_cli("ground", "--corpus", str(TYPED / "corpus.jsonl"),
                     "--el", str(TYPED / "el.jsonl"),
                     "--snapshot", str(TYPED / "snapshot.jsonl"),
                     "--out", str(work / "grounded.jsonl"))
    for ablation, name in (("full", "full.jsonl"), ("no_kg", "nokg.jsonl")):
        run_pipeline_cli("template", "--corpus", str(TYPED / "corpus.jsonl"),
                         "--grounded", str(work / "grounded.jsonl"),
                         "--template", "t2", "--ablation", ablation,
                         "--out", str(work / name))
    return {"dir": work, "corpus": TYPED / "corpus.jsonl",
            "el": TYPED / "el.jsonl", "snapshot": TYPED / "snapshot.jsonl",
            "schema": TYPED / "schema.json",
            "full": work / "full.jsonl", "nokg": work / "nokg.jsonl"}


@pytest.fixture
def tiny_train_file(tmp_path):
    """Eight short pairs; enough for fast behavioral tests."""
    rows = [
        {"id": f"t{i}", "input": f"item {w} , from box {w} .",
         "target": f"{w} stored_in box"}
        for i, w in enumerate(["red", "blue", "green", "gold", "onyx",
                               "teal", "pink", "gray"])
    ]
    path = tmp_path / "train.jsonl"
    path.write_text("\n".join(json.dumps(r) for r in rows) + "\n")
    return path


def wait_for_job(client, job_id: str, timeout: float = 300.0) -> dict:
    deadline = time.time() + timeout
    while time.time() < deadline:
        payload = client.get(f"/train/{job_id}").json()
        if payload["status"] in ("finished", "failed"):
            return payload
        time.sleep(0.2)
    raise TimeoutError(f"job {job_id} did not finish within {timeout}s")


class LiveServer:
    """A real uvicorn server on a free port, for clients speaking HTTP."""

    def __init__(self, checkpoint_dir: str):
        import uvicorn

        from relserve.app import create_app

        with socket.socket() as probe:
            probe.bind(("127.0.0.1", 0))
            self.port = probe.getsockname()[1]
        self.url = f"http://127.0.0.1:{self.port}"
        config = uvicorn.Config(create_app(checkpoint_dir), host="127.0.0.1",
                                port=self.port, log_level="warning")
        self._server = uvicorn.Server(config)
        self._thread = threading.Thread(target=self._server.run, daemon=True)
        self._thread.start()
        for _ in range(200):
            if self._server.started:
                return
            time.sleep(0.05)
        raise RuntimeError("server failed to start")

    def stop(self):
        self._server.should_exit = True
        self._thread.join(timeout=10)


@pytest.fixture
def live_server(tmp_path):
    server = LiveServer(str(tmp_path / "ckpt"))
    yield server
    server.stop()
