from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import pytest

REPO = Path(__file__).resolve().parents[1]
FIXTURES = REPO / "fixtures"


def pytest_runtest_logreport(report):
    """One visible pass/fail line per acceptance criterion."""
    if "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.skipped:
        print(f"\nACCEPTANCE {name}: SKIP")
    elif report.when == "call":
        print(f"\nACCEPTANCE {name}: {'PASS' if report.passed else 'FAIL'}")


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


class _Handler(BaseHTTPRequestHandler):
    def log_message(self, *args):  # keep test output clean
        pass

    def _reply(self, status: int, payload) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self):
        app = self.server.app
        with app.lock:
            app.requests.append(("GET", self.path, None))
        status, payload = app.on_get(self.path)
        self._reply(status, payload)

    def do_POST(self):
        app = self.server.app
        length = int(self.headers.get("Content-Length", 0))
        body = json.loads(self.rfile.read(length) or b"{}")
        with app.lock:
            app.requests.append(("POST", self.path, body))
        status, payload = app.on_post(self.path, body)
        self._reply(status, payload)


class LocalHTTPApp:
    """A tiny configurable JSON server for exercising the HTTP clients.

    ``on_get``/``on_post`` return (status, payload); every request is
    recorded in ``requests`` for call-count assertions.
    """

    def __init__(self):
        self.requests: list[tuple] = []
        self.lock = threading.Lock()
        self.on_get = lambda path: (404, {"error": "not found"})
        self.on_post = lambda path, body: (404, {"error": "not found"})
        self._server = ThreadingHTTPServer(("127.0.0.1", 0), _Handler)
        self._server.app = self
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()
        self.url = f"http://127.0.0.1:{self._server.server_address[1]}"

    def close(self):
        self._server.shutdown()
        self._server.server_close()
        self._thread.join(timeout=5)


@pytest.fixture
def http_app():
    app = LocalHTTPApp()
    yield app
    app.close()
