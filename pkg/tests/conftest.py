import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer
from urllib.parse import parse_qs, urlparse

import numpy as np
import pytest

from qrs.entropy import DeterministicPrng


@pytest.fixture
def prng():
    return DeterministicPrng(20110730)


def make_prng(seed):
    return DeterministicPrng(seed)


@pytest.fixture
def fixture_file(tmp_path):
    """Factory for recorded-entropy files of a given size."""

    def make(size, seed=99, name="entropy.bin"):
        path = tmp_path / name
        path.write_bytes(np.random.default_rng(seed).integers(0, 256, size, dtype=np.uint8).tobytes())
        return path

    return make


class _QrngHandler(BaseHTTPRequestHandler):
    info = {"version": "mock-qrng 2.1", "serial": "QX-0042", "device_type": "usb-mock", "device_id": 7}

    def do_GET(self):
        url = urlparse(self.path)
        if url.path.startswith("/broken/"):
            self._reply(503, "text/plain", b"unavailable")
        elif url.path.endswith("/randbytes"):
            n = int(parse_qs(url.query)["n"][0])
            body = self.server.rng.integers(0, 256, n, dtype=np.uint8).tobytes()
            self.server.requests += 1
            self._reply(200, "application/octet-stream", body)
        elif url.path.endswith("/info"):
            self._reply(200, "application/json", json.dumps(self.info).encode())
        else:
            self._reply(404, "text/plain", b"not found")

    def _reply(self, status, ctype, body):
        self.send_response(status)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args):
        pass


@pytest.fixture
def mock_qrng():
    """Local HTTP server speaking the random-bytes protocol; yields its base URL."""
    server = HTTPServer(("127.0.0.1", 0), _QrngHandler)
    server.rng = np.random.default_rng(5)
    server.requests = 0
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}/qrng"
    server.shutdown()
    server.server_close()


@pytest.fixture
def dead_endpoint():
    # port 9 (discard) is closed in the sandbox
    return "http://127.0.0.1:9/x"


# --- acceptance reporting -----------------------------------------------------

_criteria = {}


def pytest_collection_modifyitems(items):
    for item in items:
        marker = item.get_closest_marker("criterion")
        if marker:
            number, title = marker.args
            _criteria.setdefault(number, {"title": title, "outcomes": []})


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker and (report.when == "call" or report.outcome != "passed"):
        _criteria[marker.args[0]]["outcomes"].append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        entry = _criteria[number]
        outcomes = entry["outcomes"]
        if not outcomes:
            verdict = "NOT RUN"
        elif all(o == "passed" for o in outcomes):
            verdict = "PASS"
        else:
            verdict = "FAIL"
        terminalreporter.write_line(f"criterion {number}: {verdict:7s} {entry['title']}")
