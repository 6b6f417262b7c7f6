import threading
from http.server import HTTPServer

import pytest

from issueforecast import kernels
from replay import ReplayHandler


@pytest.fixture(scope="session", autouse=True)
def compiled_kernels():
    """Pay any JIT compilation cost once, up front, for the whole session."""
    kernels.warmup()


@pytest.fixture()
def replay_server():
    """(base_url, handler) of a throwaway replay server on a random port."""
    ReplayHandler.responses = {}
    ReplayHandler.failures = []
    ReplayHandler.requests_seen = []
    server = HTTPServer(("127.0.0.1", 0), ReplayHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}", ReplayHandler
    server.shutdown()
    thread.join()
