"""Local replay fixture server: canned JSON bodies keyed by (path, page)."""

import json
from http.server import BaseHTTPRequestHandler
from urllib.parse import parse_qs, urlparse


def issue_json(i, labels=(), pr=False, created="2022-01-05T10:00:00Z"):
    body = {
        "number": i,
        "created_at": created,
        "labels": [{"name": name} for name in labels],
    }
    if pr:
        body["pull_request"] = {"url": "https://example.invalid"}
    return body


class ReplayHandler(BaseHTTPRequestHandler):
    """Scripted failures are served first, then canned responses by path/page."""

    responses: dict = {}
    failures: list = []
    requests_seen: list = []

    def do_GET(self):
        type(self).requests_seen.append(self.path)
        if type(self).failures:
            status, headers = type(self).failures.pop(0)
            self.send_response(status)
            for key, value in headers.items():
                self.send_header(key, value)
            self.end_headers()
            return
        parsed = urlparse(self.path)
        page = int(parse_qs(parsed.query).get("page", ["1"])[0])
        key = (parsed.path, page)
        payload, headers = type(self).responses.get(key, ([], {}))
        body = json.dumps(payload).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        for name, value in headers.items():
            self.send_header(name, value)
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args):
        pass
