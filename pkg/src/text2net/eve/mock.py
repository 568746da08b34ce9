"""In-memory emulator double for tests and offline demos.

Implements exactly the endpoints the client uses (login, lab, nodes,
networks, interface linking, start, config get/set) over real HTTP on the
loopback interface, with injectable faults: failing a specific call kind
permanently and one-shot session expiry after N authenticated calls.
"""

from __future__ import annotations

import json
import re
import threading
import uuid
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer


class MockEveServer:
    def __init__(self, password: str | None = None) -> None:
        self.password = password  # None accepts anything
        self.lock = threading.RLock()
        self.reset_state()
        self._httpd: ThreadingHTTPServer | None = None
        self._thread: threading.Thread | None = None

    def reset_state(self) -> None:
        with self.lock:
            self.labs: dict[str, dict] = {}
            self.cookies: set[str] = set()
            self.call_log: list[tuple[str, str]] = []
            self.kind_counts: dict[str, int] = {}
            self.fail_rules: list[dict] = []
            self.expire_after: int | None = None
            self.authed_calls = 0

    # fault injection -----------------------------------------------------
    def fail_on(
        self, kind: str, occurrence: int = 1, status: int = 500, times: int | None = None
    ) -> None:
        """Fail the Nth call of this kind.

        times=None keeps failing every later attempt too (permanent
        fault); times=k fails exactly k attempts and then recovers.
        """
        self.fail_rules.append(
            {"kind": kind, "occurrence": occurrence, "status": status,
             "times": times, "active": False}
        )

    def expire_session_after(self, authed_calls: int) -> None:
        """Invalidate all cookies once, after N successful authed calls."""
        self.expire_after = authed_calls

    # lifecycle ------------------------------------------------------------
    def start(self) -> str:
        handler = _make_handler(self)
        self._httpd = ThreadingHTTPServer(("127.0.0.1", 0), handler)
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)
        self._thread.start()
        return self.base_url

    @property
    def base_url(self) -> str:
        host, port = self._httpd.server_address
        return f"http://{host}:{port}"

    def stop(self) -> None:
        if self._httpd:
            self._httpd.shutdown()
            self._httpd.server_close()
            self._httpd = None

    # helpers used by the handler ------------------------------------------
    def classify(self, method: str, path: str) -> str:
        for pattern, kind in _ROUTE_KINDS:
            if re.fullmatch(pattern[1], path) and method == pattern[0]:
                return kind
        return "unknown"

    def should_fail(self, kind: str) -> int | None:
        count = self.kind_counts.get(kind, 0)
        for rule in self.fail_rules:
            if rule["kind"] != kind:
                continue
            if not rule["active"] and count == rule["occurrence"]:
                rule["active"] = True
            if rule["active"]:
                if rule["times"] is None:
                    return rule["status"]
                if rule["times"] > 0:
                    rule["times"] -= 1
                    if rule["times"] == 0:
                        rule["active"] = False
                    return rule["status"]
        return None


_ROUTE_KINDS = [
    (("POST", r"/api/auth/login"), "login"),
    (("POST", r"/api/labs"), "create_lab"),
    (("POST", r"/api/labs/[^/]+/nodes"), "create_node"),
    (("POST", r"/api/labs/[^/]+/networks"), "create_network"),
    (("PUT", r"/api/labs/[^/]+/nodes/\d+/interfaces"), "link"),
    (("GET", r"/api/labs/[^/]+/nodes/\d+/start"), "start"),
    (("PUT", r"/api/labs/[^/]+/configs/\d+"), "push_config"),
    (("GET", r"/api/labs/[^/]+/nodes"), "list_nodes"),
    (("GET", r"/api/labs/[^/]+/networks"), "list_networks"),
    (("GET", r"/api/labs/[^/]+/configs/\d+"), "get_config"),
    (("DELETE", r"/api/labs/[^/]+"), "delete_lab"),
]


def _make_handler(server: MockEveServer):
    class Handler(BaseHTTPRequestHandler):
        def log_message(self, *args):  # keep test output clean
            pass

        def _body(self) -> dict:
            length = int(self.headers.get("Content-Length") or 0)
            if not length:
                return {}
            return json.loads(self.rfile.read(length))

        def _reply(self, status: int, payload: dict | None = None, cookie: str | None = None):
            data = json.dumps(payload or {"status": "ok"}).encode()
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(data)))
            if cookie:
                self.send_header("Set-Cookie", f"unetlab_session={cookie}; path=/")
            self.end_headers()
            self.wfile.write(data)

        def _cookie_ok(self) -> bool:
            header = self.headers.get("Cookie") or ""
            match = re.search(r"unetlab_session=([A-Za-z0-9-]+)", header)
            return bool(match) and match.group(1) in server.cookies

        def _handle(self, method: str):
            path = self.path.split("?")[0].rstrip("/")
            with server.lock:
                kind = server.classify(method, path)
                server.call_log.append((method, path))
                server.kind_counts[kind] = server.kind_counts.get(kind, 0) + 1

                fail_status = server.should_fail(kind)
                if fail_status is not None:
                    self._reply(fail_status, {"status": "injected fault"})
                    return

                if kind == "login":
                    body = self._body()
                    if server.password is not None and body.get("password") != server.password:
                        self._reply(401, {"status": "bad credentials"})
                        return
                    cookie = uuid.uuid4().hex
                    server.cookies.add(cookie)
                    self._reply(200, {"status": "logged in"}, cookie=cookie)
                    return

                if not self._cookie_ok():
                    self._reply(401, {"status": "not authenticated"})
                    return
                server.authed_calls += 1
                if server.expire_after is not None and server.authed_calls >= server.expire_after:
                    server.cookies.clear()
                    server.expire_after = None

                self._dispatch(kind, path, method)

        def _dispatch(self, kind: str, path: str, method: str):
            parts = path.strip("/").split("/")
            if kind == "create_lab":
                name = self._body().get("name", "lab")
                server.labs.setdefault(
                    name, {"nodes": {}, "networks": {}, "configs": {}, "next_id": 1}
                )
                self._reply(200, {"status": "created"})
                return

            lab_name = parts[2] if len(parts) > 2 else ""
            lab = server.labs.get(lab_name)
            if lab is None:
                self._reply(404, {"status": f"lab {lab_name!r} not found"})
                return

            if kind == "create_node":
                body = self._body()
                node_id = lab["next_id"]
                lab["next_id"] += 1
                lab["nodes"][str(node_id)] = {**body, "id": node_id, "interfaces": {},
                                              "started": False}
                self._reply(201, {"data": {"id": node_id}})
            elif kind == "create_network":
                body = self._body()
                net_id = lab["next_id"]
                lab["next_id"] += 1
                lab["networks"][str(net_id)] = {**body, "id": net_id}
                self._reply(201, {"data": {"id": net_id}})
            elif kind == "link":
                node_id = parts[4]
                node = lab["nodes"].get(node_id)
                if node is None:
                    self._reply(404, {"status": "no such node"})
                    return
                for index, net in self._body().items():
                    node["interfaces"][index] = net
                self._reply(200)
            elif kind == "start":
                node_id = parts[4]
                node = lab["nodes"].get(node_id)
                if node is None:
                    self._reply(404, {"status": "no such node"})
                    return
                node["started"] = True
                self._reply(200)
            elif kind == "push_config":
                node_id = parts[4]
                if node_id not in lab["nodes"]:
                    self._reply(404, {"status": "no such node"})
                    return
                lab["configs"][node_id] = self._body().get("data", "")
                self._reply(200)
            elif kind == "list_nodes":
                self._reply(200, {"data": lab["nodes"]})
            elif kind == "list_networks":
                self._reply(200, {"data": lab["networks"]})
            elif kind == "get_config":
                node_id = parts[4]
                if node_id not in lab["configs"]:
                    self._reply(404, {"status": "no config"})
                    return
                self._reply(200, {"data": lab["configs"][node_id]})
            elif kind == "delete_lab":
                server.labs.pop(lab_name, None)
                self._reply(200)
            else:
                self._reply(404, {"status": "unknown endpoint"})

        def do_GET(self):
            self._handle("GET")

        def do_POST(self):
            self._handle("POST")

        def do_PUT(self):
            self._handle("PUT")

        def do_DELETE(self):
            self._handle("DELETE")

    return Handler
