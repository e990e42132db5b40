"""Blackbox oracle access.

Two backends behind one interface: an in-process net (which additionally
exposes input gradients, needed for generator training) and a remote
process reached over a line-delimited JSON protocol (queries only).  A
small threaded TCP server exposes any local net as a remote oracle.

Wire format, one JSON document per line, UTF-8, LF-terminated:

    request:  {"features": [f1, ..., fn]}
    response: {"probs": [p1, ..., pk]}  or  {"error": "<message>"}
"""

from __future__ import annotations

import json
import socket
import socketserver
import threading
import time
from dataclasses import dataclass

import numpy as np

from . import netcore
from .netcore import DimensionError, Mlp


class OracleError(RuntimeError):
    """Remote failure: timeout, malformed reply, protocol error."""


class GradientUnavailableError(OracleError):
    """The backend cannot provide input gradients (remote oracles)."""


def top_class(probs):
    """(argmax index, confidence); ties broken by lowest index."""
    probs = np.asarray(probs, dtype=np.float64)
    if probs.size == 0:
        raise ValueError("empty probability vector")
    idx = int(np.argmax(probs))  # argmax returns the first maximum
    return idx, float(probs[idx])


@dataclass
class OracleStats:
    total_queries: int
    total_seconds: float

    @property
    def seconds_per_query(self):
        return self.total_seconds / self.total_queries if self.total_queries else 0.0


class InProcessOracle:
    """Oracle over a local net; supports gradients; thread-safe."""

    supports_gradient = True

    def __init__(self, net: Mlp):
        if not net.has_softmax_head:
            raise ValueError("oracle nets must have a softmax head")
        if net.out_dim < 2:
            raise ValueError("oracle needs at least 2 classes")
        self.net = net
        self._lock = threading.Lock()
        self._queries = 0
        self._seconds = 0.0

    @property
    def feature_count(self):
        return self.net.in_dim

    @property
    def class_count(self):
        return self.net.out_dim

    @property
    def query_count(self):
        return self._queries

    def stats(self):
        with self._lock:
            return OracleStats(self._queries, self._seconds)

    def _count(self, n, dt):
        with self._lock:
            self._queries += n
            self._seconds += dt

    def classify(self, record):
        t0 = time.perf_counter()
        out = self.net.forward(record)
        self._count(1, time.perf_counter() - t0)
        return out

    def classify_batch(self, records):
        records = np.asarray(records, dtype=np.float64)
        t0 = time.perf_counter()
        out = self.net.forward_batch(records)
        self._count(len(records), time.perf_counter() - t0)
        return out

    def input_gradient(self, record, target):
        return netcore.input_gradient(self.net, record, target)


class RemoteOracle:
    """Oracle over the wire protocol; classify only, no gradients."""

    supports_gradient = False

    def __init__(self, host, port, feature_count, class_count, timeout_ms=5000):
        self.host = host
        self.port = port
        self._feature_count = feature_count
        self._class_count = class_count
        self.timeout_ms = timeout_ms
        self._lock = threading.Lock()
        self._queries = 0
        self._seconds = 0.0
        self._sock = None
        self._reader = None

    @property
    def feature_count(self):
        return self._feature_count

    @property
    def class_count(self):
        return self._class_count

    @property
    def query_count(self):
        return self._queries

    def stats(self):
        with self._lock:
            return OracleStats(self._queries, self._seconds)

    def _connect(self):
        sock = socket.create_connection(
            (self.host, self.port), timeout=self.timeout_ms / 1000.0
        )
        self._sock = sock
        self._reader = sock.makefile("r", encoding="utf-8", newline="\n")

    def close(self):
        with self._lock:
            if self._sock is not None:
                try:
                    self._sock.close()
                finally:
                    self._sock = None
                    self._reader = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def classify(self, record):
        record = np.asarray(record, dtype=np.float64)
        if record.shape != (self._feature_count,):
            raise DimensionError(
                f"expected {self._feature_count} features, got shape {record.shape}"
            )
        line = json.dumps({"features": record.tolist()}) + "\n"
        t0 = time.perf_counter()
        with self._lock:
            try:
                if self._sock is None:
                    self._connect()
                self._sock.sendall(line.encode("utf-8"))
                reply = self._reader.readline()
            except (OSError, socket.timeout) as exc:
                self._sock = None
                raise OracleError(f"oracle connection failed: {exc}") from exc
            self._queries += 1
            self._seconds += time.perf_counter() - t0
        if not reply:
            self._sock = None
            raise OracleError("oracle closed the connection")
        try:
            msg = json.loads(reply)
        except json.JSONDecodeError as exc:
            raise OracleError(f"malformed oracle reply: {reply!r}") from exc
        if "error" in msg:
            raise OracleError(f"oracle error: {msg['error']}")
        if "probs" not in msg or not isinstance(msg["probs"], list):
            raise OracleError(f"malformed oracle reply: {reply!r}")
        probs = np.asarray(msg["probs"], dtype=np.float64)
        if probs.shape != (self._class_count,):
            raise OracleError(
                f"oracle returned {probs.shape[0]} probabilities, "
                f"expected {self._class_count}"
            )
        return probs

    def classify_batch(self, records):
        return np.stack([self.classify(r) for r in records])

    def input_gradient(self, record, target):
        raise GradientUnavailableError(
            "remote oracle is gradient-free; generator training needs an "
            "in-process oracle"
        )


class _OracleRequestHandler(socketserver.StreamRequestHandler):
    def handle(self):
        net = self.server.net
        while True:
            line = self.rfile.readline()
            if not line:
                return
            line = line.strip()
            if not line:
                continue
            try:
                msg = json.loads(line)
                features = msg["features"]
                if not isinstance(features, list):
                    raise TypeError
                record = np.asarray(features, dtype=np.float64)
                if record.shape != (net.in_dim,):
                    reply = {
                        "error": f"expected {net.in_dim} features, got {record.size}"
                    }
                else:
                    reply = {"probs": net.forward(record).tolist()}
            except (json.JSONDecodeError, KeyError, TypeError, ValueError):
                reply = {"error": "malformed request"}
            try:
                self.wfile.write((json.dumps(reply) + "\n").encode("utf-8"))
            except OSError:
                return


class OracleServer:
    """Threaded TCP server answering classify requests for one net.

    The net itself never crosses the wire; clients see probabilities only.
    """

    def __init__(self, net: Mlp, host="127.0.0.1", port=0):
        self._server = socketserver.ThreadingTCPServer(
            (host, port), _OracleRequestHandler, bind_and_activate=True
        )
        self._server.daemon_threads = True
        self._server.net = net
        self._thread = None

    @property
    def address(self):
        return self._server.server_address

    def start(self):
        self._thread = threading.Thread(
            target=self._server.serve_forever, daemon=True
        )
        self._thread.start()
        return self

    def shutdown(self):
        self._server.shutdown()
        self._server.server_close()
        if self._thread is not None:
            self._thread.join()

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc):
        self.shutdown()


def serve(net, host="127.0.0.1", port=0):
    """Run an oracle server in the foreground until interrupted."""
    server = OracleServer(net, host, port)
    print(f"oracle listening on {server.address[0]}:{server.address[1]}")
    try:
        server._server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server._server.server_close()
