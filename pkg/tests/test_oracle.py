import json
import threading

import numpy as np
import pytest

from dataview import netcore
from dataview.netcore import DenseLayer, Mlp
from dataview.oracle import (
    GradientUnavailableError,
    InProcessOracle,
    OracleError,
    OracleServer,
    RemoteOracle,
    top_class,
)


@pytest.fixture
def net():
    return netcore.make_classifier(4, 3, seed=42)


@pytest.fixture
def server(net):
    with OracleServer(net) as srv:
        yield srv


def remote_for(server):
    host, port = server.address
    return RemoteOracle(host, port, 4, 3)


class TestTopClass:
    def test_plain_argmax(self):
        assert top_class([0.1, 0.7, 0.2]) == (1, 0.7)

    def test_tie_breaks_low_index(self):
        assert top_class([0.5, 0.5]) == (0, 0.5)

    def test_matches_linear_scan(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            p = rng.dirichlet(np.ones(6))
            idx, conf = top_class(p)
            best = 0
            for j in range(len(p)):
                if p[j] > p[best]:
                    best = j
            assert idx == best and conf == p[best]

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            top_class([])


class TestInProcess:
    def test_zero_weight_uniform(self):
        net = Mlp([DenseLayer(np.zeros((3, 2)), np.zeros(3), "softmax")])
        handle = InProcessOracle(net)
        assert np.allclose(handle.classify([0.3, -0.4]), [1 / 3, 1 / 3, 1 / 3])

    def test_query_counter_exact(self, net):
        handle = InProcessOracle(net)
        rng = np.random.default_rng(0)
        for _ in range(1000):
            handle.classify(rng.normal(size=4))
        assert handle.query_count == 1000
        handle.classify_batch(rng.normal(size=(7, 4)))
        assert handle.query_count == 1007

    def test_counter_thread_safe(self, net):
        handle = InProcessOracle(net)
        x = np.zeros(4)

        def worker():
            for _ in range(200):
                handle.classify(x)

        threads = [threading.Thread(target=worker) for _ in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert handle.query_count == 1600

    def test_gradient_capability(self, net):
        handle = InProcessOracle(net)
        assert handle.supports_gradient
        g = handle.input_gradient(np.zeros(4), np.array([1.0, 0.0, 0.0]))
        assert g.shape == (4,)


class TestRemote:
    def test_backend_equivalence(self, net, server):
        local = InProcessOracle(net)
        remote = remote_for(server)
        rng = np.random.default_rng(3)
        for _ in range(50):
            x = rng.normal(size=4)
            assert np.max(np.abs(local.classify(x) - remote.classify(x))) < 1e-9

    def test_query_counter(self, server):
        remote = remote_for(server)
        for _ in range(25):
            remote.classify(np.zeros(4))
        assert remote.query_count == 25

    def test_wrong_feature_count_error_keeps_connection(self, net, server):
        remote = remote_for(server)
        remote.classify(np.zeros(4))
        with pytest.raises(Exception):
            remote.classify(np.zeros(4)[:2])  # rejected client-side
        # protocol-level rejection: bypass the client check
        remote._sock.sendall(b'{"features": [1, 2]}\n')
        reply = json.loads(remote._reader.readline())
        assert "error" in reply
        assert np.allclose(remote.classify(np.zeros(4)), net.forward(np.zeros(4)))

    def test_gradient_refused(self, server):
        remote = remote_for(server)
        assert not remote.supports_gradient
        with pytest.raises(GradientUnavailableError):
            remote.input_gradient(np.zeros(4), np.array([1.0, 0.0, 0.0]))

    def test_concurrent_clients_all_correct(self, net, server):
        rng = np.random.default_rng(5)
        inputs = rng.normal(size=(100, 4))
        expected = net.forward_batch(inputs)
        errors = []

        def client(i):
            try:
                with remote_for(server) as r:
                    got = r.classify(inputs[i])
                    if np.max(np.abs(got - expected[i])) > 1e-9:
                        errors.append(i)
            except Exception as exc:  # surface in the main thread
                errors.append(exc)

        threads = [threading.Thread(target=client, args=(i,)) for i in range(100)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert errors == []

    def test_connection_refused(self):
        remote = RemoteOracle("127.0.0.1", 1, 4, 3, timeout_ms=200)
        with pytest.raises(OracleError):
            remote.classify(np.zeros(4))
