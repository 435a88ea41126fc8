import math
import threading

import numpy as np
import pytest

import afc


def test_local_reward_example():
    drag, lift, total = afc.local_reward(1.409, 1.278, 0.029, 0.3)
    assert abs(drag - 0.131) <= 1e-12
    assert abs(lift + 0.0087) <= 1e-12
    assert abs(total - 0.1223) <= 1e-12


def test_aggregate_reward_preserves_mean():
    rng = np.random.default_rng(3)
    r = rng.normal(size=7)
    agg = np.asarray(afc.aggregate_reward(r, 0.8))
    assert abs(agg.mean() - r.mean()) <= 1e-12
    assert np.argmax(agg) == np.argmax(r)
    with pytest.raises(afc.ConfigError):
        afc.aggregate_reward(np.zeros(0), 0.8)


def test_signal_statistics_sinusoid():
    dt = 0.05
    t = np.arange(4000) * dt
    s = afc.signal_statistics(0.3 + 0.25 * math.sqrt(2) * np.sin(2 * math.pi * 0.17 * t), dt)
    assert s["has_peak"]
    assert abs(s["st"] - 0.17) < 2e-3
    assert abs(s["mean"] - 0.3) < 1e-3
    assert abs(s["sigma"] - 0.25) < 2e-3


def test_frame_round_trip_and_golden_ping():
    assert afc.encode_frame(afc.OP_PING) == b"AFCB" + bytes([1, 4, 0, 0])
    for dtype in (np.float32, np.float64, np.int64):
        a = (np.arange(12).reshape(3, 4) - 5).astype(dtype)
        f = afc.decode_frame(afc.encode_frame(afc.OP_PUT, "k", a))
        assert f["op"] == afc.OP_PUT and f["key"] == "k"
        assert f["tensor"].dtype == dtype
        assert f["tensor"].tobytes() == a.tobytes()
        assert f["tensor"].shape == (3, 4)
    get = afc.decode_frame(afc.encode_frame(afc.OP_GET, "abc", timeout_ms=250))
    assert get["timeout_ms"] == 250 and get["tensor"] is None
    with pytest.raises(afc.FormatError):
        afc.decode_frame(b"AFCB\x02\x04\x00\x00")


def test_broker_put_get_delete():
    server = afc.BrokerServer("127.0.0.1:0", 1 << 20)
    client = afc.BrokerClient(f"127.0.0.1:{server.port}")
    client.ping()
    a = np.random.default_rng(0).normal(size=(5, 3))
    client.put("x", a)
    b = client.get("x", 100)
    assert b.tobytes() == a.tobytes() and b.shape == a.shape
    client.delete("x")
    assert client.get("x", 20) is None
    with pytest.raises(afc.BrokerError):
        client.put("big", np.zeros(1 << 18))
    server.stop()


def test_broker_blocking_get_wakes_on_put():
    server = afc.BrokerServer()
    reader = afc.BrokerClient(server.address)
    got = {}
    th = threading.Thread(target=lambda: got.setdefault("v", reader.get("late", 5000)))
    th.start()
    afc.BrokerClient(server.address).put("late", np.array([1.5]))
    th.join()
    assert got["v"].tolist() == [1.5]
    server.stop()


def test_simulation_steps_and_observes():
    text = "[sim]\nlx = 8\nly = 6\ncenter_x = 3\ncenter_y = 3\nh = 0.1\nn_pe = 2\n"
    sim = afc.Simulation(text)
    sim.reset(0.2)
    cd, cl = sim.advance(np.zeros(2), 0.5)
    assert len(cd) == 2 and all(math.isfinite(x) for x in cd + cl)
    assert abs(sim.time - 0.5) < 1e-12
    obs = sim.observe()
    assert obs.shape == (2, 255)
    with pytest.raises(afc.ConfigError):
        afc.Simulation("[sim]\nbogus = 1\n")


def test_default_config_is_parseable():
    text = afc.default_config()
    assert "n_episodes = 30" in text
    afc.Simulation(text.replace("h = 0.040000000000000001", "h = 0.2"))
