import math

import pytest

import aerostp


def baseline(h=100.0):
    return aerostp.NetworkSpec([aerostp.LayerSpec(1e-5, h)])


LOS = aerostp.LinkClass(0, aerostp.Environment.LOS)


def test_version():
    assert isinstance(aerostp.__version__, str) and aerostp.__version__


def test_total_stp_reference_value():
    value, err = aerostp.total_stp(baseline())
    assert value == pytest.approx(0.6448496883, rel=1e-8)
    assert 0.0 <= err < 1e-6


def test_association_sums_to_one():
    a = aerostp.association_probability(baseline(50.0))
    assert set(a) == {"layer1_los", "layer1_nlos"}
    assert sum(a.values()) == pytest.approx(1.0, abs=1e-9)


def test_los_probability_is_elevation_only():
    net = baseline()
    layer, ch = net.layers[0], net.channel
    assert aerostp.los_probability(layer, ch, 100.0) == pytest.approx(0.99889, abs=1e-5)
    assert 0.0 < aerostp.los_probability(layer, ch, 1000.0) < 0.5


def test_simulate_small_run():
    cfg = aerostp.SimConfig()
    cfg.trials = 2000
    cfg.seed = 3
    r = aerostp.simulate(baseline(), cfg)
    assert r["stp"]["trials"] == 2000
    assert abs(r["stp"]["mean"] - 0.6448) < 5 * r["stp"]["stderr"] + 0.02
    again = aerostp.simulate(baseline(), cfg)
    assert again["stp"]["mean"] == r["stp"]["mean"]


def test_invalid_network_raises():
    ch = aerostp.ChannelParams()
    ch.alpha_los = 1.5
    with pytest.raises(aerostp.ValidationError):
        aerostp.NetworkSpec([aerostp.LayerSpec(1e-5, 100.0)], ch)
    with pytest.raises(aerostp.ValidationError):
        aerostp.NetworkSpec([aerostp.LayerSpec(-1.0, 100.0)])


def test_conditional_stp_in_unit_interval():
    v = aerostp.conditional_stp(baseline(), LOS, 150.0)
    assert 0.0 < v < 1.0


def test_sweep_1d():
    pts = aerostp.sweep_1d(baseline(), "h1", [50.0, 100.0, 200.0])
    assert [p["coords"][0] for p in pts] == [50.0, 100.0, 200.0]
    assert pts[1]["analytic_stp"] == pytest.approx(0.6448496883, rel=1e-8)
    assert all(p["error"] == "" for p in pts)


def test_bound_and_optimum():
    net = baseline()
    bound = aerostp.density_upper_bound(net.layers[0], net.channel)
    grid = [10 ** (-7 + 3.5 * i / 14) for i in range(15)]
    od = aerostp.optimal_density(net, 0, grid)
    assert od["argmax_density"] <= bound
    assert math.isclose(od["bound"], bound)
