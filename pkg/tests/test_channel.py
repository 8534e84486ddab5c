"""Path loss, gains, noise and topology generation."""

import math

import numpy as np
import pytest

from d2dra.channel import (
    Position,
    RadioParams,
    distance,
    generate_topology,
    link_gain,
    noise_power_mw,
    path_loss_db,
)
from d2dra.config import ConfigError, ScenarioConfig


class TestPathLoss:
    def test_one_kilometer(self):
        assert path_loss_db(1000.0) == 128.1

    def test_hundred_meters(self):
        # direct evaluation: 128.1 + 37.6*log10(0.1)
        assert path_loss_db(100.0) == pytest.approx(90.5, rel=1e-12)

    def test_twenty_meters_below_floor(self):
        # without a floor: 128.1 + 37.6*log10(0.02) = 64.21872783696568
        assert path_loss_db(20.0, mcl_db=0.0) == pytest.approx(64.21872783696568, rel=1e-12)
        # the default 70 dB floor is higher and wins
        assert path_loss_db(20.0) == 70.0

    def test_monotonic_above_floor(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            d1, d2 = sorted(rng.uniform(1.0, 5000.0, size=2))
            assert path_loss_db(d1) <= path_loss_db(d2)
            if path_loss_db(d1) > 70.0 and d1 < d2:
                assert path_loss_db(d1) < path_loss_db(d2)

    def test_nonpositive_distance_rejected(self):
        with pytest.raises(ValueError):
            path_loss_db(0.0)
        with pytest.raises(ValueError):
            path_loss_db(-3.0)


class TestLinkGain:
    def test_one_kilometer(self):
        assert link_gain(1000.0) == pytest.approx(10.0 ** -12.81, rel=1e-12)
        assert link_gain(1000.0) == 10.0 ** (-path_loss_db(1000.0) / 10.0)

    def test_monotone_decreasing(self):
        rng = np.random.default_rng(4)
        for _ in range(200):
            d1, d2 = sorted(rng.uniform(1.0, 5000.0, size=2))
            assert link_gain(d1) >= link_gain(d2)

    def test_floor_clamp(self):
        assert link_gain(1.0, mcl_db=70.0) == pytest.approx(1e-7, rel=1e-12)

    def test_in_unit_interval(self):
        for d in (0.5, 5.0, 50.0, 500.0, 5000.0):
            assert 0.0 < link_gain(d) <= 1.0


class TestNoisePower:
    def test_per_rb_value(self):
        mw = noise_power_mw(-174.0, 180e3)
        assert mw == pytest.approx(7.165929069962951e-13, rel=1e-12)
        dbm = 10.0 * math.log10(mw)
        assert abs(dbm - (-121.447)) < 1e-3

    def test_one_hertz(self):
        assert noise_power_mw(-174.0, 1.0) == pytest.approx(10.0 ** -17.4, rel=1e-12)

    def test_doubling_bandwidth_adds_3db(self):
        a = 10.0 * math.log10(noise_power_mw(-174.0, 180e3))
        b = 10.0 * math.log10(noise_power_mw(-174.0, 360e3))
        assert b - a == pytest.approx(10.0 * math.log10(2.0), abs=1e-9)

    def test_invalid_bandwidth(self):
        with pytest.raises(ValueError):
            noise_power_mw(-174.0, 0.0)


class TestRadioParams:
    def test_derived_values(self):
        params = RadioParams(tx_power_dbm=20.0)
        assert params.tx_power_mw == pytest.approx(100.0, rel=1e-12)
        assert params.noise_mw == noise_power_mw(-174.0, 180e3)

    def test_validation(self):
        with pytest.raises(ConfigError):
            RadioParams(rb_bandwidth_hz=0.0)
        with pytest.raises(ConfigError):
            RadioParams(n_rbs=0)


class TestGenerateTopology:
    def test_deterministic_per_seed(self):
        config = ScenarioConfig(n_cues=5, n_pairs=6, n_relays=4, n_rbs=8)
        t1 = generate_topology(config, np.random.default_rng(42))
        t2 = generate_topology(config, np.random.default_rng(42))
        assert t1.cues == t2.cues
        assert t1.d2d_pairs == t2.d2d_pairs
        assert t1.relays == t2.relays
        assert np.array_equal(t1.g_due_rx, t2.g_due_rx)

    def test_table_scale_counts_and_containment(self):
        config = ScenarioConfig()  # 30 CUEs, 50 pairs, 50 relays, 250 m cell
        topo = generate_topology(config, np.random.default_rng(0))
        assert topo.n_cues == 30 and topo.n_pairs == 50 and topo.n_relays == 50
        nodes = list(topo.cues) + list(topo.relays)
        for tx, rx in topo.d2d_pairs:
            nodes.extend([tx, rx])
        assert len(nodes) == 30 + 100 + 50
        for node in nodes:
            assert math.hypot(node.x, node.y) <= 250.0 + 1e-9

    def test_fixed_link_length(self):
        config = ScenarioConfig(n_cues=0, n_pairs=20, n_relays=0,
                                d2d_fixed_length_m=250.0)
        topo = generate_topology(config, np.random.default_rng(1))
        for tx, rx in topo.d2d_pairs:
            assert distance(tx, rx) == pytest.approx(250.0, rel=1e-9)

    def test_length_within_interval(self):
        config = ScenarioConfig(n_cues=0, n_pairs=30, n_relays=0)
        topo = generate_topology(config, np.random.default_rng(2))
        for tx, rx in topo.d2d_pairs:
            assert 20.0 - 1e-9 <= distance(tx, rx) <= 150.0 + 1e-9

    def test_gains_match_link_gain_exactly(self):
        config = ScenarioConfig(n_cues=3, n_pairs=4, n_relays=3, n_rbs=5)
        topo = generate_topology(config, np.random.default_rng(5))
        for c, cue in enumerate(topo.cues):
            assert topo.g_cue_bs[c] == link_gain(distance(cue, topo.bs), topo.mcl_db)
            for d, (_, rx) in enumerate(topo.d2d_pairs):
                assert topo.g_cue_rx[c, d] == link_gain(distance(cue, rx), topo.mcl_db)
        for i, (tx_i, _) in enumerate(topo.d2d_pairs):
            for j, (_, rx_j) in enumerate(topo.d2d_pairs):
                assert topo.g_due_rx[i, j] == link_gain(distance(tx_i, rx_j), topo.mcl_db)
            for l, rel in enumerate(topo.relays):
                assert topo.g_due_rel[i, l] == link_gain(distance(tx_i, rel), topo.mcl_db)

    def test_near_pair_relays(self):
        config = ScenarioConfig(n_cues=0, n_pairs=4, n_relays=4,
                                relay_placement="near_pair", near_pair_radius_m=25.0)
        topo = generate_topology(config, np.random.default_rng(6))
        for l, rel in enumerate(topo.relays):
            tx, rx = topo.d2d_pairs[l % 4]
            mid = Position((tx.x + rx.x) / 2, (tx.y + rx.y) / 2)
            assert distance(mid, rel) <= 25.0 + 1e-9

    def test_retry_cap_reported_as_config_error(self):
        # a 499.9 m link from a transmitter near the centre of a 250 m cell
        # cannot land inside; the resample cap must trip
        config = ScenarioConfig(n_cues=0, n_pairs=1, n_relays=0,
                                d2d_fixed_length_m=499.9)
        with pytest.raises(ConfigError, match="attempts"):
            generate_topology(config, np.random.default_rng(7))

    def test_impossible_length_rejected_in_config(self):
        with pytest.raises(ValueError, match="diameter"):
            ScenarioConfig(d2d_fixed_length_m=600.0)
        with pytest.raises(ValueError, match="diameter"):
            ScenarioConfig(d2d_length_range_m=(20.0, 900.0))

    def test_nearest_relays(self):
        config = ScenarioConfig(n_cues=0, n_pairs=2, n_relays=6, n_rbs=4)
        topo = generate_topology(config, np.random.default_rng(8))
        near = topo.nearest_relays(0, 3)
        assert len(near) == 3
        tx, rx = topo.d2d_pairs[0]
        mid = Position((tx.x + rx.x) / 2, (tx.y + rx.y) / 2)
        dists = sorted(distance(mid, r) for r in topo.relays)
        got = [distance(mid, topo.relays[l]) for l in near]
        assert got == sorted(got) == dists[:3]
