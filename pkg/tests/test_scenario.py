"""Topology/config construction, determinism, and channel gain values."""

import json
import math

import numpy as np
import pytest

from mecoffload.errors import InvalidConfig
from mecoffload.scenario import (
    ChannelGains,
    RadioParams,
    Scenario,
    ScenarioConfig,
    SmallCell,
    Task,
    Ue,
    build_scenario,
    channel_gains,
    config_from_dict,
    load_config,
    path_loss_db,
    tx_powers,
)


def make_ue(i=0, position=(0.0, 0.0), power=0.1, bits=3440640.0, cycles=1e9,
            speed=0.7e9, wt=0.5, we=0.5, v=4.9e-12):
    return Ue(
        id=i, position=position, tx_power_w=power,
        task=Task(input_bits=bits, cycles=cycles), local_speed_hz=speed,
        weight_time=wt, weight_energy=we, energy_coeff_j_per_cycle=v,
    )


def manual_scenario(cell_positions, ue_positions, **overrides):
    """Hand-placed deployment for tests that need exact geometry."""
    params = dict(
        radio=RadioParams(bandwidth_hz=20e6, num_prbs=100, noise_per_prb_w=1e-13),
        mec_capacity_hz=1e11, reuse_lambda=2.0, edge_threshold=0.1, seed=0,
        area_m=120.0, pl0_db=30.0, pl_exponent=3.7, shadowing_db=0.0,
    )
    params.update(overrides)
    cells = tuple(SmallCell(i, p) for i, p in enumerate(cell_positions))
    ues = tuple(make_ue(i, position=p) for i, p in enumerate(ue_positions))
    return Scenario(cells=cells, ues=ues, **params)


class TestConfig:
    def test_defaults_validate(self):
        cfg = ScenarioConfig()
        cfg.validate()

    def test_unit_conversions(self):
        cfg = ScenarioConfig()
        assert cfg.input_bits == 420 * 1024 * 8 == 3440640
        assert cfg.noise_per_prb_w == pytest.approx(1e-13, rel=1e-12)
        assert cfg.energy_coeff == pytest.approx(4.9e-12, rel=1e-12)

    def test_energy_coeff_override(self):
        cfg = ScenarioConfig(energy_coeff_j_per_cycle=2e-12)
        assert cfg.energy_coeff == 2e-12

    def test_unknown_key_rejected(self):
        with pytest.raises(InvalidConfig, match="unknown"):
            config_from_dict({"n_cellz": 9})

    def test_non_integer_count_rejected(self):
        with pytest.raises(InvalidConfig):
            config_from_dict({"n_cells": 9.5})

    @pytest.mark.parametrize(
        "bad",
        [
            {"n_cells": 0},
            {"bandwidth_hz": -1.0},
            {"gamma_t": 1.5},
            {"reuse_lambda": 0.5},
            {"num_prbs": 0},
            {"tx_power_mw": 0},
        ],
    )
    def test_out_of_range_rejected(self, bad):
        with pytest.raises(InvalidConfig):
            config_from_dict(bad)

    def test_load_config_roundtrip(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"n_cells": 5, "reuse_lambda": 1.5}))
        cfg = load_config(str(path))
        assert cfg.n_cells == 5
        assert cfg.reuse_lambda == 1.5
        assert cfg.num_prbs == 100  # untouched default

    def test_load_config_bad_json(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text("{not json")
        with pytest.raises(InvalidConfig):
            load_config(str(path))

    def test_load_config_missing_file(self, tmp_path):
        with pytest.raises(InvalidConfig):
            load_config(str(tmp_path / "nope.json"))

    def test_with_overrides_validates(self):
        with pytest.raises(InvalidConfig):
            ScenarioConfig().with_overrides(n_cells=-3)


class TestBuild:
    def test_same_seed_same_scenario(self):
        cfg = ScenarioConfig()
        a = build_scenario(cfg, seed=7)
        b = build_scenario(cfg, seed=7)
        assert [u.position for u in a.ues] == [u.position for u in b.ues]
        assert [c.position for c in a.cells] == [c.position for c in b.cells]

    def test_different_seed_differs(self):
        cfg = ScenarioConfig()
        a = build_scenario(cfg, seed=0)
        b = build_scenario(cfg, seed=1)
        assert [u.position for u in a.ues] != [u.position for u in b.ues]

    def test_seed_falls_back_to_config(self):
        cfg = ScenarioConfig(seed=11)
        a = build_scenario(cfg)
        b = build_scenario(cfg, seed=11)
        assert [u.position for u in a.ues] == [u.position for u in b.ues]

    def test_counts_and_parameters(self):
        cfg = ScenarioConfig(n_cells=5)
        s = build_scenario(cfg, seed=0)
        assert s.n_cells == 5 and len(s.ues) == 5
        assert s.mec_capacity_hz == 1e11
        assert s.ues[0].tx_power_w == pytest.approx(0.1)
        assert s.ues[0].task.cycles == 1e9
        assert s.ues[0].local_speed_hz == pytest.approx(0.7e9)

    def test_ue_within_serving_radius(self):
        cfg = ScenarioConfig(n_cells=30, ue_radius_m=20.0)
        s = build_scenario(cfg, seed=3)
        for cell, ue in zip(s.cells, s.ues):
            d = math.dist(cell.position, ue.position)
            assert 1.0 - 1e-9 <= d <= 20.0 + 1e-9

    def test_tx_powers_vector(self):
        s = build_scenario(ScenarioConfig(n_cells=4), seed=0)
        assert np.allclose(tx_powers(s), 0.1)


class TestGains:
    def test_path_loss_reference_distance(self):
        assert path_loss_db(1.0, 30.0, 3.7) == pytest.approx(30.0)

    def test_path_loss_hundred_meters(self):
        # 30 + 37*log10(100) dB
        assert path_loss_db(100.0, 30.0, 3.7) == pytest.approx(104.0, rel=1e-12)

    def test_path_loss_clamps_below_one_meter(self):
        assert path_loss_db(0.01, 30.0, 3.7) == pytest.approx(30.0)

    def test_gain_value_at_hundred_meters(self):
        s = manual_scenario([(0.0, 0.0), (100.0, 0.0)],
                            [(100.0, 0.0), (0.0, 0.0)])
        g = channel_gains(s)
        # cross link spans 100 m: 10**(-104/10), frozen reference value
        assert g.h[0, 0] == pytest.approx(3.981071705534973e-11, rel=1e-12)
        assert g.h[1, 1] == pytest.approx(3.981071705534973e-11, rel=1e-12)

    def test_gains_deterministic_with_shadowing(self):
        cfg = ScenarioConfig(shadowing_db=8.0)
        s = build_scenario(cfg, seed=5)
        a = channel_gains(s)
        b = channel_gains(s)
        assert np.array_equal(a.h, b.h)

    def test_shadowing_changes_gains_not_geometry(self):
        plain = build_scenario(ScenarioConfig(), seed=5)
        shadowed = build_scenario(ScenarioConfig(shadowing_db=8.0), seed=5)
        assert [u.position for u in plain.ues] == [u.position for u in shadowed.ues]
        assert not np.array_equal(channel_gains(plain).h, channel_gains(shadowed).h)

    def test_gain_matrix_shape_and_positivity(self):
        s = build_scenario(ScenarioConfig(n_cells=6), seed=2)
        g = channel_gains(s)
        assert g.h.shape == (6, 6)
        assert (g.h > 0).all()
        assert g.n == 6

    def test_serving_link_usually_strongest(self):
        # each UE sits within 20 m of its serving cell, but 9 cells share a
        # 120 m square, so dominance is frequent rather than universal
        hits = []
        for seed in range(12):
            s = build_scenario(ScenarioConfig(), seed=seed)
            g = channel_gains(s)
            hits.append((np.argmax(g.h, axis=1) == np.arange(9)).mean())
        assert np.mean(hits) >= 0.7


class TestInvariantChecks:
    def test_mismatched_counts_rejected(self):
        with pytest.raises(InvalidConfig):
            manual_scenario([(0.0, 0.0)], [(1.0, 0.0), (2.0, 0.0)])

    def test_bad_radio_rejected(self):
        with pytest.raises(InvalidConfig):
            RadioParams(bandwidth_hz=20e6, num_prbs=0, noise_per_prb_w=1e-13)

    def test_bad_task_rejected(self):
        with pytest.raises(InvalidConfig):
            Task(input_bits=0.0, cycles=1e9)

    def test_bad_ue_weights_rejected(self):
        with pytest.raises(InvalidConfig):
            make_ue(wt=1.2)
