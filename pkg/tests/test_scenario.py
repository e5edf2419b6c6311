import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from lsa_sim import scenario
from lsa_sim.scenario import (
    ConfigError,
    ScenarioConfig,
    airplane_state,
    build_deployment,
    closest_point_in_cell,
    config_to_text,
    default_config,
    grid_pitch_m,
    load_config,
)

TABLE_DOC = """
# full parameter table
cell_radius_m = 288
interference_threshold_dbm = -85
protective_margin_db = 10
takeoff_speed_mps = 65
acceleration_mps2 = 5
climb_slope_deg = 7
observation_s = 60
carrier_hz = 2.1e9
bs_height_m = 15
ue_height_m = 1.5
shadow_sigma_db = 3
bs_sidelobe_isolation_db = 20
bs_antenna_leakage_db = -35
max_ue_power_dbm = 23
pc_alpha = 1
sinr_target_lsa_db = 5
sinr_target_licensed_db = 20
"""


class TestLoadConfig:
    def test_table_values(self):
        cfg = load_config(TABLE_DOC)
        assert cfg.cell_radius_m == 288
        assert cfg.protective_margin_db == 10
        assert cfg.pc_alpha == 1
        assert cfg.interference_threshold_dbm == -85
        assert cfg.takeoff_speed_mps == 65

    def test_empty_document_equals_bundled_default(self):
        assert load_config("") == default_config()
        assert load_config("") == ScenarioConfig()

    def test_range_violation_names_key(self):
        with pytest.raises(ConfigError, match="cell_radius_m"):
            load_config("cell_radius_m = -1")

    def test_unknown_key_rejected_with_line(self):
        with pytest.raises(ConfigError, match=r"line 2.*not_a_key"):
            load_config("seed = 3\nnot_a_key = 12")

    def test_duplicate_key_rejected(self):
        with pytest.raises(ConfigError, match="duplicate"):
            load_config("seed = 3\nseed = 4")

    def test_bad_value_diagnostics(self):
        with pytest.raises(ConfigError, match=r"line 1.*grid_cols"):
            load_config("grid_cols = five")

    def test_missing_equals_sign(self):
        with pytest.raises(ConfigError, match="line 1"):
            load_config("grid_cols 5")

    def test_comments_and_blank_lines(self):
        cfg = load_config("\n# comment\nseed = 9   # trailing\n\n")
        assert cfg.seed == 9

    def test_roundtrip_serialization(self):
        cfg = load_config("seed = 5\ngrid_cols = 3\nrunway_heading_deg = 15")
        assert load_config(config_to_text(cfg)) == cfg

    def test_runway_auto_and_explicit(self):
        auto = load_config("runway_origin_xy = auto")
        assert auto.runway_origin_xy == ScenarioConfig().runway_origin_xy
        explicit = load_config("runway_origin_xy = -100.5, 20")
        assert explicit.runway_origin_xy == (-100.5, 20.0)

    def test_frame_vs_update_granularity(self):
        with pytest.raises(ConfigError, match="position_update_s"):
            load_config("frame_s = 0.3\nposition_update_s = 1")

    def test_power_bounds_ordering(self):
        with pytest.raises(ConfigError, match="min_ue_power_dbm"):
            load_config("min_ue_power_dbm = 25")


class TestDeployment:
    def test_default_grid(self):
        cfg = default_config()
        dep = build_deployment(cfg, seed=1)
        assert len(dep.cells) == 25
        # spacing sqrt(3)*R between adjacent centres
        pitch = grid_pitch_m(cfg)
        assert_allclose(dep.cells[1].position[0] - dep.cells[0].position[0], pitch)
        assert_allclose(dep.cells[5].position[1] - dep.cells[0].position[1], pitch)
        positions = {c.position for c in dep.cells}
        assert len(positions) == 25
        # roughly 10 UEs per cell on average (Poisson)
        assert 150 <= len(dep.ues) <= 350

    def test_expected_ue_count_across_seeds(self):
        cfg = default_config()
        counts = [len(build_deployment(cfg, seed=s).ues) for s in range(1, 21)]
        assert abs(np.mean(counts) - 250) < 25

    def test_reuse3_coloring(self):
        cfg = default_config()
        dep = build_deployment(cfg, seed=1)
        for cell in dep.cells:
            assert cell.licensed_subband_index in (0, 1, 2)
            assert cell.lsa_enabled
        # 4-neighbourhood never shares a subband
        for row in range(cfg.grid_rows):
            for col in range(cfg.grid_cols):
                me = dep.cells[row * cfg.grid_cols + col]
                if col + 1 < cfg.grid_cols:
                    right = dep.cells[row * cfg.grid_cols + col + 1]
                    assert me.licensed_subband_index != right.licensed_subband_index
                if row + 1 < cfg.grid_rows:
                    up = dep.cells[(row + 1) * cfg.grid_cols + col]
                    assert me.licensed_subband_index != up.licensed_subband_index

    def test_single_empty_cell(self):
        cfg = load_config("grid_cols = 1\ngrid_rows = 1\nues_per_cell = 0")
        dep = build_deployment(cfg, seed=3)
        assert len(dep.cells) == 1
        assert dep.ues == []

    def test_fixed_count_mode(self):
        cfg = load_config("ue_placement = fixed")
        dep = build_deployment(cfg, seed=8)
        assert len(dep.ues) == 250

    def test_every_ue_within_home_cell_radius(self):
        cfg = default_config()
        dep = build_deployment(cfg, seed=2)
        for ue in dep.ues:
            home = dep.cells[ue.home_cell]
            d = math.hypot(ue.position[0] - home.position[0], ue.position[1] - home.position[1])
            assert d <= cfg.cell_radius_m
            assert ue.position[2] == cfg.ue_height_m
        for cell in dep.cells:
            assert cell.position[2] == cfg.bs_height_m

    def test_deterministic_per_seed(self):
        cfg = default_config()
        a = build_deployment(cfg, seed=11)
        b = build_deployment(cfg, seed=11)
        assert a.cells == b.cells
        assert a.ues == b.ues
        c = build_deployment(cfg, seed=12)
        assert c.ues != a.ues


def kinematics_oracle(cfg, t):
    """Closed-form v = a*t, s = a*t^2/2 profile with a 7 deg climb split."""
    a, v_to = cfg.acceleration_mps2, cfg.takeoff_speed_mps
    t_rot = v_to / a
    s_rot = v_to**2 / (2 * a)
    slope = math.radians(cfg.climb_slope_deg)
    if t <= t_rot:
        return a * t, 0.5 * a * t * t, 0.0
    tau = t - t_rot
    tau_max = (cfg.max_speed_mps - v_to) / a
    if tau < tau_max:
        v = v_to + a * tau
        s_c = v_to * tau + 0.5 * a * tau * tau
    else:
        v = cfg.max_speed_mps
        s_c = v_to * tau_max + 0.5 * a * tau_max**2 + cfg.max_speed_mps * (tau - tau_max)
    return v, s_rot + s_c * math.cos(slope), s_c * math.sin(slope)


class TestAirplane:
    cfg = default_config()

    def test_start_at_origin(self):
        st = airplane_state(self.cfg, 0.0)
        assert st.position[:2] == self.cfg.runway_origin_xy
        assert st.speed_mps == 0.0
        assert st.phase == scenario.GROUND_ROLL

    def test_rotation_instant(self):
        st = airplane_state(self.cfg, 13.0)
        assert_allclose(st.speed_mps, 65.0, rtol=1e-12)
        along = st.position[0] - self.cfg.runway_origin_xy[0]
        assert_allclose(along, 422.5, rtol=1e-12)
        assert st.position[2] == 0.0

    def test_climb_closed_form(self):
        st = airplane_state(self.cfg, 30.0)
        assert_allclose(st.speed_mps, 150.0, rtol=1e-12)
        # along-track path length 2250 m, altitude (2250-422.5)*sin(7 deg)
        assert_allclose(st.position[2], (2250 - 422.5) * math.sin(math.radians(7)), rtol=1e-9)
        assert st.phase == scenario.DEPARTED

    @pytest.mark.parametrize("t", [0.0, 5.0, 13.0, 30.0, 60.0])
    def test_matches_oracle(self, t):
        st = airplane_state(self.cfg, t)
        v, ground, z = kinematics_oracle(self.cfg, t)
        assert_allclose(st.speed_mps, v, rtol=1e-9)
        assert_allclose(st.position[0], self.cfg.runway_origin_xy[0] + ground, rtol=1e-9)
        assert_allclose(st.position[2], z, rtol=1e-9, atol=1e-12)

    def test_speed_monotone_and_bounded(self):
        ts = np.linspace(0, 60, 1201)
        speeds = [airplane_state(self.cfg, float(t)).speed_mps for t in ts]
        assert all(b >= a for a, b in zip(speeds, speeds[1:]))
        assert max(speeds) <= self.cfg.max_speed_mps

    def test_position_continuity(self):
        ts = np.linspace(0, 60, 601)
        prev = airplane_state(self.cfg, 0.0)
        for t in ts[1:]:
            st = airplane_state(self.cfg, float(t))
            delta = t - prev.t_s
            moved = math.dist(st.position, prev.position)
            bound = self.cfg.max_speed_mps * delta + 0.5 * self.cfg.acceleration_mps2 * delta**2
            assert moved <= bound + 1e-9
            prev = st

    def test_altitude_nonnegative(self):
        for t in np.linspace(0, 60, 301):
            assert airplane_state(self.cfg, float(t)).position[2] >= 0.0

    def test_telemetry_cutoff(self):
        cfg = load_config("telemetry_altitude_cutoff_m = 100")
        low = airplane_state(cfg, 0.0)
        assert low.telemetry_active
        high = airplane_state(cfg, 40.0)
        assert high.position[2] > 100
        assert not high.telemetry_active

    def test_heading_rotation(self):
        cfg = load_config("runway_heading_deg = 90\nrunway_origin_xy = 0,0")
        st = airplane_state(cfg, 13.0)
        assert_allclose(st.position[1], 422.5, rtol=1e-12)
        assert abs(st.position[0]) < 1e-9

    def test_negative_time_rejected(self):
        with pytest.raises(ValueError):
            airplane_state(self.cfg, -0.1)


class TestClosestPoint:
    cfg = default_config()

    def cell(self, x=0.0, y=0.0):
        return scenario.CellSite(id=0, position=(x, y, 15.0), licensed_subband_index=0)

    def test_above_center(self):
        p = closest_point_in_cell(self.cell(), (0.0, 0.0, 500.0), self.cfg)
        assert p == (0.0, 0.0, self.cfg.ue_height_m)

    def test_outside_projects_to_rim(self):
        p = closest_point_in_cell(self.cell(), (1000.0, 0.0, 500.0), self.cfg)
        assert_allclose(p, (288.0, 0.0, 1.5), rtol=1e-12)
        assert_allclose(math.dist(p, (1000, 0, 500)), math.hypot(712, 498.5), rtol=1e-12)

    def test_inside_footprint_clamps_height(self):
        p = closest_point_in_cell(self.cell(), (50.0, -20.0, 0.0), self.cfg)
        assert p == (50.0, -20.0, 1.5)

    def test_minimizes_distance(self):
        # sampled oracle: no disc point is closer than the returned one
        rng = np.random.default_rng(5)
        cell = self.cell(100.0, -50.0)
        for _ in range(50):
            target = tuple(rng.uniform(-2000, 2000, size=2)) + (rng.uniform(0, 1500),)
            best = closest_point_in_cell(cell, target, self.cfg)
            d_best = math.dist(best, target)
            for _ in range(200):
                r = 288 * math.sqrt(rng.uniform())
                phi = rng.uniform(0, 2 * math.pi)
                pt = (100 + r * math.cos(phi), -50 + r * math.sin(phi), 1.5)
                assert d_best <= math.dist(pt, target) + 1e-9
