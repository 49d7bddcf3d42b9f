import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from relaysched.channel import (
    BS,
    GeometryMode,
    ScenarioConfig,
    db_to_linear,
    draw_scenario,
    generate_channel,
    generate_layout,
    ms,
    path_loss_gain,
    power_delay_profile,
    rayleigh_fading,
    rs,
)


def flat_cfg(**kw):
    base = dict(shadowing_sigma_db=0.0, small_scale_fading=False, min_distance_ratio=0.0)
    base.update(kw)
    return ScenarioConfig(**base)


class TestConfig:
    @pytest.mark.parametrize(
        "kw",
        [
            {"num_ms": 0},
            {"num_rs": -1},
            {"num_subcarriers": 0},
            {"rs_radius_ratio": 1.5},
            {"xi": 1.2},
            {"theta": -0.1},
            {"cell_radius": 0.0},
        ],
    )
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            ScenarioConfig(**kw)

    def test_power_profile_offsets(self):
        cfg = ScenarioConfig().with_bs_power(12.0)
        assert cfg.power_bs_db == cfg.power_rs_db + 3 == cfg.power_ms_db + 5

    def test_default_profile(self):
        cfg = ScenarioConfig()
        assert cfg.power_bs_db == cfg.power_rs_db + 3 == cfg.power_ms_db + 5

    def test_normalized_plane_needs_positions(self):
        with pytest.raises(ValueError):
            ScenarioConfig(geometry_mode="normalized-plane", num_ms=1, num_rs=2, ms_positions=((1, 0),))


class TestLayout:
    def test_cell_invariants(self):
        cfg = ScenarioConfig(num_ms=50, num_rs=7, rs_radius_ratio=0.3)
        layout = generate_layout(cfg, np.random.default_rng(0))
        assert np.all(layout.bs_ms_distance <= cfg.cell_radius)
        np.testing.assert_allclose(layout.bs_rs_distance, 0.3 * cfg.cell_radius)
        angles = np.sort(np.mod(np.arctan2(layout.rs_positions[:, 1], layout.rs_positions[:, 0]), 2 * np.pi))
        np.testing.assert_allclose(np.diff(angles), 2 * np.pi / 7)

    def test_ms_uniform_by_area(self):
        cfg = ScenarioConfig(num_ms=20000, num_rs=0)
        layout = generate_layout(cfg, np.random.default_rng(1))
        # P(r <= R/2) = 1/4 for a uniform disc
        frac = np.mean(layout.bs_ms_distance <= cfg.cell_radius / 2)
        assert frac == pytest.approx(0.25, abs=0.01)

    def test_normalized_plane(self):
        cfg = ScenarioConfig(
            geometry_mode=GeometryMode.NORMALIZED_PLANE,
            num_ms=1,
            num_rs=2,
            cell_radius=10.0,
            ms_positions=((10, 0),),
            rs_positions=((4, 3), (4, -3)),
        )
        layout = generate_layout(cfg)
        np.testing.assert_allclose(layout.ms_rs_distance, [[np.hypot(6, 3), np.hypot(6, 3)]])
        np.testing.assert_allclose(layout.bs_rs_distance, [5.0, 5.0])
        assert layout.position(ms(0)).tolist() == [10.0, 0.0]
        assert layout.position(rs(1)).tolist() == [4.0, -3.0]

    def test_coincident_nodes_rejected(self):
        cfg = ScenarioConfig(
            geometry_mode="normalized-plane", num_ms=1, num_rs=1,
            ms_positions=((4, 3),), rs_positions=((4, 3),),
        )
        layout = generate_layout(cfg)
        with pytest.raises(ValueError, match="zero distance"):
            generate_channel(cfg, layout, np.random.default_rng(0))


class TestPathLoss:
    def test_reference_point(self):
        cfg = flat_cfg()
        assert float(path_loss_gain(cfg, cfg.cell_radius)) == pytest.approx(db_to_linear(-20.0))

    def test_fourth_power(self):
        cfg = flat_cfg()
        ratio = path_loss_gain(cfg, 500.0) / path_loss_gain(cfg, 1000.0)
        assert float(ratio) == pytest.approx(16.0)

    @given(st.floats(1.0, 1e4), st.floats(1.0001, 10.0))
    def test_strictly_decreasing(self, d, factor):
        cfg = flat_cfg()
        assert path_loss_gain(cfg, d * factor) < path_loss_gain(cfg, d)

    def test_breakpoint_holds_gain_flat(self):
        cfg = ScenarioConfig(shadowing_sigma_db=0.0, small_scale_fading=False)
        d0 = cfg.min_distance_ratio * cfg.cell_radius
        assert float(path_loss_gain(cfg, d0 / 4)) == float(path_loss_gain(cfg, d0))
        assert path_loss_gain(cfg, 2 * d0) < path_loss_gain(cfg, d0)

    def test_zero_distance(self):
        with pytest.raises(ValueError):
            path_loss_gain(flat_cfg(), 0.0)


class TestFading:
    def test_profile_normalised_and_decaying(self):
        delays, powers = power_delay_profile(ScenarioConfig())
        assert powers.sum() == pytest.approx(1.0)
        assert np.all(np.diff(powers) < 0)
        assert delays[-1] == pytest.approx(5e-6)
        assert 10 * np.log10(powers[0] / powers[-1]) == pytest.approx(13.03, abs=0.01)

    def test_exponential_marginal(self):
        cfg = ScenarioConfig(num_subcarriers=16)
        h = rayleigh_fading(cfg, np.random.default_rng(5), (4000,))
        sample = h[:, 3]
        assert stats.kstest(sample, "expon").pvalue > 0.01
        assert sample.mean() == pytest.approx(1.0, abs=0.05)

    def test_adjacent_subcarriers_correlated(self):
        cfg = ScenarioConfig(num_subcarriers=16, subcarrier_spacing_hz=1e3)
        h = rayleigh_fading(cfg, np.random.default_rng(6), (4000,))
        assert np.corrcoef(h[:, 0], h[:, 1])[0, 1] > 0.9

    def test_flat_when_disabled(self):
        h = rayleigh_fading(flat_cfg(), np.random.default_rng(0), (3, 2))
        assert np.all(h == 1.0)


class TestRealization:
    def test_flat_channel_matches_path_loss(self):
        cfg = flat_cfg(num_ms=3, num_rs=4)
        layout, real = draw_scenario(cfg, 11)
        np.testing.assert_allclose(real.gain_bm[:, 0], path_loss_gain(cfg, layout.bs_ms_distance))
        np.testing.assert_allclose(real.gain_mr[:, :, 5], path_loss_gain(cfg, layout.ms_rs_distance))

    def test_gains_positive_and_finite(self):
        _, real = draw_scenario(ScenarioConfig(), 2)
        for g in (real.gain_bm, real.gain_br, real.gain_mr):
            assert np.all(np.isfinite(g)) and np.all(g > 0)

    def test_reciprocity_and_power_asymmetry(self):
        _, real = draw_scenario(ScenarioConfig(), 3)
        for a, b in ((BS, ms(1)), (BS, rs(4)), (ms(2), rs(7))):
            assert real.gain(a, b, 5) == real.gain(b, a, 5)
        ratio = real.snr((BS, ms(0)), 2) / real.snr((ms(0), BS), 2)
        assert ratio == pytest.approx(db_to_linear(5.0))
        ratio = real.snr((rs(0), ms(0)), 2) / real.snr((ms(0), rs(0)), 2)
        assert ratio == pytest.approx(db_to_linear(2.0))

    def test_snr_tables_match_lookup(self):
        _, real = draw_scenario(ScenarioConfig(num_ms=2, num_rs=3, num_subcarriers=4), 4)
        assert real.snr_rm[1, 2, 3] == pytest.approx(real.snr((rs(2), ms(1)), 3))
        assert real.snr_br[0, 1] == pytest.approx(real.snr((BS, rs(0)), 1))

    def test_unknown_link(self):
        _, real = draw_scenario(ScenarioConfig(num_ms=1, num_rs=1, num_subcarriers=2), 0)
        with pytest.raises(KeyError):
            real.gain(ms(0), ms(0), 0)
        with pytest.raises(KeyError):
            real.gain(BS, ms(3), 0)

    def test_seeded_determinism(self):
        cfg = ScenarioConfig()
        a = draw_scenario(cfg, 9)[1]
        b = draw_scenario(cfg, 9)[1]
        assert np.array_equal(a.gain_mr, b.gain_mr)
        assert not np.array_equal(a.gain_mr, draw_scenario(cfg, 10)[1].gain_mr)

    def test_power_change_keeps_gains(self):
        _, real = draw_scenario(ScenarioConfig(), 1)
        hot = real.with_bs_power(20.0)
        assert np.array_equal(hot.gain_bm, real.gain_bm)
        assert hot.snr_bm[0, 0] == pytest.approx(10 * real.snr_bm[0, 0])

    def test_shadowing_spread(self):
        cfg = ScenarioConfig(num_ms=2000, num_rs=0, small_scale_fading=False, min_distance_ratio=0.0)
        layout, real = draw_scenario(cfg, 8)
        resid_db = 10 * np.log10(real.gain_bm[:, 0] / path_loss_gain(cfg, layout.bs_ms_distance))
        assert resid_db.std() == pytest.approx(5.8, rel=0.05)
