"""Stream generators: frozen regime values, transform properties, determinism."""

import math
from pathlib import Path

import numpy as np
import pytest

from splinefx.streams import (DigitsStreamConfig, XorStreamConfig, digits_stream,
                              digits_stream_from_rows, load_digits_file,
                              regression_stream, regression_target, rotate_image,
                              rotating_xor_stream, xor_label, xor_point)

FIXTURE = Path(__file__).parent.parent / "data" / "digits_fixture.csv"


class TestRegression:
    def test_regime_formulas(self):
        assert regression_target(0, 0.0) == 0.0
        assert regression_target(600, 0.0) == 0.0  # -cos(0) + 0 + 1
        assert regression_target(1200, 1.0) == pytest.approx(1.05)  # exp(0) + 0.05

    def test_regime_boundaries(self):
        x = 0.5
        assert regression_target(499, x) == math.sin(x) + 0.3 * x * x
        assert regression_target(500, x) == -math.cos(2 * x) + 0.1 * x**3 + 1.0
        assert regression_target(1000, x) == math.exp(-0.5 * (x - 1) ** 2) + 0.05 * x**3

    def test_stream_shape(self):
        samples = list(regression_stream(seed=1))
        assert len(samples) == 1500
        assert [s.t for s in samples] == list(range(1500))
        xs = np.array([s.x[0] for s in samples])
        assert xs.min() >= -1.0 and xs.max() <= 1.0
        for s in samples[:100]:
            assert s.target == regression_target(s.t, s.x[0])

    def test_deterministic(self):
        a = [(s.x[0], s.target) for s in regression_stream(seed=9)]
        b = [(s.x[0], s.target) for s in regression_stream(seed=9)]
        assert a == b


class TestXor:
    def quiet_cfg(self, **kw):
        base = dict(noise_scale=0.0, kerr_strength=0.0, breathing_amplitude=0.0)
        base.update(kw)
        return XorStreamConfig(**base)

    def test_center_at_t0(self):
        x = xor_point(0, 0, self.quiet_cfg())
        assert np.allclose(x, [1.5, 1.5], atol=1e-12)

    def test_pure_rotation_90deg(self):
        # t=1800 at 0.05 deg/step -> 90 degrees
        x = xor_point(0, 1800, self.quiet_cfg())
        assert np.allclose(x, [-1.5, 1.5], atol=1e-9)

    def test_parity_labels(self):
        assert xor_label(0) == -1 and xor_label(1) == -1
        assert xor_label(2) == 1 and xor_label(3) == 1

    def test_quadrant_centers(self):
        cfg = self.quiet_cfg()
        assert np.allclose(xor_point(1, 0, cfg), [-1.5, -1.5])
        assert np.allclose(xor_point(2, 0, cfg), [-1.5, 1.5])
        assert np.allclose(xor_point(3, 0, cfg), [1.5, -1.5])

    def test_rotation_preserves_radius(self):
        cfg = self.quiet_cfg()
        for t in (0, 123, 5000):
            assert np.linalg.norm(xor_point(0, t, cfg)) == pytest.approx(
                1.5 * math.sqrt(2), abs=1e-12)

    def test_kerr_twist_preserves_radius(self):
        plain = self.quiet_cfg()
        twisted = self.quiet_cfg(kerr_strength=0.4)
        for s in range(4):
            assert np.linalg.norm(xor_point(s, 0, twisted)) == pytest.approx(
                np.linalg.norm(xor_point(s, 0, plain)), abs=1e-12)

    def test_kerr_changes_phase(self):
        twisted = self.quiet_cfg(kerr_strength=0.4)
        x = xor_point(0, 0, twisted)
        expected_phi = math.atan2(1.5, 1.5) + 0.4 * 4.5  # kappa * r^2
        assert math.atan2(x[1], x[0]) == pytest.approx(
            math.atan2(math.sin(expected_phi), math.cos(expected_phi)), abs=1e-12)

    def test_breathing_scales_radius(self):
        cfg = self.quiet_cfg(breathing_amplitude=0.2, breathing_frequency=0.01)
        t = 157  # sin(1.57) ~ 1: near-max expansion
        scale = 1 + 0.2 * math.sin(0.01 * t)
        assert np.linalg.norm(xor_point(0, t, cfg)) == pytest.approx(
            scale * 1.5 * math.sqrt(2), abs=1e-12)

    def test_label_depends_only_on_latent(self):
        for s in rotating_xor_stream(XorStreamConfig(seed=3), T=500):
            assert s.target == xor_label(s.latent)

    def test_deterministic(self):
        a = [tuple(s.x) for s in rotating_xor_stream(XorStreamConfig(seed=5), T=200)]
        b = [tuple(s.x) for s in rotating_xor_stream(XorStreamConfig(seed=5), T=200)]
        assert a == b

    def test_label_balance(self):
        counts = np.zeros(4)
        for s in rotating_xor_stream(XorStreamConfig(seed=11), T=100_000):
            counts[s.latent] += 1
        freqs = counts / counts.sum()
        assert np.all(np.abs(freqs - 0.25) <= 0.01)

    def test_negative_params_rejected(self):
        with pytest.raises(ValueError):
            XorStreamConfig(noise_scale=-0.1)


class TestRotateImage:
    def test_identity(self):
        rng = np.random.default_rng(2)
        img = rng.uniform(0, 1, size=(8, 8))
        assert np.all(rotate_image(img, 0.0) == img)

    def test_full_turn(self):
        rng = np.random.default_rng(3)
        img = rng.uniform(0, 1, size=(8, 8))
        assert np.allclose(rotate_image(img, 360.0), img, atol=1e-9)

    def test_quarter_turn_single_pixel(self):
        img = np.zeros((8, 8))
        img[0, 0] = 1.0
        out = rotate_image(img, 90.0)
        # (col,row)=(0,0) about (3.5,3.5): offset (-3.5,-3.5) -> (3.5,-3.5) -> (7,0)
        assert out[0, 7] == pytest.approx(1.0, abs=1e-9)
        assert out.sum() == pytest.approx(1.0, abs=1e-9)

    def test_out_of_bounds_reads_zero(self):
        img = np.ones((8, 8))
        img[0, 0] = 0.0  # keep 0 in the value range so the clip doesn't mask it
        out = rotate_image(img, 45.0)
        assert out.min() >= 0.0
        assert out[0, 7] < 0.5  # corner pulls from outside the tile

    def test_clip_to_input_range(self):
        img = np.zeros((8, 8))
        img[3:5, 3:5] = 0.8
        out = rotate_image(img, 30.0)
        assert out.min() >= 0.0 and out.max() <= 0.8 + 1e-12

    def test_bad_shape(self):
        with pytest.raises(ValueError):
            rotate_image(np.zeros((4, 4)), 10.0)


class TestDigits:
    def test_fixture_loads(self):
        rows = load_digits_file(FIXTURE)
        assert len(rows) == 50
        feats, label = rows[0]
        assert feats.shape == (64,) and 0 <= label <= 9
        assert feats.min() >= 0 and feats.max() <= 16

    def test_missing_file(self):
        with pytest.raises(FileNotFoundError):
            load_digits_file("/nonexistent/digits.csv")

    def test_corrupt_file_reports_row(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("1,2,3\n")
        with pytest.raises(ValueError, match="bad.csv:1"):
            load_digits_file(bad)
        bad.write_text(",".join(["1"] * 64) + ",11\n")
        with pytest.raises(ValueError, match="label"):
            load_digits_file(bad)

    def test_stationary_epochs_unrotated(self):
        rows = load_digits_file(FIXTURE)
        cfg = DigitsStreamConfig(n_stationary=1, n_rotating=1, seed=4)
        raw = {tuple(f / 16.0) for f, _ in rows}
        samples = list(digits_stream_from_rows(rows, cfg))
        assert len(samples) == 100
        for s in samples[:50]:
            assert s.latent == 0.0
            assert tuple(s.x) in raw  # identical to a source row
        # rotating epoch: angle grows linearly from the first rotating step
        assert samples[50].latent == 0.0
        assert samples[51].latent == pytest.approx(0.005)
        assert samples[99].latent == pytest.approx(0.005 * 49)

    def test_features_scaled(self):
        rows = load_digits_file(FIXTURE)
        cfg = DigitsStreamConfig(n_stationary=1, n_rotating=0, seed=4)
        for s in digits_stream_from_rows(rows, cfg):
            assert s.x.min() >= 0.0 and s.x.max() <= 1.0

    def test_epochs_are_shuffled_deterministically(self):
        rows = load_digits_file(FIXTURE)
        cfg = DigitsStreamConfig(n_stationary=2, n_rotating=0, seed=4)
        a = [s.target for s in digits_stream_from_rows(rows, cfg)]
        b = [s.target for s in digits_stream_from_rows(rows, cfg)]
        assert a == b
        assert a[:50] != a[50:]  # different epoch orderings (labels permuted)

    def test_path_required(self):
        with pytest.raises(ValueError):
            next(digits_stream(DigitsStreamConfig(path=None)))

    def test_full_schedule_rotation_total(self):
        # 8 rotating epochs x 5620 rows x 0.005 deg/step ~ 224.8 degrees
        assert 8 * 5620 * 0.005 == pytest.approx(224.8)
