"""Deterministic non-stationary data streams.

Three generators: a piecewise drifting regression signal with regime
changes at t=500 and t=1000, a rotating-XOR constellation in the IQ plane
with Kerr phase distortion / breathing / slow global rotation, and a
digit-classification stream whose images rotate continuously after a
stationary warmup. All randomness comes from the SplitMix64 generator in
this package, so identical seeds reproduce streams bit-for-bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np

from .rng import SplitMix64

__all__ = [
    "StreamSample",
    "XorStreamConfig",
    "DigitsStreamConfig",
    "regression_target",
    "regression_stream",
    "xor_point",
    "rotating_xor_stream",
    "rotate_image",
    "load_digits_file",
    "bundled_digits_rows",
    "digits_stream",
    "digits_stream_from_rows",
]

REGRESSION_LENGTH = 1500
DIGITS_ROWS = 5620
DIGITS_COLS = 65


@dataclass(frozen=True)
class StreamSample:
    t: int
    x: np.ndarray
    target: object
    latent: object = None


# ---------------------------------------------------------------------------
# Benchmark 1: drifting piecewise regression
# ---------------------------------------------------------------------------


def regression_target(t: int, x: float) -> float:
    """Piecewise latent signal with regime changes at t=500 and t=1000."""
    if t < 500:
        return math.sin(x) + 0.3 * x * x
    if t < 1000:
        return -math.cos(2.0 * x) + 0.1 * x**3 + 1.0
    return math.exp(-0.5 * (x - 1.0) ** 2) + 0.05 * x**3


def regression_stream(seed: int, T: int = REGRESSION_LENGTH) -> Iterator[StreamSample]:
    """x_t ~ U[-1,1]; the target follows the active regime's formula."""
    rng = SplitMix64(seed)
    for t in range(T):
        x = rng.uniform(-1.0, 1.0)
        regime = 0 if t < 500 else (1 if t < 1000 else 2)
        yield StreamSample(t=t, x=np.array([x]), target=regression_target(t, x),
                           latent=regime)


# ---------------------------------------------------------------------------
# Benchmark 2: rotating XOR constellation with Kerr distortion
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class XorStreamConfig:
    spread: float = 1.5
    noise_scale: float = 0.4
    kerr_strength: float = 0.4
    drift_speed: float = 0.05  # degrees of global rotation per step
    breathing_amplitude: float = 0.2
    breathing_frequency: float = 0.01
    seed: int = 0

    def __post_init__(self):
        for name in ("spread", "noise_scale", "kerr_strength", "drift_speed",
                     "breathing_amplitude", "breathing_frequency"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")


# quadrant centers by latent index; parity of the index sets the label
_XOR_CENTERS = ((1.0, 1.0), (-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0))


def xor_label(s: int) -> int:
    return -1 if s in (0, 1) else 1


def xor_point(s: int, t: int, cfg: XorStreamConfig,
              noise: tuple[float, float] = (0.0, 0.0)) -> np.ndarray:
    """One constellation point for latent index s at step t.

    Transform order: center + noise, Kerr twist, breathing, global rotation.
    """
    cx, cy = _XOR_CENTERS[s]
    i = cx * cfg.spread + cfg.noise_scale * noise[0]
    q = cy * cfg.spread + cfg.noise_scale * noise[1]
    r = math.hypot(i, q)
    phi = math.atan2(q, i) + cfg.kerr_strength * r * r
    i, q = r * math.cos(phi), r * math.sin(phi)
    p_t = 1.0 + cfg.breathing_amplitude * math.sin(cfg.breathing_frequency * t)
    i, q = p_t * i, p_t * q
    theta = math.radians(t * cfg.drift_speed)
    c, s_ = math.cos(theta), math.sin(theta)
    return np.array([c * i - s_ * q, s_ * i + c * q])


def rotating_xor_stream(cfg: XorStreamConfig, T: int = 8000) -> Iterator[StreamSample]:
    """Labels depend only on the latent quadrant index, never on the noise."""
    rng = SplitMix64(cfg.seed)
    for t in range(T):
        s = rng.choice4()
        n0 = rng.gaussian()
        n1 = rng.gaussian()
        x = xor_point(s, t, cfg, noise=(n0, n1))
        yield StreamSample(t=t, x=x, target=xor_label(s), latent=s)


# ---------------------------------------------------------------------------
# Digits with angular drift
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DigitsStreamConfig:
    path: str | None = None
    n_stationary: int = 2
    n_rotating: int = 8
    omega_deg_per_step: float = 0.005
    seed: int = 0

    def __post_init__(self):
        if self.n_stationary < 0 or self.n_rotating < 0:
            raise ValueError("epoch counts must be >= 0")


def rotate_image(pixels: np.ndarray, theta_deg: float) -> np.ndarray:
    """Inverse-map bilinear rotation of an 8x8 tile about its center (3.5, 3.5).

    Out-of-bounds source samples read as 0; the result is clipped to the
    input's value range. theta=0 is an exact identity.
    """
    img = np.asarray(pixels, dtype=np.float64)
    if img.shape != (8, 8):
        raise ValueError(f"expected an 8x8 image, got {img.shape}")
    if theta_deg == 0.0:
        return img.copy()
    theta = math.radians(theta_deg)
    c, s = math.cos(theta), math.sin(theta)
    rows, cols = np.meshgrid(np.arange(8), np.arange(8), indexing="ij")
    # x = column, y = row; destination -> source via the inverse rotation
    dx = cols - 3.5
    dy = rows - 3.5
    sx = c * dx + s * dy + 3.5
    sy = -s * dx + c * dy + 3.5
    x0 = np.floor(sx).astype(np.int64)
    y0 = np.floor(sy).astype(np.int64)
    fx = sx - x0
    fy = sy - y0
    out = np.zeros((8, 8))
    for oy, ox, w in ((0, 0, (1 - fx) * (1 - fy)), (0, 1, fx * (1 - fy)),
                      (1, 0, (1 - fx) * fy), (1, 1, fx * fy)):
        xs = x0 + ox
        ys = y0 + oy
        inside = (xs >= 0) & (xs < 8) & (ys >= 0) & (ys < 8)
        vals = np.where(inside, img[np.clip(ys, 0, 7), np.clip(xs, 0, 7)], 0.0)
        out += w * vals
    return np.clip(out, img.min(), img.max())


def load_digits_file(path: str | Path) -> list[tuple[np.ndarray, int]]:
    """Parse comma-separated rows of 64 integer features (0-16) plus a label."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"digits dataset not found at {path}")
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != DIGITS_COLS:
                raise ValueError(f"{path}:{lineno}: expected {DIGITS_COLS} comma-separated "
                                 f"values, found {len(parts)}")
            try:
                values = [int(p) for p in parts]
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-integer field") from None
            feats = np.array(values[:64], dtype=np.float64)
            label = values[64]
            if not (0 <= label <= 9):
                raise ValueError(f"{path}:{lineno}: label {label} outside 0-9")
            if feats.min() < 0 or feats.max() > 16:
                raise ValueError(f"{path}:{lineno}: feature outside 0-16")
            rows.append((feats, label))
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return rows


def bundled_digits_rows() -> list[tuple[np.ndarray, int]]:
    """The scikit-learn copy of the same corpus (its 1,797-image partition).

    Fallback for environments where the full 5,620-row file has not been
    fetched; raw features are on the same 0-16 scale.
    """
    from sklearn.datasets import load_digits

    ds = load_digits()
    return [(ds.data[i].astype(np.float64), int(ds.target[i]))
            for i in range(ds.data.shape[0])]


def digits_stream_from_rows(rows: list[tuple[np.ndarray, int]],
                            cfg: DigitsStreamConfig) -> Iterator[StreamSample]:
    """Stationary epochs verbatim, then epochs rotated by omega * (rotating step).

    Each epoch is an independent shuffle of the corpus; features are the
    raw 0-16 values divided by 16. The rotation clock starts at the first
    rotating step, reaching n_rotating * len(rows) * omega degrees by the end.
    """
    rng = SplitMix64(cfg.seed)
    n = len(rows)
    t = 0
    rotation_start = cfg.n_stationary * n
    for epoch in range(cfg.n_stationary + cfg.n_rotating):
        order = list(range(n))
        rng.shuffle(order)
        for idx in order:
            feats, label = rows[idx]
            img = feats.reshape(8, 8) / 16.0
            if t < rotation_start:
                theta = 0.0
            else:
                theta = cfg.omega_deg_per_step * (t - rotation_start)
                img = rotate_image(img, theta)
            yield StreamSample(t=t, x=img.reshape(64), target=label, latent=theta)
            t += 1


def digits_stream(cfg: DigitsStreamConfig) -> Iterator[StreamSample]:
    if cfg.path is None:
        raise ValueError("digits stream needs a dataset path (or use digits_stream_from_rows)")
    return digits_stream_from_rows(load_digits_file(cfg.path), cfg)
