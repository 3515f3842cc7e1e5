"""Pose-adaptive per-frame update weighting.

Combines a linear motion score (translation + rotation magnitudes) with a
frequency-domain image quality score into a clipped learning-rate weight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyImage, NegativeMagnitude
from .geometry import Pose, relative_pose


@dataclass(frozen=True)
class GrayImage:
    """H x W grayscale raster with values in [0, 1]."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=float)
        if px.ndim != 2 or px.size == 0:
            raise EmptyImage("grayscale image must be a nonempty 2D raster")
        object.__setattr__(self, "pixels", px)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


@dataclass(frozen=True)
class Spectrum:
    """Centered 2D magnitude spectrum; DC sits at (H//2, W//2)."""

    magnitudes: np.ndarray

    @property
    def height(self) -> int:
        return self.magnitudes.shape[0]

    @property
    def width(self) -> int:
        return self.magnitudes.shape[1]


@dataclass(frozen=True)
class ScoreConfig:
    w1: float = 1.0
    w2: float = 1.0
    radius: float | None = None  # None -> floor(min(H, W) / 8) at use time
    sigmoid_gain: float = 20.0
    sigmoid_midpoint: float = 0.1
    epsilon: float = 1e-8
    clip_max: float = 1.0
    initial_weight: float = 1.0  # weight for the first frame of a stream

    def effective_radius(self, height: int, width: int) -> float:
        if self.radius is not None:
            return self.radius
        return float(min(height, width) // 8)


def to_grayscale(rgb: np.ndarray) -> GrayImage:
    """BT.601 luma conversion of an H x W x 3 raster in [0, 1]."""
    rgb = np.asarray(rgb, dtype=float)
    if rgb.ndim != 3 or rgb.shape[2] != 3 or rgb.size == 0:
        raise EmptyImage("expected a nonempty H x W x 3 raster")
    gray = 0.299 * rgb[:, :, 0] + 0.587 * rgb[:, :, 1] + 0.114 * rgb[:, :, 2]
    return GrayImage(gray)


def dft2_magnitude_centered(img: GrayImage) -> Spectrum:
    """Magnitude of the 2D DFT, zero frequency shifted to the center."""
    mags = np.abs(np.fft.fftshift(np.fft.fft2(img.pixels)))
    return Spectrum(mags)


def highfreq_ratio(spec: Spectrum, radius: float, epsilon: float = 1e-8) -> float:
    """Fraction of spectral magnitude outside the centered disk of `radius`."""
    h, w = spec.height, spec.width
    v = np.arange(h)[:, None] - h // 2
    u = np.arange(w)[None, :] - w // 2
    mask = (u * u + v * v) > radius * radius
    total = float(spec.magnitudes.sum())
    return float(spec.magnitudes[mask].sum()) / (total + epsilon)


def quality_score(ratio: float, gain: float = 20.0, midpoint: float = 0.1) -> float:
    """Sigmoid image-quality score of the high-frequency ratio."""
    return 1.0 / (1.0 + math.exp(-gain * (ratio - midpoint)))


def motion_score(delta_x: float, delta_q: float, w1: float, w2: float) -> float:
    """Weighted sum of translation and rotation magnitudes."""
    if delta_x < 0 or delta_q < 0:
        raise NegativeMagnitude("motion magnitudes must be nonnegative")
    return w1 * delta_x + w2 * delta_q


def adaptive_update_weight(s1: float, s2: float, clip_max: float = 1.0) -> float:
    """Clipped product of motion and quality scores; the learning-rate weight."""
    return min(s1 * s2, clip_max)


def score_frame(prev: Pose | None, cur: Pose, img: GrayImage,
                cfg: ScoreConfig = ScoreConfig()) -> float:
    """Full scoring pipeline for one frame of a stream.

    The first frame (prev is None) returns cfg.initial_weight so the first
    observation can fully initialize the state.
    """
    if prev is None:
        return cfg.initial_weight
    delta_t, delta_angle = relative_pose(prev, cur)
    s1 = motion_score(float(np.linalg.norm(delta_t)), delta_angle, cfg.w1, cfg.w2)
    spec = dft2_magnitude_centered(img)
    r = cfg.effective_radius(img.height, img.width)
    ratio = highfreq_ratio(spec, r, cfg.epsilon)
    s2 = quality_score(ratio, cfg.sigmoid_gain, cfg.sigmoid_midpoint)
    return adaptive_update_weight(s1, s2, cfg.clip_max)
