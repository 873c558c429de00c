"""Deterministic synthetic images for tests and benchmarks."""

from __future__ import annotations

import numpy as np

from .imagecore import Labeling, RawImage


def two_block_image(
    width: int = 32,
    height: int = 32,
    left=(40, 40, 40),
    right=(200, 200, 200),
) -> RawImage:
    """Left half one color, right half another; the canonical easy split."""
    pixels = np.empty((height, width, 3), dtype=np.uint8)
    half = width // 2
    pixels[:, :half] = left
    pixels[:, half:] = right
    return RawImage(width, height, pixels)


def two_block_ground_truth(width: int = 32, height: int = 32) -> Labeling:
    """Right-half-fore labeling matching two_block_image."""
    fore = np.zeros((height, width), dtype=bool)
    fore[:, width // 2 :] = True
    return Labeling(fore.reshape(-1))


def noisy_two_block_image(
    width: int = 32,
    height: int = 32,
    noise: int = 30,
    seed: int = 7,
    left=(60, 60, 60),
    right=(190, 190, 190),
) -> RawImage:
    """Two-block image with uniform integer noise added per pixel."""
    base = two_block_image(width, height, left, right).pixels.astype(np.int64)
    rng = np.random.default_rng(seed)
    jitter = rng.integers(-noise, noise + 1, size=(height, width, 1))
    pixels = np.clip(base + jitter, 0, 255).astype(np.uint8)
    return RawImage(width, height, pixels)


def random_noise_image(width: int, height: int, seed: int = 0, gray: bool = True) -> RawImage:
    """Uniform random pixels; gray images replicate one channel."""
    rng = np.random.default_rng(seed)
    if gray:
        g = rng.integers(0, 256, size=(height, width, 1), dtype=np.int64)
        pixels = np.repeat(g, 3, axis=2).astype(np.uint8)
    else:
        pixels = rng.integers(0, 256, size=(height, width, 3), dtype=np.int64).astype(np.uint8)
    return RawImage(width, height, pixels)
