"""Image I/O (binary PGM/PPM), resizing, gray quantization, and labelings.

Everything downstream consumes either a RawImage (the decoded raster) or an
IndexedImage (pixels mapped to a small set of color classes with per-class
statistics). Both are immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

# Rec.601 luminance weights for RGB -> gray.
LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])


class PnmError(ValueError):
    """Malformed or unsupported PNM input."""


class PnmHeaderError(PnmError):
    """Magic number or header tokens are not a valid binary PGM/PPM header."""


class PnmMaxvalError(PnmError):
    """Header declares a maxval other than 255."""


class PnmTruncatedError(PnmError):
    """Pixel payload is shorter than the header promises."""


@dataclass(frozen=True)
class RawImage:
    """RGB raster with 8-bit channels; gray inputs are replicated across channels."""

    width: int
    height: int
    pixels: np.ndarray  # (height, width, 3) uint8

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("image must contain at least one pixel")
        if self.pixels.shape != (self.height, self.width, 3):
            raise ValueError(
                f"pixel buffer shape {self.pixels.shape} does not match "
                f"{self.height}x{self.width}x3"
            )

    @property
    def total(self) -> int:
        return self.width * self.height

    def flat_colors(self) -> np.ndarray:
        """Pixel colors as an (n, 3) float64 array in row-major order."""
        return self.pixels.reshape(-1, 3).astype(np.float64)


@dataclass(frozen=True)
class IndexedImage:
    """Pixel grid quantized to color classes, plus per-class statistics.

    Classes are compacted: every index in [0, class_count) has count >= 1,
    so per-class divisors never vanish.
    """

    width: int
    height: int
    class_of: np.ndarray  # (n,) int64, row-major
    counts: np.ndarray    # (class_count,) int64
    means: np.ndarray     # (class_count, 3) float64

    def __post_init__(self):
        n = self.width * self.height
        if self.class_of.shape != (n,):
            raise ValueError("class index array does not match image size")
        if int(self.counts.sum()) != n:
            raise ValueError("class counts do not sum to the pixel count")
        if self.counts.min() < 1:
            raise ValueError("empty color classes must be compacted away")
        if self.class_of.max() >= len(self.counts) or self.class_of.min() < 0:
            raise ValueError("class index out of range")
        if self.means.shape != (len(self.counts), 3):
            raise ValueError("class means do not match the class count")

    @property
    def total(self) -> int:
        return self.width * self.height

    @property
    def class_count(self) -> int:
        return len(self.counts)


@dataclass(frozen=True)
class Labeling:
    """Binary fore/back assignment; fore maps to +1 in the indicator vector."""

    fore: np.ndarray  # (n,) bool

    def __post_init__(self):
        if self.fore.dtype != np.bool_:
            raise ValueError("labeling must be a boolean array")

    @property
    def n(self) -> int:
        return len(self.fore)

    @property
    def fore_count(self) -> int:
        return int(self.fore.sum())

    @property
    def back_count(self) -> int:
        return self.n - self.fore_count

    def indicator(self) -> np.ndarray:
        """+-1 vector: +1 on fore pixels, -1 on back pixels."""
        return np.where(self.fore, 1.0, -1.0)

    def flipped(self) -> "Labeling":
        return Labeling(~self.fore)

    @classmethod
    def from_indicator(cls, d: np.ndarray) -> "Labeling":
        """Entries > 0 become fore; entries <= 0 become back."""
        return cls(np.asarray(d) > 0)

    @classmethod
    def uniform(cls, n: int, fore: bool) -> "Labeling":
        return cls(np.full(n, fore, dtype=bool))


def _read_header_ints(data: bytes, count: int, start: int) -> tuple[list[int], int]:
    """Parse `count` ASCII integers from `start`, skipping whitespace and # comments.

    Returns the integers and the offset of the first byte after the last token.
    """
    tokens: list[int] = []
    i = start
    while len(tokens) < count:
        while i < len(data) and (data[i : i + 1].isspace() or data[i] == ord("#")):
            if data[i] == ord("#"):
                nl = data.find(b"\n", i)
                i = len(data) if nl < 0 else nl + 1
            else:
                i += 1
        j = i
        while j < len(data) and not data[j : j + 1].isspace():
            j += 1
        if j == i:
            raise PnmHeaderError("header ended before all size tokens were read")
        try:
            tokens.append(int(data[i:j]))
        except ValueError:
            raise PnmHeaderError(f"non-numeric header token {data[i:j]!r}") from None
        i = j
    return tokens, i


def load_image(path) -> RawImage:
    """Decode a binary PGM (P5) or PPM (P6) file with maxval 255.

    PGM pixels are replicated across the three channels. Raises OSError for
    unreadable files, PnmHeaderError / PnmMaxvalError / PnmTruncatedError for
    the respective format defects.
    """
    data = Path(path).read_bytes()
    magic = data[:2]
    if magic == b"P5":
        channels = 1
    elif magic == b"P6":
        channels = 3
    else:
        raise PnmHeaderError(f"unsupported magic {magic!r}; expected P5 or P6")
    (width, height, maxval), pos = _read_header_ints(data, 3, 2)
    if width < 1 or height < 1:
        raise PnmHeaderError(f"invalid dimensions {width}x{height}")
    if maxval != 255:
        raise PnmMaxvalError(f"maxval {maxval} unsupported; only 255")
    if pos >= len(data) or not data[pos : pos + 1].isspace():
        raise PnmHeaderError("expected a whitespace byte between header and pixels")
    need = width * height * channels
    payload = data[pos + 1 : pos + 1 + need]
    if len(payload) < need:
        raise PnmTruncatedError(
            f"pixel data truncated: expected {need} bytes, found {len(payload)}"
        )
    arr = np.frombuffer(payload, dtype=np.uint8)
    if channels == 1:
        pixels = np.repeat(arr.reshape(height, width, 1), 3, axis=2)
    else:
        pixels = arr.reshape(height, width, 3).copy()
    return RawImage(width, height, pixels)


def _overlap_weights(src: int, dst: int) -> np.ndarray:
    """Row-stochastic (dst, src) box-filter matrix: fractional cell overlaps."""
    step = src / dst
    w = np.zeros((dst, src))
    for i in range(dst):
        lo = i * step
        hi = (i + 1) * step
        for j in range(int(np.floor(lo)), min(int(np.ceil(hi)), src)):
            w[i, j] = min(hi, j + 1) - max(lo, j)
    return w / step


def resize_max(img: RawImage, max_dim: int) -> RawImage:
    """Box-filter downscale so the longest side equals max_dim.

    Images already within the limit are returned unchanged. Target dimensions
    are rounded to nearest (minimum 1), preserving aspect ratio.
    """
    if max_dim < 1:
        raise ValueError("max_dim must be at least 1")
    longest = max(img.width, img.height)
    if longest <= max_dim:
        return img
    scale = max_dim / longest
    new_w = max(1, round(img.width * scale))
    new_h = max(1, round(img.height * scale))
    wy = _overlap_weights(img.height, new_h)
    wx = _overlap_weights(img.width, new_w)
    src = img.pixels.astype(np.float64)
    out = np.empty((new_h, new_w, 3))
    for c in range(3):
        out[:, :, c] = wy @ src[:, :, c] @ wx.T
    pixels = np.clip(np.rint(out), 0, 255).astype(np.uint8)
    return RawImage(new_w, new_h, pixels)


def quantize_gray(img: RawImage, levels: int) -> IndexedImage:
    """Quantize to `levels` gray bins: class = floor(gray * levels / 256).

    Gray is the Rec.601 luminance rounded to an integer. Empty bins are
    compacted; class means are the average member gray replicated to RGB.
    """
    if not 2 <= levels <= 256:
        raise ValueError("levels must be in [2, 256]")
    gray = np.floor(img.flat_colors() @ LUMA_WEIGHTS + 0.5).astype(np.int64)
    bins = (gray * levels) // 256
    _, class_of = np.unique(bins, return_inverse=True)
    class_of = class_of.astype(np.int64).ravel()
    counts = np.bincount(class_of)
    mean_gray = np.bincount(class_of, weights=gray) / counts
    means = np.repeat(mean_gray[:, None], 3, axis=1)
    return IndexedImage(img.width, img.height, class_of, counts, means)


def write_mask(labeling: Labeling, width: int, height: int, path) -> None:
    """Write a labeling as a binary PGM mask: fore=255, back=0."""
    if labeling.n != width * height:
        raise ValueError("labeling length does not match mask dimensions")
    payload = np.where(labeling.fore, 255, 0).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (width, height))
        fh.write(payload.tobytes())


def write_ppm(img: RawImage, path) -> None:
    """Write a RawImage as a binary PPM (P6, maxval 255)."""
    with open(path, "wb") as fh:
        fh.write(b"P6\n%d %d\n255\n" % (img.width, img.height))
        fh.write(np.ascontiguousarray(img.pixels).tobytes())


def labeling_from_mask(img: RawImage) -> Labeling:
    """Recover a labeling from a mask image: nonzero pixels are fore."""
    return Labeling(img.pixels[:, :, 0].reshape(-1) != 0)


def rand_index(a: Labeling, b: Labeling) -> float:
    """Rand index of two binary labelings (pair-counting, swap-invariant)."""
    if a.n != b.n:
        raise ValueError("labelings differ in length")
    n = a.n
    if n < 2:
        return 1.0
    n11 = int((a.fore & b.fore).sum())
    n10 = int((a.fore & ~b.fore).sum())
    n01 = int((~a.fore & b.fore).sum())
    n00 = n - n11 - n10 - n01
    same = sum(c * (c - 1) // 2 for c in (n11, n10, n01, n00))
    diff = n11 * n00 + n10 * n01
    return (same + diff) / (n * (n - 1) // 2)
