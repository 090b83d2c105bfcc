"""Image and table I/O: PNG and binary PGM/PPM images, mask previews, CSV."""
from __future__ import annotations

import io as _io
import os
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from PIL import Image

PREVIEW_GRAY = 128

_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"
_PNM_MAGICS = (b"P5", b"P6")
_EXT_FORMATS = {".png": "PNG", ".pgm": "PPM", ".ppm": "PPM", ".pnm": "PPM"}

CSV_HEADER = ("method", "x", "p_fail", "p_removed", "p_reserved", "trials", "seed")


class ImageIOError(Exception):
    pass


class UnsupportedFormatError(ImageIOError):
    pass


class CorruptImageError(ImageIOError):
    pass


def load_image(path) -> np.ndarray:
    """Decode a PNG or binary PGM/PPM into an ``(H, W, C)`` uint8 array, C in {1, 3}.

    Palette and bilevel images are expanded; alpha channels are dropped.
    Raises ``FileNotFoundError``, ``UnsupportedFormatError`` or
    ``CorruptImageError``.
    """
    with open(path, "rb") as f:
        data = f.read()
    if not (data.startswith(_PNG_MAGIC) or data[:2] in _PNM_MAGICS):
        raise UnsupportedFormatError(f"{path}: not a PNG or binary PGM/PPM file")
    try:
        with Image.open(_io.BytesIO(data)) as img:
            img.load()
            mode = img.mode
            if mode in ("1", "LA"):
                img = img.convert("L")
            elif mode in ("P", "PA", "RGBA"):
                img = img.convert("RGB")
            elif mode not in ("L", "RGB"):
                raise UnsupportedFormatError(f"{path}: unsupported pixel mode {mode}")
            arr = np.asarray(img, dtype=np.uint8)
    except ImageIOError:
        raise
    except Exception as exc:
        raise CorruptImageError(f"{path}: {exc}") from exc
    if arr.ndim == 2:
        arr = arr[:, :, None]
    return arr.copy()


def to_uint8(image: np.ndarray, value_range: tuple[float, float] = (0.0, 1.0)) -> np.ndarray:
    """Map samples to 8 bits.

    Integer images must already be in ``[0, 255]``. Real images are mapped
    affinely, ``lo -> 0`` and ``hi -> 255``, rounded to nearest and clipped.
    """
    if np.issubdtype(image.dtype, np.integer):
        if image.size and (image.min() < 0 or image.max() > 255):
            raise ValueError("integer image samples must lie in [0, 255]")
        return image.astype(np.uint8)
    lo, hi = value_range
    scaled = np.rint((image.astype(np.float64) - lo) * (255.0 / (hi - lo)))
    return np.clip(scaled, 0, 255).astype(np.uint8)


def save_image(image: np.ndarray, path, value_range: tuple[float, float] = (0.0, 1.0)) -> None:
    """Losslessly write an image; the format follows the file extension."""
    fmt = _EXT_FORMATS.get(os.path.splitext(str(path))[1].lower())
    if fmt is None:
        raise UnsupportedFormatError(f"{path}: unknown image extension")
    arr = to_uint8(np.asarray(image), value_range)
    if arr.ndim == 3 and arr.shape[2] == 1:
        arr = arr[:, :, 0]
    if arr.ndim == 3 and arr.shape[2] != 3:
        raise UnsupportedFormatError(f"cannot encode {arr.shape[2]} channels")
    if str(path).lower().endswith(".pgm") and arr.ndim != 2:
        raise UnsupportedFormatError(f"{path}: PGM holds one channel only")
    Image.fromarray(arr, "L" if arr.ndim == 2 else "RGB").save(path, format=fmt)


def render_mask_preview(mask: np.ndarray) -> np.ndarray:
    """Single-channel preview: kept pixels gray, dropped pixels black."""
    return (mask.astype(np.uint8) * PREVIEW_GRAY)[:, :, None]


def mask_from_image(image: np.ndarray) -> np.ndarray:
    """Read a mask back from an image: any nonzero sample in a pixel keeps it."""
    return (image.reshape(image.shape[0], image.shape[1], -1).max(axis=2) > 0).astype(np.uint8)


@dataclass(frozen=True)
class StatsRow:
    method: str
    x: int
    p_fail: float
    p_removed: float
    p_reserved: float
    trials: int
    seed: int

    @classmethod
    def from_stats(cls, stats, seed: int) -> "StatsRow":
        return cls(stats.method, stats.x, stats.p_fail, stats.p_removed,
                   stats.p_reserved, stats.trials, seed)


def write_stats_csv(rows: Iterable[StatsRow], path) -> None:
    """Write one line per row under ``CSV_HEADER``; ratios get six decimals."""
    lines = [",".join(CSV_HEADER)]
    for row in rows:
        lines.append(
            f"{row.method},{row.x:d},{row.p_fail:.6f},{row.p_removed:.6f},"
            f"{row.p_reserved:.6f},{row.trials:d},{row.seed:d}"
        )
    with open(path, "w", newline="\n", encoding="ascii") as f:
        f.write("\n".join(lines) + "\n")
