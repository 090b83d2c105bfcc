"""Masks for the comparison methods: Cutout, multi-region Cutout,
Hide-and-Seek and Random Erasing."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .masks import ConfigError


class MaskGenerationError(RuntimeError):
    """A sampling loop hit its iteration cap without meeting its target."""


@dataclass(frozen=True)
class CutoutParams:
    side: int

    def __post_init__(self):
        if self.side < 0:
            raise ConfigError(f"side must be >= 0, got {self.side}")


@dataclass(frozen=True)
class HasParams:
    cell: int
    p_hide: float

    def __post_init__(self):
        if self.cell < 1:
            raise ConfigError(f"cell must be >= 1, got {self.cell}")
        if not 0.0 <= self.p_hide <= 1.0:
            raise ConfigError(f"p_hide must be in [0, 1], got {self.p_hide}")


def _square_bounds(cy: int, cx: int, side: int, height: int, width: int):
    y0 = cy - side // 2
    x0 = cx - side // 2
    return (
        min(max(y0, 0), height),
        min(max(y0 + side, 0), height),
        min(max(x0, 0), width),
        min(max(x0 + side, 0), width),
    )


def cutout_mask(rng: np.random.Generator, height: int, width: int, params: CutoutParams) -> np.ndarray:
    """One square centered uniformly on the image, clipped at the borders.

    The square spans ``[c - side//2, c - side//2 + side)`` on each axis.
    """
    mask = np.ones((height, width), dtype=np.uint8)
    cy = int(rng.integers(0, height))
    cx = int(rng.integers(0, width))
    y1, y2, x1, x2 = _square_bounds(cy, cx, params.side, height, width)
    mask[y1:y2, x1:x2] = 0
    return mask


def multi_cutout_iteration_cap(height: int, width: int, side_min: int) -> int:
    return 10 * math.ceil(height * width / max(1, side_min * side_min))


def multi_cutout_mask(
    rng: np.random.Generator,
    height: int,
    width: int,
    side_min: int,
    side_max: int,
    target_keep: float,
    unbiased: bool = False,
) -> np.ndarray:
    """Drop random clipped squares until the keep ratio is at or below ``target_keep``.

    Each step draws the edge (uniform integer in ``[side_min, side_max]``),
    then the center row and column.

    With ``unbiased=True`` the square that crosses the target is applied only
    with probability ``(a - t) / (a - b)``, where ``a`` and ``b`` are the keep
    ratios before and after it. The expected keep ratio is then exactly
    ``target_keep``, but single masks may end above it.
    """
    if not 0.0 < target_keep <= 1.0:
        raise ConfigError(f"target_keep must be in (0, 1], got {target_keep}")
    if not 0 <= side_min <= side_max:
        raise ConfigError(f"need 0 <= side_min <= side_max, got [{side_min}, {side_max}]")
    mask = np.ones((height, width), dtype=np.uint8)
    total = height * width
    kept = total
    cap = multi_cutout_iteration_cap(height, width, side_min)
    for _ in range(cap):
        if kept <= target_keep * total:
            return mask
        side = int(rng.integers(side_min, side_max + 1))
        cy = int(rng.integers(0, height))
        cx = int(rng.integers(0, width))
        y1, y2, x1, x2 = _square_bounds(cy, cx, side, height, width)
        region = mask[y1:y2, x1:x2]
        after = kept - int(np.count_nonzero(region))
        if unbiased and after <= target_keep * total:
            a, b = kept / total, after / total
            if rng.random() < (a - target_keep) / (a - b):
                region[...] = 0
            return mask
        region[...] = 0
        kept = after
    if kept <= target_keep * total:
        return mask
    raise MaskGenerationError(
        f"multi-region cutout did not reach keep ratio {target_keep} within {cap} squares"
    )


def has_mask(rng: np.random.Generator, height: int, width: int, params: HasParams) -> np.ndarray:
    """Hide-and-Seek: hide each ``cell x cell`` patch with probability ``p_hide``.

    Border patches may be smaller; patches are visited row-major.
    """
    n_rows = -(-height // params.cell)
    n_cols = -(-width // params.cell)
    keep = (rng.random((n_rows, n_cols)) >= params.p_hide).astype(np.uint8)
    keep = np.repeat(np.repeat(keep, params.cell, axis=0), params.cell, axis=1)
    return keep[:height, :width].copy()


RANDOM_ERASE_RETRIES = 10


def random_erase_mask(
    rng: np.random.Generator,
    height: int,
    width: int,
    area_frac_range: tuple[float, float] = (0.02, 0.4),
    aspect_range: tuple[float, float] = (0.3, 1 / 0.3),
) -> np.ndarray:
    """Erase one rectangle with sampled area fraction and aspect ratio (h / w).

    Placement is retried up to ``RANDOM_ERASE_RETRIES`` times to fit fully
    inside the image; after that the last draw is placed with clipping.
    """
    a_lo, a_hi = area_frac_range
    s_lo, s_hi = aspect_range
    if not (0.0 < a_lo <= a_hi < 1.0):
        raise ConfigError(f"area fractions must lie in (0, 1), got {area_frac_range}")
    if not (0.0 < s_lo <= s_hi):
        raise ConfigError(f"aspect bounds must be positive, got {aspect_range}")
    mask = np.ones((height, width), dtype=np.uint8)
    area = height * width
    for _ in range(RANDOM_ERASE_RETRIES):
        frac = rng.uniform(a_lo, a_hi)
        aspect = rng.uniform(s_lo, s_hi)
        h = max(1, int(round(math.sqrt(frac * area * aspect))))
        w = max(1, int(round(math.sqrt(frac * area / aspect))))
        if h <= height and w <= width:
            y = int(rng.integers(0, height - h + 1))
            x = int(rng.integers(0, width - w + 1))
            mask[y:y + h, x:x + w] = 0
            return mask
    y = int(rng.integers(0, height))
    x = int(rng.integers(0, width))
    mask[y:y + h, x:x + w] = 0
    return mask
