"""GridMask mask generation.

A mask is a ``uint8`` array of shape ``(H, W)`` holding 1 for kept pixels and
0 for dropped ones. The grid is built from square units of side ``d``; each
unit has an L-shaped kept band of width ``ceil(r * d)`` and one dropped square
of side ``d - ceil(r * d)`` in its lower-right corner. ``delta_x`` and
``delta_y`` shift the lattice.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np


class ConfigError(ValueError):
    """Raised for parameter values outside their valid range."""


@dataclass(frozen=True)
class GridSpec:
    r: float
    d: int
    delta_x: int = 0
    delta_y: int = 0
    angle_deg: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.r <= 1.0:
            raise ConfigError(f"r must be in [0, 1], got {self.r}")
        if self.d < 1:
            raise ConfigError(f"d must be >= 1, got {self.d}")
        if not (0 <= self.delta_x < self.d and 0 <= self.delta_y < self.d):
            raise ConfigError(
                f"offsets must be in [0, {self.d - 1}], got ({self.delta_x}, {self.delta_y})"
            )
        if not 0.0 <= self.angle_deg < 360.0:
            raise ConfigError(f"angle_deg must be in [0, 360), got {self.angle_deg}")

    @property
    def l_keep(self) -> int:
        """Width of the kept band in one unit."""
        # round first so that e.g. 0.6 * 10 == 6.000000000000001 does not ceil to 7
        return math.ceil(round(self.r * self.d, 9))

    @property
    def l_drop(self) -> int:
        """Side of the dropped square in one unit."""
        return self.d - self.l_keep


@dataclass(frozen=True)
class GridConfig:
    r: float = 0.6
    d_min: int = 96
    d_max: int = 224
    rotate: bool = False

    def __post_init__(self):
        if not 0.0 <= self.r <= 1.0:
            raise ConfigError(f"r must be in [0, 1], got {self.r}")
        if not 1 <= self.d_min <= self.d_max:
            raise ConfigError(f"need 1 <= d_min <= d_max, got [{self.d_min}, {self.d_max}]")


def _check_dims(height: int, width: int) -> None:
    if height < 1 or width < 1:
        raise ValueError(f"mask dimensions must be positive, got {height}x{width}")


def sample_grid_spec(rng: np.random.Generator, config: GridConfig) -> GridSpec:
    """Draw ``d``, ``delta_x``, ``delta_y`` and the angle, in that order."""
    d = int(rng.integers(config.d_min, config.d_max + 1))
    delta_x = int(rng.integers(0, d))
    delta_y = int(rng.integers(0, d))
    angle = float(rng.uniform(0.0, 360.0)) % 360.0 if config.rotate else 0.0
    return GridSpec(config.r, d, delta_x, delta_y, angle)


def _bands(spec: GridSpec, n: int, offset: int) -> np.ndarray:
    return ((np.arange(n) - offset) % spec.d) < spec.l_keep


def render_grid_mask(spec: GridSpec, height: int, width: int) -> np.ndarray:
    """Render the axis-aligned mask.

    Pixel ``(i, j)`` is kept iff ``(i - delta_y) mod d < l_keep`` or
    ``(j - delta_x) mod d < l_keep``.
    """
    if spec.angle_deg != 0:
        raise ValueError("spec has a nonzero angle; use render_rotated_grid_mask")
    _check_dims(height, width)
    rows = _bands(spec, height, spec.delta_y)
    cols = _bands(spec, width, spec.delta_x)
    return (rows[:, None] | cols[None, :]).astype(np.uint8)


def oversized_side(height: int, width: int) -> int:
    """Side of a square canvas that covers an HxW window at any rotation."""
    return math.ceil(math.hypot(height, width))


def rotate_crop(canvas: np.ndarray, angle_deg: float, height: int, width: int) -> np.ndarray:
    """Rotate a square canvas about its center and crop the central HxW window.

    Nearest-neighbour sampling; an angle of 0 reduces to a plain center crop.
    """
    side = canvas.shape[0]
    top = (side - height) // 2
    left = (side - width) // 2
    if angle_deg == 0:
        return canvas[top:top + height, left:left + width].copy()
    c = (side - 1) / 2.0
    theta = math.radians(angle_deg)
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    ys = np.arange(top, top + height, dtype=np.float64)[:, None] - c
    xs = np.arange(left, left + width, dtype=np.float64)[None, :] - c
    # inverse mapping: output pixel samples the source rotated by -angle
    src_y = np.rint(c - sin_t * xs + cos_t * ys).astype(np.int64)
    src_x = np.rint(c + cos_t * xs + sin_t * ys).astype(np.int64)
    np.clip(src_y, 0, side - 1, out=src_y)
    np.clip(src_x, 0, side - 1, out=src_x)
    return canvas[src_y, src_x]


def render_rotated_grid_mask(spec: GridSpec, height: int, width: int) -> np.ndarray:
    _check_dims(height, width)
    side = oversized_side(height, width)
    canvas = render_grid_mask(replace(spec, angle_deg=0.0), side, side)
    return rotate_crop(canvas, spec.angle_deg, height, width)


def render_mask(spec: GridSpec, height: int, width: int) -> np.ndarray:
    """Axis-aligned render when the angle is 0, rotated render otherwise."""
    if spec.angle_deg == 0:
        return render_grid_mask(spec, height, width)
    return render_rotated_grid_mask(spec, height, width)


def keep_ratio(mask: np.ndarray) -> float:
    return float(np.count_nonzero(mask)) / mask.size


def reverse_mask(mask: np.ndarray) -> np.ndarray:
    return (1 - mask).astype(np.uint8)


def render_random_grid_mask(
    spec: GridSpec, height: int, width: int, p_u: float, rng: np.random.Generator
) -> np.ndarray:
    """Grid mask where each unit drops its square only with probability ``p_u``.

    One uniform draw per unit touching the image, in row-major unit order.
    """
    if not 0.0 <= p_u <= 1.0:
        raise ConfigError(f"p_u must be in [0, 1], got {p_u}")
    if spec.angle_deg != 0:
        raise ValueError("spec has a nonzero angle; rotate the rendered canvas instead")
    _check_dims(height, width)
    unit_rows = (np.arange(height) - spec.delta_y) // spec.d
    unit_cols = (np.arange(width) - spec.delta_x) // spec.d
    unit_rows -= unit_rows[0]
    unit_cols -= unit_cols[0]
    active = rng.random((unit_rows[-1] + 1, unit_cols[-1] + 1)) < p_u
    base = render_grid_mask(spec, height, width)
    dropped = (base == 0) & active[unit_rows[:, None], unit_cols[None, :]]
    return (~dropped).astype(np.uint8)
