"""Applying masks to images and scheduling how often to do so.

Images are numpy arrays of shape ``(H, W, C)``; 2-D arrays are treated as a
single channel.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .masks import (
    ConfigError,
    GridConfig,
    oversized_side,
    render_grid_mask,
    render_random_grid_mask,
    reverse_mask,
    rotate_crop,
    sample_grid_spec,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SchedulePolicy:
    kind: str = "constant"  # "constant" or "ramp"
    p: float = 1.0
    upper_bound: float = 0.8
    ramp_end_epoch: int = 240

    def __post_init__(self):
        if self.kind not in ("constant", "ramp"):
            raise ConfigError(f"unknown schedule kind {self.kind!r}")
        for name in ("p", "upper_bound"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name} must be in [0, 1], got {v}")
        if self.ramp_end_epoch < 1:
            raise ConfigError(f"ramp_end_epoch must be >= 1, got {self.ramp_end_epoch}")

    @classmethod
    def constant(cls, p: float) -> "SchedulePolicy":
        return cls("constant", p=p)

    @classmethod
    def ramp(cls, upper_bound: float, end_epoch: int) -> "SchedulePolicy":
        return cls("ramp", upper_bound=upper_bound, ramp_end_epoch=end_epoch)


@dataclass(frozen=True)
class Variant:
    kind: str = "standard"  # "standard", "reversed" or "random"
    p_u: float = 1.0

    def __post_init__(self):
        if self.kind not in ("standard", "reversed", "random"):
            raise ConfigError(f"unknown variant {self.kind!r}")
        if not 0.0 <= self.p_u <= 1.0:
            raise ConfigError(f"p_u must be in [0, 1], got {self.p_u}")

    @classmethod
    def parse(cls, text: str) -> "Variant":
        """Parse ``standard``, ``reversed`` or ``random:PU``."""
        if text.startswith("random:"):
            try:
                p_u = float(text.split(":", 1)[1])
            except ValueError:
                raise ConfigError(f"bad p_u in variant {text!r}") from None
            return cls("random", p_u)
        return cls(text)


def schedule_probability(policy: SchedulePolicy, epoch: int) -> float:
    if epoch < 0:
        raise ValueError(f"epoch must be >= 0, got {epoch}")
    if policy.kind == "constant":
        return policy.p
    if epoch >= policy.ramp_end_epoch:
        return policy.upper_bound
    return policy.upper_bound * epoch / policy.ramp_end_epoch


def apply_mask(image: np.ndarray, mask: np.ndarray, fill=0) -> np.ndarray:
    """Return a copy of ``image`` with every dropped pixel set to ``fill``.

    ``fill`` is a scalar or one value per channel. With ``fill=0`` this is the
    elementwise product of image and mask.
    """
    if image.shape[:2] != mask.shape:
        raise ValueError(f"mask shape {mask.shape} does not match image {image.shape[:2]}")
    out = image.copy()
    out[mask == 0] = fill
    return out


def render_mask_for(
    rng: np.random.Generator,
    config: GridConfig,
    height: int,
    width: int,
    variant: Variant = Variant(),
) -> np.ndarray:
    """Sample a spec and render the (possibly rotated) variant mask."""
    spec = sample_grid_spec(rng, config)
    if spec.angle_deg == 0:
        h, w = height, width
    else:
        h = w = oversized_side(height, width)
    flat = replace(spec, angle_deg=0.0)
    if variant.kind == "random":
        mask = render_random_grid_mask(flat, h, w, variant.p_u, rng)
    else:
        mask = render_grid_mask(flat, h, w)
    if spec.angle_deg != 0:
        mask = rotate_crop(mask, spec.angle_deg, height, width)
    if variant.kind == "reversed":
        mask = reverse_mask(mask)
    return mask


def augment_image(
    rng: np.random.Generator,
    image: np.ndarray,
    grid_config: GridConfig,
    policy: SchedulePolicy,
    epoch: int,
    variant: Variant = Variant(),
    fill=0,
) -> np.ndarray:
    """Apply GridMask with the scheduled probability.

    The apply/skip draw is taken from ``rng`` before any mask parameter.
    Skipped images are returned as-is (not copied).
    """
    if rng.random() >= schedule_probability(policy, epoch):
        return image
    mask = render_mask_for(rng, grid_config, image.shape[0], image.shape[1], variant)
    return apply_mask(image, mask, fill)


def stream_for(master_seed: int, index: int) -> np.random.Generator:
    """Independent generator for item ``index`` of a batch.

    The stream is seeded by numpy's ``SeedSequence`` hash of the entropy pair
    ``(master_seed, index)``, so it does not depend on execution order.
    """
    return np.random.default_rng(np.random.SeedSequence([master_seed, index]))


def augment_batch(
    master_seed: int,
    images: Sequence[np.ndarray],
    config: GridConfig,
    policy: SchedulePolicy,
    epoch: int,
    variant: Variant = Variant(),
    fill=0,
    jobs: int = 1,
):
    """Augment every image with its own seeded stream.

    Returns ``(outputs, errors)``: ``outputs[i]`` is ``None`` when image ``i``
    failed and ``errors`` maps the failed index to its exception.
    """

    def work(i):
        f = fill(images[i]) if callable(fill) else fill
        return augment_image(stream_for(master_seed, i), images[i], config, policy, epoch, variant, f)

    outputs: list = [None] * len(images)
    errors: dict[int, Exception] = {}

    def collect(i, fn):
        try:
            outputs[i] = fn(i)
        except Exception as exc:  # noqa: BLE001 - reported per index
            log.warning("image %d failed: %s", i, exc)
            errors[i] = exc

    if jobs <= 1:
        for i in range(len(images)):
            collect(i, work)
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            list(pool.map(lambda i: collect(i, work), range(len(images))))
    return outputs, errors
