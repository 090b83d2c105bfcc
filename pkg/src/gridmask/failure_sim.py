"""Monte Carlo estimate of how often a dropping method produces a useless
sample (almost all of the object removed) or a trivial one (almost all of it
kept).

Objects are axis-aligned squares placed fully inside a square image. Every
method draws its removal size from ``[x, 2x]`` and is calibrated to the same
expected keep ratio.
"""
from __future__ import annotations

import math
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .baselines import HasParams, has_mask, multi_cutout_mask
from .masks import ConfigError, GridSpec, render_grid_mask

REMOVED = "removed_failure"
RESERVED = "reserved_failure"
OK = "ok"

METHODS = ("gridmask", "has", "multi_cutout")

# trials are grouped into fixed-size chunks, each with its own derived stream,
# so results do not depend on how chunks are spread over workers
CHUNK_TRIALS = 1000


@dataclass(frozen=True)
class SimScenario:
    image_side: int = 224
    object_side_range: tuple[int, int] = (40, 160)
    target_keep: float = 0.75
    trials: int = 100_000
    failure_threshold: float = 0.99
    # what [x, 2x] sizes for GridMask: the unit period d ("unit") or the
    # dropped square side ("drop")
    gridmask_size: str = "unit"

    def __post_init__(self):
        if self.gridmask_size not in ("unit", "drop"):
            raise ConfigError(f"gridmask_size must be 'unit' or 'drop', got {self.gridmask_size!r}")
        lo, hi = self.object_side_range
        if not 0 < lo <= hi <= self.image_side:
            raise ConfigError(
                f"object sides {self.object_side_range} must lie in (0, {self.image_side}]"
            )
        if not 0.0 < self.target_keep <= 1.0:
            raise ConfigError(f"target_keep must be in (0, 1], got {self.target_keep}")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if not 0.5 < self.failure_threshold <= 1.0:
            raise ConfigError(f"failure_threshold must be in (0.5, 1], got {self.failure_threshold}")


@dataclass(frozen=True)
class FailureStats:
    method: str
    x: int
    p_fail: float
    p_removed: float
    p_reserved: float
    trials: int

    @property
    def p_ok(self) -> float:
        return 1.0 - self.p_removed - self.p_reserved

    def stderr(self) -> float:
        """Binomial standard error of ``p_fail``."""
        return math.sqrt(self.p_fail * (1.0 - self.p_fail) / self.trials)


def classify_outcome(kept: int, total: int, threshold: float) -> str:
    """Both ends are inclusive: ``kept/total <= 1 - threshold`` is a removal."""
    frac = kept / total
    eps = 1e-12
    if frac <= 1.0 - threshold + eps:
        return REMOVED
    if frac >= threshold - eps:
        return RESERVED
    return OK


@dataclass(frozen=True)
class GridMaskSim:
    """GridMask with one size drawn uniformly from ``[x, 2x]``.

    With ``size="unit"`` the draw is the period ``d``. With ``size="drop"`` it
    is the dropped-square side and ``d = round(l_drop / (1 - r))``. Offsets
    are uniform; no rotation.
    """

    r: float
    x: int
    size: str = "unit"

    def spec(self, rng: np.random.Generator) -> GridSpec:
        drawn = int(rng.integers(self.x, 2 * self.x + 1))
        if self.size == "unit":
            d = drawn
        else:
            d = max(1, round(drawn / (1.0 - self.r))) if self.r < 1.0 else 1
        delta_x = int(rng.integers(0, d))
        delta_y = int(rng.integers(0, d))
        return GridSpec(self.r, d, delta_x, delta_y)

    def sample(self, rng: np.random.Generator, side: int) -> np.ndarray:
        return render_grid_mask(self.spec(rng), side, side)


@dataclass(frozen=True)
class HasSim:
    """Hide-and-Seek with the patch side drawn from ``[x, 2x]``."""

    p_hide: float
    x: int

    def sample(self, rng: np.random.Generator, side: int) -> np.ndarray:
        cell = int(rng.integers(self.x, 2 * self.x + 1))
        return has_mask(rng, side, side, HasParams(cell, self.p_hide))


@dataclass(frozen=True)
class MultiCutoutSim:
    """Multi-region Cutout, calibrated so the expected keep ratio hits the target."""

    target_keep: float
    x: int

    def sample(self, rng: np.random.Generator, side: int) -> np.ndarray:
        return multi_cutout_mask(
            rng, side, side, self.x, 2 * self.x, self.target_keep, unbiased=True
        )


@dataclass(frozen=True)
class ConstantMask:
    """Keeps or drops everything; useful as a sanity baseline."""

    value: int

    def sample(self, rng: np.random.Generator, side: int) -> np.ndarray:
        return np.full((side, side), self.value, dtype=np.uint8)


MethodSampler = Union[GridMaskSim, HasSim, MultiCutoutSim, ConstantMask]


def gridmask_ratio_for_keep(target_keep: float) -> float:
    """Band ratio ``r`` with ``2r - r^2 = target_keep``."""
    return 1.0 - math.sqrt(1.0 - target_keep)


def calibrate_method(method: str, scenario: SimScenario, x: int) -> MethodSampler:
    if x < 1:
        raise ConfigError(f"x must be >= 1, got {x}")
    if method == "gridmask":
        return GridMaskSim(gridmask_ratio_for_keep(scenario.target_keep), x, scenario.gridmask_size)
    if method == "has":
        return HasSim(1.0 - scenario.target_keep, x)
    if method == "multi_cutout":
        return MultiCutoutSim(scenario.target_keep, x)
    raise ConfigError(f"unknown method {method!r}; expected one of {METHODS}")


def _run_trials(sampler: MethodSampler, scenario: SimScenario, rng: np.random.Generator, n: int):
    side = scenario.image_side
    lo, hi = scenario.object_side_range
    removed = reserved = 0
    for _ in range(n):
        s = int(rng.integers(lo, hi + 1))
        top = int(rng.integers(0, side - s + 1))
        left = int(rng.integers(0, side - s + 1))
        mask = sampler.sample(rng, side)
        kept = int(np.count_nonzero(mask[top:top + s, left:left + s]))
        outcome = classify_outcome(kept, s * s, scenario.failure_threshold)
        if outcome == REMOVED:
            removed += 1
        elif outcome == RESERVED:
            reserved += 1
    return removed, reserved


def method_key(method: Union[str, MethodSampler]) -> int:
    name = method if isinstance(method, str) else repr(method)
    return zlib.crc32(name.encode())


def chunk_stream(seed: int, method: Union[str, MethodSampler], x: int, chunk: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, method_key(method), x, chunk]))


def _chunk_job(args):
    seed, method, scenario, x, chunk, n = args
    sampler = calibrate_method(method, scenario, x) if isinstance(method, str) else method
    return _run_trials(sampler, scenario, chunk_stream(seed, method, x, chunk), n)


def _chunks(scenario: SimScenario):
    full, rest = divmod(scenario.trials, CHUNK_TRIALS)
    sizes = [CHUNK_TRIALS] * full + ([rest] if rest else [])
    return list(enumerate(sizes))


def _stats(name: str, x: int, trials: int, removed: int, reserved: int) -> FailureStats:
    return FailureStats(
        method=name,
        x=x,
        p_fail=(removed + reserved) / trials,
        p_removed=removed / trials,
        p_reserved=reserved / trials,
        trials=trials,
    )


def simulate_point(
    seed: int,
    scenario: SimScenario,
    method: Union[str, MethodSampler],
    x: int,
    jobs: int = 1,
) -> FailureStats:
    """Failure statistics for one method at one removal size ``x``.

    ``method`` is a name from ``METHODS`` or a ready sampler. Each chunk of
    trials draws from a stream keyed by ``(seed, method, x, chunk index)``.
    """
    jobs_args = [(seed, method, scenario, x, c, n) for c, n in _chunks(scenario)]
    if jobs <= 1:
        results = [_chunk_job(a) for a in jobs_args]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_chunk_job, jobs_args))
    removed = sum(r[0] for r in results)
    reserved = sum(r[1] for r in results)
    name = method if isinstance(method, str) else type(method).__name__
    return _stats(name, x, scenario.trials, removed, reserved)


def sweep(
    seed: int,
    scenario: SimScenario,
    methods: Sequence[str],
    xs: Sequence[int],
    jobs: int = 1,
    progress: Callable[[FailureStats], None] | None = None,
) -> list[FailureStats]:
    """``simulate_point`` for every (method, x), method-major order."""
    if not xs:
        raise ConfigError("xs must be non-empty")
    for m in methods:
        if m not in METHODS:
            raise ConfigError(f"unknown method {m!r}; expected one of {METHODS}")
    rows = []
    for m in methods:
        for x in xs:
            row = simulate_point(seed, scenario, m, x, jobs=jobs)
            if progress is not None:
                progress(row)
            rows.append(row)
    return rows


def mean_keep_ratio(seed: int, scenario: SimScenario, method: str, x: int, trials: int) -> float:
    """Average whole-image keep ratio of a calibrated method."""
    sampler = calibrate_method(method, scenario, x)
    rng = chunk_stream(seed, method, x, 0)
    total = 0.0
    for _ in range(trials):
        total += float(np.mean(sampler.sample(rng, scenario.image_side)))
    return total / trials
