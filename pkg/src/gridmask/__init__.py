"""GridMask augmentation masks, baseline dropping methods and a failure-case
simulator."""
from .augment import (
    SchedulePolicy,
    Variant,
    apply_mask,
    augment_batch,
    augment_image,
    schedule_probability,
)
from .baselines import CutoutParams, HasParams, cutout_mask, has_mask, multi_cutout_mask, random_erase_mask
from .failure_sim import FailureStats, SimScenario, calibrate_method, simulate_point, sweep
from .masks import (
    ConfigError,
    GridConfig,
    GridSpec,
    keep_ratio,
    render_grid_mask,
    render_mask,
    render_random_grid_mask,
    render_rotated_grid_mask,
    reverse_mask,
    sample_grid_spec,
)

__version__ = "0.1.0"
