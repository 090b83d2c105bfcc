"""Keep ratio of rendered masks against 2r - r^2, over r and unit size d.

Covers the r values tried on ImageNet / CIFAR10 and the d ranges compared
for ImageNet (dropped-square sizes printed for r = 0.6).
"""
import numpy as np

from gridmask.masks import GridConfig, GridSpec, keep_ratio, render_mask, sample_grid_spec

SIDE = 224


def main():
    print("r     law     " + "  ".join(f"d={d:<4d}" for d in (8, 16, 32, 56, 96, 224)))
    for r in (0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8):
        ks = [keep_ratio(render_mask(GridSpec(r, d), SIDE, SIDE)) for d in (8, 16, 32, 56, 96, 224)]
        print(f"{r:.1f}  {2 * r - r * r:.4f}  " + "  ".join(f"{k:.4f}" for k in ks))

    print("\nrandom offsets + rotation, r=0.6, 2000 draws per d range")
    rng = np.random.default_rng(0)
    for lo, hi in ((40, 60), (96, 120), (150, 170), (200, 224), (96, 224)):
        cfg = GridConfig(0.6, lo, hi, rotate=True)
        ks, drops = [], []
        for _ in range(2000):
            spec = sample_grid_spec(rng, cfg)
            ks.append(keep_ratio(render_mask(spec, SIDE, SIDE)))
            drops.append(spec.l_drop)
        print(f"d in [{lo:3d}, {hi:3d}]: mean keep {np.mean(ks):.4f}  "
              f"dropped square {min(drops)}..{max(drops)} px")


if __name__ == "__main__":
    main()
