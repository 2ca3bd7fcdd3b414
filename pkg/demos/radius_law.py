"""Measure the sphere-capacity law that motivates sqrt(n) radii.

Run with `python3 demos/radius_law.py`.  Saturates perceptual balls of
growing radius with mutually discernible colors (pairwise CIEDE2000 >= 10)
and fits capacity = scale * radius^exponent; the exponent lands near 2,
which is why sibling spheres get radii proportional to the square root of
their child counts.
"""

import numpy as np

from hiercolor import SamplerConfig, calibration_sphere, dart_throw, fit_radius_law


def main() -> None:
    radii = (5.0, 10.0, 15.0, 20.0, 25.0)
    trials = 10
    seeds = [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(0).spawn(trials)]

    samples = []
    print("radius  counts")
    for radius in radii:
        sphere = calibration_sphere(radius)
        counts = [
            len(
                dart_throw(
                    sphere,
                    None,
                    SamplerConfig(
                        min_distance=10.0, max_consecutive_rejections=400, seed=seed
                    ),
                )
            )
            for seed in seeds
        ]
        samples.extend((radius, c) for c in counts)
        print(f"{radius:>6.0f}  {counts}")

    fit = fit_radius_law([(r, c) for r, c in samples if c > 0])
    print(
        f"\ncapacity ~= {fit.scale:.4f} * radius^{fit.exponent:.3f}"
        f"   (R^2 = {fit.r_squared:.3f})"
    )


if __name__ == "__main__":
    main()
