"""Difference mode vs similarity mode on the same scatterplot.

Run with `python3 demos/compare_modes.py`.  Builds a scatter layout whose
samples carry feature vectors drawn from two latent blobs, then colors the
classes twice with the same seed: once pushing spatial neighbors apart
(difference) and once tying color distance to feature similarity.
"""

import numpy as np

from hiercolor import OptimizerConfig, Session


def make_layout(rng, classes, samples_per_class=12):
    # two latent blobs: classes 0-2 share one feature center, 3-5 the other
    centers = {c: (0.0 if i < 3 else 6.0) for i, c in enumerate(classes)}
    samples = []
    for c in classes:
        for k in range(samples_per_class):
            samples.append(
                {
                    "id": f"{c}_{k}",
                    "pos": [float(v) for v in rng.uniform(0, 10, 2)],
                    "label": c,
                    "features": [
                        float(centers[c] + rng.normal(scale=0.4)),
                        float(rng.normal(scale=0.4)),
                    ],
                }
            )
    return {"kind": "scatter", "samples": samples}


def swatch(hex_color: str) -> str:
    r, g, b = (int(hex_color[i : i + 2], 16) for i in (1, 3, 5))
    return f"\x1b[48;2;{r};{g};{b}m    \x1b[0m"


def main() -> None:
    rng = np.random.default_rng(7)
    classes = [f"class{i}" for i in range(6)]
    hierarchy = {
        "id": "root",
        "label": "root",
        "children": [{"id": c, "label": c} for c in classes],
    }
    layout = make_layout(rng, classes)

    palettes = {}
    for mode in ("difference", "similarity"):
        session = Session(
            hierarchy, layout=layout, mode=mode, config=OptimizerConfig(seed=3)
        )
        palettes[mode] = {r["id"]: r["hex"] for r in session.node_rows()}

    print("class      difference  similarity   (classes 0-2 and 3-5 form two blobs)")
    for c in classes:
        d, s = palettes["difference"][c], palettes["similarity"][c]
        print(f"{c:<10} {swatch(d)} {d}  {swatch(s)} {s}")
    print(
        "\nsimilarity mode pulls same-blob classes toward related colors;"
        "\ndifference mode only keeps overlapping neighbors apart."
    )


if __name__ == "__main__":
    main()
