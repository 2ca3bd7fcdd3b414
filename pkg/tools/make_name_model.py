"""Generate the name model asset shipped as hiercolor/data/name_model.json.

No public color-naming survey ships in a redistributable form here, so the
asset is synthesized from the CSS4 + a few XKCD color names (matplotlib's
tables): 153 terms, 512 Lab bins on an 8x8x8 sRGB grid, and counts from a
Gaussian kernel in Lab around each name's anchor color.  The file follows
the sparse-triplet schema accepted by hiercolor.naming.load_name_model.

Run from the repository root:

    python3 tools/make_name_model.py
"""

import json
from pathlib import Path

import numpy as np
from matplotlib.colors import CSS4_COLORS, XKCD_COLORS, to_rgb

from hiercolor.colorspace import rgb_to_lab

SIGMA = 15.0  # Lab units; controls how far a name's influence reaches
SCALE = 100.0  # peak count at the anchor itself
KEEP = 2.0  # triplets below this count are dropped (top-1 always kept)
GRID = 8  # bins per RGB axis -> 512 bins
TERM_TOTAL = 153

XKCD_EXTRAS = [
    "xkcd:azure",
    "xkcd:mustard",
    "xkcd:sage",
    "xkcd:brick red",
    "xkcd:periwinkle",
]


def main():
    names = sorted(CSS4_COLORS)
    extras = [n for n in XKCD_EXTRAS if n in XKCD_COLORS]
    terms = names + extras
    assert len(terms) == TERM_TOTAL, len(terms)
    anchors = rgb_to_lab(np.array([to_rgb(CSS4_COLORS.get(n) or XKCD_COLORS[n])
                                   for n in terms]))

    centers = (np.arange(GRID) + 0.5) / GRID
    rgb = np.stack(np.meshgrid(centers, centers, centers, indexing="ij"), axis=-1)
    bins_lab = rgb_to_lab(rgb.reshape(-1, 3))

    d2 = ((bins_lab[:, None, :] - anchors[None, :, :]) ** 2).sum(axis=2)
    counts = SCALE * np.exp(-d2 / (2.0 * SIGMA**2))

    triplets = []
    for b in range(counts.shape[0]):
        row = counts[b]
        keep = np.flatnonzero(row >= KEEP)
        if keep.size == 0:
            keep = np.array([int(np.argmax(row))])
        for t in keep:
            triplets.append([int(b), int(t), round(float(row[t]), 4)])

    out = {
        "terms": terms,
        "bins": [[round(float(v), 4) for v in row] for row in bins_lab],
        "counts": triplets,
    }
    dest = Path(__file__).resolve().parents[1] / "src" / "hiercolor" / "data" / "name_model.json"
    dest.write_text(json.dumps(out, separators=(",", ":")) + "\n", encoding="utf-8")
    print(f"wrote {dest}: {len(terms)} terms, {counts.shape[0]} bins, "
          f"{len(triplets)} triplets")


if __name__ == "__main__":
    main()
