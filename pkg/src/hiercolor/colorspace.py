"""Color types and exact conversions between sRGB, CIELAB, CIELCh and HSV.

All CIELAB / CIELCh values are relative to the D65 white point with the
2-degree standard observer.  sRGB channels live in [0, 1], lightness L in
[0, 100], and hues are degrees in [0, 360).
"""

from __future__ import annotations

import re
from typing import NamedTuple

import numpy as np


class RgbColor(NamedTuple):
    """An sRGB color with channels in [0, 1]."""

    r: float
    g: float
    b: float


class LabColor(NamedTuple):
    """A CIELAB color (D65, 2-degree observer)."""

    L: float
    a: float
    b: float


class LchColor(NamedTuple):
    """The cylindrical form of CIELAB: lightness, chroma, hue in degrees."""

    L: float
    C: float
    h: float


class HsvColor(NamedTuple):
    """An HSV color; h in degrees [0, 360), s and v in [0, 1]."""

    h: float
    s: float
    v: float


# D65 reference white, 2-degree observer, Y normalized to 100.
WHITE_X = 95.047
WHITE_Y = 100.0
WHITE_Z = 108.883

# Linear sRGB -> XYZ (IEC 61966-2-1, D65).  The inverse is computed
# numerically so that round trips close to machine precision.
_RGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
_XYZ_TO_RGB = np.linalg.inv(_RGB_TO_XYZ)

# Channel tolerance for the gamut predicate.
GAMUT_TOL = 1e-9


def normalize_hue(h):
    """Wrap hue degrees into [0, 360)."""
    return np.asarray(h, dtype=float) % 360.0


def srgb_to_linear(c):
    """Companded sRGB channel -> linear-light channel (sign-mirrored)."""
    c = np.asarray(c, dtype=float)
    a = np.abs(c)
    out = np.where(a <= 0.04045, a / 12.92, ((a + 0.055) / 1.055) ** 2.4)
    return np.copysign(out, c)


def linear_to_srgb(c):
    """Linear-light channel -> companded sRGB channel (sign-mirrored)."""
    c = np.asarray(c, dtype=float)
    a = np.abs(c)
    out = np.where(a <= 0.0031308, 12.92 * a, 1.055 * a ** (1.0 / 2.4) - 0.055)
    return np.copysign(out, c)


def rgb_to_xyz(rgb):
    rgb = np.asarray(rgb, dtype=float)
    return srgb_to_linear(rgb) @ _RGB_TO_XYZ.T * 100.0


def xyz_to_rgb(xyz):
    xyz = np.asarray(xyz, dtype=float)
    return linear_to_srgb(xyz / 100.0 @ _XYZ_TO_RGB.T)


_DELTA = 6.0 / 29.0


def _lab_f(t):
    t = np.asarray(t, dtype=float)
    return np.where(t > _DELTA**3, np.cbrt(t), t / (3.0 * _DELTA**2) + 4.0 / 29.0)


def _lab_f_inv(u):
    u = np.asarray(u, dtype=float)
    return np.where(u > _DELTA, u**3, 3.0 * _DELTA**2 * (u - 4.0 / 29.0))


def xyz_to_lab(xyz):
    xyz = np.asarray(xyz, dtype=float)
    fx = _lab_f(xyz[..., 0] / WHITE_X)
    fy = _lab_f(xyz[..., 1] / WHITE_Y)
    fz = _lab_f(xyz[..., 2] / WHITE_Z)
    return np.stack([116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)], axis=-1)


def lab_to_xyz(lab):
    lab = np.asarray(lab, dtype=float)
    fy = (lab[..., 0] + 16.0) / 116.0
    fx = fy + lab[..., 1] / 500.0
    fz = fy - lab[..., 2] / 200.0
    return np.stack(
        [WHITE_X * _lab_f_inv(fx), WHITE_Y * _lab_f_inv(fy), WHITE_Z * _lab_f_inv(fz)],
        axis=-1,
    )


def rgb_to_lab(rgb):
    return xyz_to_lab(rgb_to_xyz(rgb))


def lab_to_rgb(lab):
    return xyz_to_rgb(lab_to_xyz(lab))


def lab_to_lch(lab):
    lab = np.asarray(lab, dtype=float)
    C = np.hypot(lab[..., 1], lab[..., 2])
    h = np.degrees(np.arctan2(lab[..., 2], lab[..., 1])) % 360.0
    return np.stack([lab[..., 0], C, h], axis=-1)


def lch_to_lab(lch):
    lch = np.asarray(lch, dtype=float)
    hr = np.radians(lch[..., 2])
    return np.stack(
        [lch[..., 0], lch[..., 1] * np.cos(hr), lch[..., 1] * np.sin(hr)], axis=-1
    )


def rgb_to_hsv(rgb):
    rgb = np.asarray(rgb, dtype=float)
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    v = np.max(rgb, axis=-1)
    lo = np.min(rgb, axis=-1)
    d = v - lo
    with np.errstate(divide="ignore", invalid="ignore"):
        hr = np.where(d > 0, ((g - b) / d) % 6.0, 0.0)
        hg = np.where(d > 0, (b - r) / d + 2.0, 0.0)
        hb = np.where(d > 0, (r - g) / d + 4.0, 0.0)
        s = np.where(v > 0, d / v, 0.0)
    h = np.where(v == r, hr, np.where(v == g, hg, hb))
    h = np.where(d > 0, h * 60.0 % 360.0, 0.0)
    return np.stack([h, s, v], axis=-1)


def hsv_to_rgb(hsv):
    hsv = np.asarray(hsv, dtype=float)
    h, s, v = hsv[..., 0] % 360.0, hsv[..., 1], hsv[..., 2]
    c = v * s
    x = c * (1.0 - np.abs((h / 60.0) % 2.0 - 1.0))
    m = v - c
    z = np.zeros_like(c)
    sector = (h // 60.0).astype(int) % 6
    r = np.choose(sector, [c, x, z, z, x, c])
    g = np.choose(sector, [x, c, c, x, z, z])
    b = np.choose(sector, [z, z, x, c, c, x])
    return np.stack([r + m, g + m, b + m], axis=-1)


def in_gamut(lab):
    """True where the CIELAB color lies inside the sRGB cube (tol 1e-9)."""
    rgb = lab_to_rgb(lab)
    ok = (rgb >= -GAMUT_TOL) & (rgb <= 1.0 + GAMUT_TOL)
    return np.all(ok, axis=-1)


def max_chroma(L, h, hi=200.0, iters=60):
    """Largest chroma that keeps (L, C, h) inside the sRGB gamut.

    Bisection on C; the achromatic axis is in gamut for any L in [0, 100],
    so the bracket is always valid.
    """
    L = np.asarray(L, dtype=float)
    h = np.asarray(h, dtype=float)
    lo = np.zeros(np.broadcast(L, h).shape)
    hi = np.full_like(lo, hi)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        ok = in_gamut(lch_to_lab(np.stack([np.broadcast_to(L, mid.shape), mid,
                                           np.broadcast_to(h, mid.shape)], axis=-1)))
        lo = np.where(ok, mid, lo)
        hi = np.where(ok, hi, mid)
    return lo if lo.ndim else float(lo)


def project_into_gamut(lch):
    """Reduce chroma at constant L and h until the color is inside sRGB."""
    lch = np.asarray(lch, dtype=float)
    L = np.clip(lch[..., 0], 0.0, 100.0)
    if np.all(in_gamut(lch_to_lab(np.stack([L, lch[..., 1], lch[..., 2]], axis=-1)))):
        return np.stack([L, lch[..., 1], lch[..., 2]], axis=-1)
    cmax = max_chroma(L, lch[..., 2])
    C = np.minimum(lch[..., 1], cmax)
    return np.stack([L, C, lch[..., 2]], axis=-1)


def lch_to_hsv(lch):
    """HSV coordinates of an LCh color, gamut-projected along chroma."""
    rgb = np.clip(lab_to_rgb(lch_to_lab(project_into_gamut(lch))), 0.0, 1.0)
    return rgb_to_hsv(rgb)


def ciede2000(lab1, lab2):
    """CIEDE2000 color difference, vectorized over leading axes.

    Full formulation including the G chroma rescale, the T hue weighting
    and the R_T rotation term that corrects the blue region.
    """
    lab1 = np.asarray(lab1, dtype=float)
    lab2 = np.asarray(lab2, dtype=float)
    L1, a1, b1 = lab1[..., 0], lab1[..., 1], lab1[..., 2]
    L2, a2, b2 = lab2[..., 0], lab2[..., 1], lab2[..., 2]

    C1 = np.hypot(a1, b1)
    C2 = np.hypot(a2, b2)
    Cbar = 0.5 * (C1 + C2)
    c7 = Cbar**7
    G = 0.5 * (1.0 - np.sqrt(c7 / (c7 + 25.0**7)))
    a1p = (1.0 + G) * a1
    a2p = (1.0 + G) * a2
    C1p = np.hypot(a1p, b1)
    C2p = np.hypot(a2p, b2)

    h1p = np.where((b1 == 0) & (a1p == 0), 0.0, np.degrees(np.arctan2(b1, a1p)) % 360.0)
    h2p = np.where((b2 == 0) & (a2p == 0), 0.0, np.degrees(np.arctan2(b2, a2p)) % 360.0)

    dLp = L2 - L1
    dCp = C2p - C1p

    zero_pair = C1p * C2p == 0
    diff = h2p - h1p
    dhp = np.where(
        np.abs(diff) <= 180.0, diff, np.where(diff > 180.0, diff - 360.0, diff + 360.0)
    )
    dhp = np.where(zero_pair, 0.0, dhp)
    dHp = 2.0 * np.sqrt(C1p * C2p) * np.sin(np.radians(dhp) / 2.0)

    Lbp = 0.5 * (L1 + L2)
    Cbp = 0.5 * (C1p + C2p)
    hsum = h1p + h2p
    hbp = np.where(
        np.abs(h1p - h2p) <= 180.0,
        0.5 * hsum,
        np.where(hsum < 360.0, 0.5 * (hsum + 360.0), 0.5 * (hsum - 360.0)),
    )
    hbp = np.where(zero_pair, hsum, hbp)

    T = (
        1.0
        - 0.17 * np.cos(np.radians(hbp - 30.0))
        + 0.24 * np.cos(np.radians(2.0 * hbp))
        + 0.32 * np.cos(np.radians(3.0 * hbp + 6.0))
        - 0.20 * np.cos(np.radians(4.0 * hbp - 63.0))
    )
    dtheta = 30.0 * np.exp(-(((hbp - 275.0) / 25.0) ** 2))
    cb7 = Cbp**7
    Rc = 2.0 * np.sqrt(cb7 / (cb7 + 25.0**7))
    Sl = 1.0 + 0.015 * (Lbp - 50.0) ** 2 / np.sqrt(20.0 + (Lbp - 50.0) ** 2)
    Sc = 1.0 + 0.045 * Cbp
    Sh = 1.0 + 0.015 * Cbp * T
    Rt = -np.sin(np.radians(2.0 * dtheta)) * Rc

    tL = dLp / Sl
    tC = dCp / Sc
    tH = dHp / Sh
    out = np.sqrt(tL**2 + tC**2 + tH**2 + Rt * tC * tH)
    return float(out) if out.ndim == 0 else out


def pairwise_ciede2000(lab):
    """Symmetric (m, m) CIEDE2000 matrix for rows of an (m, 3) Lab array."""
    lab = np.asarray(lab, dtype=float)
    return ciede2000(lab[:, None, :], lab[None, :, :])


def cross_ciede2000(lab_a, lab_b):
    """(m, n) CIEDE2000 matrix between two stacks of Lab rows."""
    lab_a = np.asarray(lab_a, dtype=float)
    lab_b = np.asarray(lab_b, dtype=float)
    return ciede2000(lab_a[:, None, :], lab_b[None, :, :])


_SPACES = ("rgb", "lab", "lch", "hsv")
_HEX_RE = re.compile(r"^#?([0-9a-fA-F]{6})$")


def _space_of(color):
    if isinstance(color, RgbColor):
        return "rgb"
    if isinstance(color, LabColor):
        return "lab"
    if isinstance(color, LchColor):
        return "lch"
    if isinstance(color, HsvColor):
        return "hsv"
    raise TypeError(f"not a color type: {color!r}")


def convert(color, target):
    """Convert a typed color to one of 'rgb', 'lab', 'lch', 'hsv'.

    Conversion routes through CIELAB; HSV and hex renderings of colors
    outside the sRGB cube first project along chroma at constant L and h.
    """
    if target not in _SPACES:
        raise ValueError(f"unknown target space {target!r}, expected one of {_SPACES}")
    src = _space_of(color)
    if src == target:
        return color

    if src == "rgb":
        lab = rgb_to_lab(np.array(color))
    elif src == "lab":
        lab = np.array(color, dtype=float)
    elif src == "lch":
        lab = lch_to_lab(np.array(color))
    else:  # hsv
        lab = rgb_to_lab(hsv_to_rgb(np.array(color)))

    if target == "lab":
        return LabColor(*(float(v) for v in lab))
    if target == "lch":
        return LchColor(*(float(v) for v in lab_to_lch(lab)))
    if target == "rgb":
        rgb = np.clip(lab_to_rgb(lch_to_lab(project_into_gamut(lab_to_lch(lab)))), 0.0, 1.0)
        return RgbColor(*(float(v) for v in rgb))
    hsv = lch_to_hsv(lab_to_lch(lab))
    return HsvColor(*(float(v) for v in hsv))


def to_hex(color):
    """Render any typed color as lowercase '#rrggbb' (gamut-projected)."""
    rgb = convert(color, "rgb")
    r, g, b = (int(round(255.0 * v)) for v in rgb)
    return f"#{r:02x}{g:02x}{b:02x}"


def from_hex(text):
    """Parse '#rrggbb' into an RgbColor."""
    m = _HEX_RE.match(text.strip())
    if m is None:
        raise ValueError(f"not a hex color: {text!r}")
    raw = m.group(1)
    return RgbColor(*(int(raw[i : i + 2], 16) / 255.0 for i in (0, 2, 4)))


def lch_to_json(lch: LchColor) -> dict:
    """The serialized form used by palette files: {'L':, 'C':, 'h':}."""
    return {"L": float(lch[0]), "C": float(lch[1]), "h": float(lch[2]) % 360.0}


def lch_from_json(obj) -> LchColor:
    try:
        return LchColor(float(obj["L"]), float(obj["C"]), float(obj["h"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"not an LCh object: {obj!r}") from exc
