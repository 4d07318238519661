"""CW-SSIM tuned for sparse black-and-white table renders.

Both images are converted to grayscale, resampled to a common size, trimmed
to even dimensions and split by a one-level 2x2 block Haar transform. SSIM
is evaluated once per sub-band with global statistics and the four scores
are averaged.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


@dataclass(frozen=True)
class SsimConstants:
    k1: float = 0.01
    k2: float = 0.03
    L: float = 255.0

    @property
    def c1(self) -> float:
        return (self.k1 * self.L) ** 2

    @property
    def c2(self) -> float:
        return (self.k2 * self.L) ** 2


DEFAULT_CONSTANTS = SsimConstants()


class SubbandSet(NamedTuple):
    cA: np.ndarray
    cH: np.ndarray
    cV: np.ndarray
    cD: np.ndarray


def to_gray(img) -> np.ndarray:
    """Float64 luminance matrix from a 2-D array, an RGB(A) array or a PIL image."""
    if hasattr(img, "mode") and hasattr(img, "convert"):
        img = np.asarray(img.convert("RGB") if img.mode not in ("L", "F", "I") else img)
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim == 3:
        if arr.shape[2] == 1:
            arr = arr[:, :, 0]
        elif arr.shape[2] in (3, 4):
            arr = 0.299 * arr[:, :, 0] + 0.587 * arr[:, :, 1] + 0.114 * arr[:, :, 2]
        else:
            raise ValueError(f"unsupported channel count {arr.shape[2]}")
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D image, got shape {arr.shape}")
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise ValueError("image has a zero dimension")
    return arr


def _axis_weights(src: int, dst: int):
    # pixel-centre aligned sampling positions, clamped at the borders
    pos = (np.arange(dst) + 0.5) * (src / dst) - 0.5
    pos = np.clip(pos, 0, src - 1)
    lo = np.floor(pos).astype(int)
    hi = np.minimum(lo + 1, src - 1)
    return lo, hi, pos - lo


def resize_bilinear(arr: np.ndarray, height: int, width: int) -> np.ndarray:
    """Separable bilinear resampling; the identity when the size already matches."""
    h, w = arr.shape
    if (h, w) == (height, width):
        return arr
    lo, hi, t = _axis_weights(h, height)
    a, b = arr[lo, :], arr[hi, :]
    arr = a + t[:, None] * (b - a)
    lo, hi, t = _axis_weights(w, width)
    a, b = arr[:, lo], arr[:, hi]
    return a + t[None, :] * (b - a)


def preprocess_pair(x, y) -> tuple[np.ndarray, np.ndarray]:
    """Grayscale, resample both to the element-wise max size, trim to even."""
    gx, gy = to_gray(x), to_gray(y)
    height = max(gx.shape[0], gy.shape[0])
    width = max(gx.shape[1], gy.shape[1])
    gx = resize_bilinear(gx, height, width)
    gy = resize_bilinear(gy, height, width)
    h2, w2 = height - height % 2, width - width % 2
    if h2 == 0 or w2 == 0:
        raise ValueError("images must be at least 2x2 after alignment")
    return gx[:h2, :w2], gy[:h2, :w2]


def haar_decompose(img: np.ndarray) -> SubbandSet:
    """One-level 2x2 block Haar transform, normalized by 4 so cA stays in [0, 255]."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2 or img.shape[0] % 2 or img.shape[1] % 2:
        raise ValueError(f"haar_decompose needs even 2-D input, got shape {img.shape}")
    p00 = img[0::2, 0::2]
    p01 = img[0::2, 1::2]
    p10 = img[1::2, 0::2]
    p11 = img[1::2, 1::2]
    return SubbandSet(
        cA=(p00 + p01 + p10 + p11) / 4,
        cH=(p00 + p01 - p10 - p11) / 4,
        cV=(p00 - p01 + p10 - p11) / 4,
        cD=(p00 - p01 - p10 + p11) / 4,
    )


def haar_reconstruct(bands: SubbandSet) -> np.ndarray:
    cA, cH, cV, cD = bands
    out = np.empty((cA.shape[0] * 2, cA.shape[1] * 2))
    out[0::2, 0::2] = cA + cH + cV + cD
    out[0::2, 1::2] = cA + cH - cV - cD
    out[1::2, 0::2] = cA - cH + cV - cD
    out[1::2, 1::2] = cA - cH - cV + cD
    return out


def subband_ssim(cx: np.ndarray, cy: np.ndarray, k: SsimConstants = DEFAULT_CONSTANTS) -> float:
    """SSIM with one global mean / population variance / covariance per sub-band."""
    cx = np.asarray(cx, dtype=np.float64)
    cy = np.asarray(cy, dtype=np.float64)
    if cx.shape != cy.shape:
        raise ValueError(f"shape mismatch {cx.shape} vs {cy.shape}")
    mx, my = cx.mean(), cy.mean()
    dx, dy = cx - mx, cy - my
    vx = np.mean(dx * dx)
    vy = np.mean(dy * dy)
    cov = np.mean(dx * dy)
    c1, c2 = k.c1, k.c2
    num = (2 * mx * my + c1) * (2 * cov + c2)
    den = (mx * mx + my * my + c1) * (vx + vy + c2)
    return float(num / den)


def cw_ssim(x, y, k: SsimConstants = DEFAULT_CONSTANTS) -> float:
    gx, gy = preprocess_pair(x, y)
    bx, by = haar_decompose(gx), haar_decompose(gy)
    return sum(subband_ssim(a, b, k) for a, b in zip(bx, by)) / 4
