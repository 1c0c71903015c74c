"""8x8 block DCT, zigzag addressing, Watson masks and image metrics."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
from scipy import fft

from .errors import ConfigError

# Frequency sensitivity thresholds t(i, j); symmetric in i and j.
WATSON_TABLE = np.array([
    [1.40, 1.01, 1.16, 1.66, 2.40, 3.43, 4.79, 6.56],
    [1.01, 1.45, 1.32, 1.52, 2.00, 2.71, 3.67, 4.93],
    [1.16, 1.32, 2.24, 2.59, 2.98, 3.64, 4.60, 5.88],
    [1.66, 1.52, 2.59, 3.77, 4.55, 5.30, 6.28, 7.60],
    [2.40, 2.00, 2.98, 4.55, 6.15, 7.46, 8.71, 10.17],
    [3.43, 2.71, 3.64, 5.30, 7.46, 9.62, 11.58, 13.51],
    [4.79, 3.67, 4.60, 6.28, 8.71, 11.58, 14.50, 17.29],
    [6.56, 4.93, 5.88, 7.60, 10.17, 13.51, 17.29, 21.15],
])
LUMINANCE_EXPONENT = 0.649
CONTRAST_EXPONENT = 0.7
STAGES = ("frequency", "luminance", "contrast")


def _zigzag():
    cells = [(i, j) for i in range(8) for j in range(8)]
    return sorted(cells, key=lambda p: (p[0] + p[1], p[0] if (p[0] + p[1]) % 2 else -p[0]))


ZIGZAG = tuple(_zigzag())


@dataclass(frozen=True)
class BlockDctImage:
    """Coefficients x(i, j, k) stored as ``planes[i, j, k]``; blocks row-major."""

    width: int
    height: int
    planes: np.ndarray

    @property
    def blocks(self):
        return self.planes.shape[2]

    @property
    def mean_dc(self):
        return float(self.planes[0, 0].mean())

    def with_planes(self, planes):
        return BlockDctImage(self.width, self.height, np.asarray(planes, dtype=float))


def _check_dims(shape):
    if len(shape) != 2 or shape[0] % 8 or shape[1] % 8 or shape[0] == 0 or shape[1] == 0:
        raise ConfigError(f"image dimensions must be nonzero multiples of 8, got {shape}")


def block_dct(image):
    """Orthonormal 8x8 DCT-II of every block."""
    img = np.asarray(image, dtype=float)
    _check_dims(img.shape)
    h, w = img.shape
    blocks = img.reshape(h // 8, 8, w // 8, 8).transpose(1, 3, 0, 2)
    coeffs = fft.dctn(blocks, type=2, axes=(0, 1), norm="ortho")
    return BlockDctImage(w, h, coeffs.reshape(8, 8, -1))


def inverse_dct(img):
    h, w = img.height, img.width
    planes = np.asarray(img.planes, dtype=float).reshape(8, 8, h // 8, w // 8)
    pixels = fft.idctn(planes, type=2, axes=(0, 1), norm="ortho")
    return pixels.transpose(2, 0, 3, 1).reshape(h, w)


def zigzag_position(ac_index):
    if not 1 <= ac_index <= 63:
        raise ConfigError("ac_index must be in [1, 63]")
    return ZIGZAG[ac_index]


def zigzag_extract(img, ac_index):
    """One coefficient per block at the given 1-based AC zigzag index."""
    i, j = zigzag_position(ac_index)
    return img.planes[i, j].copy()


def zigzag_insert(img, ac_index, values):
    i, j = zigzag_position(ac_index)
    values = np.asarray(values, dtype=float)
    if values.shape != (img.blocks,):
        raise ConfigError("need one value per block")
    planes = img.planes.copy()
    planes[i, j] = values
    return img.with_planes(planes)


@dataclass(frozen=True)
class PerceptualMask:
    values: np.ndarray
    stage: str

    def at(self, ac_index):
        i, j = zigzag_position(ac_index)
        return self.values[i, j].copy()

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["k", "i", "j", "m"])
        for k in range(self.values.shape[2]):
            for i in range(8):
                for j in range(8):
                    writer.writerow([k, i, j, repr(float(self.values[i, j, k]))])
        return buf.getvalue()


def watson_mask(img, stage="contrast", mean_dc=None):
    """Frequency, then luminance, then contrast masking thresholds."""
    if stage not in STAGES:
        raise ConfigError(f"unknown mask stage {stage!r}")
    k = img.blocks
    m = np.repeat(WATSON_TABLE[:, :, None], k, axis=2)
    if stage == "frequency":
        return PerceptualMask(m, stage)
    dc = img.planes[0, 0]
    ref = img.mean_dc if mean_dc is None else mean_dc
    if np.any(dc <= 0) or ref <= 0:
        raise ConfigError("luminance masking needs positive DC coefficients")
    m = m * (dc / ref)[None, None, :] ** LUMINANCE_EXPONENT
    if stage == "luminance":
        return PerceptualMask(m, stage)
    x = np.abs(img.planes)
    w = CONTRAST_EXPONENT
    m = np.maximum(m, x**w * m ** (1 - w))
    return PerceptualMask(m, stage)


def psnr(a, b):
    """10 log10(255^2 / MSE); math.inf for identical images."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ConfigError("images must have equal dimensions")
    mse = float(np.mean((a - b) ** 2))
    return math.inf if mse == 0 else 10 * math.log10(255.0**2 / mse)
