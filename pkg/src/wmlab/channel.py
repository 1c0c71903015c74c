"""Attack channels: additive noise families and JPEG recompression."""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from . import models
from .errors import ConfigError

NOISE_KINDS = ("gaussian_noise", "ggd_noise", "abs_gaussian_noise")
KINDS = NOISE_KINDS + ("jpeg",)

# Annex K luminance quantization table, row-major.
JPEG_LUMA = np.array([
    [16, 11, 10, 16, 24, 40, 51, 61],
    [12, 12, 14, 19, 26, 58, 60, 55],
    [14, 13, 16, 24, 40, 57, 69, 56],
    [14, 17, 22, 29, 51, 87, 80, 62],
    [18, 22, 37, 56, 68, 109, 103, 77],
    [24, 35, 55, 64, 81, 104, 113, 92],
    [49, 64, 78, 87, 103, 121, 120, 101],
    [72, 92, 95, 98, 112, 100, 103, 99],
], dtype=float)


@dataclass(frozen=True)
class AttackSpec:
    kind: str
    sigma_v: float | None = None
    ac: float = 2.0
    qf: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown attack kind {self.kind!r}")
        if self.kind in NOISE_KINDS:
            if self.sigma_v is None or not self.sigma_v > 0:
                raise ConfigError("noise attacks need sigma_v > 0")
            if not self.ac > 0:
                raise ConfigError("ac must be positive")
        else:
            if self.qf is None or int(self.qf) != self.qf or not 1 <= self.qf <= 100:
                raise ConfigError("jpeg attack needs an integer qf in [1, 100]")

    @property
    def is_noise(self):
        return self.kind in NOISE_KINDS

    def noise_variance(self):
        """Variance of the added noise term."""
        if self.kind == "abs_gaussian_noise":
            return self.sigma_v**2 * (1 - 2 / math.pi)
        return self.sigma_v**2

    def to_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)
                if getattr(self, f.name) is not None}

    @classmethod
    def from_dict(cls, data):
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ConfigError(f"unknown attack fields: {sorted(unknown)}")
        return cls(**data)


def draw_noise(spec, size, rng):
    if spec.kind == "gaussian_noise":
        return rng.normal(0.0, spec.sigma_v, size=size)
    if spec.kind == "abs_gaussian_noise":
        return np.abs(rng.normal(0.0, spec.sigma_v, size=size))
    if spec.kind == "ggd_noise":
        return models.draw(models.HostModel.ggd(spec.ac, spec.sigma_v), size, rng)
    raise ConfigError(f"{spec.kind} is not a noise attack")


def apply_noise(s, spec, rng=None):
    """y = s + v. Deterministic in ``spec.seed`` unless a generator is passed."""
    s = np.asarray(s, dtype=float)
    if rng is None:
        rng = models.rng_for(spec.seed)
    return s + draw_noise(spec, s.shape, rng)


def quality_table(qf):
    qf = int(qf)
    if not 1 <= qf <= 100:
        raise ConfigError("qf must be in [1, 100]")
    scale = 5000 / qf if qf < 50 else 200 - 2 * qf
    return np.maximum(1.0, np.floor((JPEG_LUMA * scale + 50) / 100))


def jpeg_attack(image, qf):
    """Block DCT, quantize with the QF-scaled luminance table, reconstruct."""
    from .percept import block_dct, inverse_dct

    img = np.asarray(image)
    table = quality_table(qf)
    coeffs = block_dct(img.astype(float) - 128.0)
    quantized = np.round(coeffs.planes / table[..., None]) * table[..., None]
    rebuilt = inverse_dct(coeffs.with_planes(quantized)) + 128.0
    return np.clip(np.round(rebuilt), 0, 255).astype(np.uint8)
