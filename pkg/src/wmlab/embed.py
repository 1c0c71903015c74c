"""Watermark generation, the embedding rules and distortion bookkeeping.

Every embedder works on the last axis, so a ``(trials, N)`` host matrix is
watermarked in one call.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, fields

import numpy as np

from .errors import ConfigError, DegenerateHostError


class Scheme(str, enum.Enum):
    ASS = "ASS"
    MSS = "MSS"
    BARNI = "BARNI"
    GEN_BARNI = "GEN_BARNI"
    EMSS = "EMSS"
    DS_ASS = "DS_ASS"
    DS_MSS = "DS_MSS"
    DS_BMSS = "DS_BMSS"
    DS_ASS_HIR = "DS_ASS_HIR"
    STDM = "STDM"
    QIM = "QIM"
    DC_QIM = "DC_QIM"
    ASS_PERCEPTUAL = "ASS_PERCEPTUAL"
    DS_ASS_PERCEPTUAL = "DS_ASS_PERCEPTUAL"
    DS_CAUCHY = "DS_CAUCHY"


SPREAD = {Scheme.ASS, Scheme.MSS, Scheme.BARNI, Scheme.GEN_BARNI, Scheme.ASS_PERCEPTUAL}
DOUBLE_SIDED = {Scheme.DS_ASS, Scheme.DS_MSS, Scheme.DS_BMSS, Scheme.DS_ASS_PERCEPTUAL,
                Scheme.DS_CAUCHY}
QUANTIZED = {Scheme.QIM, Scheme.DC_QIM, Scheme.STDM, Scheme.DS_ASS_HIR}
MULTIPLICATIVE = {Scheme.MSS, Scheme.BARNI, Scheme.GEN_BARNI, Scheme.EMSS, Scheme.DS_MSS,
                  Scheme.DS_BMSS}

DEFAULT_ZETA = 0.7


@dataclass(frozen=True)
class WatermarkSequence:
    w: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float)
        if w.ndim != 1 or w.size < 2 or w.size % 2:
            raise ConfigError("watermark length must be even and >= 2")
        if not np.all(np.abs(w) == 1) or w.sum() != 0:
            raise ConfigError("watermark must be a zero-sum +/-1 sequence")
        w.setflags(write=False)
        object.__setattr__(self, "w", w)

    def __len__(self):
        return self.w.size

    def __array__(self, dtype=None, copy=None):
        return self.w if dtype is None else self.w.astype(dtype)


def gen_watermark(seed, n):
    """Zero-sum bipolar sequence with exactly n/2 entries of each sign."""
    if n < 2 or n % 2:
        raise ConfigError(f"watermark length must be even and >= 2, got {n}")
    base = np.repeat([1.0, -1.0], n // 2)
    rng = np.random.default_rng(np.random.SeedSequence(int(seed)))
    return WatermarkSequence(rng.permutation(base))


@dataclass(frozen=True)
class SchemeConfig:
    scheme: Scheme
    a: float = 0.0
    b: int = 1
    lam: float = 0.0
    gamma_order: float = 1.0
    xi_order: float | None = None
    delta_step: float | None = None
    dither: float | None = None
    target_l: float | None = None
    mask: np.ndarray | None = None
    cauchy_gamma: float | None = None

    # JSON names differ from attribute names only for lambda.
    _json_names = {"lam": "lambda"}

    def __post_init__(self):
        try:
            object.__setattr__(self, "scheme", Scheme(str(getattr(self.scheme, "value", self.scheme)).upper()))
        except ValueError:
            raise ConfigError(f"unknown scheme {self.scheme!r}") from None
        if self.b not in (1, -1):
            raise ConfigError("message bit b must be +1 or -1")
        if not 0.0 <= self.lam <= 1.0:
            raise ConfigError("lambda must lie in [0, 1]")
        if self.a < 0:
            raise ConfigError("embedding strength a must be >= 0")
        if self.scheme in MULTIPLICATIVE:
            if self.a > 0.5:
                raise ConfigError("multiplicative schemes need a <= 0.5")
            if self.a > 0.2:
                warnings.warn("a > 0.2 leaves the small-strength regime of the MSS analysis",
                              stacklevel=3)
        if self.gamma_order <= 0:
            raise ConfigError("gamma_order must be positive")
        if self.xi_order is not None and self.xi_order < 0:
            raise ConfigError("xi_order must be >= 0")
        if self.delta_step is not None and self.delta_step <= 0:
            raise ConfigError("delta_step must be positive")
        if self.target_l is not None and self.target_l <= 0:
            raise ConfigError("target_l must be positive")
        if self.cauchy_gamma is not None and self.cauchy_gamma <= 0:
            raise ConfigError("cauchy_gamma must be positive")
        if self.mask is not None:
            m = np.asarray(self.mask, dtype=float)
            if np.any(m <= 0) or not np.all(np.isfinite(m)):
                raise ConfigError("mask entries must be strictly positive")
            object.__setattr__(self, "mask", m)

    @property
    def zeta(self):
        """Exponent of the projection/embedding order (xi or zeta)."""
        if self.xi_order is not None:
            return self.xi_order
        if self.scheme in (Scheme.GEN_BARNI, Scheme.DS_BMSS):
            return DEFAULT_ZETA
        return 1.0

    def replace(self, **changes):
        data = {f.name: getattr(self, f.name) for f in fields(self)}
        data.update(changes)
        return SchemeConfig(**data)

    def to_dict(self):
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None:
                continue
            if f.name == "scheme":
                value = value.value
            elif f.name == "mask":
                value = np.asarray(value).tolist()
            out[self._json_names.get(f.name, f.name)] = value
        return out

    @classmethod
    def from_dict(cls, data):
        reverse = {v: k for k, v in cls._json_names.items()}
        names = {f.name for f in fields(cls)}
        kwargs = {}
        for key, value in data.items():
            attr = reverse.get(key, key)
            if attr not in names or key in cls._json_names:
                raise ConfigError(f"unknown scheme field {key!r}")
            kwargs[attr] = value
        if "scheme" not in kwargs:
            raise ConfigError("scheme config needs a 'scheme'")
        return cls(**kwargs)


def _w(w):
    return np.asarray(w.w if isinstance(w, WatermarkSequence) else w, dtype=float)


def _check(x, w):
    x = np.asarray(x, dtype=float)
    w = _w(w)
    if x.shape[-1] != w.shape[-1]:
        raise ConfigError(f"host length {x.shape[-1]} != watermark length {w.shape[-1]}")
    return x, w


def projection(x, w):
    """(1/N) sum x_i w_i along the last axis."""
    return np.mean(x * w, axis=-1)


def _strength(cfg, n):
    if cfg.mask is None:
        return cfg.a
    m = np.asarray(cfg.mask, dtype=float)
    if m.shape[-1] != n:
        raise ConfigError("mask length does not match host length")
    return cfg.a * m


def _multiplicative_term(x, w, k):
    # Shared by MSS and EMSS so that lambda = 0 reproduces MSS bit for bit.
    return x * w * k


def embed_ss(x, w, cfg):
    x, w = _check(x, w)
    b, n = cfg.b, x.shape[-1]
    if cfg.scheme in (Scheme.ASS, Scheme.ASS_PERCEPTUAL):
        if cfg.scheme is Scheme.ASS_PERCEPTUAL and cfg.mask is None:
            raise ConfigError("ASS_PERCEPTUAL needs a mask")
        return x + b * _strength(cfg, n) * w
    if cfg.scheme is Scheme.MSS:
        return x + _multiplicative_term(x, w, b * cfg.a)
    if cfg.scheme is Scheme.BARNI:
        return x + b * cfg.a * np.abs(x) * w
    if cfg.scheme is Scheme.GEN_BARNI:
        return x + b * cfg.a * np.abs(x) ** cfg.zeta * w
    raise ConfigError(f"embed_ss does not handle {cfg.scheme.value}")


def distribution_factor(x, w, gamma_order):
    """eta = sum |x|^g w / sum |x|^g along the last axis."""
    x, w = _check(x, w)
    p = np.abs(x) ** gamma_order
    total = p.sum(axis=-1)
    if np.any(total == 0):
        raise DegenerateHostError("all-zero host: distribution factor undefined")
    return (p * w).sum(axis=-1) / total


def embed_emss(x, w, cfg):
    if cfg.scheme is not Scheme.EMSS:
        raise ConfigError("embed_emss needs scheme EMSS")
    x, w = _check(x, w)
    eta = distribution_factor(x, w, cfg.gamma_order)
    k = cfg.b * cfg.a - cfg.lam * np.asarray(eta)[..., None] / cfg.gamma_order
    return x + _multiplicative_term(x, w, k)


def double_sided_projection(x, w, cfg):
    x, w = _check(x, w)
    if cfg.scheme is Scheme.DS_MSS:
        return np.mean(np.abs(x) ** cfg.zeta * w, axis=-1)
    if cfg.scheme is Scheme.DS_CAUCHY:
        if cfg.cauchy_gamma is None:
            raise ConfigError("DS_CAUCHY needs cauchy_gamma")
        g2 = cfg.cauchy_gamma**2
        return np.mean(x * w / (g2 + x * x), axis=-1)
    return projection(x, w)


def embed_double_sided(x, w, cfg):
    if cfg.scheme not in DOUBLE_SIDED:
        raise ConfigError(f"embed_double_sided does not handle {cfg.scheme.value}")
    x, w = _check(x, w)
    n = x.shape[-1]
    xbar = double_sided_projection(x, w, cfg)
    sign = np.where(np.asarray(xbar) > 0, 1.0, -1.0)[..., None]
    if cfg.scheme in (Scheme.DS_ASS, Scheme.DS_ASS_PERCEPTUAL, Scheme.DS_CAUCHY):
        if cfg.scheme is Scheme.DS_ASS_PERCEPTUAL and cfg.mask is None:
            raise ConfigError("DS_ASS_PERCEPTUAL needs a mask")
        term = _strength(cfg, n) * w
    elif cfg.scheme is Scheme.DS_BMSS:
        term = cfg.a * np.abs(x) ** cfg.zeta * w
    else:
        term = cfg.a * x * w
    return x + sign * term


def quantize(x, step):
    """Uniform quantizer q(x) = step * floor(x/step + 1/2)."""
    return step * np.floor(np.asarray(x, dtype=float) / step + 0.5)


def dithered_quantize(x, step, d):
    return quantize(np.asarray(x, dtype=float) - d, step) + d


def qim_dither(cfg):
    base = cfg.dither if cfg.dither is not None else 0.0
    return base + cfg.b * cfg.delta_step / 4


def stdm_dither(cfg):
    return cfg.dither if cfg.dither is not None else cfg.delta_step / 2


def embed_quantized(x, w, cfg):
    x, w = _check(x, w)
    if cfg.scheme is Scheme.DS_ASS_HIR:
        if cfg.target_l is None:
            raise ConfigError("DS_ASS_HIR needs target_l")
        xbar = np.asarray(projection(x, w))[..., None]
        l = cfg.target_l
        return np.where(xbar > 0, x + (l - xbar) * w, x - (l + xbar) * w)
    if cfg.scheme not in QUANTIZED:
        raise ConfigError(f"embed_quantized does not handle {cfg.scheme.value}")
    if cfg.delta_step is None or cfg.delta_step <= 0:
        raise ConfigError("quantizer schemes need delta_step > 0")
    step = cfg.delta_step
    if cfg.scheme is Scheme.QIM:
        return dithered_quantize(x, step, qim_dither(cfg))
    if cfg.scheme is Scheme.DC_QIM:
        return x + cfg.lam * (dithered_quantize(x, step, qim_dither(cfg)) - x)
    xbar = np.asarray(projection(x, w))[..., None]
    return x + (dithered_quantize(xbar, step, stdm_dither(cfg)) - xbar) * w


def embed(x, w, cfg):
    """Dispatch to the embedder matching ``cfg.scheme``."""
    if cfg.scheme in SPREAD:
        return embed_ss(x, w, cfg)
    if cfg.scheme is Scheme.EMSS:
        return embed_emss(x, w, cfg)
    if cfg.scheme in DOUBLE_SIDED:
        return embed_double_sided(x, w, cfg)
    return embed_quantized(x, w, cfg)


@dataclass(frozen=True)
class Distortion:
    dt: float
    dwr_db: float | None = None
    wnr_db: float | None = None


def distortion(x, s, ex2=None, attack_mse=None):
    """Embedding MSE plus DWR (given E X^2) and WNR (given attack MSE) in dB."""
    x = np.asarray(x, dtype=float)
    s = np.asarray(s, dtype=float)
    if x.shape != s.shape:
        raise ConfigError("x and s must have equal shape")
    dt = float(np.mean((s - x) ** 2))
    dwr = wnr = None
    if ex2 is not None:
        dwr = math.inf if dt == 0 else 10 * math.log10(ex2 / dt)
    if attack_mse is not None:
        wnr = math.inf if attack_mse == 0 else (-math.inf if dt == 0 else 10 * math.log10(dt / attack_mse))
    return Distortion(dt, dwr, wnr)
