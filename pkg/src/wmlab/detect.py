"""Decision statistics and decision rules.

All statistics reduce over the last axis, so they accept a single vector or
a ``(trials, N)`` matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embed import _check, dithered_quantize, projection
from .errors import ConfigError

RULES = ("single", "double", "sign")


@dataclass(frozen=True)
class DecisionOutcome:
    statistic: float
    psi: float
    rule: str
    verdict: object  # "H0"/"H1" for verification, -1/+1 for decoding


def correlate(s, w):
    s, w = _check(s, w)
    return projection(s, w)


def generalized_correlate(s, w, xi):
    """(1/N) sum |s_i|^xi w_i."""
    if xi < 0:
        raise ConfigError("xi must be >= 0")
    s, w = _check(s, w)
    return np.mean(np.abs(s) ** xi * w, axis=-1)


def optimum_decode_ass(s, w, a, xi):
    """(1/N) sum |s_i + a w_i|^xi - |s_i - a w_i|^xi; decide by sign."""
    s, w = _check(s, w)
    aw = a * w
    return np.mean(np.abs(s + aw) ** xi - np.abs(s - aw) ** xi, axis=-1)


def optimum_detect_ass(s, w, a, xi, mask=None):
    """(1/N) sum |s_i|^xi - |s_i - a m_i w_i|^xi, with m_i = 1 when no mask."""
    s, w = _check(s, w)
    aw = a * w if mask is None else a * np.asarray(mask, dtype=float) * w
    return np.mean(np.abs(s) ** xi - np.abs(s - aw) ** xi, axis=-1)


def optimum_detect_mss(s, w, a, shape):
    """(1/N) sum |s_i|^c [1 - (1 + a w_i)^(-c)] for multiplicative embedding."""
    if not 0 < a < 1:
        raise ConfigError("optimum MSS statistic needs 0 < a < 1")
    s, w = _check(s, w)
    weight = 1.0 - (1.0 + a * w) ** (-shape)
    return np.mean(np.abs(s) ** shape * weight, axis=-1)


def optimum_detect_gaussian_attacked(y, w, a, sigma_x, sigma_v):
    """Likelihood statistic for Gaussian hosts, MSS embedding and Gaussian noise."""
    if sigma_x <= 0 or sigma_v <= 0:
        raise ConfigError("sigma_x and sigma_v must be positive")
    y, w = _check(y, w)
    sx2, sv2 = sigma_x**2, sigma_v**2
    h0 = 1.0 / (sx2 + sv2)
    h1 = 1.0 / (sx2 * (1.0 + a * w) ** 2 + sv2)
    return np.mean(y * y * (h0 - h1), axis=-1)


def cauchy_statistic(s, w, gamma_c):
    """(1/N) sum s_i w_i / (gamma^2 + s_i^2)."""
    if gamma_c <= 0:
        raise ConfigError("Cauchy scale must be positive")
    s, w = _check(s, w)
    return np.mean(s * w / (gamma_c**2 + s * s), axis=-1)


def stdm_distance(y, w, delta_step, dither=None):
    """Distance of the projection to the nearest centroid of the shifted lattice."""
    d = delta_step / 2 if dither is None else dither
    ybar = correlate(y, w)
    return np.abs(ybar - dithered_quantize(ybar, delta_step, d))


def stdm_detect(y, w, delta_step, psi, dither=None):
    if not 0 <= psi <= delta_step / 2:
        raise ConfigError("psi must lie in [0, delta_step/2]")
    dist = float(stdm_distance(y, w, delta_step, dither))
    return DecisionOutcome(dist, psi, "stdm", "H1" if dist < psi else "H0")


def decide(statistic, psi, rule):
    if rule not in RULES:
        raise ConfigError(f"unknown decision rule {rule!r}")
    statistic = float(statistic)
    if rule == "sign":
        return DecisionOutcome(statistic, 0.0, rule, 1 if statistic > 0 else -1)
    value = abs(statistic) if rule == "double" else statistic
    return DecisionOutcome(statistic, psi, rule, "H1" if value > psi else "H0")


def exceeds(statistic, psi, rule):
    """Vectorized H1 indicator for single/double rules."""
    statistic = np.asarray(statistic)
    if rule == "double":
        return np.abs(statistic) > psi
    if rule == "single":
        return statistic > psi
    raise ConfigError(f"rule {rule!r} has no threshold")


STATISTICS = ("correlator", "generalized", "opt_ass_decode", "opt_ass_detect", "opt_mss",
              "gauss_attacked", "cauchy", "stdm")


@dataclass(frozen=True)
class DetectorConfig:
    """Which statistic to compute and how to threshold it.

    ``a``, ``shape``, ``sigma_x``, ``sigma_v`` and ``gamma_c`` are only read by
    the statistics that need them. ``stdm`` reports the centroid distance;
    its decision is "H1 iff distance < psi".
    """

    statistic: str = "correlator"
    rule: str = "single"
    xi: float = 1.0
    a: float | None = None
    shape: float | None = None
    sigma_x: float | None = None
    sigma_v: float | None = None
    gamma_c: float | None = None
    delta_step: float | None = None
    dither: float | None = None
    mask: np.ndarray | None = None

    def __post_init__(self):
        if self.statistic not in STATISTICS:
            raise ConfigError(f"unknown statistic {self.statistic!r}")
        if self.rule not in RULES:
            raise ConfigError(f"unknown decision rule {self.rule!r}")
        needs = {
            "opt_ass_decode": ("a",),
            "opt_ass_detect": ("a",),
            "opt_mss": ("a", "shape"),
            "gauss_attacked": ("a", "sigma_x", "sigma_v"),
            "cauchy": ("gamma_c",),
            "stdm": ("delta_step",),
        }.get(self.statistic, ())
        for name in needs:
            if getattr(self, name) is None:
                raise ConfigError(f"statistic {self.statistic} needs {name}")


def compute_statistic(y, w, det):
    kind = det.statistic
    if kind == "correlator":
        return correlate(y, w)
    if kind == "generalized":
        return generalized_correlate(y, w, det.xi)
    if kind == "opt_ass_decode":
        return optimum_decode_ass(y, w, det.a, det.xi)
    if kind == "opt_ass_detect":
        return optimum_detect_ass(y, w, det.a, det.xi, det.mask)
    if kind == "opt_mss":
        return optimum_detect_mss(y, w, det.a, det.shape)
    if kind == "gauss_attacked":
        return optimum_detect_gaussian_attacked(y, w, det.a, det.sigma_x, det.sigma_v)
    if kind == "cauchy":
        return cauchy_statistic(y, w, det.gamma_c)
    return stdm_distance(y, w, det.delta_step, det.dither)


def h1_indicator(stat, psi, det):
    """True where the detector says "watermarked" at threshold psi."""
    if det.statistic == "stdm":
        return np.asarray(stat) < psi
    return exceeds(stat, psi, det.rule)
