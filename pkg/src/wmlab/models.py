"""Host coefficient models: generalized Gaussian (GGD), Weibull and Cauchy.

Densities, absolute moments, the mean-variation ratio (MVR), parameter
estimation, seeded samplers and the Gaussian tail function Q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, special

from .errors import ConfigError, ConvergenceError, DomainError, UnsupportedModelError

KINDS = ("ggd", "weibull", "cauchy")

# Shape range accepted by the GGD sampler. Outside it E**(1/c) under- or
# overflows double precision for realistic sample sizes.
GGD_SAMPLER_RANGE = (0.1, 10.0)


@dataclass(frozen=True)
class HostModel:
    """Statistical description of host coefficients.

    Only the fields relevant to ``kind`` are set: ``c``/``sigma_x`` for the
    GGD, ``theta``/``delta`` for the Weibull and ``gamma`` for the Cauchy
    (location fixed at zero).
    """

    kind: str
    c: float | None = None
    sigma_x: float | None = None
    theta: float | None = None
    delta: float | None = None
    gamma: float | None = None

    def __post_init__(self):
        kind = str(self.kind).lower()
        object.__setattr__(self, "kind", kind)
        required = {
            "ggd": ("c", "sigma_x"),
            "weibull": ("theta", "delta"),
            "cauchy": ("gamma",),
        }
        if kind not in required:
            raise ConfigError(f"unknown model kind {self.kind!r}")
        for name in required[kind]:
            value = getattr(self, name)
            if value is None or not np.isfinite(value) or value <= 0:
                raise ConfigError(f"{kind} parameter {name} must be positive, got {value!r}")
            object.__setattr__(self, name, float(value))

    @classmethod
    def ggd(cls, c, sigma_x=1.0):
        return cls("ggd", c=c, sigma_x=sigma_x)

    @classmethod
    def weibull(cls, theta, delta):
        return cls("weibull", theta=theta, delta=delta)

    @classmethod
    def cauchy(cls, gamma):
        return cls("cauchy", gamma=gamma)

    @property
    def beta(self):
        self._need("ggd")
        c = self.c
        return math.sqrt(math.exp(special.gammaln(3 / c) - special.gammaln(1 / c))) / self.sigma_x

    @property
    def amplitude(self):
        """Normalizing constant A of the GGD density."""
        self._need("ggd")
        return self.beta * self.c / (2 * special.gamma(1 / self.c))

    def _need(self, *kinds):
        if self.kind not in kinds:
            raise UnsupportedModelError(f"operation not defined for {self.kind} model")

    def to_dict(self):
        keys = {"ggd": ("c", "sigma_x"), "weibull": ("theta", "delta"), "cauchy": ("gamma",)}
        out = {"kind": self.kind}
        out.update({k: getattr(self, k) for k in keys[self.kind]})
        return out

    @classmethod
    def from_dict(cls, data):
        allowed = {"kind", "c", "sigma_x", "theta", "delta", "gamma"}
        unknown = set(data) - allowed
        if unknown:
            raise ConfigError(f"unknown model fields: {sorted(unknown)}")
        if "kind" not in data:
            raise ConfigError("model needs a 'kind'")
        return cls(**{k: data[k] for k in allowed if data.get(k) is not None})


@dataclass
class SampleBatch:
    values: np.ndarray
    seed: int | None = None
    model: HostModel | None = field(default=None)

    def __len__(self):
        return len(self.values)


def _values(samples):
    if isinstance(samples, SampleBatch):
        samples = samples.values
    return np.asarray(samples, dtype=float).ravel()


# ---------------------------------------------------------------- densities


def pdf(model, x):
    x = np.asarray(x, dtype=float)
    if model.kind == "ggd":
        return model.amplitude * np.exp(-((model.beta * np.abs(x)) ** model.c))
    if model.kind == "weibull":
        if np.any(x < 0):
            raise DomainError("Weibull density is defined for x >= 0 only")
        d, t = model.delta, model.theta
        with np.errstate(divide="ignore", invalid="ignore"):
            z = x / t
            out = (d / t) * z ** (d - 1) * np.exp(-(z**d))
        return np.where(np.isnan(out), 0.0, out)
    g = model.gamma
    return g / (np.pi * (g * g + x * x))


def cdf(model, x):
    x = np.asarray(x, dtype=float)
    if model.kind == "ggd":
        p = special.gammainc(1 / model.c, (model.beta * np.abs(x)) ** model.c)
        return 0.5 + 0.5 * np.sign(x) * p
    if model.kind == "weibull":
        return -np.expm1(-((np.clip(x, 0, None) / model.theta) ** model.delta))
    return 0.5 + np.arctan(x / model.gamma) / np.pi


def ppf(model, p):
    """Inverse CDF, used as a reference sampler in tests."""
    p = np.asarray(p, dtype=float)
    if model.kind == "ggd":
        u = np.abs(2 * p - 1)
        mag = special.gammaincinv(1 / model.c, u) ** (1 / model.c) / model.beta
        return np.sign(p - 0.5) * mag
    if model.kind == "weibull":
        return model.theta * (-np.log1p(-p)) ** (1 / model.delta)
    return model.gamma * np.tan(np.pi * (p - 0.5))


# ------------------------------------------------------------------ moments


def abs_moment(model, xi):
    """E|X|^xi."""
    if xi < 0:
        raise DomainError("moment order must be >= 0")
    if xi == 0:
        return 1.0
    if model.kind == "ggd":
        c = model.c
        log_m = special.gammaln((xi + 1) / c) - special.gammaln(1 / c) - xi * math.log(model.beta)
        return math.exp(log_m)
    if model.kind == "weibull":
        return math.exp(special.gammaln(xi / model.delta + 1) + xi * math.log(model.theta))
    if xi >= 1:
        raise UnsupportedModelError(f"Cauchy absolute moment of order {xi} >= 1 is infinite")
    return model.gamma**xi / math.cos(math.pi * xi / 2)


def abs_var(model, xi):
    """Var |X|^xi."""
    return abs_moment(model, 2 * xi) - abs_moment(model, xi) ** 2


def _moment_ratio(model, xi):
    # E|X|^{2xi} / (E|X|^xi)^2, free of the scale parameter.
    if model.kind == "ggd":
        c = model.c
        lr = (
            special.gammaln((2 * xi + 1) / c)
            + special.gammaln(1 / c)
            - 2 * special.gammaln((xi + 1) / c)
        )
    elif model.kind == "weibull":
        d = model.delta
        lr = special.gammaln(2 * xi / d + 1) - 2 * special.gammaln(xi / d + 1)
    else:
        raise UnsupportedModelError("MVR/AMR need a GGD or Weibull model")
    return lr


def mvr(model, xi):
    """Mean-variation ratio xi E|X|^xi / sqrt(Var |X|^xi)."""
    if xi <= 0:
        raise DomainError("xi must be positive")
    lr = _moment_ratio(model, xi)
    return xi / math.sqrt(math.expm1(lr))


def amr(model, xi):
    """xi E|X|^xi / sqrt(E|X|^{2 xi}); the random-watermark counterpart of MVR."""
    if xi <= 0:
        raise DomainError("xi must be positive")
    if model.kind != "ggd":
        raise UnsupportedModelError("AMR is defined here for GGD hosts")
    return xi / math.sqrt(math.exp(_moment_ratio(model, xi)))


# ---------------------------------------------------------------- estimation

MIN_ESTIMATION_SAMPLES = 100


def _ggd_ratio(c):
    """(E|X|)^2 / E X^2 for a GGD of shape c; increasing in c."""
    return math.exp(2 * special.gammaln(2 / c) - special.gammaln(1 / c) - special.gammaln(3 / c))


def _bracketed_root(f, lo, hi, what):
    flo, fhi = f(lo), f(hi)
    if not (np.isfinite(flo) and np.isfinite(fhi)) or flo * fhi > 0:
        residual = min(abs(flo), abs(fhi)) if np.isfinite(flo) and np.isfinite(fhi) else None
        raise ConvergenceError(f"{what}: no root bracketed in [{lo}, {hi}]", residual)
    root, info = optimize.brentq(f, lo, hi, xtol=1e-13, rtol=4 * np.finfo(float).eps,
                                 maxiter=500, full_output=True)
    if not info.converged:
        raise ConvergenceError(f"{what}: root finder did not converge", abs(f(root)))
    return root


def estimate_ggd(x):
    sample_var = float(np.mean(x * x))
    if sample_var == 0:
        raise ConvergenceError("GGD fit: all samples are zero", 0.0)
    ratio = float(np.mean(np.abs(x)) ** 2 / sample_var)
    c = _bracketed_root(lambda c: _ggd_ratio(c) - ratio, 0.05, 20.0, "GGD shape fit")
    return HostModel.ggd(c, float(np.std(x)))


def _weibull_score(delta, logx):
    # d/d(delta) of the profile log-likelihood, divided by N.
    t = delta * logx
    wts = np.exp(t - t.max())
    return 1.0 / delta + logx.mean() - np.sum(wts * logx) / np.sum(wts)


def estimate_weibull(x):
    if np.any(x <= 0):
        raise DomainError("Weibull samples must be strictly positive")
    logx = np.log(x)
    delta = _bracketed_root(lambda d: _weibull_score(d, logx), 0.05, 20.0, "Weibull shape fit")
    theta = float(np.mean(x**delta) ** (1 / delta))
    return HostModel.weibull(theta, delta)


def estimate_cauchy(x):
    x2 = x * x
    scale = float(np.median(np.abs(x)))
    if scale == 0:
        scale = float(np.max(np.abs(x)))
    if scale == 0:
        raise ConvergenceError("Cauchy fit: all samples are zero", 0.0)

    def h(g):
        g2 = g * g
        return 1.0 - 2.0 * np.mean(g2 / (g2 + x2))

    g = _bracketed_root(h, scale * 1e-9, scale * 1e9, "Cauchy scale fit")
    return HostModel.cauchy(g)


def estimate(samples, kind):
    """Fit a host model of the given kind to at least 100 samples."""
    x = _values(samples)
    if x.size < MIN_ESTIMATION_SAMPLES:
        raise ConfigError(f"need at least {MIN_ESTIMATION_SAMPLES} samples, got {x.size}")
    kind = str(kind).lower()
    if kind == "ggd":
        return estimate_ggd(x)
    if kind == "weibull":
        return estimate_weibull(x)
    if kind == "cauchy":
        return estimate_cauchy(x)
    raise ConfigError(f"unknown model kind {kind!r}")


# ----------------------------------------------------------------- sampling


def rng_for(seed):
    return np.random.default_rng(np.random.SeedSequence(int(seed)))


def draw(model, size, rng):
    """Draw an array of the given shape from ``model`` using generator ``rng``."""
    if model.kind == "ggd":
        c = model.c
        lo, hi = GGD_SAMPLER_RANGE
        if not lo <= c <= hi:
            raise ConfigError(f"GGD sampler supports c in [{lo}, {hi}], got {c}")
        if c == 2.0:
            return rng.normal(0.0, model.sigma_x, size=size)
        sign = 2.0 * rng.integers(0, 2, size=size) - 1.0
        e = rng.gamma(1 / c, model.beta ** (-c), size=size)
        return sign * e ** (1 / c)
    if model.kind == "weibull":
        z = rng.exponential(model.theta**model.delta, size=size)
        return z ** (1 / model.delta)
    return model.gamma * rng.standard_cauchy(size=size)


def sample(model, n, seed):
    if n < 1:
        raise ConfigError("n must be >= 1")
    values = draw(model, int(n), rng_for(seed))
    return SampleBatch(values, int(seed), model)


def classic_sample(model, n, seed):
    """Closed-form GGD generators for c in {0.5, 1, 2}.

    Box-Muller for c=2, a signed exponential for c=1 and a signed square of a
    sum of two exponentials for c=0.5. Kept as an independent cross-check of
    the general Gamma route.
    """
    if model.kind != "ggd" or model.c not in (0.5, 1.0, 2.0):
        raise ConfigError("classic sampler covers GGD c in {0.5, 1, 2} only")
    rng = rng_for(seed)
    n = int(n)
    if model.c == 2.0:
        u1 = 1.0 - rng.random(n)
        u2 = rng.random(n)
        return SampleBatch(model.sigma_x * np.sqrt(-2 * np.log(u1)) * np.cos(2 * np.pi * u2), seed, model)
    sign = np.where(rng.random(n) < 0.5, -1.0, 1.0)
    beta = model.beta
    if model.c == 1.0:
        e = -np.log(1.0 - rng.random(n)) / beta
        return SampleBatch(sign * e, seed, model)
    # |X|^(1/2) ~ Gamma(2, 1/sqrt(beta)), a sum of two exponentials.
    scale = beta**-0.5
    e = -(np.log(1.0 - rng.random(n)) + np.log(1.0 - rng.random(n))) * scale
    return SampleBatch(sign * e * e, seed, model)


# ------------------------------------------------------------ tail function


def q(x):
    """Gaussian tail probability Q(x) = P(Z > x)."""
    out = 0.5 * special.erfc(np.asarray(x, dtype=float) / math.sqrt(2))
    return float(out) if np.ndim(out) == 0 else out


def q_inv(p):
    p_arr = np.asarray(p, dtype=float)
    if np.any((p_arr <= 0) | (p_arr >= 1)) or np.any(np.isnan(p_arr)):
        raise DomainError("q_inv needs p in (0, 1)")
    x = math.sqrt(2) * special.erfcinv(2 * p_arr)
    for _ in range(2):
        dens = np.exp(-0.5 * x * x) / math.sqrt(2 * math.pi)
        step = (0.5 * special.erfc(x / math.sqrt(2)) - p_arr) / dens
        x = x + np.where(np.isfinite(step), step, 0.0)
    return float(x) if np.ndim(x) == 0 else x
