"""Analytic performance predictors.

Decision statistics are treated as Gaussian (central limit) with the means
and standard deviations computed here. Attacked cases without a closed form
go through a numeric density of host plus noise.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, signal, special, stats

from . import models
from .errors import CapabilityError, ConfigError, DomainError
from .models import HostModel, abs_moment, abs_var, mvr, q, q_inv

# ------------------------------------------------------------ Gaussian stats


@dataclass(frozen=True)
class GaussianStatSummary:
    m0: float
    m1: float
    s0: float
    s1: float
    approximate: bool = False
    notes: tuple = ()

    def __post_init__(self):
        if not (self.s0 > 0 and self.s1 > 0):
            raise ConfigError("statistic standard deviations must be positive")


def pe_gaussian(sm):
    """Total error probability with equal priors and threshold zero."""
    return 0.5 * q(-sm.m0 / sm.s0) + 0.5 * q(sm.m1 / sm.s1)


def threshold_for(sm, p_fa):
    return sm.m0 + sm.s0 * q_inv(p_fa)


def roc_gaussian(sm, p_fa):
    """Miss probability at the threshold giving false-alarm rate ``p_fa``."""
    return 1.0 - q((q_inv(p_fa) * sm.s0 + sm.m0 - sm.m1) / sm.s1)


def operating_point(sm, psi, rule="single"):
    """(p_fa, p_m) of a thresholded Gaussian statistic."""
    if rule == "double":
        p_fa = q((psi - sm.m0) / sm.s0) + 1 - q((-psi - sm.m0) / sm.s0)
        p_m = q((-psi - sm.m1) / sm.s1) - q((psi - sm.m1) / sm.s1)
        return p_fa, p_m
    return q((psi - sm.m0) / sm.s0), 1.0 - q((psi - sm.m1) / sm.s1)


# ------------------------------------------------------------ numeric pdfs


@dataclass(frozen=True)
class NumericPdf:
    """Density sampled at ``start + i*step``."""

    start: float
    step: float
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if self.step <= 0:
            raise ConfigError("grid step must be positive")
        if np.any(v < 0):
            raise ConfigError("density values must be nonnegative")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def grid(self):
        return self.start + self.step * np.arange(self.values.size)

    def mass(self):
        return float(integrate.trapezoid(self.values, dx=self.step))

    def normalized(self):
        return NumericPdf(self.start, self.step, self.values / (self.values.sum() * self.step))

    def expect(self, g):
        return float(np.sum(g(self.grid) * self.values) * self.step)

    @classmethod
    def from_callable(cls, f, lo, hi, step):
        n = int(math.ceil((hi - lo) / step)) + 1
        x = lo + step * np.arange(n)
        return cls(lo, step, np.asarray(f(x), dtype=float)).normalized()


def pdf_convolve(f, g):
    """Density of the sum of two independent variables on a shared step."""
    if not math.isclose(f.step, g.step, rel_tol=1e-9):
        raise ConfigError("grid mismatch: steps differ")
    values = signal.fftconvolve(f.values, g.values) * f.step
    return NumericPdf(f.start + g.start, f.step, np.clip(values, 0, None)).normalized()


MAX_GRID_POINTS = 2**22
TAIL_PROB = 1e-13


def _host_support(model, scale):
    top = float(models.ppf(model, 1 - TAIL_PROB)) * abs(scale)
    if model.kind == "weibull":
        return 0.0, top
    if model.kind == "cauchy":
        raise CapabilityError("numeric convolution needs finite-variance hosts")
    return -top, top


def _host_std(model):
    if model.kind == "ggd":
        return model.sigma_x
    return math.sqrt(abs_var(model, 1.0))


def _noise_pdf(attack, step):
    s = attack.sigma_v
    if attack.kind == "gaussian_noise":
        return NumericPdf.from_callable(lambda x: stats.norm.pdf(x, scale=s), -10 * s, 10 * s, step)
    if attack.kind == "abs_gaussian_noise":
        return NumericPdf.from_callable(lambda x: 2 * stats.norm.pdf(x, scale=s), 0.0, 10 * s, step)
    if attack.kind == "ggd_noise":
        nm = HostModel.ggd(attack.ac, s)
        lo, hi = _host_support(nm, 1.0)
        return NumericPdf.from_callable(lambda x: models.pdf(nm, x), lo, hi, step)
    raise CapabilityError(f"no analytic noise density for {attack.kind}")


def attacked_pdf(model, attack, scale=1.0, resolution=128):
    """Numeric density of ``scale*X + V``.

    The support covers the 1e-13 tail quantiles of each term and the step is
    1/resolution of the smaller standard deviation.
    """
    lo, hi = _host_support(model, scale)
    spread = min(_host_std(model) * abs(scale), attack.sigma_v)
    step = spread / resolution
    noise_width = 20 * attack.sigma_v
    while (hi - lo + noise_width) / step > MAX_GRID_POINTS:
        step *= 2
    if model.kind == "weibull":
        host_f = lambda x: models.pdf(model, np.clip(x, 1e-300, None) / abs(scale)) / abs(scale)
        lo = step / 2
    else:
        host_f = lambda x: models.pdf(model, x / scale) / abs(scale)
    host = NumericPdf.from_callable(host_f, lo, hi, step)
    return pdf_convolve(host, _noise_pdf(attack, step))


# -------------------------------------------------------------- expectations


def _expect_exact(model, g, breaks=()):
    f = lambda x: g(x) * float(models.pdf(model, x))
    lo = 0.0 if model.kind == "weibull" else -math.inf
    pts = sorted({float(b) for b in breaks if b > lo} | ({0.0} if lo < 0 else set()))
    edges = [lo] + pts + [math.inf]
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        if a < b:
            total += integrate.quad(f, a, b, limit=400, epsabs=0, epsrel=1e-11)[0]
    return total


def _mean_var(model, attack, g, breaks=(), scale=1.0):
    """Mean and variance of g(scale*X + V)."""
    if attack is None:
        if scale != 1.0:
            h = lambda x: g(scale * x)
            br = [b / scale for b in breaks]
        else:
            h, br = g, breaks
        m = _expect_exact(model, h, br)
        m2 = _expect_exact(model, lambda x: h(x) ** 2, br)
    else:
        u = attacked_pdf(model, attack, scale)
        m = u.expect(g)
        m2 = u.expect(lambda x: g(x) ** 2)
    return m, max(m2 - m * m, 0.0)


def _host_var(model):
    if model.kind == "cauchy":
        raise CapabilityError("Cauchy hosts have infinite variance")
    return _host_std(model) ** 2


def _noise_var(attack):
    if attack is None:
        return 0.0
    if not attack.is_noise:
        raise CapabilityError("analytic predictions cover noise attacks only")
    return attack.noise_variance()


def _notes(model, n, xi=None):
    notes = []
    if n < 100:
        notes.append("N < 100: Gaussian approximation of the statistic is loose")
    if model.kind == "ggd" and xi is not None and model.c < 1 and xi > 2 * model.c:
        notes.append("xi > 2c with c < 1: theory underestimates the empirical performance")
    return tuple(notes)


# ---------------------------------------------------------------- predictors

FAMILIES = {
    "ass_correlator_decode": "additive embedding, linear correlator, decoding",
    "ass_optimum_decode": "additive embedding, xi-order decoder",
    "ass_correlator_detect": "additive embedding, linear correlator, verification",
    "ass_optimum_detect": "additive embedding, xi-order detector",
    "mss_decode": "multiplicative embedding, generalized correlator, decoding",
    "mss_generalized_detect": "multiplicative embedding, generalized correlator, verification",
    "mss_optimum_detect": "multiplicative embedding, likelihood statistic, verification",
    "emss_decode": "enhanced multiplicative embedding, decoding",
    "emss_detect": "enhanced multiplicative embedding, verification",
    "gauss_attacked_optimum_detect": "Gaussian host, Gaussian noise, likelihood statistic",
    "bmss_correlator_detect": "Barni-type embedding, linear correlator, verification",
}


def moments_for(family, model, attack=None, **p):
    """Means and standard deviations of a decision statistic under H0 and H1.

    ``family`` is a key of :data:`FAMILIES`. Parameters: ``a``, ``n`` and,
    depending on the family, ``xi``, ``shape``, ``lam``, ``gamma_order``,
    ``zeta``.
    """
    if family not in FAMILIES:
        raise CapabilityError(f"unknown predictor family {family!r}")
    if attack is not None and not attack.is_noise:
        raise CapabilityError(f"{family}: no analytic prediction under {attack.kind}")
    a = float(p["a"])
    n = int(p["n"])
    xi = float(p.get("xi", 1.0))
    notes = _notes(model, n, xi)
    fn = _PREDICTORS[family]
    m0, m1, s0, s1, approx = fn(model, attack, a, n, xi, p)
    return GaussianStatSummary(m0, m1, s0, s1, approx, notes)


def _ass_correlator(model, attack, a, n, xi, p):
    s = math.sqrt((_host_var(model) + _noise_var(attack)) / n)
    return -a, a, s, s, False


def _ass_correlator_detect(model, attack, a, n, xi, p):
    s = math.sqrt((_host_var(model) + _noise_var(attack)) / n)
    return 0.0, a, s, s, False


def _ass_optimum_decode(model, attack, a, n, xi, p):
    g = lambda u: np.abs(u + 2 * a) ** xi - np.abs(u) ** xi
    m, v = _mean_var(model, attack, g, breaks=(-2 * a,))
    s = math.sqrt(v / n)
    return -m, m, s, s, False


def _ass_optimum_detect(model, attack, a, n, xi, p):
    g = lambda u: np.abs(u + a) ** xi - np.abs(u) ** xi
    m, v = _mean_var(model, attack, g, breaks=(-a,))
    s = math.sqrt(v / n)
    return -m, m, s, s, False


def _plus_minus(model, attack, a, xi):
    g = lambda u: np.abs(u) ** xi
    mp, vp = _mean_var(model, attack, g, scale=1 + a)
    mm, vm = _mean_var(model, attack, g, scale=1 - a)
    return mp, vp, mm, vm


def _mss_decode(model, attack, a, n, xi, p):
    if attack is None:
        m = xi * a * abs_moment(model, xi)
        s = math.sqrt(abs_var(model, xi) / n)
        return -m, m, s, s, True
    mp, vp, mm, vm = _plus_minus(model, attack, a, xi)
    m = (mp - mm) / 2
    s = math.sqrt((vp + vm) / (2 * n))
    return -m, m, s, s, False


def _mss_generalized_detect(model, attack, a, n, xi, p):
    if attack is None:
        e, v = abs_moment(model, xi), abs_var(model, xi)
        m1 = e * ((1 + a) ** xi - (1 - a) ** xi) / 2
        s1 = math.sqrt(((1 + a) ** (2 * xi) + (1 - a) ** (2 * xi)) * v / (2 * n))
        return 0.0, m1, math.sqrt(v / n), s1, False
    _, v0 = _mean_var(model, attack, lambda u: np.abs(u) ** xi)
    mp, vp, mm, vm = _plus_minus(model, attack, a, xi)
    return 0.0, (mp - mm) / 2, math.sqrt(v0 / n), math.sqrt((vp + vm) / (2 * n)), False


def _mss_optimum_detect(model, attack, a, n, xi, p):
    if attack is not None:
        raise CapabilityError("mss_optimum_detect: closed form exists without attack only")
    c = float(p.get("shape", model.c if model.kind == "ggd" else model.delta))
    e, v = abs_moment(model, c), abs_var(model, c)
    ap, am = 1 - (1 + a) ** (-c), 1 - (1 - a) ** (-c)
    bp, bm = (1 + a) ** c - 1, (1 - a) ** c - 1
    m0 = (ap + am) * e / 2
    s0 = math.sqrt((ap**2 + am**2) * v / (2 * n))
    m1 = (bp + bm) * e / 2
    s1 = math.sqrt((bp**2 + bm**2) * v / (2 * n))
    return m0, m1, s0, s1, False


def emss_sigma1_sq(model, a, n, xi, lam, gamma_order):
    """Variance of the generalized correlator output under EMSS embedding."""
    g = gamma_order
    e_x, e_g = abs_moment(model, xi), abs_moment(model, g)
    v_x, v_g = abs_var(model, xi), abs_var(model, g)
    cross = abs_moment(model, xi + g) - e_x * e_g
    return ((1 + xi**2 * a**2) * v_x / n
            + lam**2 * xi**2 * e_x**2 * v_g / (n * g**2 * e_g**2)
            - 2 * lam * xi * e_x * cross / (n * g * e_g))


def _emss(model, attack, a, n, xi, p, decode):
    lam = float(p.get("lam", 0.0))
    g = float(p.get("gamma_order", xi))
    if attack is None:
        m1 = xi * a * abs_moment(model, xi)
        s1 = math.sqrt(emss_sigma1_sq(model, a, n, xi, lam, g))
        if decode:
            return -m1, m1, s1, s1, True
        return 0.0, m1, math.sqrt(abs_var(model, xi) / n), s1, True
    gaussian = model.kind == "ggd" and model.c == 2.0 and attack.kind == "gaussian_noise"
    if not (gaussian and xi == 2.0 and g == 2.0):
        raise CapabilityError("emss under attack: closed form needs Gaussian host and noise, "
                              "gamma = xi = 2")
    sx2, sv2 = model.sigma_x**2, attack.sigma_v**2
    m1 = 2 * a * sx2
    s1 = math.sqrt((2 * ((1 - lam) ** 2 + 4 * a * a) * sx2**2 + 2 * sv2**2
                    + (4 + 4 * a * a) * sx2 * sv2) / n)
    if decode:
        return -m1, m1, s1, s1, True
    return 0.0, m1, math.sqrt(2 * (sx2 + sv2) ** 2 / n), s1, True


def _gauss_attacked(model, attack, a, n, xi, p):
    if not (model.kind == "ggd" and model.c == 2.0 and attack is not None
            and attack.kind == "gaussian_noise"):
        raise CapabilityError("gauss_attacked_optimum_detect needs Gaussian host and noise")
    sx2, sv2 = model.sigma_x**2, attack.sigma_v**2
    t = sx2 + sv2
    tp, tm = sx2 * (1 + a) ** 2 + sv2, sx2 * (1 - a) ** 2 + sv2
    r0, r1 = 1 / t - 1 / tp, 1 / t - 1 / tm
    m0 = t * (r0 + r1) / 2
    s0 = math.sqrt(t**2 * (r0**2 + r1**2) / n)
    m1 = (tp * r0 + tm * r1) / 2
    s1 = math.sqrt((tp**2 * r0**2 + tm**2 * r1**2) / n)
    return m0, m1, s0, s1, False


def _bmss_correlator(model, attack, a, n, xi, p):
    zeta = float(p.get("zeta", 1.0))
    base = _host_var(model) + _noise_var(attack)
    m1 = a * abs_moment(model, zeta)
    s1 = math.sqrt((base + a * a * abs_var(model, zeta)) / n)
    return 0.0, m1, math.sqrt(base / n), s1, False


_PREDICTORS = {
    "ass_correlator_decode": _ass_correlator,
    "ass_optimum_decode": _ass_optimum_decode,
    "ass_correlator_detect": _ass_correlator_detect,
    "ass_optimum_detect": _ass_optimum_detect,
    "mss_decode": _mss_decode,
    "mss_generalized_detect": _mss_generalized_detect,
    "mss_optimum_detect": _mss_optimum_detect,
    "emss_decode": lambda *args: _emss(*args, decode=True),
    "emss_detect": lambda *args: _emss(*args, decode=False),
    "gauss_attacked_optimum_detect": _gauss_attacked,
    "bmss_correlator_detect": _bmss_correlator,
}


def mss_pe(model, a, n, xi):
    """Q(a sqrt(N) MVR(xi)), the no-attack MSS decoding error."""
    return q(a * math.sqrt(n) * mvr(model, xi))


def mss_roc(model, xi, a, n, p_fa):
    return 1.0 - q(q_inv(p_fa) - a * math.sqrt(n) * mvr(model, xi))


def random_w_roc(model, xi, a, n, p_fa):
    """Miss probability when the watermark is redrawn for every test."""
    return 1.0 - q(q_inv(p_fa) - a * math.sqrt(n) * models.amr(model, xi))


# ------------------------------------------------------------- double sided


def ds_roc(rho, p_fa):
    """Double-sided miss probability; exactly zero once p_fa >= 2Q(rho)."""
    if rho <= 0:
        raise DomainError("rho must be positive")
    p = np.asarray(p_fa, dtype=float)
    if np.any((p <= 0) | (p >= 1)):
        raise DomainError("p_fa must lie in (0, 1)")
    zero = p >= 2 * q(rho)
    inner = np.where(zero, 0.5, p / 2)
    pm = np.where(zero, 0.0, 1.0 - 2 * q(q_inv(inner) - rho))
    return float(pm) if np.ndim(pm) == 0 else pm


def ds_rho(scheme, model, n, a, zeta=1.0):
    """Deflection m1/sigma0 of a double-sided scheme without attack."""
    scheme = str(getattr(scheme, "value", scheme))
    std = _host_std(model)
    if scheme in ("DS_ASS", "ASS"):
        return a * math.sqrt(n) / std
    if scheme in ("DS_BMSS", "BMSS"):
        return a * abs_moment(model, zeta) * math.sqrt(n) / std
    if scheme in ("DS_MSS", "MSS"):
        return a * math.sqrt(n) * mvr(model, zeta)
    raise CapabilityError(f"no deflection formula for {scheme}")


def strength_for_dwr(scheme, model, dwr_db, zeta=1.0):
    """Embedding strength a giving the requested DWR (E X^2 / D_w in dB)."""
    scheme = str(getattr(scheme, "value", scheme))
    dw = abs_moment(model, 2.0) * 10 ** (-dwr_db / 10)
    if scheme in ("ASS", "DS_ASS"):
        return math.sqrt(dw)
    if scheme in ("MSS", "DS_MSS", "EMSS"):
        return math.sqrt(dw / abs_moment(model, 2.0))
    if scheme in ("BMSS", "DS_BMSS", "BARNI", "GEN_BARNI"):
        return math.sqrt(dw / abs_moment(model, 2 * zeta))
    raise CapabilityError(f"no DWR calibration for {scheme}")


def ds_pm_attacked(m1, sigma0, sigma1, sigma_xbar, psi):
    """(p_fa, p_m) of a double-sided detector under additive noise.

    ``m1`` is the magnitude added to the projection, ``sigma1`` the noise
    standard deviation of the projection and ``sigma_xbar`` the host
    projection standard deviation.
    """
    if sigma0 <= 0 or sigma_xbar <= 0 or sigma1 < 0 or psi < 0:
        raise DomainError("standard deviations must be positive and psi >= 0")
    p_fa = 2 * q(psi / sigma0)
    if sigma1 == 0:
        if psi <= m1:
            return p_fa, 0.0
        return p_fa, 1.0 - 2 * q((psi - m1) / sigma_xbar)
    phi = lambda x: math.exp(-0.5 * (x / sigma_xbar) ** 2) / (sigma_xbar * math.sqrt(2 * math.pi))
    bracket = lambda x: q((-psi - x - m1) / sigma1) - q((psi - x - m1) / sigma1)
    top = 10 * sigma_xbar
    # The bracket steps at psi - m1 and -psi - m1 over a width of sigma1.
    edges = {0.0, top}
    for centre in (psi - m1, -psi - m1):
        for k in (-8, -2, 0, 2, 8):
            edges.add(min(max(centre + k * sigma1, 0.0), top))
    edges = sorted(edges)
    val = sum(integrate.quad(lambda x: phi(x) * bracket(x), lo, hi, limit=200,
                             epsabs=1e-16, epsrel=1e-10)[0]
              for lo, hi in zip(edges[:-1], edges[1:]) if hi > lo)
    tail = q(10.0) * bracket(top)
    return p_fa, min(max(2 * (val + tail), 0.0), 1.0)


def hir_roc(l, sigma_x, sigma_v, n, psi):
    """(p_fa, p_m) for host-interference rejection with target projection l."""
    s0 = math.sqrt((sigma_x**2 + sigma_v**2) / n)
    sv = math.sqrt(sigma_v**2 / n)
    p_fa = 2 * q(psi / s0)
    if sv == 0:
        return p_fa, 1.0 if psi > l else 0.0
    return p_fa, q((-psi - l) / sv) - q((psi - l) / sv)


def hir_distortion(l, sigma_x, n):
    if l <= 0 or sigma_x <= 0 or n <= 0:
        raise DomainError("l, sigma_x and n must be positive")
    return l * l + sigma_x**2 / n - 2 * l * math.sqrt(2 * sigma_x**2 / (math.pi * n))


TRUNCATION = 1e-12


def _lattice_sum(term):
    total = term(0)
    for direction in (1, -1):
        k = direction
        while True:
            t = term(k)
            total += t
            if abs(t) < TRUNCATION:
                break
            k += direction
    return total


def stdm_roc(delta_step, sigma_x, sigma_v, n, psi, dither=None):
    """(p_fa, p_m) of STDM verification with centroids at k*delta + dither."""
    if not 0 <= psi <= delta_step / 2:
        raise DomainError("psi must lie in [0, delta_step/2]")
    d = delta_step / 2 if dither is None else dither
    s0 = math.sqrt((sigma_x**2 + sigma_v**2) / n)
    s1 = math.sqrt(sigma_v**2 / n)
    p_fa = _lattice_sum(lambda k: q((k * delta_step + d - psi) / s0)
                        - q((k * delta_step + d + psi) / s0))
    if s1 == 0:
        return min(max(p_fa, 0.0), 1.0), 0.0 if psi > 0 else 1.0
    hit = _lattice_sum(lambda k: q((k * delta_step - psi) / s1) - q((k * delta_step + psi) / s1))
    return min(max(p_fa, 0.0), 1.0), min(max(1.0 - hit, 0.0), 1.0)


def stdm_distortion(delta_step, sigma_x, n, dither=None):
    """Expected squared offset of the projection to its centroid."""
    d = delta_step / 2 if dither is None else dither
    s = sigma_x / math.sqrt(n)
    f = lambda x: (x - (delta_step * math.floor((x - d) / delta_step + 0.5) + d)) ** 2 \
        * math.exp(-0.5 * (x / s) ** 2) / (s * math.sqrt(2 * math.pi))
    edges = np.arange(-12 * s - delta_step, 12 * s + 2 * delta_step, delta_step / 2)
    return sum(integrate.quad(f, lo, hi)[0] for lo, hi in zip(edges[:-1], edges[1:]))


# ---------------------------------------------------------------------- EMSS


@dataclass(frozen=True)
class EmssDiagnostics:
    eta_var: float
    eta_var_exact: float | None
    dw_approx: float
    dw_exact: float | None
    crit_pfa: float
    lambda_max: float
    lambda_opt: float
    mmt: float
    approximate: bool
    advisories: tuple = field(default=())


def mmt(model, xi, gamma_order):
    e_x, e_g = abs_moment(model, xi), abs_moment(model, gamma_order)
    return (abs_moment(model, xi + gamma_order) - e_x * e_g) / (xi * gamma_order * e_x * e_g)


def emss_dw_exact(model, a, lam, n):
    """Expected EMSS distortion at gamma = c via the Gamma-ratio identity."""
    if model.kind != "ggd":
        raise CapabilityError("exact EMSS distortion needs a GGD host")
    c = model.c
    g = c
    e = lambda r: abs_moment(model, r)
    log_r = (special.gammaln(n / c + 2 / c) - special.gammaln(n / c + 2 / c + 2)
             + 2 * c * math.log(model.beta))
    r = math.exp(log_r)
    f = (n * e(2 + 2 * g) - 2 * n * e(2 + g) * e(g) + n * (n - 1) * e(2) * e(2 * g)
         - n * (n - 2) * e(2) * e(g) ** 2)
    return a * a * e(2) + lam**2 / (n * g * g) * r * f


def emss_diagnostics(model, gamma_order, xi, lam, a, n, dwr_db):
    if model.kind != "ggd":
        raise CapabilityError("EMSS diagnostics are derived for GGD hosts")
    g = gamma_order
    e_g, v_g = abs_moment(model, g), abs_var(model, g)
    sx2 = model.sigma_x**2
    eta_var = v_g / (n * e_g**2)
    at_c = math.isclose(g, model.c, rel_tol=1e-12)
    eta_exact = v_g / (v_g + n * e_g**2) if at_c else None
    mvr_g = mvr(model, g)
    dw_approx = a * a * sx2 + (lam / mvr_g) ** 2 * sx2 / n
    dw_exact = emss_dw_exact(model, a, lam, n) if at_c else None
    budget = n * 10 ** (-dwr_db / 10) - lam**2 / mvr_g**2
    advisories = []
    if budget > 0:
        crit = q(mvr(model, xi) * math.sqrt(budget))
    else:
        crit = math.nan
        advisories.append("lambda too large for the distortion budget")
    lam_opt = 10 ** (-dwr_db / 10) * n * mvr_g**2
    lam_max = 2 - 2 / (1 + lam_opt)
    if lam_opt >= lam_max:
        advisories.append("lambda_opt >= lambda_max")
    return EmssDiagnostics(eta_var, eta_exact, dw_approx, dw_exact, crit, lam_max, lam_opt,
                           mmt(model, xi, g), not at_c, tuple(advisories))


def emss_pe(model, a, n, xi, lam):
    """No-attack EMSS decoding error at gamma = xi."""
    return q(a * math.sqrt(n) * mvr(model, xi) / math.sqrt((1 - lam) ** 2 + xi**2 * a**2))


# ---------------------------------------------------------------- perceptual


def perceptual_k(a, mask):
    return float(np.mean(a * np.asarray(mask, dtype=float)))


def perceptual_dw(a, mask):
    return float(np.mean((a * np.asarray(mask, dtype=float)) ** 2))


# ------------------------------------------------------------------- tables


@dataclass(frozen=True)
class RocTable:
    p_fa: np.ndarray
    p_m: np.ndarray
    provenance: str
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        pf = np.asarray(self.p_fa, dtype=float)
        pm = np.asarray(self.p_m, dtype=float)
        if pf.shape != pm.shape:
            raise ConfigError("p_fa and p_m must have equal length")
        if self.provenance not in ("theory", "empirical"):
            raise ConfigError("provenance must be 'theory' or 'empirical'")
        if np.any(np.diff(pf) <= 0):
            raise ConfigError("p_fa must be strictly increasing")
        if np.any((pf < 0) | (pf > 1) | (pm < 0) | (pm > 1)):
            raise ConfigError("probabilities must lie in [0, 1]")
        object.__setattr__(self, "p_fa", pf)
        object.__setattr__(self, "p_m", pm)

    @classmethod
    def from_points(cls, p_fa, p_m, provenance, config=None):
        """Sort by p_fa and keep the best miss rate for repeated p_fa values."""
        best = {}
        for f, m in zip(np.asarray(p_fa, float), np.asarray(p_m, float)):
            best[f] = min(m, best.get(f, math.inf))
        keys = sorted(best)
        return cls(np.array(keys), np.array([best[k] for k in keys]), provenance, config or {})

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["p_fa", "p_m", "provenance"])
        for f, m in zip(self.p_fa, self.p_m):
            writer.writerow([repr(float(f)), repr(float(m)), self.provenance])
        return buf.getvalue()

    def to_dict(self):
        return {"provenance": self.provenance, "config": self.config,
                "rows": [[float(f), float(m)] for f, m in zip(self.p_fa, self.p_m)]}
