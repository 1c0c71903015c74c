"""Seeded Monte-Carlo experiments with theory curves attached.

Trials run in fixed-size chunks. Chunk ``j`` of grid point ``p`` draws all of
its randomness from ``SeedSequence([master_seed, p, j])``, so results do not
depend on how many workers process the chunks.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace

import numpy as np
from scipy import optimize

from . import channel, detect, embed, models, theory
from .channel import AttackSpec
from .detect import DetectorConfig
from .embed import Scheme, SchemeConfig
from .errors import CapabilityError, ConfigError, ProtocolError
from .models import HostModel

CHUNK = 10_000
POOL_BATCH = 500
DEFAULT_PFA_GRID = tuple(np.logspace(-6, math.log10(0.5), 25))
SWEEP_AXES = ("c", "xi", "lambda", "gamma_order", "wnr", "qf", "N")


def permute_hosts(pool, n, seed):
    """First ``n`` entries of a seeded uniform permutation of ``pool``."""
    pool = np.asarray(pool, dtype=float).ravel()
    n = int(n)
    if n >= pool.size:
        raise ProtocolError(f"need n < pool size, got n={n}, M={pool.size}")
    if n < 1:
        raise ConfigError("n must be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else models.rng_for(seed)
    return rng.permutation(pool)[:n]


def workers():
    """Worker count from WMLAB_THREADS (default 1)."""
    raw = os.environ.get("WMLAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"WMLAB_THREADS must be an integer, got {raw!r}") from None


@dataclass(frozen=True)
class ExperimentConfig:
    """One Monte-Carlo experiment.

    The host source is either ``model`` (synthetic draws) or ``pool`` (the
    permutation protocol over one image's coefficients, with an optional
    aligned ``mask_pool``). ``psi_grid`` fixes the thresholds directly;
    otherwise they are placed at the theoretical ``pfa_grid``.
    ``ac_index`` selects the JPEG quantizer step for ``jpeg`` attacks.
    """

    scheme: SchemeConfig
    detector: DetectorConfig
    n: int
    model: HostModel | None = None
    pool: np.ndarray | None = None
    mask_pool: np.ndarray | None = None
    pool_kind: str = "ggd"
    attack: AttackSpec | None = None
    trials: int = 100_000
    psi_grid: tuple | None = None
    pfa_grid: tuple | None = None
    master_seed: int = 0
    random_watermark: bool = False
    ac_index: int | None = None

    def __post_init__(self):
        if (self.model is None) == (self.pool is None):
            raise ConfigError("give exactly one of model or pool")
        if int(self.trials) < 1:
            raise ConfigError("trials must be >= 1")
        if int(self.n) < 2 or int(self.n) % 2:
            raise ConfigError("n must be even and >= 2")
        if self.pool is not None:
            pool = np.asarray(self.pool, dtype=float).ravel()
            if self.n >= pool.size:
                raise ProtocolError(f"permutation protocol needs N < M (N={self.n}, M={pool.size})")
            object.__setattr__(self, "pool", pool)
            if self.mask_pool is not None:
                mp = np.asarray(self.mask_pool, dtype=float).ravel()
                if mp.shape != pool.shape:
                    raise ConfigError("mask_pool must align with pool")
                object.__setattr__(self, "mask_pool", mp)
        elif self.mask_pool is not None:
            raise ConfigError("mask_pool needs a pool source")
        if self.psi_grid is not None:
            object.__setattr__(self, "psi_grid", tuple(float(v) for v in self.psi_grid))
        if self.pfa_grid is not None:
            grid = tuple(float(v) for v in self.pfa_grid)
            if any(not 0 < v < 1 for v in grid):
                raise ConfigError("pfa_grid values must lie in (0, 1)")
            object.__setattr__(self, "pfa_grid", grid)
        if self.attack is not None and self.attack.kind == "jpeg" and self.ac_index is None:
            raise ConfigError("jpeg attacks on coefficient vectors need ac_index")

    def replace(self, **changes):
        return replace(self, **changes)

    def host_model(self):
        """Model used for theory; estimated once from the pool when pool-sourced."""
        if self.model is not None:
            return self.model
        return models.estimate(self.pool, self.pool_kind)

    def to_dict(self):
        out = {
            "scheme": self.scheme.to_dict(),
            "detector": detector_to_dict(self.detector),
            "n": int(self.n),
            "trials": int(self.trials),
            "master_seed": int(self.master_seed),
            "random_watermark": bool(self.random_watermark),
        }
        if self.model is not None:
            out["model"] = self.model.to_dict()
        else:
            out["pool_size"] = int(self.pool.size)
            out["pool_kind"] = self.pool_kind
        if self.attack is not None:
            out["attack"] = self.attack.to_dict()
        if self.psi_grid is not None:
            out["psi_grid"] = list(self.psi_grid)
        if self.pfa_grid is not None:
            out["pfa_grid"] = list(self.pfa_grid)
        if self.ac_index is not None:
            out["ac_index"] = self.ac_index
        return out

    @classmethod
    def from_dict(cls, data, pool=None, mask_pool=None):
        known = {"scheme", "detector", "n", "trials", "master_seed", "random_watermark", "model",
                 "attack", "psi_grid", "pfa_grid", "ac_index", "pool_kind"}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown experiment fields: {sorted(unknown)}")
        for key in ("scheme", "detector", "n"):
            if key not in data:
                raise ConfigError(f"experiment needs {key!r}")
        return cls(
            scheme=SchemeConfig.from_dict(data["scheme"]),
            detector=detector_from_dict(data["detector"]),
            n=int(data["n"]),
            model=HostModel.from_dict(data["model"]) if "model" in data else None,
            pool=pool,
            mask_pool=mask_pool,
            pool_kind=data.get("pool_kind", "ggd"),
            attack=AttackSpec.from_dict(data["attack"]) if "attack" in data else None,
            trials=int(data.get("trials", 100_000)),
            psi_grid=data.get("psi_grid"),
            pfa_grid=data.get("pfa_grid"),
            master_seed=int(data.get("master_seed", 0)),
            random_watermark=bool(data.get("random_watermark", False)),
            ac_index=data.get("ac_index"),
        )


def detector_to_dict(det):
    out = {}
    for f in fields(det):
        value = getattr(det, f.name)
        if value is None:
            continue
        out[f.name] = np.asarray(value).tolist() if f.name == "mask" else value
    return out


def detector_from_dict(data):
    names = {f.name for f in fields(DetectorConfig)}
    unknown = set(data) - names
    if unknown:
        raise ConfigError(f"unknown detector fields: {sorted(unknown)}")
    return DetectorConfig(**data)


# ------------------------------------------------------------------ theory


@dataclass(frozen=True)
class TheoryCurve:
    """Theoretical (p_fa, p_m) as a function of the threshold psi."""

    point: object
    psi_range: tuple
    summary: theory.GaussianStatSummary | None = None

    def psi_for(self, p_fa):
        lo, hi = self.psi_range
        f = lambda psi: self.point(psi)[0] - p_fa
        flo, fhi = f(lo), f(hi)
        if flo * fhi > 0:
            return lo if abs(flo) < abs(fhi) else hi
        return optimize.brentq(f, lo, hi, xtol=1e-14 * max(1.0, abs(hi)), rtol=1e-12)


def _gaussian_curve(sm, rule):
    if rule == "double":
        width = abs(sm.m0) + abs(sm.m1) + 40 * max(sm.s0, sm.s1)
        rng = (0.0, width)
    else:
        rng = (sm.m0 - 40 * sm.s0, max(sm.m0, sm.m1) + 40 * max(sm.s0, sm.s1))
    return TheoryCurve(lambda psi: theory.operating_point(sm, psi, rule), rng, sm)


def _noise_std(attack):
    if attack is None:
        return 0.0
    if not attack.is_noise:
        raise CapabilityError("closed-form ROC covers noise attacks only")
    return math.sqrt(attack.noise_variance())


def _verification_theory(cfg, model):
    s, det, attack, n = cfg.scheme, cfg.detector, cfg.attack, cfg.n
    kind, xi = det.statistic, det.xi
    family = {
        (Scheme.ASS, "correlator"): "ass_correlator_detect",
        (Scheme.ASS, "opt_ass_detect"): "ass_optimum_detect",
        (Scheme.MSS, "generalized"): "mss_generalized_detect",
        (Scheme.MSS, "opt_mss"): "mss_optimum_detect",
        (Scheme.MSS, "gauss_attacked"): "gauss_attacked_optimum_detect",
        (Scheme.EMSS, "generalized"): "emss_detect",
        (Scheme.BARNI, "correlator"): "bmss_correlator_detect",
        (Scheme.GEN_BARNI, "correlator"): "bmss_correlator_detect",
    }.get((s.scheme, kind))
    if family is not None and det.rule == "single":
        sm = theory.moments_for(family, model, attack, a=s.a, n=n, xi=xi, lam=s.lam,
                                gamma_order=s.gamma_order, zeta=s.zeta,
                                shape=det.shape if det.shape is not None else xi)
        return _gaussian_curve(sm, det.rule)
    sx = theory._host_std(model)
    sv = _noise_std(attack)
    if kind == "correlator" and det.rule == "double":
        if s.scheme is Scheme.DS_ASS:
            m1, extra = s.a, 0.0
        elif s.scheme is Scheme.DS_BMSS:
            m1 = s.a * models.abs_moment(model, s.zeta)
            extra = s.a**2 * models.abs_var(model, s.zeta)
        elif s.scheme is Scheme.DS_ASS_HIR:
            curve = lambda psi: theory.hir_roc(s.target_l, sx, sv, n, psi)
            return TheoryCurve(curve, (0.0, 40 * math.sqrt((sx**2 + sv**2) / n) + s.target_l))
        else:
            raise CapabilityError(f"no closed-form ROC for {s.scheme.value}")
        s0 = math.sqrt((sx**2 + sv**2) / n)
        s1 = math.sqrt((sv**2 + extra) / n)
        sxbar = sx / math.sqrt(n)
        curve = lambda psi: theory.ds_pm_attacked(m1, s0, s1, sxbar, psi)
        return TheoryCurve(curve, (0.0, 40 * s0 + m1))
    if kind == "stdm" and s.scheme is Scheme.STDM:
        if det.delta_step != s.delta_step:
            raise CapabilityError("detector and embedder lattice steps differ")
        d = embed.stdm_dither(s)
        curve = lambda psi: theory.stdm_roc(s.delta_step, sx, sv, n, psi, d)
        return TheoryCurve(curve, (0.0, s.delta_step / 2))
    raise CapabilityError(f"no closed-form ROC for {s.scheme.value} with {kind}/{det.rule}")


def _decoding_theory(cfg, model):
    s, det = cfg.scheme, cfg.detector
    family = {
        (Scheme.ASS, "correlator"): "ass_correlator_decode",
        (Scheme.ASS, "opt_ass_decode"): "ass_optimum_decode",
        (Scheme.MSS, "generalized"): "mss_decode",
        (Scheme.EMSS, "generalized"): "emss_decode",
    }.get((s.scheme, det.statistic))
    if family is None:
        raise CapabilityError(f"no closed-form error rate for {s.scheme.value} "
                              f"with {det.statistic}")
    sm = theory.moments_for(family, model, cfg.attack, a=s.a, n=cfg.n, xi=det.xi, lam=s.lam,
                            gamma_order=s.gamma_order)
    return theory.pe_gaussian(sm), sm


# ------------------------------------------------------------------ trials


def _watermark(cfg):
    return embed.gen_watermark(cfg.master_seed, cfg.n).w


def _draw_hosts(cfg, rng, count):
    """(count, N) hosts and, for pool sources, their aligned masks."""
    if cfg.model is not None:
        return models.draw(cfg.model, (count, cfg.n), rng), None
    m = cfg.pool.size
    hosts = np.empty((count, cfg.n))
    masks = None if cfg.mask_pool is None else np.empty((count, cfg.n))
    base = np.arange(m)
    for start in range(0, count, POOL_BATCH):
        rows = min(POOL_BATCH, count - start)
        idx = rng.permuted(np.broadcast_to(base, (rows, m)), axis=1)[:, :cfg.n]
        hosts[start:start + rows] = cfg.pool[idx]
        if masks is not None:
            masks[start:start + rows] = cfg.mask_pool[idx]
    return hosts, masks


def _attack(cfg, s, rng):
    a = cfg.attack
    if a is None:
        return s
    if a.is_noise:
        return s + channel.draw_noise(a, s.shape, rng)
    from .percept import zigzag_position

    i, j = zigzag_position(cfg.ac_index)
    step = channel.quality_table(a.qf)[i, j]
    return np.round(s / step) * step


def _configs_for(cfg, masks):
    scheme, det = cfg.scheme, cfg.detector
    if masks is not None:
        if scheme.scheme in (Scheme.ASS_PERCEPTUAL, Scheme.DS_ASS_PERCEPTUAL):
            scheme = scheme.replace(mask=masks)
        if det.statistic == "opt_ass_detect":
            det = replace(det, mask=masks)
    return scheme, det


def _w_matrix(cfg, rng, count, fixed):
    if cfg.random_watermark:
        return 2.0 * rng.integers(0, 2, size=(count, cfg.n)) - 1.0
    return fixed


def _verification_chunk(cfg, point, chunk, count, w_fixed):
    h0_rng, h1_rng = (np.random.default_rng(s) for s in
                      np.random.SeedSequence([cfg.master_seed, point, chunk]).spawn(2))
    x0, m0 = _draw_hosts(cfg, h0_rng, count)
    w0 = _w_matrix(cfg, h0_rng, count, w_fixed)
    _, det0 = _configs_for(cfg, m0)
    stat0 = detect.compute_statistic(_attack(cfg, x0, h0_rng), w0, det0)

    x1, m1 = _draw_hosts(cfg, h1_rng, count)
    w1 = _w_matrix(cfg, h1_rng, count, w_fixed)
    scheme1, det1 = _configs_for(cfg, m1)
    s1 = embed.embed(x1, w1, scheme1)
    dw = float(np.sum(np.mean((s1 - x1) ** 2, axis=-1)))
    stat1 = detect.compute_statistic(_attack(cfg, s1, h1_rng), w1, det1)
    return np.asarray(stat0), np.asarray(stat1), dw


def _decoding_chunk(cfg, point, chunk, count, w_fixed):
    rng = np.random.default_rng(np.random.SeedSequence([cfg.master_seed, point, chunk]))
    x, masks = _draw_hosts(cfg, rng, count)
    w = _w_matrix(cfg, rng, count, w_fixed)
    bits = np.where(rng.integers(0, 2, size=count) == 1, 1, -1)
    scheme, det = _configs_for(cfg, masks)
    s = np.empty_like(x)
    for b in (1, -1):
        rows = bits == b
        if not np.any(rows):
            continue
        sub = scheme
        if masks is not None and sub.mask is not None:
            sub = sub.replace(mask=masks[rows])
        w_rows = w if w.ndim == 1 else w[rows]
        s[rows] = embed.embed(x[rows], w_rows, sub.replace(b=b))
    dw = float(np.sum(np.mean((s - x) ** 2, axis=-1)))
    stat = np.asarray(detect.compute_statistic(_attack(cfg, s, rng), w, det))
    decided = np.where(stat > 0, 1, -1)
    return int(np.count_nonzero(decided != bits)), dw


def _run_chunks(cfg, point, fn):
    w_fixed = _watermark(cfg)
    sizes = [min(CHUNK, cfg.trials - start) for start in range(0, cfg.trials, CHUNK)]
    jobs = [(point, j, size, w_fixed) for j, size in enumerate(sizes)]
    n_workers = min(workers(), len(jobs))
    if n_workers <= 1:
        return [fn(cfg, *job) for job in jobs]
    with ThreadPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(lambda job: fn(cfg, *job), jobs))


# ------------------------------------------------------------------ reports


def binomial_se(p, trials):
    p = np.asarray(p, dtype=float)
    return np.sqrt(p * (1 - p) / trials)


@dataclass(frozen=True)
class ExperimentReport:
    """Empirical counts with binomial errors and, when available, theory.

    Verification reports carry one row per threshold; decoding reports carry
    the error count. ``censored`` flags empirical p_fa below 10/trials.
    """

    kind: str
    config: dict
    trials: int
    seed: int
    wall_time: float
    mean_distortion: float
    psi: np.ndarray | None = None
    false_alarms: np.ndarray | None = None
    misses: np.ndarray | None = None
    theory_pfa: np.ndarray | None = None
    theory_pm: np.ndarray | None = None
    errors: int | None = None
    theory_pe: float | None = None
    theory_available: bool = False
    notes: tuple = field(default=())

    @property
    def p_fa(self):
        return self.false_alarms / self.trials

    @property
    def p_m(self):
        return self.misses / self.trials

    @property
    def se_fa(self):
        return binomial_se(self.p_fa, self.trials)

    @property
    def se_m(self):
        return binomial_se(self.p_m, self.trials)

    @property
    def censored(self):
        return self.p_fa < 10 / self.trials

    @property
    def p_e(self):
        return self.errors / self.trials

    @property
    def se_e(self):
        return float(binomial_se(self.p_e, self.trials))

    def empirical_roc(self):
        return theory.RocTable.from_points(self.p_fa, self.p_m, "empirical", self.config)

    def theory_roc(self):
        if not self.theory_available or self.theory_pfa is None:
            return None
        return theory.RocTable.from_points(self.theory_pfa, self.theory_pm, "theory", self.config)

    def rows(self):
        if self.kind == "decoding":
            return [{"p_e": self.p_e, "se": self.se_e, "errors": self.errors,
                     "theory_p_e": self.theory_pe}]
        out = []
        for k in range(self.psi.size):
            row = {"psi": float(self.psi[k]),
                   "p_fa": float(self.p_fa[k]), "se_fa": float(self.se_fa[k]),
                   "p_m": float(self.p_m[k]), "se_m": float(self.se_m[k]),
                   "false_alarms": int(self.false_alarms[k]), "misses": int(self.misses[k]),
                   "censored": bool(self.censored[k])}
            if self.theory_available:
                row["theory_p_fa"] = float(self.theory_pfa[k])
                row["theory_p_m"] = float(self.theory_pm[k])
            out.append(row)
        return out

    def to_dict(self):
        return {"kind": self.kind, "config": self.config, "trials": self.trials,
                "seed": self.seed, "wall_time": self.wall_time,
                "mean_distortion": self.mean_distortion,
                "theory_available": self.theory_available, "notes": list(self.notes),
                "rows": self.rows()}


def _count_above(sorted_stats, psi):
    return sorted_stats.size - np.searchsorted(sorted_stats, psi, side="right")


def _count_below(sorted_stats, psi):
    return np.searchsorted(sorted_stats, psi, side="left")


def run_verification(cfg, point=0):
    """Count false alarms and misses at every threshold over ``cfg.trials`` pairs."""
    t0 = time.perf_counter()
    model = cfg.host_model()
    notes = []
    try:
        if cfg.random_watermark:
            raise CapabilityError("theory assumes one fixed zero-sum watermark")
        curve = _verification_theory(cfg, model)
        if curve.summary is not None:
            notes.extend(curve.summary.notes)
    except CapabilityError as exc:
        curve = None
        notes.append(f"empirical only: {exc}")

    parts = _run_chunks(cfg, point, _verification_chunk)
    stat0 = np.concatenate([p[0] for p in parts])
    stat1 = np.concatenate([p[1] for p in parts])
    dw = sum(p[2] for p in parts) / cfg.trials

    det = cfg.detector
    double = det.rule == "double" and det.statistic != "stdm"
    key0 = np.sort(np.abs(stat0) if double else stat0)
    key1 = np.sort(np.abs(stat1) if double else stat1)

    if cfg.psi_grid is not None:
        psi = np.array(cfg.psi_grid)
    else:
        pfa = np.array(cfg.pfa_grid if cfg.pfa_grid is not None else DEFAULT_PFA_GRID)
        if curve is not None:
            psi = np.array([curve.psi_for(p) for p in pfa])
        else:
            notes.append("thresholds placed at empirical H0 quantiles")
            q = pfa if det.statistic == "stdm" else 1 - pfa
            psi = np.quantile(key0, q)

    if det.statistic == "stdm":
        fa = _count_below(key0, psi)
        miss = cfg.trials - _count_below(key1, psi)
    else:
        fa = _count_above(key0, psi)
        miss = cfg.trials - _count_above(key1, psi)

    th_pfa = th_pm = None
    if curve is not None:
        pts = np.array([curve.point(p) for p in psi], dtype=float)
        th_pfa, th_pm = pts[:, 0], pts[:, 1]

    return ExperimentReport(
        kind="verification", config=cfg.to_dict(), trials=cfg.trials, seed=cfg.master_seed,
        wall_time=time.perf_counter() - t0, mean_distortion=dw, psi=psi,
        false_alarms=np.asarray(fa, dtype=np.int64), misses=np.asarray(miss, dtype=np.int64),
        theory_pfa=th_pfa, theory_pm=th_pm, theory_available=curve is not None,
        notes=tuple(notes))


def run_decoding(cfg, point=0):
    """Embed a random bit per trial and count sign-decoding errors."""
    s = cfg.scheme.scheme
    if s in embed.QUANTIZED or s in embed.DOUBLE_SIDED:
        raise ConfigError(f"{s.value} is run as a verification scheme here")
    t0 = time.perf_counter()
    notes = []
    try:
        if cfg.random_watermark:
            raise CapabilityError("theory assumes one fixed zero-sum watermark")
        pe, sm = _decoding_theory(cfg, cfg.host_model())
        notes.extend(sm.notes)
    except CapabilityError as exc:
        pe = None
        notes.append(f"empirical only: {exc}")
    parts = _run_chunks(cfg, point, _decoding_chunk)
    errors = sum(p[0] for p in parts)
    dw = sum(p[1] for p in parts) / cfg.trials
    return ExperimentReport(
        kind="decoding", config=cfg.to_dict(), trials=cfg.trials, seed=cfg.master_seed,
        wall_time=time.perf_counter() - t0, mean_distortion=dw, errors=int(errors),
        theory_pe=pe, theory_available=pe is not None, notes=tuple(notes))


# ------------------------------------------------------------------- sweeps


def _pilot_distortion(cfg):
    """Mean embedding distortion over a small deterministic pilot batch."""
    rng = np.random.default_rng(np.random.SeedSequence([cfg.master_seed, 2**31 - 1]))
    x, masks = _draw_hosts(cfg, rng, 2000)
    scheme, _ = _configs_for(cfg, masks)
    s = embed.embed(x, _watermark(cfg), scheme)
    return float(np.mean((s - x) ** 2))


def apply_axis(cfg, axis, value):
    """Copy of ``cfg`` with one swept parameter set to ``value``."""
    if axis not in SWEEP_AXES:
        raise ConfigError(f"unknown sweep axis {axis!r}")
    if axis == "c":
        if cfg.model is None or cfg.model.kind != "ggd":
            raise ConfigError("axis c needs a synthetic GGD source")
        return cfg.replace(model=HostModel.ggd(value, cfg.model.sigma_x))
    if axis == "xi":
        return cfg.replace(detector=replace(cfg.detector, xi=float(value)))
    if axis == "lambda":
        if cfg.scheme.scheme not in (Scheme.EMSS, Scheme.DC_QIM):
            raise ConfigError("axis lambda needs EMSS or DC_QIM")
        return cfg.replace(scheme=cfg.scheme.replace(lam=float(value)))
    if axis == "gamma_order":
        if cfg.scheme.scheme is not Scheme.EMSS:
            raise ConfigError("axis gamma_order needs EMSS")
        return cfg.replace(scheme=cfg.scheme.replace(gamma_order=float(value)))
    if axis == "N":
        return cfg.replace(n=int(value))
    if axis == "qf":
        if cfg.attack is None or cfg.attack.kind != "jpeg":
            raise ConfigError("axis qf needs a jpeg attack")
        return cfg.replace(attack=replace(cfg.attack, qf=int(value)))
    if cfg.attack is None or not cfg.attack.is_noise:
        raise ConfigError("axis wnr needs a noise attack")
    noise_var = _pilot_distortion(cfg) * 10 ** (-float(value) / 10)
    sigma = math.sqrt(noise_var)
    if cfg.attack.kind == "abs_gaussian_noise":
        sigma /= math.sqrt(1 - 2 / math.pi)
    return cfg.replace(attack=replace(cfg.attack, sigma_v=sigma))


def sweep(cfg, axis, grid, mode="verification", common_numbers=False):
    """One report per grid value.

    Point ``k`` uses seed stream ``k``; with ``common_numbers`` every point
    reuses stream 0 so differences between points are not diluted by
    independent host draws.
    """
    if mode not in ("verification", "decoding"):
        raise ConfigError("mode must be 'verification' or 'decoding'")
    run = run_verification if mode == "verification" else run_decoding
    reports = []
    for k, value in enumerate(grid):
        point_cfg = apply_axis(cfg, axis, value)
        reports.append(run(point_cfg, point=0 if common_numbers else k))
    return reports
