"""Spread-spectrum watermarking laboratory.

Host models, embedders, detectors, analytic predictors, attack channels,
perceptual masks and a seeded Monte-Carlo harness.
"""

from .channel import AttackSpec, apply_noise, jpeg_attack
from .detect import DetectorConfig, compute_statistic, decide
from .embed import Scheme, SchemeConfig, WatermarkSequence, gen_watermark
from .errors import (CapabilityError, ConfigError, ConvergenceError, DegenerateHostError,
                     DomainError, ProtocolError, UnsupportedModelError, WmlabError)
from .harness import ExperimentConfig, ExperimentReport, run_decoding, run_verification, sweep
from .models import HostModel, abs_moment, amr, estimate, mvr, q, q_inv, sample
from .theory import GaussianStatSummary, RocTable, moments_for

__version__ = "0.1.0"
