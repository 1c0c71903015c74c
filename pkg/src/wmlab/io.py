"""File helpers: 8-bit PGM images, plain-text vectors and JSON configs."""

from __future__ import annotations

import json

import numpy as np
from PIL import Image

from .errors import ConfigError


def read_pgm(path):
    try:
        with Image.open(path) as img:
            if img.mode not in ("L", "P", "1"):
                raise ConfigError(f"{path}: expected an 8-bit grayscale image, got mode {img.mode}")
            return np.asarray(img.convert("L"), dtype=np.uint8)
    except OSError as exc:
        raise ConfigError(f"cannot read image {path}: {exc}") from None


def write_pgm(path, pixels):
    """Round once and clamp to [0, 255] at write time."""
    arr = np.clip(np.round(np.asarray(pixels, dtype=float)), 0, 255).astype(np.uint8)
    Image.fromarray(arr, mode="L").save(path, format="PPM")


def is_image(path):
    return str(path).lower().endswith((".pgm", ".png", ".bmp", ".tif", ".tiff"))


def read_vector(path):
    try:
        return np.atleast_1d(np.loadtxt(path, dtype=float)).ravel()
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read vector {path}: {exc}") from None


def write_vector(path, values):
    np.savetxt(path, np.asarray(values, dtype=float).ravel(), fmt="%.17g")


def load_json(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read JSON {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return data


def _default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def dumps(data):
    return json.dumps(data, indent=2, default=_default)
