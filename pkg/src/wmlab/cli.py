"""Command line entry point ``wmlab``.

Exit codes: 0 ok, 2 configuration error, 3 protocol error, 4 numeric
non-convergence.
"""

from __future__ import annotations

import sys

import click
import numpy as np

from . import channel, detect, embed, harness, io, models, percept
from .channel import AttackSpec
from .embed import SchemeConfig
from .errors import ConfigError, WmlabError
from .models import HostModel


def _emit(data):
    click.echo(io.dumps(data))


def _image_coefficients(path, ac_index):
    img = percept.block_dct(io.read_pgm(path))
    return img, percept.zigzag_extract(img, ac_index)


def _image_pool(data):
    """Pool and optional mask pool for image-sourced experiments."""
    path = data.pop("image")
    ac = int(data.get("ac_index", 1))
    stage = data.pop("mask_stage", None)
    img, pool = _image_coefficients(path, ac)
    masks = None if stage is None else percept.watson_mask(img, stage).at(ac)
    return pool, masks


@click.group()
def cli():
    """Spread-spectrum watermarking laboratory."""


@cli.command()
@click.argument("path")
@click.option("--kind", default="ggd", type=click.Choice(models.KINDS))
@click.option("--ac-index", default=1, show_default=True, help="Zigzag AC index for images.")
def estimate(path, kind, ac_index):
    """Fit a host model to a vector file or to one DCT band of a PGM image."""
    values = _image_coefficients(path, ac_index)[1] if io.is_image(path) else io.read_vector(path)
    if kind == "weibull":
        values = np.abs(values)
    _emit(models.estimate(values, kind).to_dict())


@cli.command()
@click.argument("model_json")
@click.option("--n", "n", default=1000, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", default="-", help="Output vector file; '-' for stdout.")
def sample(model_json, n, seed, out):
    """Draw seeded samples from a host model."""
    batch = models.sample(HostModel.from_dict(io.load_json(model_json)), n, seed)
    io.write_vector(sys.stdout if out == "-" else out, batch.values)


def _load_input(data):
    """Host vector plus, for images, the transform and zigzag index."""
    if "input" not in data:
        raise ConfigError("config needs 'input'")
    path = data["input"]
    if io.is_image(path):
        ac = int(data.get("ac_index", 1))
        img, values = _image_coefficients(path, ac)
        return values, img, ac
    return io.read_vector(path), None, None


def _write_output(path, values, img, ac):
    if img is None:
        io.write_vector(path, values)
    else:
        io.write_pgm(path, percept.inverse_dct(percept.zigzag_insert(img, ac, values)))


@cli.command("embed")
@click.argument("cfg_json")
def embed_cmd(cfg_json):
    """Embed a watermark into a vector or one DCT band of an image."""
    data = io.load_json(cfg_json)
    x, img, ac = _load_input(data)
    cfg = SchemeConfig.from_dict(data.get("scheme", {}))
    if data.get("mask_stage") is not None:
        if img is None:
            raise ConfigError("mask_stage needs an image input")
        cfg = cfg.replace(mask=percept.watson_mask(img, data["mask_stage"]).at(ac))
    n = x.size - x.size % 2
    w = embed.gen_watermark(int(data.get("watermark_seed", 0)), n)
    if cfg.mask is not None:
        cfg = cfg.replace(mask=np.asarray(cfg.mask)[:n])
    s = x.copy()
    s[:n] = embed.embed(x[:n], w, cfg)
    if "output" in data:
        _write_output(data["output"], s, img, ac)
    d = embed.distortion(x, s, ex2=float(np.mean(x * x)))
    _emit({"n": n, "dt": d.dt, "dwr_db": d.dwr_db})


@cli.command()
@click.argument("spec_json")
def attack(spec_json):
    """Apply a noise or JPEG attack to a vector or image."""
    data = io.load_json(spec_json)
    spec = AttackSpec.from_dict(data.get("attack", {}))
    path = data.get("input")
    if path is None or "output" not in data:
        raise ConfigError("attack config needs 'input' and 'output'")
    if io.is_image(path):
        pixels = io.read_pgm(path)
        out = channel.jpeg_attack(pixels, spec.qf) if spec.kind == "jpeg" \
            else channel.apply_noise(pixels, spec)
        io.write_pgm(data["output"], out)
    else:
        if not spec.is_noise:
            raise ConfigError("jpeg attacks need an image input")
        io.write_vector(data["output"], channel.apply_noise(io.read_vector(path), spec))
    _emit({"attack": spec.to_dict(), "output": data["output"]})


@cli.command("detect")
@click.argument("cfg_json")
def detect_cmd(cfg_json):
    """Compute a detection statistic and decide against psi."""
    data = io.load_json(cfg_json)
    y, img, ac = _load_input(data)
    det = harness.detector_from_dict(data.get("detector", {}))
    n = y.size - y.size % 2
    w = embed.gen_watermark(int(data.get("watermark_seed", 0)), n)
    stat = float(detect.compute_statistic(y[:n], w, det))
    psi = float(data.get("psi", 0.0))
    if det.statistic == "stdm":
        verdict = "H1" if stat < psi else "H0"
        outcome = detect.DecisionOutcome(stat, psi, "stdm", verdict)
    else:
        outcome = detect.decide(stat, psi, det.rule)
    _emit({"statistic": outcome.statistic, "psi": outcome.psi, "rule": outcome.rule,
           "verdict": outcome.verdict})


def _experiment(path):
    data = io.load_json(path)
    pool = masks = None
    if "image" in data:
        pool, masks = _image_pool(data)
    return harness.ExperimentConfig.from_dict(data, pool=pool, mask_pool=masks)


def _report_out(reports, csv_path):
    if csv_path:
        with open(csv_path, "w") as fh:
            for rep in reports:
                table = rep.empirical_roc() if rep.kind == "verification" else None
                if table is not None:
                    fh.write(table.to_csv())
                    th = rep.theory_roc()
                    if th is not None:
                        fh.write(th.to_csv().split("\n", 1)[1])


@cli.command()
@click.argument("experiment_json")
@click.option("--mode", default="verification", type=click.Choice(["verification", "decoding"]))
@click.option("--csv", "csv_path", default=None, help="Also write the ROC table as CSV.")
def simulate(experiment_json, mode, csv_path):
    """Run one Monte-Carlo experiment and print its JSON report."""
    cfg = _experiment(experiment_json)
    rep = harness.run_verification(cfg) if mode == "verification" else harness.run_decoding(cfg)
    _report_out([rep], csv_path)
    _emit(rep.to_dict())


@cli.command()
@click.argument("experiment_json")
@click.option("--axis", required=True, type=click.Choice(harness.SWEEP_AXES))
@click.option("--grid", required=True, help="Comma-separated values.")
@click.option("--mode", default="verification", type=click.Choice(["verification", "decoding"]))
@click.option("--csv", "csv_path", default=None)
def sweep(experiment_json, axis, grid, mode, csv_path):
    """Run one experiment per grid value along an axis."""
    try:
        values = [float(v) for v in grid.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"bad grid {grid!r}") from None
    cfg = _experiment(experiment_json)
    reports = harness.sweep(cfg, axis, values, mode=mode)
    _report_out(reports, csv_path)
    _emit({"axis": axis, "grid": values, "reports": [r.to_dict() for r in reports]})


@cli.command()
@click.argument("image")
@click.option("--stage", default="contrast", type=click.Choice(percept.STAGES))
@click.option("--out", default=None, help="CSV path; stdout when omitted.")
def mask(image, stage, out):
    """Watson masks of a PGM image as (k, i, j, m) CSV rows."""
    text = percept.watson_mask(percept.block_dct(io.read_pgm(image)), stage).to_csv()
    if out is None:
        click.echo(text, nl=False)
    else:
        with open(out, "w") as fh:
            fh.write(text)


@cli.command()
@click.argument("image")
@click.option("--ac-index", default=1, show_default=True)
@click.option("--out", default="-")
def dct(image, ac_index, out):
    """Coefficients of one zigzag band, one per block."""
    values = _image_coefficients(image, ac_index)[1]
    io.write_vector(sys.stdout if out == "-" else out, values)


@cli.command()
@click.argument("a")
@click.argument("b")
def psnr(a, b):
    """PSNR in dB between two PGM images."""
    _emit({"psnr_db": percept.psnr(io.read_pgm(a), io.read_pgm(b))})


def main(argv=None):
    try:
        cli.main(args=argv, prog_name="wmlab", standalone_mode=False)
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except click.UsageError as exc:
        exc.show()
        return 2
    except WmlabError as exc:
        click.echo(f"error: {exc}", err=True)
        return exc.exit_code
    except (ValueError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    return 0


def entry():
    sys.exit(main())
