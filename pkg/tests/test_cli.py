import json
import subprocess
import sys

import numpy as np
import pytest
from numpy.testing import assert_allclose

from wmlab import io, models
from wmlab.cli import main

from .conftest import CAMERA


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def write_json(path, data):
    path.write_text(json.dumps(data))
    return str(path)


class TestEstimateAndSample:
    def test_sample_then_estimate(self, tmp_path, capsys):
        model = write_json(tmp_path / "m.json", {"kind": "ggd", "c": 1.0, "sigma_x": 10.0})
        vec = tmp_path / "x.txt"
        code, _, _ = run(capsys, "sample", model, "--n", "20000", "--seed", "3", "--out", str(vec))
        assert code == 0
        assert io.read_vector(vec).shape == (20000,)
        code, out, _ = run(capsys, "estimate", str(vec))
        fit = json.loads(out)
        assert code == 0 and fit["kind"] == "ggd"
        assert abs(fit["c"] - 1.0) < 0.1

    def test_estimate_image(self, capsys):
        code, out, _ = run(capsys, "estimate", str(CAMERA), "--ac-index", "5")
        assert code == 0 and 0.2 < json.loads(out)["c"] < 1.0

    def test_non_convergence_exit_4(self, tmp_path, capsys):
        vec = tmp_path / "flat.txt"
        io.write_vector(vec, np.full(200, 2.0))
        code, _, err = run(capsys, "estimate", str(vec))
        assert code == 4 and "error" in err

    def test_bad_model_exit_2(self, tmp_path, capsys):
        model = write_json(tmp_path / "m.json", {"kind": "ggd", "c": -1.0, "sigma_x": 1.0})
        assert run(capsys, "sample", model)[0] == 2

    def test_missing_file_exit_2(self, tmp_path, capsys):
        assert run(capsys, "sample", str(tmp_path / "nope.json"))[0] == 2

    def test_usage_exit_2(self, capsys):
        assert run(capsys, "sweep")[0] == 2


class TestEmbedDetect:
    def test_vector_round_trip(self, tmp_path, capsys):
        x = models.sample(models.HostModel.ggd(2.0, 10.0), 1000, 1).values
        io.write_vector(tmp_path / "x.txt", x)
        cfg = write_json(tmp_path / "e.json", {
            "input": str(tmp_path / "x.txt"), "output": str(tmp_path / "s.txt"),
            "scheme": {"scheme": "ASS", "a": 1.0}, "watermark_seed": 4})
        code, out, _ = run(capsys, "embed", cfg)
        assert code == 0 and json.loads(out)["dt"] == pytest.approx(1.0)
        det = write_json(tmp_path / "d.json", {
            "input": str(tmp_path / "s.txt"), "detector": {"statistic": "correlator"},
            "psi": 0.5, "watermark_seed": 4})
        code, out, _ = run(capsys, "detect", det)
        res = json.loads(out)
        assert code == 0 and res["verdict"] == "H1"
        assert_allclose(np.abs(io.read_vector(tmp_path / "s.txt") - x), 1.0, rtol=1e-12)

    def test_image_embed_attack_psnr(self, tmp_path, capsys):
        cfg = write_json(tmp_path / "e.json", {
            "input": str(CAMERA), "output": str(tmp_path / "m.pgm"), "ac_index": 5,
            "scheme": {"scheme": "ASS_PERCEPTUAL", "a": 1.0}, "mask_stage": "luminance"})
        assert run(capsys, "embed", cfg)[0] == 0
        att = write_json(tmp_path / "a.json", {
            "input": str(tmp_path / "m.pgm"), "output": str(tmp_path / "j.pgm"),
            "attack": {"kind": "jpeg", "qf": 75}})
        assert run(capsys, "attack", att)[0] == 0
        code, out, _ = run(capsys, "psnr", str(CAMERA), str(tmp_path / "j.pgm"))
        assert code == 0 and 25 < json.loads(out)["psnr_db"] < 60

    def test_mask_and_dct(self, tmp_path, capsys):
        code, out, _ = run(capsys, "mask", str(CAMERA), "--stage", "frequency")
        assert code == 0 and out.startswith("k,i,j,m\n")
        assert len(out.splitlines()) == 1 + 64 * 4096
        code, _, _ = run(capsys, "dct", str(CAMERA), "--ac-index", "5",
                         "--out", str(tmp_path / "c.txt"))
        assert code == 0 and io.read_vector(tmp_path / "c.txt").shape == (4096,)


class TestSimulate:
    def experiment(self, tmp_path, **extra):
        data = {"scheme": {"scheme": "ASS", "a": 1.0}, "detector": {"statistic": "correlator"},
                "n": 100, "model": {"kind": "ggd", "c": 2.0, "sigma_x": 10.0},
                "trials": 2000, "pfa_grid": [0.01, 0.1], "master_seed": 1}
        data.update(extra)
        return write_json(tmp_path / "x.json", data)

    def test_report_and_csv(self, tmp_path, capsys):
        csv = tmp_path / "roc.csv"
        code, out, _ = run(capsys, "simulate", self.experiment(tmp_path), "--csv", str(csv))
        rep = json.loads(out)
        assert code == 0 and rep["config"]["n"] == 100 and len(rep["rows"]) == 2
        lines = csv.read_text().splitlines()
        assert lines[0] == "p_fa,p_m,provenance"
        assert {l.split(",")[2] for l in lines[1:]} == {"empirical", "theory"}

    def test_decoding(self, tmp_path, capsys):
        code, out, _ = run(capsys, "simulate", self.experiment(tmp_path), "--mode", "decoding")
        assert code == 0 and "p_e" in json.loads(out)["rows"][0]

    def test_sweep(self, tmp_path, capsys):
        code, out, _ = run(capsys, "sweep", self.experiment(tmp_path), "--axis", "N",
                           "--grid", "50,100")
        assert code == 0 and len(json.loads(out)["reports"]) == 2

    def test_inapplicable_axis_exit_2(self, tmp_path, capsys):
        assert run(capsys, "sweep", self.experiment(tmp_path), "--axis", "lambda",
                   "--grid", "0.5")[0] == 2

    def test_protocol_exit_3(self, tmp_path, capsys):
        data = {"scheme": {"scheme": "ASS", "a": 1.0}, "detector": {}, "n": 5000,
                "image": str(CAMERA), "ac_index": 5, "trials": 10}
        assert run(capsys, "simulate", write_json(tmp_path / "x.json", data))[0] == 3

    def test_console_script(self, tmp_path):
        proc = subprocess.run([sys.executable, "-c", "from wmlab.cli import entry; entry()",
                               "psnr", str(CAMERA), str(CAMERA)], capture_output=True, text=True)
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["psnr_db"] == float("inf")
        bad = subprocess.run([sys.executable, "-c", "from wmlab.cli import entry; entry()",
                              "psnr", str(CAMERA), str(tmp_path / "missing.pgm")],
                             capture_output=True, text=True)
        assert bad.returncode == 2
