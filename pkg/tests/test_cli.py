"""Command-line behavior: subcommands, exit codes, reproducibility."""

import hashlib
import json
import shlex
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from deident import ActorShape, BackgroundKind
from deident.cli import run
from deident.storage import iter_stream, read_background, read_manifest
from conftest import STUB


SPEC = {
    "width": 40, "height": 30, "frames": 24,
    "background": {"kind": "checker"},
    "actors": [
        {"shape": "rect", "size": 8,
         "trajectory": {"kind": "linear", "start": [4, 15], "velocity": [1.5, 0]},
         "color": [210, 50, 50]},
        {"shape": "stick_figure", "size": 20,
         "trajectory": {"kind": "stationary", "pos": [30, 15]},
         "color": [40, 180, 40]},
    ],
}


def write_spec(tmp_path, doc=SPEC) -> Path:
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(doc))
    return path


def generate_scene(tmp_path) -> Path:
    scene = tmp_path / "scene"
    assert run(["generate-scene", "--spec", str(write_spec(tmp_path)),
                "--out", str(scene)]) == 0
    return scene


def dir_digest(directory: Path) -> str:
    blob = hashlib.sha256()
    for path in sorted(directory.rglob("*")):
        if path.is_file():
            blob.update(path.name.encode())
            blob.update(path.read_bytes())
    return blob.hexdigest()


class TestGenerateScene:
    def test_writes_stream_truth_and_spec_copy(self, tmp_path):
        scene = generate_scene(tmp_path)
        manifest = read_manifest(scene)
        assert (manifest.width, manifest.height, manifest.frames) == (40, 30, 24)
        assert (scene / "gt" / "frame_000000.json").is_file()
        assert (scene / "truth" / "frame_000023.json").is_file()
        assert (scene / "truth" / "background.png").is_file()
        assert json.loads((scene / "scene.json").read_text())["width"] == 40

    def test_reproducible(self, tmp_path):
        spec = write_spec(tmp_path)
        for name in ("a", "b"):
            assert run(["generate-scene", "--spec", str(spec),
                        "--out", str(tmp_path / name)]) == 0
        assert dir_digest(tmp_path / "a") == dir_digest(tmp_path / "b")

    def test_bad_spec_is_config_error(self, tmp_path):
        path = tmp_path / "spec.json"
        path.write_text(json.dumps({"width": 4}))
        assert run(["generate-scene", "--spec", str(path),
                    "--out", str(tmp_path / "x")]) == 2

    def test_missing_spec_is_storage_error(self, tmp_path):
        assert run(["generate-scene", "--spec", str(tmp_path / "none.json"),
                    "--out", str(tmp_path / "x")]) == 3


class TestAnonymize:
    def test_happy_path_oracle_backend(self, tmp_path, capsys):
        scene = generate_scene(tmp_path)
        out = tmp_path / "out"
        code = run(["anonymize", "--input", str(scene), "--backend", "oracle",
                    "--sidecars", str(scene / "gt"), "--out", str(out),
                    "--interval", "4"])
        assert code == 0
        assert "24" in capsys.readouterr().out
        manifest = read_manifest(out)
        assert manifest == read_manifest(scene)
        assert len(list(iter_stream(out))) == 24

    def test_missing_sidecar_directory_exit_4(self, tmp_path):
        scene = generate_scene(tmp_path)
        assert run(["anonymize", "--input", str(scene), "--backend", "oracle",
                    "--sidecars", str(tmp_path / "nope"),
                    "--out", str(tmp_path / "out")]) == 4

    def test_missing_input_exit_3(self, tmp_path):
        assert run(["anonymize", "--input", str(tmp_path / "void"),
                    "--backend", "naive-diff",
                    "--out", str(tmp_path / "out")]) == 3

    def test_no_backend_exit_2(self, tmp_path):
        scene = generate_scene(tmp_path)
        assert run(["anonymize", "--input", str(scene),
                    "--out", str(tmp_path / "out")]) == 2

    def test_unknown_config_key_exit_2(self, tmp_path):
        scene = generate_scene(tmp_path)
        cfg = tmp_path / "cfg.json"
        cfg.write_text('{"speling": 1}')
        assert run(["anonymize", "--input", str(scene), "--backend", "naive-diff",
                    "--config", str(cfg), "--out", str(tmp_path / "out")]) == 2

    def test_oracle_requires_sidecars_flag(self, tmp_path):
        scene = generate_scene(tmp_path)
        assert run(["anonymize", "--input", str(scene), "--backend", "oracle",
                    "--out", str(tmp_path / "out")]) == 2

    def test_runs_are_bit_identical(self, tmp_path):
        scene = generate_scene(tmp_path)
        args = ["--input", str(scene), "--backend", "oracle",
                "--sidecars", str(scene / "gt"), "--interval", "4"]
        assert run(["anonymize", *args, "--out", str(tmp_path / "o1")]) == 0
        assert run(["anonymize", *args, "--out", str(tmp_path / "o2")]) == 0
        assert dir_digest(tmp_path / "o1") == dir_digest(tmp_path / "o2")

    def test_naive_diff_backend_runs(self, tmp_path):
        scene = generate_scene(tmp_path)
        assert run(["anonymize", "--input", str(scene), "--backend", "naive-diff",
                    "--threshold", "30", "--out", str(tmp_path / "out")]) == 0

    def test_external_backend_runs(self, tmp_path):
        scene = generate_scene(tmp_path)
        command = " ".join(shlex.quote(p) for p in STUB)
        assert run(["anonymize", "--input", str(scene), "--backend", "external",
                    "--command", command, "--out", str(tmp_path / "out")]) == 0
        assert len(list(iter_stream(tmp_path / "out"))) == 24

    def test_batch_flag(self, tmp_path):
        scene = generate_scene(tmp_path)
        out = tmp_path / "out"
        assert run(["anonymize", "--input", str(scene), "--backend", "oracle",
                    "--sidecars", str(scene / "gt"), "--interval", "4",
                    "--batch", "--out", str(out)]) == 0
        assert len(list(iter_stream(out))) == 24

    def test_config_file_backend_used_without_flags(self, tmp_path):
        scene = generate_scene(tmp_path)
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "sample_interval": 4,
            "backend": {"kind": "oracle_files",
                        "parameters": {"sidecar_dir": str(scene / "gt")}},
        }))
        assert run(["anonymize", "--input", str(scene), "--config", str(cfg),
                    "--out", str(tmp_path / "out")]) == 0


class TestExtractBackground:
    def test_writes_export(self, tmp_path):
        scene = generate_scene(tmp_path)
        out = tmp_path / "bg"
        assert run(["extract-background", "--input", str(scene),
                    "--backend", "oracle", "--sidecars", str(scene / "gt"),
                    "--interval", "2", "--out", str(out)]) == 0
        rgb, unset, generation = read_background(out)
        assert rgb.shape == (30, 40, 3)
        assert generation == 0

    def test_reinit_at_bumps_generation(self, tmp_path):
        scene = generate_scene(tmp_path)
        out = tmp_path / "bg"
        assert run(["extract-background", "--input", str(scene),
                    "--backend", "oracle", "--sidecars", str(scene / "gt"),
                    "--interval", "2", "--reinit-at", "12",
                    "--out", str(out)]) == 0
        _, _, generation = read_background(out)
        assert generation == 1


class TestEvaluate:
    def test_moving_scene_reports_zero_leakage(self, tmp_path):
        spec = dict(SPEC)
        spec["actors"] = [SPEC["actors"][0]]  # moving rect only
        scene = tmp_path / "scene"
        assert run(["generate-scene", "--spec", str(write_spec(tmp_path, spec)),
                    "--out", str(scene)]) == 0
        out = tmp_path / "out"
        assert run(["anonymize", "--input", str(scene), "--backend", "oracle",
                    "--sidecars", str(scene / "gt"), "--interval", "2",
                    "--batch", "--out", str(out)]) == 0
        bg = tmp_path / "bg"
        assert run(["extract-background", "--input", str(scene),
                    "--backend", "oracle", "--sidecars", str(scene / "gt"),
                    "--interval", "2", "--out", str(bg)]) == 0
        report_path = tmp_path / "eval.json"
        assert run(["evaluate", "--input", str(scene), "--anonymized", str(out),
                    "--truth", str(scene / "truth"), "--background", str(bg),
                    "--out", str(report_path)]) == 0
        report = json.loads(report_path.read_text())
        assert report["leakage"] == 0.0
        assert report["frame_count_matches"] is True
        assert report["resolution_matches"] is True
        assert report["fps_matches"] is True
        assert report["background"]["psnr_db"] is None or \
            report["background"]["psnr_db"] > 30

    def test_missing_truth_background_exit_3(self, tmp_path):
        scene = generate_scene(tmp_path)
        out = tmp_path / "out"
        assert run(["anonymize", "--input", str(scene), "--backend", "oracle",
                    "--sidecars", str(scene / "gt"), "--out", str(out)]) == 0
        assert run(["evaluate", "--input", str(scene), "--anonymized", str(out),
                    "--truth", str(tmp_path / "void"),
                    "--out", str(tmp_path / "eval.json")]) == 3


class TestEntryPoint:
    def test_console_script_help(self):
        proc = subprocess.run([sys.executable, "-m", "deident.cli", "--help"],
                              capture_output=True, text=True)
        assert proc.returncode == 0
        for name in ("anonymize", "extract-background", "generate-scene", "evaluate"):
            assert name in proc.stdout

    def test_module_entry_misuse_exits_nonzero(self):
        proc = subprocess.run([sys.executable, "-m", "deident.cli", "frobnicate"],
                              capture_output=True, text=True)
        assert proc.returncode == 2
