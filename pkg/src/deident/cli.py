"""Command-line interface.

Subcommands: anonymize (frames in, anonymized frames out),
extract-background (frames in, background export out), generate-scene
(scene spec JSON in, synthetic stream with ground truth out), and evaluate
(score an anonymized stream against ground truth).

Exit codes classify failures: 2 configuration, 3 file I/O, 4 perception
backend, 5 stream structure. The DEIDENT_LOG environment variable sets the
log level (DEBUG, INFO, WARNING, ERROR).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from pathlib import Path

from . import storage, synth
from .backends import (
    DEFAULT_DIFF_THRESHOLD,
    BackendDescriptor,
    BackendKind,
    make_provider,
)
from .config import load_config
from .errors import ConfigError, DeidentError, StorageError, StreamError
from .frame_model import Frame
from .pipeline import PipelineConfig, extract_background, process_stream

log = logging.getLogger("deident")

_BACKEND_CHOICES = {
    "oracle": BackendKind.ORACLE_FILES,
    "naive-diff": BackendKind.NAIVE_DIFF,
    "external": BackendKind.EXTERNAL_PROCESS,
}

TRUTH_DIR = "truth"
ORACLE_DIR = "gt"
SCENE_SPEC_NAME = "scene.json"
TRUTH_BACKGROUND_NAME = "background.png"


def _add_backend_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="FILE", help="pipeline config JSON")
    parser.add_argument("--backend", choices=sorted(_BACKEND_CHOICES),
                        help="perception backend (overrides config)")
    parser.add_argument("--sidecars", metavar="DIR",
                        help="annotation directory for --backend oracle")
    parser.add_argument("--threshold", type=int, metavar="N",
                        help="pixel delta threshold for --backend naive-diff "
                             f"(default {DEFAULT_DIFF_THRESHOLD})")
    parser.add_argument("--command", metavar="CMD",
                        help="subprocess command line for --backend external")
    parser.add_argument("--interval", type=int, metavar="N",
                        help="background update sampling interval (overrides config)")
    parser.add_argument("--reinit-at", type=int, action="append", default=[],
                        metavar="FRAME", help="restart background accumulation at this "
                        "frame index (repeatable, for camera moves)")


def _descriptor_from_flags(args) -> BackendDescriptor | None:
    if args.backend is None:
        return None
    kind = _BACKEND_CHOICES[args.backend]
    if kind is BackendKind.ORACLE_FILES:
        if not args.sidecars:
            raise ConfigError("backend: --sidecars is required with --backend oracle")
        parameters = {"sidecar_dir": args.sidecars}
    elif kind is BackendKind.NAIVE_DIFF:
        threshold = args.threshold if args.threshold is not None else DEFAULT_DIFF_THRESHOLD
        parameters = {"threshold": threshold}
    else:
        if not args.command:
            raise ConfigError("backend: --command is required with --backend external")
        parameters = {"command": args.command}
    return BackendDescriptor(kind=kind, parameters=parameters)


def _resolve_config(args) -> PipelineConfig:
    cfg = load_config(args.config) if args.config else PipelineConfig()
    updates = {}
    if args.interval is not None:
        updates["sample_interval"] = args.interval
    if getattr(args, "batch", False):
        updates["emit_before_complete"] = False
    descriptor = _descriptor_from_flags(args)
    if descriptor is not None:
        updates["backend"] = descriptor
    elif cfg.backend is None:
        raise ConfigError("backend: pick one with --backend or the config file")
    if updates:
        cfg = dataclasses.replace(cfg, **updates)
    return cfg


def _cmd_anonymize(args) -> int:
    cfg = _resolve_config(args)
    provider = make_provider(cfg.backend)
    try:
        outputs = process_stream(storage.iter_stream(args.input), cfg, provider,
                                 reinit_at=args.reinit_at)
        manifest = storage.write_stream(args.out, outputs)
    finally:
        provider.close()
    log.info("anonymize: %d frames at %dx%d -> %s",
             manifest.frames, manifest.width, manifest.height, args.out)
    print(f"wrote {manifest.frames} anonymized frames to {args.out}")
    return 0


def _cmd_extract_background(args) -> int:
    cfg = _resolve_config(args)
    provider = make_provider(cfg.backend)
    try:
        bg = extract_background(storage.iter_stream(args.input), cfg, provider,
                                reinit_at=args.reinit_at)
    finally:
        provider.close()
    storage.write_background(args.out, bg)
    rate = float(bg.unset.mean())
    log.info("extract-background: empty rate %.6f -> %s", rate, args.out)
    print(f"wrote background to {args.out} (uncommitted fraction {rate:.6f})")
    return 0


def _cmd_generate_scene(args) -> int:
    spec_path = Path(args.spec)
    try:
        text = spec_path.read_text(encoding="utf-8")
    except OSError as exc:
        raise StorageError(f"cannot read scene spec {spec_path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"scene spec {spec_path} is not valid JSON: {exc}") from exc
    spec = synth.scene_spec_from_json(doc)
    scene = synth.generate(spec)

    out = Path(args.out)
    storage.write_stream(out, scene.frames)
    oracle_dir = out / ORACLE_DIR
    truth_dir = out / TRUTH_DIR
    oracle_dir.mkdir(parents=True, exist_ok=True)
    truth_dir.mkdir(parents=True, exist_ok=True)
    for i in range(spec.frames):
        storage.write_sidecar(oracle_dir / storage.SIDECAR_NAME.format(i), i,
                              scene.observed_masks[i], scene.keypoints[i])
        storage.write_sidecar(truth_dir / storage.SIDECAR_NAME.format(i), i,
                              scene.truth_masks[i], scene.keypoints[i])
    storage.save_frame_png(truth_dir / TRUTH_BACKGROUND_NAME,
                           Frame(scene.background, index=0))
    (out / SCENE_SPEC_NAME).write_text(
        json.dumps(synth.scene_spec_to_json(spec), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    log.info("generate-scene: %d frames at %dx%d -> %s",
             spec.frames, spec.width, spec.height, out)
    print(f"wrote scene ({spec.frames} frames, observed masks in {oracle_dir}, "
          f"ground truth in {truth_dir})")
    return 0


def _iter_truth_masks(truth_dir: Path, count: int):
    for i in range(count):
        path = truth_dir / storage.SIDECAR_NAME.format(i)
        _, mask, _ = storage.read_sidecar(path)
        yield mask


def _cmd_evaluate(args) -> int:
    in_manifest = storage.read_manifest(args.input)
    out_manifest = storage.read_manifest(args.anonymized)
    truth_dir = Path(args.truth)
    bg_path = truth_dir / TRUTH_BACKGROUND_NAME
    if not bg_path.is_file():
        raise StorageError(f"ground-truth background not found: {bg_path}")
    truth_bg = storage.load_frame_png(bg_path).pixels

    report = {
        "frames": out_manifest.frames,
        "width": out_manifest.width,
        "height": out_manifest.height,
        "fps": [out_manifest.fps_num, out_manifest.fps_den],
        "frame_count_matches": out_manifest.frames == in_manifest.frames,
        "resolution_matches": (out_manifest.width, out_manifest.height)
                              == (in_manifest.width, in_manifest.height),
        "fps_matches": out_manifest.fps == in_manifest.fps,
    }
    try:
        report["leakage"] = synth.leakage(
            storage.iter_stream(args.anonymized),
            _iter_truth_masks(truth_dir, in_manifest.frames),
            storage.iter_stream(args.input),
            truth_bg,
        )
    except ValueError as exc:
        raise StreamError(str(exc)) from exc

    if args.background:
        rgb, unset, _ = storage.read_background(args.background)
        report["background"] = {
            "psnr_db": synth.psnr(rgb, truth_bg, exclude=unset) if not unset.all() else None,
            "uncommitted_fraction": float(unset.mean()),
        }

    text = json.dumps(report, indent=2, sort_keys=True)
    Path(args.out).write_text(text + "\n", encoding="utf-8")
    print(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="deident",
        description="Remove people from stationary-camera footage and overlay "
                    "anonymized stickman skeletons.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("anonymize", help="replace people with background + skeletons")
    p.add_argument("--input", required=True, metavar="DIR", help="input stream directory")
    p.add_argument("--out", required=True, metavar="DIR", help="output stream directory")
    p.add_argument("--batch", action="store_true",
                   help="consume the whole stream first, then composite every frame "
                        "against the final background")
    _add_backend_flags(p)
    p.set_defaults(func=_cmd_anonymize)

    p = sub.add_parser("extract-background", help="accumulate and export the background")
    p.add_argument("--input", required=True, metavar="DIR", help="input stream directory")
    p.add_argument("--out", required=True, metavar="DIR", help="background export directory")
    _add_backend_flags(p)
    p.set_defaults(func=_cmd_extract_background)

    p = sub.add_parser("generate-scene", help="render a synthetic scene with ground truth")
    p.add_argument("--spec", required=True, metavar="FILE", help="scene spec JSON")
    p.add_argument("--out", required=True, metavar="DIR", help="scene output directory")
    p.set_defaults(func=_cmd_generate_scene)

    p = sub.add_parser("evaluate", help="score an anonymized stream against ground truth")
    p.add_argument("--input", required=True, metavar="DIR", help="original stream directory")
    p.add_argument("--anonymized", required=True, metavar="DIR",
                   help="anonymized stream directory")
    p.add_argument("--truth", required=True, metavar="DIR",
                   help="ground-truth directory (sidecars + background.png)")
    p.add_argument("--background", metavar="DIR",
                   help="extracted background export to score against the truth")
    p.add_argument("--out", required=True, metavar="FILE", help="metrics report JSON")
    p.set_defaults(func=_cmd_evaluate)
    return parser


def _setup_logging() -> None:
    level_name = os.environ.get("DEIDENT_LOG", "WARNING").upper()
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def run(argv) -> int:
    """Parse argv and execute; returns the process exit code."""
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except DeidentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        log.debug("failure detail", exc_info=True)
        return exc.exit_code


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
