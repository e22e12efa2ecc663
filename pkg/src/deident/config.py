"""Pipeline configuration files.

A config is a JSON object; every key is optional and an empty object (or an
empty file) means "all defaults". Unknown keys are rejected rather than
ignored so typos fail loudly instead of silently running with defaults.
"""

from __future__ import annotations

import json
from pathlib import Path

from .backends import BackendDescriptor, BackendKind
from .background_engine import UpdateMode, UpdatePolicy
from .errors import ConfigError, StorageError
from .pipeline import PipelineConfig
from .skeleton import RenderStyle


def _check_keys(doc: dict, allowed: set[str], where: str) -> None:
    for key in doc:
        if key not in allowed:
            raise ConfigError(f"{where}.{key}: unknown field")


def _get_int(doc: dict, key: str, default: int, where: str) -> int:
    value = doc.get(key, default)
    if not isinstance(value, int) or isinstance(value, bool):
        raise ConfigError(f"{where}.{key}: expected an integer")
    return value


def _get_number(doc: dict, key: str, default: float, where: str) -> float:
    value = doc.get(key, default)
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ConfigError(f"{where}.{key}: expected a number")
    return float(value)


def _get_bool(doc: dict, key: str, default: bool, where: str) -> bool:
    value = doc.get(key, default)
    if not isinstance(value, bool):
        raise ConfigError(f"{where}.{key}: expected true or false")
    return value


def _get_color(doc: dict, key: str, default, where: str):
    value = doc.get(key)
    if value is None:
        return default
    if (not isinstance(value, list) or len(value) != 3
            or not all(isinstance(v, int) and not isinstance(v, bool) and 0 <= v <= 255
                       for v in value)):
        raise ConfigError(f"{where}.{key}: expected [r, g, b] with values in 0..255")
    return tuple(value)


def _get_enum(doc: dict, key: str, enum_cls, default, where: str):
    value = doc.get(key)
    if value is None:
        return default
    if not isinstance(value, str):
        raise ConfigError(f"{where}.{key}: expected a string")
    try:
        return enum_cls(value)
    except ValueError:
        options = ", ".join(m.value for m in enum_cls)
        raise ConfigError(
            f"{where}.{key}: expected one of {options}, got {value!r}"
        ) from None


def _policy_from_json(doc, where: str) -> UpdatePolicy:
    if not isinstance(doc, dict):
        raise ConfigError(f"{where}: expected an object")
    _check_keys(doc, {"mode", "min_update_frames", "finish_threshold",
                      "post_completion_blend_weight", "post_completion_patience"}, where)
    defaults = UpdatePolicy()
    try:
        return UpdatePolicy(
            mode=_get_enum(doc, "mode", UpdateMode, defaults.mode, where),
            min_update_frames=_get_int(doc, "min_update_frames",
                                       defaults.min_update_frames, where),
            finish_threshold=_get_number(doc, "finish_threshold",
                                         defaults.finish_threshold, where),
            post_completion_blend_weight=_get_number(
                doc, "post_completion_blend_weight",
                defaults.post_completion_blend_weight, where),
            post_completion_patience=_get_int(
                doc, "post_completion_patience",
                defaults.post_completion_patience, where),
        )
    except ValueError as exc:
        raise ConfigError(f"{where}.{exc}") from None


def _style_from_json(doc, where: str) -> RenderStyle:
    if not isinstance(doc, dict):
        raise ConfigError(f"{where}: expected an object")
    _check_keys(doc, {"joint_radius", "line_thickness", "joint_color",
                      "bone_color", "min_visibility"}, where)
    defaults = RenderStyle()
    try:
        return RenderStyle(
            joint_radius=_get_int(doc, "joint_radius", defaults.joint_radius, where),
            line_thickness=_get_int(doc, "line_thickness", defaults.line_thickness, where),
            joint_color=_get_color(doc, "joint_color", defaults.joint_color, where),
            bone_color=_get_color(doc, "bone_color", defaults.bone_color, where),
            min_visibility=_get_number(doc, "min_visibility",
                                       defaults.min_visibility, where),
        )
    except ValueError as exc:
        raise ConfigError(f"{where}.{exc}") from None


def _backend_from_json(doc, where: str) -> BackendDescriptor:
    if not isinstance(doc, dict):
        raise ConfigError(f"{where}: expected an object")
    _check_keys(doc, {"kind", "parameters"}, where)
    kind = _get_enum(doc, "kind", BackendKind, None, where)
    if kind is None:
        raise ConfigError(f"{where}.kind: required")
    parameters = doc.get("parameters", {})
    if not isinstance(parameters, dict):
        raise ConfigError(f"{where}.parameters: expected an object")
    return BackendDescriptor(kind=kind, parameters=parameters)


def config_from_json(doc) -> PipelineConfig:
    """Build a PipelineConfig from a parsed JSON document."""
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigError("config: expected a JSON object")
    _check_keys(doc, {"sample_interval", "emit_before_complete",
                      "policy", "style", "backend"}, "config")
    defaults = PipelineConfig()
    policy = (_policy_from_json(doc["policy"], "config.policy")
              if "policy" in doc else defaults.policy)
    style = (_style_from_json(doc["style"], "config.style")
             if "style" in doc else defaults.style)
    backend = (_backend_from_json(doc["backend"], "config.backend")
               if "backend" in doc else None)
    try:
        return PipelineConfig(
            sample_interval=_get_int(doc, "sample_interval",
                                     defaults.sample_interval, "config"),
            emit_before_complete=_get_bool(doc, "emit_before_complete",
                                           defaults.emit_before_complete, "config"),
            policy=policy,
            style=style,
            backend=backend,
        )
    except ValueError as exc:
        raise ConfigError(f"config.{exc}") from None


def load_config(path) -> PipelineConfig:
    """Read a JSON config file; an empty file yields all defaults."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise StorageError(f"cannot read config file {path}: {exc}") from exc
    if not text.strip():
        return PipelineConfig()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    return config_from_json(doc)
