"""Config file loading: defaults, strict schema, nested sections."""

import json

import pytest

from deident import (
    BackendKind,
    ConfigError,
    StorageError,
    UpdateMode,
    config_from_json,
    load_config,
)


def write_config(tmp_path, doc) -> str:
    path = tmp_path / "config.json"
    path.write_text(json.dumps(doc) if not isinstance(doc, str) else doc)
    return str(path)


class TestDefaults:
    def test_empty_file_gives_documented_defaults(self, tmp_path):
        cfg = load_config(write_config(tmp_path, ""))
        assert cfg.sample_interval == 15
        assert cfg.policy.min_update_frames == 3
        assert cfg.policy.finish_threshold == 0.01
        assert cfg.policy.post_completion_patience == 3
        assert cfg.policy.post_completion_blend_weight == 0.3
        assert cfg.policy.mode is UpdateMode.MULTI_FRAME
        assert cfg.emit_before_complete is True
        assert cfg.backend is None

    def test_empty_object_same_as_empty_file(self, tmp_path):
        assert load_config(write_config(tmp_path, {})) == load_config(
            write_config(tmp_path, ""))

    def test_missing_file_is_storage_error(self, tmp_path):
        with pytest.raises(StorageError):
            load_config(tmp_path / "absent.json")

    def test_invalid_json_is_config_error(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(write_config(tmp_path, "{broken"))


class TestStrictSchema:
    def test_unknown_top_level_key_named(self):
        with pytest.raises(ConfigError, match="config.sampel_interval"):
            config_from_json({"sampel_interval": 15})

    def test_unknown_policy_key_named(self):
        with pytest.raises(ConfigError, match="config.policy.windw"):
            config_from_json({"policy": {"windw": 3}})

    def test_wrong_types_rejected(self):
        with pytest.raises(ConfigError):
            config_from_json({"sample_interval": "often"})
        with pytest.raises(ConfigError):
            config_from_json({"emit_before_complete": 1})
        with pytest.raises(ConfigError):
            config_from_json({"policy": []})


class TestPolicySection:
    def test_values_applied(self):
        cfg = config_from_json({
            "sample_interval": 5,
            "policy": {
                "mode": "single_frame",
                "finish_threshold": 0.05,
                "post_completion_blend_weight": 0.5,
                "post_completion_patience": 1,
            },
        })
        assert cfg.sample_interval == 5
        assert cfg.policy.mode is UpdateMode.SINGLE_FRAME
        assert cfg.policy.min_update_frames == 1
        assert cfg.policy.finish_threshold == 0.05

    def test_finish_threshold_zero_rejected(self):
        with pytest.raises(ConfigError, match="finish_threshold"):
            config_from_json({"policy": {"finish_threshold": 0}})

    def test_window_of_one_in_multi_frame_rejected(self):
        with pytest.raises(ConfigError, match="min_update_frames"):
            config_from_json({"policy": {"min_update_frames": 1}})

    def test_bad_mode_lists_options(self):
        with pytest.raises(ConfigError, match="single_frame, multi_frame"):
            config_from_json({"policy": {"mode": "turbo"}})

    def test_interval_below_one_rejected(self):
        with pytest.raises(ConfigError, match="sample_interval"):
            config_from_json({"sample_interval": 0})


class TestStyleSection:
    def test_values_applied(self):
        cfg = config_from_json({"style": {
            "joint_radius": 5,
            "line_thickness": 1,
            "joint_color": [10, 20, 30],
            "bone_color": [0, 0, 255],
            "min_visibility": 0.25,
        }})
        assert cfg.style.joint_radius == 5
        assert cfg.style.joint_color == (10, 20, 30)
        assert cfg.style.bone_color == (0, 0, 255)

    def test_bad_color_rejected(self):
        with pytest.raises(ConfigError, match="joint_color"):
            config_from_json({"style": {"joint_color": [0, 0, 300]}})

    def test_zero_radius_rejected(self):
        with pytest.raises(ConfigError, match="joint_radius"):
            config_from_json({"style": {"joint_radius": 0}})


class TestBackendSection:
    def test_oracle_backend_parsed(self):
        cfg = config_from_json({"backend": {
            "kind": "oracle_files",
            "parameters": {"sidecar_dir": "annotations/"},
        }})
        assert cfg.backend.kind is BackendKind.ORACLE_FILES
        assert cfg.backend.parameters["sidecar_dir"] == "annotations/"

    def test_kind_required(self):
        with pytest.raises(ConfigError, match="config.backend.kind"):
            config_from_json({"backend": {"parameters": {}}})

    def test_missing_required_parameter(self):
        with pytest.raises(ConfigError, match="sidecar_dir"):
            config_from_json({"backend": {"kind": "oracle_files"}})

    def test_unknown_kind_lists_options(self):
        with pytest.raises(ConfigError, match="oracle_files, naive_diff, external_process"):
            config_from_json({"backend": {"kind": "magic"}})
