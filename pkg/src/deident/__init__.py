"""Streaming full-body video de-identification.

People are erased from stationary-camera footage by accumulating a
human-free background over time from segmentation masks; anonymized
stickman skeletons rendered from pose keypoints are overlaid so position
and motion stay readable. Output streams keep the input's resolution,
frame count, and frame rate.
"""

from .backends import (
    DEFAULT_DIFF_THRESHOLD,
    BackendDescriptor,
    BackendKind,
    ExternalProcessBackend,
    NaiveDiffBackend,
    OracleFilesBackend,
    PerceptionProvider,
    PerceptionResult,
    make_provider,
    naive_diff_mask,
)
from .background_engine import (
    DEFAULT_BLEND_WEIGHT,
    DEFAULT_FINISH_THRESHOLD,
    DEFAULT_MIN_UPDATE_FRAMES,
    DEFAULT_PATIENCE,
    BackgroundEngine,
    Phase,
    StepReport,
    UpdateMode,
    UpdatePolicy,
    candidate_mask,
    shadow_blend,
)
from .config import config_from_json, load_config
from .errors import (
    BackendError,
    ConfigError,
    DeidentError,
    MissingAnnotationError,
    StorageError,
    StreamError,
)
from .frame_model import (
    KEYPOINT_COUNT,
    Background,
    Frame,
    HumanMask,
    KeypointSet,
    SkeletonTopology,
    empty_rate,
    new_background,
)
from .pipeline import (
    DEFAULT_SAMPLE_INTERVAL,
    PipelineConfig,
    composite,
    extract_background,
    process_stream,
    sample_indices,
)
from .skeleton import (
    DEFAULT_TOPOLOGY,
    LANDMARK_NAMES,
    RenderStyle,
    draw_disc,
    draw_segment,
    render_skeleton,
    to_pixel_coords,
)
from .synth import (
    ActorShape,
    ActorSpec,
    BackgroundKind,
    GeneratedScene,
    Linear,
    MaskNoise,
    SceneSpec,
    Stationary,
    Waypoints,
    generate,
    leakage,
    psnr,
    render_background,
    scene_spec_from_json,
    scene_spec_to_json,
)

__version__ = "0.1.0"

__all__ = [
    "BackendDescriptor", "BackendKind", "PerceptionProvider", "PerceptionResult",
    "OracleFilesBackend", "NaiveDiffBackend", "ExternalProcessBackend",
    "make_provider", "naive_diff_mask", "DEFAULT_DIFF_THRESHOLD",
    "BackgroundEngine", "UpdatePolicy", "UpdateMode", "Phase", "StepReport",
    "candidate_mask", "shadow_blend", "DEFAULT_MIN_UPDATE_FRAMES",
    "DEFAULT_FINISH_THRESHOLD", "DEFAULT_BLEND_WEIGHT", "DEFAULT_PATIENCE",
    "config_from_json", "load_config",
    "DeidentError", "ConfigError", "StorageError", "BackendError",
    "MissingAnnotationError", "StreamError",
    "Frame", "HumanMask", "KeypointSet", "SkeletonTopology", "Background",
    "new_background", "empty_rate", "KEYPOINT_COUNT",
    "PipelineConfig", "process_stream", "extract_background", "composite",
    "sample_indices", "DEFAULT_SAMPLE_INTERVAL",
    "RenderStyle", "render_skeleton", "draw_disc", "draw_segment",
    "to_pixel_coords", "DEFAULT_TOPOLOGY", "LANDMARK_NAMES",
    "SceneSpec", "ActorSpec", "ActorShape", "BackgroundKind", "MaskNoise",
    "Stationary", "Linear", "Waypoints", "GeneratedScene", "generate",
    "render_background", "psnr", "leakage",
    "scene_spec_from_json", "scene_spec_to_json",
    "__version__",
]
