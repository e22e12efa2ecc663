"""End-to-end anonymization: sample, perceive, accumulate, render, composite.

Pose runs on every frame; the background engine is stepped only on sampled
indices. Every input frame produces exactly one output frame at the input's
resolution and nominal rate. UNSET background cells composite as black, so a
person who never moves leaves a black silhouette under the skeleton.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator

from .backends import BackendDescriptor, PerceptionProvider, make_provider
from .background_engine import BackgroundEngine, UpdatePolicy
from .errors import ConfigError, StreamError
from .frame_model import Background, Frame, KeypointSet, SkeletonTopology
from .skeleton import DEFAULT_TOPOLOGY, RenderStyle, render_skeleton

DEFAULT_SAMPLE_INTERVAL = 15


@dataclass(frozen=True)
class PipelineConfig:
    """Every tunable of a run in one validated record."""

    sample_interval: int = DEFAULT_SAMPLE_INTERVAL
    policy: UpdatePolicy = field(default_factory=UpdatePolicy)
    style: RenderStyle = field(default_factory=RenderStyle)
    topology: SkeletonTopology = DEFAULT_TOPOLOGY
    backend: BackendDescriptor | None = None
    emit_before_complete: bool = True

    def __post_init__(self):
        if self.sample_interval < 1:
            raise ConfigError(f"sample_interval: must be >= 1, got {self.sample_interval}")


def sample_indices(total_frames: int, interval: int) -> list[int]:
    """Frame indices used for background updates: every interval-th frame,
    always including the first."""
    if interval < 1:
        raise ValueError(f"interval must be >= 1, got {interval}")
    if total_frames < 0:
        raise ValueError(f"total_frames must be >= 0, got {total_frames}")
    return list(range(0, total_frames, interval))


def composite(
    background: Background,
    keypoints: Iterable[KeypointSet],
    topology: SkeletonTopology = DEFAULT_TOPOLOGY,
    style: RenderStyle = RenderStyle(),
    *,
    index: int = 0,
    fps: Fraction = Fraction(30, 1),
) -> Frame:
    """Anonymized frame: background (UNSET cells black) under the stickmen."""
    canvas = background.as_rgb()
    render_skeleton(canvas, tuple(keypoints), topology, style)
    return Frame(canvas, index=index, fps=fps)


def process_stream(
    frames: Iterable[Frame],
    config: PipelineConfig,
    provider: PerceptionProvider | None = None,
    *,
    reinit_at: Iterable[int] = (),
) -> Iterator[Frame]:
    """Anonymize an ordered frame stream.

    Yields one output frame per input frame, in order, at the input
    resolution and fps. With emit_before_complete, outputs are composited
    against the background as it stands at each frame; otherwise all input
    is consumed first and every skeleton is drawn over the final background.
    reinit_at lists frame indices where the camera moved and the background
    must restart from scratch.

    Raises StreamError if the resolution changes mid-stream (the update rule
    only holds for stationary cameras) or frames arrive out of order.
    """
    if provider is None:
        if config.backend is None:
            raise ConfigError("backend: no provider given and none configured")
        provider = make_provider(config.backend)
    reinit_set = {int(i) for i in reinit_at}
    engine: BackgroundEngine | None = None
    width = height = 0
    fps = Fraction(30, 1)
    deferred: list[tuple[int, tuple[KeypointSet, ...]]] = []

    for position, frame in enumerate(frames):
        if frame.index != position:
            raise StreamError(
                f"frame at position {position} carries index {frame.index}; "
                "streams must be contiguous and ordered"
            )
        if engine is None:
            width, height, fps = frame.width, frame.height, frame.fps
            engine = BackgroundEngine(width, height, config.policy)
        elif (frame.width, frame.height) != (width, height):
            raise StreamError(
                f"resolution changed from {width}x{height} to "
                f"{frame.width}x{frame.height} at frame {position}: the background "
                "update rule requires a stationary camera; reinitialize instead"
            )
        if position in reinit_set:
            engine.reinitialize()
        perception = provider.perceive(frame)
        if position % config.sample_interval == 0:
            engine.step(frame, perception)
        if config.emit_before_complete:
            yield composite(
                engine.background, perception.keypoints, config.topology, config.style,
                index=position, fps=fps,
            )
        else:
            deferred.append((position, perception.keypoints))

    if engine is None:
        return
    if not config.emit_before_complete:
        final = engine.snapshot()
        for position, keypoints in deferred:
            yield composite(
                final, keypoints, config.topology, config.style, index=position, fps=fps
            )


def extract_background(
    frames: Iterable[Frame],
    config: PipelineConfig,
    provider: PerceptionProvider | None = None,
    *,
    reinit_at: Iterable[int] = (),
) -> Background:
    """Run only the accumulation half of the pipeline and return the final
    background (UNSET cells included). Same stream rules as process_stream."""
    if provider is None:
        if config.backend is None:
            raise ConfigError("backend: no provider given and none configured")
        provider = make_provider(config.backend)
    reinit_set = {int(i) for i in reinit_at}
    engine: BackgroundEngine | None = None
    width = height = 0

    for position, frame in enumerate(frames):
        if frame.index != position:
            raise StreamError(
                f"frame at position {position} carries index {frame.index}; "
                "streams must be contiguous and ordered"
            )
        if engine is None:
            width, height = frame.width, frame.height
            engine = BackgroundEngine(width, height, config.policy)
        elif (frame.width, frame.height) != (width, height):
            raise StreamError(
                f"resolution changed from {width}x{height} to "
                f"{frame.width}x{frame.height} at frame {position}: the background "
                "update rule requires a stationary camera; reinitialize instead"
            )
        if position in reinit_set:
            engine.reinitialize()
        # Perceive every frame even though only sampled ones advance the
        # engine: differencing backends track the previous frame, so skipping
        # calls would change their masks relative to process_stream.
        perception = provider.perceive(frame)
        if position % config.sample_interval == 0:
            engine.step(frame, perception)

    if engine is None:
        raise StreamError("empty stream: no frames to extract a background from")
    return engine.snapshot()
