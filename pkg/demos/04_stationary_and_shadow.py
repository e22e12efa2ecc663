"""The two awkward regimes: people who never move, and people who linger.

1. A person who stands still blocks their own footprint forever — those
   pixels are never committed, composite as black, and the skeleton is
   drawn on top. The output is a black silhouette wearing a stickman.

2. Once the background is complete, someone walking back in no longer
   blocks commitment. For a few rounds (the patience window) their
   region is convex-blended toward the incoming frames, then the
   background freezes again until they leave.
"""

from pathlib import Path

import numpy as np

from deident import (
    ActorShape,
    ActorSpec,
    BackgroundEngine,
    BackgroundKind,
    Frame,
    HumanMask,
    PerceptionResult,
    PipelineConfig,
    SceneSpec,
    Stationary,
    UpdatePolicy,
    generate,
    process_stream,
)
from deident.storage import save_frame_png

OUT = Path("demo_output/04_stationary_and_shadow")


def stationary_silhouette() -> None:
    spec = SceneSpec(
        width=120, height=120, frames=60,
        background_kind=BackgroundKind.FLAT,
        actors=(ActorSpec(
            shape=ActorShape.STICK_FIGURE, size=80,
            trajectory=Stationary(pos=(60.0, 64.0)), color=(150, 90, 60),
        ),),
    )
    scene = generate(spec)

    class Provider:
        def perceive(self, frame):
            return PerceptionResult(frame.index,
                                    scene.observed_masks[frame.index],
                                    scene.keypoints[frame.index])

        def close(self):
            pass

    config = PipelineConfig(sample_interval=10)
    outputs = list(process_stream(scene.frames, config, Provider()))
    last = np.asarray(outputs[-1].pixels)
    footprint = scene.truth_masks[0].human
    black = (last[footprint] == 0).all(axis=1).sum()
    print(f"stationary person: {black} of {footprint.sum()} footprint pixels "
          f"are pure black in the final frame (the rest is skeleton)")
    save_frame_png(OUT / "silhouette_final_frame.png", outputs[-1])


def shadow_blending_trace() -> None:
    policy = UpdatePolicy()
    engine = BackgroundEngine(6, 6, policy)
    clear = HumanMask(np.zeros((6, 6), dtype=bool))
    room = np.full((6, 6, 3), 100, dtype=np.uint8)

    # Three clean frames: warm-up, then the whole canvas commits at once.
    for i in range(3):
        engine.step(Frame(room, index=i), PerceptionResult(i, clear))
    print(f"\nafter 3 empty frames: phase {engine.phase.value}, "
          f"empty rate {engine.empty_rate:.2f}")

    # Now someone stands on the left half while the light level changes.
    lurker = np.zeros((6, 6), dtype=bool)
    lurker[:, :3] = True
    probe = (0, 5)  # a right-half pixel, eligible for blending
    print(f"{'step':>4} {'phase':<16} {'blended':<8} value at {probe}")
    for step in range(3, 9):
        brighter = np.full((6, 6, 3), 180, dtype=np.uint8)
        report = engine.step(Frame(brighter, index=step),
                             PerceptionResult(step, HumanMask(lurker)))
        value = engine.background.pixels[probe[0], probe[1], 0]
        print(f"{step:>4} {report.phase.value:<16} {str(report.blended):<8} {value}")
    print("three blend rounds moved the pixel toward 180, then the patience "
          "window closed and the value froze")


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    stationary_silhouette()
    shadow_blending_trace()


if __name__ == "__main__":
    main()
