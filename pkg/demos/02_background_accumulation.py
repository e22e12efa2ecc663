"""Watch the background engine erase a moving person, step by step.

Every sampled frame contributes its human mask to a small FIFO buffer.
A pixel is eligible for commitment only when no buffered mask marks it
human, and once committed it is frozen (first write wins). The run
finishes when the fraction of still-empty pixels drops under the finish
threshold; after that, lingering humans trigger a few rounds of shadow
blending instead.

Run:  python3 demos/02_background_accumulation.py
"""

from pathlib import Path

from deident import (
    ActorShape,
    ActorSpec,
    BackgroundEngine,
    BackgroundKind,
    Frame,
    Linear,
    PerceptionResult,
    SceneSpec,
    UpdatePolicy,
    generate,
)
from deident.pipeline import sample_indices
from deident.storage import save_frame_png

OUT = Path("demo_output/02_background_accumulation")
INTERVAL = 10


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    spec = SceneSpec(
        width=160, height=120, frames=100,
        background_kind=BackgroundKind.GRADIENT,
        actors=(ActorSpec(
            shape=ActorShape.ELLIPSE, size=40,
            trajectory=Linear(start=(20.0, 60.0), velocity=(1.5, 0.2)),
            color=(200, 50, 50),
        ),),
    )
    scene = generate(spec)

    policy = UpdatePolicy()  # window 3, finish threshold 1%, patience 3
    engine = BackgroundEngine(spec.width, spec.height, policy)

    print(f"{'frame':>5} {'phase':<16} {'empty rate':>10}  notes")
    for position in sample_indices(spec.frames, INTERVAL):
        frame = scene.frames[position]
        result = PerceptionResult(position, scene.observed_masks[position],
                                  scene.keypoints[position])
        report = engine.step(frame, result)
        notes = []
        if report.warming_up:
            notes.append("warming up")
        if report.filled:
            notes.append("committed new pixels")
        if report.blended:
            notes.append("shadow blend")
        print(f"{position:>5} {report.phase.value:<16} {report.empty_rate:>10.4f}"
              f"  {', '.join(notes)}")
        save_frame_png(OUT / f"background_after_{position:03d}.png",
                       Frame(engine.background.as_rgb()))

    final = engine.background
    print(f"final empty rate {final.empty_rate:.4f}; snapshots in {OUT}")
    # Empty (never-committed) cells render black in as_rgb(); with a moving
    # actor there should be none left.
    save_frame_png(OUT / "background_final.png", Frame(final.as_rgb()))


if __name__ == "__main__":
    main()
