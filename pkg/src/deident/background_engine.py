"""Temporal background accumulation that erases humans from a static scene.

The engine consumes one segmentation mask per sampled frame. Masks are kept
in a FIFO consensus buffer; a pixel becomes update-eligible only when it is
non-human in every buffered mask. Eligible pixels that are still UNSET get
committed from the current frame (first write wins). Once the fraction of
UNSET pixels drops below the finish threshold the engine is complete; after
that, frames in which humans are still detected trigger a bounded number of
shadow-blending rounds that wash residual human pixels out of the committed
background.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .frame_model import Background, Frame, HumanMask

DEFAULT_MIN_UPDATE_FRAMES = 3
DEFAULT_FINISH_THRESHOLD = 0.01
DEFAULT_BLEND_WEIGHT = 0.3
DEFAULT_PATIENCE = 3


class UpdateMode(enum.Enum):
    SINGLE_FRAME = "single_frame"
    MULTI_FRAME = "multi_frame"


class Phase(enum.Enum):
    FILLING = "filling"
    COMPLETE = "complete"
    SHADOW_BLENDING = "shadow_blending"


@dataclass(frozen=True)
class UpdatePolicy:
    """Tunable thresholds for the background update loop.

    min_update_frames is the consensus window size; SINGLE_FRAME mode forces
    it to 1, MULTI_FRAME requires at least 2. finish_threshold is the UNSET
    fraction below which (strictly) filling is considered complete.
    post_completion_patience bounds how many consecutive human-present rounds
    after completion still apply shadow blending with the configured weight.
    """

    mode: UpdateMode = UpdateMode.MULTI_FRAME
    min_update_frames: int = DEFAULT_MIN_UPDATE_FRAMES
    finish_threshold: float = DEFAULT_FINISH_THRESHOLD
    post_completion_blend_weight: float = DEFAULT_BLEND_WEIGHT
    post_completion_patience: int = DEFAULT_PATIENCE

    def __post_init__(self):
        if self.mode is UpdateMode.SINGLE_FRAME:
            object.__setattr__(self, "min_update_frames", 1)
        elif self.min_update_frames < 2:
            raise ValueError(
                f"min_update_frames: MULTI_FRAME mode requires >= 2, got {self.min_update_frames}"
            )
        if not 0.0 < self.finish_threshold <= 1.0:
            raise ValueError(f"finish_threshold: must be in (0, 1], got {self.finish_threshold}")
        if not 0.0 < self.post_completion_blend_weight < 1.0:
            raise ValueError(
                f"post_completion_blend_weight: must be in (0, 1), got "
                f"{self.post_completion_blend_weight}"
            )
        if self.post_completion_patience < 0:
            raise ValueError(
                f"post_completion_patience: must be >= 0, got {self.post_completion_patience}"
            )


@dataclass(frozen=True)
class StepReport:
    """What one engine step did, for logging and tests."""

    frame_index: int
    phase: Phase
    empty_rate: float
    warming_up: bool
    filled: bool
    blended: bool


def candidate_mask(buffer: Sequence[HumanMask]) -> HumanMask:
    """Consensus mask over a buffer: a cell is non-human (update-eligible)
    only if it is non-human in every buffered mask.

    With a single-mask buffer this degrades to the single-frame rule.
    """
    if len(buffer) == 0:
        raise ValueError("candidate_mask requires at least one mask")
    first = buffer[0]
    human = first.human.copy()
    for mask in buffer[1:]:
        if not mask.matches(first):
            raise ValueError(
                f"mask dimensions differ: {mask.width}x{mask.height} "
                f"vs {first.width}x{first.height}"
            )
        human |= mask.human
    return HumanMask(human)


def shadow_blend(bg: Background, frame: Frame, eligible: np.ndarray, weight: float) -> Background:
    """Post-completion update: blend the frame into committed eligible cells
    and commit eligible cells that are somehow still UNSET.

    Returns a new Background; the input is untouched. Per channel the blend
    is round(weight * frame + (1 - weight) * old), round-half-up.
    """
    if not 0.0 < weight < 1.0:
        raise ValueError(f"blend weight must be in (0, 1), got {weight}")
    if eligible.shape != (bg.height, bg.width):
        raise ValueError("eligibility shape does not match background")
    if (frame.height, frame.width) != (bg.height, bg.width):
        raise ValueError("frame dimensions do not match background")
    out = bg.snapshot()
    still_unset = eligible & out.unset
    committed = eligible & ~out.unset
    out.commit(still_unset, frame.pixels)
    out.blend_committed(committed, frame.pixels, weight)
    return out


class BackgroundEngine:
    """Single-writer background accumulator for one video stream.

    Feed one (frame, perception) pair per sampled frame, strictly in order.
    Steps are deterministic functions of the prior state and the inputs, so
    replaying a recorded sequence reproduces the background bit for bit.
    """

    def __init__(self, width: int, height: int, policy: UpdatePolicy | None = None):
        self.policy = policy if policy is not None else UpdatePolicy()
        self._background = Background(width, height)
        self._buffer: list[HumanMask] = []
        self._phase = Phase.FILLING
        self._rounds_since_complete_with_human = 0

    @property
    def background(self) -> Background:
        return self._background

    @property
    def mask_buffer(self) -> tuple[HumanMask, ...]:
        return tuple(self._buffer)

    @property
    def phase(self) -> Phase:
        return self._phase

    @property
    def rounds_since_complete_with_human(self) -> int:
        return self._rounds_since_complete_with_human

    @property
    def empty_rate(self) -> float:
        return self._background.empty_rate

    def snapshot(self) -> Background:
        return self._background.snapshot()

    def apply_update(self, frame: Frame, candidate: HumanMask) -> None:
        """Commit frame pixels at eligible UNSET cells (filling phase only).

        Eligible means non-human in the candidate mask. Committed cells are
        never rewritten here: first write wins until the phase leaves
        FILLING. Completion uses a strict less-than test.
        """
        if self._phase is not Phase.FILLING:
            raise ValueError(f"apply_update is only valid in FILLING phase, not {self._phase.name}")
        bg = self._background
        if (frame.height, frame.width) != (bg.height, bg.width):
            raise ValueError(
                f"frame {frame.width}x{frame.height} does not match "
                f"background {bg.width}x{bg.height}"
            )
        if not candidate.matches(bg):
            raise ValueError("candidate mask dimensions do not match background")
        eligible_unset = ~candidate.human & bg.unset
        bg.commit(eligible_unset, frame.pixels)
        if bg.empty_rate < self.policy.finish_threshold:
            self._phase = Phase.COMPLETE
            self._rounds_since_complete_with_human = 0

    def step(self, frame: Frame, perception) -> StepReport:
        """Advance the engine by one sampled frame.

        The perception's mask joins the consensus buffer. Until the buffer
        holds min_update_frames masks nothing else happens. Afterwards the
        phase decides the action: FILLING commits eligible UNSET cells;
        after completion, human-present rounds within the patience window
        shadow-blend eligible cells, and a human-free round resets the
        patience counter. The oldest mask is evicted at the end of every
        post-warm-up step, so the buffer then always holds exactly
        min_update_frames masks.
        """
        if frame.index != perception.frame_index:
            raise ValueError(
                f"frame index {frame.index} does not match perception "
                f"{perception.frame_index}"
            )
        bg = self._background
        if (frame.height, frame.width) != (bg.height, bg.width):
            raise ValueError(
                f"frame {frame.width}x{frame.height} does not match "
                f"background {bg.width}x{bg.height}"
            )
        if not perception.mask.matches(bg):
            raise ValueError("perception mask dimensions do not match background")

        policy = self.policy
        self._buffer.append(perception.mask)
        if len(self._buffer) < policy.min_update_frames:
            return StepReport(frame.index, self._phase, bg.empty_rate, True, False, False)

        candidate = candidate_mask(self._buffer)
        filled = blended = False
        if self._phase is Phase.FILLING:
            self.apply_update(frame, candidate)
            filled = True
        elif perception.human_detected:
            if self._rounds_since_complete_with_human < policy.post_completion_patience:
                self._background = shadow_blend(
                    bg, frame, ~candidate.human, policy.post_completion_blend_weight
                )
                self._phase = Phase.SHADOW_BLENDING
                blended = True
            self._rounds_since_complete_with_human += 1
        else:
            self._rounds_since_complete_with_human = 0
            self._phase = Phase.COMPLETE

        self._buffer.pop(0)
        return StepReport(frame.index, self._phase, self._background.empty_rate, False, filled, blended)

    def reinitialize(self) -> None:
        """Reset for a camera move: all cells UNSET again, buffer cleared,
        phase back to FILLING, generation counter incremented."""
        self._background.reinitialize()
        self._buffer.clear()
        self._phase = Phase.FILLING
        self._rounds_since_complete_with_human = 0
