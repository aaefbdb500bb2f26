"""Shared command vocabularies and the static maps between them.

Five hand gestures and five spoken commands drive the same five arm actions.
Each gesture owns one Arduino pin; pins 3/4/5/9 step a joint servo and pin 10
toggles the gripper.  The gesture/speech pairing, the pin map, and the name
aliases ("wave left" = wave in, "wave right" = wave out) are fixed lookup
tables, immutable and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache


class Gesture(Enum):
    FIST = "fist"
    WAVE_IN = "wave in"
    WAVE_OUT = "wave out"
    FINGER_SPREAD = "finger spread"
    DOUBLE_TAP = "double tap"
    # Distinguished missed-capture marker: not a recognized gesture, never a
    # member of any confusion distribution, has no pin.
    NONE = "none"


#: The five recognized gestures, in pin order. Gesture.NONE is excluded.
GESTURES: tuple[Gesture, ...] = (
    Gesture.FIST,
    Gesture.WAVE_IN,
    Gesture.WAVE_OUT,
    Gesture.FINGER_SPREAD,
    Gesture.DOUBLE_TAP,
)


class SpeechCommand(Enum):
    MOVE_RIGHT = "move right"
    MOVE_LEFT = "move left"
    MOVE_UP = "move up"
    MOVE_DOWN = "move down"
    MOVE_GRIPPER = "move gripper"

    @property
    def utterance(self) -> str:
        """Canonical spoken form, e.g. ``"move right"``."""
        return self.value


COMMANDS: tuple[SpeechCommand, ...] = tuple(SpeechCommand)

#: Board size of the target Arduino; every assigned pin must fit.
BOARD_PIN_COUNT = 14

#: Gesture -> pin bijection.
PIN_ASSIGNMENTS: dict[Gesture, int] = {
    Gesture.FIST: 3,
    Gesture.WAVE_IN: 4,
    Gesture.WAVE_OUT: 5,
    Gesture.FINGER_SPREAD: 9,
    Gesture.DOUBLE_TAP: 10,
}

#: Speech command -> gesture pairing (both directions are bijections).
COMMAND_GESTURE_PAIRS: dict[SpeechCommand, Gesture] = {
    SpeechCommand.MOVE_GRIPPER: Gesture.DOUBLE_TAP,
    SpeechCommand.MOVE_DOWN: Gesture.FIST,
    SpeechCommand.MOVE_UP: Gesture.FINGER_SPREAD,
    SpeechCommand.MOVE_LEFT: Gesture.WAVE_IN,
    SpeechCommand.MOVE_RIGHT: Gesture.WAVE_OUT,
}

_GESTURE_TO_COMMAND = {g: c for c, g in COMMAND_GESTURE_PAIRS.items()}

_GESTURE_NAMES = {g.value: g for g in GESTURES}
# Alternate naming scheme: the band's wave gestures are also described by the
# direction of the wave rather than the side of the wrist.
_GESTURE_ALIASES = {
    "wave left": Gesture.WAVE_IN,
    "wave right": Gesture.WAVE_OUT,
    "fingers spread": Gesture.FINGER_SPREAD,
    "none": Gesture.NONE,
}


def gesture_to_pin(g: Gesture) -> int:
    """Pin assigned to gesture ``g``. Raises for the missed-capture marker."""
    if g is Gesture.NONE:
        raise ValueError("no pin is assigned to the missed-capture marker")
    return PIN_ASSIGNMENTS[g]


def speech_to_gesture(c: SpeechCommand) -> Gesture:
    """Gesture paired with spoken command ``c``."""
    return COMMAND_GESTURE_PAIRS[c]


def gesture_to_speech(g: Gesture) -> SpeechCommand:
    """Inverse of :func:`speech_to_gesture`."""
    if g is Gesture.NONE:
        raise ValueError("the missed-capture marker pairs with no command")
    return _GESTURE_TO_COMMAND[g]


def parse_gesture_name(name: str) -> Gesture:
    """Case-insensitive gesture lookup accepting canonical names and aliases.

    "fist", "wave in", "wave out", "finger spread", "double tap" plus the
    aliases "wave left" (-> wave in), "wave right" (-> wave out) and "none"
    (-> the missed-capture marker). Underscores work in place of spaces.
    """
    key = " ".join(name.lower().replace("_", " ").split())
    g = _GESTURE_NAMES.get(key) or _GESTURE_ALIASES.get(key)
    if g is None:
        raise ValueError(f"unrecognized gesture name: {name!r}")
    return g


def parse_command_name(name: str) -> SpeechCommand:
    """Case-insensitive lookup of a canonical utterance string."""
    key = " ".join(name.lower().replace("_", " ").split())
    for c in SpeechCommand:
        if c.value == key:
            return c
    raise ValueError(f"unrecognized speech command: {name!r}")


# --- Arm actions -----------------------------------------------------------

#: Default per-event servo step, degrees.
DEFAULT_STEP_DEG = 5

#: Servo index driven by each stepping pin (pin 10 toggles the gripper).
SERVO_FOR_PIN: dict[int, int] = {3: 0, 4: 1, 5: 2, 9: 3}

GRIPPER_PIN = 10

SERVO_NAMES: tuple[str, ...] = ("base", "shoulder", "elbow", "wrist", "gripper")


@dataclass(frozen=True)
class StepServo:
    servo: int
    step_deg: int


@dataclass(frozen=True)
class ToggleGripper:
    pass


@dataclass(frozen=True)
class ArmAction:
    """Effect of driving one pin high: a servo step or a gripper toggle."""

    pin: int
    effect: StepServo | ToggleGripper

    def __post_init__(self) -> None:
        if not 0 <= self.pin < BOARD_PIN_COUNT:
            raise ValueError(f"pin {self.pin} outside the {BOARD_PIN_COUNT}-pin board")


@lru_cache(maxsize=None)
def action_for_pin(pin: int, step_deg: int = DEFAULT_STEP_DEG) -> ArmAction:
    """ArmAction triggered by ``pin`` going high. Values are shared (frozen)."""
    if pin == GRIPPER_PIN:
        return ArmAction(pin, ToggleGripper())
    if pin in SERVO_FOR_PIN:
        return ArmAction(pin, StepServo(SERVO_FOR_PIN[pin], step_deg))
    raise ValueError(f"pin {pin} is not assigned to any gesture")


def action_for_gesture(g: Gesture, step_deg: int = DEFAULT_STEP_DEG) -> ArmAction:
    return action_for_pin(gesture_to_pin(g), step_deg)


def action_for_command(c: SpeechCommand, step_deg: int = DEFAULT_STEP_DEG) -> ArmAction:
    return action_for_gesture(speech_to_gesture(c), step_deg)


@dataclass(frozen=True)
class FusionOperation:
    """One fused operation: a spoken command paired with its gesture."""

    speech: SpeechCommand
    gesture: Gesture

    @property
    def label(self) -> str:
        return f"{self.speech.value.title()} & {self.gesture.value.title()}"


#: The five fused operations, in reporting order.
FUSION_OPERATIONS: tuple[FusionOperation, ...] = tuple(
    FusionOperation(c, g) for c, g in COMMAND_GESTURE_PAIRS.items()
)

_OP_BY_GESTURE = {op.gesture: op for op in FUSION_OPERATIONS}
_OP_BY_COMMAND = {op.speech: op for op in FUSION_OPERATIONS}


def operation_for_gesture(g: Gesture) -> FusionOperation:
    if g is Gesture.NONE:
        raise ValueError("the missed-capture marker belongs to no operation")
    return _OP_BY_GESTURE[g]


def operation_for_command(c: SpeechCommand) -> FusionOperation:
    return _OP_BY_COMMAND[c]
