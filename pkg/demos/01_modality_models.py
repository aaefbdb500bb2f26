"""Sample the two channel models and compare against the reference tables.

Each channel is a calibrated outcome model: gestures fail at a per-gesture
rate split between wrong and missed captures, utterances fail at a
per-command rate split across confusable, duplicated, and extraneous text.
"""

from collections import Counter

from mmfuse import (
    GESTURES,
    OutcomeKind,
    SpeechCommand,
    default_gesture_model,
    default_recognition_model,
    make_rng,
    sample_gesture_outcome,
    sample_recognition,
)
from mmfuse.emg import REFERENCE_ERROR_RATES
from mmfuse.seeding import derive_seed
from mmfuse.speech import REFERENCE_CORRECT_RATES, classify_capture_error

N = 20_000
SEED = 7


def gesture_table() -> None:
    model = default_gesture_model()
    print(f"gesture channel, {N} captures per gesture")
    print(f"{'gesture':14s} {'wrong':>7s} {'missed':>7s} {'error%':>7s} {'ref%':>6s}")
    for i, g in enumerate(GESTURES):
        rng = make_rng(derive_seed(SEED, i))
        kinds = Counter(
            sample_gesture_outcome(g, model, None, rng).kind for _ in range(N)
        )
        wrong = kinds[OutcomeKind.WRONG]
        missed = kinds[OutcomeKind.MISSED]
        err = 100 * (wrong + missed) / N
        print(
            f"{g.value:14s} {wrong:7d} {missed:7d} {err:7.2f}"
            f" {100 * REFERENCE_ERROR_RATES[g]:6.1f}"
        )


def speech_table() -> None:
    model = default_recognition_model()
    print(f"\nspeech channel, {N} utterances per command")
    print(f"{'command':14s} {'correct%':>9s} {'ref%':>6s}  most common error texts")
    for i, c in enumerate(SpeechCommand):
        rng = make_rng(derive_seed(SEED, 100 + i))
        captures = [sample_recognition(c, model, rng) for _ in range(N)]
        bad = [u for u in captures if u.text != c.value]
        correct = 100 * (N - len(bad)) / N
        top = Counter(u.text for u in bad).most_common(2)
        examples = ", ".join(f"{t!r} x{k}" for t, k in top)
        print(
            f"{c.value:14s} {correct:9.2f} {100 * REFERENCE_CORRECT_RATES[c]:6.1f}"
            f"  {examples}"
        )

    # the capture taxonomy judges text evidence alone: a doubled canonical
    # run is DUPLICATED, everything else off-canonical is EXTRANEOUS, so a
    # substitution like "move lift" lands in EXTRANEOUS too
    rng = make_rng(derive_seed(SEED, 200))
    kinds = Counter(
        classify_capture_error(
            sample_recognition(SpeechCommand.MOVE_LEFT, model, rng)
        ).value
        for _ in range(N)
    )
    print(f"\ncapture taxonomy for 'move left': {dict(sorted(kinds.items()))}")


if __name__ == "__main__":
    gesture_table()
    speech_table()
