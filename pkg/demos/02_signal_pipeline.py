"""Walk the signal-level gesture path: synth windows, classify, calibrate.

Below the outcome model sits an 8-channel waveform simulator and a
template classifier. Windows synthesized with zero noise classify back to
their gesture exactly; raising the noise scale raises the error rate, and
a bisection search finds the scale that hits a requested rate.
"""

from mmfuse import (
    GESTURES,
    Gesture,
    WarmupState,
    calibrate_noise,
    classify_window,
    gesture_templates,
    make_rng,
    synth_emg_window,
    warmup_factor,
)
from mmfuse.emg import REFERENCE_ERROR_RATES, OutcomeKind


def noiseless_round_trip() -> None:
    print("noiseless round trip")
    for g in GESTURES:
        w = synth_emg_window(g, sigma=0.0, rng=make_rng(0))
        out = classify_window(w)
        assert out.kind is OutcomeKind.CORRECT and out.captured is g
        print(f"  {g.value:14s} -> {out.captured.value}")


def error_vs_noise() -> None:
    print("\nerror rate vs noise scale, 2000 windows of wave out")
    for sigma in (0.2, 0.4, 0.6, 0.8):
        rng = make_rng(42)
        bad = sum(
            classify_window(synth_emg_window(Gesture.WAVE_OUT, sigma, rng)).kind
            is not OutcomeKind.CORRECT
            for _ in range(2000)
        )
        print(f"  sigma={sigma:.1f}  error={100 * bad / 2000:5.1f}%")


def calibrate_to_reference() -> None:
    g = Gesture.DOUBLE_TAP
    target = REFERENCE_ERROR_RATES[g]
    cal = calibrate_noise(g, target, make_rng(9))
    print(f"\ncalibrated {g.value}: sigma={cal.sigma:.4f}", end=" ")
    print(f"achieved={100 * cal.achieved_error:.2f}% target={100 * target:.1f}%")


def warmup_curve() -> None:
    # a cold session starts at 3x the calibrated error and decays over 120 s
    print("\nwarmup multiplier on the error rate")
    for t in (0.0, 30.0, 60.0, 90.0, 120.0, 300.0):
        f = warmup_factor(WarmupState(elapsed_s=t))
        print(f"  t={t:5.0f}s  factor={f:.3f}")


if __name__ == "__main__":
    templates = gesture_templates()
    shape = next(iter(templates.values())).shape
    print(f"{len(templates)} gesture templates, {shape[0]} channels x {shape[1]} samples\n")
    noiseless_round_trip()
    error_vs_noise()
    calibrate_to_reference()
    warmup_curve()
