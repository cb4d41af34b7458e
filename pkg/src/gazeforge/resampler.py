"""Resampling of base-rate velocity profiles to static or fluctuating rates.

Each output sample averages all base samples in the half-open window since
the previous sampling position, which mimics how eye trackers integrate over
their (possibly varying) frame interval.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import BoundedDistribution, RandomSource, VelocityProfile, sample_bounded
from .errors import ParameterError

# Slack (in base-sample index units) for window boundary comparisons, so a
# sample landing exactly on a window edge is counted once.
_INDEX_EPS = 1e-6


@dataclass(frozen=True)
class RateSpec:
    """Target sampling rate; min == max gives a constant rate, otherwise the
    instantaneous rate is re-drawn for every output sample."""

    rate: BoundedDistribution  # Hz

    def __post_init__(self):
        if self.rate.min <= 0:
            raise ParameterError("sampling rate must have min > 0")


@dataclass
class SampledSignal:
    """Timestamped velocity samples with labels (timestamps in seconds)."""

    timestamps: np.ndarray
    velocities: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        self.timestamps = np.asarray(self.timestamps, dtype=float)
        self.velocities = np.asarray(self.velocities, dtype=float)
        self.labels = np.asarray(self.labels, dtype=np.uint8)
        n = len(self.timestamps)
        if len(self.velocities) != n or len(self.labels) != n:
            raise ParameterError("signal arrays must have equal length")

    def __len__(self) -> int:
        return len(self.timestamps)

    def copy(self) -> "SampledSignal":
        return SampledSignal(
            self.timestamps.copy(), self.velocities.copy(), self.labels.copy()
        )


def _window_label(labels: np.ndarray) -> int:
    counts = np.bincount(labels)
    best = counts.max()
    tied = set(np.flatnonzero(counts == best))
    if len(tied) == 1:
        return int(tied.pop())
    # Tie: take the label of the latest base sample carrying a tied label.
    for lab in labels[::-1]:
        if int(lab) in tied:
            return int(lab)
    return int(labels[-1])


def resample(
    profile: VelocityProfile, spec: RateSpec, rng: RandomSource
) -> SampledSignal:
    """Resample a base-rate profile to the target rate spec.

    Base sample i represents the interval ending at (i+1)/base_rate. Each
    output sample at clock t_curr is the mean over base samples in
    (t_prev, t_curr]; its label is the window's majority label, ties broken
    by the latest base sample.
    """
    n = len(profile)
    if n == 0:
        raise ParameterError("cannot resample an empty profile")
    if spec.rate.max > profile.base_rate:
        raise ParameterError(
            f"target rate max {spec.rate.max:.6g} Hz exceeds base rate "
            f"{profile.base_rate:.6g} Hz"
        )
    duration = n / profile.base_rate
    ts: list[float] = []
    vs: list[float] = []
    ls: list[int] = []
    t_prev = 0.0
    lo = 0
    while True:
        r = sample_bounded(spec.rate, rng)
        t_curr = t_prev + 1.0 / r
        hi = int(np.floor(t_curr * profile.base_rate + _INDEX_EPS))
        if hi > n:
            # Window would extend past the profile end: stop.
            break
        if hi <= lo:
            raise ParameterError(
                f"empty resampling window at t={t_curr:.6g} s (rate draw "
                f"{r:.6g} Hz above base rate?)"
            )
        window_v = profile.velocities[lo:hi]
        window_l = profile.labels[lo:hi]
        ts.append(t_curr)
        vs.append(float(window_v.mean()))
        ls.append(_window_label(window_l))
        t_prev = t_curr
        lo = hi
        if hi == n:
            break
    return SampledSignal(np.array(ts), np.array(vs), np.array(ls))
