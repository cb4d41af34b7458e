"""Per-segment parameter extraction, re-simulation and squared-error summaries.

Mirrors the protocol of comparing simulated segments against labeled real
recordings: each fixation, saccade and smooth pursuit is re-simulated several
times with the same length, and the per-sample squared errors are pooled per
movement type into whisker-plot statistics.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.stats import gamma as _gamma

from .core import MovementLabel, RandomSource, VelocityProfile
from .errors import ParameterError
from .generators import GAMMA_TAIL_QUANTILE, gamma_profile
from .mapping import _label_runs  # run segmentation shared with mapping

DEFAULT_REPEATS = 10


@dataclass(frozen=True)
class SegmentDescriptor:
    label: MovementLabel
    length: int
    mean_velocity: float = 0.0  # fixation / pursuit
    std_velocity: float = 0.0  # fixation / pursuit
    peak_velocity: float = 0.0  # saccade
    peak_index: int = 0  # saccade

    def __post_init__(self):
        if self.length < 1:
            raise ParameterError("segment length must be >= 1")
        if self.label == MovementLabel.SACCADE and self.peak_index >= self.length:
            raise ParameterError("saccade peak_index must be < length")


@dataclass(frozen=True)
class TypeStats:
    """Whisker-plot statistics of pooled per-sample squared errors."""

    count: int
    mean: float
    median: float
    q1: float
    q3: float
    whisker_low: float
    whisker_high: float
    min: float
    max: float


@dataclass
class ErrorSummary:
    per_type: dict[MovementLabel, TypeStats]
    pooled: dict[MovementLabel, np.ndarray]


def extract_descriptors(
    velocities: np.ndarray, labels: np.ndarray
) -> list[SegmentDescriptor]:
    """One descriptor per contiguous label run; noise runs are skipped."""
    velocities = np.asarray(velocities, dtype=float)
    labels = np.asarray(labels)
    if len(velocities) != len(labels):
        raise ParameterError("velocities and labels must have equal length")
    out = []
    for start, end, lab in _label_runs(labels):
        label = MovementLabel(lab)
        if label == MovementLabel.NOISE:
            continue
        seg = velocities[start:end]
        n = end - start
        if label == MovementLabel.SACCADE:
            idx = int(np.argmax(seg))
            out.append(
                SegmentDescriptor(
                    label, n, peak_velocity=float(seg[idx]), peak_index=idx
                )
            )
        else:
            std = float(seg.std(ddof=1)) if n > 1 else 0.0
            out.append(
                SegmentDescriptor(
                    label, n, mean_velocity=float(seg.mean()), std_velocity=std
                )
            )
    return out


def _mode_index(shape: float, length: int) -> float:
    """Fractional sample index of the Gamma profile mode for a run of the
    given length."""
    x_end = float(_gamma.ppf(GAMMA_TAIL_QUANTILE, shape))
    return (length - 1) * (shape - 1.0) / x_end


def fit_shape_for_peak_index(length: int, peak_index: int) -> tuple[float, bool]:
    """Gamma shape whose profile argmax lands on peak_index (within 1 sample).

    Returns (shape, exact). When the requested index is unattainable (the
    run boundary), the nearest attainable mode is used and exact is False.
    """
    if length < 2:
        raise ParameterError("saccade run must have at least 2 samples")
    if peak_index <= 0:
        return 1.0, True  # mode at the first sample
    k_lo, k_hi = 1.0 + 1e-9, 1e8

    def f(k):
        return _mode_index(k, length) - peak_index

    if f(k_hi) < 0:
        # Peak at (or past) the final sample cannot be reached; fall back to
        # the latest attainable mode.
        return k_hi, False
    shape = float(brentq(f, k_lo, k_hi, xtol=1e-9, rtol=1e-12))
    return shape, abs(_mode_index(shape, length) - peak_index) <= 1.0


def simulate_from_descriptor(
    d: SegmentDescriptor, rng: RandomSource, base_rate: float = 1000.0
) -> VelocityProfile:
    """Re-simulate a segment with the same length as the described one.

    Fixations and pursuits use the observed mean and std (pursuit onset is
    not used here); saccades reproduce the observed peak exactly and its
    position within one sample, with jitter disabled.
    """
    n = d.length
    if d.label == MovementLabel.SACCADE:
        if n < 2:
            v = np.full(n, d.peak_velocity)
        else:
            shape, _ = fit_shape_for_peak_index(n, d.peak_index)
            v = gamma_profile(n, shape, d.peak_velocity)
    else:
        v = d.mean_velocity + d.std_velocity * rng.normals(n)
        np.clip(
            v,
            d.mean_velocity - 10.0 * d.std_velocity,
            d.mean_velocity + 10.0 * d.std_velocity,
            out=v,
        )
        v = np.maximum(0.0, v)
    labels = np.full(n, d.label, dtype=np.uint8)
    return VelocityProfile(base_rate, v, labels)


def squared_error(sim: np.ndarray, real: np.ndarray) -> np.ndarray:
    """Elementwise squared difference."""
    sim = np.asarray(sim, dtype=float)
    real = np.asarray(real, dtype=float)
    if sim.shape != real.shape:
        raise ParameterError(
            f"length mismatch: sim {sim.shape} vs real {real.shape}"
        )
    return (sim - real) ** 2


def _stats(errors: np.ndarray) -> TypeStats:
    q1, med, q3 = np.percentile(errors, [25, 50, 75])
    iqr = q3 - q1
    lo_fence = q1 - 1.5 * iqr
    hi_fence = q3 + 1.5 * iqr
    within = errors[(errors >= lo_fence) & (errors <= hi_fence)]
    # Whiskers follow the usual convention: extreme data inside the fences.
    wlo = float(within.min()) if len(within) else float(errors.min())
    whi = float(within.max()) if len(within) else float(errors.max())
    return TypeStats(
        count=int(len(errors)),
        mean=float(errors.mean()),
        median=float(med),
        q1=float(q1),
        q3=float(q3),
        whisker_low=wlo,
        whisker_high=whi,
        min=float(errors.min()),
        max=float(errors.max()),
    )


def evaluate_dataset(
    velocities: np.ndarray,
    labels: np.ndarray,
    rng: RandomSource,
    repeats: int = DEFAULT_REPEATS,
) -> ErrorSummary:
    """Simulate every labeled segment `repeats` times and pool the per-sample
    squared errors by movement type."""
    if repeats < 1:
        raise ParameterError("repeats must be >= 1")
    velocities = np.asarray(velocities, dtype=float)
    labels = np.asarray(labels)
    pooled: dict[MovementLabel, list[np.ndarray]] = {}
    seg_index = 0
    for start, end, lab in _label_runs(labels):
        label = MovementLabel(lab)
        if label == MovementLabel.NOISE:
            continue
        seg = velocities[start:end]
        descr = extract_descriptors(seg, labels[start:end])[0]
        for rep in range(repeats):
            child = rng.derive(seg_index, rep)
            sim = simulate_from_descriptor(descr, child)
            pooled.setdefault(label, []).append(squared_error(sim.velocities, seg))
        seg_index += 1
    per_type = {}
    vectors = {}
    for label, chunks in pooled.items():
        errs = np.concatenate(chunks)
        per_type[label] = _stats(errs)
        vectors[label] = errs
    return ErrorSummary(per_type=per_type, pooled=vectors)
