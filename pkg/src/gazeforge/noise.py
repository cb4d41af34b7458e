"""Noise injection: overwrite a fixed fraction of samples with noise velocities."""
from __future__ import annotations

from dataclasses import dataclass

from .core import BoundedDistribution, DistKind, RandomSource, sample_bounded
from .errors import ParameterError
from .core import MovementLabel
from .resampler import SampledSignal

MODE_REPLACE = "replace"
MODE_ADD = "add"


@dataclass(frozen=True)
class NoiseSpec:
    fraction: float  # portion of samples affected, [0, 1]
    location_dist: DistKind  # placement of affected indices
    magnitude: BoundedDistribution  # deg/s
    mode: str = MODE_REPLACE
    burst_length: int = 1  # contiguous run length (blinks: magnitude 0, burst > 1)

    def __post_init__(self):
        if not 0.0 <= self.fraction <= 1.0:
            raise ParameterError(f"noise fraction must be in [0,1], got {self.fraction}")
        if self.mode not in (MODE_REPLACE, MODE_ADD):
            raise ParameterError(f"noise mode must be replace|add, got {self.mode!r}")
        if self.burst_length < 1:
            raise ParameterError("noise burst_length must be >= 1")


def _draw_index(n: int, dist: DistKind, rng: RandomSource) -> int:
    if dist == DistKind.UNIFORM:
        return min(int(rng.uniform() * n), n - 1)
    # Normal placement: centered mid-signal with std n/4, clamped.
    idx = int(round(n / 2.0 + (n / 4.0) * rng.normal()))
    return min(max(idx, 0), n - 1)


def _select_indices(n: int, k: int, spec: NoiseSpec, rng: RandomSource) -> list[int]:
    """Exactly k distinct indices; collisions are re-drawn, with a
    deterministic sweep fallback so selection always terminates."""
    chosen: set[int] = set()
    burst = spec.burst_length
    attempts = 0
    max_attempts = 200 * max(n, 1)
    while len(chosen) < k and attempts < max_attempts:
        attempts += 1
        if burst == 1:
            idx = _draw_index(n, spec.location_dist, rng)
            if idx in chosen:
                continue
            chosen.add(idx)
        else:
            run = min(burst, k - len(chosen))
            start = _draw_index(n, spec.location_dist, rng)
            start = min(start, n - run)
            block = range(start, start + run)
            if any(i in chosen for i in block):
                continue
            chosen.update(block)
    if len(chosen) < k:
        for i in range(n):
            if i not in chosen:
                chosen.add(i)
                if len(chosen) == k:
                    break
    return sorted(chosen)


def inject_noise(
    signal: SampledSignal, spec: NoiseSpec, rng: RandomSource
) -> SampledSignal:
    """Overwrite round(fraction*N) samples with noise draws; all other samples
    are returned unchanged. Affected samples are relabeled NOISE."""
    out = signal.copy()
    n = len(signal)
    k = int(round(spec.fraction * n))
    if k == 0:
        return out
    indices = _select_indices(n, k, spec, rng)
    for i in indices:
        mag = sample_bounded(spec.magnitude, rng)
        if spec.mode == MODE_REPLACE:
            out.velocities[i] = mag
        else:
            out.velocities[i] = max(0.0, out.velocities[i] + mag)
        out.labels[i] = MovementLabel.NOISE
    return out
