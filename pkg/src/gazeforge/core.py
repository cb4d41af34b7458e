"""Shared domain types, bounded distributions and the seeded randomness contract.

All stochastic quantities in the simulator are drawn through
:class:`BoundedDistribution` / :func:`sample_bounded` so that every draw is
clamped to explicit bounds and fully reproducible from a single seed.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .errors import ParameterError

MASK64 = (1 << 64) - 1


class MovementLabel(IntEnum):
    FIXATION = 0
    SACCADE = 1
    SMOOTH_PURSUIT = 2
    NOISE = 3


# Names used in CSV files and config documents.
LABEL_NAMES = {
    MovementLabel.FIXATION: "FIX",
    MovementLabel.SACCADE: "SACC",
    MovementLabel.SMOOTH_PURSUIT: "SP",
    MovementLabel.NOISE: "NOISE",
}
NAME_LABELS = {v: k for k, v in LABEL_NAMES.items()}


class DistKind(IntEnum):
    UNIFORM = 0
    NORMAL = 1


@dataclass(frozen=True)
class BoundedDistribution:
    """A clamped random source: uniform on [min, max] or a normal centered
    at the bound midpoint with the given std, clamped into [min, max]."""

    kind: DistKind
    min: float
    max: float
    std: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.min) or not np.isfinite(self.max):
            raise ParameterError("distribution bounds must be finite")
        if self.min > self.max:
            raise ParameterError(
                f"distribution min {self.min} exceeds max {self.max}"
            )
        if self.std < 0:
            raise ParameterError(f"distribution std must be >= 0, got {self.std}")

    @classmethod
    def uniform(cls, lo: float, hi: float) -> "BoundedDistribution":
        return cls(DistKind.UNIFORM, lo, hi)

    @classmethod
    def normal(cls, lo: float, hi: float, std: float) -> "BoundedDistribution":
        return cls(DistKind.NORMAL, lo, hi, std)

    @classmethod
    def fixed(cls, value: float) -> "BoundedDistribution":
        return cls(DistKind.UNIFORM, value, value)


class RandomSource:
    """Seeded PRNG wrapper (PCG64).

    A single RandomSource is single-owner: the same seed and the same call
    sequence yield the same draws. Derived sources for independent sub-tasks
    come from :meth:`derive`, which mixes integer keys into the seed material
    deterministically.
    """

    def __init__(self, seed: int):
        self.seed = int(seed) & MASK64
        self._gen = np.random.Generator(np.random.PCG64(self.seed))

    def uniform(self) -> float:
        """One draw in [0, 1)."""
        return float(self._gen.random())

    def uniforms(self, n: int) -> np.ndarray:
        return self._gen.random(n)

    def normal(self) -> float:
        """One unit-normal draw."""
        return float(self._gen.standard_normal())

    def normals(self, n: int) -> np.ndarray:
        return self._gen.standard_normal(n)

    def shuffle(self, items: list) -> None:
        self._gen.shuffle(items)

    def derive(self, *keys: int) -> "RandomSource":
        """Independent child source determined by (seed, keys)."""
        ss = np.random.SeedSequence([self.seed, *[int(k) & MASK64 for k in keys]])
        child = RandomSource.__new__(RandomSource)
        child.seed = int(ss.generate_state(1, np.uint64)[0])
        child._gen = np.random.Generator(np.random.PCG64(ss))
        return child


def sample_bounded(dist: BoundedDistribution, rng: RandomSource) -> float:
    """Draw one value from ``dist``, guaranteed inside [dist.min, dist.max]."""
    if dist.min == dist.max:
        # Consume one draw anyway so the draw sequence does not depend on
        # whether bounds happen to be degenerate.
        if dist.kind == DistKind.UNIFORM:
            rng.uniform()
        else:
            rng.normal()
        return dist.min
    if dist.kind == DistKind.UNIFORM:
        return dist.min + rng.uniform() * (dist.max - dist.min)
    mu = 0.5 * (dist.min + dist.max)
    v = mu + dist.std * rng.normal()
    return min(max(v, dist.min), dist.max)


def sample_bounded_many(dist: BoundedDistribution, n: int, rng: RandomSource) -> np.ndarray:
    """Vectorized :func:`sample_bounded` (same per-draw semantics)."""
    if dist.min == dist.max:
        if dist.kind == DistKind.UNIFORM:
            rng.uniforms(n)
        else:
            rng.normals(n)
        return np.full(n, dist.min, dtype=float)
    if dist.kind == DistKind.UNIFORM:
        return dist.min + rng.uniforms(n) * (dist.max - dist.min)
    mu = 0.5 * (dist.min + dist.max)
    return np.clip(mu + dist.std * rng.normals(n), dist.min, dist.max)


@dataclass
class VelocityProfile:
    """Uniformly sampled velocity magnitude signal with per-sample labels."""

    base_rate: float
    velocities: np.ndarray
    labels: np.ndarray  # dtype uint8, MovementLabel values

    def __post_init__(self):
        if self.base_rate <= 0:
            raise ParameterError(f"base_rate must be > 0, got {self.base_rate}")
        self.velocities = np.asarray(self.velocities, dtype=float)
        self.labels = np.asarray(self.labels, dtype=np.uint8)
        if self.velocities.shape != self.labels.shape:
            raise ParameterError("velocities and labels must have equal length")

    def __len__(self) -> int:
        return len(self.velocities)

    @property
    def duration(self) -> float:
        """Signal duration in seconds."""
        return len(self.velocities) / self.base_rate

    @classmethod
    def concat(cls, parts: list["VelocityProfile"]) -> "VelocityProfile":
        if not parts:
            raise ParameterError("cannot concatenate zero profiles")
        rate = parts[0].base_rate
        for p in parts:
            if p.base_rate != rate:
                raise ParameterError("profiles have differing base rates")
        return cls(
            rate,
            np.concatenate([p.velocities for p in parts]),
            np.concatenate([p.labels for p in parts]),
        )
