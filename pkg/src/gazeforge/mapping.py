"""Mapping labeled velocity signals to 2D gaze traces over a stimulus."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import MovementLabel, RandomSource
from .errors import MappingError, ParameterError
from .resampler import SampledSignal
from .saliency import TargetSet


@dataclass(frozen=True)
class MappingParams:
    pixels_per_degree: float = 30.0
    max_path_deviation: float = 0.0  # px, off the straight line
    fixation_dispersion: float = 0.0  # px, scatter radius around the center
    target_jitter_px: float = 5.0

    def __post_init__(self):
        if self.pixels_per_degree <= 0:
            raise ParameterError("pixels_per_degree must be > 0")
        for name in ("max_path_deviation", "fixation_dispersion", "target_jitter_px"):
            if getattr(self, name) < 0:
                raise ParameterError(f"{name} must be >= 0")


@dataclass
class SceneTargets:
    """Fixation targets for a static stimulus or per-frame for a dynamic one."""

    static: TargetSet | None = None
    frames: list[tuple[float, TargetSet]] | None = None  # (frame_time, targets)
    frame_rate: float = 0.0

    def __post_init__(self):
        if (self.static is None) == (self.frames is None):
            raise ParameterError("scene targets must be static or dynamic")
        if self.frames is not None:
            times = [t for t, _ in self.frames]
            if any(b <= a for a, b in zip(times, times[1:])):
                raise ParameterError("frame times must be strictly increasing")

    @classmethod
    def from_static(cls, targets: TargetSet) -> "SceneTargets":
        return cls(static=targets)

    @classmethod
    def from_frames(
        cls, frames: list[tuple[float, TargetSet]], frame_rate: float
    ) -> "SceneTargets":
        return cls(frames=frames, frame_rate=frame_rate)

    @property
    def bounds(self) -> tuple[int, int]:
        ts = self.static if self.static is not None else self.frames[0][1]
        return ts.width, ts.height

    def at(self, time: float) -> TargetSet:
        """Target set in effect at the given time (nearest frame for dynamic)."""
        if self.static is not None:
            return self.static
        best = min(self.frames, key=lambda ft: abs(ft[0] - time))
        return best[1]


@dataclass
class GazeTrace:
    """Timestamped 2D gaze samples (px) with movement labels."""

    timestamps: np.ndarray
    x: np.ndarray
    y: np.ndarray
    labels: np.ndarray
    width: int
    height: int
    pixels_per_degree: float

    def __post_init__(self):
        self.timestamps = np.asarray(self.timestamps, dtype=float)
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        self.labels = np.asarray(self.labels, dtype=np.uint8)
        n = len(self.timestamps)
        if not (len(self.x) == len(self.y) == len(self.labels) == n):
            raise ParameterError("gaze trace arrays must have equal length")

    def __len__(self) -> int:
        return len(self.timestamps)


def fixation_walk(
    center: tuple[float, float],
    n: int,
    dispersion: float,
    rng: RandomSource,
) -> list[tuple[float, float]]:
    """Mean-reverting random walk around a fixation center.

    Steps have uniform direction and |Normal(0, dispersion/3)| length clamped
    to dispersion/2, plus a restoring pull of 0.1x the offset from the
    center. All points stay within the dispersion radius.
    """
    if n < 1:
        raise ParameterError("fixation walk needs n >= 1")
    if dispersion < 0:
        raise ParameterError("dispersion must be >= 0")
    cx, cy = center
    px, py = cx, cy
    pts: list[tuple[float, float]] = []
    for _ in range(n):
        pts.append((px, py))
        if dispersion == 0:
            continue
        ang = 2.0 * math.pi * rng.uniform()
        step = min(abs(rng.normal()) * (dispersion / 3.0), dispersion / 2.0)
        nx = px + step * math.cos(ang) + 0.1 * (cx - px)
        ny = py + step * math.sin(ang) + 0.1 * (cy - py)
        # Clamp into the dispersion disc.
        d = math.hypot(nx - cx, ny - cy)
        if d > dispersion:
            nx = cx + (nx - cx) * dispersion / d
            ny = cy + (ny - cy) * dispersion / d
        px, py = nx, ny
    return pts


def _choose_target(
    targets: TargetSet, rng: RandomSource
) -> tuple[float, float, float]:
    """Weighted target choice (probability proportional to saliency weight;
    uniform if all weights are zero)."""
    if len(targets) == 0:
        raise MappingError("empty target set")
    weights = [max(p[2], 0.0) for p in targets.points]
    total = sum(weights)
    u = rng.uniform()
    if total <= 0:
        return targets.points[min(int(u * len(targets)), len(targets) - 1)]
    u *= total
    acc = 0.0
    for p, w in zip(targets.points, weights):
        acc += w
        if u < acc:
            return p
    return targets.points[-1]


def _effective_labels(labels: np.ndarray) -> np.ndarray:
    """Assign each NOISE sample the movement type of its surrounding run."""
    out = labels.copy()
    noise = MovementLabel.NOISE
    last = None
    for i in range(len(out)):
        if out[i] != noise:
            last = out[i]
        elif last is not None:
            out[i] = last
    # Leading noise samples take the first real label.
    first = None
    for lab in out:
        if lab != noise:
            first = lab
            break
    if first is None:
        raise MappingError("signal contains only noise samples")
    for i in range(len(out)):
        if out[i] == noise:
            out[i] = first
        else:
            break
    return out


def _label_runs(labels: np.ndarray) -> list[tuple[int, int, int]]:
    """(start, end, label) for each maximal constant run; end is exclusive."""
    runs = []
    start = 0
    for i in range(1, len(labels) + 1):
        if i == len(labels) or labels[i] != labels[start]:
            runs.append((start, i, int(labels[start])))
            start = i
    return runs


def map_to_gaze(
    signal: SampledSignal,
    targets: SceneTargets,
    p: MappingParams,
    rng: RandomSource,
) -> GazeTrace:
    """Turn a labeled velocity signal into a gaze trace over the stimulus.

    Fixation runs scatter around a weighted-drawn target; saccade and
    pursuit runs advance along the line to the next target with per-sample
    steps proportional to velocity, rescaled so the run ends exactly on the
    target, plus a bounded perpendicular deviation that vanishes at both
    endpoints.
    """
    if len(signal) == 0:
        raise MappingError("cannot map an empty signal")
    width, height = targets.bounds
    eff = _effective_labels(signal.labels)
    runs = _label_runs(eff)
    ts = signal.timestamps
    xs = np.empty(len(signal))
    ys = np.empty(len(signal))
    cur: tuple[float, float] | None = None
    for start, end, label in runs:
        n = end - start
        t_end = float(ts[end - 1])
        tset = targets.at(t_end)
        if len(tset) == 0:
            raise MappingError(f"no fixation targets available at t={t_end:.6g} s")
        if label == MovementLabel.FIXATION:
            tx, ty, _ = _choose_target(tset, rng)
            pts = fixation_walk((tx, ty), n, p.fixation_dispersion, rng)
            for j, (px, py) in enumerate(pts):
                xs[start + j], ys[start + j] = px, py
            cur = pts[-1]
        else:
            if cur is None:
                sx, sy, _ = _choose_target(targets.at(float(ts[start])), rng)
                cur = (sx, sy)
            tx, ty, _ = _choose_target(tset, rng)
            _place_movement_run(
                signal, start, end, cur, (tx, ty), p, rng, xs, ys
            )
            cur = (xs[end - 1], ys[end - 1])
    np.clip(xs, 0.0, max(width - 1, 0), out=xs)
    np.clip(ys, 0.0, max(height - 1, 0), out=ys)
    return GazeTrace(
        ts.copy(), xs, ys, signal.labels.copy(), width, height, p.pixels_per_degree
    )


def _place_movement_run(
    signal: SampledSignal,
    start: int,
    end: int,
    origin: tuple[float, float],
    dest: tuple[float, float],
    p: MappingParams,
    rng: RandomSource,
    xs: np.ndarray,
    ys: np.ndarray,
) -> None:
    ts = signal.timestamps
    t_before = float(ts[start - 1]) if start > 0 else 0.0
    dts = np.diff(ts[start - 1 : end]) if start > 0 else np.diff(
        np.concatenate(([t_before], ts[start:end]))
    )
    steps = signal.velocities[start:end] * dts * p.pixels_per_degree
    cum = np.cumsum(np.maximum(steps, 0.0))
    total = float(cum[-1])
    n = end - start
    if total > 0:
        progress = cum / total
    else:
        progress = np.arange(1, n + 1) / n
    ox, oy = origin
    dx, dy = dest[0] - ox, dest[1] - oy
    dist = math.hypot(dx, dy)
    if dist > 0:
        ux, uy = dx / dist, dy / dist
    else:
        ux, uy = 0.0, 0.0
    perp_x, perp_y = -uy, ux
    for j in range(n):
        prog = float(progress[j])
        px = ox + prog * dx
        py = oy + prog * dy
        amp = p.max_path_deviation * 2.0 * min(prog, 1.0 - prog)
        if amp > 0:
            off = (2.0 * rng.uniform() - 1.0) * amp
            px += off * perp_x
            py += off * perp_y
        xs[start + j] = px
        ys[start + j] = py
    # Endpoint renormalization guarantees the final sample is exactly on target.
    xs[end - 1] = dest[0]
    ys[end - 1] = dest[1]


REMAP_SAME_STIMULUS = "same_stimulus"
REMAP_NEW_STIMULUS = "new_stimulus"


def extract_velocities(trace: GazeTrace) -> np.ndarray:
    """Velocity magnitudes (deg/s) from positions by central finite
    differences (one-sided at the ends)."""
    n = len(trace)
    if n < 2:
        raise ParameterError("need at least 2 samples to compute velocities")
    t, x, y = trace.timestamps, trace.x, trace.y
    v = np.empty(n)
    for i in range(n):
        a = max(i - 1, 0)
        b = min(i + 1, n - 1)
        dt = t[b] - t[a]
        if dt <= 0:
            raise ParameterError(f"non-increasing timestamps at sample {i}")
        v[i] = math.hypot(x[b] - x[a], y[b] - y[a]) / dt / trace.pixels_per_degree
    return v


def fixation_centroids(trace: GazeTrace) -> TargetSet:
    """Centroids of the trace's fixation runs, weight 1 each."""
    eff = _effective_labels(trace.labels)
    pts = []
    for start, end, label in _label_runs(eff):
        if label == MovementLabel.FIXATION:
            pts.append(
                (
                    float(trace.x[start:end].mean()),
                    float(trace.y[start:end].mean()),
                    1.0,
                )
            )
    return TargetSet(pts, width=trace.width, height=trace.height)


def remap_real(
    real: GazeTrace,
    mode: str,
    p: MappingParams,
    rng: RandomSource,
    new_targets: SceneTargets | None = None,
) -> GazeTrace:
    """Re-generate a trace from real data: extract per-segment velocities,
    shuffle the segment order, and map onto fixation centroids
    (same stimulus) or a provided target set (new stimulus)."""
    if mode not in (REMAP_SAME_STIMULUS, REMAP_NEW_STIMULUS):
        raise ParameterError(f"unknown remap mode {mode!r}")
    if len(real) < 2:
        raise ParameterError("real trace too short to remap")
    velocities = extract_velocities(real)
    eff = _effective_labels(real.labels)
    if mode == REMAP_SAME_STIMULUS:
        targets = fixation_centroids(real)
        if len(targets) == 0:
            raise MappingError("same-stimulus remap requires at least one fixation")
        scene = SceneTargets.from_static(targets)
    else:
        if new_targets is None:
            raise ParameterError("new-stimulus remap requires a target set")
        scene = new_targets
    dts = np.diff(real.timestamps, prepend=0.0)
    positive = dts[dts > 0]
    if len(positive) == 0:
        raise ParameterError("real trace has no positive inter-sample intervals")
    dts = np.where(dts > 0, dts, float(np.median(positive)))
    segments = []
    for start, end, _ in _label_runs(eff):
        segments.append(
            (dts[start:end], velocities[start:end], real.labels[start:end])
        )
    rng.shuffle(segments)
    new_dts = np.concatenate([s[0] for s in segments])
    new_v = np.concatenate([s[1] for s in segments])
    new_l = np.concatenate([s[2] for s in segments])
    new_ts = np.cumsum(new_dts)
    signal = SampledSignal(new_ts, new_v, new_l)
    return map_to_gaze(signal, scene, p, rng)
