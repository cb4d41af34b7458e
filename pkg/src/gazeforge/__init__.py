"""gazeforge: deterministic eye-movement velocity and gaze data simulator."""

from .core import (
    BoundedDistribution,
    DistKind,
    MovementLabel,
    RandomSource,
    VelocityProfile,
    sample_bounded,
)
from .errors import (
    ConstraintError,
    GazeforgeError,
    MappingError,
    ParameterError,
    ParseError,
    ValidationError,
)
from .generators import (
    FixationParams,
    PursuitParams,
    PursuitTrend,
    SaccadeParams,
    assemble,
    gen_fixation,
    gen_pursuit,
    gen_saccade,
)
from .mapping import GazeTrace, MappingParams, SceneTargets, fixation_walk, map_to_gaze, remap_real
from .noise import NoiseSpec, inject_noise
from .resampler import RateSpec, SampledSignal, resample
from .saliency import SaliencyMap, TargetSet, jitter_targets, local_maxima, spectral_residual
from .sequence import OrderingRule, SequenceSpec, build_sequence

__version__ = "0.1.0"

__all__ = [
    "BoundedDistribution",
    "ConstraintError",
    "DistKind",
    "FixationParams",
    "GazeTrace",
    "GazeforgeError",
    "MappingError",
    "MappingParams",
    "MovementLabel",
    "NoiseSpec",
    "OrderingRule",
    "ParameterError",
    "ParseError",
    "PursuitParams",
    "PursuitTrend",
    "RandomSource",
    "RateSpec",
    "SaccadeParams",
    "SaliencyMap",
    "SampledSignal",
    "SceneTargets",
    "SequenceSpec",
    "TargetSet",
    "ValidationError",
    "VelocityProfile",
    "assemble",
    "build_sequence",
    "fixation_walk",
    "gen_fixation",
    "gen_pursuit",
    "gen_saccade",
    "inject_noise",
    "jitter_targets",
    "local_maxima",
    "map_to_gaze",
    "remap_real",
    "resample",
    "sample_bounded",
    "spectral_residual",
]
