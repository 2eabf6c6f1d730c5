"""Limiting random processes: samplers and exact moments."""

from .moments import (
    MomentSpec,
    empirical_moment,
    finite_q_moment,
    quadratic_moment_closed_form,
    theoretical_moment,
)
from .sampling import MODELS, PathBatch, PathSample, sample_paths, sample_process

__all__ = [
    "MODELS",
    "MomentSpec",
    "PathBatch",
    "PathSample",
    "empirical_moment",
    "finite_q_moment",
    "quadratic_moment_closed_form",
    "sample_paths",
    "sample_process",
    "theoretical_moment",
]
