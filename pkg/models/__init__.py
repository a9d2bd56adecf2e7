"""
Data models for KPP Front Lab
"""

from .params import ModelParams, BoundEval, QuadratureConfig
from .profiles import (
    Grid1D,
    BvpGridConfig,
    NewtonConfig,
    PdeConfig,
    ProfileSolution,
    PdeState,
    PdeTrajectory,
    LogProfile,
)
from .certification import CheckResult, OscillationRecord, CertificationReport, CertifyConfig, TailLimits
from .spectral import RootCountResult, CrossingPoint, DecayRates

__all__ = [
    "ModelParams",
    "BoundEval",
    "QuadratureConfig",
    "Grid1D",
    "BvpGridConfig",
    "NewtonConfig",
    "PdeConfig",
    "ProfileSolution",
    "PdeState",
    "PdeTrajectory",
    "LogProfile",
    "CheckResult",
    "OscillationRecord",
    "CertificationReport",
    "CertifyConfig",
    "TailLimits",
    "RootCountResult",
    "CrossingPoint",
    "DecayRates",
]
