"""
Inference targets for calibrated regions and bands
"""

from .base_target import BaseTarget, TargetKind
from .marginal_cdf import MarginalCdfTarget
from .parameter import ParameterTarget
from .spectral import SpectralTarget


def resolve_target(target, est=None):
    """Accept a target instance, a ``TargetKind`` or its string value."""
    if isinstance(target, BaseTarget):
        return target
    kind = TargetKind.parse(target)
    if kind is TargetKind.REGION:
        return ParameterTarget(est)
    if kind is TargetKind.CDF_BAND:
        return MarginalCdfTarget()
    return SpectralTarget()


__all__ = [
    "BaseTarget",
    "TargetKind",
    "ParameterTarget",
    "MarginalCdfTarget",
    "SpectralTarget",
    "resolve_target",
]
