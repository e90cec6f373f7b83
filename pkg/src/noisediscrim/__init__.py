"""Discriminating local from common classical noise with two-mode Gaussian probes."""
from .channels import EnvironmentParams, channel_outputs
from .discrimination import bounds, optimize_strip
from .states import STSParams, SVParams, ssv_covariance, sts_covariance, sv_covariance

__all__ = [
    "EnvironmentParams",
    "STSParams",
    "SVParams",
    "bounds",
    "channel_outputs",
    "optimize_strip",
    "ssv_covariance",
    "sts_covariance",
    "sv_covariance",
]
