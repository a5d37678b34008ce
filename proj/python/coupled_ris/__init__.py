# SPDX-License-Identifier: Apache-2.0
"""RIS channel optimization with electromagnetic mutual coupling."""

from ._core import (
    AlignmentInfeasible,
    CayleyPole,
    ConfigError,
    DimensionError,
    Error,
    InvalidArgument,
    NotPositiveDefinite,
    SingularSystem,
    build_coupling_matrix,
    cayley,
    cayley_inv,
    channel_y,
    channel_z,
    coupling_benefit_margin,
    estimate_terms,
    lemma_checks,
    optimize,
    sample_channels,
    scaling_mc,
    scaling_nomc,
    selftest,
    upper_bound,
    z_to_y,
)

__all__ = [
    "AlignmentInfeasible",
    "CayleyPole",
    "ConfigError",
    "DimensionError",
    "Error",
    "InvalidArgument",
    "NotPositiveDefinite",
    "SingularSystem",
    "build_coupling_matrix",
    "cayley",
    "cayley_inv",
    "channel_y",
    "channel_z",
    "coupling_benefit_margin",
    "estimate_terms",
    "lemma_checks",
    "optimize",
    "sample_channels",
    "scaling_mc",
    "scaling_nomc",
    "selftest",
    "upper_bound",
    "z_to_y",
]
