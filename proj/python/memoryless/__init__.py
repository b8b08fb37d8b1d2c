"""Memoryless communication protocols: builders, converters and exhaustive checkers."""

from ._core import (
    Error,
    Gbbp,
    GhConfig,
    NmProtocol,
    ScaleError,
    SplitFunction,
    SProtocol,
    bounds_report,
    build_gh_isa,
    build_gh_qdisj,
    build_protocol,
    counting_bound,
    exact_cc,
    gbbp_to_bbp,
    gbbp_to_nm,
    gh_to_nm,
    make_function,
    min_gbbp_size,
    nm_lower_bound,
    nm_to_gbbp,
    nm_to_gh,
    nm_to_s,
    one_way_cc,
    target_width,
    s_to_nm,
)

__all__ = [name for name in dir() if not name.startswith("_")]
