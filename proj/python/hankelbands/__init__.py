"""Band structure toolkit for periodic Hankel operators."""

from ._core import (
    ArgumentError,
    BracketError,
    ConfigError,
    DomainError,
    Error,
    NumericalError,
    PeriodicSymbol,
    TrackingError,
    carleman_ranked,
    check_identities,
    choose_truncation,
    eigvalsh,
    fiber_matrix,
    find_flat_A,
    fit_affine_in_P,
    gamma,
    half_cell_grid,
    log_gamma,
    mathieu_sweep,
    ref_elliptic,
    run_cli,
    secular_det,
    sweep,
)

__all__ = [name for name in dir() if not name.startswith("_")]
