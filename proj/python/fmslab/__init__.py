"""Python bindings for the fmslab C++ core."""

from ._core import (
    ConfigError,
    Family,
    IoError,
    ModelSpec,
    NumericalError,
    PropagateOptions,
    TrajectoryKind,
    TrajectorySpec,
    __version__,
    analyze_germ,
    borel_lateral,
    dynamic_gap_scaling,
    eig_small,
    ep_location,
    euler_reference,
    euler_series,
    expm,
    find_invariant_pairing,
    hamiltonian,
    milnor,
    normalize,
    propagate,
    qgt,
    resum,
    run_config,
    saito_scan,
    static_gap_scaling,
    tjurina,
    trajectory_point,
    validate_config,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
